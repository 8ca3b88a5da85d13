//! Sparse factorization `T(a) = P * K(a) * A2 * A1` and its arithmetic cost.
//!
//! Each factor is a [`SparseStage`]: per output, the list of `(input, coefficient)`
//! terms with zero coefficients removed. Evaluating a stage costs
//! `terms - 1` additions per output and one shift for every `±1/2` or `±2`
//! coefficient; negation is absorbed into the adders and costs nothing.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::matrix::DyadicMatrix;
use crate::params::{Dyadic, ParamVector};
use crate::transform::{is_feasible, scaling_diag};

/// Arithmetic needed by the signal flow graph: add, subtract, negate and the two shifts.
pub trait Lane: Copy + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> {
    fn zero() -> Self;
    fn halve(self) -> Self;
    fn double(self) -> Self;
}

impl Lane for f64 {
    fn zero() -> Self {
        0.0
    }
    fn halve(self) -> Self {
        self * 0.5
    }
    fn double(self) -> Self {
        self * 2.0
    }
}

/// Integer lane. Halving must be exact; callers feed doubled inputs (see [`apply_fast_exact`]).
impl Lane for i64 {
    fn zero() -> Self {
        0
    }
    fn halve(self) -> Self {
        assert!(self % 2 == 0, "inexact integer halving of {self}");
        self / 2
    }
    fn double(self) -> Self {
        self * 2
    }
}

#[inline]
fn scale_by<L: Lane>(v: L, c: Dyadic) -> L {
    match c.doubled() {
        2 => v,
        -2 => -v,
        1 => v.halve(),
        -1 => -v.halve(),
        4 => v.double(),
        -4 => -v.double(),
        _ => L::zero(),
    }
}

/// Additions and shifts actually executed by an evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    pub additions: u32,
    pub shifts: u32,
}

/// One sparse linear stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseStage {
    inputs: usize,
    rows: Vec<Vec<(usize, Dyadic)>>,
}

impl SparseStage {
    fn from_rows(inputs: usize, rows: Vec<Vec<(usize, Dyadic)>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, c)| !c.is_zero()).collect())
            .collect();
        SparseStage { inputs, rows }
    }

    fn from_unit_rows<const C: usize>(rows: &[[i64; C]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(j, &v)| (j, Dyadic::from_doubled(2 * v).expect("unit entry")))
                    .collect()
            })
            .collect();
        Self::from_rows(C, rows)
    }

    pub fn outputs(&self) -> usize {
        self.rows.len()
    }

    pub fn apply<L: Lane>(&self, x: &[L], count: &mut OpCount) -> Vec<L> {
        debug_assert_eq!(x.len(), self.inputs);
        self.rows
            .iter()
            .map(|terms| {
                let mut acc: Option<L> = None;
                for &(j, c) in terms {
                    if c.needs_shift() {
                        count.shifts += 1;
                    }
                    let term = scale_by(x[j], c);
                    acc = Some(match acc {
                        None => term,
                        Some(s) => {
                            count.additions += 1;
                            s + term
                        }
                    });
                }
                acc.unwrap_or_else(L::zero)
            })
            .collect()
    }

    pub fn transpose(&self) -> SparseStage {
        let mut rows = vec![Vec::new(); self.inputs];
        for (i, terms) in self.rows.iter().enumerate() {
            for &(j, c) in terms {
                rows[j].push((i, c));
            }
        }
        SparseStage {
            inputs: self.rows.len(),
            rows,
        }
    }

    pub fn to_matrix(&self) -> DyadicMatrix {
        let mut m = DyadicMatrix::zeros(self.rows.len(), self.inputs);
        for (i, terms) in self.rows.iter().enumerate() {
            for &(j, c) in terms {
                m.set_doubled(i, j, c.doubled());
            }
        }
        m
    }
}

/// Input butterfly `A1`.
#[rustfmt::skip]
const A1: [[i64; 8]; 8] = [
    [1, 0, 0, 0, 0, 0, 0, 1],
    [0, 1, 0, 0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 1, 0, 0],
    [0, 0, 0, 1, 1, 0, 0, 0],
    [0, 0, 0, 1, -1, 0, 0, 0],
    [0, 0, 1, 0, 0, -1, 0, 0],
    [0, 1, 0, 0, 0, 0, -1, 0],
    [1, 0, 0, 0, 0, 0, 0, -1],
];

/// Second butterfly `A2`, acting on the even half.
#[rustfmt::skip]
const A2: [[i64; 8]; 8] = [
    [1, 0, 0, 1, 0, 0, 0, 0],
    [0, 1, 1, 0, 0, 0, 0, 0],
    [0, 1, -1, 0, 0, 0, 0, 0],
    [1, 0, 0, -1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 1],
];

/// Output permutation: row `i` of `P` selects `PERM[i]`.
const PERM: [usize; 8] = [0, 4, 2, 6, 1, 5, 3, 7];

fn k_stage(a: &ParamVector) -> SparseStage {
    let one = Dyadic::ONE;
    let neg = |d: Dyadic| Dyadic::from_doubled(-d.doubled()).expect("negation stays in C");
    let (a1, a2, a3, a4, a5, a6, a7, a8) = (a.a(1), a.a(2), a.a(3), a.a(4), a.a(5), a.a(6), a.a(7), a.a(8));
    let rows = vec![
        vec![(0, one), (1, one)],
        vec![(0, one), (1, neg(one))],
        vec![(2, a2), (3, one)],
        vec![(2, neg(one)), (3, a2)],
        vec![(4, a1), (5, a1), (6, one), (7, one)],
        vec![(4, a6), (5, neg(a1)), (6, neg(a5)), (7, a5)],
        vec![(4, neg(a1)), (5, neg(a4)), (6, a3), (7, a1)],
        vec![(4, neg(a8)), (5, a1), (6, neg(a6)), (7, a7)],
    ];
    SparseStage::from_rows(8, rows)
}

fn p_stage() -> SparseStage {
    let rows = PERM.iter().map(|&j| vec![(j, Dyadic::ONE)]).collect();
    SparseStage::from_rows(8, rows)
}

/// The four stages in application order: `A1`, `A2`, `K(a)`, `P`.
pub fn stages(a: &ParamVector) -> [SparseStage; 4] {
    [
        SparseStage::from_unit_rows(&A1),
        SparseStage::from_unit_rows(&A2),
        k_stage(a),
        p_stage(),
    ]
}

/// The factor matrices of `T(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSet {
    pub a1: DyadicMatrix,
    pub a2: DyadicMatrix,
    pub k: DyadicMatrix,
    pub p: DyadicMatrix,
}

impl FactorSet {
    /// `P * K * A2 * A1`, exactly.
    pub fn product(&self) -> DyadicMatrix {
        self.p
            .mul(&self.k)
            .and_then(|m| m.mul(&self.a2))
            .and_then(|m| m.mul(&self.a1))
            .expect("factor products stay dyadic")
    }
}

pub fn factor_matrices(a: &ParamVector) -> FactorSet {
    let [a1, a2, k, p] = stages(a);
    FactorSet {
        a1: a1.to_matrix(),
        a2: a2.to_matrix(),
        k: k.to_matrix(),
        p: p.to_matrix(),
    }
}

/// Evaluates `T(a) * x` stage by stage and reports the operations executed.
pub fn apply_fast_counted<L: Lane>(a: &ParamVector, x: &[L; 8]) -> ([L; 8], OpCount) {
    let mut count = OpCount::default();
    let mut v = x.to_vec();
    for stage in stages(a).iter() {
        v = stage.apply(&v, &mut count);
    }
    (std::array::from_fn(|i| v[i]), count)
}

/// `T(a)` prepared for repeated evaluation without allocation.
///
/// The butterflies `A1` and `A2` are written out; `K(a)` keeps only its
/// nonzero terms. Build once per parameter vector and reuse across blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FastKernel {
    terms: [[(usize, Dyadic); 4]; 8],
    lens: [usize; 8],
}

impl FastKernel {
    pub fn new(a: &ParamVector) -> Self {
        let k = k_stage(a);
        let mut terms = [[(0, Dyadic::ZERO); 4]; 8];
        let mut lens = [0; 8];
        for (i, row) in k.rows.iter().enumerate() {
            lens[i] = row.len();
            terms[i][..row.len()].copy_from_slice(row);
        }
        FastKernel { terms, lens }
    }

    #[inline]
    pub fn apply<L: Lane>(&self, x: &[L; 8]) -> [L; 8] {
        let b = [
            x[0] + x[7],
            x[1] + x[6],
            x[2] + x[5],
            x[3] + x[4],
            x[3] - x[4],
            x[2] - x[5],
            x[1] - x[6],
            x[0] - x[7],
        ];
        let c = [
            b[0] + b[3],
            b[1] + b[2],
            b[1] - b[2],
            b[0] - b[3],
            b[4],
            b[5],
            b[6],
            b[7],
        ];
        let mut k = [L::zero(); 8];
        for (i, out) in k.iter_mut().enumerate() {
            let row = &self.terms[i][..self.lens[i]];
            if let Some((&(j, coef), rest)) = row.split_first() {
                *out = rest
                    .iter()
                    .fold(scale_by(c[j], coef), |acc, &(j, coef)| acc + scale_by(c[j], coef));
            }
        }
        PERM.map(|j| k[j])
    }
}

pub fn apply_fast<L: Lane>(a: &ParamVector, x: &[L; 8]) -> [L; 8] {
    FastKernel::new(a).apply(x)
}

/// `2 * T(a) * x` in exact integer arithmetic.
pub fn apply_fast_exact(a: &ParamVector, x: &[i64; 8]) -> [i64; 8] {
    apply_fast(a, &x.map(|v| v * 2))
}

/// `C(a)^T * X` via the transposed stages after diagonal scaling.
pub fn apply_inverse(a: &ParamVector, coeffs: &[f64; 8]) -> Result<[f64; 8]> {
    let scale = scaling_diag(a)?;
    let mut v: Vec<f64> = coeffs.iter().zip(scale).map(|(x, s)| x * s).collect();
    let mut count = OpCount::default();
    for stage in stages(a).iter().rev() {
        v = stage.transpose().apply(&v, &mut count);
    }
    Ok(std::array::from_fn(|i| v[i]))
}

/// `C(a) * x`: fast kernel followed by diagonal scaling.
pub fn apply_orthonormal(a: &ParamVector, x: &[f64; 8]) -> Result<[f64; 8]> {
    let scale = scaling_diag(a)?;
    let y = apply_fast(a, x);
    Ok(std::array::from_fn(|i| y[i] * scale[i]))
}

/// Which counting formula produced a [`ComplexityCount`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    General,
    Restricted(u8),
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::General => f.write_str("general"),
            Rule::Restricted(n) => write!(f, "R{n}"),
        }
    }
}

impl std::str::FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "general" {
            return Ok(Rule::General);
        }
        s.strip_prefix('R')
            .and_then(|n| n.parse::<u8>().ok())
            .filter(|n| (1..=9).contains(n))
            .map(Rule::Restricted)
            .ok_or_else(|| Error::Format(format!("unknown rule `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ComplexityCount {
    pub additions: u32,
    pub shifts: u32,
    pub rule: Rule,
}

struct CountRule {
    rule: Rule,
    base: u32,
    weights: [u32; 8],
    applies: fn(&[i64; 8]) -> bool,
}

fn all_eq(vals: &[i64]) -> bool {
    vals.windows(2).all(|w| w[0] == w[1])
}

// Predicates receive doubled magnitudes, so `|a| = 1` reads as `m == 2`.
const RULES: [CountRule; 10] = [
    CountRule {
        rule: Rule::General,
        base: 28,
        weights: [6, 2, 1, 1, 2, 2, 1, 1],
        applies: |_| true,
    },
    CountRule {
        rule: Rule::Restricted(1),
        base: 26,
        weights: [6, 2, 1, 0, 2, 0, 1, 0],
        applies: |m| all_eq(&[m[0], m[3], m[5], m[7]]),
    },
    CountRule {
        rule: Rule::Restricted(2),
        base: 26,
        weights: [0, 2, 0, 1, 3, 0, 1, 0],
        applies: |m| all_eq(&[m[0], m[2], 2]) && all_eq(&[m[4], m[5], m[7]]),
    },
    CountRule {
        rule: Rule::Restricted(3),
        base: 26,
        weights: [0, 2, 1, 1, 3, 0, 1, 0],
        applies: |m| m[0] == 2 && m[4] == m[5] && m[6] == m[7],
    },
    CountRule {
        rule: Rule::Restricted(4),
        base: 26,
        weights: [0, 2, 1, 0, 0, 0, 1, 1],
        applies: |m| all_eq(&[m[0], m[4], m[5], 2]) && m[2] == m[3],
    },
    CountRule {
        rule: Rule::Restricted(5),
        base: 26,
        weights: [0, 2, 1, 0, 0, 2, 0, 1],
        applies: |m| all_eq(&[m[0], m[3], m[4], m[6], 2]),
    },
    CountRule {
        rule: Rule::Restricted(6),
        base: 26,
        weights: [6, 2, 0, 1, 1, 2, 0, 1],
        applies: |m| m[0] == m[2] && m[5] == m[6],
    },
    CountRule {
        rule: Rule::Restricted(7),
        base: 24,
        weights: [6, 2, 0, 0, 1, 0, 0, 0],
        applies: |m| all_eq(&[m[0], m[2], m[3], m[5], m[6], m[7]]),
    },
    CountRule {
        rule: Rule::Restricted(8),
        base: 24,
        weights: [0, 2, 0, 0, 0, 0, 0, 0],
        applies: |m| all_eq(&[m[0], m[2], m[3], m[4], m[5], m[6], m[7], 2]),
    },
    CountRule {
        rule: Rule::Restricted(9),
        base: 24,
        weights: [0, 2, 1, 0, 0, 0, 1, 0],
        applies: |m| all_eq(&[m[0], m[4], m[5], 2]) && m[2] == m[3] && m[6] == m[7],
    },
];

impl CountRule {
    fn count(&self, a: &ParamVector) -> ComplexityCount {
        let mut zeros = 0;
        let mut shifts = 0;
        for (w, d) in self.weights.iter().zip(a.0) {
            if d.is_zero() {
                zeros += w;
            } else if d.needs_shift() {
                shifts += w;
            }
        }
        ComplexityCount {
            additions: self.base.saturating_sub(zeros),
            shifts,
            rule: self.rule,
        }
    }
}

/// Additions and shifts under the cheapest applicable counting rule.
///
/// Ties on additions go to fewer shifts, then to the earlier rule.
pub fn complexity(a: &ParamVector) -> ComplexityCount {
    let mags = a.0.map(|d| d.abs().doubled());
    RULES
        .iter()
        .filter(|r| (r.applies)(&mags))
        .map(|r| r.count(a))
        .min_by_key(|c| (c.additions, c.shifts, c.rule))
        .expect("general rule always applies")
}

/// The general-formula count, without restriction rules.
pub fn general_complexity(a: &ParamVector) -> ComplexityCount {
    RULES[0].count(a)
}

/// Counts operations by actually running the general signal flow graph.
pub fn instrumented_count(a: &ParamVector) -> OpCount {
    apply_fast_counted(a, &[1.0f64; 8]).1
}

/// Feasibility gate shared by operations that need an orthonormal result.
pub fn require_feasible(a: &ParamVector) -> Result<()> {
    if is_feasible(a) {
        Ok(())
    } else {
        Err(Error::Infeasible(a.to_string()))
    }
}
