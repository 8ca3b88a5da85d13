//! Exhaustive search over all `7^8` parameter vectors and extraction of the
//! Pareto front for the six objectives (eps, MSE, -Cg, -eta, additions, shifts).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fmt::sig6;
use crate::kernel::complexity;
use crate::metrics::{quality, MetricsReport, SignalModel};
use crate::params::{known_optima, ParamVector, SEARCH_SPACE_SIZE};
use crate::transform::{build_t, gram, is_feasible, orthonormal_approx};

/// All candidates in lexicographic order over `(-2, -1, -1/2, 0, 1/2, 1, 2)`.
pub fn enumerate_candidates() -> impl Iterator<Item = ParamVector> {
    (0..SEARCH_SPACE_SIZE).map(ParamVector::from_index)
}

/// Candidates whose `T(a)` is orthogonal and nonsingular.
pub fn feasible_candidates() -> impl Iterator<Item = ParamVector> {
    enumerate_candidates().filter(is_feasible)
}

/// Objective vector to minimize, quantized to 1e-9 so floating noise cannot split ties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Objectives([i64; 6]);

const QUANTUM: f64 = 1e9;

impl Objectives {
    pub fn from_report(r: &MetricsReport) -> Self {
        let q = |v: f64| (v * QUANTUM).round() as i64;
        Objectives([
            q(r.epsilon),
            q(r.mse),
            q(-r.coding_gain_db),
            q(-r.efficiency_pct),
            r.complexity.additions as i64 * QUANTUM as i64,
            r.complexity.shifts as i64 * QUANTUM as i64,
        ])
    }

    pub fn values(&self) -> [f64; 6] {
        self.0.map(|v| v as f64 / QUANTUM)
    }

    /// Component-wise `<=` with at least one strict `<`.
    pub fn dominates(&self, other: &Objectives) -> bool {
        let mut strict = false;
        for (x, y) in self.0.iter().zip(other.0.iter()) {
            match x.cmp(y) {
                Ordering::Greater => return false,
                Ordering::Less => strict = true,
                Ordering::Equal => {}
            }
        }
        strict
    }
}

/// An evaluated candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub a: ParamVector,
    pub report: MetricsReport,
}

impl Candidate {
    pub fn objectives(&self) -> Objectives {
        Objectives::from_report(&self.report)
    }
}

/// A non-dominated candidate. Candidates with identical objectives form one
/// group; exactly one per group is marked `canonical`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParetoEntry {
    pub a: ParamVector,
    pub report: MetricsReport,
    pub canonical: bool,
}

/// Indices of non-dominated items, grouped by identical objectives.
///
/// A dominating point always precedes the dominated one in lexicographic order,
/// so one sorted pass comparing against the front found so far suffices.
pub fn front_groups(objs: &[Objectives]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..objs.len()).collect();
    order.sort_by(|&i, &j| objs[i].cmp(&objs[j]).then(i.cmp(&j)));

    let mut groups: Vec<(Objectives, Vec<usize>)> = Vec::new();
    for i in order {
        let o = objs[i];
        if let Some((last, members)) = groups.last_mut() {
            if *last == o {
                members.push(i);
                continue;
            }
        }
        if groups.iter().any(|(f, _)| f.dominates(&o)) {
            continue;
        }
        groups.push((o, vec![i]));
    }
    groups.into_iter().map(|(_, m)| m).collect()
}

/// Preferred representative: most nonnegative components, then lexicographically smallest.
fn canonical_order(x: &ParamVector, y: &ParamVector) -> Ordering {
    y.nonnegative_count().cmp(&x.nonnegative_count()).then(x.cmp(y))
}

pub fn pareto_front(candidates: &[Candidate]) -> Vec<ParetoEntry> {
    let objs: Vec<Objectives> = candidates.iter().map(Candidate::objectives).collect();
    let mut out = Vec::new();
    for group in front_groups(&objs) {
        let best = group
            .iter()
            .copied()
            .min_by(|&i, &j| canonical_order(&candidates[i].a, &candidates[j].a))
            .expect("groups are non-empty");
        for i in group {
            out.push(ParetoEntry {
                a: candidates[i].a,
                report: candidates[i].report,
                canonical: i == best,
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Evaluate only orthogonal candidates.
    pub feasibility_filter: bool,
    /// Worker threads; `None` uses all available cores.
    pub workers: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            feasibility_filter: true,
            workers: None,
        }
    }
}

/// Outcome of a full sweep.
#[derive(Clone, Debug)]
pub struct SearchRun {
    pub rho: f64,
    pub feasibility_filter: bool,
    pub enumerated: u32,
    pub feasible: usize,
    /// Candidates that could not be evaluated (zero row or singular).
    pub skipped: usize,
    pub evaluated: usize,
    pub front: Vec<ParetoEntry>,
}

impl SearchRun {
    /// Canonical front members ordered by additions, then eps, then parameters.
    pub fn ranked(&self) -> Vec<ParetoEntry> {
        let mut rows: Vec<ParetoEntry> = self.front.iter().filter(|e| e.canonical).copied().collect();
        rows.sort_by(|x, y| {
            x.report
                .complexity
                .additions
                .cmp(&y.report.complexity.additions)
                .then(x.report.epsilon.total_cmp(&y.report.epsilon))
                .then(x.a.cmp(&y.a))
        });
        rows
    }

    /// Canonical members not among the published optima, and optima missing from the front.
    pub fn compare_with_known(&self) -> (Vec<ParamVector>, Vec<ParamVector>) {
        let known = known_optima();
        let canon: Vec<ParamVector> = self.ranked().iter().map(|e| e.a).collect();
        let surplus = canon.iter().filter(|a| !known.contains(a)).copied().collect();
        let missing = known.iter().filter(|a| !canon.contains(a)).copied().collect();
        (surplus, missing)
    }

    /// Tie groups with more than one member, for reporting.
    pub fn tie_groups(&self) -> Vec<Vec<ParamVector>> {
        let mut by_obj: BTreeMap<Objectives, Vec<ParamVector>> = BTreeMap::new();
        for e in &self.front {
            by_obj.entry(Objectives::from_report(&e.report)).or_default().push(e.a);
        }
        by_obj.into_values().filter(|g| g.len() > 1).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_front_csv(&self.ranked(), out)
    }
}

pub const FRONT_CSV_HEADER: [&str; 16] = [
    "rank", "a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8", "epsilon", "mse", "cg", "eta", "adds", "shifts", "rule",
];

pub fn write_front_csv<W: Write>(rows: &[ParetoEntry], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FRONT_CSV_HEADER)?;
    for (rank, e) in rows.iter().enumerate() {
        let mut rec = vec![(rank + 1).to_string()];
        rec.extend(e.a.0.iter().map(|d| d.to_string()));
        rec.extend(report_fields(&e.report));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `epsilon, mse, cg, eta, adds, shifts, rule` as CSV fields.
pub fn report_fields(r: &MetricsReport) -> Vec<String> {
    vec![
        sig6(r.epsilon),
        sig6(r.mse),
        sig6(r.coding_gain_db),
        sig6(r.efficiency_pct),
        r.complexity.additions.to_string(),
        r.complexity.shifts.to_string(),
        r.complexity.rule.to_string(),
    ]
}

/// Row-normalized `T(a)`, for candidates evaluated without the feasibility filter.
fn row_normalized(a: &ParamVector) -> Option<DMatrix<f64>> {
    let t = build_t(a);
    let g = gram(&t).ok()?;
    let mut m = t.to_real();
    for i in 0..8 {
        let q = g.quarters_at(i, i);
        if q <= 0 {
            return None;
        }
        m.row_mut(i).scale_mut(1.0 / (q as f64 / 4.0).sqrt());
    }
    Some(m)
}

fn evaluate_candidate(a: ParamVector, model: &SignalModel, filter: bool) -> Option<Candidate> {
    let c_hat = if is_feasible(&a) {
        orthonormal_approx(&a).ok()?.to_real()
    } else if filter {
        return None;
    } else {
        row_normalized(&a)?
    };
    let q = quality(&c_hat, model).ok()?;
    Some(Candidate {
        a,
        report: MetricsReport::new(q, complexity(&a)),
    })
}

/// Evaluates candidates in parallel; output order matches enumeration order.
pub fn evaluate_all(model: &SignalModel, options: SearchOptions) -> Result<(Vec<Candidate>, usize)> {
    let filter = options.feasibility_filter;
    let work = || {
        let feasible = (0..SEARCH_SPACE_SIZE)
            .into_par_iter()
            .filter(|&i| is_feasible(&ParamVector::from_index(i)))
            .count();
        let candidates: Vec<Candidate> = (0..SEARCH_SPACE_SIZE)
            .into_par_iter()
            .filter_map(|i| evaluate_candidate(ParamVector::from_index(i), model, filter))
            .collect();
        (candidates, feasible)
    };
    match options.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Format(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

/// Enumerate, filter, evaluate, and extract the front.
pub fn run_search(model: &SignalModel, options: SearchOptions) -> Result<SearchRun> {
    if model.size() != 8 {
        return Err(Error::InvalidSize(model.size()));
    }
    let (candidates, feasible) = evaluate_all(model, options)?;
    let attempted = if options.feasibility_filter {
        feasible
    } else {
        SEARCH_SPACE_SIZE as usize
    };
    Ok(SearchRun {
        rho: model.rho(),
        feasibility_filter: options.feasibility_filter,
        enumerated: SEARCH_SPACE_SIZE,
        feasible,
        skipped: attempted - candidates.len(),
        evaluated: candidates.len(),
        front: pareto_front(&candidates),
    })
}
