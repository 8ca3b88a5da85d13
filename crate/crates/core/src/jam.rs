//! Size doubling of low-complexity transforms.
//!
//! A `2N`-point transform is assembled from two copies of an `N`-point one
//! behind an input butterfly `[[I, J], [I, -J]]` (`J` the counter-identity).
//! The first copy sees the symmetric half of the input and yields the even
//! frequencies, the second sees the antisymmetric half and yields the odd ones;
//! the output rows are interleaved so that row order follows frequency.

use crate::error::{shape_err, Error, Result};
use crate::kernel::{apply_fast_counted, complexity, require_feasible, ComplexityCount, Lane, OpCount};
use crate::matrix::DyadicMatrix;
use crate::params::ParamVector;
use crate::transform::{build_t, OrthonormalTransform};

/// `[[I_N, J_N], [I_N, -J_N]]`.
pub fn input_butterfly(n: usize) -> DyadicMatrix {
    let mut b = DyadicMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        b.set_doubled(i, i, 2);
        b.set_doubled(i, 2 * n - 1 - i, 2);
        b.set_doubled(n + i, i, 2);
        b.set_doubled(n + i, 2 * n - 1 - i, -2);
    }
    b
}

/// Row order that interleaves the two half-size outputs.
pub fn interleave_order(n: usize) -> Vec<usize> {
    (0..2 * n).map(|r| if r % 2 == 0 { r / 2 } else { n + r / 2 }).collect()
}

/// One doubling step: `interleave(blockdiag(T, T) * butterfly)`.
pub fn scale_once(t: &DyadicMatrix) -> Result<DyadicMatrix> {
    if !t.is_square() {
        return Err(shape_err("square matrix", format!("{}x{}", t.rows(), t.cols())));
    }
    let n = t.rows();
    let stacked = t.block_diag2().mul(&input_butterfly(n))?;
    Ok(stacked.permute_rows(&interleave_order(n)))
}

/// Cost of the doubled transform: twice the shifts, twice the additions plus `2N`.
pub fn scaled_complexity(c: ComplexityCount, n: u32) -> ComplexityCount {
    ComplexityCount {
        additions: 2 * c.additions + 2 * n,
        shifts: 2 * c.shifts,
        rule: c.rule,
    }
}

/// A 16- or 32-point transform grown from an 8-point seed.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledTransform {
    pub seed: ParamVector,
    pub transform: OrthonormalTransform,
    pub complexity: ComplexityCount,
}

impl ScaledTransform {
    pub fn size(&self) -> usize {
        self.transform.size()
    }

    pub fn integer_part(&self) -> &DyadicMatrix {
        self.transform.integer_part()
    }

    pub fn scale(&self) -> &[f64] {
        self.transform.scale()
    }
}

/// Number of doublings from 8 points to `target`.
fn doublings(target: usize) -> Result<u32> {
    match target {
        8 => Ok(0),
        16 => Ok(1),
        32 => Ok(2),
        other => Err(Error::InvalidSize(other)),
    }
}

/// Builds the `target`-point transform (8, 16 or 32) from a feasible seed.
pub fn build_scaled(a: &ParamVector, target: usize) -> Result<ScaledTransform> {
    let steps = doublings(target)?;
    require_feasible(a)?;
    let mut t = build_t(a);
    let mut c = complexity(a);
    for _ in 0..steps {
        c = scaled_complexity(c, t.rows() as u32);
        t = scale_once(&t)?;
    }
    Ok(ScaledTransform {
        seed: *a,
        transform: OrthonormalTransform::from_orthogonal(t)?,
        complexity: c,
    })
}

/// Evaluates the integer part of the `x.len()`-point transform through the fast
/// path: butterfly, two half-size kernels, interleave. Counts every operation.
pub fn apply_scaled_counted<L: Lane>(a: &ParamVector, x: &[L]) -> Result<(Vec<L>, OpCount)> {
    let len = x.len();
    doublings(len)?;
    Ok(apply_rec(a, x))
}

fn apply_rec<L: Lane>(a: &ParamVector, x: &[L]) -> (Vec<L>, OpCount) {
    let len = x.len();
    if len == 8 {
        let input: [L; 8] = std::array::from_fn(|i| x[i]);
        let (y, c) = apply_fast_counted(a, &input);
        return (y.to_vec(), c);
    }
    let n = len / 2;
    let sym: Vec<L> = (0..n).map(|i| x[i] + x[len - 1 - i]).collect();
    let anti: Vec<L> = (0..n).map(|i| x[i] - x[len - 1 - i]).collect();
    let (even, ce) = apply_rec(a, &sym);
    let (odd, co) = apply_rec(a, &anti);
    let mut out = Vec::with_capacity(len);
    for k in 0..n {
        out.push(even[k]);
        out.push(odd[k]);
    }
    let count = OpCount {
        additions: ce.additions + co.additions + len as u32,
        shifts: ce.shifts + co.shifts,
    };
    (out, count)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::kernel::instrumented_count;
    use crate::params::known_optima;
    use crate::transform::gram;

    fn pv(s: &str) -> ParamVector {
        s.parse().unwrap()
    }

    #[test]
    fn dc_row_stays_all_ones() {
        for a in known_optima() {
            let t16 = scale_once(&build_t(&a)).unwrap();
            assert!((0..16).all(|j| t16.doubled_at(0, j) == 2));
            let t32 = scale_once(&t16).unwrap();
            assert!((0..32).all(|j| t32.doubled_at(0, j) == 2));
        }
    }

    #[test]
    fn closed_form_rows() {
        // row 2k = [T_k, rev T_k], row 2k+1 = [T_k, -rev T_k]
        let t = build_t(&pv("0,0.5,0,1,1,1,1,2"));
        let t16 = scale_once(&t).unwrap();
        for k in 0..8 {
            for j in 0..8 {
                assert_eq!(t16.doubled_at(2 * k, j), t.doubled_at(k, j));
                assert_eq!(t16.doubled_at(2 * k, 15 - j), t.doubled_at(k, j));
                assert_eq!(t16.doubled_at(2 * k + 1, j), t.doubled_at(k, j));
                assert_eq!(t16.doubled_at(2 * k + 1, 15 - j), -t.doubled_at(k, j));
            }
        }
    }

    #[test]
    fn gram_of_doubled_seed() {
        let t16 = scale_once(&build_t(&pv("0,0,0,1,1,0,0,1"))).unwrap();
        let g = gram(&t16).unwrap();
        assert!(g.is_diagonal());
        let diag: Vec<i64> = g.diagonal().iter().map(|r| r.to_integer()).collect();
        let seed = [8, 4, 4, 2, 8, 4, 4, 2];
        let expect: Vec<i64> = seed.iter().flat_map(|&d| [2 * d, 2 * d]).collect();
        assert_eq!(diag, expect);
    }

    #[test]
    fn orthogonality_preserved_for_all_seeds() {
        for a in known_optima() {
            for size in [16, 32] {
                let s = build_scaled(&a, size).unwrap();
                assert!(gram(s.integer_part()).unwrap().is_diagonal());
                assert!(s.integer_part().entries_in_c());
                let c = s.transform.to_real();
                let err = (&c * c.transpose() - nalgebra::DMatrix::identity(size, size))
                    .abs()
                    .max();
                assert!(err < 1e-12, "{a} @ {size}: {err}");
            }
        }
    }

    #[test]
    fn composition_gives_32_points() {
        let a = pv("1,0.5,0.5,0.5,1,1,0.5,0.5");
        let twice = scale_once(&scale_once(&build_t(&a)).unwrap()).unwrap();
        assert_eq!(&twice, build_scaled(&a, 32).unwrap().integer_part());
        assert!(scale_once(&DyadicMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn complexity_recursion() {
        let c1 = complexity(&pv("0,0,0,1,1,0,0,1"));
        let c16 = scaled_complexity(c1, 8);
        assert_eq!((c16.additions, c16.shifts), (48, 0));
        let c32 = scaled_complexity(c16, 16);
        assert_eq!((c32.additions, c32.shifts), (128, 0));
        let c15 = scaled_complexity(complexity(&pv("1,0.5,0.5,0.5,1,1,0.5,0.5")), 8);
        assert_eq!((c15.additions, c15.shifts), (64, 8));
        let s = build_scaled(&pv("1,0.5,0.5,0.5,1,1,0.5,0.5"), 32).unwrap();
        assert_eq!((s.complexity.additions, s.complexity.shifts), (160, 16));
    }

    #[test]
    fn fast_path_matches_matrix_and_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for a in known_optima() {
            for size in [16usize, 32] {
                let s = build_scaled(&a, size).unwrap();
                let x: Vec<i64> = (0..size).map(|_| rng.random_range(-255..=255)).collect();
                let doubled: Vec<i64> = x.iter().map(|v| v * 2).collect();
                let (y, ops) = apply_scaled_counted(&a, &doubled).unwrap();
                assert_eq!(y, s.integer_part().mul_vec_doubled(&x).unwrap());

                let eight = instrumented_count(&a);
                let mut expect = OpCount {
                    additions: eight.additions,
                    shifts: eight.shifts,
                };
                let mut n = 8;
                while n < size {
                    expect = OpCount {
                        additions: 2 * expect.additions + 2 * n as u32,
                        shifts: 2 * expect.shifts,
                    };
                    n *= 2;
                }
                assert_eq!(ops, expect);
                assert!(ops.additions >= s.complexity.additions);
            }
        }
    }

    #[test]
    fn rejects_bad_targets_and_seeds() {
        assert!(matches!(
            build_scaled(&pv("0,0,0,1,1,0,0,1"), 64),
            Err(Error::InvalidSize(64))
        ));
        assert!(matches!(
            build_scaled(&pv("2,2,2,2,2,2,2,2"), 16),
            Err(Error::Infeasible(_))
        ));
        assert!(apply_scaled_counted(&pv("0,0,0,1,1,0,0,1"), &[0.0f64; 12]).is_err());
    }
}
