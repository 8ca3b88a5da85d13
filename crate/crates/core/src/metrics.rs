//! Proximity and coding measures for a candidate transform against the exact
//! DCT under a first-order Markov (AR(1)) signal model.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{shape_err, Error, Result};
use crate::kernel::{complexity, require_feasible, ComplexityCount};
use crate::params::ParamVector;
use crate::transform::{exact_dct_matrix, orthonormal_approx};

/// Default correlation coefficient of the signal model.
pub const DEFAULT_RHO: f64 = 0.95;

/// AR(1) model of size `n` with its covariance cached.
#[derive(Clone, Debug)]
pub struct SignalModel {
    rho: f64,
    n: usize,
    covariance: DMatrix<f64>,
    dct: DMatrix<f64>,
}

impl SignalModel {
    pub fn new(rho: f64, n: usize) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidModel(rho));
        }
        Ok(SignalModel {
            rho,
            n,
            covariance: ar1_covariance(rho, n)?,
            dct: exact_dct_matrix(n)?,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn dct(&self) -> &DMatrix<f64> {
        &self.dct
    }

    fn check(&self, c_hat: &DMatrix<f64>) -> Result<()> {
        if c_hat.nrows() != self.n || c_hat.ncols() != self.n {
            return Err(shape_err(
                format!("{0}x{0}", self.n),
                format!("{}x{}", c_hat.nrows(), c_hat.ncols()),
            ));
        }
        Ok(())
    }
}

/// `[R]_ij = rho^|i-j|`.
pub fn ar1_covariance(rho: f64, n: usize) -> Result<DMatrix<f64>> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidModel(rho));
    }
    if n < 2 {
        return Err(Error::InvalidSize(n));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rho.powi(i.abs_diff(j) as i32)))
}

/// Total error energy `pi * ||C_N - C_hat||_F^2`.
pub fn total_error_energy(c_hat: &DMatrix<f64>, n: usize) -> Result<f64> {
    if c_hat.nrows() != n || c_hat.ncols() != n {
        return Err(shape_err(
            format!("{n}x{n}"),
            format!("{}x{}", c_hat.nrows(), c_hat.ncols()),
        ));
    }
    let c = exact_dct_matrix(n)?;
    Ok(std::f64::consts::PI * (c - c_hat).norm_squared())
}

/// `(1/N) tr[(C_N - C_hat) R (C_N - C_hat)^T]`.
pub fn mse(c_hat: &DMatrix<f64>, model: &SignalModel) -> Result<f64> {
    model.check(c_hat)?;
    let d = model.dct() - c_hat;
    Ok((&d * model.covariance() * d.transpose()).trace() / model.n as f64)
}

/// Unified coding gain in dB.
///
/// With `h_k` the rows of `C_hat` and `g_k` the rows of `C_hat^{-T}`:
/// `Cg = 10 log10 prod_k [1 / (A_k B_k)]^{1/N}`, `A_k = h_k^T R h_k`, `B_k = ||g_k||^2`.
pub fn unified_coding_gain(c_hat: &DMatrix<f64>, model: &SignalModel) -> Result<f64> {
    model.check(c_hat)?;
    let inv = c_hat.clone().try_inverse().ok_or(Error::Singular)?;
    // rows of C^{-T} are the columns of C^{-1}
    let r = model.covariance();
    let n = model.n as f64;
    let mut sum_log = 0.0;
    for k in 0..model.n {
        let h = c_hat.row(k).transpose();
        let a_k = (h.transpose() * r * &h)[(0, 0)];
        let b_k = inv.column(k).norm_squared();
        let denom = a_k * b_k;
        if denom.is_nan() || denom <= 0.0 {
            return Err(Error::Singular);
        }
        sum_log -= denom.log10();
    }
    Ok(10.0 * sum_log / n)
}

/// Transform efficiency: diagonal share of `|R_y|` with `R_y = C R C^T`, in percent.
pub fn transform_efficiency(c_hat: &DMatrix<f64>, model: &SignalModel) -> Result<f64> {
    model.check(c_hat)?;
    let ry = c_hat * model.covariance() * c_hat.transpose();
    let total: f64 = ry.iter().map(|v| v.abs()).sum();
    let diag: f64 = ry.diagonal().iter().map(|v| v.abs()).sum();
    Ok(100.0 * diag / total)
}

/// The four transform-quality figures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quality {
    pub epsilon: f64,
    pub mse: f64,
    pub coding_gain_db: f64,
    pub efficiency_pct: f64,
}

pub fn quality(c_hat: &DMatrix<f64>, model: &SignalModel) -> Result<Quality> {
    Ok(Quality {
        epsilon: total_error_energy(c_hat, model.n)?,
        mse: mse(c_hat, model)?,
        coding_gain_db: unified_coding_gain(c_hat, model)?,
        efficiency_pct: transform_efficiency(c_hat, model)?,
    })
}

/// Quality figures plus arithmetic cost of one candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    pub epsilon: f64,
    pub mse: f64,
    pub coding_gain_db: f64,
    pub efficiency_pct: f64,
    pub complexity: ComplexityCount,
}

impl MetricsReport {
    pub fn new(q: Quality, complexity: ComplexityCount) -> Self {
        MetricsReport {
            epsilon: q.epsilon,
            mse: q.mse,
            coding_gain_db: q.coding_gain_db,
            efficiency_pct: q.efficiency_pct,
            complexity,
        }
    }

    pub fn quality(&self) -> Quality {
        Quality {
            epsilon: self.epsilon,
            mse: self.mse,
            coding_gain_db: self.coding_gain_db,
            efficiency_pct: self.efficiency_pct,
        }
    }

    pub fn additions(&self) -> u32 {
        self.complexity.additions
    }

    pub fn shifts(&self) -> u32 {
        self.complexity.shifts
    }
}

/// Evaluates a feasible 8-point parameter vector.
pub fn evaluate(a: &ParamVector, model: &SignalModel) -> Result<MetricsReport> {
    require_feasible(a)?;
    if model.n != 8 {
        return Err(shape_err("8-point model", format!("{}-point", model.n)));
    }
    let c_hat = orthonormal_approx(a)?.to_real();
    Ok(MetricsReport::new(quality(&c_hat, model)?, complexity(a)))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;

    use super::*;
    use crate::params::known_optima;

    fn pv(s: &str) -> ParamVector {
        s.parse().unwrap()
    }

    fn model8() -> SignalModel {
        SignalModel::new(DEFAULT_RHO, 8).unwrap()
    }

    /// Coding gain straight from the definition with explicit loops; independent of
    /// the matrix-expression path above.
    fn coding_gain_oracle(c: &DMatrix<f64>, rho: f64) -> f64 {
        let n = c.nrows();
        let inv_t = c.clone().try_inverse().unwrap().transpose();
        let mut product = 1.0f64;
        for k in 0..n {
            let mut a = 0.0;
            for i in 0..n {
                for j in 0..n {
                    a += c[(k, i)] * c[(k, j)] * rho.powi((i as i32 - j as i32).abs());
                }
            }
            let b: f64 = (0..n).map(|j| inv_t[(k, j)].powi(2)).sum();
            product *= (1.0 / (a * b)).powf(1.0 / n as f64);
        }
        10.0 * product.log10()
    }

    #[test]
    fn covariance_examples() {
        let r = ar1_covariance(0.95, 2).unwrap();
        assert_eq!(r, DMatrix::from_row_slice(2, 2, &[1.0, 0.95, 0.95, 1.0]));
        let r8 = ar1_covariance(0.95, 8).unwrap();
        assert!((0..8).all(|i| r8[(i, i)] == 1.0));
        assert_abs_diff_eq!(r8[(0, 7)], 0.698_337_296_093_75, epsilon = 1e-12);
        assert!(matches!(ar1_covariance(1.0, 8), Err(Error::InvalidModel(_))));
        assert!(matches!(SignalModel::new(0.0, 8), Err(Error::InvalidModel(_))));
        assert!(SignalModel::new(-0.5, 8).is_err());
    }

    #[test]
    fn exact_dct_calibration() {
        let m = model8();
        let c = exact_dct_matrix(8).unwrap();
        let q = quality(&c, &m).unwrap();
        assert!(q.epsilon.abs() < 1e-12);
        assert!(q.mse.abs() < 1e-12);
        let oracle = coding_gain_oracle(&c, 0.95);
        assert_abs_diff_eq!(oracle, 8.8259, epsilon = 5e-5);
        assert_abs_diff_eq!(q.coding_gain_db, oracle, epsilon = 1e-10);
    }

    #[test]
    fn published_eight_point_rows() {
        let m = model8();
        let r1 = evaluate(&pv("0,0,0,1,1,0,0,1"), &m).unwrap();
        assert_abs_diff_eq!(r1.epsilon, 6.85, epsilon = 0.02);
        assert_abs_diff_eq!(r1.mse, 0.03, epsilon = 0.005);
        assert_abs_diff_eq!(r1.coding_gain_db, 7.91, epsilon = 0.01);
        assert_abs_diff_eq!(r1.efficiency_pct, 85.64, epsilon = 0.05);

        let r15 = evaluate(&pv("1,0.5,0.5,0.5,1,1,0.5,0.5"), &m).unwrap();
        assert_abs_diff_eq!(r15.epsilon, 4.09, epsilon = 0.02);
        assert_abs_diff_eq!(r15.mse, 0.02, epsilon = 0.005);
        assert_abs_diff_eq!(r15.coding_gain_db, 8.33, epsilon = 0.01);
        assert_abs_diff_eq!(r15.efficiency_pct, 88.22, epsilon = 0.05);

        let r9 = evaluate(&pv("0,0.5,0,1,1,1,1,2"), &m).unwrap();
        assert_abs_diff_eq!(r9.epsilon, 4.12, epsilon = 0.02);
        assert_abs_diff_eq!(r9.efficiency_pct, 86.73, epsilon = 0.05);
        assert_eq!((r9.additions(), r9.shifts()), (20, 3));

        let r5 = evaluate(&pv("0,0.5,0,1,1,0,0,1"), &m).unwrap();
        assert_abs_diff_eq!(r5.epsilon, 5.93, epsilon = 0.02);
        assert_abs_diff_eq!(r5.coding_gain_db, 8.12, epsilon = 0.01);
        assert_eq!((r5.additions(), r5.shifts()), (18, 2));
    }

    #[test]
    fn infeasible_and_shape_errors() {
        let m = model8();
        assert!(matches!(
            evaluate(&pv("2,2,2,2,2,2,2,2"), &m),
            Err(Error::Infeasible(_))
        ));
        let c4 = exact_dct_matrix(4).unwrap();
        assert!(matches!(mse(&c4, &m), Err(Error::Shape { .. })));
        assert!(total_error_energy(&c4, 8).is_err());
        assert!(matches!(
            unified_coding_gain(&DMatrix::zeros(8, 8), &m),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn klt_is_fully_efficient() {
        let m = model8();
        let eig = SymmetricEigen::new(m.covariance().clone());
        let klt = eig.eigenvectors.transpose();
        assert_abs_diff_eq!(transform_efficiency(&klt, &m).unwrap(), 100.0, epsilon = 1e-9);
    }

    #[test]
    fn mse_trace_bound() {
        let m = model8();
        let lambda_max = SymmetricEigen::new(m.covariance().clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::MIN, f64::max);
        for a in known_optima() {
            let r = evaluate(&a, &m).unwrap();
            let bound = r.epsilon / (std::f64::consts::PI * 8.0) * lambda_max;
            assert!(r.mse <= bound + 1e-12, "{a}");
        }
    }

    proptest! {
        #[test]
        fn sign_flips_leave_coding_measures_unchanged(idx in 0usize..15, flips in prop::array::uniform8(any::<bool>())) {
            let m = model8();
            let c = orthonormal_approx(&known_optima()[idx]).unwrap().to_real();
            let mut flipped = c.clone();
            for (k, f) in flips.iter().enumerate() {
                if *f {
                    flipped.row_mut(k).neg_mut();
                }
            }
            let q0 = quality(&c, &m).unwrap();
            let q1 = quality(&flipped, &m).unwrap();
            prop_assert!((q0.coding_gain_db - q1.coding_gain_db).abs() < 1e-12);
            prop_assert!((q0.efficiency_pct - q1.efficiency_pct).abs() < 1e-10);
        }

        #[test]
        fn proximity_zero_only_for_dct(idx in 0usize..15) {
            let m = model8();
            let c = orthonormal_approx(&known_optima()[idx]).unwrap().to_real();
            let q = quality(&c, &m).unwrap();
            prop_assert!(q.epsilon > 1e-6 && q.mse > 1e-6);
            prop_assert!(q.efficiency_pct > 0.0 && q.efficiency_pct <= 100.0);
        }
    }
}
