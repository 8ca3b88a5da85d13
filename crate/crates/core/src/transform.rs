//! The exact DCT, the parametrized low-complexity matrix `T(a)`, its Gram
//! structure and orthonormalization by diagonal scaling.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error, Result};
use crate::matrix::{DyadicMatrix, ExactMatrix};
use crate::params::ParamVector;

/// The orthonormal `N`-point DCT-II matrix.
pub fn exact_dct_matrix(n: usize) -> Result<DMatrix<f64>> {
    if n < 2 {
        return Err(Error::InvalidSize(n));
    }
    let nf = n as f64;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let alpha = if i == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        alpha * (PI * i as f64 * (2 * j + 1) as f64 / (2.0 * nf)).cos()
    }))
}

/// Builds the 8x8 low-complexity matrix for parameter vector `a`.
pub fn build_t(a: &ParamVector) -> DyadicMatrix {
    let [a1, a2, a3, a4, a5, a6, a7, a8] = a.doubled();
    let one = 2;
    #[rustfmt::skip]
    let doubled = vec![
        one,  one,  one,  one,  one,  one,  one,  one,
        one,  one,  a1,   a1,  -a1,  -a1,  -one, -one,
        one,  a2,  -a2,  -one, -one, -a2,   a2,   one,
        a1,   a3,  -a4,  -a1,   a1,   a4,  -a3,  -a1,
        one, -one, -one,  one,  one, -one, -one,  one,
        a5,  -a5,  -a1,   a6,  -a6,   a1,   a5,  -a5,
        a2,  -one,  one, -a2,  -a2,   one, -one,  a2,
        a7,  -a6,   a1,  -a8,   a8,  -a1,   a6,  -a7,
    ];
    DyadicMatrix::from_doubled(8, 8, doubled).expect("8x8")
}

/// `T * T^T`, exactly.
pub fn gram(t: &DyadicMatrix) -> Result<ExactMatrix> {
    if !t.is_square() {
        return Err(shape_err("square matrix", format!("{}x{}", t.rows(), t.cols())));
    }
    t.product(&t.transpose())
}

/// Closed-form Gram entries of `T(a)`.
///
/// `tau[0..5]` are the non-constant diagonal values (rows 1, 2/6, 3, 5, 7);
/// `tau[5..11]` are the off-diagonal couplings between odd rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramDiagnostics {
    pub tau: [Rational64; 11],
    pub off_diagonal_zero: bool,
}

/// The eleven closed-form values in quarter units (`4 * tau`).
pub(crate) fn tau_quarters(a: &ParamVector) -> [i64; 11] {
    let [p1, p2, p3, p4, p5, p6, p7, p8] = a.doubled();
    [
        4 * p1 * p1 + 16,
        4 * p2 * p2 + 16,
        4 * p1 * p1 + 2 * p3 * p3 + 2 * p4 * p4,
        2 * p6 * p6 + 4 * p5 * p5 + 2 * p1 * p1,
        2 * (p8 * p8 + p7 * p7 + p6 * p6 + p1 * p1),
        4 * p1 - 2 * p1 * p1 + 4 * p3 - 2 * p1 * p4,
        2 * p1 * p6 - 2 * p1 * p1,
        2 * p1 * p1 - 4 * p6 + 4 * p7 - 2 * p1 * p8,
        2 * (p1 * p4 + p1 * p5 - p3 * p5 - p1 * p6),
        2 * (p1 * p8 + p1 * p7 - p3 * p6 - p1 * p4),
        2 * (p5 * p7 + p5 * p6 - p1 * p1 - p6 * p8),
    ]
}

pub fn gram_diagnostics(a: &ParamVector) -> GramDiagnostics {
    let q = tau_quarters(a);
    GramDiagnostics {
        tau: q.map(|v| Rational64::new(v, 4)),
        off_diagonal_zero: q[5..].iter().all(|&v| v == 0),
    }
}

/// Maps `(row, col)` of the 8x8 Gram matrix to the closed-form entry, in quarters.
pub fn closed_form_gram_quarters(a: &ParamVector, i: usize, j: usize) -> i64 {
    let q = tau_quarters(a);
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    match (i, j) {
        (0, 0) | (4, 4) => 32,
        (1, 1) => q[0],
        (2, 2) | (6, 6) => q[1],
        (3, 3) => q[2],
        (5, 5) => q[3],
        (7, 7) => q[4],
        (1, 3) => q[5],
        (1, 5) => q[6],
        (1, 7) => q[7],
        (3, 5) => q[8],
        (3, 7) => q[9],
        (5, 7) => q[10],
        _ => 0,
    }
}

/// True when `T(a)` has orthogonal rows and no zero row.
pub fn is_feasible(a: &ParamVector) -> bool {
    let q = tau_quarters(a);
    q[5..].iter().all(|&v| v == 0) && q[..5].iter().all(|&v| v > 0)
}

/// Diagonal of `S(a)`: inverse square roots of the Gram diagonal.
pub fn scaling_diag(a: &ParamVector) -> Result<[f64; 8]> {
    if !is_feasible(a) {
        return Err(Error::Infeasible(a.to_string()));
    }
    let q = tau_quarters(a);
    let inv_sqrt = |quarters: i64| 1.0 / (quarters as f64 / 4.0).sqrt();
    Ok([
        inv_sqrt(32),
        inv_sqrt(q[0]),
        inv_sqrt(q[1]),
        inv_sqrt(q[2]),
        inv_sqrt(32),
        inv_sqrt(q[3]),
        inv_sqrt(q[1]),
        inv_sqrt(q[4]),
    ])
}

/// A transform `diag(scale) * integer_part` with orthonormal rows.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalTransform {
    integer_part: DyadicMatrix,
    scale: Vec<f64>,
}

impl OrthonormalTransform {
    /// Scales an integer matrix whose Gram matrix is diagonal and positive.
    pub fn from_orthogonal(integer_part: DyadicMatrix) -> Result<Self> {
        let g = gram(&integer_part)?;
        let n = integer_part.rows();
        if !g.is_diagonal() || (0..n).any(|i| g.quarters_at(i, i) <= 0) {
            return Err(Error::Infeasible(format!("{n}-point integer matrix")));
        }
        let scale = (0..n)
            .map(|i| 1.0 / (g.quarters_at(i, i) as f64 / 4.0).sqrt())
            .collect();
        Ok(OrthonormalTransform { integer_part, scale })
    }

    pub fn size(&self) -> usize {
        self.integer_part.rows()
    }

    pub fn integer_part(&self) -> &DyadicMatrix {
        &self.integer_part
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    /// The composed real matrix `diag(scale) * T`.
    pub fn to_real(&self) -> DMatrix<f64> {
        let mut m = self.integer_part.to_real();
        for (i, s) in self.scale.iter().enumerate() {
            m.row_mut(i).scale_mut(*s);
        }
        m
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        self.to_real() * x
    }

    pub fn to_file(&self) -> TransformFile {
        TransformFile {
            n: self.size(),
            den: 2,
            entries: self.integer_part.doubled_rows(),
            scale: self.scale.clone(),
        }
    }

    pub fn from_file(file: &TransformFile) -> Result<Self> {
        if file.den != 2 {
            return Err(Error::Format(format!("unsupported denominator {}", file.den)));
        }
        if file.entries.len() != file.n || file.entries.iter().any(|r| r.len() != file.n) {
            return Err(shape_err(
                format!("{0}x{0} entries", file.n),
                "ragged or mis-sized rows",
            ));
        }
        if file.scale.len() != file.n {
            return Err(shape_err(
                format!("{} scale factors", file.n),
                file.scale.len().to_string(),
            ));
        }
        let integer_part = DyadicMatrix::from_doubled(file.n, file.n, file.entries.concat())?;
        let derived = OrthonormalTransform::from_orthogonal(integer_part)?;
        // the integer part is authoritative; the stored scale only has to agree with it
        let agrees = derived
            .scale
            .iter()
            .zip(&file.scale)
            .all(|(d, f)| (d - f).abs() <= 1e-12 * d.abs());
        if !agrees {
            return Err(Error::Format("scale does not match the integer part".into()));
        }
        Ok(derived)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// On-disk transform: `entries` are the integer part doubled, over `den = 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformFile {
    pub n: usize,
    pub den: i64,
    pub entries: Vec<Vec<i64>>,
    pub scale: Vec<f64>,
}

/// `S(a) * T(a)` for a feasible parameter vector.
pub fn orthonormal_approx(a: &ParamVector) -> Result<OrthonormalTransform> {
    let scale = scaling_diag(a)?;
    Ok(OrthonormalTransform {
        integer_part: build_t(a),
        scale: scale.to_vec(),
    })
}
