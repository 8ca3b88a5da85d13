//! JPEG-like block compression harness: 2-D block transform, zig-zag
//! coefficient retention, reconstruction, and PSNR/SSIM/APE scoring.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{shape_err, Error, Result};
use crate::fmt::sig6;
use crate::pgm::GrayImage;
use crate::transform::{exact_dct_matrix, OrthonormalTransform};

/// PSNR written in place of infinity for identical images.
pub const PSNR_SENTINEL_DB: f64 = 999.0;

/// Real orthonormal `N x N` matrix used blockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTransform {
    matrix: DMatrix<f64>,
}

impl BlockTransform {
    pub fn dct(n: usize) -> Result<Self> {
        Ok(BlockTransform {
            matrix: exact_dct_matrix(n)?,
        })
    }

    pub fn from_orthonormal(t: &OrthonormalTransform) -> Self {
        BlockTransform { matrix: t.to_real() }
    }

    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(shape_err(
                "square matrix",
                format!("{}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        Ok(BlockTransform { matrix })
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    fn check(&self, block: &DMatrix<f64>) -> Result<()> {
        let n = self.size();
        if block.nrows() != n || block.ncols() != n {
            return Err(shape_err(
                format!("{n}x{n} block"),
                format!("{}x{}", block.nrows(), block.ncols()),
            ));
        }
        Ok(())
    }
}

/// `B = C A C^T`.
pub fn forward_2d(t: &BlockTransform, block: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    t.check(block)?;
    Ok(&t.matrix * block * t.matrix.transpose())
}

/// `A = C^T B C`.
pub fn inverse_2d(t: &BlockTransform, coeffs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    t.check(coeffs)?;
    Ok(t.matrix.transpose() * coeffs * &t.matrix)
}

/// JPEG zig-zag scan of an `n x n` grid as `(row, col)` positions.
pub fn zigzag_order(n: usize) -> Result<Vec<(usize, usize)>> {
    if n < 2 {
        return Err(Error::InvalidSize(n));
    }
    let mut out = Vec::with_capacity(n * n);
    for s in 0..(2 * n - 1) {
        let lo = s.saturating_sub(n - 1);
        let hi = s.min(n - 1);
        if s % 2 == 1 {
            // down-left: row increases
            for row in lo..=hi {
                out.push((row, s - row));
            }
        } else {
            for row in (lo..=hi).rev() {
                out.push((row, s - row));
            }
        }
    }
    Ok(out)
}

/// Keep the first `round(r * N^2)` coefficients in zig-zag order.
#[derive(Clone, Debug, PartialEq)]
pub struct RetentionPolicy {
    r_fraction: f64,
    zigzag: Vec<(usize, usize)>,
}

impl RetentionPolicy {
    pub fn new(r_fraction: f64, n: usize) -> Result<Self> {
        if !(r_fraction > 0.0 && r_fraction <= 1.0) {
            return Err(Error::Policy(r_fraction));
        }
        Ok(RetentionPolicy {
            r_fraction,
            zigzag: zigzag_order(n)?,
        })
    }

    pub fn r_fraction(&self) -> f64 {
        self.r_fraction
    }

    pub fn size(&self) -> usize {
        (self.zigzag.len() as f64).sqrt() as usize
    }

    pub fn retained_count(&self) -> usize {
        (self.r_fraction * self.zigzag.len() as f64).round() as usize
    }

    pub fn zigzag(&self) -> &[(usize, usize)] {
        &self.zigzag
    }
}

pub fn retain(coeffs: &DMatrix<f64>, policy: &RetentionPolicy) -> Result<DMatrix<f64>> {
    let n = policy.size();
    if coeffs.nrows() != n || coeffs.ncols() != n {
        return Err(shape_err(
            format!("{n}x{n} block"),
            format!("{}x{}", coeffs.nrows(), coeffs.ncols()),
        ));
    }
    let mut out = DMatrix::zeros(n, n);
    for &(i, j) in &policy.zigzag[..policy.retained_count()] {
        out[(i, j)] = coeffs[(i, j)];
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityScores {
    /// `f64::INFINITY` when the images are identical.
    pub psnr_db: f64,
    pub ssim: f64,
    pub mse: f64,
}

/// Outcome of compressing one image.
#[derive(Clone, Debug)]
pub struct Compressed {
    /// Clamped real-valued reconstruction, row-major.
    pub samples: Vec<f64>,
    pub image: GrayImage,
    pub scores: QualityScores,
}

fn padded_plane(img: &GrayImage, n: usize) -> (usize, usize, Vec<f64>) {
    let pw = img.width().div_ceil(n) * n;
    let ph = img.height().div_ceil(n) * n;
    let mut plane = vec![0.0; pw * ph];
    for y in 0..ph {
        let sy = y.min(img.height() - 1);
        for x in 0..pw {
            plane[y * pw + x] = img.get(x.min(img.width() - 1), sy) as f64;
        }
    }
    (pw, ph, plane)
}

/// Forward, truncate and invert every block; returns the unclamped plane
/// cropped to the image size.
pub fn reconstruct(img: &GrayImage, t: &BlockTransform, policy: &RetentionPolicy) -> Result<Vec<f64>> {
    let n = t.size();
    if policy.size() != n {
        return Err(shape_err(
            format!("{n}-point policy"),
            format!("{}-point", policy.size()),
        ));
    }
    let (pw, ph, plane) = padded_plane(img, n);
    let bw = pw / n;
    let blocks: Vec<DMatrix<f64>> = (0..(pw / n) * (ph / n))
        .into_par_iter()
        .map(|b| {
            let (bx, by) = ((b % bw) * n, (b / bw) * n);
            let block = DMatrix::from_fn(n, n, |i, j| plane[(by + i) * pw + bx + j]);
            let coeffs = forward_2d(t, &block)?;
            inverse_2d(t, &retain(&coeffs, policy)?)
        })
        .collect::<Result<_>>()?;
    let mut out = vec![0.0; img.width() * img.height()];
    for (b, block) in blocks.iter().enumerate() {
        let (bx, by) = ((b % bw) * n, (b / bw) * n);
        for i in 0..n {
            let y = by + i;
            if y >= img.height() {
                break;
            }
            for j in 0..n {
                let x = bx + j;
                if x < img.width() {
                    out[y * img.width() + x] = block[(i, j)];
                }
            }
        }
    }
    Ok(out)
}

pub fn compress_image(img: &GrayImage, t: &BlockTransform, policy: &RetentionPolicy) -> Result<Compressed> {
    let samples: Vec<f64> = reconstruct(img, t, policy)?
        .into_iter()
        .map(|v| v.clamp(0.0, 255.0))
        .collect();
    let original = img.to_f64();
    let mse = mse(&original, &samples);
    let scores = QualityScores {
        psnr_db: psnr_from_mse(mse),
        ssim: ssim(&original, &samples, img.width(), img.height())?,
        mse,
    };
    Ok(Compressed {
        image: GrayImage::from_f64(img.width(), img.height(), &samples)?,
        samples,
        scores,
    })
}

pub fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// PSNR for 8-bit peak; infinite when `mse == 0`.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0 * 255.0 / mse).log10()
    }
}

pub fn psnr(a: &[f64], b: &[f64]) -> f64 {
    psnr_from_mse(mse(a, b))
}

/// PSNR suitable for CSV: infinity becomes [`PSNR_SENTINEL_DB`].
pub fn psnr_for_csv(p: f64) -> f64 {
    if p.is_finite() {
        p
    } else {
        PSNR_SENTINEL_DB
    }
}

const SSIM_WINDOW: usize = 8;
const SSIM_C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const SSIM_C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

/// Summed-area table with a zero top row and left column.
fn integral(w: usize, h: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut s = vec![0.0; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0.0;
        for x in 0..w {
            row += f(y * w + x);
            s[(y + 1) * (w + 1) + x + 1] = s[y * (w + 1) + x + 1] + row;
        }
    }
    s
}

/// Mean single-scale SSIM over all 8x8 windows (stride 1).
pub fn ssim(a: &[f64], b: &[f64], width: usize, height: usize) -> Result<f64> {
    if a.len() != width * height || b.len() != a.len() {
        return Err(shape_err(
            format!("{} samples", width * height),
            format!("{} and {}", a.len(), b.len()),
        ));
    }
    if width < SSIM_WINDOW || height < SSIM_WINDOW {
        return Err(Error::InvalidSize(width.min(height)));
    }
    let sa = integral(width, height, |i| a[i]);
    let sb = integral(width, height, |i| b[i]);
    let saa = integral(width, height, |i| a[i] * a[i]);
    let sbb = integral(width, height, |i| b[i] * b[i]);
    let sab = integral(width, height, |i| a[i] * b[i]);
    let stride = width + 1;
    let area = (SSIM_WINDOW * SSIM_WINDOW) as f64;
    let window_sum = |s: &[f64], x: usize, y: usize| {
        let (x1, y1) = (x + SSIM_WINDOW, y + SSIM_WINDOW);
        s[y1 * stride + x1] - s[y * stride + x1] - s[y1 * stride + x] + s[y * stride + x]
    };
    let mut total = 0.0;
    let mut count = 0usize;
    for y in 0..=(height - SSIM_WINDOW) {
        for x in 0..=(width - SSIM_WINDOW) {
            let mu_a = window_sum(&sa, x, y) / area;
            let mu_b = window_sum(&sb, x, y) / area;
            let var_a = window_sum(&saa, x, y) / area - mu_a * mu_a;
            let var_b = window_sum(&sbb, x, y) / area - mu_b * mu_b;
            let cov = window_sum(&sab, x, y) / area - mu_a * mu_b;
            let num = (2.0 * mu_a * mu_b + SSIM_C1) * (2.0 * cov + SSIM_C2);
            let den = (mu_a * mu_a + mu_b * mu_b + SSIM_C1) * (var_a + var_b + SSIM_C2);
            total += num / den;
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// Absolute percentage error of `approx` against the DCT `baseline`.
pub fn ape(approx: f64, baseline: f64) -> Result<f64> {
    if baseline == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    Ok(100.0 * (baseline - approx).abs() / baseline.abs())
}

/// Retention fractions `start, start + step, ..., <= stop`, in hundredths.
pub fn r_grid(start_pct: u32, stop_pct: u32, step_pct: u32) -> Vec<f64> {
    let step = step_pct.max(1) as usize;
    (start_pct..=stop_pct).step_by(step).map(|p| p as f64 / 100.0).collect()
}

/// Default sweep grid: 0.25 to 0.99 in steps of 0.02.
pub fn default_r_grid() -> Vec<f64> {
    r_grid(25, 99, 2)
}

/// Grayscale image whose rows and columns follow a separable AR(1) process.
///
/// Samples are standardized to mean 128 and deviation 40, then rounded and clamped.
pub fn synthetic_ar1_image(width: usize, height: usize, rho: f64, seed: u64) -> Result<GrayImage> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidModel(rho));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = vec![0.0f64; width * height];
    for y in 0..height {
        for x in 0..width {
            let mut v: f64 = StandardNormal.sample(&mut rng);
            if x > 0 {
                v += rho * field[y * width + x - 1];
            }
            if y > 0 {
                v += rho * field[(y - 1) * width + x];
            }
            if x > 0 && y > 0 {
                v -= rho * rho * field[(y - 1) * width + x - 1];
            }
            field[y * width + x] = v;
        }
    }
    let n = field.len() as f64;
    let mean = field.iter().sum::<f64>() / n;
    let sd = (field.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let samples: Vec<f64> = field.iter().map(|v| 128.0 + (v - mean) / sd * 40.0).collect();
    GrayImage::from_f64(width, height, &samples)
}

/// One transform taking part in a corpus sweep.
#[derive(Clone, Debug)]
pub struct SweepEntry {
    pub id: String,
    pub transform: BlockTransform,
}

/// Averaged point of a quality-versus-retention curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub transform_id: String,
    pub r: f64,
    /// Mean of per-image PSNR in dB.
    pub psnr: f64,
    pub ssim: f64,
    pub ape_psnr: f64,
    pub ape_ssim: f64,
}

/// Per-image or aggregate row of the detailed sweep output.
#[derive(Clone, Debug, PartialEq)]
pub struct DetailRow {
    pub transform_id: String,
    /// Image name, or `mean_of_db` / `db_of_mean_mse` for aggregates.
    pub image: String,
    pub r: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub mse: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SweepResult {
    pub curves: Vec<CurvePoint>,
    pub detail: Vec<DetailRow>,
}

pub const CURVES_CSV_HEADER: [&str; 6] = ["transform_id", "r", "psnr", "ssim", "ape_psnr", "ape_ssim"];
pub const DETAIL_CSV_HEADER: [&str; 6] = ["transform_id", "image", "r", "psnr", "ssim", "mse"];

/// Scores indexed by `[image][r]`.
fn score_grid(images: &[(String, GrayImage)], t: &BlockTransform, grid: &[f64]) -> Result<Vec<Vec<QualityScores>>> {
    let policies = grid
        .iter()
        .map(|&r| RetentionPolicy::new(r, t.size()))
        .collect::<Result<Vec<_>>>()?;
    images
        .par_iter()
        .map(|(_, img)| {
            policies
                .iter()
                .map(|p| compress_image(img, t, p).map(|c| c.scores))
                .collect()
        })
        .collect()
}

/// Averages in image order so the result does not depend on scheduling.
fn aggregate(scores: &[Vec<QualityScores>], k: usize) -> (f64, f64, f64) {
    let n = scores.len() as f64;
    let psnr = scores.iter().map(|s| psnr_for_csv(s[k].psnr_db)).sum::<f64>() / n;
    let ssim = scores.iter().map(|s| s[k].ssim).sum::<f64>() / n;
    let mse = scores.iter().map(|s| s[k].mse).sum::<f64>() / n;
    (psnr, ssim, mse)
}

/// Compresses every image with every transform at every retention fraction.
///
/// APE is taken against the exact DCT of the same block size, on the
/// corpus-averaged PSNR and SSIM.
pub fn sweep(images: &[(String, GrayImage)], transforms: &[SweepEntry], grid: &[f64]) -> Result<SweepResult> {
    if images.is_empty() {
        return Err(Error::Format("empty image corpus".into()));
    }
    let mut baselines: Vec<(usize, Vec<Vec<QualityScores>>)> = Vec::new();
    let mut out = SweepResult::default();
    for entry in transforms {
        let n = entry.transform.size();
        if !baselines.iter().any(|(size, _)| *size == n) {
            baselines.push((n, score_grid(images, &BlockTransform::dct(n)?, grid)?));
        }
        let base = &baselines.iter().find(|(size, _)| *size == n).unwrap().1;
        let scores = score_grid(images, &entry.transform, grid)?;
        for (k, &r) in grid.iter().enumerate() {
            for ((name, _), s) in images.iter().zip(&scores) {
                out.detail.push(DetailRow {
                    transform_id: entry.id.clone(),
                    image: name.clone(),
                    r,
                    psnr: psnr_for_csv(s[k].psnr_db),
                    ssim: s[k].ssim,
                    mse: s[k].mse,
                });
            }
            let (psnr, ssim, mse) = aggregate(&scores, k);
            let (base_psnr, base_ssim, _) = aggregate(base, k);
            for (label, p) in [
                ("mean_of_db", psnr),
                ("db_of_mean_mse", psnr_for_csv(psnr_from_mse(mse))),
            ] {
                out.detail.push(DetailRow {
                    transform_id: entry.id.clone(),
                    image: label.into(),
                    r,
                    psnr: p,
                    ssim,
                    mse,
                });
            }
            out.curves.push(CurvePoint {
                transform_id: entry.id.clone(),
                r,
                psnr,
                ssim,
                ape_psnr: ape(psnr, base_psnr)?,
                ape_ssim: ape(ssim, base_ssim)?,
            });
        }
    }
    Ok(out)
}

pub fn write_curves_csv<W: std::io::Write>(rows: &[CurvePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVES_CSV_HEADER)?;
    for p in rows {
        w.write_record([
            p.transform_id.clone(),
            format!("{:.2}", p.r),
            sig6(p.psnr),
            sig6(p.ssim),
            sig6(p.ape_psnr),
            sig6(p.ape_ssim),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_detail_csv<W: std::io::Write>(rows: &[DetailRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DETAIL_CSV_HEADER)?;
    for d in rows {
        w.write_record([
            d.transform_id.clone(),
            d.image.clone(),
            format!("{:.2}", d.r),
            sig6(d.psnr),
            sig6(d.ssim),
            sig6(d.mse),
        ])?;
    }
    w.flush()?;
    Ok(())
}
