//! Cross-module tests: construction through evaluation, scaling, files and the codec.

use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use dctapprox::codec::{compress_image, synthetic_ar1_image, BlockTransform, RetentionPolicy};
use dctapprox::jam::{apply_scaled_counted, build_scaled};
use dctapprox::kernel::{apply_fast_exact, apply_inverse, apply_orthonormal, complexity, Rule};
use dctapprox::metrics::{evaluate, quality, SignalModel, DEFAULT_RHO};
use dctapprox::params::{known_optima, Dyadic, ParamVector};
use dctapprox::pgm::GrayImage;
use dctapprox::search::{run_search, SearchOptions, FRONT_CSV_HEADER};
use dctapprox::transform::{build_t, gram, is_feasible, orthonormal_approx, OrthonormalTransform};
use dctapprox::Error;

fn pv(s: &str) -> ParamVector {
    s.parse().unwrap()
}

fn dyadic() -> impl Strategy<Value = Dyadic> {
    prop::sample::select(Dyadic::ALL.to_vec())
}

fn param_vector() -> impl Strategy<Value = ParamVector> {
    prop::array::uniform8(dyadic()).prop_map(ParamVector)
}

fn feasible_seed() -> impl Strategy<Value = ParamVector> {
    prop::sample::select(dctapprox::search::feasible_candidates().collect::<Vec<_>>())
}

#[test]
fn published_rows_of_t() {
    let t = build_t(&pv("1,1/2,1/2,1/2,1,1,1/2,1/2"));
    let row = |i: usize| (0..8).map(|j| t.get(i, j)).collect::<Vec<_>>();
    assert_eq!(row(1), [1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
    assert_eq!(row(3), [1.0, 0.5, -0.5, -1.0, 1.0, 0.5, -0.5, -1.0]);
    assert!(t.entries_in_c());
}

#[test]
fn complexity_examples() {
    let c = complexity(&pv("0,0,0,1,1,0,0,1"));
    assert_eq!((c.additions, c.shifts), (16, 0));
    let c = complexity(&pv("0,0.5,0,1,1,1,1,2"));
    assert_eq!((c.additions, c.shifts, c.rule), (20, 3, Rule::Restricted(6)));
    let c = complexity(&pv("0,0.5,0,1,1,0,0,1"));
    assert_eq!((c.additions, c.shifts), (18, 2));
}

#[test]
fn infeasible_vectors_are_rejected_everywhere() {
    let bad = pv("2,2,2,2,2,2,2,2");
    assert!(!is_feasible(&bad));
    let model = SignalModel::new(DEFAULT_RHO, 8).unwrap();
    assert!(matches!(evaluate(&bad, &model), Err(Error::Infeasible(_))));
    assert!(matches!(orthonormal_approx(&bad), Err(Error::Infeasible(_))));
    assert!(build_scaled(&bad, 16).is_err());
    assert!(apply_inverse(&bad, &[0.0; 8]).is_err());
}

#[test]
fn fast_path_agrees_with_orthonormal_matrix() {
    let x = [12.0, -3.0, 7.5, 0.0, 255.0, 31.0, -8.0, 2.0];
    for a in known_optima() {
        let c = orthonormal_approx(&a).unwrap();
        let dense = c.apply(&DVector::from_row_slice(&x));
        let fast = apply_orthonormal(&a, &x).unwrap();
        for i in 0..8 {
            assert_abs_diff_eq!(fast[i], dense[i], epsilon = 1e-10);
        }
        let back = apply_inverse(&a, &fast).unwrap();
        for i in 0..8 {
            assert_abs_diff_eq!(back[i], x[i], epsilon = 1e-10);
        }
    }
}

#[test]
fn transform_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for size in [8, 16, 32] {
        let s = build_scaled(&known_optima()[14], size).unwrap();
        let path = dir.path().join(format!("t{size}.json"));
        s.transform.save(&path).unwrap();
        let back = OrthonormalTransform::load(&path).unwrap();
        assert_eq!(back, s.transform);
    }
    std::fs::write(dir.path().join("bad.json"), "{\"n\": 8}").unwrap();
    assert!(OrthonormalTransform::load(&dir.path().join("bad.json")).is_err());
    assert!(matches!(
        OrthonormalTransform::load(&dir.path().join("missing.json")),
        Err(Error::Io(_))
    ));
}

#[test]
fn scaled_transforms_are_scored_like_the_base_ones() {
    let model = SignalModel::new(DEFAULT_RHO, 16).unwrap();
    let s = build_scaled(&pv("0,0,0,1,1,0,0,1"), 16).unwrap();
    let q = quality(&s.transform.to_real(), &model).unwrap();
    assert_abs_diff_eq!(q.epsilon, 25.13, epsilon = 0.02);
    assert_eq!(s.complexity.additions, 48);
}

#[test]
fn search_front_is_written_as_csv() {
    let model = SignalModel::new(DEFAULT_RHO, 8).unwrap();
    let run = run_search(
        &model,
        SearchOptions {
            feasibility_filter: true,
            workers: Some(2),
        },
    )
    .unwrap();
    let mut buf = Vec::new();
    run.write_csv(&mut buf).unwrap();
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), FRONT_CSV_HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), run.ranked().len());
    assert_eq!(
        rows[0].iter().skip(1).take(8).collect::<Vec<_>>().join(","),
        "0,0,0,1,1,0,0,1"
    );
    for a in &known_optima() {
        assert!(run.ranked().iter().any(|e| e.a == *a), "{a} missing");
    }
}

#[test]
fn worker_count_does_not_change_the_front() {
    let model = SignalModel::new(DEFAULT_RHO, 8).unwrap();
    let csv_for = |workers| {
        let run = run_search(
            &model,
            SearchOptions {
                feasibility_filter: true,
                workers,
            },
        )
        .unwrap();
        let mut buf = Vec::new();
        run.write_csv(&mut buf).unwrap();
        buf
    };
    assert_eq!(csv_for(Some(1)), csv_for(Some(4)));
}

#[test]
fn compressed_pgm_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let img = synthetic_ar1_image(64, 48, DEFAULT_RHO, 11).unwrap();
    let src = dir.path().join("in.pgm");
    img.save(&src).unwrap();
    let loaded = GrayImage::load(&src).unwrap();
    assert_eq!(loaded, img);

    let t = BlockTransform::from_orthonormal(&orthonormal_approx(&known_optima()[8]).unwrap());
    let out = compress_image(&loaded, &t, &RetentionPolicy::new(0.45, 8).unwrap()).unwrap();
    let dst = dir.path().join("out.pgm");
    out.image.save(&dst).unwrap();
    assert_eq!(GrayImage::load(&dst).unwrap(), out.image);
    assert!(out.scores.psnr_db > 25.0 && out.scores.ssim > 0.5);
}

#[test]
fn larger_block_sizes_run_through_the_codec() {
    let img = synthetic_ar1_image(96, 64, DEFAULT_RHO, 5).unwrap();
    for size in [16, 32] {
        let s = build_scaled(&known_optima()[14], size).unwrap();
        let t = BlockTransform::from_orthonormal(&s.transform);
        let dct = BlockTransform::dct(size).unwrap();
        let policy = RetentionPolicy::new(0.45, size).unwrap();
        let approx = compress_image(&img, &t, &policy).unwrap().scores.psnr_db;
        let exact = compress_image(&img, &dct, &policy).unwrap().scores.psnr_db;
        assert!(approx > 25.0 && approx <= exact + 0.1, "N={size}: {approx} vs {exact}");
        assert!(compress_image(&img, &t, &RetentionPolicy::new(0.45, 8).unwrap()).is_err());
    }
}

#[test]
fn approximation_stays_close_to_dct_in_the_codec() {
    let img = synthetic_ar1_image(128, 128, DEFAULT_RHO, 21).unwrap();
    let policy = RetentionPolicy::new(0.45, 8).unwrap();
    let dct = compress_image(&img, &BlockTransform::dct(8).unwrap(), &policy).unwrap();
    let t15 = BlockTransform::from_orthonormal(&orthonormal_approx(&known_optima()[14]).unwrap());
    let approx = compress_image(&img, &t15, &policy).unwrap();
    assert!((dct.scores.psnr_db - approx.scores.psnr_db).abs() < 2.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn kernel_matches_dense_product(a in param_vector(), x in prop::array::uniform8(-4096i64..4096)) {
        let dense = build_t(&a).mul_vec_doubled(&x).unwrap();
        prop_assert_eq!(apply_fast_exact(&a, &x).to_vec(), dense);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn doubling_keeps_any_feasible_seed_orthogonal(a in feasible_seed(), size in prop::sample::select(vec![16usize, 32])) {
        let s = build_scaled(&a, size).unwrap();
        prop_assert!(gram(s.integer_part()).unwrap().is_diagonal());
        let c = s.transform.to_real();
        let err = (&c * c.transpose() - DMatrix::<f64>::identity(size, size)).abs().max();
        prop_assert!(err < 1e-12);

        let x: Vec<i64> = (0..size as i64).map(|i| (i * 37 % 19) - 9).collect();
        let (y, _) = apply_scaled_counted(&a, &x.iter().map(|v| 2 * v).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(y, s.integer_part().mul_vec_doubled(&x).unwrap());
    }

    #[test]
    fn feasible_seeds_score_sensibly(a in feasible_seed()) {
        let model = SignalModel::new(DEFAULT_RHO, 8).unwrap();
        let r = evaluate(&a, &model).unwrap();
        prop_assert!(r.epsilon >= 0.0 && r.mse >= 0.0);
        prop_assert!(r.efficiency_pct > 0.0 && r.efficiency_pct <= 100.0);
        prop_assert!((16..=28).contains(&r.additions()));
    }
}
