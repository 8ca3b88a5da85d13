use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use nalgebra::SVector;

use dctapprox::jam::apply_scaled_counted;
use dctapprox::kernel::{apply_fast_exact, FastKernel};
use dctapprox::transform::orthonormal_approx;
use dctapprox_bench::{pixel_vectors, pixel_vectors_f64, seed};

fn kernel(c: &mut Criterion) {
    let inputs = pixel_vectors(1024, 1);
    let reals = pixel_vectors_f64(1024, 1);
    let mut group = c.benchmark_group("8-point");
    group.throughput(Throughput::Elements(inputs.len() as u64));
    for j in [1, 9, 15] {
        let a = seed(j);
        let k = FastKernel::new(&a);
        group.bench_with_input(BenchmarkId::new("fast_i64", j), &k, |b, k| {
            b.iter(|| {
                inputs.iter().for_each(|x| {
                    black_box(k.apply(black_box(x)));
                })
            })
        });
        group.bench_with_input(BenchmarkId::new("fast_f64", j), &k, |b, k| {
            b.iter(|| {
                reals.iter().for_each(|x| {
                    black_box(k.apply(black_box(x)));
                })
            })
        });
        group.bench_with_input(BenchmarkId::new("unprepared_i64", j), &a, |b, a| {
            b.iter(|| {
                inputs.iter().for_each(|x| {
                    black_box(apply_fast_exact(a, black_box(x)));
                })
            })
        });
        let dense = orthonormal_approx(&a)
            .unwrap()
            .to_real()
            .fixed_view::<8, 8>(0, 0)
            .into_owned();
        group.bench_with_input(BenchmarkId::new("dense_f64", j), &dense, |b, m| {
            b.iter(|| {
                reals.iter().for_each(|x| {
                    black_box(m * SVector::<f64, 8>::from_row_slice(black_box(x)));
                })
            })
        });
    }
    group.finish();

    let mut group = c.benchmark_group("scaled");
    for size in [16usize, 32] {
        let x: Vec<i64> = (0..size as i64).map(|i| (i * 41) % 256).collect();
        group.bench_with_input(BenchmarkId::new("fast_i64", size), &x, |b, x| {
            b.iter(|| apply_scaled_counted(&seed(15), black_box(x)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, kernel);
criterion_main!(benches);
