use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dctapprox::codec::{compress_image, BlockTransform, RetentionPolicy};
use dctapprox::jam::build_scaled;
use dctapprox_bench::{seed, test_image};

fn codec(c: &mut Criterion) {
    let img = test_image();
    let mut group = c.benchmark_group("compress 512x512");
    group.sample_size(20);
    for size in [8usize, 16, 32] {
        let policy = RetentionPolicy::new(0.45, size).unwrap();
        let approx = BlockTransform::from_orthonormal(&build_scaled(&seed(15), size).unwrap().transform);
        let dct = BlockTransform::dct(size).unwrap();
        for (name, t) in [("approx", approx), ("dct", dct)] {
            group.bench_with_input(BenchmarkId::new(name, size), &t, |b, t| {
                b.iter(|| compress_image(&img, t, &policy).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, codec);
criterion_main!(benches);
