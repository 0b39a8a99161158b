use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jbw_core::order_maps::random_order_iso;
use jbw_core::par::Backend;
use jbw_core::spectral::spectral_decomposition;
use jbw_core::verify::{check_order_preserving, extreme_vector_oracle, SampleConfig};
use jbw_core::{AlgebraDescriptor, Element, FactorDescriptor};

const BACKENDS: [(&str, Backend); 2] = [("sequential", Backend::Sequential), ("parallel", Backend::Parallel)];

fn algebra() -> Arc<AlgebraDescriptor> {
    AlgebraDescriptor::shared(vec![FactorDescriptor::Real, FactorDescriptor::Sym { n: 3 }, FactorDescriptor::Spin { n: 4 }])
        .unwrap()
}

fn order_preserving(c: &mut Criterion) {
    let a = algebra();
    let form = random_order_iso(&a, &a, 0, true).unwrap();
    let mut group = c.benchmark_group("check_order_preserving");
    for trials in [1_000, 10_000] {
        for (name, backend) in BACKENDS {
            let config = SampleConfig { trials, seed: 0, backend };
            group.bench_with_input(BenchmarkId::new(name, trials), &config, |b, &config| {
                b.iter(|| black_box(check_order_preserving(|x| form.apply(x), &a, config)))
            });
        }
    }
    group.finish();
}

fn extremality(c: &mut Criterion) {
    let a = AlgebraDescriptor::shared(vec![FactorDescriptor::Sym { n: 4 }]).unwrap();
    let mut coords = vec![0.0; a.total_dim()];
    coords[0] = 1.0;
    let atom = Element::new(Arc::clone(&a), coords).unwrap();
    // an atom exercises every trial; non-atoms stop at the first witness
    assert_eq!(spectral_decomposition(&atom).eigenvalues, vec![1.0, 0.0]);
    let mut group = c.benchmark_group("extreme_vector_oracle");
    for (name, backend) in BACKENDS {
        group.bench_function(name, |b| b.iter(|| black_box(extreme_vector_oracle(&atom, 10_000, 0, backend).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, order_preserving, extremality);
criterion_main!(benches);
