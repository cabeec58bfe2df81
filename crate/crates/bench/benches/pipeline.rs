use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use foam_core::complex::DEFAULT_CUBE_CAP;
use foam_core::diagrams;
use foam_core::{apply_tqft, assemble, cohomology, naive_cube, DebugLevel, FieldScalar, FrobeniusAlgebra};

fn khovanov() -> FrobeniusAlgebra<FieldScalar> {
    FrobeniusAlgebra::new(FieldScalar::from_ints(0, 0), FieldScalar::from_ints(0, 0))
}

fn incremental_vs_naive(c: &mut Criterion) {
    let mut g = c.benchmark_group("homology");
    g.sample_size(20);
    for name in ["4_1", "6_2", "t2_7", "8_19"] {
        let pd = diagrams::find(name).unwrap().pd();
        let order = pd.ordering_heuristic();
        g.bench_function(format!("{name}/incremental"), |b| {
            b.iter(|| {
                let (cx, _) = assemble(khovanov(), true, black_box(&pd), &order, DebugLevel::Off).unwrap();
                cohomology(&apply_tqft(&cx).unwrap())
            })
        });
        g.bench_function(format!("{name}/naive"), |b| {
            b.iter(|| {
                let (cx, _) = naive_cube(khovanov(), true, black_box(&pd), DEFAULT_CUBE_CAP).unwrap();
                cohomology(&apply_tqft(&cx).unwrap())
            })
        });
    }
    g.finish();
}

fn universal_ring(c: &mut Criterion) {
    let mut g = c.benchmark_group("assemble-over-R");
    g.sample_size(10);
    for name in ["4_1", "t2_7"] {
        let pd = diagrams::find(name).unwrap().pd();
        let order = pd.ordering_heuristic();
        g.bench_function(name, |b| {
            b.iter(|| assemble(FrobeniusAlgebra::universal(), true, black_box(&pd), &order, DebugLevel::Off).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, incremental_vs_naive, universal_ring);
criterion_main!(benches);
