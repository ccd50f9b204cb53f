use criterion::{criterion_group, criterion_main, Criterion};

use tautrings::descendent::{DescCtx, ToppType};
use tautrings::filt::pc_check;
use tautrings::pipeline::{build_ring, BuildOptions, Kind, Registry};
use tautrings::relations::{mumford_relations, Sign};

fn bench_space_m21(c: &mut Criterion) {
    c.bench_function("build space (2,1)", |b| {
        b.iter(|| {
            let mut reg = Registry::new();
            build_ring(&mut reg, ToppType::new(2, 1), Kind::Space, 5, &BuildOptions::default())
                .unwrap()
        })
    });
}

fn bench_stack_20(c: &mut Criterion) {
    c.bench_function("build stack (2,0) to degree 8", |b| {
        b.iter(|| {
            let mut reg = Registry::new();
            build_ring(&mut reg, ToppType::new(2, 0), Kind::Stack, 8, &BuildOptions::default())
                .unwrap()
        })
    });
}

fn bench_mumford(c: &mut Criterion) {
    let ctx = DescCtx::new(ToppType::new(3, 1), 6, false);
    c.bench_function("mumford relations (3,1) to degree 6", |b| {
        b.iter(|| mumford_relations(&ctx, Sign::Plus, 0, 6).unwrap())
    });
}

fn bench_pc(c: &mut Criterion) {
    let mut reg = Registry::new();
    let pres =
        build_ring(&mut reg, ToppType::new(2, 1), Kind::Space, 5, &BuildOptions::default())
            .unwrap();
    c.bench_function("P=C check on (2,1)", |b| b.iter(|| pc_check(&pres, true).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_space_m21, bench_stack_20, bench_mumford, bench_pc
}
criterion_main!(benches);
