use criterion::{Criterion, criterion_group, criterion_main};
use evanskit::exec::Execution;
use evanskit::model::coupled_wave;
use evanskit::problem::{Numerics, Problem};
use std::hint::black_box;

fn scan(c: &mut Criterion) {
    let (m, w) = coupled_wave::build(1.0).unwrap();
    let mut group = c.benchmark_group("real_axis_scan");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        let p = Problem::new(
            &m,
            &w,
            0.0,
            Numerics {
                exec,
                ..Numerics::default()
            },
        )
        .unwrap();
        group.bench_function(name, |b| b.iter(|| p.real_axis_scan(black_box(3.0), 32).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, scan);
criterion_main!(benches);
