//! Sequential against rayon on the R_K certificate, whose cost is the
//! conjugate products inside each H_n(1).

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fermat_core::data_io::FixtureStore;
use fermat_core::par::Execution;
use fermat_core::units::{fixture_units, h_tower, rk_multiple};

fn rk(c: &mut Criterion) {
    let store = FixtureStore::bundled();
    let mut group = c.benchmark_group("rk_multiple");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    for label in ["5.5.126032.1", "6.6.2803712.1"] {
        let k = store.load_field(label).unwrap();
        let units = fixture_units(&k).unwrap();
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, label), &units, |b, u| {
                b.iter(|| rk_multiple(&k, black_box(u), None, exec).unwrap())
            });
        }
    }
    group.finish();
}

// Level 3 of the sextic tower goes through the interval path.
fn sextic_level3(c: &mut Criterion) {
    let k = FixtureStore::bundled().load_field("6.6.2803712.1").unwrap();
    let u = fixture_units(&k).unwrap().remove(1);
    let mut group = c.benchmark_group("h_tower_level3");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(name, |b| b.iter(|| h_tower(black_box(&u), 3, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, rk, sextic_level3);
criterion_main!(benches);
