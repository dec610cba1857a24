use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use modal_topos::bundled;
use modal_topos::suites;
use modal_topos::syntax::parse_sequent;

const PLAIN_FUNEXT: &str = "f:G^G, g:G^G | forall y:G. f @ y = g @ y |- f = g";
const MODAL_FUNEXT: &str = "f:G^G, g:G^G | box (forall y:G. f @ y = g @ y) |- f = g";

fn sequents(c: &mut Criterion) {
    let m = bundled::loop_graph_model();
    for (label, src) in [("plain funext", PLAIN_FUNEXT), ("modal funext", MODAL_FUNEXT)] {
        let seq = parse_sequent(src).unwrap();
        c.bench_function(label, |b| b.iter(|| m.holds(black_box(&seq)).unwrap()));
    }
}

fn suite_runs(c: &mut Criterion) {
    let m = bundled::loop_graph_model();
    c.bench_function("soundness suite depth 2", |b| {
        b.iter(|| suites::soundness_suite(black_box(&m), 2, suites::DEFAULT_GUARD).unwrap())
    });
    c.bench_function("funext counterexample", |b| b.iter(|| suites::fun_ext_counterexample().unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = sequents, suite_runs
}
criterion_main!(benches);
