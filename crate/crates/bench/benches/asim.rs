use std::hint::black_box;

use asim_core::genmod::{check_generated, ModalitySignature};
use asim_core::harness::random_formula;
use asim_core::{
    distinguishing_formula, eval_fol, maximal_asimulation, random_model, translate, AsimKind, Env, PoolFamily,
    Signature, Var, Variant,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn maximal(c: &mut Criterion) {
    let mut g = c.benchmark_group("maximal_asimulation");
    for n in [4, 8, 16, 32] {
        let m1 = random_model(n, 0.2, 2, 1);
        let m2 = random_model(n, 0.2, 2, 2);
        for v in [Variant::V11, Variant::V22] {
            g.bench_with_input(BenchmarkId::new(v.to_string(), n), &n, |b, _| {
                b.iter(|| maximal_asimulation(black_box(&m1), 0, black_box(&m2), 0, AsimKind::Modal(v)))
            });
        }
    }
    g.finish();
}

fn distinguish(c: &mut Criterion) {
    let mut g = c.benchmark_group("distinguishing_formula");
    for n in [3, 5] {
        let m1 = random_model(n, 0.35, 2, 10);
        let m2 = random_model(n, 0.35, 2, 11);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| distinguishing_formula(&m1, 0, &m2, 0, Variant::V12, 4))
        });
    }
    g.finish();
}

fn translation(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let formulas: Vec<_> = (0..64).map(|_| random_formula(&mut rng, 4, 2)).collect();
    let m = random_model(6, 0.3, 2, 4);
    let x = Var::from("x");
    c.bench_function("translate_and_eval_fol", |b| {
        b.iter(|| {
            formulas
                .iter()
                .filter(|f| eval_fol(&m, &Env::from([(x.clone(), 0)]), &translate(f, Variant::V21, &x)).unwrap())
                .count()
        })
    });
}

fn pools(c: &mut Criterion) {
    let m1 = random_model(4, 0.3, 2, 5);
    let m2 = random_model(4, 0.3, 2, 6);
    let mut g = c.benchmark_group("pool_enumeration");
    g.sample_size(20);
    for bound in [2, 3, 4] {
        g.bench_with_input(BenchmarkId::from_parameter(bound), &bound, |b, &bound| {
            b.iter(|| PoolFamily::enumerate(&Signature::first(2), Variant::V11, bound, &[&m1, &m2], usize::MAX))
        });
    }
    g.finish();
}

fn generated(c: &mut Criterion) {
    let m1 = random_model(8, 0.25, 1, 7);
    let m2 = random_model(8, 0.25, 1, 8);
    let (rel, _) = maximal_asimulation(&m1, 0, &m2, 0, AsimKind::Modal(Variant::V22));
    let tuple = [rel.rel_a.clone(), rel.rel_b.clone().unwrap()];
    let sig = ModalitySignature::diamond2();
    c.bench_function("check_generated_diamond2", |b| {
        b.iter(|| check_generated(&m1, 0, &m2, 0, &sig, black_box(&tuple)))
    });
}

criterion_group!(benches, maximal, distinguish, translation, pools, generated);
criterion_main!(benches);
