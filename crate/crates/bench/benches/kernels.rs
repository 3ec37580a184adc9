use criterion::{black_box, criterion_group, criterion_main, Criterion};
use homlie_core::lfunc::{enumerate_characters, gen_bernoulli};
use homlie_core::padicseries::{phi_sub, q_element, wach_build, WachFamilySpec};
use homlie_core::twistder::{hl2_residual, hl_bracket, twist_factor, HomLieElement, TwistedDerivation};
use homlie_core::{LaurentPoly, MonomialEndo};

fn brackets(c: &mut Criterion) {
    let endo = MonomialEndo::from_roots(vec![vec![2, 1], vec![1, 1]], &[3, 4], &[1, 1], 1).unwrap();
    let d = TwistedDerivation::unscaled(endo);
    let q = twist_factor(&d).unwrap();
    let el = |s: &str| HomLieElement::new(LaurentPoly::from_text(s, 2).unwrap(), &d).unwrap();
    let (a, b, x) = (el("1 * e^[1,0] + 2 * e^[0,-1]"), el("3 * e^[2,-1]"), el("-1 * e^[-1,1]"));
    c.bench_function("hl_bracket", |bn| bn.iter(|| hl_bracket(black_box(&a), black_box(&b)).unwrap()));
    c.bench_function("hl2_residual", |bn| bn.iter(|| hl2_residual(&a, &b, &x, &q).unwrap()));
}

fn bernoulli(c: &mut Criterion) {
    let chars = enumerate_characters(8).unwrap();
    c.bench_function("gen_bernoulli mod 8, n <= 4", |bn| {
        bn.iter(|| {
            for chi in &chars {
                for n in 1..=4 {
                    black_box(gen_bernoulli(n, chi).unwrap());
                }
            }
        })
    });
}

fn series(c: &mut Criterion) {
    let q = q_element(5, 12, 20);
    c.bench_function("phi_sub q, p = 5, N = 12", |bn| bn.iter(|| phi_sub(black_box(&q)).unwrap()));
    let mut group = c.benchmark_group("wach_build");
    group.sample_size(10);
    for alpha in [0i64, 3] {
        let spec = WachFamilySpec::standard(3, 4, alpha, 12, 20).unwrap();
        group.bench_function(format!("p = 3, k = 4, alpha = {alpha}"), |bn| bn.iter(|| wach_build(&spec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, brackets, bernoulli, series);
criterion_main!(benches);
