use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use prodsys_bench::{concatenated_n2, free_product_2_3};
use prodsys_core::{sample, wick_multiply, FockRep, Monoid, Representation, Truncation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn joins(c: &mut Criterion) {
    for (name, m) in [("free product rank 3", Monoid::free_product(3)), ("direct sum rank 3", Monoid::direct_sum(3))] {
        let ideal = m.enumerate_ideal(&Truncation::Length(3)).unwrap();
        c.bench_function(&format!("join all pairs, {name}, L=3"), |b| {
            b.iter(|| {
                let mut finite = 0usize;
                for s in &ideal {
                    for t in &ideal {
                        finite += usize::from(!m.join(s, t).is_infinite());
                    }
                }
                finite
            })
        });
    }
}

fn wick_products(c: &mut Criterion) {
    for (name, sys) in [("(N,2)*(N,3)", free_product_2_3()), ("concatenated N^2", concatenated_n2())] {
        let grades = sys.monoid().enumerate_ideal(&Truncation::Length(2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        c.bench_function(&format!("wick multiply 4x4 terms, {name}"), |b| {
            b.iter_batched(
                || {
                    let x = sample::element(&sys, &grades, 4, &mut rng).unwrap();
                    let y = sample::element(&sys, &grades, 4, &mut rng).unwrap();
                    (x, y)
                },
                |(x, y)| wick_multiply(&sys, &x, &y).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
}

fn fock_images(c: &mut Criterion) {
    let sys = free_product_2_3();
    let rep = FockRep::new(&sys, &Truncation::Length(3)).unwrap();
    let grades = sys.monoid().enumerate_ideal(&Truncation::Length(1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    c.bench_function("fock represent 4 terms, (N,2)*(N,3), L=3", |b| {
        b.iter_batched(
            || sample::element(&sys, &grades, 4, &mut rng).unwrap(),
            |x| rep.represent(&x).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, joins, wick_products, fock_images);
criterion_main!(benches);
