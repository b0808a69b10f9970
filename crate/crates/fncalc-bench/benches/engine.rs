//! Engine benchmarks: FN brackets on random tangent-valued forms, the
//! musical hat on the G2 fixtures, CR-operator matrix assembly, and the
//! order-by-order Maurer-Cartan solver.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fncalc::fixtures;
use fncalc::forms::{fn_bracket, hat, ConstMetric};
use fncalc::vdata::{ell1_operator, random_vector_form};

fn bench_fn_bracket(c: &mut Criterion) {
    let split = fixtures::flat_patch(4);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let k = random_vector_form(&split, 2, 2, 0, &mut rng);
    let l = random_vector_form(&split, 2, 2, 0, &mut rng);
    c.bench_function("fn_bracket deg-2 R4", |b| {
        b.iter(|| fn_bracket(&k, &l).unwrap())
    });

    let jsplit = fixtures::j_line_split();
    let k = random_vector_form(&jsplit, 1, 2, 2, &mut rng);
    let l = random_vector_form(&jsplit, 2, 2, 2, &mut rng);
    c.bench_function("fn_bracket split patch", |b| {
        b.iter(|| fn_bracket(&k, &l).unwrap())
    });
}

fn bench_hat(c: &mut Criterion) {
    let phi = fixtures::g2_phi();
    let star = fixtures::g2_star_phi();
    let g = ConstMetric::euclidean(7);
    c.bench_function("hat g2 phi", |b| b.iter(|| hat(&phi, &g).unwrap()));
    c.bench_function("hat g2 star phi", |b| b.iter(|| hat(&star, &g).unwrap()));
}

fn bench_square_zero(c: &mut Criterion) {
    let g = ConstMetric::euclidean(7);
    let h = hat(&fixtures::g2_phi(), &g).unwrap();
    c.bench_function("square-zero hat g2 phi", |b| {
        b.iter(|| fn_bracket(&h, &h).unwrap().is_zero())
    });
}

fn bench_ell1_matrix(c: &mut Criterion) {
    let v = fixtures::j_line_vdata();
    for d in [2usize, 4] {
        c.bench_function(&format!("ell1-matrix J-line D={d}"), |b| {
            b.iter(|| ell1_operator(&v, d as u32).unwrap().kernel_dimension())
        });
    }
}

fn bench_mc_solve(c: &mut Criterion) {
    let v = fixtures::j_line_vdata();
    let op = ell1_operator(&v, 3).unwrap();
    let s1 = op.section_from_coords(&op.kernel[op.kernel.len() - 1]).unwrap();
    c.bench_function("mc-solve J-line N=4 D=3", |b| {
        b.iter_batched(
            || s1.clone(),
            |s| fncalc::deformation::mc_solve(&v, &s, 4, 3).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_fn_bracket,
    bench_hat,
    bench_square_zero,
    bench_ell1_matrix,
    bench_mc_solve
);
criterion_main!(benches);
