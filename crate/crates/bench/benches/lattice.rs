use criterion::{criterion_group, criterion_main, Criterion};
use hyperlat::catalog;
use hyperlat::definite::{automorphism_group, short_vectors};
use hyperlat::fqf::discriminant_form;
use hyperlat::genus::{p_neighbor, reduce};
use hyperlat::mass::{genus_mass, GenusDescriptor};
use hyperlat::matrix::ivec;
use hyperlat::pipeline::seed_lattice;
use std::hint::black_box;

fn lattice_benchmark(c: &mut Criterion) {
    let e8 = catalog::e8();
    let seed = seed_lattice();

    c.bench_function("short vectors: E8, norm -4", |b| b.iter(|| short_vectors(black_box(&e8), -4).unwrap()));

    c.bench_function("short vectors: D8+E8(2), norm -4", |b| b.iter(|| short_vectors(black_box(&seed), -4).unwrap()));

    c.bench_function("automorphisms: E8", |b| b.iter(|| automorphism_group(black_box(&e8)).unwrap()));

    c.bench_function("genus mass: D8+E8(2)", |b| b.iter(|| genus_mass(&GenusDescriptor::of(black_box(&seed)).unwrap()).unwrap()));

    let s = catalog::l10().rescale(2).unwrap();
    c.bench_function("discriminant form: L10(2)", |b| b.iter(|| discriminant_form(black_box(&s)).unwrap()));

    let mut v = ivec(&[1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0]);
    while (seed.norm(&v) % 3u32) != 0.into() {
        v[1] += 1;
    }
    c.bench_function("3-neighbour and reduction: D8+E8(2)", |b| {
        b.iter(|| reduce(&p_neighbor(black_box(&seed), &v, 3).unwrap()).unwrap())
    });
}

criterion_group!(benches, lattice_benchmark);
criterion_main!(benches);
