use criterion::{black_box, criterion_group, criterion_main, Criterion};

use cwshape_bench::{bfsk511, costas20, noise, rsec};
use cwshape_core::{
    gen_msequence, pacf, paaf, spectrum, wavegen::default_taps, AlternatingProjector, AmbiguityConfig,
};

fn msequence(c: &mut Criterion) {
    let taps = default_taps(16).unwrap();
    c.bench_function("msequence degree 16", |b| b.iter(|| gen_msequence(16, taps, 1).unwrap()));
}

fn spectra(c: &mut Criterion) {
    let w = bfsk511();
    c.bench_function("spectrum 20440", |b| b.iter(|| spectrum(black_box(&w)).unwrap()));
    c.bench_function("pacf 20440", |b| b.iter(|| pacf(black_box(&w)).unwrap()));
}

fn ambiguity(c: &mut Criterion) {
    let w = noise(20_000);
    let cfg = AmbiguityConfig::default();
    let mut g = c.benchmark_group("paaf");
    g.sample_size(10);
    g.bench_function("20000 x 21 bins", |b| b.iter(|| paaf(black_box(&w), &cfg).unwrap()));
    g.finish();
}

fn shaping(c: &mut Criterion) {
    let w = costas20();
    let mask = rsec(20e3);
    let mut p = AlternatingProjector::new(&w, &mask).unwrap();
    c.bench_function("projection step 20000", |b| b.iter(|| p.step()));
}

criterion_group!(benches, msequence, spectra, ambiguity, shaping);
criterion_main!(benches);
