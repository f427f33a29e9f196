//! Criterion benchmarks: field arithmetic, scheme search, and the three
//! repair engines (staged trace, fused trace, naive matrix baseline).

use criterion::{black_box, criterion_group, criterion_main, Criterion, Throughput};

use rslab_bench::{lifted_rs53, random_codewords};
use rslab_core::codec::{receiver_recover, sender_traces, CompiledRepair, NaiveRepairer};
use rslab_core::galois::FieldId;
use rslab_core::grs::f16_code;
use rslab_core::search::{exhaustive_search, SearchConfig};

fn galois_mul(c: &mut Criterion) {
    let f = FieldId::Gf256;
    let pairs: Vec<(u8, u8)> =
        (0..=255u8).flat_map(|a| (0..=255u8).map(move |b| (a, b))).collect();
    let mut group = c.benchmark_group("galois");
    group.throughput(Throughput::Elements(pairs.len() as u64));
    group.bench_function("mul_all_pairs", |b| {
        b.iter(|| {
            let mut acc = 0u8;
            for &(x, y) in &pairs {
                acc ^= (f.elem(x) * f.elem(y)).value();
            }
            black_box(acc)
        })
    });
    group.finish();
}

fn scheme_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    group.bench_function("exhaustive_f16_5_3", |b| {
        b.iter(|| {
            let cfg = SearchConfig::new(f16_code(5, 3).expect("valid"), FieldId::Gf2);
            black_box(exhaustive_search(&cfg).expect("succeeds").max_bits())
        })
    });
    group.finish();
}

fn repair_engines(c: &mut Criterion) {
    let (code, _schemes, tables) = lifted_rs53();
    let fused = CompiledRepair::new(&tables);
    let naive = NaiveRepairer::new(&code.generator(), 0).expect("invertible");
    let words = random_codewords(&code, 4096, 7);
    let n = code.n();

    let mut group = c.benchmark_group("repair_rs53_position0");
    group.throughput(Throughput::Elements(words.len() as u64));
    group.bench_function("trace_staged", |b| {
        b.iter(|| {
            let mut acc = 0u8;
            for w in &words {
                let traces: Vec<_> =
                    (1..n).map(|i| sender_traces(&tables, 0, i, w[i])).collect();
                acc ^= receiver_recover(&tables, 0, &traces).expect("well-shaped");
            }
            black_box(acc)
        })
    });
    group.bench_function("trace_fused", |b| {
        let mut decs = vec![0u8; n - 1];
        b.iter(|| {
            let mut acc = 0u8;
            for w in &words {
                for i in 1..n {
                    decs[i - 1] = fused.sender_dec(0, i, w[i]);
                }
                acc ^= fused.recover(0, &decs);
            }
            black_box(acc)
        })
    });
    group.bench_function("naive", |b| {
        let mut symbols = vec![0u8; code.k()];
        b.iter(|| {
            let mut acc = 0u8;
            for w in &words {
                for (slot, &i) in symbols.iter_mut().zip(naive.helpers()) {
                    *slot = w[i];
                }
                acc ^= naive.repair(&symbols);
            }
            black_box(acc)
        })
    });
    group.finish();
}

criterion_group!(benches, galois_mul, scheme_search, repair_engines);
criterion_main!(benches);
