use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use corevalues::config::RunConfig;
use corevalues::corpus::{OrientationLexicon, ParsedCorpus};
use corevalues::graph::betweenness::betweenness;
use corevalues::graph::SimpleGraph;
use corevalues::language::PolarityLexicon;
use corevalues::pipeline::{analyze, Inputs};
use corevalues::synth::{generate_corpus, SynthSpec};
use corevalues::Exec;

fn random_graph(n: usize, m: usize, seed: u64) -> SimpleGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> = (0..m)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    SimpleGraph::from_edges(n, edges)
}

fn bench_betweenness(c: &mut Criterion) {
    let mut group = c.benchmark_group("betweenness");
    group.sample_size(10);
    for n in [500, 2_000] {
        let g = random_graph(n, n * 3, 1);
        for exec in [Exec::Sequential, Exec::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n), &g, |b, g| {
                b.iter(|| betweenness(g, exec))
            });
        }
    }
    group.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let messages = generate_corpus(
        &SynthSpec::reference_scale(20_000),
        2017,
        &OrientationLexicon::default(),
        &PolarityLexicon::default(),
    )
    .expect("valid spec");
    let parsed = ParsedCorpus {
        messages,
        skipped: 0,
    };
    let inputs = Inputs::default();
    let cfg = RunConfig::default();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| analyze(&parsed, &inputs, &cfg, exec).expect("analysis runs"))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_betweenness, bench_pipeline);
criterion_main!(benches);
