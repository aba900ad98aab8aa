use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dynembed::baselines::factorize_per_slice;
use dynembed::corpus::{build_vocabulary, count_corpus};
use dynembed::eval::{run_alignment_test, QueryMapping};
use dynembed::ppmi::PpmiSequence;
use dynembed::solver::{final_embedding, Combine, EmbeddingFile, SolverConfig, Trainer};
use dynembed::synth::{planted_shift, PlantedShiftConfig};
use dynembed::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn planted() -> (PpmiSequence, dynembed::eval::AlignmentTestset) {
    let p = planted_shift(&PlantedShiftConfig {
        stable_words: 1500,
        slices: 4,
        docs_per_slice: 3000,
        ..PlantedShiftConfig::default()
    })
    .unwrap();
    let vocab = build_vocabulary(&p.corpus, 1).unwrap();
    let stats = count_corpus(&p.corpus, &vocab, 5, Exec::default()).unwrap();
    let y = PpmiSequence::from_stats(&stats, p.corpus.labels(), 0.0, Exec::default()).unwrap();
    (y, p.testset(&vocab))
}

fn bcd_epoch(c: &mut Criterion) {
    let (y, _) = planted();
    let cfg = SolverConfig {
        dim: 50,
        block_rows: 128,
        epochs: 1,
        ..SolverConfig::default()
    };
    let mut group = c.benchmark_group("bcd_epoch");
    group.sample_size(10);
    for (name, exec) in MODES {
        let trainer = Trainer::new(&y, cfg.clone(), exec).unwrap();
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter_batched(
                || trainer.init(),
                |mut state| trainer.run_epoch(&mut state, 0, None).unwrap(),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn per_slice(c: &mut Criterion) {
    let (y, _) = planted();
    let cfg = SolverConfig {
        dim: 20,
        epochs: 2,
        ..SolverConfig::default()
    };
    let mut group = c.benchmark_group("per_slice_factorization");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| factorize_per_slice(&y, &cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn alignment_test(c: &mut Criterion) {
    let (y, ts) = planted();
    let cfg = SolverConfig {
        dim: 20,
        epochs: 2,
        ..SolverConfig::default()
    };
    let state = Trainer::new(&y, cfg, Exec::default()).unwrap().run(None).unwrap();
    let emb = EmbeddingFile::new(y.labels(), final_embedding(&state, Combine::Average)).unwrap();
    let mut group = c.benchmark_group("alignment_test");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_alignment_test(&ts, &emb, QueryMapping::Identity, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bcd_epoch, per_slice, alignment_test);
criterion_main!(benches);
