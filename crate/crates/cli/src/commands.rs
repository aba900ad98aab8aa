use std::fs;
use std::path::{Path, PathBuf};

use dynembed::baselines::{align_sequence, factorize_per_slice, local_linear_map, train_static};
use dynembed::binio::{read_file, write_atomic};
use dynembed::corpus::{
    build_vocabulary, count_corpus, load_stopwords, subsample_counts, SliceStats, TimeSlicedCorpus, Vocabulary,
};
use dynembed::eval::{
    evaluate_clustering, load_labeled_triplets, mp_at_k, mrr, nearest_neighbors, norm_series, run_alignment_test,
    AlignmentTestset, MetricsReport, QueryMapping, REPORT_CLUSTER_KS, REPORT_MP_KS,
};
use dynembed::ppmi::{PpmiMatrix, PpmiSequence};
use dynembed::seed::subseed;
use dynembed::solver::{
    final_embedding, objective_with, train_with, Checkpoint, EmbeddingFile, EmbeddingSequence, SolverConfig,
    TrainEvent, Trainer,
};
use log::info;
use ndarray::Array1;

use crate::config::{Method, RunConfig};
use crate::Failure;

fn remove_with_ext(dir: &Path, ext: &str) -> Result<(), Failure> {
    if !dir.exists() {
        return Ok(());
    }
    let entries = fs::read_dir(dir).map_err(|e| Failure::Internal(format!("{}: {e}", dir.display())))?;
    for entry in entries.flatten() {
        let p = entry.path();
        if p.extension().is_some_and(|x| x == ext) {
            fs::remove_file(&p).map_err(|e| Failure::Internal(format!("{}: {e}", p.display())))?;
        }
    }
    Ok(())
}

/// Slice artifacts are named `<label>.<ext>`; returns them sorted by label.
fn labeled_files(dir: &Path, ext: &str) -> Result<Vec<(i64, PathBuf)>, Failure> {
    let entries = fs::read_dir(dir)
        .map_err(|e| Failure::Usage(format!("{}: {e} (run `dynembed build` first)", dir.display())))?;
    let mut out = Vec::new();
    for entry in entries.flatten() {
        let p = entry.path();
        if p.extension().is_some_and(|x| x == ext) {
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("");
            let label: i64 = stem
                .parse()
                .map_err(|_| Failure::Internal(format!("unexpected artifact name {}", p.display())))?;
            out.push((label, p));
        }
    }
    if out.is_empty() {
        return Err(Failure::Usage(format!(
            "no .{ext} files in {} (run `dynembed build` first)",
            dir.display()
        )));
    }
    out.sort();
    Ok(out)
}

fn load_vocab(cfg: &RunConfig) -> Result<Vocabulary, Failure> {
    let path = cfg.vocab_path();
    let text = fs::read_to_string(&path)
        .map_err(|e| Failure::Usage(format!("{}: {e} (run `dynembed build` first)", path.display())))?;
    Ok(Vocabulary::from_text(&text)?)
}

fn load_ppmi(cfg: &RunConfig, vocab: &Vocabulary) -> Result<PpmiSequence, Failure> {
    let mut mats = Vec::new();
    for (label, path) in labeled_files(&cfg.ppmi_dir(), "tvpm")? {
        let m = PpmiMatrix::from_bytes(&read_file(&path)?)?;
        if m.slice_label != label {
            return Err(Failure::Internal(format!(
                "{} holds slice {}",
                path.display(),
                m.slice_label
            )));
        }
        mats.push(m);
    }
    let y = PpmiSequence::new(mats)?;
    if y.vocab_size() != vocab.len() {
        return Err(Failure::Internal(format!(
            "PPMI matrices have {} rows but the vocabulary has {} words",
            y.vocab_size(),
            vocab.len()
        )));
    }
    Ok(y)
}

fn load_stats(cfg: &RunConfig, vocab: &Vocabulary) -> Result<(Vec<i64>, Vec<SliceStats>), Failure> {
    let mut labels = Vec::new();
    let mut stats = Vec::new();
    for (label, path) in labeled_files(&cfg.stats_dir(), "tvco")? {
        let s = SliceStats::from_bytes(&read_file(&path)?)?;
        if s.vocab_size() != vocab.len() {
            return Err(Failure::Internal(format!(
                "{} does not match the vocabulary",
                path.display()
            )));
        }
        labels.push(label);
        stats.push(s);
    }
    Ok((labels, stats))
}

fn embedding_name(method: Method) -> &'static str {
    method.name()
}

fn load_embeddings(cfg: &RunConfig) -> Result<EmbeddingFile, Failure> {
    let path = cfg.embedding_path(embedding_name(cfg.method));
    let bytes = fs::read(&path).map_err(|e| {
        Failure::Usage(format!(
            "{}: {e} (run `dynembed train --method {}` first)",
            path.display(),
            cfg.method
        ))
    })?;
    Ok(EmbeddingFile::from_bytes(&bytes)?)
}

fn write_embeddings(cfg: &RunConfig, name: &str, emb: &EmbeddingFile, vocab: &Vocabulary) -> Result<(), Failure> {
    let path = cfg.embedding_path(name);
    write_atomic(&path, &emb.to_bytes())?;
    write_atomic(&path.with_extension("txt"), emb.to_text(vocab.words())?.as_bytes())?;
    info!("wrote {}", path.display());
    Ok(())
}

fn word_index(vocab: &Vocabulary, word: &str) -> Result<usize, Failure> {
    if let Some(i) = vocab.get(word) {
        return Ok(i as usize);
    }
    let mut scored: Vec<(usize, usize)> = vocab
        .words()
        .iter()
        .enumerate()
        .map(|(i, w)| (strsim::levenshtein(word, w), i))
        .collect();
    scored.sort();
    let suggestions: Vec<&str> = scored.iter().take(5).map(|&(_, i)| vocab.word(i)).collect();
    Err(Failure::Lookup(format!(
        "word {word:?} is not in the vocabulary; did you mean: {}",
        suggestions.join(", ")
    )))
}

pub fn build(cfg: &RunConfig) -> Result<(), Failure> {
    let corpus_path = cfg
        .corpus
        .as_ref()
        .ok_or_else(|| Failure::Usage("no corpus given (set `corpus` or pass --corpus)".into()))?;
    if !corpus_path.exists() {
        return Err(Failure::Usage(format!("corpus not found: {}", corpus_path.display())));
    }
    let stopwords = match &cfg.stopwords {
        Some(p) => load_stopwords(p)?,
        None => Default::default(),
    };
    let corpus = TimeSlicedCorpus::load(corpus_path, &stopwords)?;
    let vocab = build_vocabulary(&corpus, cfg.min_count)?;
    let exec = cfg.exec();
    let stats = count_corpus(&corpus, &vocab, cfg.window, exec)?;
    let y = PpmiSequence::from_stats(&stats, corpus.labels(), cfg.shift, exec)?;

    remove_with_ext(&cfg.stats_dir(), "tvco")?;
    remove_with_ext(&cfg.ppmi_dir(), "tvpm")?;
    write_atomic(&cfg.vocab_path(), vocab.to_text().as_bytes())?;
    for ((label, s), m) in corpus.labels().iter().zip(&stats).zip(y.matrices()) {
        write_atomic(&cfg.stats_dir().join(format!("{label}.tvco")), &s.to_bytes())?;
        write_atomic(&cfg.ppmi_dir().join(format!("{label}.tvpm")), &m.to_bytes())?;
    }
    let nnz: Vec<String> = y.matrices().iter().map(|m| m.nnz().to_string()).collect();
    println!("V={} T={} nnz=[{}]", vocab.len(), y.len(), nnz.join(", "));
    Ok(())
}

fn train_dw2v(cfg: &RunConfig, y: &PpmiSequence, checkpoint: bool, resume: bool) -> Result<EmbeddingSequence, Failure> {
    let exec = cfg.exec();
    let trainer = Trainer::new(y, cfg.solver.clone(), exec)?;
    let log_path = cfg.out.join("dw2v_objective.log");
    let (state, start, mut log) = if resume {
        let ck = Checkpoint::from_bytes(&read_file(&cfg.checkpoint_path())?)?;
        let same = SolverConfig {
            epochs: cfg.solver.epochs,
            ..ck.state.config.clone()
        } == cfg.solver;
        if !same {
            return Err(Failure::Usage(
                "checkpoint was written with a different solver configuration".into(),
            ));
        }
        ck.state.check_shapes(y)?;
        if ck.epochs_done > cfg.solver.epochs {
            return Err(Failure::Usage(format!(
                "checkpoint is already past epoch {}",
                cfg.solver.epochs
            )));
        }
        info!("resuming after epoch {}", ck.epochs_done);
        let log = fs::read_to_string(&log_path).unwrap_or_default();
        (ck.state, ck.epochs_done, log)
    } else {
        let state = trainer.init();
        let obj = objective_with(&state, y, exec)?;
        info!("epoch 0 objective {obj:.10e}");
        (state, 0, format!("epoch\tobjective\n0\t{obj:.10e}\n"))
    };

    let mut failure: Option<Failure> = None;
    let mut observer = |ev: &TrainEvent, s: &EmbeddingSequence| {
        let TrainEvent::EpochEnd { epoch } = ev else { return };
        if failure.is_some() {
            return;
        }
        let step = || -> Result<String, Failure> {
            let obj = objective_with(s, y, exec)?;
            info!("epoch {} objective {obj:.10e}", epoch + 1);
            if checkpoint {
                let ck = Checkpoint {
                    state: s.clone(),
                    epochs_done: epoch + 1,
                };
                write_atomic(&cfg.checkpoint_path(), &ck.to_bytes())?;
            }
            Ok(format!("{}\t{obj:.10e}\n", epoch + 1))
        };
        match step() {
            Ok(line) => log.push_str(&line),
            Err(e) => failure = Some(e),
        }
    };
    let state = trainer.resume(state, start, Some(&mut observer))?;
    if let Some(f) = failure {
        return Err(f);
    }
    write_atomic(&log_path, log.as_bytes())?;
    Ok(state)
}

pub fn train(cfg: &RunConfig, checkpoint: bool, resume: bool) -> Result<(), Failure> {
    if (checkpoint || resume) && cfg.method != Method::Dw2v {
        return Err(Failure::Usage("--checkpoint and --resume apply to dw2v only".into()));
    }
    let vocab = load_vocab(cfg)?;
    let y = load_ppmi(cfg, &vocab)?;
    let labels = y.labels();
    let exec = cfg.exec();
    match cfg.method {
        Method::Dw2v => {
            let state = train_dw2v(cfg, &y, checkpoint, resume)?;
            let emb = EmbeddingFile::new(labels, final_embedding(&state, cfg.combine))?;
            write_embeddings(cfg, "dw2v", &emb, &vocab)?;
        }
        Method::Sw2v => {
            let (_, stats) = load_stats(cfg, &vocab)?;
            let pooled = SliceStats::pooled(&stats)?;
            let m = train_static(&pooled, &cfg.solver)?;
            let emb = EmbeddingFile::new(labels.clone(), vec![m; labels.len()])?;
            write_embeddings(cfg, "sw2v", &emb, &vocab)?;
        }
        Method::Tw2v => {
            let per = factorize_per_slice(&y, &cfg.solver, exec)?;
            write_embeddings(cfg, "tw2v", &EmbeddingFile::new(per.labels, per.matrices)?, &vocab)?;
        }
        Method::Aw2v => {
            let per = factorize_per_slice(&y, &cfg.solver, exec)?;
            let aligned = align_sequence(&per)?;
            write_embeddings(
                cfg,
                "aw2v_per_slice",
                &EmbeddingFile::new(per.labels, per.matrices)?,
                &vocab,
            )?;
            write_embeddings(
                cfg,
                "aw2v",
                &EmbeddingFile::new(aligned.labels, aligned.matrices)?,
                &vocab,
            )?;
        }
    }
    Ok(())
}

pub struct QueryArgs {
    pub word: String,
    pub label: i64,
    pub target: Option<i64>,
    pub k: usize,
    pub all_years: bool,
    pub exclude_self: bool,
}

pub fn query(cfg: &RunConfig, args: &QueryArgs) -> Result<(), Failure> {
    let vocab = load_vocab(cfg)?;
    let emb = load_embeddings(cfg)?;
    let w = word_index(&vocab, &args.word)?;
    let from = emb
        .slice_index(args.label)
        .ok_or_else(|| Failure::Lookup(format!("no slice labeled {}", args.label)))?;
    let src = &emb.matrices[from];
    if src.row(w).iter().all(|&x| x == 0.0) {
        return Err(Failure::Lookup(format!(
            "{:?} has no vector in slice {}",
            args.word, args.label
        )));
    }
    let targets = if args.all_years {
        emb.labels.clone()
    } else {
        let t = args.target.unwrap_or(args.label);
        emb.slice_index(t)
            .ok_or_else(|| Failure::Lookup(format!("no slice labeled {t}")))?;
        vec![t]
    };
    for target in targets {
        let to = emb.slice_index(target).expect("label checked");
        let tgt = &emb.matrices[to];
        let q: Array1<f64> = if cfg.method == Method::Tw2v && to != from {
            local_linear_map(w, src, tgt, cfg.tw2v_k)?
        } else {
            src.row(w).to_owned()
        };
        let same = to == from;
        let nn = nearest_neighbors(q.view(), tgt, args.k, &|c| args.exclude_self && same && c == w);
        if args.all_years {
            let cells: Vec<String> = nn.iter().map(|(c, s)| format!("{} ({s:.3})", vocab.word(*c))).collect();
            println!("{target}\t{}", cells.join("\t"));
        } else {
            println!("rank\tword\tsimilarity");
            for (r, (c, s)) in nn.iter().enumerate() {
                println!("{}\t{}\t{s:.6}", r + 1, vocab.word(*c));
            }
        }
    }
    Ok(())
}

pub struct EvaluateArgs {
    pub testset: Option<PathBuf>,
    pub triplets: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub allow_same_slice: bool,
    pub beta: f64,
    pub min_strength: f64,
    pub top_per_section: usize,
}

fn open(path: &Path) -> Result<fs::File, Failure> {
    fs::File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn mapping(cfg: &RunConfig) -> QueryMapping {
    match cfg.method {
        Method::Tw2v => QueryMapping::LocalLinear { k: cfg.tw2v_k },
        _ => QueryMapping::Identity,
    }
}

pub fn evaluate(cfg: &RunConfig, args: &EvaluateArgs) -> Result<(), Failure> {
    if args.testset.is_none() && args.triplets.is_none() {
        return Err(Failure::Usage(
            "nothing to evaluate: pass --testset and/or --triplets".into(),
        ));
    }
    let vocab = load_vocab(cfg)?;
    let emb = load_embeddings(cfg)?;
    let exec = cfg.exec();
    let ranks = match &args.testset {
        Some(p) => {
            let name = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let ts = AlignmentTestset::from_csv(&name, open(p)?, &vocab, args.allow_same_slice)?;
            Some(run_alignment_test(&ts, &emb, mapping(cfg), exec)?.ranks)
        }
        None => None,
    };
    let clustering = match &args.triplets {
        Some(p) => {
            let items = load_labeled_triplets(open(p)?, &vocab, args.min_strength, args.top_per_section)?;
            if items.items.is_empty() {
                return Err(Failure::Empty("no labeled triplets left after filtering".into()));
            }
            let seed = subseed(cfg.solver.seed, "eval/kmeans");
            Some(evaluate_clustering(
                &items,
                &emb,
                &REPORT_CLUSTER_KS,
                args.beta,
                seed,
                exec,
            )?)
        }
        None => None,
    };
    let report = MetricsReport::new(clustering.as_deref(), ranks.as_deref());
    let json_path = args
        .report
        .clone()
        .unwrap_or_else(|| cfg.out.join(format!("report_{}.json", cfg.method)));
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    write_atomic(&json_path, format!("{json}\n").as_bytes())?;
    let text = report.to_text();
    write_atomic(&json_path.with_extension("txt"), text.as_bytes())?;
    print!("{text}");
    Ok(())
}

pub fn robustness(cfg: &RunConfig, testset: &Path, rates: &[f64], every: usize, offset: usize) -> Result<(), Failure> {
    if every == 0 || offset >= every {
        return Err(Failure::Usage("need every >= 1 and offset < every".into()));
    }
    if rates.is_empty() {
        return Err(Failure::Usage("no subsampling rates given".into()));
    }
    let vocab = load_vocab(cfg)?;
    let (labels, stats) = load_stats(cfg, &vocab)?;
    let name = testset
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ts = AlignmentTestset::from_csv(&name, open(testset)?, &vocab, false)?;
    let exec = cfg.exec();

    let mut rows: Vec<(Method, f64, Vec<Option<usize>>)> = Vec::new();
    for &rate in rates {
        let sub = stats
            .iter()
            .zip(&labels)
            .enumerate()
            .map(|(t, (s, label))| {
                if t % every == offset {
                    subsample_counts(s, rate, subseed(cfg.solver.seed, &format!("subsample/{label}")))
                } else {
                    Ok(s.clone())
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let y = PpmiSequence::from_stats(&sub, &labels, cfg.shift, exec)?;
        let state = train_with(&y, &cfg.solver, exec, None)?;
        let dw = EmbeddingFile::new(labels.clone(), final_embedding(&state, cfg.combine))?;
        rows.push((
            Method::Dw2v,
            rate,
            run_alignment_test(&ts, &dw, QueryMapping::Identity, exec)?.ranks,
        ));
        let aligned = align_sequence(&factorize_per_slice(&y, &cfg.solver, exec)?)?;
        let aw = EmbeddingFile::new(aligned.labels, aligned.matrices)?;
        rows.push((
            Method::Aw2v,
            rate,
            run_alignment_test(&ts, &aw, QueryMapping::Identity, exec)?.ranks,
        ));
        info!("rate {rate} done");
    }

    let mut csv = String::from("method,rate,mrr,mp1,mp3,mp5,mp10\n");
    println!(
        "{:<8}{:>10}{:>8}{:>8}{:>8}{:>8}{:>8}",
        "method", "rate", "MRR", "MP@1", "MP@3", "MP@5", "MP@10"
    );
    for (method, rate, ranks) in &rows {
        let mps: Vec<f64> = REPORT_MP_KS.iter().map(|&k| mp_at_k(ranks, k)).collect();
        let m = mrr(ranks);
        println!(
            "{:<8}{:>9}%{m:>8.4}{:>8.4}{:>8.4}{:>8.4}{:>8.4}",
            method.name(),
            rate * 100.0,
            mps[0],
            mps[1],
            mps[2],
            mps[3]
        );
        csv.push_str(&format!(
            "{},{rate},{m},{},{},{},{}\n",
            method.name(),
            mps[0],
            mps[1],
            mps[2],
            mps[3]
        ));
    }
    write_atomic(&cfg.out.join("robustness.csv"), csv.as_bytes())?;
    Ok(())
}

pub fn export_norms(
    cfg: &RunConfig,
    mut words: Vec<String>,
    word_file: Option<&Path>,
    output: Option<PathBuf>,
) -> Result<(), Failure> {
    if let Some(p) = word_file {
        let text = fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
        words.extend(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from));
    }
    if words.is_empty() {
        return Err(Failure::Usage("no words given (use --words or --word-file)".into()));
    }
    let vocab = load_vocab(cfg)?;
    let emb = load_embeddings(cfg)?;
    let mut csv = String::from("word,label,norm\n");
    for word in &words {
        let w = word_index(&vocab, word)?;
        for (label, n) in norm_series(w, &emb)? {
            csv.push_str(&format!("{word},{label},{n}\n"));
        }
    }
    let path = output.unwrap_or_else(|| cfg.out.join(format!("norms_{}.csv", cfg.method)));
    write_atomic(&path, csv.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(())
}
