//! Evaluation: cosine retrieval, spherical k-means, clustering metrics
//! (NMI, pair-counting F-beta), cross-time alignment metrics (MRR, MP@K)
//! and per-word norm series.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::io::Read;

use log::warn;
use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::local_linear_map;
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::seed;
use crate::solver::EmbeddingFile;

/// Answers ranked below this position count as not found.
pub const RANK_CUTOFF: usize = 10;
pub const DEFAULT_BETA: f64 = 5.0;
pub const DEFAULT_MIN_STRENGTH: f64 = 0.35;
pub const DEFAULT_TOP_PER_SECTION: usize = 200;
pub const DEFAULT_TW2V_K: usize = 30;

fn norm(v: ArrayView1<f64>) -> f64 {
    v.dot(&v).sqrt()
}

pub(crate) fn row_is_zero(m: &Array2<f64>, i: usize) -> bool {
    m.row(i).iter().all(|&x| x == 0.0)
}

pub fn cosine(a: ArrayView1<f64>, b: ArrayView1<f64>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((a.dot(&b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Top-`k` rows of `matrix` by cosine to `query`, descending, ties broken by
/// ascending index. Zero rows and excluded rows are skipped; a zero query
/// yields an empty list.
pub fn nearest_neighbors(
    query: ArrayView1<f64>,
    matrix: &Array2<f64>,
    k: usize,
    exclude: &dyn Fn(usize) -> bool,
) -> Vec<(usize, f64)> {
    let qn = norm(query);
    if qn == 0.0 || k == 0 {
        return Vec::new();
    }
    let mut scored: Vec<(usize, f64)> = (0..matrix.nrows())
        .filter(|&w| !exclude(w))
        .filter_map(|w| {
            let row = matrix.row(w);
            let n = norm(row);
            (n > 0.0).then(|| (w, (row.dot(&query) / (n * qn)).clamp(-1.0, 1.0)))
        })
        .collect();
    let by_rank = |a: &(usize, f64), b: &(usize, f64)| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0));
    if scored.len() > k {
        scored.select_nth_unstable_by(k - 1, by_rank);
        scored.truncate(k);
    }
    scored.sort_by(by_rank);
    scored
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub assignment: Vec<usize>,
    pub k: usize,
    /// Mean cosine between each item and its cluster centroid.
    pub objective: f64,
    /// Objective after every iteration.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        KMeansConfig {
            k,
            max_iters: 100,
            restarts: 10,
            seed,
        }
    }
}

fn unit_rows(vectors: &Array2<f64>) -> Result<Array2<f64>> {
    let mut out = vectors.clone();
    for mut row in out.rows_mut() {
        let n = norm(row.view());
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        row /= n;
    }
    Ok(out)
}

fn normalize_or_keep(v: &mut Array1<f64>) {
    let n = norm(v.view());
    if n > 0.0 {
        *v /= n;
    }
}

fn best_cluster(x: ArrayView1<f64>, centroids: &[Array1<f64>]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (c, ctr) in centroids.iter().enumerate() {
        let s = x.dot(ctr);
        if s > best.1 {
            best = (c, s);
        }
    }
    best
}

fn kmeanspp_seed(x: &Array2<f64>, k: usize, rng: &mut impl Rng) -> Vec<Array1<f64>> {
    let n = x.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut dist: Vec<f64> = (0..n)
        .map(|i| (1.0 - x.row(i).dot(&x.row(chosen[0]))).max(0.0))
        .collect();
    while chosen.len() < k {
        let weights: Vec<f64> = dist.iter().map(|d| d * d).collect();
        let total: f64 = weights.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, w) in weights.iter().enumerate() {
                if *w > 0.0 && target < *w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            if weights[pick] == 0.0 {
                // numerical tail: take the last item with positive weight
                pick = weights.iter().rposition(|&w| w > 0.0).expect("total > 0");
            }
            pick
        } else {
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min((1.0 - x.row(i).dot(&x.row(next))).max(0.0));
        }
    }
    chosen.into_iter().map(|i| x.row(i).to_owned()).collect()
}

fn mean_cosine(x: &Array2<f64>, assignment: &[usize], centroids: &[Array1<f64>]) -> f64 {
    let total: f64 = assignment
        .iter()
        .enumerate()
        .map(|(i, &c)| x.row(i).dot(&centroids[c]))
        .sum();
    total / x.nrows() as f64
}

fn kmeans_once(x: &Array2<f64>, k: usize, max_iters: usize, rng: &mut impl Rng) -> Clustering {
    let n = x.nrows();
    let mut centroids = kmeanspp_seed(x, k, rng);
    let mut assignment = vec![usize::MAX; n];
    let mut history = Vec::new();
    for _ in 0..max_iters.max(1) {
        let mut next: Vec<usize> = Vec::with_capacity(n);
        let mut sims: Vec<f64> = Vec::with_capacity(n);
        for i in 0..n {
            let (c, s) = best_cluster(x.row(i), &centroids);
            next.push(c);
            sims.push(s);
        }
        // repair empty clusters with the point farthest from its centroid
        let mut sizes = vec![0usize; k];
        for &c in &next {
            sizes[c] += 1;
        }
        for empty in 0..k {
            if sizes[empty] > 0 {
                continue;
            }
            let victim = (0..n)
                .filter(|&i| sizes[next[i]] > 1)
                .min_by(|&a, &b| sims[a].total_cmp(&sims[b]).then(a.cmp(&b)))
                .expect("k <= n guarantees a cluster with two members");
            sizes[next[victim]] -= 1;
            next[victim] = empty;
            sizes[empty] = 1;
            sims[victim] = 1.0;
            centroids[empty] = x.row(victim).to_owned();
        }
        let changed = next != assignment;
        assignment = next;
        let d = x.ncols();
        let mut sums = vec![Array1::<f64>::zeros(d); k];
        for (i, &c) in assignment.iter().enumerate() {
            sums[c] += &x.row(i);
        }
        for (c, mut s) in sums.into_iter().enumerate() {
            if norm(s.view()) > 0.0 {
                normalize_or_keep(&mut s);
                centroids[c] = s;
            }
        }
        history.push(mean_cosine(x, &assignment, &centroids));
        if !changed {
            break;
        }
    }
    Clustering {
        objective: *history.last().expect("at least one iteration"),
        assignment,
        k,
        history,
    }
}

/// Spherical k-means on the rows of `vectors`: rows are normalized, seeded
/// with k-means++ on cosine distance, and the best of `restarts` runs by
/// objective is returned. Deterministic given the seed.
pub fn spherical_kmeans(vectors: &Array2<f64>, config: &KMeansConfig, exec: Exec) -> Result<Clustering> {
    let n = vectors.nrows();
    if config.k == 0 || config.k > n {
        return Err(Error::InvalidArgument(format!(
            "cannot form {} clusters from {n} items",
            config.k
        )));
    }
    let x = unit_rows(vectors)?;
    let runs = exec.map_indexed(config.restarts.max(1), |r| {
        let mut rng = seed::rng_for(config.seed, &format!("kmeans/{r}"));
        kmeans_once(&x, config.k, config.max_iters, &mut rng)
    });
    let mut best: Option<Clustering> = None;
    for run in runs {
        if best.as_ref().is_none_or(|b| run.objective > b.objective) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn contingency<L: Hash + Eq + Clone>(labels: &[L], clusters: &[usize]) -> Result<(Vec<Vec<u64>>, usize)> {
    if labels.len() != clusters.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} labels for {} cluster assignments",
            labels.len(),
            clusters.len()
        )));
    }
    let mut lid: HashMap<&L, usize> = HashMap::new();
    let mut cid: HashMap<usize, usize> = HashMap::new();
    for l in labels {
        let next = lid.len();
        lid.entry(l).or_insert(next);
    }
    for &c in clusters {
        let next = cid.len();
        cid.entry(c).or_insert(next);
    }
    let mut table = vec![vec![0u64; cid.len()]; lid.len()];
    for (l, c) in labels.iter().zip(clusters) {
        table[lid[l]][cid[c]] += 1;
    }
    Ok((table, labels.len()))
}

fn entropy(counts: impl Iterator<Item = u64>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// `I(L;C) / ((H(L) + H(C)) / 2)` with natural logarithms.
pub fn nmi<L: Hash + Eq + Clone>(labels: &[L], clusters: &[usize]) -> Result<f64> {
    let (table, n) = contingency(labels, clusters)?;
    if n == 0 {
        return Err(Error::EmptyEvaluation("no items to score".into()));
    }
    let n = n as f64;
    let rows: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<u64> = (0..table[0].len()).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let hl = entropy(rows.iter().copied(), n);
    let hc = entropy(cols.iter().copied(), n);
    if hl + hc == 0.0 {
        warn!("single label and single cluster; NMI defined as 1");
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let nij = nij as f64;
                mi += nij / n * (n * nij / (rows[i] as f64 * cols[j] as f64)).ln();
            }
        }
    }
    Ok((mi / ((hl + hc) / 2.0)).clamp(0.0, 1.0))
}

fn pairs(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// Pair-counting `F_beta = (beta^2 + 1) P R / (beta^2 P + R)`.
pub fn f_beta<L: Hash + Eq + Clone>(labels: &[L], clusters: &[usize], beta: f64) -> Result<f64> {
    let (table, n) = contingency(labels, clusters)?;
    if n < 2 {
        return Err(Error::EmptyEvaluation("F-beta needs at least two items".into()));
    }
    let tp: u64 = table.iter().flatten().map(|&c| pairs(c)).sum();
    let same_cluster: u64 = (0..table[0].len())
        .map(|j| pairs(table.iter().map(|r| r[j]).sum()))
        .sum();
    let same_label: u64 = table.iter().map(|r| pairs(r.iter().sum())).sum();
    if same_cluster == 0 || same_label == 0 {
        warn!("precision or recall undefined (no positive pairs); F-beta set to 0");
        return Ok(0.0);
    }
    if tp == 0 {
        return Ok(0.0);
    }
    let p = tp as f64 / same_cluster as f64;
    let r = tp as f64 / same_label as f64;
    let b2 = beta * beta;
    Ok((b2 + 1.0) * p * r / (b2 * p + r))
}

/// One cross-time equivalence query.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentRecord {
    pub query_word: usize,
    pub query_label: i64,
    pub target_label: i64,
    pub answer_word: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentTestset {
    pub name: String,
    pub records: Vec<AlignmentRecord>,
    /// Records dropped while loading (out-of-vocabulary or same-slice).
    pub dropped: usize,
}

#[derive(Debug, Deserialize)]
struct TestsetRow {
    query_word: String,
    query_label: i64,
    target_label: i64,
    answer_word: String,
}

impl AlignmentTestset {
    /// CSV with header `query_word,query_label,target_label,answer_word`.
    /// Same-slice records are kept only when `allow_same_slice` is set.
    pub fn from_csv(name: &str, reader: impl Read, vocab: &Vocabulary, allow_same_slice: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["query_word", "query_label", "target_label", "answer_word"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::format(
                "alignment testset",
                format!("header must be {}", expected.join(",")),
            ));
        }
        let mut records = Vec::new();
        let mut dropped = 0;
        for row in rdr.deserialize() {
            let row: TestsetRow = row?;
            let (Some(q), Some(a)) = (vocab.get(&row.query_word), vocab.get(&row.answer_word)) else {
                dropped += 1;
                continue;
            };
            if row.query_label == row.target_label && !allow_same_slice {
                dropped += 1;
                continue;
            }
            records.push(AlignmentRecord {
                query_word: q as usize,
                query_label: row.query_label,
                target_label: row.target_label,
                answer_word: a as usize,
            });
        }
        if dropped > 0 {
            warn!("testset {name}: dropped {dropped} records");
        }
        Ok(AlignmentTestset {
            name: name.to_string(),
            records,
            dropped,
        })
    }

    pub fn to_csv(&self, vocab: &Vocabulary) -> String {
        let mut out = String::from("query_word,query_label,target_label,answer_word\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                vocab.word(r.query_word),
                r.query_label,
                r.target_label,
                vocab.word(r.answer_word)
            ));
        }
        out
    }
}

/// How the query vector is carried from its slice into the target slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QueryMapping {
    /// Vectors already live in a shared space.
    Identity,
    /// Per-query linear map fitted on the `k` nearest source neighbors.
    LocalLinear { k: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentOutcome {
    /// 1-based rank of the answer, `None` when it falls outside the top 10.
    pub ranks: Vec<Option<usize>>,
    /// Records skipped because of a zero or unmappable query or unknown labels.
    pub skipped: usize,
}

/// Rank of `answer` among all nonzero target rows by cosine to `q` (ties by
/// index), excluding `excluded`. `None` if the answer row is zero or excluded.
fn answer_rank(q: ArrayView1<f64>, target: &Array2<f64>, answer: usize, excluded: Option<usize>) -> Option<usize> {
    if Some(answer) == excluded || row_is_zero(target, answer) {
        return None;
    }
    let qn = norm(q);
    let cos = |w: usize| {
        let r = target.row(w);
        r.dot(&q) / (norm(r) * qn)
    };
    let s_ans = cos(answer);
    let ahead = (0..target.nrows())
        .filter(|&w| w != answer && Some(w) != excluded && !row_is_zero(target, w))
        .filter(|&w| {
            let s = cos(w);
            s > s_ans || (s == s_ans && w < answer)
        })
        .count();
    Some(ahead + 1)
}

fn query_one(rec: &AlignmentRecord, emb: &EmbeddingFile, mapping: QueryMapping) -> Option<Option<usize>> {
    let from = emb.slice_index(rec.query_label)?;
    let to = emb.slice_index(rec.target_label)?;
    let src = &emb.matrices[from];
    let tgt = &emb.matrices[to];
    if rec.query_word >= src.nrows() || rec.answer_word >= tgt.nrows() || row_is_zero(src, rec.query_word) {
        return None;
    }
    let q: Array1<f64> = match mapping {
        QueryMapping::Identity => src.row(rec.query_word).to_owned(),
        QueryMapping::LocalLinear { k } => {
            if from == to {
                src.row(rec.query_word).to_owned()
            } else {
                local_linear_map(rec.query_word, src, tgt, k).ok()?
            }
        }
    };
    if norm(q.view()) == 0.0 {
        return None;
    }
    let excluded = (from == to).then_some(rec.query_word);
    let rank = answer_rank(q.view(), tgt, rec.answer_word, excluded);
    Some(rank.filter(|&r| r <= RANK_CUTOFF))
}

/// Ranks every record's answer in its target slice.
pub fn run_alignment_test(
    testset: &AlignmentTestset,
    embeddings: &EmbeddingFile,
    mapping: QueryMapping,
    exec: Exec,
) -> Result<AlignmentOutcome> {
    if testset.records.is_empty() {
        return Err(Error::EmptyEvaluation(format!(
            "testset {} has no usable records",
            testset.name
        )));
    }
    let results = exec.map_slice(&testset.records, |r| query_one(r, embeddings, mapping));
    let skipped = results.iter().filter(|r| r.is_none()).count();
    if skipped > 0 {
        warn!("testset {}: skipped {skipped} queries", testset.name);
    }
    let ranks: Vec<Option<usize>> = results.into_iter().flatten().collect();
    if ranks.is_empty() {
        return Err(Error::EmptyEvaluation(format!(
            "every query of testset {} was skipped",
            testset.name
        )));
    }
    Ok(AlignmentOutcome { ranks, skipped })
}

/// Mean reciprocal rank; answers outside the top 10 contribute 0.
pub fn mrr(ranks: &[Option<usize>]) -> f64 {
    if ranks.is_empty() {
        return 0.0;
    }
    let total: f64 = ranks
        .iter()
        .map(|r| match r {
            Some(r) if *r >= 1 && *r <= RANK_CUTOFF => 1.0 / *r as f64,
            _ => 0.0,
        })
        .sum();
    total / ranks.len() as f64
}

/// Fraction of queries whose answer ranks within the top `k`.
pub fn mp_at_k(ranks: &[Option<usize>], k: usize) -> f64 {
    if ranks.is_empty() {
        return 0.0;
    }
    let hits = ranks.iter().filter(|r| matches!(r, Some(r) if *r <= k)).count();
    hits as f64 / ranks.len() as f64
}

/// Euclidean norm of one word's vector in every slice.
pub fn norm_series(word: usize, embeddings: &EmbeddingFile) -> Result<Vec<(i64, f64)>> {
    if word >= embeddings.vocab_size() {
        return Err(Error::InvalidArgument(format!("word index {word} out of range")));
    }
    Ok(embeddings
        .labels
        .iter()
        .zip(&embeddings.matrices)
        .map(|(&l, m)| (l, norm(m.row(word))))
        .collect())
}

/// A word in one slice with its ground-truth category.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledItem {
    pub word: usize,
    pub slice_label: i64,
    pub section: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledItems {
    pub items: Vec<LabeledItem>,
    /// Section names indexed by section id.
    pub sections: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct TripletRow {
    word: String,
    label: i64,
    section: String,
    strength: f64,
}

/// Loads `word,label,section,strength` rows, keeps for each (word, section)
/// only the slice with the largest strength, drops strengths below
/// `min_strength`, and keeps the `top_per_section` strongest per section.
pub fn load_labeled_triplets(
    reader: impl Read,
    vocab: &Vocabulary,
    min_strength: f64,
    top_per_section: usize,
) -> Result<LabeledItems> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut best: BTreeMap<(String, usize), (f64, i64)> = BTreeMap::new();
    let mut oov = 0usize;
    for row in rdr.deserialize() {
        let row: TripletRow = row?;
        let Some(w) = vocab.get(&row.word) else {
            oov += 1;
            continue;
        };
        if row.strength.is_nan() || row.strength < min_strength {
            continue;
        }
        let key = (row.section, w as usize);
        let slot = best.entry(key).or_insert((row.strength, row.label));
        if row.strength > slot.0 || (row.strength == slot.0 && row.label < slot.1) {
            *slot = (row.strength, row.label);
        }
    }
    if oov > 0 {
        warn!("dropped {oov} labeled triplets with out-of-vocabulary words");
    }
    let mut by_section: BTreeMap<String, Vec<(f64, usize, i64)>> = BTreeMap::new();
    for ((section, w), (s, l)) in best {
        by_section.entry(section).or_default().push((s, w, l));
    }
    let mut items = Vec::new();
    let mut sections = Vec::new();
    for (sid, (name, mut rows)) in by_section.into_iter().enumerate() {
        rows.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        rows.truncate(top_per_section);
        items.extend(rows.into_iter().map(|(_, w, l)| LabeledItem {
            word: w,
            slice_label: l,
            section: sid,
        }));
        sections.push(name);
    }
    Ok(LabeledItems { items, sections })
}

/// NMI and F-beta of spherical k-means over the items' (word, slice) vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringScore {
    pub k: usize,
    pub nmi: f64,
    pub f_beta: f64,
}

pub fn evaluate_clustering(
    items: &LabeledItems,
    embeddings: &EmbeddingFile,
    ks: &[usize],
    beta: f64,
    seed: u64,
    exec: Exec,
) -> Result<Vec<ClusteringScore>> {
    let mut rows: Vec<ArrayView1<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    for it in &items.items {
        let Some(t) = embeddings.slice_index(it.slice_label) else {
            continue;
        };
        let m = &embeddings.matrices[t];
        if it.word >= m.nrows() || row_is_zero(m, it.word) {
            continue;
        }
        rows.push(m.row(it.word));
        labels.push(it.section);
    }
    if rows.len() < 2 {
        return Err(Error::EmptyEvaluation(
            "fewer than two labeled items have vectors".into(),
        ));
    }
    let d = embeddings.dim();
    let x = Array2::from_shape_fn((rows.len(), d), |(i, j)| rows[i][j]);
    ks.iter()
        .map(|&k| {
            let c = spherical_kmeans(&x, &KMeansConfig::new(k, seed), exec)?;
            Ok(ClusteringScore {
                k,
                nmi: nmi(&labels, &c.assignment)?,
                f_beta: f_beta(&labels, &c.assignment, beta)?,
            })
        })
        .collect()
}

pub const REPORT_CLUSTER_KS: [usize; 3] = [10, 15, 20];
pub const REPORT_MP_KS: [usize; 4] = [1, 3, 5, 10];

/// Machine-readable metrics report with fixed keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub nmi: BTreeMap<String, Option<f64>>,
    pub f_beta: BTreeMap<String, Option<f64>>,
    pub mrr: Option<f64>,
    pub mp: BTreeMap<String, Option<f64>>,
}

impl MetricsReport {
    pub fn new(clustering: Option<&[ClusteringScore]>, ranks: Option<&[Option<usize>]>) -> Self {
        let score = |k: usize| clustering.and_then(|c| c.iter().find(|s| s.k == k));
        MetricsReport {
            nmi: REPORT_CLUSTER_KS
                .iter()
                .map(|&k| (k.to_string(), score(k).map(|s| s.nmi)))
                .collect(),
            f_beta: REPORT_CLUSTER_KS
                .iter()
                .map(|&k| (k.to_string(), score(k).map(|s| s.f_beta)))
                .collect(),
            mrr: ranks.map(mrr),
            mp: REPORT_MP_KS
                .iter()
                .map(|&k| (k.to_string(), ranks.map(|r| mp_at_k(r, k))))
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let fmt = |x: &Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        let mut out = String::new();
        out.push_str(&format!(
            "{:<10}{:>12}{:>12}{:>12}\n",
            "metric", "10 clusters", "15 clusters", "20 clusters"
        ));
        for (name, m) in [("NMI", &self.nmi), ("F_beta", &self.f_beta)] {
            out.push_str(&format!("{name:<10}"));
            for k in REPORT_CLUSTER_KS {
                out.push_str(&format!("{:>12}", fmt(&m[&k.to_string()])));
            }
            out.push('\n');
        }
        out.push('\n');
        out.push_str(&format!(
            "{:>8}{:>8}{:>8}{:>8}{:>8}\n",
            "MRR", "MP@1", "MP@3", "MP@5", "MP@10"
        ));
        out.push_str(&format!("{:>8}", fmt(&self.mrr)));
        for k in REPORT_MP_KS {
            out.push_str(&format!("{:>8}", fmt(&self.mp[&k.to_string()])));
        }
        out.push('\n');
        out
    }
}
