//! Corpus ingestion: tokenization, the shared vocabulary, and per-slice
//! co-occurrence statistics.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Deserialize;

use crate::binio::{self, get_u32, get_u64, put_u32, put_u64};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sparse::CsrMatrix;

pub type Document = Vec<String>;

/// Splits on anything that is not a Unicode alphanumeric character,
/// lowercases, and drops stopwords and purely numeric tokens.
pub fn tokenize(text: &str, stopwords: &HashSet<String>) -> Document {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| !t.chars().all(char::is_numeric))
        .filter(|t| !stopwords.contains(t))
        .collect()
}

/// One token per line; blank lines and surrounding whitespace are ignored.
pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::at(path, e))?;
    Ok(text
        .lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect())
}

#[derive(Debug, Clone)]
pub struct TimeSlicedCorpus {
    slices: Vec<Vec<Document>>,
    labels: Vec<i64>,
}

impl TimeSlicedCorpus {
    pub fn new(labels: Vec<i64>, slices: Vec<Vec<Document>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("corpus has no time slices".into()));
        }
        if labels.len() != slices.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} slices",
                labels.len(),
                slices.len()
            )));
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "slice labels must be strictly increasing".into(),
            ));
        }
        Ok(TimeSlicedCorpus { slices, labels })
    }

    /// Reads one sub-directory per slice; the directory name is the integer
    /// label and every regular file inside is one document.
    pub fn from_dir(root: &Path, stopwords: &HashSet<String>) -> Result<Self> {
        let entries = fs::read_dir(root).map_err(|e| Error::at(root, e))?;
        let mut slice_dirs: Vec<(i64, PathBuf)> = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::at(root, e))?;
            let path = entry.path();
            if !path.is_dir() {
                continue;
            }
            let name = entry.file_name().to_string_lossy().into_owned();
            let label = name.parse::<i64>().map_err(|_| {
                Error::format(
                    "corpus directory",
                    format!("slice directory {name:?} is not an integer label"),
                )
            })?;
            slice_dirs.push((label, path));
        }
        slice_dirs.sort();
        let mut labels = Vec::with_capacity(slice_dirs.len());
        let mut slices = Vec::with_capacity(slice_dirs.len());
        for (label, dir) in slice_dirs {
            let mut files: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|e| Error::at(&dir, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            files.sort();
            let mut docs = Vec::with_capacity(files.len());
            for f in files {
                let text = fs::read_to_string(&f).map_err(|e| Error::at(&f, e))?;
                docs.push(tokenize(&text, stopwords));
            }
            labels.push(label);
            slices.push(docs);
        }
        Self::new(labels, slices)
    }

    /// Reads JSON lines of the form `{"label": 1995, "text": "..."}`.
    pub fn from_jsonl(path: &Path, stopwords: &HashSet<String>) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Line {
            label: i64,
            text: String,
        }
        let file = fs::File::open(path).map_err(|e| Error::at(path, e))?;
        let mut by_label: BTreeMap<i64, Vec<Document>> = BTreeMap::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::at(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Line = serde_json::from_str(&line)
                .map_err(|e| Error::format("corpus JSON line", format!("line {}: {e}", lineno + 1)))?;
            by_label
                .entry(rec.label)
                .or_default()
                .push(tokenize(&rec.text, stopwords));
        }
        let (labels, slices) = by_label.into_iter().unzip();
        Self::new(labels, slices)
    }

    /// Directory input if `path` is a directory, JSON lines otherwise.
    pub fn load(path: &Path, stopwords: &HashSet<String>) -> Result<Self> {
        let meta = fs::metadata(path).map_err(|e| Error::at(path, e))?;
        if meta.is_dir() {
            Self::from_dir(path, stopwords)
        } else {
            Self::from_jsonl(path, stopwords)
        }
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn slices(&self) -> &[Vec<Document>] {
        &self.slices
    }

    pub fn num_slices(&self) -> usize {
        self.labels.len()
    }
}

/// Dense word-to-index map shared by every slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Builds from words in index order with their total counts.
    pub fn from_words(entries: Vec<(String, u64)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(entries.len());
        let mut words = Vec::with_capacity(entries.len());
        let mut counts = Vec::with_capacity(entries.len());
        for (i, (w, c)) in entries.into_iter().enumerate() {
            if index.insert(w.clone(), i as u32).is_some() {
                return Err(Error::format("vocabulary", format!("duplicate word {w:?}")));
            }
            words.push(w);
            counts.push(c);
        }
        Ok(Vocabulary { words, counts, index })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, idx: usize) -> &str {
        &self.words[idx]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Total occurrences across all slices at the time the vocabulary was built.
    pub fn count(&self, idx: usize) -> u64 {
        self.counts[idx]
    }

    /// Tab-separated `word<TAB>count`, one per line in index order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (w, c) in self.words.iter().zip(&self.counts) {
            out.push_str(w);
            out.push('\t');
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (w, c) = line
                .split_once('\t')
                .ok_or_else(|| Error::format("vocabulary file", format!("line {} lacks a tab", n + 1)))?;
            let c = c
                .parse::<u64>()
                .map_err(|_| Error::format("vocabulary file", format!("line {}: bad count", n + 1)))?;
            entries.push((w.to_string(), c));
        }
        Self::from_words(entries)
    }
}

/// Keeps words whose total count over all slices reaches `min_count`,
/// ordered by descending count with lexicographic tie-break.
pub fn build_vocabulary(corpus: &TimeSlicedCorpus, min_count: u64) -> Result<Vocabulary> {
    if min_count < 1 {
        return Err(Error::InvalidArgument("min_count must be at least 1".into()));
    }
    let mut totals: HashMap<&str, u64> = HashMap::new();
    for doc in corpus.slices.iter().flatten() {
        for tok in doc {
            *totals.entry(tok.as_str()).or_insert(0) += 1;
        }
    }
    let mut kept: Vec<(String, u64)> = totals
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .map(|(w, c)| (w.to_string(), c))
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary { min_count });
    }
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Vocabulary::from_words(kept)
}

/// Co-occurrence statistics of one slice over a fixed vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceStats {
    pub cooc: CsrMatrix<u64>,
    pub unigram: Vec<u64>,
    pub total_tokens: u64,
    pub window: u32,
}

const STATS_MAGIC: &[u8; 4] = b"TVCO";
const STATS_VERSION: u32 = 1;

impl SliceStats {
    pub fn vocab_size(&self) -> usize {
        self.unigram.len()
    }

    /// Checks symmetry, the unigram total and the support condition.
    pub fn validate(&self) -> Result<()> {
        let v = self.unigram.len();
        if self.cooc.dim() != v {
            return Err(Error::ShapeMismatch(format!(
                "co-occurrence matrix is {0}x{0} but unigram has {v} entries",
                self.cooc.dim()
            )));
        }
        let sum: u64 = self.unigram.iter().sum();
        if sum != self.total_tokens {
            return Err(Error::format(
                "slice statistics",
                format!("unigram sum {sum} differs from total_tokens {}", self.total_tokens),
            ));
        }
        if !self.cooc.is_symmetric() {
            return Err(Error::format(
                "slice statistics",
                "co-occurrence matrix is not symmetric",
            ));
        }
        for (r, c, n) in self.cooc.triplets() {
            if n == 0 {
                return Err(Error::format("slice statistics", "explicit zero stored"));
            }
            if self.unigram[r as usize] == 0 || self.unigram[c as usize] == 0 {
                return Err(Error::format(
                    "slice statistics",
                    format!("pair ({r},{c}) co-occurs but a unigram count is zero"),
                ));
            }
        }
        Ok(())
    }

    /// Element-wise sum of several slices' statistics (count-level pooling).
    pub fn pooled(stats: &[SliceStats]) -> Result<SliceStats> {
        let first = stats
            .first()
            .ok_or_else(|| Error::InvalidArgument("nothing to pool".into()))?;
        let v = first.vocab_size();
        let mut cooc: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        let mut unigram = vec![0u64; v];
        let mut total = 0u64;
        for s in stats {
            if s.vocab_size() != v || s.window != first.window {
                return Err(Error::ShapeMismatch(
                    "pooled slices disagree on vocabulary or window".into(),
                ));
            }
            for (r, c, n) in s.cooc.triplets() {
                *cooc.entry((r, c)).or_insert(0) += n;
            }
            for (acc, &u) in unigram.iter_mut().zip(&s.unigram) {
                *acc += u;
            }
            total += s.total_tokens;
        }
        Ok(SliceStats {
            cooc: CsrMatrix::from_map(v, &cooc),
            unigram,
            total_tokens: total,
            window: first.window,
        })
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(STATS_MAGIC)?;
        put_u32(w, STATS_VERSION)?;
        put_u64(w, self.unigram.len() as u64)?;
        put_u32(w, self.window)?;
        put_u64(w, self.total_tokens)?;
        for &u in &self.unigram {
            put_u64(w, u)?;
        }
        put_u64(w, self.cooc.nnz() as u64)?;
        for (r, c, n) in self.cooc.triplets() {
            put_u32(w, r)?;
            put_u32(w, c)?;
            put_u64(w, n)?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        const WHAT: &str = "slice statistics file";
        binio::expect_magic(r, STATS_MAGIC, WHAT)?;
        binio::expect_version(r, STATS_VERSION, WHAT)?;
        let v = binio::len_from_u64(get_u64(r)?, WHAT)?;
        let window = get_u32(r)?;
        let total_tokens = get_u64(r)?;
        let mut unigram = Vec::with_capacity(v.min(1 << 24));
        for _ in 0..v {
            unigram.push(get_u64(r)?);
        }
        let nnz = binio::len_from_u64(get_u64(r)?, WHAT)?;
        let triplets = read_triplets(r, v, nnz, get_u64, WHAT)?;
        binio::expect_eof(r, WHAT)?;
        Ok(SliceStats {
            cooc: CsrMatrix::from_sorted_triplets(v, triplets),
            unigram,
            total_tokens,
            window,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Self> {
        Self::read_from(&mut bytes)
    }
}

/// Reads `nnz` (row u32, col u32, value) triplets and checks they are in
/// range and strictly increasing in row-major order.
pub(crate) fn read_triplets<R: Read, T>(
    r: &mut R,
    dim: usize,
    nnz: usize,
    mut value: impl FnMut(&mut R) -> std::io::Result<T>,
    what: &'static str,
) -> Result<Vec<(u32, u32, T)>> {
    let mut out = Vec::with_capacity(nnz.min(1 << 24));
    let mut prev: Option<(u32, u32)> = None;
    for _ in 0..nnz {
        let row = get_u32(r)?;
        let col = get_u32(r)?;
        let val = value(r)?;
        if row as usize >= dim || col as usize >= dim {
            return Err(Error::format(
                what,
                format!("triplet ({row},{col}) outside {dim}x{dim}"),
            ));
        }
        if prev.is_some_and(|p| p >= (row, col)) {
            return Err(Error::format(what, "triplets not strictly sorted"));
        }
        prev = Some((row, col));
        out.push((row, col, val));
    }
    Ok(out)
}

fn count_documents(docs: &[Document], vocab: &Vocabulary, window: usize) -> (HashMap<(u32, u32), u64>, Vec<u64>) {
    let mut pairs: HashMap<(u32, u32), u64> = HashMap::new();
    let mut unigram = vec![0u64; vocab.len()];
    let mut ids: Vec<Option<u32>> = Vec::new();
    for doc in docs {
        ids.clear();
        ids.extend(doc.iter().map(|t| vocab.get(t)));
        for (i, wi) in ids.iter().enumerate() {
            let Some(wi) = *wi else { continue };
            unigram[wi as usize] += 1;
            let hi = (i + window).min(ids.len() - 1);
            for wj in ids[i + 1..=hi].iter().flatten() {
                *pairs.entry((wi, *wj)).or_insert(0) += 1;
                *pairs.entry((*wj, wi)).or_insert(0) += 1;
            }
        }
    }
    (pairs, unigram)
}

const DOCS_PER_TASK: usize = 256;

/// Counts every ordered position pair `(i, j)` with `0 < |i - j| <= window`
/// whose tokens are both in the vocabulary. Out-of-vocabulary tokens still
/// occupy positions; windows stop at document boundaries.
pub fn count_cooccurrences(docs: &[Document], vocab: &Vocabulary, window: u32) -> Result<SliceStats> {
    count_cooccurrences_with(docs, vocab, window, Exec::default())
}

pub fn count_cooccurrences_with(docs: &[Document], vocab: &Vocabulary, window: u32, exec: Exec) -> Result<SliceStats> {
    if window < 1 {
        return Err(Error::InvalidArgument("window must be at least 1".into()));
    }
    let chunks: Vec<&[Document]> = docs.chunks(DOCS_PER_TASK).collect();
    let partials = exec.map_slice(&chunks, |chunk| count_documents(chunk, vocab, window as usize));

    let mut pairs: HashMap<(u32, u32), u64> = HashMap::new();
    let mut unigram = vec![0u64; vocab.len()];
    for (p, u) in partials {
        for (k, n) in p {
            *pairs.entry(k).or_insert(0) += n;
        }
        for (acc, x) in unigram.iter_mut().zip(u) {
            *acc += x;
        }
    }
    let mut triplets: Vec<(u32, u32, u64)> = pairs.into_iter().map(|((r, c), n)| (r, c, n)).collect();
    triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
    let total_tokens = unigram.iter().sum();
    Ok(SliceStats {
        cooc: CsrMatrix::from_sorted_triplets(vocab.len(), triplets),
        unigram,
        total_tokens,
        window,
    })
}

/// Counts every slice of a corpus.
pub fn count_corpus(corpus: &TimeSlicedCorpus, vocab: &Vocabulary, window: u32, exec: Exec) -> Result<Vec<SliceStats>> {
    corpus
        .slices()
        .iter()
        .map(|docs| count_cooccurrences_with(docs, vocab, window, exec))
        .collect()
}

/// Replaces each co-occurrence count by a Binomial(count, rate) draw, once
/// per unordered pair and mirrored, then rescales each unigram count by its
/// row's surviving fraction.
pub fn subsample_counts(stats: &SliceStats, rate: f64, seed: u64) -> Result<SliceStats> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "subsampling rate {rate} outside (0, 1]"
        )));
    }
    let v = stats.vocab_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (r, c, n) in stats.cooc.triplets() {
        if r > c {
            continue;
        }
        let k = if rate == 1.0 {
            n
        } else {
            Binomial::new(n, rate)
                .map_err(|e| Error::Domain(format!("binomial({n}, {rate}): {e}")))?
                .sample(&mut rng)
        };
        if k > 0 {
            drawn.insert((r, c), k);
            if r != c {
                drawn.insert((c, r), k);
            }
        }
    }
    let cooc = CsrMatrix::from_map(v, &drawn);

    let row_sum = |m: &CsrMatrix<u64>, i: usize| -> u64 { m.row(i).1.iter().sum() };
    let old_total_pairs: u64 = stats.cooc.values().iter().sum();
    let new_total_pairs: u64 = cooc.values().iter().sum();
    let mut unigram = vec![0u64; v];
    for (i, u) in unigram.iter_mut().enumerate() {
        let orig = stats.unigram[i];
        if orig == 0 {
            continue;
        }
        let before = row_sum(&stats.cooc, i);
        let after = row_sum(&cooc, i);
        *u = if before > 0 {
            let scaled = (orig as f64 * after as f64 / before as f64).round() as u64;
            if after > 0 {
                scaled.max(1)
            } else {
                0
            }
        } else if old_total_pairs > 0 {
            // no co-occurrences to measure the row's rate: use the slice-wide one
            (orig as f64 * new_total_pairs as f64 / old_total_pairs as f64).round() as u64
        } else {
            orig
        };
    }
    let total_tokens = unigram.iter().sum();
    Ok(SliceStats {
        cooc,
        unigram,
        total_tokens,
        window: stats.window,
    })
}
