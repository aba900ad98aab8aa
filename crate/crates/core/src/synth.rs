//! Synthetic time-sliced corpus with a planted semantic shift.
//!
//! Every word has a latent unit vector in one of two communities. Documents
//! pick a random active word as their center and draw tokens with
//! probability proportional to `exp(kappa * x_w . x_center)`. At slice T/2
//! each probe word swaps community, and its successor (absent until then)
//! takes over the probe's early latent vector. The ground-truth testset asks
//! for stable words across slices and for the probe/successor role swap.

use ndarray::{Array1, Array2};
use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::corpus::{Document, TimeSlicedCorpus, Vocabulary};
use crate::error::{Error, Result};
use crate::eval::{AlignmentRecord, AlignmentTestset};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedShiftConfig {
    /// Stable words; probes and successors come on top.
    pub stable_words: usize,
    pub probes: usize,
    pub slices: usize,
    pub first_label: i64,
    pub docs_per_slice: usize,
    pub doc_len: usize,
    pub latent_dim: usize,
    /// Spread of words around their community center.
    pub spread: f64,
    pub kappa: f64,
    /// Stable-word queries in the testset.
    pub stable_queries: usize,
    pub seed: u64,
}

impl Default for PlantedShiftConfig {
    fn default() -> Self {
        PlantedShiftConfig {
            stable_words: 292,
            probes: 4,
            slices: 8,
            first_label: 1990,
            docs_per_slice: 2000,
            doc_len: 40,
            latent_dim: 12,
            spread: 1.0,
            kappa: 5.0,
            stable_queries: 200,
            seed: 0,
        }
    }
}

/// One ground-truth equivalence by word name.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedQuery {
    pub query_word: String,
    pub query_label: i64,
    pub target_label: i64,
    pub answer_word: String,
}

#[derive(Debug, Clone)]
pub struct PlantedShift {
    pub corpus: TimeSlicedCorpus,
    /// (probe, successor) name pairs.
    pub probes: Vec<(String, String)>,
    pub queries: Vec<PlantedQuery>,
}

impl PlantedShift {
    /// Resolves the queries against `vocab`; unknown words are dropped.
    pub fn testset(&self, vocab: &Vocabulary) -> AlignmentTestset {
        let mut records = Vec::new();
        let mut dropped = 0;
        for q in &self.queries {
            match (vocab.get(&q.query_word), vocab.get(&q.answer_word)) {
                (Some(a), Some(b)) => records.push(AlignmentRecord {
                    query_word: a as usize,
                    query_label: q.query_label,
                    target_label: q.target_label,
                    answer_word: b as usize,
                }),
                _ => dropped += 1,
            }
        }
        AlignmentTestset {
            name: "planted".into(),
            records,
            dropped,
        }
    }

    pub fn testset_csv(&self) -> String {
        let mut out = String::from("query_word,query_label,target_label,answer_word\n");
        for q in &self.queries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                q.query_word, q.query_label, q.target_label, q.answer_word
            ));
        }
        out
    }
}

fn unit_gaussian(dim: usize, rng: &mut impl Rng) -> Array1<f64> {
    let v: Array1<f64> = Array1::from_shape_simple_fn(dim, || rng.sample(StandardNormal));
    let n = v.dot(&v).sqrt();
    v / n
}

fn normalized(v: Array1<f64>) -> Array1<f64> {
    let n = v.dot(&v).sqrt();
    v / n
}

pub fn planted_shift(config: &PlantedShiftConfig) -> Result<PlantedShift> {
    let c = config;
    if c.slices < 2 || c.stable_words < 2 || c.latent_dim < 2 || c.doc_len < 2 || c.docs_per_slice == 0 {
        return Err(Error::InvalidArgument(
            "planted-shift corpus needs at least two slices, words and tokens".into(),
        ));
    }
    if !(c.kappa.is_finite() && c.spread.is_finite() && c.spread >= 0.0) {
        return Err(Error::InvalidArgument("kappa and spread must be finite".into()));
    }
    let mut rng = seed::rng_for(c.seed, "synth/latent");
    let centers = [
        unit_gaussian(c.latent_dim, &mut rng),
        unit_gaussian(c.latent_dim, &mut rng),
    ];
    let member = |comm: usize, rng: &mut rand_chacha::ChaCha8Rng| {
        normalized(&centers[comm] + &(unit_gaussian(c.latent_dim, rng) * c.spread))
    };

    // rows: stable words, then probes, then successors
    let v = c.stable_words + 2 * c.probes;
    let mut names: Vec<String> = (0..c.stable_words).map(|i| format!("w{i:03}")).collect();
    names.extend((0..c.probes).map(|i| format!("probe{i}")));
    names.extend((0..c.probes).map(|i| format!("succ{i}")));
    let mut early = Array2::<f64>::zeros((v, c.latent_dim));
    let mut late = Array2::<f64>::zeros((v, c.latent_dim));
    for w in 0..c.stable_words {
        let x = member(w % 2, &mut rng);
        early.row_mut(w).assign(&x);
        late.row_mut(w).assign(&x);
    }
    for p in 0..c.probes {
        let (probe, succ) = (c.stable_words + p, c.stable_words + c.probes + p);
        let before = member(p % 2, &mut rng);
        let after = member(1 - p % 2, &mut rng);
        early.row_mut(probe).assign(&before);
        late.row_mut(probe).assign(&after);
        late.row_mut(succ).assign(&before);
    }
    let switch = c.slices / 2;
    let labels: Vec<i64> = (0..c.slices as i64).map(|t| c.first_label + t).collect();

    let mut slices = Vec::with_capacity(c.slices);
    for t in 0..c.slices {
        let latent = if t < switch { &early } else { &late };
        let active: Vec<usize> = (0..v)
            .filter(|&w| t >= switch || w < c.stable_words + c.probes)
            .collect();
        let mut drng = seed::rng_for(c.seed, &format!("synth/docs/{t}"));
        let docs: Vec<Document> = (0..c.docs_per_slice)
            .map(|_| {
                let center = latent.row(active[drng.random_range(0..active.len())]);
                let weights: Vec<f64> = active
                    .iter()
                    .map(|&w| (c.kappa * latent.row(w).dot(&center)).exp())
                    .collect();
                let dist = WeightedIndex::new(&weights).expect("weights are positive and finite");
                (0..c.doc_len)
                    .map(|_| names[active[dist.sample(&mut drng)]].clone())
                    .collect()
            })
            .collect();
        slices.push(docs);
    }

    let mut qrng = seed::rng_for(c.seed, "synth/queries");
    let mut queries = Vec::new();
    for _ in 0..c.stable_queries {
        let w = qrng.random_range(0..c.stable_words);
        let t1 = qrng.random_range(0..c.slices);
        let mut t2 = qrng.random_range(0..c.slices - 1);
        if t2 >= t1 {
            t2 += 1;
        }
        queries.push(PlantedQuery {
            query_word: names[w].clone(),
            query_label: labels[t1],
            target_label: labels[t2],
            answer_word: names[w].clone(),
        });
    }
    for p in 0..c.probes {
        let (probe, succ) = (&names[c.stable_words + p], &names[c.stable_words + c.probes + p]);
        for t1 in 0..switch {
            for t2 in switch..c.slices {
                queries.push(PlantedQuery {
                    query_word: probe.clone(),
                    query_label: labels[t1],
                    target_label: labels[t2],
                    answer_word: succ.clone(),
                });
                queries.push(PlantedQuery {
                    query_word: succ.clone(),
                    query_label: labels[t2],
                    target_label: labels[t1],
                    answer_word: probe.clone(),
                });
            }
        }
    }

    Ok(PlantedShift {
        corpus: TimeSlicedCorpus::new(labels, slices)?,
        probes: (0..c.probes)
            .map(|p| {
                (
                    names[c.stable_words + p].clone(),
                    names[c.stable_words + c.probes + p].clone(),
                )
            })
            .collect(),
        queries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_vocabulary;

    fn small() -> PlantedShiftConfig {
        PlantedShiftConfig {
            stable_words: 20,
            probes: 2,
            slices: 4,
            docs_per_slice: 30,
            doc_len: 10,
            stable_queries: 10,
            ..PlantedShiftConfig::default()
        }
    }

    #[test]
    fn successors_absent_before_the_switch() {
        let s = planted_shift(&small()).unwrap();
        assert_eq!(s.corpus.labels(), &[1990, 1991, 1992, 1993]);
        for (t, docs) in s.corpus.slices().iter().enumerate() {
            assert_eq!(docs.len(), 30);
            let has_succ = docs.iter().flatten().any(|w| w.starts_with("succ"));
            assert_eq!(has_succ, t >= 2, "slice {t}");
        }
        assert_eq!(s.queries.len(), 10 + 2 * 2 * 2 * 2);
        assert!(s.queries.iter().all(|q| q.query_label != q.target_label));
    }

    #[test]
    fn deterministic_and_resolvable() {
        let a = planted_shift(&small()).unwrap();
        let b = planted_shift(&small()).unwrap();
        assert_eq!(a.corpus.slices(), b.corpus.slices());
        assert_eq!(a.queries, b.queries);
        let other = planted_shift(&PlantedShiftConfig { seed: 1, ..small() }).unwrap();
        assert_ne!(a.corpus.slices(), other.corpus.slices());

        let vocab = build_vocabulary(&a.corpus, 1).unwrap();
        let ts = a.testset(&vocab);
        assert_eq!(ts.records.len() + ts.dropped, a.queries.len());
        let parsed = AlignmentTestset::from_csv("p", a.testset_csv().as_bytes(), &vocab, false).unwrap();
        assert_eq!(parsed.records, ts.records);
    }

    #[test]
    fn rejects_degenerate_configs() {
        assert!(planted_shift(&PlantedShiftConfig { slices: 1, ..small() }).is_err());
        assert!(planted_shift(&PlantedShiftConfig {
            kappa: f64::NAN,
            ..small()
        })
        .is_err());
    }
}
