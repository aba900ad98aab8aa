//! Positive pointwise mutual information matrices, one per time slice.
//!
//! All logarithms are natural. An optional shift is subtracted from PMI
//! before clamping; it defaults to zero.

use std::io::{Read, Write};

use crate::binio::{self, get_f64, get_i64, get_u64, put_f64, put_i64, put_u32, put_u64};
use crate::corpus::{read_triplets, SliceStats};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sparse::CsrMatrix;

/// `log(count_wc * total / (count_w * count_c))`, or negative infinity when
/// the pair never co-occurs.
pub fn pmi_value(count_wc: u64, count_w: u64, count_c: u64, total: u64) -> Result<f64> {
    if count_wc == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    if count_w == 0 || count_c == 0 || total == 0 {
        return Err(Error::Domain(format!(
            "PMI undefined: pair count {count_wc} with unigram counts ({count_w}, {count_c}) and total {total}"
        )));
    }
    // ln(a) + ln(b) - ln(c) - ln(d) would lose the exact zero at ratio 1
    let num = count_wc as f64 * total as f64;
    let den = count_w as f64 * count_c as f64;
    Ok((num / den).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PpmiMatrix {
    pub values: CsrMatrix<f64>,
    pub slice_label: i64,
}

const PPMI_MAGIC: &[u8; 4] = b"TVPM";
const PPMI_VERSION: u32 = 1;

impl PpmiMatrix {
    pub fn dim(&self) -> usize {
        self.values.dim()
    }

    pub fn nnz(&self) -> usize {
        self.values.nnz()
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(PPMI_MAGIC)?;
        put_u32(w, PPMI_VERSION)?;
        put_u64(w, self.dim() as u64)?;
        put_i64(w, self.slice_label)?;
        put_u64(w, self.nnz() as u64)?;
        for (r, c, v) in self.values.triplets() {
            put_u32(w, r)?;
            put_u32(w, c)?;
            put_f64(w, v)?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        const WHAT: &str = "PPMI file";
        binio::expect_magic(r, PPMI_MAGIC, WHAT)?;
        binio::expect_version(r, PPMI_VERSION, WHAT)?;
        let v = binio::len_from_u64(get_u64(r)?, WHAT)?;
        let slice_label = get_i64(r)?;
        let nnz = binio::len_from_u64(get_u64(r)?, WHAT)?;
        let triplets = read_triplets(r, v, nnz, get_f64, WHAT)?;
        binio::expect_eof(r, WHAT)?;
        Ok(PpmiMatrix {
            values: CsrMatrix::from_sorted_triplets(v, triplets),
            slice_label,
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

    /// `row col value` lines for debugging.
    pub fn to_text_triplets(&self) -> String {
        let mut out = String::new();
        for (r, c, v) in self.values.triplets() {
            out.push_str(&format!("{r} {c} {v:.17e}\n"));
        }
        out
    }
}

/// Builds `max(PMI - shift, 0)` over the stored co-occurrences.
pub fn build_ppmi(stats: &SliceStats, slice_label: i64) -> Result<PpmiMatrix> {
    build_ppmi_shifted(stats, slice_label, 0.0)
}

pub fn build_ppmi_shifted(stats: &SliceStats, slice_label: i64, shift: f64) -> Result<PpmiMatrix> {
    if stats.cooc.dim() != stats.unigram.len() {
        return Err(Error::ShapeMismatch("co-occurrence and unigram sizes differ".into()));
    }
    let mut err = None;
    let values = stats.cooc.filter_map(|r, c, n| {
        match pmi_value(
            n,
            stats.unigram[r as usize],
            stats.unigram[c as usize],
            stats.total_tokens,
        ) {
            Ok(p) => Some(p - shift).filter(|&x| x > 0.0),
            Err(e) => {
                err.get_or_insert(e);
                None
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(PpmiMatrix { values, slice_label }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PpmiSequence {
    matrices: Vec<PpmiMatrix>,
}

impl PpmiSequence {
    pub fn new(matrices: Vec<PpmiMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty PPMI sequence".into()))?;
        let v = first.dim();
        if matrices.iter().any(|m| m.dim() != v) {
            return Err(Error::ShapeMismatch("PPMI matrices disagree on vocabulary size".into()));
        }
        if matrices.windows(2).any(|w| w[0].slice_label >= w[1].slice_label) {
            return Err(Error::InvalidArgument(
                "PPMI slice labels must be strictly increasing".into(),
            ));
        }
        Ok(PpmiSequence { matrices })
    }

    /// Builds every slice's PPMI matrix, in parallel when enabled.
    pub fn from_stats(stats: &[SliceStats], labels: &[i64], shift: f64, exec: Exec) -> Result<Self> {
        if stats.len() != labels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} stats for {} labels",
                stats.len(),
                labels.len()
            )));
        }
        let built = exec.map_indexed(stats.len(), |t| build_ppmi_shifted(&stats[t], labels[t], shift));
        Self::new(built.into_iter().collect::<Result<_>>()?)
    }

    pub fn vocab_size(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn get(&self, t: usize) -> &PpmiMatrix {
        &self.matrices[t]
    }

    pub fn matrices(&self) -> &[PpmiMatrix] {
        &self.matrices
    }

    pub fn labels(&self) -> Vec<i64> {
        self.matrices.iter().map(|m| m.slice_label).collect()
    }
}
