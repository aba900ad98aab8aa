//! Comparison systems built on the same factorization engine: a static
//! embedding from pooled counts, independently factorized slices, and two
//! post-hoc alignments of those slices (global orthogonal Procrustes chain
//! and per-query local linear maps).

use log::warn;
use nalgebra::{DMatrix, SVD};
use ndarray::{Array1, Array2, ArrayView1};

use crate::corpus::SliceStats;
use crate::error::{Error, Result};
use crate::eval::{nearest_neighbors, row_is_zero};
use crate::exec::Exec;
use crate::ppmi::{build_ppmi, PpmiMatrix, PpmiSequence};
use crate::seed;
use crate::solver::{final_embedding, train_with, Combine, SolverConfig};

/// Independently trained (unaligned) per-slice embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct PerSliceEmbeddings {
    pub matrices: Vec<Array2<f64>>,
    pub labels: Vec<i64>,
}

/// Orthogonal `d x d` map applied on the right: `X -> X R`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMap {
    pub r: Array2<f64>,
}

impl OrthogonalMap {
    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        x.dot(&self.r)
    }

    /// `|R^T R - I|_F`.
    pub fn orthogonality_error(&self) -> f64 {
        let d = self.r.nrows();
        let g = self.r.t().dot(&self.r) - Array2::<f64>::eye(d);
        g.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn to_na(m: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

fn from_na(m: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Factorizes one PPMI matrix with the dynamic solver restricted to a single
/// slice (no smoothing) and returns the averaged factor.
pub fn factorize_single(y: &PpmiMatrix, config: &SolverConfig) -> Result<Array2<f64>> {
    let seq = PpmiSequence::new(vec![y.clone()])?;
    let cfg = SolverConfig {
        tau: 0.0,
        ..config.clone()
    };
    let trained = train_with(&seq, &cfg, Exec::Sequential, None)?;
    Ok(final_embedding(&trained, Combine::Average).remove(0))
}

/// Factorizes every slice independently. Each slice gets its own sub-seed,
/// so slices do not share an initial frame.
pub fn factorize_per_slice(y: &PpmiSequence, config: &SolverConfig, exec: Exec) -> Result<PerSliceEmbeddings> {
    let results = exec.map_indexed(y.len(), |t| {
        let cfg = SolverConfig {
            seed: seed::subseed(config.seed, &format!("slice/{t}")),
            ..config.clone()
        };
        factorize_single(y.get(t), &cfg)
    });
    Ok(PerSliceEmbeddings {
        matrices: results.into_iter().collect::<Result<_>>()?,
        labels: y.labels(),
    })
}

/// Static embedding: PPMI of counts pooled over all slices, factorized once.
pub fn train_static(pooled: &SliceStats, config: &SolverConfig) -> Result<Array2<f64>> {
    let y = build_ppmi(pooled, 0)?;
    factorize_single(&y, config)
}

/// `argmin_{R orthogonal} |source R - target|_F` via the SVD of
/// `source^T target = P S Q^T`, giving `R = P Q^T`. Reflections are allowed.
pub fn procrustes_align(source: &Array2<f64>, target: &Array2<f64>) -> Result<OrthogonalMap> {
    if source.dim() != target.dim() {
        return Err(Error::ShapeMismatch(format!(
            "source is {:?}, target is {:?}",
            source.dim(),
            target.dim()
        )));
    }
    let m = to_na(&source.t().dot(target));
    let svd = SVD::new(m, true, true);
    let (p, qt) = match (&svd.u, &svd.v_t) {
        (Some(p), Some(qt)) => (p, qt),
        _ => return Err(Error::Domain("SVD did not produce singular vectors".into())),
    };
    let s = &svd.singular_values;
    let smax = s.max();
    let smin = s.min();
    if smax == 0.0 || smin <= smax * 1e-12 * s.len() as f64 {
        warn!("cross-covariance is rank deficient; the Procrustes map is not unique");
    }
    Ok(OrthogonalMap { r: from_na(&(p * qt)) })
}

/// Aligned slices plus the map applied to each (identity for the first).
#[derive(Debug, Clone)]
pub struct AlignedSequence {
    pub matrices: Vec<Array2<f64>>,
    pub maps: Vec<OrthogonalMap>,
    pub labels: Vec<i64>,
}

/// Anchors the first slice and maps each later slice onto the already
/// aligned previous one.
pub fn align_sequence(per_slice: &PerSliceEmbeddings) -> Result<AlignedSequence> {
    let first = per_slice
        .matrices
        .first()
        .ok_or_else(|| Error::InvalidArgument("no slices to align".into()))?;
    let d = first.ncols();
    let mut matrices = vec![first.clone()];
    let mut maps = vec![OrthogonalMap { r: Array2::eye(d) }];
    for m in &per_slice.matrices[1..] {
        let map = procrustes_align(m, matrices.last().expect("nonempty"))?;
        matrices.push(map.apply(m));
        maps.push(map);
    }
    Ok(AlignedSequence {
        matrices,
        maps,
        labels: per_slice.labels.clone(),
    })
}

/// Maps the query word's source vector into the target space with a linear
/// map fitted by least squares on its `k` nearest source-slice neighbors
/// (the query itself included), using only words with nonzero vectors in
/// both slices.
pub fn local_linear_map(query: usize, source: &Array2<f64>, target: &Array2<f64>, k: usize) -> Result<Array1<f64>> {
    if source.dim() != target.dim() {
        return Err(Error::ShapeMismatch("source and target slices differ in shape".into()));
    }
    if query >= source.nrows() {
        return Err(Error::InvalidArgument(format!("word {query} out of range")));
    }
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let q = source.row(query);
    if q.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroVector);
    }
    let usable = (0..source.nrows())
        .filter(|&w| !row_is_zero(source, w) && !row_is_zero(target, w))
        .count();
    if usable < k {
        return Err(Error::NotEnoughNeighbors {
            needed: k,
            found: usable,
        });
    }
    let missing: std::collections::HashSet<usize> = (0..source.nrows()).filter(|&w| row_is_zero(target, w)).collect();
    let mut neighbors: Vec<usize> = Vec::with_capacity(k);
    if !row_is_zero(target, query) {
        neighbors.push(query);
    }
    let rest = nearest_neighbors(q, source, source.nrows(), &|w| w == query || missing.contains(&w));
    neighbors.extend(rest.iter().map(|&(w, _)| w).take(k - neighbors.len()));

    let x = DMatrix::from_fn(neighbors.len(), source.ncols(), |i, j| source[[neighbors[i], j]]);
    let z = DMatrix::from_fn(neighbors.len(), target.ncols(), |i, j| target[[neighbors[i], j]]);
    let m = fit_linear_map(&x, &z);
    Ok(apply_row(q, &m))
}

/// Least squares `argmin_M |X M - Z|_F`, with a 1e-8 ridge only when `X`
/// lacks full column rank.
pub fn fit_linear_map(x: &DMatrix<f64>, z: &DMatrix<f64>) -> DMatrix<f64> {
    let d = x.ncols();
    let svd = SVD::new(x.clone(), true, true);
    let s = &svd.singular_values;
    let full_rank = x.nrows() >= d && s.min() > s.max() * 1e-12 * d as f64;
    if full_rank {
        if let Ok(m) = svd.solve(z, 0.0) {
            return m;
        }
    }
    warn!("neighborhood matrix is rank deficient; adding a 1e-8 ridge");
    let xtx = x.transpose() * x + DMatrix::identity(d, d) * 1e-8;
    let xtz = x.transpose() * z;
    xtx.cholesky()
        .expect("ridge makes the system positive definite")
        .solve(&xtz)
}

fn apply_row(v: ArrayView1<f64>, m: &DMatrix<f64>) -> Array1<f64> {
    Array1::from_shape_fn(m.ncols(), |j| v.iter().enumerate().map(|(i, x)| x * m[(i, j)]).sum())
}
