//! Joint temporal factorization by block coordinate descent.
//!
//! Each slice `t` has two factors `U(t)` and `W(t)` (both `V x d`). The
//! minimized objective is
//!
//! ```text
//!   1/2 sum_t |Y(t) - U(t) W(t)^T|^2
//! + gamma/2 sum_t |U(t) - W(t)|^2
//! + lambda/2 sum_t (|U(t)|^2 + |W(t)|^2)
//! + tau/2 sum_{t>1} (|U(t-1) - U(t)|^2 + |W(t-1) - W(t)|^2)
//! ```
//!
//! With every other block fixed, the objective restricted to a set of rows
//! of one factor is a ridge regression whose normal equations share one
//! `d x d` matrix `A`, so each block update is an exact minimizer.

use std::io::{Read, Write};
use std::ops::Range;

use log::warn;
use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2, Zip};
use rand::Rng;
use rand_distr::Uniform;
use serde::{Deserialize, Serialize};

use crate::binio::{self, get_f64, get_i64, get_u64, put_f64, put_i64, put_u32, put_u64};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ppmi::{PpmiMatrix, PpmiSequence};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Embedding dimension `d`.
    pub dim: usize,
    pub lambda: f64,
    pub tau: f64,
    pub gamma: f64,
    pub epochs: usize,
    pub block_rows: usize,
    pub seed: u64,
    pub init_scale: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dim: 50,
            lambda: 10.0,
            tau: 50.0,
            gamma: 50.0,
            epochs: 5,
            block_rows: 1024,
            seed: 0,
            init_scale: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.dim < 1 {
            return bad("embedding dimension must be at least 1".into());
        }
        if self.epochs < 1 {
            return bad("epochs must be at least 1".into());
        }
        if self.block_rows < 1 {
            return bad("block_rows must be at least 1".into());
        }
        for (name, x) in [("lambda", self.lambda), ("tau", self.tau), ("gamma", self.gamma)] {
            if !x.is_finite() || x < 0.0 {
                return bad(format!("{name} must be finite and non-negative, got {x}"));
            }
        }
        if !self.init_scale.is_finite() || self.init_scale < 0.0 {
            return bad(format!(
                "init_scale must be finite and non-negative, got {}",
                self.init_scale
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    U,
    W,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSequence {
    pub u: Vec<Array2<f64>>,
    pub w: Vec<Array2<f64>>,
    pub config: SolverConfig,
    pub labels: Vec<i64>,
}

impl EmbeddingSequence {
    pub fn num_slices(&self) -> usize {
        self.u.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.u[0].nrows()
    }

    pub fn dim(&self) -> usize {
        self.u[0].ncols()
    }

    pub fn factor(&self, which: Factor) -> &[Array2<f64>] {
        match which {
            Factor::U => &self.u,
            Factor::W => &self.w,
        }
    }

    fn factor_mut(&mut self, which: Factor) -> &mut [Array2<f64>] {
        match which {
            Factor::U => &mut self.u,
            Factor::W => &mut self.w,
        }
    }

    pub fn check_shapes(&self, y: &PpmiSequence) -> Result<()> {
        let t = self.u.len();
        if t == 0 || self.w.len() != t || y.len() != t || self.labels.len() != t {
            return Err(Error::ShapeMismatch(format!(
                "{} U, {} W, {} labels and {} PPMI slices",
                self.u.len(),
                self.w.len(),
                self.labels.len(),
                y.len()
            )));
        }
        let shape = (y.vocab_size(), self.u[0].ncols());
        if self.u.iter().chain(&self.w).any(|m| m.dim() != shape) {
            return Err(Error::ShapeMismatch(format!(
                "every factor must be {}x{}",
                shape.0, shape.1
            )));
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.u.iter().chain(&self.w).all(|m| m.iter().all(|x| x.is_finite()))
    }
}

/// Uniform in `[-init_scale/sqrt(d), init_scale/sqrt(d)]`, with separate
/// random streams for `U` and `W`. Every slice starts from the same draw, so
/// the smoothing penalty is zero at initialization and all slices share one
/// latent frame from the first sweep on.
pub fn init_embeddings(vocab_size: usize, labels: &[i64], config: &SolverConfig) -> EmbeddingSequence {
    let d = config.dim;
    let bound = config.init_scale / (d as f64).sqrt();
    let draw = |component: &str| -> Vec<Array2<f64>> {
        let frame = if bound == 0.0 {
            Array2::zeros((vocab_size, d))
        } else {
            let mut rng = seed::rng_for(config.seed, component);
            let dist = Uniform::new_inclusive(-bound, bound).expect("finite bound");
            Array2::from_shape_simple_fn((vocab_size, d), || rng.sample(dist))
        };
        vec![frame; labels.len()]
    };
    EmbeddingSequence {
        u: draw("init/U"),
        w: draw("init/W"),
        config: config.clone(),
        labels: labels.to_vec(),
    }
}

fn frob_sq(m: &ArrayView2<f64>) -> f64 {
    m.iter().map(|x| x * x).sum()
}

fn diff_frob_sq(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    let mut acc = 0.0;
    Zip::from(a).and(b).for_each(|x, y| acc += (x - y) * (x - y));
    acc
}

/// `sum_{(i,j) in nnz(Y)} y_ij <u_i, w_j>`.
fn sparse_inner(y: &PpmiMatrix, u: &Array2<f64>, w: &Array2<f64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..y.dim() {
        let (cols, vals) = y.values.row(i);
        if cols.is_empty() {
            continue;
        }
        let ui = u.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            acc += v * ui.dot(&w.row(j as usize));
        }
    }
    acc
}

/// `|Y - U W^T|_F^2` in `O(nnz d + V d^2)` via
/// `|Y|^2 - 2 <Y, U W^T> + <U^T U, W^T W>`.
pub fn residual_sq(y: &PpmiMatrix, u: &Array2<f64>, w: &Array2<f64>) -> f64 {
    let gu = u.t().dot(u);
    let gw = w.t().dot(w);
    let cross: f64 = Zip::from(&gu).and(&gw).fold(0.0, |acc, a, b| acc + a * b);
    y.values.frobenius_sq() - 2.0 * sparse_inner(y, u, w) + cross
}

/// Full relaxed objective.
pub fn objective(seq: &EmbeddingSequence, y: &PpmiSequence) -> Result<f64> {
    objective_with(seq, y, Exec::default())
}

pub fn objective_with(seq: &EmbeddingSequence, y: &PpmiSequence, exec: Exec) -> Result<f64> {
    seq.check_shapes(y)?;
    let c = &seq.config;
    let terms = exec.map_indexed(seq.num_slices(), |t| {
        let (u, w) = (&seq.u[t], &seq.w[t]);
        let mut v = 0.5 * residual_sq(y.get(t), u, w);
        v += 0.5 * c.gamma * diff_frob_sq(u, w);
        v += 0.5 * c.lambda * (frob_sq(&u.view()) + frob_sq(&w.view()));
        if t > 0 {
            v += 0.5 * c.tau * (diff_frob_sq(&seq.u[t - 1], u) + diff_frob_sq(&seq.w[t - 1], w));
        }
        v
    });
    Ok(terms.into_iter().sum())
}

/// Gradient of `f(U) = 1/2 |Y - U U^T|_F^2` for symmetric `Y`:
/// `-2 Y U + 2 U (U^T U)`.
pub fn residual_gradient(u: &Array2<f64>, y: &PpmiMatrix) -> Result<Array2<f64>> {
    if u.nrows() != y.dim() {
        return Err(Error::ShapeMismatch(format!(
            "factor has {} rows, PPMI matrix is {}x{}",
            u.nrows(),
            y.dim(),
            y.dim()
        )));
    }
    let gram = u.t().dot(u);
    let mut g = u.dot(&gram) * 2.0;
    for i in 0..y.dim() {
        let (cols, vals) = y.values.row(i);
        let mut gi = g.row_mut(i);
        for (&j, &v) in cols.iter().zip(vals) {
            gi.scaled_add(-2.0 * v, &u.row(j as usize));
        }
    }
    Ok(g)
}

/// Number of temporal neighbors of slice `t` among `n` slices.
fn neighbor_count(t: usize, n: usize) -> usize {
    usize::from(t > 0) + usize::from(t + 1 < n)
}

enum Solve {
    Cholesky(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    PseudoInverse(DMatrix<f64>),
}

/// The shared `d x d` system for updating one factor at one slice.
struct FactorSystem<'a> {
    a: DMatrix<f64>,
    solve: Solve,
    /// Opposite factor at this slice.
    opposite: &'a Array2<f64>,
    /// Same factor at the neighboring slices.
    prev: Option<&'a Array2<f64>>,
    next: Option<&'a Array2<f64>>,
    y: &'a PpmiMatrix,
    gamma: f64,
    tau: f64,
}

impl<'a> FactorSystem<'a> {
    fn new(state: &'a EmbeddingSequence, y: &'a PpmiSequence, t: usize, which: Factor) -> Self {
        let c = &state.config;
        let n = state.num_slices();
        let same = state.factor(which);
        let opposite = match which {
            Factor::U => &state.w[t],
            Factor::W => &state.u[t],
        };
        let d = opposite.ncols();
        let shift = c.gamma + c.lambda + neighbor_count(t, n) as f64 * c.tau;
        let gram = opposite.t().dot(opposite);
        let a = DMatrix::from_fn(d, d, |i, j| gram[[i, j]] + if i == j { shift } else { 0.0 });
        let solve = match a.clone().cholesky() {
            Some(ch) => Solve::Cholesky(ch),
            None => {
                warn!("ridge system at slice {t} is singular; using the least-norm solution");
                Solve::PseudoInverse(a.clone().pseudo_inverse(1e-12).expect("non-negative epsilon"))
            }
        };
        FactorSystem {
            a,
            solve,
            opposite,
            prev: (t > 0).then(|| &same[t - 1]),
            next: (t + 1 < n).then(|| &same[t + 1]),
            y: y.get(t),
            gamma: c.gamma,
            tau: c.tau,
        }
    }

    /// Right-hand side rows, transposed to `d x b`.
    fn rhs(&self, rows: &Range<usize>) -> DMatrix<f64> {
        let d = self.opposite.ncols();
        let mut bt = DMatrix::zeros(d, rows.len());
        for (k, i) in rows.clone().enumerate() {
            let mut col = bt.column_mut(k);
            let (cols, vals) = self.y.values.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let fj = self.opposite.row(j as usize);
                for (x, f) in col.iter_mut().zip(fj.iter()) {
                    *x += v * f;
                }
            }
            let fi = self.opposite.row(i);
            for (x, f) in col.iter_mut().zip(fi.iter()) {
                *x += self.gamma * f;
            }
            for nb in [self.prev, self.next].into_iter().flatten() {
                for (x, s) in col.iter_mut().zip(nb.row(i).iter()) {
                    *x += self.tau * s;
                }
            }
        }
        bt
    }

    fn solve_block(&self, rows: Range<usize>) -> BlockUpdate {
        let bt = self.rhs(&rows);
        let xt = match &self.solve {
            Solve::Cholesky(ch) => ch.solve(&bt),
            Solve::PseudoInverse(p) => p * &bt,
        };
        // A is symmetric, so (X A - B)^T = A X^T - B^T
        let resid = (&self.a * &xt - &bt).norm();
        let scale = bt.norm();
        let normal_residual = if scale > 0.0 { resid / scale } else { resid };
        let values = Array2::from_shape_fn((rows.len(), xt.nrows()), |(r, c)| xt[(c, r)]);
        BlockUpdate {
            rows,
            values,
            normal_residual,
        }
    }
}

/// New values for a contiguous row block of one factor.
#[derive(Debug, Clone)]
pub struct BlockUpdate {
    pub rows: Range<usize>,
    pub values: Array2<f64>,
    /// `|X A - B|_F / |B|_F` (absolute when `B = 0`).
    pub normal_residual: f64,
}

/// Exact minimizer of the objective over `rows` of one factor at slice `t`,
/// everything else held fixed. The state is not modified.
pub fn ridge_update_block(
    rows: Range<usize>,
    which: Factor,
    t: usize,
    state: &EmbeddingSequence,
    y: &PpmiSequence,
) -> Result<BlockUpdate> {
    state.check_shapes(y)?;
    if t >= state.num_slices() {
        return Err(Error::InvalidArgument(format!("slice {t} out of range")));
    }
    if rows.start > rows.end || rows.end > state.vocab_size() {
        return Err(Error::InvalidArgument(format!(
            "row range {rows:?} outside 0..{}",
            state.vocab_size()
        )));
    }
    Ok(FactorSystem::new(state, y, t, which).solve_block(rows))
}

/// Writes a block update into the state.
pub fn apply_block(state: &mut EmbeddingSequence, which: Factor, t: usize, update: &BlockUpdate) {
    let target = &mut state.factor_mut(which)[t];
    target
        .slice_mut(ndarray::s![update.rows.clone(), ..])
        .assign(&update.values);
}

/// Reported to a training observer after each block is applied and at the
/// end of each epoch.
#[derive(Debug, Clone)]
pub enum TrainEvent {
    Block {
        epoch: usize,
        slice: usize,
        factor: Factor,
        rows: Range<usize>,
        normal_residual: f64,
    },
    EpochEnd {
        epoch: usize,
    },
}

pub type Observer<'o> = dyn FnMut(&TrainEvent, &EmbeddingSequence) + 'o;

/// Runs block coordinate descent sweeps over a fixed PPMI sequence.
pub struct Trainer<'a> {
    y: &'a PpmiSequence,
    config: SolverConfig,
    exec: Exec,
}

impl<'a> Trainer<'a> {
    pub fn new(y: &'a PpmiSequence, config: SolverConfig, exec: Exec) -> Result<Self> {
        config.validate()?;
        if y.is_empty() {
            return Err(Error::InvalidArgument("no PPMI slices to train on".into()));
        }
        Ok(Trainer { y, config, exec })
    }

    pub fn init(&self) -> EmbeddingSequence {
        init_embeddings(self.y.vocab_size(), &self.y.labels(), &self.config)
    }

    fn blocks(&self) -> Vec<Range<usize>> {
        let v = self.y.vocab_size();
        let b = self.config.block_rows;
        (0..v.div_ceil(b)).map(|k| k * b..((k + 1) * b).min(v)).collect()
    }

    /// One sweep: for each slice in order, all row blocks of `U(t)`, then
    /// all row blocks of `W(t)`.
    pub fn run_epoch(
        &self,
        state: &mut EmbeddingSequence,
        epoch: usize,
        mut observer: Option<&mut Observer<'_>>,
    ) -> Result<()> {
        state.check_shapes(self.y)?;
        let blocks = self.blocks();
        for t in 0..state.num_slices() {
            for which in [Factor::U, Factor::W] {
                // rows of one factor never read each other, so every block
                // can be solved against the same snapshot
                let updates = {
                    let system = FactorSystem::new(state, self.y, t, which);
                    self.exec.map_slice(&blocks, |rows| system.solve_block(rows.clone()))
                };
                for upd in updates {
                    if upd.values.iter().any(|x| !x.is_finite()) {
                        return Err(Error::NonFinite(format!(
                            "epoch {epoch}, slice {t}, factor {which:?}, rows {:?}",
                            upd.rows
                        )));
                    }
                    apply_block(state, which, t, &upd);
                    if let Some(obs) = observer.as_deref_mut() {
                        let ev = TrainEvent::Block {
                            epoch,
                            slice: t,
                            factor: which,
                            rows: upd.rows.clone(),
                            normal_residual: upd.normal_residual,
                        };
                        obs(&ev, state);
                    }
                }
            }
        }
        if let Some(obs) = observer {
            obs(&TrainEvent::EpochEnd { epoch }, state);
        }
        Ok(())
    }

    /// Continues from `state` for the epochs `start_epoch..config.epochs`.
    pub fn resume(
        &self,
        mut state: EmbeddingSequence,
        start_epoch: usize,
        mut observer: Option<&mut Observer<'_>>,
    ) -> Result<EmbeddingSequence> {
        for epoch in start_epoch..self.config.epochs {
            self.run_epoch(&mut state, epoch, observer.as_deref_mut())?;
        }
        Ok(state)
    }

    pub fn run(&self, observer: Option<&mut Observer<'_>>) -> Result<EmbeddingSequence> {
        self.resume(self.init(), 0, observer)
    }
}

pub fn train(
    y: &PpmiSequence,
    config: &SolverConfig,
    observer: Option<&mut Observer<'_>>,
) -> Result<EmbeddingSequence> {
    Trainer::new(y, config.clone(), Exec::default())?.run(observer)
}

pub fn train_with(
    y: &PpmiSequence,
    config: &SolverConfig,
    exec: Exec,
    observer: Option<&mut Observer<'_>>,
) -> Result<EmbeddingSequence> {
    Trainer::new(y, config.clone(), exec)?.run(observer)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    #[default]
    Average,
    U,
    W,
}

impl std::str::FromStr for Combine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" | "avg" => Ok(Combine::Average),
            "u" | "U" => Ok(Combine::U),
            "w" | "W" => Ok(Combine::W),
            _ => Err(Error::InvalidArgument(format!("unknown combine mode {s:?}"))),
        }
    }
}

/// The canonical per-slice embedding.
pub fn final_embedding(seq: &EmbeddingSequence, mode: Combine) -> Vec<Array2<f64>> {
    match mode {
        Combine::U => seq.u.clone(),
        Combine::W => seq.w.clone(),
        Combine::Average => seq.u.iter().zip(&seq.w).map(|(u, w)| (u + w) * 0.5).collect(),
    }
}

const EMB_MAGIC: &[u8; 4] = b"TVEM";
const EMB_VERSION: u32 = 1;

/// Per-slice embedding matrices with their slice labels.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingFile {
    pub labels: Vec<i64>,
    pub matrices: Vec<Array2<f64>>,
}

impl EmbeddingFile {
    pub fn new(labels: Vec<i64>, matrices: Vec<Array2<f64>>) -> Result<Self> {
        if labels.len() != matrices.len() || matrices.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} matrices",
                labels.len(),
                matrices.len()
            )));
        }
        let shape = matrices[0].dim();
        if matrices.iter().any(|m| m.dim() != shape) {
            return Err(Error::ShapeMismatch("embedding matrices differ in shape".into()));
        }
        Ok(EmbeddingFile { labels, matrices })
    }

    pub fn vocab_size(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].ncols()
    }

    pub fn slice_index(&self, label: i64) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(EMB_MAGIC)?;
        put_u32(w, EMB_VERSION)?;
        put_u64(w, self.vocab_size() as u64)?;
        put_u64(w, self.labels.len() as u64)?;
        put_u64(w, self.dim() as u64)?;
        for &l in &self.labels {
            put_i64(w, l)?;
        }
        for m in &self.matrices {
            for row in m.rows() {
                for &x in row {
                    put_f64(w, x)?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        const WHAT: &str = "embedding file";
        binio::expect_magic(r, EMB_MAGIC, WHAT)?;
        binio::expect_version(r, EMB_VERSION, WHAT)?;
        let v = binio::len_from_u64(get_u64(r)?, WHAT)?;
        let t = binio::len_from_u64(get_u64(r)?, WHAT)?;
        let d = binio::len_from_u64(get_u64(r)?, WHAT)?;
        let labels = (0..t).map(|_| get_i64(r)).collect::<std::io::Result<Vec<_>>>()?;
        let mut matrices = Vec::with_capacity(t);
        for _ in 0..t {
            let data = (0..v * d).map(|_| get_f64(r)).collect::<std::io::Result<Vec<_>>>()?;
            matrices.push(Array2::from_shape_vec((v, d), data).map_err(|e| Error::format(WHAT, e.to_string()))?);
        }
        binio::expect_eof(r, WHAT)?;
        Self::new(labels, matrices)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Self> {
        Self::read_from(&mut bytes)
    }

    /// Header `V T d`, then `word label v1 .. vd` per (word, slice), word-major,
    /// nine significant digits.
    pub fn to_text(&self, words: &[String]) -> Result<String> {
        if words.len() != self.vocab_size() {
            return Err(Error::ShapeMismatch(format!(
                "{} words for {} embedding rows",
                words.len(),
                self.vocab_size()
            )));
        }
        let mut out = format!("{} {} {}\n", self.vocab_size(), self.labels.len(), self.dim());
        for (i, word) in words.iter().enumerate() {
            for (label, m) in self.labels.iter().zip(&self.matrices) {
                out.push_str(word);
                out.push(' ');
                out.push_str(&label.to_string());
                for x in m.row(i) {
                    out.push_str(&format!(" {x:.8e}"));
                }
                out.push('\n');
            }
        }
        Ok(out)
    }
}

const CKPT_MAGIC: &[u8; 4] = b"TVCK";
const CKPT_VERSION: u32 = 1;

/// Full training state between epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub state: EmbeddingSequence,
    /// Number of completed epochs.
    pub epochs_done: usize,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Vec::new();
        let s = &self.state;
        let config = serde_json::to_vec(&s.config).expect("config serializes");
        w.extend_from_slice(CKPT_MAGIC);
        let put = |w: &mut Vec<u8>, x: u64| put_u64(w, x).expect("Vec write");
        put_u32(&mut w, CKPT_VERSION).expect("Vec write");
        put(&mut w, self.epochs_done as u64);
        put(&mut w, config.len() as u64);
        w.extend_from_slice(&config);
        put(&mut w, s.vocab_size() as u64);
        put(&mut w, s.num_slices() as u64);
        put(&mut w, s.dim() as u64);
        for &l in &s.labels {
            put_i64(&mut w, l).expect("Vec write");
        }
        for m in s.u.iter().chain(&s.w) {
            for row in m.rows() {
                for &x in row {
                    put_f64(&mut w, x).expect("Vec write");
                }
            }
        }
        w
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Self> {
        const WHAT: &str = "checkpoint";
        let r = &mut bytes;
        binio::expect_magic(r, CKPT_MAGIC, WHAT)?;
        binio::expect_version(r, CKPT_VERSION, WHAT)?;
        let epochs_done = binio::len_from_u64(get_u64(r)?, WHAT)?;
        let clen = binio::len_from_u64(get_u64(r)?, WHAT)?;
        if r.len() < clen {
            return Err(Error::format(WHAT, "truncated config"));
        }
        let config: SolverConfig = serde_json::from_slice(&r[..clen])?;
        *r = &r[clen..];
        let v = binio::len_from_u64(get_u64(r)?, WHAT)?;
        let t = binio::len_from_u64(get_u64(r)?, WHAT)?;
        let d = binio::len_from_u64(get_u64(r)?, WHAT)?;
        let labels = (0..t).map(|_| get_i64(r)).collect::<std::io::Result<Vec<_>>>()?;
        let mut mats = Vec::with_capacity(2 * t);
        for _ in 0..2 * t {
            let data = (0..v * d).map(|_| get_f64(r)).collect::<std::io::Result<Vec<_>>>()?;
            mats.push(Array2::from_shape_vec((v, d), data).map_err(|e| Error::format(WHAT, e.to_string()))?);
        }
        binio::expect_eof(r, WHAT)?;
        let w = mats.split_off(t);
        Ok(Checkpoint {
            state: EmbeddingSequence {
                u: mats,
                w,
                config,
                labels,
            },
            epochs_done,
        })
    }
}
