//! Run configuration: `key = value` files with flag overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dynembed::solver::{Combine, SolverConfig};
use dynembed::Exec;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dw2v,
    Sw2v,
    Tw2v,
    Aw2v,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dw2v => "dw2v",
            Method::Sw2v => "sw2v",
            Method::Tw2v => "tw2v",
            Method::Aw2v => "aw2v",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dw2v" => Ok(Method::Dw2v),
            "sw2v" => Ok(Method::Sw2v),
            "tw2v" => Ok(Method::Tw2v),
            "aw2v" => Ok(Method::Aw2v),
            other => Err(format!("unknown method {other:?} (expected dw2v, sw2v, tw2v or aw2v)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub out: PathBuf,
    pub min_count: u64,
    pub window: u32,
    pub shift: f64,
    pub method: Method,
    pub combine: Combine,
    pub tw2v_k: usize,
    pub sequential: bool,
    pub solver: SolverConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: None,
            stopwords: None,
            out: PathBuf::from("dynembed-out"),
            min_count: 200,
            window: 5,
            shift: 0.0,
            method: Method::Dw2v,
            combine: Combine::Average,
            tw2v_k: dynembed::eval::DEFAULT_TW2V_K,
            sequential: false,
            solver: SolverConfig::default(),
        }
    }
}

pub const KEYS: &[&str] = &[
    "corpus",
    "stopwords",
    "out",
    "min_count",
    "window",
    "shift",
    "method",
    "combine",
    "tw2v_k",
    "sequential",
    "dim",
    "lambda",
    "tau",
    "gamma",
    "epochs",
    "block_rows",
    "init_scale",
    "seed",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, Failure>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| Failure::Usage(format!("invalid value {value:?} for {key}: {e}")))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Failure> {
        let s = &mut self.solver;
        match key {
            "corpus" => self.corpus = Some(PathBuf::from(value)),
            "stopwords" => self.stopwords = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "min_count" => self.min_count = parse(key, value)?,
            "window" => self.window = parse(key, value)?,
            "shift" => self.shift = parse(key, value)?,
            "method" => self.method = parse(key, value)?,
            "combine" => self.combine = parse(key, value)?,
            "tw2v_k" => self.tw2v_k = parse(key, value)?,
            "sequential" => self.sequential = parse(key, value)?,
            "dim" => s.dim = parse(key, value)?,
            "lambda" => s.lambda = parse(key, value)?,
            "tau" => s.tau = parse(key, value)?,
            "gamma" => s.gamma = parse(key, value)?,
            "epochs" => s.epochs = parse(key, value)?,
            "block_rows" => s.block_rows = parse(key, value)?,
            "init_scale" => s.init_scale = parse(key, value)?,
            "seed" => s.seed = parse(key, value)?,
            other => {
                return Err(Failure::Usage(format!(
                    "unknown config key {other:?} (known keys: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<(), Failure> {
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::Usage(format!(
                    "{}:{}: expected key = value",
                    origin.display(),
                    n + 1
                )));
            };
            let key = key.trim();
            if seen.contains(&key) {
                return Err(Failure::Usage(format!(
                    "{}:{}: duplicate key {key}",
                    origin.display(),
                    n + 1
                )));
            }
            seen.push(key);
            self.set(key, value.trim())
                .map_err(|e| Failure::Usage(format!("{}:{}: {e}", origin.display(), n + 1)))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), Failure> {
        self.solver.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        if self.min_count == 0 {
            return Err(Failure::Usage("min_count must be at least 1".into()));
        }
        if self.window == 0 {
            return Err(Failure::Usage("window must be at least 1".into()));
        }
        if !self.shift.is_finite() || self.shift < 0.0 {
            return Err(Failure::Usage("shift must be finite and non-negative".into()));
        }
        if self.tw2v_k == 0 {
            return Err(Failure::Usage("tw2v_k must be at least 1".into()));
        }
        Ok(())
    }

    pub fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }

    pub fn stats_dir(&self) -> PathBuf {
        self.out.join("stats")
    }

    pub fn ppmi_dir(&self) -> PathBuf {
        self.out.join("ppmi")
    }

    pub fn vocab_path(&self) -> PathBuf {
        self.out.join("vocab.txt")
    }

    pub fn embeddings_dir(&self) -> PathBuf {
        self.out.join("embeddings")
    }

    pub fn embedding_path(&self, name: &str) -> PathBuf {
        self.embeddings_dir().join(format!("{name}.tvem"))
    }

    pub fn checkpoint_path(&self) -> PathBuf {
        self.out.join("checkpoint.tvck")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut c = RunConfig::default();
        c.apply_text(
            "# run\ndim = 8\nmethod=aw2v  # baseline\nwindow = 2\n",
            Path::new("x.conf"),
        )
        .unwrap();
        assert_eq!(c.solver.dim, 8);
        assert_eq!(c.method, Method::Aw2v);
        c.set("dim", "4").unwrap();
        assert_eq!(c.solver.dim, 4);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let p = Path::new("x.conf");
        let mut c = RunConfig::default();
        assert!(matches!(c.apply_text("colour = red\n", p), Err(Failure::Usage(_))));
        assert!(matches!(c.apply_text("dim = 3\ndim = 4\n", p), Err(Failure::Usage(_))));
        assert!(matches!(c.apply_text("dim\n", p), Err(Failure::Usage(_))));
        assert!(matches!(c.set("method", "w2v"), Err(Failure::Usage(_))));
        c.set("lambda", "-1").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn every_key_is_settable() {
        let mut c = RunConfig::default();
        let values = [
            "c", "s", "o", "1", "2", "0.5", "tw2v", "u", "7", "true", "3", "1", "2", "3", "4", "5", "0.1", "9",
        ];
        for (k, v) in KEYS.iter().zip(values) {
            c.set(k, v).unwrap();
        }
        c.validate().unwrap();
    }
}
