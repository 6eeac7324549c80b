//! Experiment configuration: one flat TOML file, overridable from the CLI.
//!
//! ```toml
//! train = "usps/zip.train"     # or `data = "all.csv"` for a single pool
//! test = "usps/zip.test"
//! format = "csv"               # csv | sparse
//! methods = ["ancr", "ncr"]
//! lambda = 0.001               # or `lambdas = [1e-4, 1e-3, 1e-2]`
//! per_class_train = [50, 100]  # omit to use the provided training set whole
//! seed = 2019
//! repetitions = 10
//! out = "out/usps"
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::path::{Path, PathBuf};

use ancr::data::{FileFormat, PerClassTrain, Rescale, SplitSpec};
use ancr::solvers::{Method, SolverConfig, Stopping};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub format: Option<String>,
    pub sparse_dim: Option<usize>,
    pub rescale: Option<String>,
    pub methods: Option<Vec<String>>,
    pub lambda: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    pub rho: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub stopping: Option<String>,
    pub per_class_train: Option<Vec<usize>>,
    pub pca_dim: Option<usize>,
    pub seed: Option<u64>,
    pub repetitions: Option<usize>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

/// Command-line values that replace their config keys.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub method: Option<String>,
    pub lambda: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DatasetPaths {
    Separate { train: PathBuf, test: PathBuf },
    Single(PathBuf),
}

/// Validated experiment description.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetPaths,
    pub format: FileFormat,
    pub rescale: Rescale,
    pub methods: Vec<Method>,
    pub lambdas: Vec<f64>,
    pub rho: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub stopping: Stopping,
    /// Empty means the provided training set is used whole.
    pub per_class_train: Vec<usize>,
    pub pca_dim: Option<usize>,
    pub seed: u64,
    pub repetitions: usize,
    pub out: PathBuf,
    /// Worker threads for the query loop; `0` picks the core count.
    pub jobs: usize,
}

pub const DEFAULT_SEED: u64 = 2019;

impl ExperimentConfig {
    pub fn from_file(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let raw: RawConfig =
            toml::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_raw(raw, base, overrides)
    }

    pub fn from_raw(raw: RawConfig, base: &Path, ov: &Overrides) -> Result<Self> {
        let bad = |m: String| HarnessError::Config(m);
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };

        let dataset = match (raw.train, raw.test, raw.data) {
            (Some(train), Some(test), None) => DatasetPaths::Separate { train: resolve(train), test: resolve(test) },
            (None, None, Some(data)) => DatasetPaths::Single(resolve(data)),
            _ => return Err(bad("give either `train` and `test`, or `data`".into())),
        };

        let mut format: FileFormat = raw.format.as_deref().unwrap_or("csv").parse().map_err(|e: ancr::Error| bad(e.to_string()))?;
        if let Some(d) = raw.sparse_dim {
            match format {
                FileFormat::Sparse { .. } if d > 0 => format = FileFormat::Sparse { dim: Some(d) },
                FileFormat::Sparse { .. } => return Err(bad("sparse_dim must be at least 1".into())),
                FileFormat::Csv => return Err(bad("sparse_dim only applies to format = \"sparse\"".into())),
            }
        }
        let rescale: Rescale = raw.rescale.as_deref().unwrap_or("auto").parse().map_err(|e: ancr::Error| bad(e.to_string()))?;

        let method_names = match ov.method.clone() {
            Some(m) => vec![m],
            None => raw.methods.unwrap_or_else(|| vec!["ancr".into()]),
        };
        if method_names.is_empty() {
            return Err(bad("`methods` must list at least one method".into()));
        }
        let mut methods = Vec::new();
        for name in &method_names {
            let m: Method = name.parse().map_err(|e: ancr::Error| bad(e.to_string()))?;
            if methods.contains(&m) {
                return Err(bad(format!("method `{m}` listed twice")));
            }
            methods.push(m);
        }

        let defaults = SolverConfig::default();
        let lambdas = match (ov.lambda, raw.lambda, raw.lambdas) {
            (Some(l), _, _) => vec![l],
            (None, Some(_), Some(_)) => return Err(bad("give `lambda` or `lambdas`, not both".into())),
            (None, Some(l), None) => vec![l],
            (None, None, Some(ls)) => ls,
            (None, None, None) => vec![defaults.lambda],
        };
        if lambdas.is_empty() {
            return Err(bad("`lambdas` must not be empty".into()));
        }

        let stopping: Stopping = raw.stopping.as_deref().unwrap_or("primal").parse().map_err(|e: ancr::Error| bad(e.to_string()))?;
        let cfg = Self {
            dataset,
            format,
            rescale,
            methods,
            lambdas,
            rho: raw.rho.unwrap_or(defaults.rho),
            tol: raw.tol.unwrap_or(defaults.tol),
            max_iters: raw.max_iters.unwrap_or(defaults.max_iters),
            stopping,
            per_class_train: raw.per_class_train.unwrap_or_default(),
            pca_dim: raw.pca_dim,
            seed: ov.seed.or(raw.seed).unwrap_or(DEFAULT_SEED),
            repetitions: raw.repetitions.unwrap_or(1),
            out: ov.out.clone().or(raw.out.map(resolve)).unwrap_or_else(|| PathBuf::from("out")),
            jobs: ov.jobs.or(raw.jobs).unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(HarnessError::Config(m.into()));
        if self.methods.is_empty() {
            return bad("at least one method is required");
        }
        if self.lambdas.is_empty() {
            return bad("at least one lambda is required");
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1");
        }
        if self.per_class_train.contains(&0) {
            return bad("per_class_train entries must be at least 1");
        }
        if self.pca_dim == Some(0) {
            return bad("pca_dim must be at least 1");
        }
        for &l in &self.lambdas {
            self.solver(l).map_err(HarnessError::solver)?;
        }
        Ok(())
    }

    pub fn solver(&self, lambda: f64) -> ancr::Result<SolverConfig> {
        Ok(SolverConfig::new(lambda, self.rho, self.tol, self.max_iters)?.with_stopping(self.stopping))
    }

    /// Training-set sizes to run; `None` stands for the provided split.
    pub fn train_sizes(&self) -> Vec<Option<usize>> {
        if self.per_class_train.is_empty() {
            vec![None]
        } else {
            self.per_class_train.iter().map(|&n| Some(n)).collect()
        }
    }

    pub fn split_spec(&self, size: Option<usize>) -> SplitSpec {
        SplitSpec {
            per_class_train: size.map_or(PerClassTrain::Provided, PerClassTrain::Count),
            seed: self.seed,
            repetitions: self.repetitions,
        }
    }

    pub fn worker_threads(&self) -> usize {
        if self.jobs > 0 {
            self.jobs
        } else {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, ov: &Overrides) -> Result<ExperimentConfig> {
        ExperimentConfig::from_raw(toml::from_str(text).unwrap(), Path::new("/cfg"), ov)
    }

    #[test]
    fn defaults_and_path_resolution() {
        let cfg = parse("train = \"a.csv\"\ntest = \"/abs/b.csv\"\n", &Overrides::default()).unwrap();
        assert_eq!(
            cfg.dataset,
            DatasetPaths::Separate { train: "/cfg/a.csv".into(), test: "/abs/b.csv".into() }
        );
        assert_eq!(cfg.methods, vec![Method::Ancr]);
        assert_eq!(cfg.lambdas, vec![1e-3]);
        assert_eq!((cfg.rho, cfg.tol, cfg.max_iters), (1.0, 1e-6, 200));
        assert_eq!(cfg.train_sizes(), vec![None]);
        assert_eq!(cfg.seed, DEFAULT_SEED);
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides {
            seed: Some(9),
            out: Some("o".into()),
            jobs: Some(2),
            method: Some("crc".into()),
            lambda: Some(0.5),
        };
        let cfg = parse("data = \"d.csv\"\nmethods = [\"ancr\", \"ncr\"]\nlambdas = [1.0, 2.0]\nseed = 3\n", &ov).unwrap();
        assert_eq!(cfg.methods, vec![Method::Crc]);
        assert_eq!(cfg.lambdas, vec![0.5]);
        assert_eq!((cfg.seed, cfg.jobs), (9, 2));
        assert_eq!(cfg.out, PathBuf::from("o"));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let ov = Overrides::default();
        for text in [
            "train = \"a\"\n",
            "data = \"a\"\nmethods = []\n",
            "data = \"a\"\nmethods = [\"src\"]\n",
            "data = \"a\"\nlambdas = []\n",
            "data = \"a\"\nlambda = 1.0\nlambdas = [1.0]\n",
            "data = \"a\"\nlambda = -1.0\n",
            "data = \"a\"\nrepetitions = 0\n",
            "data = \"a\"\nper_class_train = [0]\n",
            "data = \"a\"\nsparse_dim = 4\n",
            "data = \"a\"\nstopping = \"dual\"\n",
        ] {
            assert!(matches!(parse(text, &ov), Err(HarnessError::Config(_))), "{text}");
        }
        assert!(toml::from_str::<RawConfig>("data = \"a\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn sparse_dim_is_carried() {
        let cfg = parse("data = \"a\"\nformat = \"sparse\"\nsparse_dim = 256\n", &Overrides::default()).unwrap();
        assert_eq!(cfg.format, FileFormat::Sparse { dim: Some(256) });
    }
}
