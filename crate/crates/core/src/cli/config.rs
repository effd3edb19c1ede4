//! Run configuration: a flat `key = value` file merged with command-line flags.
//!
//! Keys mirror the long flag names with `-` replaced by `_`:
//! `prior_moments`, `prior_hyper`, `cost`, `budget`, `n`, `n_max`, `scheme`,
//! `draws`, `seed`, `reps`, `search`, `format`, `theta`. Values use the same
//! syntax as the flags. Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::design::{elicit, NormalGammaPrior, SampleSizes, SearchMode};
use crate::error::{Error, Result};
use crate::lifetime::LogNormalParams;
use crate::scheme::SchemeParams;

pub const DEFAULT_DRAWS: usize = 1000;
pub const DEFAULT_SEED: u64 = 20_240_601;

pub(crate) const KEYS: [&str; 13] = [
    "prior_moments",
    "prior_hyper",
    "cost",
    "budget",
    "n",
    "n_max",
    "scheme",
    "draws",
    "seed",
    "reps",
    "search",
    "format",
    "theta",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("format must be table, csv or json, got '{other}'"))),
        }
    }
}

/// Prior given either by its moments or directly by hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorSpec {
    Moments { mean_mu: f64, var_mu: f64, mean_tau: f64, var_tau: f64 },
    Hyper { a1: f64, b1: f64, p2: f64, q2: f64 },
}

impl PriorSpec {
    pub fn resolve(&self) -> Result<NormalGammaPrior> {
        match *self {
            PriorSpec::Moments { mean_mu, var_mu, mean_tau, var_tau } => elicit(mean_mu, var_mu, mean_tau, var_tau),
            PriorSpec::Hyper { a1, b1, p2, q2 } => NormalGammaPrior::new(a1, b1, p2, q2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub prior: Option<PriorSpec>,
    /// `(c_f, c_t)`.
    pub cost: Option<(f64, f64)>,
    pub budgets: Vec<f64>,
    pub sizes: Option<SampleSizes>,
    pub scheme: Option<SchemeParams>,
    pub draws: usize,
    pub seed: u64,
    pub reps: u64,
    pub search: SearchMode,
    pub format: Format,
    pub theta: Option<LogNormalParams>,
}

/// Raw key/value pairs prior to typing.
#[derive(Debug, Clone, Default)]
pub struct RawConfig(BTreeMap<String, String>);

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("line {}: unknown key '{key}'", i + 1)));
            }
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key '{key}'", i + 1)));
            }
        }
        Ok(Self(map))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config '{}': {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies a command-line value. A flag for one of a pair of exclusive
    /// keys displaces a file value for the other.
    pub fn set(&mut self, key: &str, value: String) {
        for pair in [["prior_moments", "prior_hyper"], ["n", "n_max"]] {
            if pair.contains(&key) {
                for k in pair {
                    self.0.remove(k);
                }
            }
        }
        self.0.insert(key.to_string(), value);
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let prior = match (self.get("prior_moments"), self.get("prior_hyper")) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either prior_moments or prior_hyper, not both".into()));
            }
            (Some(v), None) => {
                let [mean_mu, var_mu, mean_tau, var_tau] = floats::<4>("prior-moments", v)?;
                Some(PriorSpec::Moments { mean_mu, var_mu, mean_tau, var_tau })
            }
            (None, Some(v)) => {
                let [a1, b1, p2, q2] = floats::<4>("prior-hyper", v)?;
                Some(PriorSpec::Hyper { a1, b1, p2, q2 })
            }
            (None, None) => None,
        };
        let cost = self.get("cost").map(|v| floats::<2>("cost", v)).transpose()?.map(|[f, t]| (f, t));
        let budgets = match self.get("budget") {
            Some(v) => float_list("budget", v)?,
            None => Vec::new(),
        };
        let sizes = match (self.get("n"), self.get("n_max")) {
            (Some(_), Some(_)) => return Err(Error::Config("give either n or n_max, not both".into())),
            (Some(v), None) => Some(SampleSizes::Fixed(scalar("n", v)?)),
            (None, Some(v)) => Some(SampleSizes::UpTo(scalar("n-max", v)?)),
            (None, None) => None,
        };
        let scheme = self.get("scheme").map(parse_scheme).transpose()?;
        let draws = self.get("draws").map(|v| scalar("draws", v)).transpose()?.unwrap_or(DEFAULT_DRAWS);
        if draws == 0 {
            return Err(Error::Config("draws must be at least 1".into()));
        }
        let seed = self.get("seed").map(|v| scalar("seed", v)).transpose()?.unwrap_or(DEFAULT_SEED);
        let reps = self.get("reps").map(|v| scalar("reps", v)).transpose()?.unwrap_or(1);
        if reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        let search = self.get("search").map(str::parse).transpose()?.unwrap_or_default();
        let format = self.get("format").map(str::parse).transpose()?.unwrap_or_default();
        let theta = self
            .get("theta")
            .map(|v| {
                let [mu, tau] = floats::<2>("theta", v)?;
                LogNormalParams::new(mu, tau).map_err(|e| Error::Config(format!("theta: {e}")))
            })
            .transpose()?;
        Ok(RunConfig { prior, cost, budgets, sizes, scheme, draws, seed, reps, search, format, theta })
    }
}

fn scalar<T: FromStr>(name: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{name}: cannot parse '{}'", v.trim())))
}

fn float_list(name: &str, v: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = v.split(',').map(|s| scalar::<f64>(name, s)).collect::<Result<_>>()?;
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("{name}: values must be finite")));
    }
    Ok(out)
}

fn floats<const K: usize>(name: &str, v: &str) -> Result<[f64; K]> {
    let list = float_list(name, v)?;
    list.try_into()
        .map_err(|l: Vec<f64>| Error::Config(format!("{name}: expected {K} comma-separated values, got {}", l.len())))
}

fn parse_scheme(v: &str) -> Result<SchemeParams> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 5 {
        return Err(Error::Config(format!("scheme: expected N,R,L,T1,T2, got '{v}'")));
    }
    SchemeParams::new(
        scalar("scheme N", parts[0])?,
        scalar("scheme R", parts[1])?,
        scalar("scheme L", parts[2])?,
        scalar("scheme T1", parts[3])?,
        scalar("scheme T2", parts[4])?,
    )
}
