//! Run configuration: every tunable choice of the pipeline in one place,
//! serializable as plain `key=value` lines.

use std::fmt::Write as _;
use std::path::Path;

use crate::dcc::DccGrid;
use crate::error::{Error, Result};
use crate::fusion::VoterId;
use crate::imaging::Polarity;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Chain-code block grid: 10x10 (800 features) or 3x3 (72 features).
    pub dcc_grid: DccGrid,
    /// Neighbors consulted by both KNN voters.
    pub knn_k: usize,
    /// Ridge penalty of the linear voters.
    pub ridge: f64,
    /// L2-normalize chain-code vectors before classification.
    pub normalize_dcc: bool,
    /// L2-normalize run-length vectors before classification.
    pub normalize_rlc: bool,
    /// Voter priority used to break voting ties, highest first.
    pub tie_break_order: [VoterId; 4],
    /// Fraction of each class used for training.
    pub split_fraction: f64,
    /// Seed for every random choice (split shuffling, synthetic data).
    pub seed: u64,
    /// Whether ink is darker or lighter than the background.
    pub ink_polarity: Polarity,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dcc_grid: DccGrid::Fine,
            knn_k: 3,
            ridge: 1e-3,
            normalize_dcc: true,
            normalize_rlc: false,
            tie_break_order: VoterId::ALL,
            split_fraction: 0.8,
            seed: 42,
            ink_polarity: Polarity::InkDark,
        }
    }
}

pub const CONFIG_KEYS: [&str; 9] = [
    "dcc_grid",
    "knn_k",
    "ridge",
    "normalize_dcc",
    "normalize_rlc",
    "tie_break_order",
    "split_fraction",
    "seed",
    "ink_polarity",
];

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.knn_k == 0 {
            return Err(Error::Config("knn_k must be at least 1".into()));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::Config(format!("ridge must be finite and >= 0, got {}", self.ridge)));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(Error::Config(format!(
                "split_fraction must lie strictly between 0 and 1, got {}",
                self.split_fraction
            )));
        }
        let mut seen = [false; 4];
        for v in self.tie_break_order {
            if std::mem::replace(&mut seen[v.slot()], true) {
                return Err(Error::Config(format!(
                    "tie_break_order repeats voter {v}"
                )));
            }
        }
        Ok(())
    }

    /// Applies one `key=value` setting. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "dcc_grid" => self.dcc_grid = value.parse()?,
            "knn_k" => self.knn_k = parse_num(key, value)?,
            "ridge" => self.ridge = parse_num(key, value)?,
            "normalize_dcc" => self.normalize_dcc = parse_bool(key, value)?,
            "normalize_rlc" => self.normalize_rlc = parse_bool(key, value)?,
            "tie_break_order" => self.tie_break_order = parse_order(value)?,
            "split_fraction" => self.split_fraction = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "ink_polarity" => self.ink_polarity = value.parse()?,
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Parses `key=value` lines on top of the defaults. Blank lines and
    /// `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        config.apply_text(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got {line:?}", n + 1))
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        self.apply_text(&text).map_err(|e| e.in_file(path))
    }

    /// Canonical `key=value` form, one line per key in a fixed order.
    pub fn to_text(&self) -> String {
        let order: Vec<&str> = self.tie_break_order.iter().map(|v| v.name()).collect();
        let mut out = String::new();
        let _ = writeln!(out, "dcc_grid={}", self.dcc_grid);
        let _ = writeln!(out, "knn_k={}", self.knn_k);
        let _ = writeln!(out, "ridge={}", self.ridge);
        let _ = writeln!(out, "normalize_dcc={}", self.normalize_dcc);
        let _ = writeln!(out, "normalize_rlc={}", self.normalize_rlc);
        let _ = writeln!(out, "tie_break_order={}", order.join(","));
        let _ = writeln!(out, "split_fraction={}", self.split_fraction);
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "ink_polarity={}", self.ink_polarity);
        out
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "on" | "1" | "yes" => Ok(true),
        "false" | "off" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got {value:?}"))),
    }
}

pub fn parse_order(value: &str) -> Result<[VoterId; 4]> {
    let ids = value
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<Vec<VoterId>>>()?;
    let order: [VoterId; 4] = ids.try_into().map_err(|v: Vec<VoterId>| {
        Error::Config(format!("tie_break_order needs 4 voters, got {}", v.len()))
    })?;
    let mut seen = [false; 4];
    for v in order {
        if std::mem::replace(&mut seen[v.slot()], true) {
            return Err(Error::Config(format!("tie_break_order repeats voter {v}")));
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let c = RunConfig {
            dcc_grid: DccGrid::Compact,
            ridge: 0.25,
            tie_break_order: [VoterId::RlcLinear, VoterId::DccKnn, VoterId::RlcKnn, VoterId::DccLinear],
            ink_polarity: Polarity::InkLight,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn every_key_is_serialized() {
        let text = RunConfig::default().to_text();
        for key in CONFIG_KEYS {
            assert!(text.contains(&format!("{key}=")), "{key}");
        }
    }

    #[test]
    fn rejects_unknown_and_invalid_values() {
        assert!(RunConfig::parse("colour=blue").is_err());
        assert!(RunConfig::parse("knn_k=0").is_err());
        assert!(RunConfig::parse("split_fraction=1.0").is_err());
        assert!(RunConfig::parse("ridge=-1").is_err());
        assert!(RunConfig::parse("dcc_grid=5x5").is_err());
        assert!(RunConfig::parse("tie_break_order=dcc-knn,dcc-knn,rlc-knn,rlc-lc").is_err());
        assert!(RunConfig::parse("tie_break_order=dcc-knn").is_err());
        assert!(RunConfig::parse("just words").is_err());
        assert!(RunConfig::parse("# comment\n\nseed=7").is_ok());
    }
}
