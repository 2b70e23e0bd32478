use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    pub dim: usize,
    /// Context half-size `s`.
    pub half_window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate_start: f64,
    pub learning_rate_end: f64,
    pub seed: u64,
    /// Exponent applied to slot counts for the negative distribution.
    pub unigram_power: f64,
    /// Frequent-word subsampling threshold; 0 disables it.
    pub subsample: f64,
    /// Training threads. 1 is the deterministic mode; more workers update
    /// the table without locks and are not reproducible.
    pub workers: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            dim: 100,
            half_window: 24,
            negatives: 5,
            epochs: 5,
            learning_rate_start: 0.05,
            learning_rate_end: 0.0001,
            seed: 1,
            unigram_power: 0.75,
            subsample: 0.0,
            workers: 1,
        }
    }
}

const KEYS: [&str; 10] = [
    "dim",
    "half_window",
    "negatives",
    "epochs",
    "learning_rate_start",
    "learning_rate_end",
    "seed",
    "unigram_power",
    "subsample",
    "workers",
];

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Invalid(format!("hyperparameters: {m}")));
        if self.dim == 0 {
            return fail("dim must be at least 1");
        }
        if self.half_window == 0 {
            return fail("half_window must be at least 1");
        }
        if self.negatives == 0 {
            return fail("negatives must be at least 1");
        }
        if self.workers == 0 {
            return fail("workers must be at least 1");
        }
        if !(self.learning_rate_end > 0.0 && self.learning_rate_start >= self.learning_rate_end) {
            return fail("need learning_rate_start >= learning_rate_end > 0");
        }
        if !(self.unigram_power.is_finite() && self.unigram_power >= 0.0) {
            return fail("unigram_power must be finite and non-negative");
        }
        if !(self.subsample.is_finite() && self.subsample >= 0.0) {
            return fail("subsample must be finite and non-negative");
        }
        Ok(())
    }

    /// Sets one field from its config key. Returns `Ok(false)` for keys that
    /// are not hyperparameters.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| Error::parse("config", format!("bad value for {key}: {value:?}")))
        }
        match key {
            "dim" => self.dim = num(key, value)?,
            "half_window" => self.half_window = num(key, value)?,
            "negatives" => self.negatives = num(key, value)?,
            "epochs" => self.epochs = num(key, value)?,
            "learning_rate_start" => self.learning_rate_start = num(key, value)?,
            "learning_rate_end" => self.learning_rate_end = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "unigram_power" => self.unigram_power = num(key, value)?,
            "subsample" => self.subsample = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Parses a `key = value` file holding only hyperparameters.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut hp = Hyperparams::default();
        for (key, value) in parse_key_values(text)? {
            if !hp.set(&key, &value)? {
                return Err(Error::parse("config", format!("unknown key {key}")));
            }
        }
        hp.validate()?;
        Ok(hp)
    }

    pub fn to_config(&self) -> String {
        let values = [
            self.dim.to_string(),
            self.half_window.to_string(),
            self.negatives.to_string(),
            self.epochs.to_string(),
            self.learning_rate_start.to_string(),
            self.learning_rate_end.to_string(),
            self.seed.to_string(),
            self.unigram_power.to_string(),
            self.subsample.to_string(),
            self.workers.to_string(),
        ];
        let mut out = String::new();
        for (k, v) in KEYS.iter().zip(values) {
            writeln!(out, "{k} = {v}").unwrap();
        }
        out
    }
}

/// Splits a flat `key = value` file. `#` starts a comment line.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse("config", format!("line {}: expected key = value", n + 1)))?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let hp = Hyperparams::default();
        assert_eq!((hp.dim, hp.half_window, hp.negatives), (100, 24, 5));
        hp.validate().unwrap();
    }

    #[test]
    fn config_round_trip() {
        let hp =
            Hyperparams { dim: 16, learning_rate_start: 0.025, seed: 99, subsample: 1e-3, ..Hyperparams::default() };
        assert_eq!(Hyperparams::from_config(&hp.to_config()).unwrap(), hp);
    }

    #[test]
    fn config_errors() {
        assert!(Hyperparams::from_config("dim = ten").is_err());
        assert!(Hyperparams::from_config("colour = red").is_err());
        assert!(Hyperparams::from_config("dim 5").is_err());
        assert!(Hyperparams::from_config("negatives = 0").is_err());
        assert!(Hyperparams::from_config("learning_rate_start = 0.001\nlearning_rate_end = 0.01").is_err());
        let hp = Hyperparams::from_config("# comment\n\ndim = 8\n").unwrap();
        assert_eq!(hp.dim, 8);
    }
}
