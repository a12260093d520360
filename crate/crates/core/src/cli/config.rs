//! Job configuration shared by every command.

use std::path::PathBuf;

use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::int::is_prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignChoice {
    Plus,
    Minus,
    Both,
}

impl SignChoice {
    pub fn signs(self) -> Vec<i32> {
        match self {
            SignChoice::Plus => vec![1],
            SignChoice::Minus => vec![-1],
            SignChoice::Both => vec![1, -1],
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "+" | "+1" | "1" | "plus" => Some(SignChoice::Plus),
            "-" | "-1" | "minus" => Some(SignChoice::Minus),
            "both" | "+-" | "±" => Some(SignChoice::Both),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SignChoice::Plus => "+",
            SignChoice::Minus => "-",
            SignChoice::Both => "both",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    ThreeTerm,
    Degen,
    AtkinLehner,
    Alphastick,
    Congruence,
    Wt2Patterns,
    Oldspace,
}

impl VerifyMode {
    pub const ALL: [VerifyMode; 7] = [
        VerifyMode::ThreeTerm,
        VerifyMode::Degen,
        VerifyMode::AtkinLehner,
        VerifyMode::Alphastick,
        VerifyMode::Congruence,
        VerifyMode::Wt2Patterns,
        VerifyMode::Oldspace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VerifyMode::ThreeTerm => "three-term",
            VerifyMode::Degen => "degen",
            VerifyMode::AtkinLehner => "atkin-lehner",
            VerifyMode::Alphastick => "alphastick",
            VerifyMode::Congruence => "congruence",
            VerifyMode::Wt2Patterns => "wt2-patterns",
            VerifyMode::Oldspace => "oldspace",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("p = {0} must be an odd prime")]
    BadPrime(u64),
    #[error("p = {p} divides the level {level}")]
    PDividesLevel { p: u64, level: u64 },
    #[error("level must be positive")]
    BadLevel,
    #[error("weight {0} must be even and at least 2")]
    BadWeight(u32),
    #[error("precision {0} must be at least 2")]
    BadPrecision(u32),
    #[error("n_max must be at least 1")]
    BadNmax,
    #[error("ell_max {0} must be at least 2")]
    BadEllMax(u64),
    #[error("r must be at least 1")]
    BadR,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobConfig {
    pub level: u64,
    pub weight: u32,
    pub p: u64,
    pub sign: SignChoice,
    pub precision: u32,
    pub n_max: u32,
    pub ell_max: u64,
    pub cache_dir: Option<PathBuf>,
    pub output: PathBuf,
    /// Old-space depth for `verify --mode oldspace`.
    pub r: u32,
}

impl JobConfig {
    /// A configuration with the documented defaults.
    pub fn new(level: u64, weight: u32, p: u64) -> Self {
        JobConfig {
            level,
            weight,
            p,
            sign: SignChoice::Plus,
            precision: 8,
            n_max: 3,
            ell_max: 7,
            cache_dir: None,
            output: PathBuf::from("."),
            r: 3,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.level == 0 {
            return Err(ConfigError::BadLevel);
        }
        if self.p == 2 || !is_prime(self.p) {
            return Err(ConfigError::BadPrime(self.p));
        }
        if self.level.is_multiple_of(self.p) {
            return Err(ConfigError::PDividesLevel { p: self.p, level: self.level });
        }
        if self.weight < 2 || !self.weight.is_multiple_of(2) {
            return Err(ConfigError::BadWeight(self.weight));
        }
        if self.precision < 2 {
            return Err(ConfigError::BadPrecision(self.precision));
        }
        if self.n_max < 1 {
            return Err(ConfigError::BadNmax);
        }
        if self.ell_max < 2 {
            return Err(ConfigError::BadEllMax(self.ell_max));
        }
        if self.r < 1 {
            return Err(ConfigError::BadR);
        }
        Ok(())
    }

    /// The mathematical part of the configuration. Paths are left out so
    /// that reports do not depend on where they were written.
    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "weight": self.weight,
            "p": self.p,
            "sign": self.sign.name(),
            "precision": self.precision,
            "n_max": self.n_max,
            "ell_max": self.ell_max,
            "r": self.r,
            "cache": self.cache_dir.is_some(),
        })
    }
}
