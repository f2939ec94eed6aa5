//! Run configuration: flat `key = value` text plus overrides.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hydrogen::{RadialGrid, Spacing};
use crate::model::{CutoffProfile, Taper};
use crate::oracle::ModeSpec;
use crate::quadrature::Budgets;
use crate::ritz::log_grid;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub lambda: f64,
    pub taper: Taper,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_points: usize,
    pub budget_3d: u64,
    pub budget_6d: u64,
    pub budget_9d: u64,
    pub seed: u64,
    pub modes_radial: usize,
    pub modes_angular: usize,
    pub nmax: usize,
    pub radial_rmax: f64,
    pub radial_points: usize,
    pub out: PathBuf,
    pub cache: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = CutoffProfile::default();
        let b = Budgets::default();
        let m = ModeSpec::default();
        let g = RadialGrid::default();
        RunConfig {
            lambda: p.lambda,
            taper: p.taper,
            alpha_min: 1e-4,
            alpha_max: 1e-1,
            alpha_points: 12,
            budget_3d: b.low,
            budget_6d: b.mid,
            budget_9d: b.high,
            seed: 42,
            modes_radial: m.radial,
            modes_angular: m.angular,
            nmax: 4,
            radial_rmax: g.r_max,
            radial_points: g.points,
            out: PathBuf::from("out"),
            cache: PathBuf::from("fiber-ground-cache"),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Validation(format!("cannot parse `{key} = {value}`")))
}

impl RunConfig {
    pub const KEYS: [&'static str; 16] = [
        "lambda",
        "taper",
        "alpha_min",
        "alpha_max",
        "alpha_points",
        "budget_3d",
        "budget_6d",
        "budget_9d",
        "seed",
        "modes_radial",
        "modes_angular",
        "nmax",
        "radial_rmax",
        "radial_points",
        "out",
        "cache",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "lambda" => self.lambda = parse(&key, value)?,
            "taper" => self.taper = value.parse()?,
            "alpha_min" => self.alpha_min = parse(&key, value)?,
            "alpha_max" => self.alpha_max = parse(&key, value)?,
            "alpha_points" => self.alpha_points = parse(&key, value)?,
            "budget_3d" => self.budget_3d = parse(&key, value)?,
            "budget_6d" => self.budget_6d = parse(&key, value)?,
            "budget_9d" => self.budget_9d = parse(&key, value)?,
            "seed" => self.seed = parse(&key, value)?,
            "modes_radial" => self.modes_radial = parse(&key, value)?,
            "modes_angular" => self.modes_angular = parse(&key, value)?,
            "nmax" => self.nmax = parse(&key, value)?,
            "radial_rmax" => self.radial_rmax = parse(&key, value)?,
            "radial_points" => self.radial_points = parse(&key, value)?,
            "out" => self.out = PathBuf::from(value),
            "cache" => self.cache = PathBuf::from(value),
            _ => return Err(Error::Validation(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Validation(format!("line {}: expected `key = value`", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.taper == Taper::Vanishing {
            return bad("taper `vanishing` makes the coupling identically zero".into());
        }
        if !(self.lambda >= 1.0) || !self.lambda.is_finite() {
            return bad(format!("lambda must be a finite number ≥ 1, got {}", self.lambda));
        }
        if !(self.alpha_min > 0.0 && self.alpha_min <= self.alpha_max && self.alpha_max <= 0.1) {
            return bad(format!(
                "alpha grid must satisfy 0 < alpha_min ≤ alpha_max ≤ 0.1, got [{}, {}]",
                self.alpha_min, self.alpha_max
            ));
        }
        if self.alpha_points == 0 {
            return bad("alpha_points must be positive".into());
        }
        if self.budget_3d < 16 || self.budget_6d < 16 || self.budget_9d < 16 {
            return bad("budgets must be at least 16".into());
        }
        if self.nmax == 0 || self.modes_radial == 0 {
            return bad("nmax and modes_radial must be positive".into());
        }
        crate::oracle::spherical_design(self.modes_angular).map_err(|e| Error::Validation(e.to_string()))?;
        self.grid().validate()?;
        Ok(())
    }

    pub fn profile(&self) -> Result<CutoffProfile> {
        CutoffProfile::new(self.lambda, self.taper).map_err(|e| Error::Validation(e.to_string()))
    }

    pub fn budgets(&self) -> Budgets {
        Budgets {
            low: self.budget_3d,
            mid: self.budget_6d,
            high: self.budget_9d,
        }
    }

    pub fn alphas(&self) -> Vec<f64> {
        if self.alpha_points == 1 {
            return vec![self.alpha_max];
        }
        log_grid(self.alpha_min, self.alpha_max, self.alpha_points)
    }

    pub fn modes(&self) -> ModeSpec {
        ModeSpec {
            radial: self.modes_radial,
            angular: self.modes_angular,
        }
    }

    pub fn grid(&self) -> RadialGrid {
        RadialGrid {
            r_max: self.radial_rmax,
            points: self.radial_points,
            spacing: Spacing::Uniform,
        }
    }

    /// Canonical `key = value` text, one line per key in KEYS order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for k in Self::KEYS {
            let _ = writeln!(s, "{k} = {}", self.value(k));
        }
        s
    }

    pub fn value(&self, key: &str) -> String {
        match key {
            "lambda" => format!("{:?}", self.lambda),
            "taper" => self.taper.as_str().to_string(),
            "alpha_min" => format!("{:?}", self.alpha_min),
            "alpha_max" => format!("{:?}", self.alpha_max),
            "alpha_points" => self.alpha_points.to_string(),
            "budget_3d" => self.budget_3d.to_string(),
            "budget_6d" => self.budget_6d.to_string(),
            "budget_9d" => self.budget_9d.to_string(),
            "seed" => self.seed.to_string(),
            "modes_radial" => self.modes_radial.to_string(),
            "modes_angular" => self.modes_angular.to_string(),
            "nmax" => self.nmax.to_string(),
            "radial_rmax" => format!("{:?}", self.radial_rmax),
            "radial_points" => self.radial_points.to_string(),
            "out" => self.out.display().to_string(),
            "cache" => self.cache.display().to_string(),
            _ => String::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = RunConfig::default();
        c.set("lambda", "1.5").unwrap();
        c.set("taper", "sharp").unwrap();
        c.set("alpha-points", "7").unwrap();
        let back = RunConfig::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = RunConfig::from_text("# run\n\nseed = 7 # fixed\nnmax=3\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.nmax, 3);
    }

    #[test]
    fn degenerate_and_malformed_configs_are_rejected() {
        for text in [
            "taper = vanishing",
            "lambda = 0.5",
            "alpha_max = 0.5",
            "budget_3d = 1",
            "foo = 1",
            "seed",
        ] {
            let r = RunConfig::from_text(text).and_then(|c| c.validate());
            assert!(matches!(r, Err(Error::Validation(_))), "{text}: {r:?}");
        }
        RunConfig::default().validate().unwrap();
    }
}
