//! key = value run configuration. Unknown keys are rejected so typos fail
//! loudly instead of silently keeping a default.

use std::collections::HashSet;
use std::fmt;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub h0: f64,
    pub eps: f64,
    pub a: f64,
    pub b: f64,
    pub support: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub nz: usize,
    pub theta: f64,
    pub conventions: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            h0: 1.0,
            eps: 0.2,
            a: 1.0,
            b: 1.0,
            support: 60.0,
            x_min: 0.5,
            x_max: 3.0,
            nx: 6,
            z_min: 0.5,
            z_max: 3.0,
            nz: 6,
            theta: std::f64::consts::FRAC_PI_4,
            conventions: "conventions.txt".to_string(),
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen = HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let val = val.trim();
            if !seen.insert(key.to_string()) {
                return Err(ConfigError(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
            let fnum = || -> Result<f64, ConfigError> {
                val.parse::<f64>()
                    .map_err(|_| ConfigError(format!("line {}: bad number '{val}' for '{key}'", lineno + 1)))
            };
            let unum = || -> Result<usize, ConfigError> {
                val.parse::<usize>()
                    .map_err(|_| ConfigError(format!("line {}: bad integer '{val}' for '{key}'", lineno + 1)))
            };
            match key {
                "h0" => cfg.h0 = fnum()?,
                "eps" => cfg.eps = fnum()?,
                "a" => cfg.a = fnum()?,
                "b" => cfg.b = fnum()?,
                "support" => cfg.support = fnum()?,
                "x_min" => cfg.x_min = fnum()?,
                "x_max" => cfg.x_max = fnum()?,
                "nx" => cfg.nx = unum()?,
                "z_min" => cfg.z_min = fnum()?,
                "z_max" => cfg.z_max = fnum()?,
                "nz" => cfg.nz = unum()?,
                "theta" => cfg.theta = fnum()?,
                "conventions" => cfg.conventions = val.to_string(),
                _ => {
                    return Err(ConfigError(format!("line {}: unknown key '{key}'", lineno + 1)));
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.h0 > 0.0) {
            return Err(ConfigError(format!("h0 must be > 0, got {}", self.h0)));
        }
        if !(self.eps >= 0.0 && self.eps < 1.0) {
            return Err(ConfigError(format!("eps must be in [0, 1), got {}", self.eps)));
        }
        if !(self.a > 0.0 && self.b > 0.0) {
            return Err(ConfigError(format!("source offsets must be > 0, got a={} b={}", self.a, self.b)));
        }
        if !(self.support > 10.0) {
            return Err(ConfigError(format!("support must be > 10, got {}", self.support)));
        }
        if self.nx == 0 || self.nz == 0 {
            return Err(ConfigError("nx and nz must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_keeps_defaults() {
        let cfg = RunConfig::parse("a = 2.0  # source x offset\n\nnx = 4\n").unwrap();
        assert_eq!(cfg.a, 2.0);
        assert_eq!(cfg.nx, 4);
        assert_eq!(cfg.h0, 1.0);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let e = RunConfig::parse("bogus = 1\n").unwrap_err();
        assert!(e.0.contains("unknown key 'bogus'"), "{}", e.0);
        let e = RunConfig::parse("a = 1\na = 2\n").unwrap_err();
        assert!(e.0.contains("duplicate key 'a'"), "{}", e.0);
    }

    #[test]
    fn rejects_out_of_range_values() {
        assert!(RunConfig::parse("eps = 1.5\n").is_err());
        assert!(RunConfig::parse("h0 = -1\n").is_err());
        assert!(RunConfig::parse("nx = 0\n").is_err());
    }
}
