//! `[section]` + `key = value` run configuration.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;
use inelastic_core::selfsim::InitialCondition;
use inelastic_core::{Error, Grid, Result};

/// Keys every config must spell out.
pub const REQUIRED_PHYSICS: [&str; 4] = ["gamma", "c", "L", "N"];

#[derive(Debug, Clone)]
pub struct Config {
    pub path: PathBuf,
    /// Raw file contents, hashed into the manifest.
    pub text: String,
    ini: Ini,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physics {
    pub gamma: f64,
    pub c: f64,
    pub half_width: f64,
    pub cells: usize,
}

impl Physics {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.half_width, self.cells)
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.path = path.to_path_buf();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = Self { path: PathBuf::new(), text: text.to_string(), ini };
        for key in REQUIRED_PHYSICS {
            if cfg.raw("physics", key).is_none() {
                return Err(Error::Config(format!("[physics] {key} is required")));
            }
        }
        cfg.physics()?;
        Ok(cfg)
    }

    pub fn physics(&self) -> Result<Physics> {
        Ok(Physics {
            gamma: self.f64("physics", "gamma")?,
            c: self.f64("physics", "c")?,
            half_width: self.f64("physics", "L")?,
            cells: self.usize("physics", "N")?,
        })
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.ini.section(Some(section)).and_then(|s| s.get(key)).map(str::trim)
    }

    pub fn has(&self, section: &str, key: &str) -> bool {
        self.raw(section, key).is_some()
    }

    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<T> {
        let raw = self
            .raw(section, key)
            .ok_or_else(|| Error::Config(format!("[{section}] {key} is required")))?;
        raw.parse::<T>()
            .map_err(|_| Error::Config(format!("[{section}] {key} = '{raw}' does not parse")))
    }

    pub fn get_or<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        if self.has(section, key) { self.get(section, key) } else { Ok(default) }
    }

    pub fn f64(&self, section: &str, key: &str) -> Result<f64> {
        let v: f64 = self.get(section, key)?;
        if !v.is_finite() {
            return Err(Error::Config(format!("[{section}] {key} must be finite")));
        }
        Ok(v)
    }

    pub fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        if self.has(section, key) { self.f64(section, key) } else { Ok(default) }
    }

    pub fn usize(&self, section: &str, key: &str) -> Result<usize> {
        self.get(section, key)
    }

    pub fn list(&self, section: &str, key: &str) -> Result<Vec<f64>> {
        let raw = self
            .raw(section, key)
            .ok_or_else(|| Error::Config(format!("[{section}] {key} is required")))?;
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("[{section}] {key}: '{}' is not a number", s.trim())))
            })
            .collect()
    }

    pub fn init(&self, section: &str, key: &str) -> Result<InitialCondition> {
        let raw = self
            .raw(section, key)
            .ok_or_else(|| Error::Config(format!("[{section}] {key} is required")))?;
        InitialCondition::from_str(raw)
    }

    pub fn init_or(&self, section: &str, key: &str, default: InitialCondition) -> Result<InitialCondition> {
        if self.has(section, key) { self.init(section, key) } else { Ok(default) }
    }
}
