//! `key = value` configuration files. Flags given on the command line win.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "h",
    "extent",
    "cap",
    "theta",
    "shift",
    "r_max",
    "radius",
    "height",
    "major_radius",
    "subdivisions",
    "width",
    "schedule",
    "tol",
    "tmax",
    "tmin",
    "grid",
    "t_samples",
    "starts",
    "seed",
    "taus",
    "huisken_taus",
    "t0",
    "residual_threshold",
    "plane",
    "q",
    "rho",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {}: expected key = value", n + 1)))?;
            let key = k.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::config(format!("line {}: unknown key {key:?}", n + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag, else config entry, else nothing.
    pub fn pick_opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::config(format!("{key} = {v}: {e}"))),
            None => Ok(None),
        }
    }

    pub fn pick<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick_opt(flag, key)?.unwrap_or(default))
    }
}

/// Comma-separated floats.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(format!("non-finite entry in {s:?}"));
        }
        Ok(FloatList(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let c = Config::parse("# run\nh = 0.02\nextent=3 # half length\n\ntaus = 2,3\n").unwrap();
        assert_eq!(c.pick::<f64>(None, "h", 1.0).unwrap(), 0.02);
        assert_eq!(c.pick(Some(0.5), "h", 1.0).unwrap(), 0.5);
        assert_eq!(c.pick::<f64>(None, "cap", 7.0).unwrap(), 7.0);
        assert_eq!(c.pick_opt::<FloatList>(None, "taus").unwrap(), Some(FloatList(vec![2.0, 3.0])));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::parse("bogus = 1").is_err());
        assert!(Config::parse("h 0.1").is_err());
        let c = Config::parse("h = abc").unwrap();
        assert!(c.pick::<f64>(None, "h", 1.0).is_err());
        assert!("1,x".parse::<FloatList>().is_err());
    }
}
