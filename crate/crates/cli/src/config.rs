//! `key = value` config files. Keys are flag names without the leading
//! dashes; explicit flags always win.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::Failure;

const KEYS: &[&str] = &[
    "eta", "mu", "seed", "samples", "dt", "t-max", "tol", "margin", "suite", "kind", "eps", "sigma",
    "r", "grid", "blowup-norm",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|m| Failure::input(format!("{}: {m}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            let k = k.trim().replace('_', "-");
            if !KEYS.contains(&k.as_str()) {
                return Err(format!("line {}: unknown key {k:?}", n + 1));
            }
            values.insert(k, v.trim().to_string());
        }
        Ok(Self { values })
    }

    /// The flag value if given, else the config value, else `default`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Failure> {
        Ok(self.lookup(flag, key)?.unwrap_or(default))
    }

    pub fn lookup<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Failure::input(format!("config value for {key} is invalid: {v:?}"))),
        }
    }
}
