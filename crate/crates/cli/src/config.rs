//! Flat `key=value` run configuration shared by every subcommand.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use citegan::Error;

/// Every key a config file may set.
pub const KNOWN_KEYS: &[&str] = &[
    // training
    "preset",
    "max_seq_len",
    "batch_size",
    "lr_discriminator",
    "lr_generator",
    "adam_epsilon",
    "epochs",
    "warmup_proportion",
    "objective",
    "precision",
    // model shape
    "z_dim",
    "generator_hidden_layers",
    "discriminator_hidden_layers",
    "dropout",
    "leaky_slope",
    // filtering
    "remove_intents",
    "min_confidence",
    "drop_isolated_nodes",
    // centrality and ranking
    "largest_wcc",
    "damping",
    "tol",
    "max_iter",
    "dangling",
    "closeness_variant",
    "closeness_direction",
    "undirected",
    "top_k",
    "horizon",
];

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> citegan::Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Validation(format!("config line {}: expected key=value", i + 1)));
            };
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Validation(format!("config line {}: unknown key {key:?}", i + 1)));
            }
            if values.insert(key.to_owned(), value.trim().to_owned()).is_some() {
                return Err(Error::Validation(format!("config line {}: duplicate key {key:?}", i + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Io { path: p.into(), source: e })?;
                Ok(Self::parse(&text).with_context(|| format!("reading config {}", p.display()))?)
            }
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        debug_assert!(KNOWN_KEYS.contains(&key), "unregistered key {key}");
        self.values.get(key).map(String::as_str)
    }

    /// Flag value if given, else the config value, else `default`.
    pub fn resolve<T>(&self, key: &str, flag: Option<T>, default: T) -> anyhow::Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some(text) => match text.parse() {
                Ok(v) => Ok(v),
                Err(e) => bail!(Error::Validation(format!("config key {key}: {e}"))),
            },
            None => Ok(default),
        }
    }

    pub fn resolve_opt<T>(&self, key: &str, flag: Option<T>) -> anyhow::Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|text| {
                text.parse()
                    .map_err(|e| anyhow::Error::new(Error::Validation(format!("config key {key}: {e}"))))
            })
            .transpose()
    }
}

/// Resolved settings of one run, written beside its primary output.
#[derive(Debug, Default)]
pub struct Resolved {
    entries: BTreeMap<&'static str, String>,
}

impl Resolved {
    pub fn set(&mut self, key: &'static str, value: impl ToString) {
        self.entries.insert(key, value.to_string());
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Writes `<output>.config`.
    pub fn write_beside(&self, output: &Path) -> anyhow::Result<PathBuf> {
        let mut name = output.as_os_str().to_owned();
        name.push(".config");
        let path = PathBuf::from(name);
        std::fs::write(&path, self.render()).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        Ok(path)
    }
}
