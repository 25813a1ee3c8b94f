use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Timestamp recorded when `--timestamp` is not given. A fixed default keeps
/// repeated runs byte-identical.
pub const DEFAULT_TIMESTAMP: &str = "1970-01-01T00:00:00Z";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to regenerate an artifact.
///
/// `params` holds every input flag except the seed, the timestamp and the
/// output destinations, each in the canonical text form accepted on the
/// command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, timestamp: &str) -> Self {
        Self {
            command: command.to_owned(),
            params: BTreeMap::new(),
            seed: None,
            tool_version: TOOL_VERSION.to_owned(),
            timestamp: timestamp.to_owned(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn param_opt<T: ToString>(&mut self, key: &str, value: Option<T>) -> &mut Self {
        if let Some(v) = value {
            self.param(key, v);
        }
        self
    }

    /// Command-line arguments (without the program name) that reproduce the run.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec![self.command.clone()];
        for (k, v) in &self.params {
            if v == "true" && FLAG_PARAMS.contains(&k.as_str()) {
                args.push(format!("--{k}"));
            } else {
                args.push(format!("--{k}"));
                args.push(v.clone());
            }
        }
        if let Some(seed) = self.seed {
            args.push("--seed".into());
            args.push(seed.to_string());
        }
        args.push("--timestamp".into());
        args.push(self.timestamp.clone());
        args
    }
}

/// Parameters recorded as `true` that are boolean switches on the command line.
pub(crate) const FLAG_PARAMS: &[&str] = &["summary"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut m = RunManifest::new("eigen", DEFAULT_TIMESTAMP);
        m.param("beta", 2.5).param("ensemble", "hermite");
        m.seed = Some(u64::MAX);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<RunManifest>(&text).unwrap(), m);
        assert!(text.starts_with("{\"command\":\"eigen\""));
    }

    #[test]
    fn args_in_canonical_order() {
        let mut m = RunManifest::new("ballstats", "t");
        m.param("n", 10).param("summary", true);
        m.seed = Some(3);
        assert_eq!(
            m.to_args(),
            [
                "ballstats",
                "--n",
                "10",
                "--summary",
                "--seed",
                "3",
                "--timestamp",
                "t"
            ]
        );
    }
}
