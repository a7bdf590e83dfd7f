//! Experiment configuration files: flat `key = value` lines, `#` comments.
//!
//! ```text
//! # trigger-rate campaign
//! benchmark = QFT 6
//! benchmark = CRk 2
//! kinds = GM,SM,CM,MM
//! inputs = CI,RTI,CSI
//! limit_per_kind = 13
//! trials_per_mutant = 0      # 0 selects the default 100*n
//! seed = 42
//! parallelism = 4
//! ```
//!
//! `benchmark` lines repeat, one per (name, scale) pair. All other keys
//! have defaults.

use anyhow::{anyhow, bail, Result};
use qtest_core::mutator::MutKind;
use qtest_core::stateprep::InputKind;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub benchmarks: Vec<(String, usize)>,
    pub kinds: Vec<MutKind>,
    pub inputs: Vec<InputKind>,
    pub limit_per_kind: usize,
    /// 0 selects the default of 100*n trials.
    pub trials_per_mutant: u32,
    pub seed: u64,
    pub parallelism: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            benchmarks: Vec::new(),
            kinds: MutKind::ALL.to_vec(),
            inputs: vec![InputKind::Ci, InputKind::Rti, InputKind::Csi],
            limit_per_kind: 12,
            trials_per_mutant: 0,
            seed: 0,
            parallelism: default_parallelism(),
        }
    }
}

pub fn default_parallelism() -> usize {
    std::env::var("QTEST_PARALLELISM")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&p: &usize| p >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

impl ExperimentConfig {
    pub fn trials_for(&self, n: usize) -> u32 {
        if self.trials_per_mutant > 0 {
            self.trials_per_mutant
        } else {
            (100 * n.max(1)) as u32
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw) in src.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {line_no}: expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "benchmark" => {
                    let (name, n) = value
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| anyhow!("line {line_no}: benchmark takes `NAME N`"))?;
                    let n: usize = n
                        .trim()
                        .parse()
                        .map_err(|_| anyhow!("line {line_no}: bad scale `{n}`"))?;
                    cfg.benchmarks.push((name.trim().to_string(), n));
                }
                "kinds" => {
                    cfg.kinds = value
                        .split(',')
                        .map(|k| {
                            MutKind::from_name(k.trim())
                                .ok_or_else(|| anyhow!("line {line_no}: bad kind `{k}`"))
                        })
                        .collect::<Result<_>>()?;
                }
                "inputs" => {
                    cfg.inputs = value
                        .split(',')
                        .map(|k| {
                            InputKind::from_name(k.trim())
                                .ok_or_else(|| anyhow!("line {line_no}: bad input `{k}`"))
                        })
                        .collect::<Result<_>>()?;
                }
                "limit_per_kind" => cfg.limit_per_kind = value.parse()?,
                "trials_per_mutant" => cfg.trials_per_mutant = value.parse()?,
                "seed" => cfg.seed = value.parse()?,
                "parallelism" => {
                    cfg.parallelism = value.parse()?;
                    if cfg.parallelism == 0 {
                        bail!("line {line_no}: parallelism must be at least 1");
                    }
                }
                other => bail!("line {line_no}: unknown key `{other}`"),
            }
        }
        if cfg.benchmarks.is_empty() {
            bail!("config names no benchmarks");
        }
        if cfg.kinds.is_empty() || cfg.inputs.is_empty() {
            bail!("kinds and inputs must be non-empty");
        }
        Ok(cfg)
    }

    /// JSON echo embedded in report sidecars for provenance.
    pub fn to_json(&self) -> String {
        let benches: Vec<String> = self
            .benchmarks
            .iter()
            .map(|(b, n)| format!("{{\"name\":\"{b}\",\"n\":{n}}}"))
            .collect();
        let kinds: Vec<String> = self
            .kinds
            .iter()
            .map(|k| format!("\"{}\"", k.name()))
            .collect();
        let inputs: Vec<String> = self
            .inputs
            .iter()
            .map(|k| format!("\"{}\"", k.name()))
            .collect();
        format!(
            "{{\"benchmarks\":[{}],\"kinds\":[{}],\"inputs\":[{}],\"limit_per_kind\":{},\"trials_per_mutant\":{},\"seed\":{}}}",
            benches.join(","),
            kinds.join(","),
            inputs.join(","),
            self.limit_per_kind,
            self.trials_per_mutant,
            self.seed,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let cfg = ExperimentConfig::parse(
            "# campaign\nbenchmark = QFT 6\nbenchmark = CRk 2\nkinds = GM,MM\ninputs = CI,CSI\nlimit_per_kind = 5\nseed = 9\nparallelism = 2\n",
        )
        .unwrap();
        assert_eq!(cfg.benchmarks, vec![("QFT".into(), 6), ("CRk".into(), 2)]);
        assert_eq!(cfg.kinds, vec![MutKind::Gm, MutKind::Mm]);
        assert_eq!(cfg.inputs, vec![InputKind::Ci, InputKind::Csi]);
        assert_eq!(cfg.trials_for(6), 600);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::parse("benchmark = QFT\n").is_err());
        assert!(ExperimentConfig::parse("kinds = GM\n").is_err());
        assert!(ExperimentConfig::parse("benchmark = QFT 3\nwat = 1\n").is_err());
        assert!(ExperimentConfig::parse("benchmark = QFT 3\nkinds = XX\n").is_err());
    }
}
