//! Experiment configuration: one JSON document per experiment.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::agents::SearchParams;
use crate::entrainment::OscillatorParams;
use crate::error::{Error, Result};
use crate::landscape::{HarmonicityParams, LevelParams, VoiceTimbre};
use crate::lifecycle::MetabolicParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Scan,
    Search,
    Selection,
    Heredity,
    Entrain,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        Self::Scan,
        Self::Search,
        Self::Selection,
        Self::Heredity,
        Self::Entrain,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Scan => "scan",
            Self::Search => "search",
            Self::Selection => "selection",
            Self::Heredity => "heredity",
            Self::Entrain => "entrain",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }

    /// Condition tags this experiment understands.
    pub fn known_conditions(&self) -> &'static [&'static str] {
        match self {
            Self::Scan => &["anchor"],
            Self::Search => &["local-search", "random-walk", "shuffled-landscape", "consonance-only"],
            Self::Selection => &["recharge-on", "recharge-off"],
            Self::Heredity => &["heredity+selection", "random+selection", "heredity-only", "random-only"],
            Self::Entrain => &["shared", "scrambled", "off"],
        }
    }

    /// Accepted but not run unless asked for.
    pub fn optional_conditions(&self) -> &'static [&'static str] {
        match self {
            Self::Heredity => &["hard-random+selection", "hard-random-only"],
            _ => &[],
        }
    }
}

/// How per-run calibration is checked and repeated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationPolicy {
    pub mode: CalibrationMode,
    pub max_clip_fraction: f64,
    pub max_passes: usize,
}

/// Where the H and R divisors come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationMode {
    /// Band maxima of the initial scene, raised while a run clips too often.
    PerRunMaxima,
    /// The fixed one-voice / two-voice reference, never adjusted.
    Reference,
}

impl Default for CalibrationPolicy {
    fn default() -> Self {
        Self {
            mode: CalibrationMode::PerRunMaxima,
            max_clip_fraction: 0.001,
            max_passes: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectionConfig {
    pub max_deaths: usize,
    pub max_ticks: u64,
    pub k_first: usize,
    pub metabolism: MetabolicParams,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            max_deaths: 200,
            max_ticks: 200_000,
            k_first: 20,
            metabolism: MetabolicParams::selection(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeredityConfig {
    pub max_steps: u64,
    pub max_deaths: usize,
    pub window_ct: f64,
    pub matched_candidates: usize,
    pub settle_ticks: usize,
    pub ji_threshold: f64,
    pub sample_every: u64,
    /// Fraction of the run, at the end, averaged for the final `C_score`.
    pub final_fraction: f64,
    pub metabolism: MetabolicParams,
}

impl Default for HeredityConfig {
    fn default() -> Self {
        Self {
            max_steps: 12_000,
            max_deaths: 2_500,
            window_ct: 50.0,
            matched_candidates: 8,
            settle_ticks: 2,
            ji_threshold: 0.5,
            sample_every: 100,
            final_fraction: 0.1,
            metabolism: MetabolicParams::hereditary(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntrainConfig {
    pub oscillator: OscillatorParams,
    /// Onsets before this time are left out of vector strength.
    pub warmup_s: f64,
    pub plv_window_s: f64,
    pub dump_phases: bool,
}

impl Default for EntrainConfig {
    fn default() -> Self {
        Self {
            oscillator: OscillatorParams::default(),
            warmup_s: 2.0,
            plv_window_s: 1.0,
            dump_phases: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub conditions: Vec<String>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub n_agents: usize,
    #[serde(default = "default_anchor")]
    pub anchor_hz: f64,
    #[serde(default)]
    pub band_oct: f64,
    #[serde(default = "default_true")]
    pub drone: bool,
    #[serde(default)]
    pub timbre: VoiceTimbre,
    #[serde(default)]
    pub harmonicity: HarmonicityParams,
    #[serde(default)]
    pub level: LevelParams,
    #[serde(default)]
    pub calibration: CalibrationPolicy,
    #[serde(default)]
    pub search: SearchParams,
    #[serde(default)]
    pub selection: SelectionConfig,
    #[serde(default)]
    pub heredity: HeredityConfig,
    #[serde(default)]
    pub entrain: EntrainConfig,
}

fn default_anchor() -> f64 {
    220.0
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    /// Stock settings for each experiment.
    pub fn default_for(kind: ExperimentKind) -> Self {
        let (n_agents, band_oct) = match kind {
            ExperimentKind::Scan => (1, 2.0),
            ExperimentKind::Search => (24, 2.0),
            ExperimentKind::Selection => (32, 1.0),
            ExperimentKind::Heredity => (16, 1.0),
            ExperimentKind::Entrain => (32, 1.0),
        };
        let seeds = if kind == ExperimentKind::Scan {
            vec![0]
        } else {
            (0..20).collect()
        };
        Self {
            experiment: kind,
            conditions: kind.known_conditions().iter().map(|s| s.to_string()).collect(),
            seeds,
            n_agents,
            anchor_hz: default_anchor(),
            band_oct,
            drone: true,
            timbre: VoiceTimbre::default(),
            harmonicity: HarmonicityParams::default(),
            level: LevelParams::default(),
            calibration: CalibrationPolicy::default(),
            search: SearchParams::default(),
            selection: SelectionConfig::default(),
            heredity: HeredityConfig::default(),
            entrain: EntrainConfig::default(),
        }
    }

    /// Parses a config, filling anything the document leaves out from the
    /// experiment's defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)?;
        let kind = doc
            .get("experiment")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Config("missing \"experiment\"".into()))?;
        let kind = ExperimentKind::parse(kind)?;
        let mut base = serde_json::to_value(Self::default_for(kind))?;
        merge(&mut base, doc);
        let cfg: Self = serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies `key.path=value` overrides. Values parse as JSON when they can
    /// and are taken as strings otherwise.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut v = serde_json::to_value(self)?;
        for o in overrides {
            let (path, raw) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override '{o}' is not key=value")))?;
            let val = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            let mut cur = &mut v;
            let keys: Vec<&str> = path.split('.').collect();
            for (n, k) in keys.iter().enumerate() {
                let obj = cur
                    .as_object_mut()
                    .ok_or_else(|| Error::Config(format!("override path '{path}' does not name a field")))?;
                // `agents.*` is accepted for the search parameters; keys match without case
                let k = if n == 0 && k.eq_ignore_ascii_case("agents") { "search" } else { k };
                let key = obj
                    .keys()
                    .find(|name| name.eq_ignore_ascii_case(k))
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("unknown config key '{path}'")))?;
                if n + 1 == keys.len() {
                    obj.insert(key, val.clone());
                    break;
                }
                cur = obj.get_mut(&key).expect("checked");
            }
        }
        let cfg: Self = serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let known = self.experiment.known_conditions();
        if self.conditions.is_empty() {
            return Err(Error::Config("no conditions selected".into()));
        }
        for c in &self.conditions {
            if !known.contains(&c.as_str()) && !self.experiment.optional_conditions().contains(&c.as_str()) {
                return Err(Error::Config(format!(
                    "condition '{c}' is not one of {known:?} for {}",
                    self.experiment.name()
                )));
            }
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("no seeds selected".into()));
        }
        if self.experiment != ExperimentKind::Scan && self.n_agents == 0 {
            return Err(Error::Config("n_agents must be positive".into()));
        }
        if !(self.band_oct > 0.0) || !(self.anchor_hz > 0.0) {
            return Err(Error::Config("band_oct and anchor_hz must be positive".into()));
        }
        if self.timbre.n_partials == 0 || !(self.timbre.smear_ct > 0.0) {
            return Err(Error::Config("timbre needs at least one partial and a positive smear".into()));
        }
        self.harmonicity.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.search.validate()?;
        self.selection.metabolism.validate()?;
        self.heredity.metabolism.validate()?;
        self.entrain.oscillator.validate()?;
        if self.calibration.max_passes == 0 {
            return Err(Error::Config("calibration.max_passes must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.heredity.final_fraction) || self.heredity.sample_every == 0 {
            return Err(Error::Config("heredity.final_fraction must lie in [0, 1] and sample_every be positive".into()));
        }
        Ok(())
    }
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for k in ExperimentKind::ALL {
            ExperimentConfig::default_for(k).validate().unwrap();
        }
    }

    #[test]
    fn partial_document() {
        let c = ExperimentConfig::from_json(r#"{"experiment":"search","search":{"lambda_c":0.3},"seeds":[4,5]}"#).unwrap();
        assert_eq!(c.search.lambda_c, 0.3);
        assert_eq!(c.search.lambda_m, 0.1);
        let d = c.with_overrides(&["agents.lambda_C=0.8".into()]).unwrap();
        assert_eq!(d.search.lambda_c, 0.8);
        assert_eq!(c.seeds, vec![4, 5]);
        assert_eq!(c.n_agents, 24);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"experiment":"search","lamda":1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":"search","search":{"lamda":1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":"nope"}"#).is_err());
    }

    #[test]
    fn overrides() {
        let c = ExperimentConfig::default_for(ExperimentKind::Entrain);
        let d = c
            .with_overrides(&["entrain.oscillator.k_base=2.5".into(), "conditions=[\"off\"]".into()])
            .unwrap();
        assert_eq!(d.entrain.oscillator.k_base, 2.5);
        assert_eq!(d.conditions, vec!["off".to_string()]);
        assert!(c.with_overrides(&["entrain.nope=1".into()]).is_err());
        assert!(c.with_overrides(&["conditions=[\"local-search\"]".into()]).is_err());
    }
}
