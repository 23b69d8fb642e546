//! TOML configuration. Every section is optional; missing keys take the
//! desk-scale defaults.

use std::fmt;
use std::path::Path;

use hmlp_core::baselines::PairingStrategy;
use hmlp_core::capacity::{
    calibrated_margin, hierarchical_entries, load_modcod_table, standard_entries, CodeRate, Layer, ModCodEntry,
    ModCodTable, NamedConstellation, ThresholdSpec,
};
use hmlp_core::channel::{AntennaModel, WeatherCdf};
use hmlp_core::constellation::{preset, validate_params, ConstellationFamily, ConstellationParams};
use hmlp_core::lp::RateWeights;
use hmlp_core::ratevectors::EnumerationLimits;
use hmlp_core::sim::{grid, Scenario, Scheme};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), message: message.to_string() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub scenario: ScenarioSection,
    pub antenna: AntennaSection,
    pub weather: WeatherSection,
    pub limits: LimitsSection,
    pub capacity: CapacitySection,
    pub modcods: ModCodSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub receivers: usize,
    pub trials: usize,
    pub seed: u64,
    /// `start:stop:step` in dB, inclusive.
    pub snr_max_grid: String,
    /// `greedy` or `optimal-matching`.
    pub pairing: String,
    /// `reference`, `pairing`, `optimal` or `all`.
    pub scheme: String,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            receivers: 50,
            trials: 20,
            seed: 7,
            snr_max_grid: "2:21:1".into(),
            pairing: "greedy".into(),
            scheme: "all".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AntennaSection {
    pub diameter_m: f64,
    pub frequency_ghz: f64,
    pub edge_attenuation_db: f64,
}

impl Default for AntennaSection {
    fn default() -> Self {
        Self { diameter_m: 1.5, frequency_ghz: 20.0, edge_attenuation_db: 4.0 }
    }
}

/// Rain attenuation CDF as `[attenuation_db, probability]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeatherSection {
    pub points: Vec<[f64; 2]>,
}

impl Default for WeatherSection {
    fn default() -> Self {
        Self { points: WeatherCdf::placeholder().points().iter().map(|&(a, p)| [a, p]).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsSection {
    pub pair_snr_window_db: f64,
    pub max_vectors_per_pair: usize,
    pub max_total_vectors: usize,
}

impl Default for LimitsSection {
    fn default() -> Self {
        let d = EnumerationLimits::default();
        Self {
            pair_snr_window_db: d.pair_snr_window_db,
            max_vectors_per_pair: d.max_vectors_per_pair,
            max_total_vectors: d.max_total_vectors,
        }
    }
}

/// A number, or a keyword such as `"calibrate"` or `"derive"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberOr {
    Number(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapacitySection {
    /// Decoding margin in dB, or `"calibrate"`.
    pub margin: NumberOr,
}

impl Default for CapacitySection {
    fn default() -> Self {
        Self { margin: NumberOr::Keyword("calibrate".into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModCodSection {
    /// Include the 28 standard whole-symbol modcods.
    pub standard: bool,
    /// Include every built-in hierarchical preset of these families.
    pub hierarchical_families: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub presets: Vec<PresetRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<ModCodRow>,
}

impl Default for ModCodSection {
    fn default() -> Self {
        Self {
            standard: true,
            hierarchical_families: ConstellationFamily::ALL.iter().map(|f| f.tag().to_string()).collect(),
            presets: Vec::new(),
            rows: Vec::new(),
        }
    }
}

/// A user-defined constellation geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetRow {
    pub name: String,
    pub family: String,
    pub theta_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModCodRow {
    /// Built-in or user preset name.
    pub constellation: String,
    /// `whole`, `1` or `2`.
    pub stream: String,
    /// `n/d`.
    pub rate: String,
    /// dB, or `"derive"`.
    pub threshold: NumberOr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    pub values: Vec<f64>,
}

/// Which schemes to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeSelection {
    All,
    One(Scheme),
}

impl SchemeSelection {
    pub fn parse(s: &str) -> Option<Self> {
        if s == "all" {
            return Some(SchemeSelection::All);
        }
        s.parse().ok().map(SchemeSelection::One)
    }

    pub fn includes(self, scheme: Scheme) -> bool {
        match self {
            SchemeSelection::All => true,
            SchemeSelection::One(s) => s == scheme,
        }
    }
}

/// Parses `start:stop:step`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let nums: Vec<f64> = match parts.as_slice() {
        [a] => {
            let x = parse_num(a)?;
            vec![x, x, 1.0]
        }
        [a, b] => vec![parse_num(a)?, parse_num(b)?, 1.0],
        [a, b, c] => vec![parse_num(a)?, parse_num(b)?, parse_num(c)?],
        _ => return Err(format!("expected start:stop:step, got {s:?}")),
    };
    grid(nums[0], nums[1], nums[2]).map_err(|e| e.to_string())
}

fn parse_num(s: &str) -> Result<f64, String> {
    s.parse().map_err(|_| format!("bad number {s:?}"))
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let c: Config = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything except modcod thresholds, which need the capacity
    /// computation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario()?;
        self.margin_spec()?;
        self.entries()?;
        if let Some(w) = &self.weights {
            RateWeights::new(w.values.clone()).map_err(|e| invalid("weights.values", e))?;
        }
        Ok(())
    }

    pub fn schemes(&self) -> Result<SchemeSelection, ConfigError> {
        SchemeSelection::parse(&self.scenario.scheme)
            .ok_or_else(|| invalid("scenario.scheme", format!("unknown scheme {:?}", self.scenario.scheme)))
    }

    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        let sc = &self.scenario;
        if sc.receivers == 0 {
            return Err(invalid("scenario.receivers", "must be at least 1"));
        }
        if sc.trials == 0 {
            return Err(invalid("scenario.trials", "must be at least 1"));
        }
        let snr_max_grid = parse_grid(&sc.snr_max_grid).map_err(|e| invalid("scenario.snr_max_grid", e))?;
        let pairing: PairingStrategy = sc.pairing.parse().map_err(|e| invalid("scenario.pairing", e))?;
        self.schemes()?;
        let a = &self.antenna;
        let antenna = AntennaModel::new(a.diameter_m, a.frequency_ghz * 1e9, a.edge_attenuation_db)
            .map_err(|e| invalid("antenna", e))?;
        let weather = WeatherCdf::new(self.weather.points.iter().map(|p| (p[0], p[1])).collect())
            .map_err(|e| invalid("weather.points", e))?;
        let l = &self.limits;
        let limits = EnumerationLimits {
            pair_snr_window_db: l.pair_snr_window_db,
            max_vectors_per_pair: l.max_vectors_per_pair,
            max_total_vectors: l.max_total_vectors,
        };
        limits.validate().map_err(|e| invalid("limits", e))?;
        Ok(Scenario {
            receivers: sc.receivers,
            snr_max_grid,
            trials: sc.trials,
            seed: sc.seed,
            antenna,
            weather,
            limits,
            pairing,
        })
    }

    fn margin_spec(&self) -> Result<Option<f64>, ConfigError> {
        match &self.capacity.margin {
            NumberOr::Number(x) if x.is_finite() => Ok(Some(*x)),
            NumberOr::Keyword(k) if k == "calibrate" => Ok(None),
            other => Err(invalid("capacity.margin", format!("expected a number or \"calibrate\", got {other:?}"))),
        }
    }

    /// Margin in dB, running the calibration when requested.
    pub fn margin_db(&self) -> Result<f64, ConfigError> {
        Ok(self.margin_spec()?.unwrap_or_else(calibrated_margin))
    }

    fn lookup_constellation(&self, name: &str, key: &str) -> Result<NamedConstellation, ConfigError> {
        if let Some(p) = self.modcods.presets.iter().find(|p| p.name == name) {
            let family = ConstellationFamily::from_tag(&p.family)
                .ok_or_else(|| invalid(key, format!("unknown family {:?}", p.family)))?;
            let params =
                ConstellationParams { theta_deg: p.theta_deg, gamma: p.gamma, gamma1: p.gamma1, gamma2: p.gamma2 };
            validate_params(family, &params).map_err(|e| invalid(key, format!("preset {name:?}: {e}")))?;
            return Ok(NamedConstellation { name: name.to_string(), family, params });
        }
        preset(name)
            .map(|p| (&p).into())
            .ok_or_else(|| invalid(key, format!("unknown constellation preset {name:?}")))
    }

    /// Table rows in order: standard, hierarchical, then explicit rows.
    pub fn entries(&self) -> Result<Vec<ModCodEntry>, ConfigError> {
        let m = &self.modcods;
        for (k, p) in m.presets.iter().enumerate() {
            if preset(&p.name).is_some() || m.presets[..k].iter().any(|q| q.name == p.name) {
                return Err(invalid(
                    &format!("modcods.presets[{k}].name"),
                    format!("preset name {:?} is already defined", p.name),
                ));
            }
            self.lookup_constellation(&p.name, &format!("modcods.presets[{k}]"))?;
        }
        let mut out = Vec::new();
        if m.standard {
            out.extend(standard_entries());
        }
        let mut families = Vec::new();
        for f in &m.hierarchical_families {
            families.push(
                ConstellationFamily::from_tag(f)
                    .ok_or_else(|| invalid("modcods.hierarchical_families", format!("unknown family {f:?}")))?,
            );
        }
        out.extend(hierarchical_entries(&families));
        for (k, r) in m.rows.iter().enumerate() {
            let key = |field: &str| format!("modcods.rows[{k}].{field}");
            let constellation = self.lookup_constellation(&r.constellation, &key("constellation"))?;
            let layer = Layer::from_tag(&r.stream)
                .ok_or_else(|| invalid(&key("stream"), format!("expected whole, 1 or 2, got {:?}", r.stream)))?;
            let code_rate = CodeRate::parse(&r.rate).map_err(|e| invalid(&key("rate"), e))?;
            let threshold = match &r.threshold {
                NumberOr::Number(x) if x.is_finite() => ThresholdSpec::Explicit(*x),
                NumberOr::Keyword(s) if s == "derive" => ThresholdSpec::Derive,
                other => return Err(invalid(&key("threshold"), format!("expected dB or \"derive\", got {other:?}"))),
            };
            out.push(ModCodEntry { constellation, layer, code_rate, threshold });
        }
        if out.is_empty() {
            return Err(invalid("modcods", "the modcod table is empty"));
        }
        Ok(out)
    }

    /// Resolves thresholds and builds the table.
    pub fn table(&self) -> Result<ModCodTable, ConfigError> {
        let entries = self.entries()?;
        load_modcod_table(&entries, self.margin_db()?).map_err(|e| invalid("modcods", e))
    }

    pub fn weights(&self) -> Option<Result<RateWeights, ConfigError>> {
        self.weights
            .as_ref()
            .map(|w| RateWeights::new(w.values.clone()).map_err(|e| invalid("weights.values", e)))
    }
}
