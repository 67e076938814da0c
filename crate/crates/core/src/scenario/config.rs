use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use super::presets;
use crate::analysis::LEAK_THRESHOLD;
use crate::dynamics::{InitialStateSpec, SimulationSetup, StateTerm, TimeGrid, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::fock::{HilbertSpace, Mode, Occupations};
use crate::model::{FMode, ModelParams, Regime, RegimeSpec, DEFAULT_SERIES_ORDER};

/// Relative tolerance (in units of `nu_1`) of the sideband detuning checks.
pub const REGIME_TOLERANCE: f64 = 1e-9;

/// Where a resolved value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Published device value.
    Published,
    /// Preset choice not fixed by published data.
    Interpretation,
    /// Computed from other values.
    Derived,
    /// Built-in default.
    Default,
    /// Set in the configuration file.
    Config,
    /// Set with `--override`.
    Override,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Published => "published",
            Provenance::Interpretation => "interpretation",
            Provenance::Derived => "derived",
            Provenance::Default => "default",
            Provenance::Config => "config",
            Provenance::Override => "override",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_mode: Option<FMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub losses: Option<bool>,
}

/// Physical parameters; every key carries its unit.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega1_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega2_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu1_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu2_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g1_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g2_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive1_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive2_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive_freq1_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive_freq2_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_opt1_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_opt2_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_mec1_rad_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_mec2_rad_per_s: Option<f64>,
}

/// Keys of [`ParamsSection`] in output order.
pub const PARAM_KEYS: [&str; 15] = [
    "omega1_rad_per_s",
    "omega2_rad_per_s",
    "nu1_rad_per_s",
    "nu2_rad_per_s",
    "g1_rad_per_s",
    "g2_rad_per_s",
    "drive1_rad_per_s",
    "drive2_rad_per_s",
    "drive_freq1_rad_per_s",
    "drive_freq2_rad_per_s",
    "gamma_rad_per_s",
    "kappa_opt1_rad_per_s",
    "kappa_opt2_rad_per_s",
    "kappa_mec1_rad_per_s",
    "kappa_mec2_rad_per_s",
];

impl ParamsSection {
    pub fn from_params(p: &ModelParams) -> Self {
        Self {
            omega1_rad_per_s: Some(p.omega[0]),
            omega2_rad_per_s: Some(p.omega[1]),
            nu1_rad_per_s: Some(p.nu[0]),
            nu2_rad_per_s: Some(p.nu[1]),
            g1_rad_per_s: Some(p.g[0]),
            g2_rad_per_s: Some(p.g[1]),
            drive1_rad_per_s: Some(p.drive[0]),
            drive2_rad_per_s: Some(p.drive[1]),
            drive_freq1_rad_per_s: Some(p.drive_freq[0]),
            drive_freq2_rad_per_s: Some(p.drive_freq[1]),
            gamma_rad_per_s: Some(p.gamma),
            kappa_opt1_rad_per_s: Some(p.kappa_opt[0]),
            kappa_opt2_rad_per_s: Some(p.kappa_opt[1]),
            kappa_mec1_rad_per_s: Some(p.kappa_mec[0]),
            kappa_mec2_rad_per_s: Some(p.kappa_mec[1]),
        }
    }

    fn resolve(&self) -> Result<ModelParams> {
        let req = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| Error::Config(format!("missing required key params.{key}")))
        };
        let opt = |v: Option<f64>| v.unwrap_or(0.0);
        Ok(ModelParams {
            omega: [
                req(self.omega1_rad_per_s, "omega1_rad_per_s")?,
                req(self.omega2_rad_per_s, "omega2_rad_per_s")?,
            ],
            nu: [
                req(self.nu1_rad_per_s, "nu1_rad_per_s")?,
                req(self.nu2_rad_per_s, "nu2_rad_per_s")?,
            ],
            g: [
                req(self.g1_rad_per_s, "g1_rad_per_s")?,
                req(self.g2_rad_per_s, "g2_rad_per_s")?,
            ],
            drive: [opt(self.drive1_rad_per_s), opt(self.drive2_rad_per_s)],
            drive_freq: [
                req(self.drive_freq1_rad_per_s, "drive_freq1_rad_per_s")?,
                req(self.drive_freq2_rad_per_s, "drive_freq2_rad_per_s")?,
            ],
            gamma: opt(self.gamma_rad_per_s),
            kappa_opt: [
                opt(self.kappa_opt1_rad_per_s),
                opt(self.kappa_opt2_rad_per_s),
            ],
            kappa_mec: [
                opt(self.kappa_mec1_rad_per_s),
                opt(self.kappa_mec2_rad_per_s),
            ],
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSection {
    /// Highest retained occupation of `[opt1, opt2, mec1, mec2]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<Occupations>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub occupations: Occupations,
}

/// Initial state, either a named family or explicit Fock components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConfig {
    /// `(cos(pi/3)|1,0> + sin(pi/3)|0,1>)_opt |m1, m2>_mec`.
    SplitPhoton {
        mechanical: [usize; 2],
    },
    /// `|n1, n2>_opt (cos(pi/3)|1,0> + sin(pi/3)|0,1>)_mec`.
    SplitPhonon {
        optical: [usize; 2],
    },
    Basis {
        occupations: Occupations,
    },
    Terms {
        terms: Vec<TermConfig>,
    },
}

impl InitialConfig {
    pub fn to_spec(&self) -> InitialStateSpec {
        match self {
            InitialConfig::SplitPhoton { mechanical } => {
                InitialStateSpec::split_photon(*mechanical)
            }
            InitialConfig::SplitPhonon { optical } => InitialStateSpec::split_phonon(*optical),
            InitialConfig::Basis { occupations } => InitialStateSpec::basis(*occupations),
            InitialConfig::Terms { terms } => InitialStateSpec {
                terms: terms
                    .iter()
                    .map(|t| StateTerm {
                        amplitude: [t.re, t.im],
                        occupations: t.occupations,
                    })
                    .collect(),
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_start_per_nu1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end_per_nu1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Relative tolerance of the integrator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Trajectory columns; defaults to the four occupation numbers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observables: Option<Vec<String>>,
    /// Compare simulated exchange periods with the closed forms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub periods: Option<bool>,
    /// Also propagate under this regime and report the deviation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compare_with: Option<Regime>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<Vec<Occupations>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_orders: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// One layer of configuration (preset, file or overrides); every key is
/// optional until the layers are merged and resolved.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub truncation: TruncationSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub scan: ScanSection,
    /// Run record of a metadata file; ignored on input.
    #[serde(default, skip_serializing)]
    pub run: Option<Table>,
}

impl ConfigLayer {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))
    }

    fn to_table(&self) -> Table {
        match Value::try_from(self) {
            Ok(Value::Table(t)) => t,
            _ => Table::new(),
        }
    }

    fn from_table(table: Table, origin: &str) -> Result<Self> {
        Value::Table(table)
            .try_into()
            .map_err(|e| Error::Config(format!("{origin}: {e}")))
    }
}

/// Merges `top` into `base`. Tables merge key by key, except that an
/// `initial` table naming a `kind` replaces the lower one.
fn merge_tables(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(t))
                if !(key == "initial" && t.contains_key("kind")) =>
            {
                merge_tables(b, t)
            }
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// One `--override KEY=VALUE`. `KEY` is a dotted path such as
/// `params.gamma_rad_per_s`; `VALUE` is a TOML value, or a bare string.
pub fn parse_override(spec: &str) -> Result<Table> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{spec}' is not KEY=VALUE")))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Config(format!("override '{spec}' has an empty key")));
    }
    let value = match toml::from_str::<Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap_or(Value::String(raw.to_string())),
        Err(_) => Value::String(raw.to_string()),
    };
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().unwrap_or(key);
    let mut table = Table::new();
    table.insert(last.to_string(), value);
    for part in parts.into_iter().rev() {
        let mut outer = Table::new();
        outer.insert(part.to_string(), Value::Table(table));
        table = outer;
    }
    // Reject unknown keys and ill-typed values right away; a partial
    // `initial` table is only checked after merging.
    let mut check = table.clone();
    if matches!(check.get("initial"), Some(Value::Table(t)) if !t.contains_key("kind")) {
        check.remove("initial");
    }
    ConfigLayer::from_table(check, &format!("override '{spec}'"))?;
    Ok(table)
}

/// Sources of one scenario, lowest priority first.
#[derive(Clone, Debug, Default)]
pub struct ScenarioSource {
    pub preset: Option<String>,
    pub config: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub out_dir: Option<PathBuf>,
}

/// Output settings of a resolved scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub observables: Vec<String>,
    pub periods: bool,
    pub compare_with: Option<Regime>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanSpec {
    pub cutoffs: Vec<Occupations>,
    pub series_orders: Vec<usize>,
    pub tolerance: f64,
}

/// Fully resolved and validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub preset: Option<String>,
    pub regime: RegimeSpec,
    pub losses: bool,
    /// Parameters in rad/s.
    pub params: ModelParams,
    pub cutoffs: Occupations,
    pub initial: InitialConfig,
    pub time: TimeGrid,
    pub output: OutputSpec,
    pub scan: ScanSpec,
    /// Provenance of each parameter key.
    pub provenance: BTreeMap<String, Provenance>,
    /// Leak threshold of the convergence monitor.
    pub leak_threshold: f64,
}

fn known_observable(name: &str) -> bool {
    Mode::ALL
        .iter()
        .any(|m| name == format!("n_{}", m.label()) || name == format!("top_{}", m.label()))
}

impl Scenario {
    /// Loads, layers and validates a scenario. Nothing is written.
    pub fn load(source: &ScenarioSource) -> Result<Self> {
        let file_layer = match &source.config {
            Some(path) => Some(read_layer(path)?),
            None => None,
        };
        let preset_name = source
            .preset
            .clone()
            .or_else(|| file_layer.as_ref().and_then(|l| l.preset.clone()));
        let preset = match &preset_name {
            Some(name) => Some(presets::find(name).ok_or_else(|| {
                Error::Config(format!(
                    "unknown preset '{name}'; available: {}",
                    presets::names().join(", ")
                ))
            })?),
            None => None,
        };

        let mut provenance: BTreeMap<String, Provenance> = BTreeMap::new();
        let mut merged = Table::new();
        if let Some(p) = &preset {
            merged = p.layer().to_table();
            for key in PARAM_KEYS {
                provenance.insert(key.to_string(), p.provenance(key));
            }
        }
        let mut mark = |table: &Table, tag: Provenance| {
            if let Some(Value::Table(params)) = table.get("params") {
                for key in params.keys() {
                    provenance.insert(key.clone(), tag);
                }
            }
        };
        if let Some(layer) = &file_layer {
            let mut table = layer.to_table();
            table.remove("preset");
            mark(&table, Provenance::Config);
            merge_tables(&mut merged, table);
        }
        for spec in &source.overrides {
            let table = parse_override(spec)?;
            mark(&table, Provenance::Override);
            merge_tables(&mut merged, table);
        }
        merged.remove("preset");
        let layer = ConfigLayer::from_table(merged, "merged configuration")?;
        let mut scenario = Self::resolve(layer, preset_name, provenance)?;
        if let Some(dir) = &source.out_dir {
            scenario.output.dir = dir.clone();
        }
        Ok(scenario)
    }

    fn resolve(
        layer: ConfigLayer,
        preset: Option<String>,
        mut provenance: BTreeMap<String, Provenance>,
    ) -> Result<Self> {
        let missing = |key: &str| Error::Config(format!("missing required key {key}"));
        let regime = layer.model.regime.ok_or_else(|| missing("model.regime"))?;
        let spec = RegimeSpec {
            regime,
            series_order: layer.model.series_order.unwrap_or(DEFAULT_SERIES_ORDER),
            f_mode: layer.model.f_mode.unwrap_or(FMode::Exact),
        };
        let losses = layer.model.losses.unwrap_or(false);
        let params = layer.params.resolve()?;
        for key in PARAM_KEYS {
            provenance
                .entry(key.to_string())
                .or_insert(Provenance::Default);
        }
        params
            .validate()
            .map_err(|e| Error::Config(format!("params: {e}")))?;
        regime.check_conditions(&params, REGIME_TOLERANCE)?;

        let cutoffs = layer
            .truncation
            .cutoffs
            .ok_or_else(|| missing("truncation.cutoffs"))?;
        let space = HilbertSpace::new(cutoffs)?;
        let initial = layer.initial.ok_or_else(|| missing("initial"))?;
        crate::dynamics::build_initial_state(space, &initial.to_spec(), regime.frame())
            .map_err(|e| Error::Config(format!("initial: {e}")))?;

        let t_end = layer
            .time
            .t_end_per_nu1
            .ok_or_else(|| missing("time.t_end_per_nu1"))?;
        let samples = layer.time.samples.ok_or_else(|| missing("time.samples"))?;
        let time = TimeGrid::with_tolerance(
            layer.time.t_start_per_nu1.unwrap_or(0.0),
            t_end,
            samples,
            layer.time.tolerance.unwrap_or(DEFAULT_TOLERANCE),
        )
        .map_err(|e| Error::Config(format!("time: {e}")))?;

        let observables = layer.output.observables.unwrap_or_else(|| {
            Mode::ALL
                .iter()
                .map(|m| format!("n_{}", m.label()))
                .collect()
        });
        if let Some(bad) = observables.iter().find(|o| !known_observable(o)) {
            return Err(Error::UnknownObservable(bad.clone()));
        }
        if let Some(other) = layer.output.compare_with {
            other.check_conditions(&params, REGIME_TOLERANCE)?;
        }
        let output = OutputSpec {
            dir: layer.output.dir.unwrap_or_else(|| PathBuf::from(".")),
            observables,
            periods: layer.output.periods.unwrap_or(false),
            compare_with: layer.output.compare_with,
        };

        let scan = ScanSpec {
            cutoffs: layer
                .scan
                .cutoffs
                .unwrap_or_else(|| vec![cutoffs, cutoffs.map(|c| c + 1)]),
            series_orders: layer
                .scan
                .series_orders
                .unwrap_or_else(|| vec![spec.series_order]),
            tolerance: layer.scan.tolerance.unwrap_or(1e-6),
        };
        if scan.cutoffs.is_empty() || scan.series_orders.is_empty() {
            return Err(Error::Config("scan ladders must not be empty".to_string()));
        }
        if !(scan.tolerance > 0.0) {
            return Err(Error::Config(format!(
                "scan.tolerance must be > 0, got {}",
                scan.tolerance
            )));
        }

        let name = layer
            .name
            .or_else(|| preset.clone())
            .unwrap_or_else(|| "scenario".to_string());
        if name.is_empty()
            || !name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
        {
            return Err(Error::Config(format!(
                "name '{name}' must be a non-empty file stem of [A-Za-z0-9._-]"
            )));
        }

        Ok(Self {
            name,
            preset,
            regime: spec,
            losses,
            params,
            cutoffs,
            initial,
            time,
            output,
            scan,
            provenance,
            leak_threshold: LEAK_THRESHOLD,
        })
    }

    /// Simulation inputs with parameters in units of `nu_1`.
    pub fn setup(&self) -> SimulationSetup {
        SimulationSetup {
            params: self.params.in_mechanical_units(),
            regime: self.regime,
            initial: self.initial.to_spec(),
            grid: self.time,
            losses: self.losses,
        }
    }

    /// Configuration layer that reproduces this scenario when read back.
    pub fn to_layer(&self) -> ConfigLayer {
        ConfigLayer {
            preset: None,
            name: Some(self.name.clone()),
            model: ModelSection {
                regime: Some(self.regime.regime),
                f_mode: Some(self.regime.f_mode),
                series_order: Some(self.regime.series_order),
                losses: Some(self.losses),
            },
            params: ParamsSection::from_params(&self.params),
            truncation: TruncationSection {
                cutoffs: Some(self.cutoffs),
            },
            initial: Some(self.initial.clone()),
            time: TimeSection {
                t_start_per_nu1: Some(self.time.t0),
                t_end_per_nu1: Some(self.time.t1),
                samples: Some(self.time.n_samples),
                tolerance: Some(self.time.tolerance),
            },
            output: OutputSection {
                dir: Some(self.output.dir.clone()),
                observables: Some(self.output.observables.clone()),
                periods: Some(self.output.periods),
                compare_with: self.output.compare_with,
            },
            scan: ScanSection {
                cutoffs: Some(self.scan.cutoffs.clone()),
                series_orders: Some(self.scan.series_orders.clone()),
                tolerance: Some(self.scan.tolerance),
            },
            run: None,
        }
    }
}

fn read_layer(path: &Path) -> Result<ConfigLayer> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ConfigLayer::parse(&text, &path.display().to_string())
}
