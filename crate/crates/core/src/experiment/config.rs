use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::annealing::{make_linear_schedule, Schedule, ScheduleKind};
use crate::device::PBitDevice;
use crate::error::{Error, Result};
use crate::exact::{QuantumModelSpec, MAX_EXACT_SITES};
use crate::factorizer::FactorMode;
use crate::sampler::{InitialState, SamplerConfig, UpdateOrder, MAX_HISTOGRAM_SITES};
use crate::trotter::perp_coupling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Exact,
    Psl,
    Compare,
    Anneal,
    Factor,
    Device,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Exact => "exact",
            ExperimentKind::Psl => "psl",
            ExperimentKind::Compare => "compare",
            ExperimentKind::Anneal => "anneal",
            ExperimentKind::Factor => "factor",
            ExperimentKind::Device => "device",
        }
    }
}

/// Preset size: `desk` runs in seconds to minutes, `paper` uses the full
/// problem sizes and run lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Desk,
    Paper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingSection {
    /// Trotter number. Heisenberg lattices get `2n` slices.
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub beta: f64,
    #[serde(default)]
    pub sweeps: usize,
    /// Defaults to a tenth of `sweeps`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    /// Independent chains on consecutive RNG streams.
    #[serde(default = "one")]
    pub chains: usize,
    #[serde(default)]
    pub order: UpdateOrder,
    #[serde(default)]
    pub initial: InitialState,
}

impl SamplerSection {
    pub fn sampler_config(&self, seed: u64) -> SamplerConfig {
        SamplerConfig {
            burn_in: self.burn_in.unwrap_or(self.sweeps / 10),
            order: self.order,
            initial: self.initial.clone(),
            ..SamplerConfig::new(self.beta, self.sweeps, seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealSection {
    /// CA replicas per ensemble.
    #[serde(default = "ten")]
    pub replicas: usize,
    #[serde(default = "one")]
    pub ensembles: usize,
    /// Trace stride in schedule steps; 0 records nothing.
    #[serde(default)]
    pub trace_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSection {
    /// Operand width.
    pub bits: usize,
    /// Number to factor. Ignored when `forward` is set.
    #[serde(default)]
    pub product: u64,
    /// Clamp the operands instead and read the product.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forward: Option<[u64; 2]>,
    pub mode: FactorMode,
    #[serde(default = "hundred")]
    pub ensembles: usize,
    #[serde(default = "ten")]
    pub replicas: usize,
    #[serde(default = "ten")]
    pub slices: usize,
    #[serde(default = "three")]
    pub energy_scale: f64,
    #[serde(default = "yes")]
    pub merge: bool,
    #[serde(default)]
    pub order: UpdateOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviceMode {
    /// One device at fixed input.
    Trace,
    /// Ensemble-averaged output against input voltage.
    Transfer,
    /// Resistive network of devices on a mapped TFIM lattice.
    Network,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSection {
    pub mode: DeviceMode,
    #[serde(default)]
    pub cell: PBitDevice,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Integration steps for `trace` and `network`.
    #[serde(default)]
    pub steps: usize,
    #[serde(default)]
    pub v_in: f64,
    /// Transfer sweep over `[-v_max, v_max]`.
    #[serde(default = "default_v_max")]
    pub v_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_devices")]
    pub devices: usize,
    /// Seconds per device and input point.
    #[serde(default = "default_duration")]
    pub duration: f64,
    /// Target `tanh(V / v0)` width, V.
    #[serde(default = "default_v0")]
    pub v0: f64,
    /// Synapse unit resistance, ohms.
    #[serde(default = "default_r0")]
    pub r0: f64,
    /// Fit the transistor law to sampled `m_z` before running.
    #[serde(default)]
    pub calibrate: bool,
    #[serde(default = "default_cal_samples")]
    pub calibration_samples: usize,
}

fn one() -> usize {
    1
}
fn ten() -> usize {
    10
}
fn hundred() -> usize {
    100
}
fn three() -> f64 {
    3.0
}
fn yes() -> bool {
    true
}
fn default_dt() -> f64 {
    crate::device::DEFAULT_DT
}
fn default_v_max() -> f64 {
    0.2
}
fn default_points() -> usize {
    21
}
fn default_devices() -> usize {
    200
}
fn default_duration() -> f64 {
    2e-9
}
fn default_v0() -> f64 {
    0.04
}
fn default_r0() -> f64 {
    1e3
}
fn default_cal_samples() -> usize {
    200_000
}

/// One experiment, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<QuantumModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mapping: Option<MappingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anneal: Option<AnnealSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<FactorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<DeviceSection>,
}

fn config_err(key: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        reason: reason.into(),
    }
}

/// Rewrites a module error so it points at the config section it came from.
pub(crate) fn keyed(prefix: &str, err: Error) -> Error {
    match err {
        Error::InvalidParameter { name, reason } => config_err(format!("{prefix}.{name}"), reason),
        Error::Config { .. } => err,
        e if e.is_validation() => config_err(prefix, e.to_string()),
        e => e,
    }
}

fn require<'a, T>(section: &'a Option<T>, key: &str, kind: ExperimentKind) -> Result<&'a T> {
    section
        .as_ref()
        .ok_or_else(|| config_err(key, format!("section is required for `{}` experiments", kind.name())))
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            what: "experiment config".into(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config types always serialize")
    }

    pub fn model(&self) -> Result<&QuantumModelSpec> {
        require(&self.model, "model", self.experiment)
    }

    pub fn mapping(&self) -> Result<&MappingSection> {
        require(&self.mapping, "mapping", self.experiment)
    }

    pub fn sampler(&self) -> Result<&SamplerSection> {
        require(&self.sampler, "sampler", self.experiment)
    }

    pub fn factor(&self) -> Result<&FactorSection> {
        require(&self.factor, "factor", self.experiment)
    }

    pub fn device(&self) -> Result<&DeviceSection> {
        require(&self.device, "device", self.experiment)
    }

    /// Checks every section the experiment will use; nothing runs before this passes.
    pub fn validate(&self) -> Result<()> {
        if self.output_dir.as_os_str().is_empty() {
            return Err(config_err("output_dir", "must not be empty"));
        }
        match self.experiment {
            ExperimentKind::Exact => {
                self.check_model(true)?;
                self.check_beta()?;
            }
            ExperimentKind::Psl | ExperimentKind::Compare => {
                self.check_model(self.experiment == ExperimentKind::Compare)?;
                self.check_beta()?;
                self.check_sweeps()?;
                self.check_lattice()?;
            }
            ExperimentKind::Anneal => self.check_anneal()?,
            ExperimentKind::Factor => self.check_factor()?,
            ExperimentKind::Device => self.check_device()?,
        }
        Ok(())
    }

    fn check_model(&self, exact: bool) -> Result<()> {
        let model = self.model()?;
        model.validate().map_err(|e| keyed("model", e))?;
        if exact && model.sites() > MAX_EXACT_SITES {
            return Err(config_err(
                "model",
                format!("the exact oracle handles at most {MAX_EXACT_SITES} sites"),
            ));
        }
        Ok(())
    }

    fn check_beta(&self) -> Result<()> {
        let b = self.sampler()?.beta;
        if !(b.is_finite() && b > 0.0) {
            return Err(config_err("sampler.beta", format!("must be positive, got {b}")));
        }
        Ok(())
    }

    fn check_sweeps(&self) -> Result<()> {
        let s = self.sampler()?;
        s.sampler_config(self.seed).validate().map_err(|e| keyed("sampler", e))?;
        if s.chains == 0 {
            return Err(config_err("sampler.chains", "must be at least 1"));
        }
        Ok(())
    }

    /// Mapping preconditions, including the TFIM inter-slice coupling.
    fn check_lattice(&self) -> Result<()> {
        let model = self.model()?;
        let n = self.mapping()?.n;
        if n == 0 {
            return Err(config_err("mapping.n", "must be at least 1"));
        }
        if model.sites() > MAX_HISTOGRAM_SITES {
            return Err(config_err(
                "model",
                format!("slices wider than {MAX_HISTOGRAM_SITES} sites cannot be histogrammed"),
            ));
        }
        if let QuantumModelSpec::Tfim(t) = model {
            perp_coupling(self.sampler()?.beta, t.gamma_x, n).map_err(|e| {
                config_err("model.gamma_x", format!("perp_coupling precondition: {e}"))
            })?;
        }
        Ok(())
    }

    fn check_anneal(&self) -> Result<()> {
        let model = self.model()?;
        model.validate().map_err(|e| keyed("model", e))?;
        if !matches!(model, QuantumModelSpec::Tfim(_)) {
            return Err(config_err("model.kind", "annealing uses the classical part of a TFIM chain"));
        }
        let schedule = require(&self.schedule, "schedule", self.experiment)?;
        schedule.validate().map_err(|e| keyed("schedule", e))?;
        let anneal = require(&self.anneal, "anneal", self.experiment)?;
        if anneal.ensembles == 0 {
            return Err(config_err("anneal.ensembles", "must be at least 1"));
        }
        match schedule.kind {
            ScheduleKind::BetaRamp if anneal.replicas == 0 => {
                Err(config_err("anneal.replicas", "must be at least 1"))
            }
            ScheduleKind::GammaRamp if self.mapping()?.n == 0 => {
                Err(config_err("mapping.n", "must be at least 1"))
            }
            _ => Ok(()),
        }
    }

    fn check_factor(&self) -> Result<()> {
        let f = self.factor()?;
        if !(2..=31).contains(&f.bits) {
            return Err(config_err("factor.bits", format!("must lie in 2..=31, got {}", f.bits)));
        }
        if f.ensembles == 0 {
            return Err(config_err("factor.ensembles", "must be at least 1"));
        }
        if !(f.energy_scale.is_finite() && f.energy_scale > 0.0) {
            return Err(config_err("factor.energy_scale", "must be positive"));
        }
        match f.mode {
            FactorMode::Ca if f.replicas == 0 => {
                return Err(config_err("factor.replicas", "must be at least 1"));
            }
            FactorMode::Sqa if f.slices == 0 => {
                return Err(config_err("factor.slices", "must be at least 1"));
            }
            _ => {}
        }
        if let Some([p, q]) = f.forward {
            if f.mode != FactorMode::Ca {
                return Err(config_err("factor.forward", "forward multiplication runs in `ca` mode"));
            }
            for (key, v) in [("factor.forward", p), ("factor.forward", q)] {
                if v >> f.bits != 0 {
                    return Err(config_err(key, format!("{v} does not fit in {} bits", f.bits)));
                }
            }
        } else if f.product >> (2 * f.bits) != 0 {
            return Err(config_err(
                "factor.product",
                format!("{} does not fit in the {}-bit product register", f.product, 2 * f.bits),
            ));
        }
        let schedule = self.factor_schedule()?;
        schedule.validate().map_err(|e| keyed("schedule", e))?;
        let want = match f.mode {
            FactorMode::Ca => ScheduleKind::BetaRamp,
            FactorMode::Sqa => ScheduleKind::GammaRamp,
        };
        if schedule.kind != want {
            return Err(config_err("schedule.kind", "does not match factor.mode"));
        }
        Ok(())
    }

    /// The configured schedule, or the default for the factor mode.
    pub fn factor_schedule(&self) -> Result<Schedule> {
        if let Some(s) = &self.schedule {
            return Ok(s.clone());
        }
        let f = self.factor()?;
        match (f.mode, f.forward) {
            // cold and long, scaled with the penalties
            (FactorMode::Ca, Some(_)) => {
                make_linear_schedule(0.3 * f.energy_scale, 0.1 * f.energy_scale, 200_000)
            }
            (FactorMode::Ca, None) => make_linear_schedule(1.0, 0.1, 10_000),
            (FactorMode::Sqa, _) => Schedule::transverse_field(3.0, 0.1, 10_000, 10.0),
        }
        .map_err(|e| keyed("schedule", e))
    }

    fn check_device(&self) -> Result<()> {
        let d = self.device()?;
        d.cell.validate().map_err(|e| keyed("device.cell", e))?;
        if !(d.dt.is_finite() && d.dt > 0.0) {
            return Err(config_err("device.dt", "must be positive"));
        }
        if d.calibrate && d.calibration_samples == 0 {
            return Err(config_err("device.calibration_samples", "must be at least 1"));
        }
        if !(d.v0.is_finite() && d.v0 > 0.0) {
            return Err(config_err("device.v0", "must be positive"));
        }
        match d.mode {
            DeviceMode::Trace => {
                if d.steps == 0 {
                    return Err(config_err("device.steps", "must be at least 1"));
                }
            }
            DeviceMode::Transfer => {
                if d.points < 2 {
                    return Err(config_err("device.points", "need at least 2"));
                }
                if d.devices == 0 {
                    return Err(config_err("device.devices", "must be at least 1"));
                }
                if !(d.v_max.is_finite() && d.v_max > 0.0) {
                    return Err(config_err("device.v_max", "must be positive"));
                }
                if !(d.duration.is_finite() && d.duration >= d.dt) {
                    return Err(config_err("device.duration", "must cover at least one step"));
                }
            }
            DeviceMode::Network => {
                if d.steps == 0 {
                    return Err(config_err("device.steps", "must be at least 1"));
                }
                if !(d.r0.is_finite() && d.r0 > 0.0) {
                    return Err(config_err("device.r0", "must be positive"));
                }
                self.check_model(true)?;
                if !matches!(self.model()?, QuantumModelSpec::Tfim(_)) {
                    return Err(config_err("model.kind", "resistive synapses carry pair terms only"));
                }
                self.check_beta()?;
                if let Some(s) = &self.sampler {
                    if s.sweeps > 0 {
                        self.check_sweeps()?;
                    }
                }
                self.check_lattice()?;
            }
        }
        Ok(())
    }

    /// Built-in configuration for `kind` at `scale`.
    pub fn preset(kind: ExperimentKind, scale: Scale, seed: u64) -> Self {
        let small = QuantumModelSpec::tfim_uniform(4, 1.0, 10.0, 0.0);
        let large = QuantumModelSpec::tfim_uniform(8, 2.0, 5.0, 1.0);
        let (model, n, beta, sweeps) = match scale {
            Scale::Desk => (small, 10, 0.5, 100_000),
            Scale::Paper => (large, 250, 10.0, 100_000),
        };
        let sampler = SamplerSection {
            beta,
            sweeps,
            burn_in: None,
            chains: 1,
            order: UpdateOrder::Sequential,
            initial: InitialState::Random,
        };
        let mut cfg = ExperimentConfig {
            experiment: kind,
            seed,
            output_dir: PathBuf::from("results").join(kind.name()),
            model: Some(model),
            mapping: Some(MappingSection { n }),
            sampler: Some(sampler),
            schedule: None,
            anneal: None,
            factor: None,
            device: None,
        };
        match kind {
            ExperimentKind::Exact | ExperimentKind::Psl | ExperimentKind::Compare => {}
            ExperimentKind::Anneal => {
                cfg.model = Some(QuantumModelSpec::Tfim(crate::exact::TfimSpec {
                    bonds: vec![1.0, -1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0],
                    gamma_x: 0.0,
                    gamma_z: 0.0,
                }));
                cfg.sampler = None;
                cfg.mapping = Some(MappingSection { n: 10 });
                let steps = match scale {
                    Scale::Desk => 1_000,
                    Scale::Paper => 10_000,
                };
                cfg.schedule = Some(make_linear_schedule(1.0, 0.1, steps).expect("valid preset"));
                cfg.anneal = Some(AnnealSection {
                    replicas: 10,
                    ensembles: 10,
                    trace_every: steps / 100,
                });
            }
            ExperimentKind::Factor => {
                cfg.model = None;
                cfg.mapping = None;
                cfg.sampler = None;
                let (bits, product) = match scale {
                    Scale::Desk => (4, 35),
                    Scale::Paper => (4, 143),
                };
                cfg.factor = Some(FactorSection {
                    bits,
                    product,
                    forward: None,
                    mode: FactorMode::Sqa,
                    ensembles: 100,
                    replicas: 10,
                    slices: 10,
                    energy_scale: 3.0,
                    merge: true,
                    order: UpdateOrder::Sequential,
                });
            }
            ExperimentKind::Device => {
                cfg.model = Some(QuantumModelSpec::tfim_uniform(4, 1.0, 10.0, 0.0));
                cfg.mapping = Some(MappingSection { n: 10 });
                cfg.sampler = Some(SamplerSection {
                    beta: 0.5,
                    sweeps: 0,
                    burn_in: None,
                    chains: 1,
                    order: UpdateOrder::Sequential,
                    initial: InitialState::Random,
                });
                cfg.device = Some(DeviceSection {
                    mode: DeviceMode::Network,
                    cell: PBitDevice::default(),
                    dt: default_dt(),
                    steps: 250_000,
                    v_in: 0.0,
                    v_max: default_v_max(),
                    points: default_points(),
                    devices: default_devices(),
                    duration: default_duration(),
                    v0: default_v0(),
                    r0: default_r0(),
                    calibrate: scale == Scale::Paper,
                    calibration_samples: 1_000_000,
                });
            }
        }
        cfg
    }
}
