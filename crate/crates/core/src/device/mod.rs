//! Device-level p-bit: a zero-barrier in-plane magnet integrated with the
//! stochastic LLG equation, read through an MTJ / transistor divider and an
//! ideal comparator.

mod network;
mod params;
mod sllg;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::chain_rng;

pub use network::{circuit_mapping, CircuitMapping, DeviceNetwork, DeviceRun, Synapse};
pub use params::{constants, mtj_conductance, MagnetParams, MtjParams};
pub use sllg::{
    autocorrelation_time, sllg_step, thermal_field_sigma, MagnetizationState, ThermalNoise, Vec3,
};

/// Default integration step, seconds.
pub const DEFAULT_DT: f64 = 1e-12;

/// One p-bit cell. The transistor is modelled by the conductance law
/// `G_T(V) = G0 (1 + r tanh((V - v_offset) / v_slope))` with `r` the MTJ
/// contrast, so its range matches the junction's and `R_T(v_offset) = 1 / G0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PBitDevice {
    #[serde(default)]
    pub magnet: MagnetParams,
    #[serde(default)]
    pub mtj: MtjParams,
    /// Supply voltage, V.
    #[serde(default = "default_vdd")]
    pub v_dd: f64,
    /// Transistor slope, V.
    #[serde(default = "default_slope")]
    pub v_slope: f64,
    /// Input trim, V. Cancels the spin-torque pull of the read current.
    #[serde(default = "default_offset")]
    pub v_offset: f64,
}

fn default_vdd() -> f64 {
    0.8
}

// Frozen output of `calibrate_transistor` at `v0 = 40 mV` for the default cell.
fn default_slope() -> f64 {
    0.0244
}

fn default_offset() -> f64 {
    -0.0022
}

impl Default for PBitDevice {
    fn default() -> Self {
        PBitDevice {
            magnet: MagnetParams::default(),
            mtj: MtjParams::default(),
            v_dd: default_vdd(),
            v_slope: default_slope(),
            v_offset: default_offset(),
        }
    }
}

impl PBitDevice {
    pub fn validate(&self) -> Result<()> {
        self.magnet.validate()?;
        self.mtj.validate()?;
        if !(self.v_dd.is_finite() && self.v_dd > 0.0) {
            return Err(Error::param("v_dd", "must be positive"));
        }
        if !(self.v_slope.is_finite() && self.v_slope > 0.0) {
            return Err(Error::param("v_slope", "must be positive"));
        }
        if !self.v_offset.is_finite() {
            return Err(Error::param("v_offset", "must be finite"));
        }
        Ok(())
    }

    pub fn transistor_conductance(&self, v_in: f64) -> f64 {
        self.mtj.g0 * (1.0 + self.mtj.contrast() * ((v_in - self.v_offset) / self.v_slope).tanh())
    }

    pub fn transistor_resistance(&self, v_in: f64) -> f64 {
        1.0 / self.transistor_conductance(v_in)
    }

    /// Mid-point voltage of the transistor (to ground) / MTJ (to supply) divider.
    pub fn divider_voltage(&self, v_in: f64, m_z: f64) -> f64 {
        let rt = self.transistor_resistance(v_in);
        let rm = 1.0 / mtj_conductance(m_z, &self.mtj);
        self.v_dd * rt / (rt + rm)
    }

    /// Inverting comparator at `V_DD / 2`: `+1` exactly when the transistor
    /// resistance is below the MTJ resistance.
    pub fn output(&self, v_in: f64, m_z: f64) -> i8 {
        let rt = self.transistor_resistance(v_in);
        let rm = 1.0 / mtj_conductance(m_z, &self.mtj);
        if rt < rm {
            1
        } else {
            -1
        }
    }

    /// Spin current `P I_MTJ z` through the series divider, amperes.
    pub fn spin_current(&self, v_in: f64, m_z: f64) -> Vec3 {
        let rt = self.transistor_resistance(v_in);
        let rm = 1.0 / mtj_conductance(m_z, &self.mtj);
        Vec3::new(0.0, 0.0, self.mtj.polarization * self.v_dd / (rt + rm))
    }
}

/// A running device: magnet state, noise source and RNG.
pub struct DeviceSim<'a> {
    device: &'a PBitDevice,
    noise: ThermalNoise,
    dt: f64,
    pub state: MagnetizationState,
    rng: rand_chacha::ChaCha8Rng,
}

impl<'a> DeviceSim<'a> {
    pub fn new(device: &'a PBitDevice, dt: f64, seed: u64, stream: u64) -> Result<Self> {
        device.validate()?;
        let mut rng = chain_rng(seed, stream);
        Ok(DeviceSim {
            device,
            noise: ThermalNoise::new(&device.magnet, dt)?,
            dt,
            state: MagnetizationState::random_in_plane(&mut rng),
            rng,
        })
    }

    /// Advances one step at input `v_in` and returns the new output.
    pub fn step(&mut self, v_in: f64) -> Result<i8> {
        let i_s = self.device.spin_current(v_in, self.state.m.z);
        let h = self.noise.sample(&mut self.rng);
        self.state = sllg_step(&self.state, &Vec3::zeros(), &i_s, &h, &self.device.magnet, self.dt)?;
        Ok(self.device.output(v_in, self.state.m.z))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub m: Vec3,
    pub conductance: f64,
    pub v_out: f64,
}

/// Single-device trace at fixed input.
pub fn simulate_trace(
    device: &PBitDevice,
    v_in: f64,
    steps: usize,
    dt: f64,
    seed: u64,
) -> Result<Vec<TraceRow>> {
    let mut sim = DeviceSim::new(device, dt, seed, 0)?;
    let mut rows = Vec::with_capacity(steps);
    for _ in 0..steps {
        let out = sim.step(v_in)?;
        rows.push(TraceRow {
            t: sim.state.t,
            m: sim.state.m,
            conductance: mtj_conductance(sim.state.m.z, &device.mtj),
            v_out: f64::from(out) * device.v_dd / 2.0,
        });
    }
    Ok(rows)
}

/// CSV with columns `t_ps,mx,my,mz,G_S,Vout_V`.
pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "t_ps,mx,my,mz,G_S,Vout_V")?;
    for r in rows {
        writeln!(
            out,
            "{:.3},{:.9},{:.9},{:.9},{:.9e},{}",
            r.t * 1e12,
            r.m.x,
            r.m.y,
            r.m.z,
            r.conductance,
            r.v_out
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferConfig {
    /// Simulated time per device and input point, seconds.
    pub duration: f64,
    /// Devices averaged per input point.
    pub devices: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub seed: u64,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferPoint {
    pub v_in: f64,
    pub mean: f64,
    /// Standard error across devices.
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferCurve {
    pub points: Vec<TransferPoint>,
}

impl TransferCurve {
    /// CSV with columns `vin_V,avg_out`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "vin_V,avg_out")?;
        for p in &self.points {
            writeln!(out, "{},{:.6}", p.v_in, p.mean)?;
        }
        Ok(())
    }

    /// Least-squares `tanh(V / v0)` fit: returns `(v0, max |deviation|)`.
    pub fn fit_tanh(&self) -> (f64, f64) {
        let sse = |v0: f64| -> f64 {
            self.points
                .iter()
                .map(|p| (p.mean - (p.v_in / v0).tanh()).powi(2))
                .sum()
        };
        let v0 = golden_min(sse, 1e-4, 1.0);
        (v0, self.max_deviation(v0))
    }

    pub fn max_deviation(&self, v0: f64) -> f64 {
        self.points
            .iter()
            .map(|p| (p.mean - (p.v_in / v0).tanh()).abs())
            .fold(0.0, f64::max)
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Averaged comparator output against input voltage. Each input point runs
/// `devices` independent magnets from random in-plane starts.
pub fn simulate_transfer(
    device: &PBitDevice,
    v_in: &[f64],
    config: &TransferConfig,
) -> Result<TransferCurve> {
    device.validate()?;
    if config.devices == 0 {
        return Err(Error::param("devices", "must be at least 1"));
    }
    let steps = (config.duration / config.dt).round() as usize;
    if steps == 0 {
        return Err(Error::param("duration", "shorter than one time step"));
    }
    let points = v_in
        .par_iter()
        .enumerate()
        .map(|(k, &v)| {
            let mut means = Vec::with_capacity(config.devices);
            for d in 0..config.devices {
                let stream = (k * config.devices + d) as u64;
                let mut sim = DeviceSim::new(device, config.dt, config.seed, stream)?;
                let mut acc = 0i64;
                for _ in 0..steps {
                    acc += i64::from(sim.step(v)?);
                }
                means.push(acc as f64 / steps as f64);
            }
            let (mean, stderr) = crate::sampler::mean_and_stderr(&means);
            Ok(TransferPoint {
                v_in: v,
                mean,
                stderr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransferCurve { points })
}

/// `m_z` samples from a free device at zero input, every `stride` steps.
pub fn sample_mz(device: &PBitDevice, samples: usize, stride: usize, dt: f64, seed: u64) -> Result<Vec<f64>> {
    let mut sim = DeviceSim::new(device, dt, seed, 0)?;
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        for _ in 0..stride.max(1) {
            sim.step(0.0)?;
        }
        out.push(sim.state.m.z);
    }
    Ok(out)
}

/// Transfer curve implied by a set of `m_z` samples, ignoring spin torque.
pub fn predicted_transfer(device: &PBitDevice, mz_samples: &[f64], v_in: &[f64]) -> TransferCurve {
    let points = v_in
        .iter()
        .map(|&v| {
            let s: i64 = mz_samples.iter().map(|&mz| i64::from(device.output(v, mz))).sum();
            TransferPoint {
                v_in: v,
                mean: s as f64 / mz_samples.len() as f64,
                stderr: 0.0,
            }
        })
        .collect();
    TransferCurve { points }
}

/// Transistor parameters fitted by [`calibrate_transistor`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransistorCalibration {
    pub v_slope: f64,
    pub v_offset: f64,
}

impl TransistorCalibration {
    pub fn apply(&self, device: &PBitDevice) -> PBitDevice {
        PBitDevice {
            v_slope: self.v_slope,
            v_offset: self.v_offset,
            ..device.clone()
        }
    }
}

/// Chooses `v_slope` so the transfer curve best matches `tanh(V / v0)` in
/// the max-deviation sense over `|V| <= 5 v0`, using `m_z` samples of the
/// free magnet. For each slope the offset puts the threshold at the sample
/// median, so the predicted output at zero input is zero.
pub fn calibrate_transistor(v0: f64, mz_samples: &[f64]) -> Result<TransistorCalibration> {
    if mz_samples.is_empty() {
        return Err(Error::EmptyInput("m_z samples"));
    }
    if !(v0.is_finite() && v0 > 0.0) {
        return Err(Error::param("v0", "must be positive"));
    }
    let mut sorted = mz_samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = 0.5 * (sorted[(n - 1) / 2] + sorted[n / 2]);
    let at = |vs: f64| TransistorCalibration {
        v_slope: vs,
        v_offset: -vs * median.clamp(-0.999, 0.999).atanh(),
    };
    let grid: Vec<f64> = (-50..=50).map(|k| f64::from(k) * v0 / 10.0).collect();
    // output is +1 exactly when tanh((V - v_offset) / v_slope) > m_z
    let deviation = |vs: f64| {
        let c = at(vs);
        grid.iter()
            .map(|&v| {
                let x = ((v - c.v_offset) / vs).tanh();
                let below = sorted.partition_point(|&m| m < x);
                let mean = 2.0 * below as f64 / n as f64 - 1.0;
                (mean - (v / v0).tanh()).abs()
            })
            .fold(0.0, f64::max)
    };
    // coarse scan, then refine around the best cell
    let coarse: Vec<f64> = (1..=60).map(|k| f64::from(k) * v0 / 30.0).collect();
    let best = coarse
        .iter()
        .copied()
        .min_by(|a, b| deviation(*a).total_cmp(&deviation(*b)))
        .expect("non-empty scan");
    let h = v0 / 30.0;
    Ok(at(golden_min(deviation, (best - h).max(h / 10.0), best + h)))
}
