use nalgebra::Vector3;
use rand::Rng;
use rand_distr::StandardNormal;

use super::params::{constants, MagnetParams};
use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnetizationState {
    pub m: Vec3,
    /// Seconds.
    pub t: f64,
}

impl MagnetizationState {
    pub fn new(m: Vec3) -> Result<Self> {
        let norm = m.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::param("m", "magnetization must be a nonzero vector"));
        }
        Ok(MagnetizationState { m: m / norm, t: 0.0 })
    }

    /// Uniformly random direction in the easy (y-z) plane.
    pub fn random_in_plane<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        MagnetizationState {
            m: Vec3::new(0.0, phi.sin(), phi.cos()),
            t: 0.0,
        }
    }
}

/// Per-axis standard deviation of the thermal field for step `dt`, in Oe:
/// `sqrt(2 alpha k_B T / (gamma Ms Vol dt))`.
pub fn thermal_field_sigma(params: &MagnetParams, dt: f64) -> Result<f64> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    let num = 2.0 * params.alpha * constants::K_B * params.temperature;
    let den = constants::GAMMA * params.ms * params.volume() * dt;
    Ok((num / den).sqrt())
}

/// Gaussian thermal field sampler.
#[derive(Debug, Clone, Copy)]
pub struct ThermalNoise {
    pub sigma: f64,
}

impl ThermalNoise {
    pub fn new(params: &MagnetParams, dt: f64) -> Result<Self> {
        Ok(ThermalNoise {
            sigma: thermal_field_sigma(params, dt)?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        if self.sigma == 0.0 {
            return Vec3::zeros();
        }
        let g = |rng: &mut R| rng.sample::<f64, _>(StandardNormal) * self.sigma;
        Vec3::new(g(rng), g(rng), g(rng))
    }
}

fn internal_field(m: &Vec3, params: &MagnetParams) -> Vec3 {
    if params.shape_anisotropy {
        Vec3::new(-params.demag_field() * m.x, 0.0, 0.0)
    } else {
        Vec3::zeros()
    }
}

fn rhs(m: &Vec3, h: &Vec3, i_s: &Vec3, params: &MagnetParams, qn: f64) -> Vec3 {
    let a = params.alpha;
    let g = constants::GAMMA;
    let mxh = m.cross(h);
    let precession = -g * mxh - a * g * m.cross(&mxh);
    let torque = m.cross(&i_s.cross(m)) / qn + a * m.cross(i_s) / qn;
    (precession + torque) / (1.0 + a * a)
}

/// One Heun step of the stochastic LLG equation. `h_ext` and `noise` are
/// in Oe, `i_s` is the spin current in amperes. The same noise sample is
/// used in predictor and corrector, and `m` is renormalized afterwards.
pub fn sllg_step(
    state: &MagnetizationState,
    h_ext: &Vec3,
    i_s: &Vec3,
    noise: &Vec3,
    params: &MagnetParams,
    dt: f64,
) -> Result<MagnetizationState> {
    let qn = constants::Q * params.n_bohr();
    let m = state.m;
    let h0 = h_ext + internal_field(&m, params) + noise;
    let k0 = rhs(&m, &h0, i_s, params, qn);
    let step = k0 * dt;
    let delta = step.norm();
    if !delta.is_finite() || delta > 0.5 {
        return Err(Error::StepTooLarge { delta });
    }
    let mp = (m + step).normalize();
    let h1 = h_ext + internal_field(&mp, params) + noise;
    let k1 = rhs(&mp, &h1, i_s, params, qn);
    let next = m + (k0 + k1) * (0.5 * dt);
    Ok(MagnetizationState {
        m: next.normalize(),
        t: state.t + dt,
    })
}

/// Lag (seconds) at which the normalized autocorrelation of `trace` first
/// drops below `1/e`.
pub fn autocorrelation_time(trace: &[f64], dt: f64) -> Result<f64> {
    let n = trace.len();
    let mean = trace.iter().sum::<f64>() / n.max(1) as f64;
    let c: Vec<f64> = trace.iter().map(|x| x - mean).collect();
    let var = c.iter().map(|x| x * x).sum::<f64>() / n.max(1) as f64;
    if n < 2 || var <= 0.0 {
        return Err(Error::TraceTooShort { len: n });
    }
    let threshold = (-1.0f64).exp();
    for lag in 1..n / 2 {
        let r = c[..n - lag]
            .iter()
            .zip(&c[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / ((n - lag) as f64 * var);
        if r < threshold {
            return Ok(lag as f64 * dt);
        }
    }
    Err(Error::TraceTooShort { len: n })
}
