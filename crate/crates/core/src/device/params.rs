use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CGS-Gaussian constants.
pub mod constants {
    /// Gyromagnetic ratio, rad / (s Oe).
    pub const GAMMA: f64 = 1.76e7;
    /// Bohr magneton, emu.
    pub const MU_B: f64 = 9.274e-21;
    /// Boltzmann constant, erg / K.
    pub const K_B: f64 = 1.380649e-16;
    /// Elementary charge, C.
    pub const Q: f64 = 1.602176634e-19;
}

/// Circular low-barrier free layer with its easy plane normal to x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagnetParams {
    /// Saturation magnetization, emu/cc.
    pub ms: f64,
    pub diameter_nm: f64,
    pub thickness_nm: f64,
    pub alpha: f64,
    /// Kelvin.
    pub temperature: f64,
    /// Include the easy-plane field `-4 pi Ms m_x x`. Disabled only for
    /// analytic precession checks.
    #[serde(default = "yes")]
    pub shape_anisotropy: bool,
}

fn yes() -> bool {
    true
}

impl Default for MagnetParams {
    fn default() -> Self {
        MagnetParams {
            ms: 1100.0,
            diameter_nm: 22.0,
            thickness_nm: 2.0,
            alpha: 0.01,
            temperature: 300.0,
            shape_anisotropy: true,
        }
    }
}

impl MagnetParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("ms", self.ms),
            ("diameter_nm", self.diameter_nm),
            ("thickness_nm", self.thickness_nm),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::param("alpha", "must be >= 0"));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::param("temperature", "must be >= 0"));
        }
        Ok(())
    }

    /// Volume in cc.
    pub fn volume(&self) -> f64 {
        let r = self.diameter_nm * 0.5e-7;
        std::f64::consts::PI * r * r * self.thickness_nm * 1e-7
    }

    /// Number of Bohr magnetons, `Ms Vol / mu_B`.
    pub fn n_bohr(&self) -> f64 {
        self.ms * self.volume() / constants::MU_B
    }

    /// `4 pi Ms` in Oe.
    pub fn demag_field(&self) -> f64 {
        4.0 * std::f64::consts::PI * self.ms
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MtjParams {
    /// `(R_AP - R_P) / R_P`.
    pub tmr: f64,
    /// Mean conductance `(1/R_AP + 1/R_P) / 2`, siemens.
    pub g0: f64,
    /// Spin polarization of the tunnelling current.
    pub polarization: f64,
}

impl Default for MtjParams {
    fn default() -> Self {
        MtjParams {
            tmr: 1.1,
            g0: 1.0 / 23.4e3,
            polarization: 0.5,
        }
    }
}

impl MtjParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tmr.is_finite() && self.tmr > 0.0) {
            return Err(Error::param("tmr", "must be positive"));
        }
        if !(self.g0.is_finite() && self.g0 > 0.0) {
            return Err(Error::param("g0", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.polarization) {
            return Err(Error::param("polarization", "must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn r_p(&self) -> f64 {
        (2.0 + self.tmr) / (2.0 * self.g0 * (1.0 + self.tmr))
    }

    pub fn r_ap(&self) -> f64 {
        self.r_p() * (1.0 + self.tmr)
    }

    /// `(R_AP - R_P) / (R_AP + R_P)`.
    pub fn contrast(&self) -> f64 {
        self.tmr / (2.0 + self.tmr)
    }
}

/// Conductance of the junction for free-layer component `m_z` along the fixed layer.
pub fn mtj_conductance(m_z: f64, mtj: &MtjParams) -> f64 {
    mtj.g0 * (1.0 + m_z * mtj.contrast())
}
