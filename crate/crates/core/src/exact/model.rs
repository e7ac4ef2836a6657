use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest chain the dense oracle accepts (a 4096 x 4096 operator).
pub const MAX_EXACT_SITES: usize = 12;

/// Transverse-field Ising chain with periodic boundary.
///
/// `bonds[i]` couples site `i` to site `(i + 1) % sites`, so the list has
/// exactly one entry per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfimSpec {
    pub bonds: Vec<f64>,
    pub gamma_x: f64,
    pub gamma_z: f64,
}

impl TfimSpec {
    pub fn uniform(sites: usize, coupling: f64, gamma_x: f64, gamma_z: f64) -> Self {
        TfimSpec {
            bonds: vec![coupling; sites],
            gamma_x,
            gamma_z,
        }
    }

    pub fn sites(&self) -> usize {
        self.bonds.len()
    }
}

/// XYZ Heisenberg chain in a transverse field, periodic boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergSpec {
    pub sites: usize,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub gamma_x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Tfim,
    Heisenberg,
}

/// Declarative description of a 1D quantum spin model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QuantumModelSpec {
    Tfim(TfimSpec),
    Heisenberg(HeisenbergSpec),
}

impl QuantumModelSpec {
    pub fn tfim_uniform(sites: usize, coupling: f64, gamma_x: f64, gamma_z: f64) -> Self {
        QuantumModelSpec::Tfim(TfimSpec::uniform(sites, coupling, gamma_x, gamma_z))
    }

    pub fn heisenberg(sites: usize, jx: f64, jy: f64, jz: f64, gamma_x: f64) -> Self {
        QuantumModelSpec::Heisenberg(HeisenbergSpec {
            sites,
            jx,
            jy,
            jz,
            gamma_x,
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            QuantumModelSpec::Tfim(_) => ModelKind::Tfim,
            QuantumModelSpec::Heisenberg(_) => ModelKind::Heisenberg,
        }
    }

    pub fn sites(&self) -> usize {
        match self {
            QuantumModelSpec::Tfim(t) => t.sites(),
            QuantumModelSpec::Heisenberg(h) => h.sites,
        }
    }

    pub fn gamma_x(&self) -> f64 {
        match self {
            QuantumModelSpec::Tfim(t) => t.gamma_x,
            QuantumModelSpec::Heisenberg(h) => h.gamma_x,
        }
    }

    /// Checks the structural invariants shared by the oracle and the mappers.
    pub fn validate(&self) -> Result<()> {
        let sites = self.sites();
        if sites == 0 {
            return Err(Error::InvalidModel(
                "a chain needs at least one site".into(),
            ));
        }
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite, got {v}")))
            }
        };
        match self {
            QuantumModelSpec::Tfim(t) => {
                for &j in &t.bonds {
                    finite("bonds", j)?;
                }
                finite("gamma_x", t.gamma_x)?;
                finite("gamma_z", t.gamma_z)?;
            }
            QuantumModelSpec::Heisenberg(h) => {
                if h.sites % 2 != 0 {
                    return Err(Error::InvalidModel(format!(
                        "Heisenberg chessboard pairing needs an even site count, got {}",
                        h.sites
                    )));
                }
                finite("jx", h.jx)?;
                finite("jy", h.jy)?;
                finite("jz", h.jz)?;
                finite("gamma_x", h.gamma_x)?;
            }
        }
        Ok(())
    }
}
