use serde::{Deserialize, Serialize};

use super::{DeviceSim, PBitDevice};
use crate::error::{Error, Result};
use crate::graph::{InteractionGraph, SliceLayout};
use crate::histogram::{state_of_bipolar, Histogram};
use crate::sampler::MAX_HISTOGRAM_SITES;

/// Resistive synapse parameters: outputs `V_DD/2 * m` are summed through
/// resistors into an ideal op-amp with feedback `R_ref`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitMapping {
    pub v_dd: f64,
    pub v0: f64,
    pub r_ref: f64,
    pub r0: f64,
}

/// One synapse resistor. Negative weights take the inverted output copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Synapse {
    pub resistance: f64,
    pub inverted: bool,
}

pub fn circuit_mapping(v_dd: f64, v0: f64, r_ref: f64, r0: f64) -> Result<CircuitMapping> {
    for (name, v) in [("v_dd", v_dd), ("v0", v0), ("r_ref", r_ref), ("r0", r0)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    Ok(CircuitMapping { v_dd, v0, r_ref, r0 })
}

impl CircuitMapping {
    /// `V_DD R_ref / (2 V0 R0)`.
    pub fn beta(&self) -> f64 {
        self.v_dd * self.r_ref / (2.0 * self.v0 * self.r0)
    }

    /// `R = R0 / |W|`.
    pub fn synapse(&self, weight: f64) -> Result<Synapse> {
        if weight == 0.0 {
            return Err(Error::OpenCircuit);
        }
        if !weight.is_finite() {
            return Err(Error::param("weight", "must be finite"));
        }
        Ok(Synapse {
            resistance: self.r0 / weight.abs(),
            inverted: weight < 0.0,
        })
    }

    /// `W = R0 / R`, negative for inverted synapses.
    pub fn weight(&self, synapse: &Synapse) -> f64 {
        let w = self.r0 / synapse.resistance;
        if synapse.inverted {
            -w
        } else {
            w
        }
    }

    /// Op-amp output for a resistor carrying `V_DD/2 * m`.
    fn gain(&self, synapse: &Synapse) -> f64 {
        let g = self.r_ref * self.v_dd / 2.0 / synapse.resistance;
        if synapse.inverted {
            -g
        } else {
            g
        }
    }
}

/// Network of device p-bits on a pairwise graph. Biases are resistors to a
/// fixed `V_DD/2` source.
pub struct DeviceNetwork {
    pub device: PBitDevice,
    pub mapping: CircuitMapping,
    pub layout: SliceLayout,
    inputs: Vec<Vec<(u32, f64)>>,
    bias: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DeviceRun {
    pub histogram: Histogram,
    pub counts: Vec<u64>,
    pub steps: usize,
}

impl DeviceNetwork {
    pub fn new(
        graph: &InteractionGraph,
        layout: SliceLayout,
        mapping: CircuitMapping,
        device: PBitDevice,
    ) -> Result<Self> {
        device.validate()?;
        if !graph.quad_terms().is_empty() {
            return Err(Error::param("graph", "resistive synapses support pair terms only"));
        }
        if layout.num_pbits() != graph.num_pbits() {
            return Err(Error::DimensionMismatch {
                left: layout.num_pbits(),
                right: graph.num_pbits(),
            });
        }
        if layout.sites > MAX_HISTOGRAM_SITES {
            return Err(Error::param("sites", "slice too wide to histogram"));
        }
        let n = graph.num_pbits();
        let mut inputs = vec![Vec::new(); n];
        for t in graph.pair_terms() {
            if t.weight() == 0.0 {
                continue;
            }
            let g = mapping.gain(&mapping.synapse(t.weight())?);
            let (i, j) = (t.members()[0], t.members()[1]);
            inputs[i].push((j as u32, g));
            inputs[j].push((i as u32, g));
        }
        let bias = graph
            .biases()
            .iter()
            .map(|&b| {
                if b == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(mapping.gain(&mapping.synapse(b)?))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DeviceNetwork {
            device,
            mapping,
            layout,
            inputs,
            bias,
        })
    }

    /// Op-amp output voltage feeding p-bit `i`.
    pub fn input_voltage(&self, outputs: &[i8], i: usize) -> f64 {
        self.inputs[i]
            .iter()
            .fold(self.bias[i], |acc, &(j, g)| acc + g * f64::from(outputs[j as usize]))
    }

    /// Runs every device for `steps` steps of `dt`. All magnets advance
    /// together; inputs are recomputed from the latest outputs each step and
    /// the thresholded state is pooled into the slice histogram every step.
    pub fn run(&self, steps: usize, dt: f64, seed: u64) -> Result<DeviceRun> {
        let n = self.inputs.len();
        let mut sims = (0..n)
            .map(|k| DeviceSim::new(&self.device, dt, seed, k as u64))
            .collect::<Result<Vec<_>>>()?;
        let mut outputs: Vec<i8> = sims
            .iter()
            .map(|s| self.device.output(0.0, s.state.m.z))
            .collect();
        let mut v_in = vec![0.0; n];
        let mut counts = vec![0u64; 1 << self.layout.sites];
        for _ in 0..steps {
            for (i, v) in v_in.iter_mut().enumerate() {
                *v = self.input_voltage(&outputs, i);
            }
            for (i, sim) in sims.iter_mut().enumerate() {
                outputs[i] = sim.step(v_in[i])?;
            }
            for k in 0..self.layout.slices {
                counts[state_of_bipolar(self.layout.slice(&outputs, k))] += 1;
            }
        }
        Ok(DeviceRun {
            histogram: Histogram::from_counts(self.layout.sites, &counts)?,
            counts,
            steps,
        })
    }
}
