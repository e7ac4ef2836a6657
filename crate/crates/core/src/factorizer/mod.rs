//! Invertible multiplier built from AND and full-adder blocks. Clamping the
//! product register and annealing the rest factors the product.

mod circuit;
mod gates;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use crate::annealing::ClampSet;
use crate::annealing::{
    ensemble_stats, run_ca_clamped, run_sqa_clamped, AnnealConfig, AnnealResult, Schedule,
    SuccessStats,
};
use crate::error::{Error, Result};
use crate::sampler::{InitialState, PBitState, UpdateOrder};
pub use circuit::{build_multiplier, decode_factors, decode_product, role_counts, CircuitGraph, NodeRole};
pub use gates::{gate_block, GateBlock, GateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorMode {
    Ca,
    Sqa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorConfig {
    pub seed: u64,
    /// CA: independent replicas per ensemble, all counted as trials.
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    /// SQA: Trotter slices.
    #[serde(default = "default_replicas")]
    pub slices: usize,
    /// Multiplies every gate penalty before annealing.
    #[serde(default = "default_scale")]
    pub energy_scale: f64,
    #[serde(default)]
    pub order: UpdateOrder,
}

fn default_replicas() -> usize {
    10
}

fn default_scale() -> f64 {
    1.0
}

impl FactorConfig {
    pub fn new(seed: u64) -> Self {
        FactorConfig {
            seed,
            replicas: default_replicas(),
            slices: default_replicas(),
            energy_scale: default_scale(),
            order: UpdateOrder::Sequential,
        }
    }
}

/// One decoded answer: CA produces one per replica, SQA one per ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FactorOutcome {
    pub ensemble_id: usize,
    pub p: u64,
    pub q: u64,
    pub success: bool,
}

#[derive(Debug, Clone)]
pub struct FactorReport {
    pub n: u64,
    pub mode: FactorMode,
    pub outcomes: Vec<FactorOutcome>,
    /// Keyed by the decoded `(p, q)`.
    pub stats: SuccessStats<(u64, u64)>,
}

impl FactorReport {
    pub fn success_probability(&self) -> f64 {
        self.stats.probability()
    }

    /// Share of trials landing on `(p, q)` in that order.
    pub fn share(&self, p: u64, q: u64) -> f64 {
        self.stats.share(&(p, q))
    }

    /// CSV with columns `ensemble_id,p,q,success`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "ensemble_id,p,q,success")?;
        for o in &self.outcomes {
            writeln!(out, "{},{},{},{}", o.ensemble_id, o.p, o.q, o.success)?;
        }
        Ok(())
    }
}

/// A nontrivial factorization: both factors above 1.
pub fn is_factorization(n: u64, p: u64, q: u64) -> bool {
    p > 1 && q > 1 && p.checked_mul(q) == Some(n)
}

pub fn product_clamps(circuit: &CircuitGraph, n: u64) -> Result<ClampSet> {
    let width = circuit.product().len();
    if width < 64 && n >> width != 0 {
        return Err(Error::param(
            "N",
            format!("{n} does not fit the {width}-bit product register"),
        ));
    }
    let mut c = ClampSet::new();
    for (i, v) in circuit::encode_register(n, circuit.product()) {
        c.insert(i, v)?;
    }
    Ok(c)
}

pub fn operand_clamps(circuit: &CircuitGraph, p: u64, q: u64) -> Result<ClampSet> {
    let limit = 1u64 << circuit.bits;
    if p >= limit || q >= limit {
        return Err(Error::param("operand", format!("operands must be below {limit}")));
    }
    let mut c = ClampSet::new();
    for (i, v) in circuit::encode_register(p, circuit.operand_p())
        .into_iter()
        .chain(circuit::encode_register(q, circuit.operand_q()))
    {
        c.insert(i, v)?;
    }
    Ok(c)
}

fn anneal_ensembles(
    circuit: &CircuitGraph,
    clamps: &ClampSet,
    mode: FactorMode,
    schedule: &Schedule,
    ensembles: usize,
    config: &FactorConfig,
) -> Result<Vec<AnnealResult>> {
    if ensembles == 0 {
        return Err(Error::param("ensembles", "must be at least 1"));
    }
    if !(config.energy_scale.is_finite() && config.energy_scale > 0.0) {
        return Err(Error::param("energy_scale", "must be positive"));
    }
    schedule.validate()?;
    let graph = circuit.graph.scaled(config.energy_scale);
    let decode = |s: &[i8]| {
        let (p, q) = decode_factors(s, circuit);
        (p << 32 | q) as i64
    };
    // CA ensembles take disjoint stream blocks, one stream per replica.
    let streams = match mode {
        FactorMode::Ca => config.replicas as u64,
        FactorMode::Sqa => 1,
    };
    (0..ensembles)
        .into_par_iter()
        .map(|e| {
            let cfg = AnnealConfig {
                seed: config.seed,
                stream: e as u64 * streams,
                order: config.order,
                initial: InitialState::Random,
                trace_every: 0,
            };
            match mode {
                FactorMode::Ca => {
                    run_ca_clamped(&graph, clamps, schedule, config.replicas, &cfg, &decode)
                }
                FactorMode::Sqa => {
                    run_sqa_clamped(&graph, clamps, config.slices, schedule, &cfg, &decode)
                }
            }
        })
        .collect()
}

/// Clamps the product register to `n`, anneals `ensembles` times and decodes
/// the operand registers. Both operand orders count as success.
pub fn clamp_and_solve(
    circuit: &CircuitGraph,
    n: u64,
    mode: FactorMode,
    schedule: &Schedule,
    ensembles: usize,
    config: &FactorConfig,
) -> Result<FactorReport> {
    let clamps = product_clamps(circuit, n)?;
    let results = anneal_ensembles(circuit, &clamps, mode, schedule, ensembles, config)?;
    let mut outcomes = Vec::new();
    for (e, r) in results.iter().enumerate() {
        for s in &r.readouts {
            let (p, q) = decode_factors(s.values(), circuit);
            outcomes.push(FactorOutcome {
                ensemble_id: e,
                p,
                q,
                success: is_factorization(n, p, q),
            });
        }
    }
    let stats = ensemble_stats(
        &results,
        |s: &PBitState| decode_factors(s.values(), circuit),
        |&(p, q)| is_factorization(n, p, q),
    )?;
    Ok(FactorReport {
        n,
        mode,
        outcomes,
        stats,
    })
}

/// Forward mode: clamps both operands and reports how often the product
/// register reads their product.
pub fn multiply(
    circuit: &CircuitGraph,
    p: u64,
    q: u64,
    schedule: &Schedule,
    ensembles: usize,
    config: &FactorConfig,
) -> Result<SuccessStats<u64>> {
    let clamps = operand_clamps(circuit, p, q)?;
    let results = anneal_ensembles(circuit, &clamps, FactorMode::Ca, schedule, ensembles, config)?;
    ensemble_stats(
        &results,
        |s: &PBitState| decode_product(s.values(), circuit),
        |&v| v == p * q,
    )
}

#[cfg(test)]
mod tests;
