use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::integrated_autocorrelation_time;
use super::{chain_rng, FieldTable, InitialState, PBitState, Sweeper, UpdateOrder};
use crate::error::{Error, Result};
use crate::graph::{InteractionGraph, SliceLayout};
use crate::histogram::{state_of_bipolar, Histogram};

/// Slices wider than this are not histogrammed (the table would need 2^sites cells).
pub const MAX_HISTOGRAM_SITES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub beta: f64,
    /// Total sweeps, burn-in included.
    pub sweeps: usize,
    /// Leading sweeps excluded from every statistic.
    pub burn_in: usize,
    pub seed: u64,
    /// Independent RNG stream for this chain; ensembles use consecutive streams.
    #[serde(default)]
    pub stream: u64,
    #[serde(default)]
    pub order: UpdateOrder,
    #[serde(default)]
    pub initial: InitialState,
}

impl SamplerConfig {
    /// Config with the default 10% burn-in.
    pub fn new(beta: f64, sweeps: usize, seed: u64) -> Self {
        SamplerConfig {
            beta,
            sweeps,
            burn_in: sweeps / 10,
            seed,
            stream: 0,
            order: UpdateOrder::Sequential,
            initial: InitialState::Random,
        }
    }

    /// Records only the state after the last sweep.
    pub fn end_point(beta: f64, sweeps: usize, seed: u64) -> Self {
        SamplerConfig {
            burn_in: sweeps.saturating_sub(1),
            ..SamplerConfig::new(beta, sweeps, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::param("beta", format!("must be finite and >= 0, got {}", self.beta)));
        }
        if self.sweeps <= self.burn_in {
            return Err(Error::param(
                "sweeps",
                format!("must exceed burn_in ({} <= {})", self.sweeps, self.burn_in),
            ));
        }
        Ok(())
    }

    pub fn recorded_sweeps(&self) -> usize {
        self.sweeps - self.burn_in
    }
}

#[derive(Debug, Clone)]
pub struct RunStatistics {
    pub layout: SliceLayout,
    pub burn_in: usize,
    /// Site-and-slice averaged magnetization after each recorded sweep.
    pub mz_trace: Vec<f64>,
    pub energy_trace: Vec<f64>,
    /// Slice states pooled over recorded sweeps; `None` for slices wider than
    /// [`MAX_HISTOGRAM_SITES`].
    pub histogram: Option<Histogram>,
    pub counts: Vec<u64>,
    pub final_state: PBitState,
}

impl RunStatistics {
    pub fn mean_mz(&self) -> f64 {
        self.mz_trace.iter().sum::<f64>() / self.mz_trace.len() as f64
    }

    /// Recorded sweeps divided by the integrated autocorrelation time of the
    /// magnetization trace. Pooled slices inside a sweep are correlated, so
    /// this is the honest sample count behind the pooled histogram.
    pub fn effective_sample_size(&self) -> f64 {
        let tau = integrated_autocorrelation_time(&self.mz_trace);
        self.mz_trace.len() as f64 / tau
    }

    /// CSV with columns `sweep,mz,energy`; sweeps are 1-based and absolute.
    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "sweep,mz,energy")?;
        for (k, (m, e)) in self.mz_trace.iter().zip(&self.energy_trace).enumerate() {
            writeln!(out, "{},{m:.12e},{e:.12e}", self.burn_in + k + 1)?;
        }
        Ok(())
    }
}

fn add_slices(counts: &mut [u64], state: &[i8], layout: SliceLayout) {
    for k in 0..layout.slices {
        counts[state_of_bipolar(layout.slice(state, k))] += 1;
    }
}

/// Runs one chain and collects traces and the pooled slice histogram.
pub fn run_chain(
    graph: &InteractionGraph,
    layout: SliceLayout,
    config: &SamplerConfig,
) -> Result<RunStatistics> {
    config.validate()?;
    if layout.num_pbits() != graph.num_pbits() {
        return Err(Error::DimensionMismatch {
            left: layout.num_pbits(),
            right: graph.num_pbits(),
        });
    }
    let n = graph.num_pbits();
    let mut rng = chain_rng(config.seed, config.stream);
    let mut state = config.initial.build(n, &mut rng)?;
    let table = FieldTable::new(graph);
    let mut sweeper = Sweeper::new(n, config.order);
    let mut energy = graph.energy(state.values());
    let mut msum: i64 = state.values().iter().map(|&m| i64::from(m)).sum();

    let keep_hist = layout.sites <= MAX_HISTOGRAM_SITES;
    let mut counts = if keep_hist {
        vec![0u64; 1 << layout.sites]
    } else {
        Vec::new()
    };
    let recorded = config.recorded_sweeps();
    let mut mz_trace = Vec::with_capacity(recorded);
    let mut energy_trace = Vec::with_capacity(recorded);

    for s in 0..config.sweeps {
        let d = sweeper.sweep(&table, state.as_mut_slice(), config.beta, &mut rng);
        energy += d.energy;
        msum += d.magnetization;
        if s >= config.burn_in {
            mz_trace.push(msum as f64 / n as f64);
            energy_trace.push(energy);
            if keep_hist {
                add_slices(&mut counts, state.values(), layout);
            }
        }
    }
    let histogram = if keep_hist {
        Some(Histogram::from_counts(layout.sites, &counts)?)
    } else {
        None
    };
    Ok(RunStatistics {
        layout,
        burn_in: config.burn_in,
        mz_trace,
        energy_trace,
        histogram,
        counts,
        final_state: state,
    })
}

/// `count` independent chains on streams `config.stream .. config.stream + count`,
/// run in parallel. Results come back in stream order.
pub fn run_chains(
    graph: &InteractionGraph,
    layout: SliceLayout,
    config: &SamplerConfig,
    count: usize,
) -> Result<Vec<RunStatistics>> {
    (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let cfg = SamplerConfig {
                stream: config.stream + k,
                ..config.clone()
            };
            run_chain(graph, layout, &cfg)
        })
        .collect()
}

/// Pools every slice of every recorded state into one histogram.
pub fn replica_histogram(trace: &[PBitState], layout: SliceLayout) -> Result<Histogram> {
    if trace.is_empty() {
        return Err(Error::EmptyInput("replica trace"));
    }
    if layout.sites > MAX_HISTOGRAM_SITES {
        return Err(Error::param(
            "sites",
            format!("histograms support at most {MAX_HISTOGRAM_SITES} sites per slice"),
        ));
    }
    let mut counts = vec![0u64; 1 << layout.sites];
    for s in trace {
        if s.len() != layout.num_pbits() {
            return Err(Error::DimensionMismatch {
                left: layout.num_pbits(),
                right: s.len(),
            });
        }
        add_slices(&mut counts, s.values(), layout);
    }
    Histogram::from_counts(layout.sites, &counts)
}
