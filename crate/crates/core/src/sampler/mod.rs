//! Sequential p-bit dynamics.
//!
//! Each update draws `r` uniform on `(-1, 1)` and sets
//! `m_i = sgn(r + tanh(beta I_i))`, where the input `I_i` is read from the
//! current state, so every update sees all earlier updates of the sweep.

mod chain;
mod stats;
mod table;

use rand::seq::SliceRandom;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InteractionGraph;

pub use chain::{
    replica_histogram, run_chain, run_chains, RunStatistics, SamplerConfig, MAX_HISTOGRAM_SITES,
};
pub use stats::{integrated_autocorrelation_time, mean_and_stderr};
pub use table::FieldTable;

/// Bipolar p-bit configuration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PBitState(Vec<i8>);

impl PBitState {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(v) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::param("state", format!("entries must be +1 or -1, found {v}")));
        }
        Ok(PBitState(values))
    }

    pub fn filled(n: usize, value: i8) -> Self {
        assert!(value == 1 || value == -1);
        PBitState(vec![value; n])
    }

    pub fn random<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v = Vec::with_capacity(n);
        while v.len() < n {
            let bits = rng.next_u64();
            for k in 0..64.min(n - v.len()) {
                v.push(if bits >> k & 1 == 1 { 1 } else { -1 });
            }
        }
        PBitState(v)
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn set(&mut self, i: usize, value: i8) {
        assert!(value == 1 || value == -1);
        self.0[i] = value;
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [i8] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<i8> {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateOrder {
    #[default]
    Sequential,
    RandomPermutation,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    #[default]
    Random,
    AllUp,
    AllDown,
    #[serde(skip)]
    Given(PBitState),
}

impl InitialState {
    pub fn build<R: RngCore + ?Sized>(&self, n: usize, rng: &mut R) -> Result<PBitState> {
        Ok(match self {
            InitialState::Random => PBitState::random(n, rng),
            InitialState::AllUp => PBitState::filled(n, 1),
            InitialState::AllDown => PBitState::filled(n, -1),
            InitialState::Given(s) => {
                if s.len() != n {
                    return Err(Error::param(
                        "initial",
                        format!("state has {} entries, graph has {n}", s.len()),
                    ));
                }
                s.clone()
            }
        })
    }
}

/// Seeded generator for chain number `stream`.
pub fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw on the open interval `(-1, 1)`.
#[inline]
pub fn uniform_open<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let u = (rng.next_u64() >> 11) as f64;
    (u + 0.5) * (1.0 / (1u64 << 52) as f64) - 1.0
}

/// One p-bit update, `sgn(r + tanh(beta field))` with `sgn(0) = +1`.
#[inline]
pub fn pbit_step<R: RngCore + ?Sized>(field: f64, beta: f64, rng: &mut R) -> i8 {
    let r = uniform_open(rng);
    if r + (beta * field).tanh() >= 0.0 {
        1
    } else {
        -1
    }
}

/// Reference input on p-bit `i`, `-dE/dm_i`.
pub fn local_field(state: &PBitState, i: usize, graph: &InteractionGraph) -> f64 {
    graph.local_field(state.values(), i)
}

pub fn classical_energy(state: &PBitState, graph: &InteractionGraph) -> f64 {
    graph.energy(state.values())
}

/// Reusable sweep driver: the visiting order and the set of free p-bits.
#[derive(Debug, Clone)]
pub struct Sweeper {
    order: UpdateOrder,
    free: Vec<u32>,
}

/// Change in energy and in `sum m` produced by one sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SweepDelta {
    pub energy: f64,
    pub magnetization: i64,
}

impl Sweeper {
    pub fn new(n: usize, order: UpdateOrder) -> Self {
        Sweeper {
            order,
            free: (0..n as u32).collect(),
        }
    }

    /// Sweeper that never touches p-bits with `clamped[i] == true`.
    pub fn with_clamped(clamped: &[bool], order: UpdateOrder) -> Self {
        Sweeper {
            order,
            free: (0..clamped.len() as u32).filter(|&i| !clamped[i as usize]).collect(),
        }
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    /// Updates every free p-bit once.
    pub fn sweep<R: RngCore + ?Sized>(
        &mut self,
        table: &FieldTable,
        state: &mut [i8],
        beta: f64,
        rng: &mut R,
    ) -> SweepDelta {
        if self.order == UpdateOrder::RandomPermutation {
            self.free.shuffle(rng);
        }
        let mut delta = SweepDelta::default();
        for &i in &self.free {
            let i = i as usize;
            let field = table.field(state, i);
            let new = pbit_step(field, beta, rng);
            let old = state[i];
            if new != old {
                state[i] = new;
                let diff = f64::from(new - old);
                delta.energy -= diff * field;
                delta.magnetization += i64::from(new - old);
            }
        }
        delta
    }
}

/// One sweep over all p-bits of `graph`.
pub fn sweep<R: RngCore + ?Sized>(
    state: &mut PBitState,
    graph: &InteractionGraph,
    beta: f64,
    order: UpdateOrder,
    rng: &mut R,
) {
    let table = FieldTable::new(graph);
    Sweeper::new(graph.num_pbits(), order).sweep(&table, state.as_mut_slice(), beta, rng);
}
