//! Classical annealing (a temperature ramp over independent replicas) and
//! simulated quantum annealing (a transverse-field ramp over coupled Trotter
//! slices at fixed temperature).

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InteractionGraph;
use crate::sampler::{chain_rng, FieldTable, InitialState, PBitState, Sweeper, UpdateOrder};
use crate::trotter::{perp_coupling, replicate_ising};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    /// Values are temperatures `1/beta`.
    BetaRamp,
    /// Values are transverse fields at `fixed_beta`.
    GammaRamp,
}

/// Piecewise-linear ramp sampled at `steps` points, endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_beta: Option<f64>,
    #[serde(default = "one")]
    pub sweeps_per_step: usize,
}

fn one() -> usize {
    1
}

/// Linear temperature ramp from `start` to `end`.
pub fn make_linear_schedule(start: f64, end: f64, steps: usize) -> Result<Schedule> {
    let s = Schedule {
        kind: ScheduleKind::BetaRamp,
        start,
        end,
        steps,
        fixed_beta: None,
        sweeps_per_step: 1,
    };
    s.validate()?;
    Ok(s)
}

impl Schedule {
    /// Transverse-field ramp at inverse temperature `beta`.
    pub fn transverse_field(start: f64, end: f64, steps: usize, beta: f64) -> Result<Self> {
        let s = Schedule {
            kind: ScheduleKind::GammaRamp,
            start,
            end,
            steps,
            fixed_beta: Some(beta),
            sweeps_per_step: 1,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_sweeps_per_step(mut self, sweeps: usize) -> Self {
        self.sweeps_per_step = sweeps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::param("steps", "a schedule needs at least one step"));
        }
        if self.sweeps_per_step == 0 {
            return Err(Error::param("sweeps_per_step", "must be at least 1"));
        }
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::param("start", "schedule endpoints must be finite"));
        }
        // Both kinds divide by or take logs of the ramp values, so they must stay positive.
        if self.start <= 0.0 || self.end <= 0.0 {
            let name = match self.kind {
                ScheduleKind::BetaRamp => "temperature",
                ScheduleKind::GammaRamp => "gamma_x",
            };
            return Err(Error::param(name, "ramp values must stay positive"));
        }
        if self.kind == ScheduleKind::GammaRamp {
            match self.fixed_beta {
                Some(b) if b.is_finite() && b > 0.0 => {}
                _ => return Err(Error::param("fixed_beta", "a field ramp needs a positive beta")),
            }
        }
        Ok(())
    }

    pub fn value(&self, step: usize) -> f64 {
        if self.steps == 1 || step == 0 {
            return self.start;
        }
        if step + 1 >= self.steps {
            return self.end;
        }
        self.start + (self.end - self.start) * step as f64 / (self.steps - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|s| self.value(s)).collect()
    }
}

/// Fixed p-bit values that the sampler never updates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClampSet {
    assignments: BTreeMap<usize, i8>,
}

impl ClampSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, pbit: usize, value: i8) -> Result<()> {
        if value != 1 && value != -1 {
            return Err(Error::param("clamp", format!("value must be +1 or -1, got {value}")));
        }
        self.assignments.insert(pbit, value);
        Ok(())
    }

    pub fn get(&self, pbit: usize) -> Option<i8> {
        self.assignments.get(&pbit).copied()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.assignments.iter().map(|(&k, &v)| (k, v))
    }

    fn check(&self, n: usize) -> Result<()> {
        match self.assignments.keys().next_back() {
            Some(&k) if k >= n => Err(Error::param(
                "clamp",
                format!("p-bit {k} out of range for {n} p-bits"),
            )),
            _ => Ok(()),
        }
    }

    fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &k in self.assignments.keys() {
            m[k] = true;
        }
        m
    }

    fn apply(&self, state: &mut [i8]) {
        for (&k, &v) in &self.assignments {
            state[k] = v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealConfig {
    pub seed: u64,
    /// First RNG stream; replica or ensemble `k` uses `stream + k`.
    #[serde(default)]
    pub stream: u64,
    #[serde(default)]
    pub order: UpdateOrder,
    #[serde(default)]
    pub initial: InitialState,
    /// Record the decoded readout every this many steps (0 disables the trace).
    #[serde(default)]
    pub trace_every: usize,
}

impl AnnealConfig {
    pub fn new(seed: u64) -> Self {
        AnnealConfig {
            seed,
            stream: 0,
            order: UpdateOrder::Sequential,
            initial: InitialState::Random,
            trace_every: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealTraceRow {
    pub step: usize,
    pub beta: f64,
    /// Transverse field, `None` for classical annealing.
    pub gamma: Option<f64>,
    pub replica: usize,
    pub decoded: i64,
}

#[derive(Debug, Clone)]
pub struct AnnealResult {
    /// CA: one state per replica. SQA: one state per Trotter slice.
    pub final_states: Vec<PBitState>,
    /// The states that count as answers. CA: every replica. SQA: the
    /// majority vote across slices.
    pub readouts: Vec<PBitState>,
    pub trace: Vec<AnnealTraceRow>,
}

impl AnnealResult {
    /// CSV with columns `step,beta,gamma,replica_id,decoded_value`.
    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "step,beta,gamma,replica_id,decoded_value")?;
        for r in &self.trace {
            let gamma = r.gamma.map(|g| g.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{},{}", r.step, r.beta, gamma, r.replica, r.decoded)?;
        }
        Ok(())
    }
}

/// Binary value of a state read as up = 1, p-bit 0 most significant.
/// Only the first 63 p-bits contribute.
pub fn default_decoder(state: &[i8]) -> i64 {
    state
        .iter()
        .take(63)
        .fold(0i64, |acc, &m| (acc << 1) | i64::from(m > 0))
}

/// Classical annealing of `replicas` independent copies of `graph`.
pub fn run_ca(
    graph: &InteractionGraph,
    schedule: &Schedule,
    replicas: usize,
    config: &AnnealConfig,
) -> Result<AnnealResult> {
    run_ca_clamped(graph, &ClampSet::new(), schedule, replicas, config, &default_decoder)
}

/// Classical annealing with clamped p-bits and a custom readout decoder.
pub fn run_ca_clamped(
    graph: &InteractionGraph,
    clamps: &ClampSet,
    schedule: &Schedule,
    replicas: usize,
    config: &AnnealConfig,
    decode: &(dyn Fn(&[i8]) -> i64 + Sync),
) -> Result<AnnealResult> {
    schedule.validate()?;
    if schedule.kind != ScheduleKind::BetaRamp {
        return Err(Error::param("schedule", "classical annealing needs a temperature ramp"));
    }
    if replicas == 0 {
        return Err(Error::param("replicas", "must be at least 1"));
    }
    let n = graph.num_pbits();
    clamps.check(n)?;
    let table = FieldTable::new(graph);
    let mask = clamps.mask(n);
    let mut final_states = Vec::with_capacity(replicas);
    let mut trace = Vec::new();
    for r in 0..replicas {
        let mut rng = chain_rng(config.seed, config.stream + r as u64);
        let mut state = config.initial.build(n, &mut rng)?;
        clamps.apply(state.as_mut_slice());
        let mut sweeper = Sweeper::with_clamped(&mask, config.order);
        for step in 0..schedule.steps {
            let beta = 1.0 / schedule.value(step);
            for _ in 0..schedule.sweeps_per_step {
                sweeper.sweep(&table, state.as_mut_slice(), beta, &mut rng);
            }
            if config.trace_every > 0
                && (step % config.trace_every == 0 || step + 1 == schedule.steps)
            {
                trace.push(AnnealTraceRow {
                    step,
                    beta,
                    gamma: None,
                    replica: r,
                    decoded: decode(state.values()),
                });
            }
        }
        final_states.push(state);
    }
    Ok(AnnealResult {
        readouts: final_states.clone(),
        final_states,
        trace,
    })
}

/// Per-spin majority over slices, ties toward +1.
pub fn majority_vote(slices: &[PBitState]) -> PBitState {
    let n = slices.first().map_or(0, PBitState::len);
    let votes: Vec<i8> = (0..n)
        .map(|i| {
            let s: i64 = slices.iter().map(|st| i64::from(st.values()[i])).sum();
            if s >= 0 {
                1
            } else {
                -1
            }
        })
        .collect();
    PBitState::new(votes).expect("votes are bipolar")
}

/// Simulated quantum annealing of the Ising cost `problem` with `n` Trotter
/// slices. Inter-slice couplings are recomputed from the field at every step.
pub fn run_sqa(
    problem: &InteractionGraph,
    n: usize,
    schedule: &Schedule,
    config: &AnnealConfig,
) -> Result<AnnealResult> {
    run_sqa_clamped(problem, &ClampSet::new(), n, schedule, config, &default_decoder)
}

pub fn run_sqa_clamped(
    problem: &InteractionGraph,
    clamps: &ClampSet,
    n: usize,
    schedule: &Schedule,
    config: &AnnealConfig,
    decode: &(dyn Fn(&[i8]) -> i64 + Sync),
) -> Result<AnnealResult> {
    schedule.validate()?;
    if schedule.kind != ScheduleKind::GammaRamp {
        return Err(Error::param("schedule", "quantum annealing needs a transverse-field ramp"));
    }
    let beta = schedule.fixed_beta.expect("validated");
    let sites = problem.num_pbits();
    clamps.check(sites)?;
    let lattice = replicate_ising(problem, n, beta, schedule.value(0))?;
    let layout = lattice.layout();
    let mut table = FieldTable::new(lattice.graph());
    let mut mask = vec![false; layout.num_pbits()];
    let mut full_clamps = ClampSet::new();
    for (k, v) in clamps.iter() {
        for s in 0..n {
            let p = layout.index_of(k, s);
            mask[p] = true;
            full_clamps.assignments.insert(p, v);
        }
    }
    let mut rng = chain_rng(config.seed, config.stream);
    let mut state = config.initial.build(layout.num_pbits(), &mut rng)?;
    full_clamps.apply(state.as_mut_slice());
    let mut sweeper = Sweeper::with_clamped(&mask, config.order);
    let mut trace = Vec::new();
    for step in 0..schedule.steps {
        let gamma = schedule.value(step);
        let jp = perp_coupling(beta, gamma, n)?;
        for p in lattice.perp_terms() {
            table.set_pair_weight(p.term, jp * p.multiplicity);
        }
        for _ in 0..schedule.sweeps_per_step {
            sweeper.sweep(&table, state.as_mut_slice(), beta, &mut rng);
        }
        if config.trace_every > 0 && (step % config.trace_every == 0 || step + 1 == schedule.steps)
        {
            for s in 0..n {
                trace.push(AnnealTraceRow {
                    step,
                    beta,
                    gamma: Some(gamma),
                    replica: s,
                    decoded: decode(layout.slice(state.values(), s)),
                });
            }
        }
    }
    let final_states: Vec<PBitState> = (0..n)
        .map(|s| PBitState::new(layout.slice(state.values(), s).to_vec()).expect("bipolar"))
        .collect();
    Ok(AnnealResult {
        readouts: vec![majority_vote(&final_states)],
        final_states,
        trace,
    })
}

/// Success rate with its binomial standard error and a per-answer tally.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessStats<K: Ord> {
    pub trials: usize,
    pub successes: usize,
    pub breakdown: BTreeMap<K, usize>,
}

impl<K: Ord> SuccessStats<K> {
    pub fn probability(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// `sqrt(p (1 - p) / trials)`.
    pub fn standard_error(&self) -> f64 {
        let p = self.probability();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Share of all trials that produced `answer`.
    pub fn share(&self, answer: &K) -> f64 {
        self.breakdown.get(answer).copied().unwrap_or(0) as f64 / self.trials as f64
    }
}

/// Classifies every readout of every result and counts successes.
pub fn ensemble_stats<K: Ord>(
    results: &[AnnealResult],
    answer: impl Fn(&PBitState) -> K,
    success: impl Fn(&K) -> bool,
) -> Result<SuccessStats<K>> {
    let mut stats = SuccessStats {
        trials: 0,
        successes: 0,
        breakdown: BTreeMap::new(),
    };
    for r in results {
        for s in &r.readouts {
            let k = answer(s);
            stats.trials += 1;
            stats.successes += usize::from(success(&k));
            *stats.breakdown.entry(k).or_insert(0) += 1;
        }
    }
    if stats.trials == 0 {
        return Err(Error::EmptyInput("anneal results"));
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::QuantumModelSpec;
    use crate::graph::SliceLayout;
    use crate::sampler::{run_chain, SamplerConfig};
    use crate::trotter::{chain_graph, map_tfim};

    fn ferro_pair() -> InteractionGraph {
        let mut g = InteractionGraph::new(2);
        g.add_pair(0, 1, 1.0).unwrap();
        g
    }

    #[test]
    fn schedule_endpoints() {
        let s = make_linear_schedule(1.0, 0.1, 10).unwrap();
        assert_eq!(s.value(0), 1.0);
        assert!((s.value(9) - 0.1).abs() < 1e-15);
        let v = s.values();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
        let two = make_linear_schedule(3.0, 0.1, 2).unwrap();
        assert_eq!(two.values(), vec![3.0, 0.1]);
        assert!(make_linear_schedule(1.0, 0.1, 0).is_err());
        assert!(Schedule::transverse_field(3.0, 0.0, 5, 10.0).is_err());
        assert!(Schedule::transverse_field(3.0, 0.1, 5, 0.0).is_err());
    }

    #[test]
    fn binomial_error() {
        let s = SuccessStats::<u8> {
            trials: 100,
            successes: 78,
            breakdown: BTreeMap::new(),
        };
        assert_eq!(s.probability(), 0.78);
        assert!((s.standard_error() - 0.041).abs() < 5e-4);
        let all = SuccessStats::<u8> {
            trials: 10,
            successes: 10,
            breakdown: BTreeMap::new(),
        };
        assert_eq!((all.probability(), all.standard_error()), (1.0, 0.0));
        assert!(ensemble_stats(&[], |_| 0, |_| true).is_err());
    }

    #[test]
    fn ca_aligns_ferro_pair() {
        let sched = make_linear_schedule(1.0, 0.1, 50).unwrap();
        let res = run_ca(&ferro_pair(), &sched, 2000, &AnnealConfig::new(3)).unwrap();
        let stats = ensemble_stats(&[res], |s| s.values()[0] == s.values()[1], |&a| a).unwrap();
        assert!(stats.probability() > 0.99);
    }

    #[test]
    fn ca_is_deterministic() {
        let g = chain_graph(&crate::exact::TfimSpec::uniform(6, 1.0, 0.0, 0.1)).unwrap();
        let sched = make_linear_schedule(2.0, 0.2, 30).unwrap();
        let cfg = AnnealConfig {
            trace_every: 1,
            ..AnnealConfig::new(17)
        };
        let a = run_ca(&g, &sched, 4, &cfg).unwrap();
        let b = run_ca(&g, &sched, 4, &cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.final_states, b.final_states);
    }

    #[test]
    fn ca_replicas_are_uncorrelated() {
        // High constant temperature: every replica is an independent fair coin.
        let g = InteractionGraph::new(1);
        let sched = make_linear_schedule(1.0, 1.0, 3).unwrap();
        let samples = 4000;
        let mut prod = 0.0;
        for e in 0..samples {
            let cfg = AnnealConfig {
                stream: 2 * e as u64,
                ..AnnealConfig::new(5)
            };
            let r = run_ca(&g, &sched, 2, &cfg).unwrap();
            prod += f64::from(r.final_states[0].values()[0] * r.final_states[1].values()[0]);
        }
        let corr = prod / samples as f64;
        assert!(corr.abs() < 3.0 / (samples as f64).sqrt(), "corr = {corr}");
    }

    #[test]
    fn sqa_locks_slices() {
        let sched = Schedule::transverse_field(3.0, 0.01, 4000, 10.0).unwrap();
        let mut locked = 0;
        let runs = 200;
        for e in 0..runs {
            let cfg = AnnealConfig {
                stream: e,
                ..AnnealConfig::new(9)
            };
            let r = run_sqa(&ferro_pair(), 4, &sched, &cfg).unwrap();
            let first = &r.final_states[0];
            locked += usize::from(r.final_states.iter().all(|s| s == first));
        }
        assert!(locked as f64 / runs as f64 > 0.99, "locked {locked}/{runs}");
    }

    #[test]
    fn sqa_with_constant_field_matches_chain() {
        let spec = QuantumModelSpec::tfim_uniform(2, 1.0, 1.0, 0.2);
        let QuantumModelSpec::Tfim(t) = &spec else { unreachable!() };
        let problem = chain_graph(t).unwrap();
        let n = 3;
        let beta = 1.5;
        let sched = Schedule::transverse_field(1.0, 1.0, 60, beta).unwrap();
        let mut counts = vec![0u64; 4];
        for e in 0..2000 {
            let cfg = AnnealConfig {
                stream: e,
                ..AnnealConfig::new(1)
            };
            let r = run_sqa(&problem, n, &sched, &cfg).unwrap();
            for s in &r.final_states {
                counts[crate::histogram::state_of_bipolar(s.values())] += 1;
            }
        }
        let sqa = crate::histogram::Histogram::from_counts(2, &counts).unwrap();
        let lat = map_tfim(&spec, n, beta).unwrap();
        let chain = run_chain(lat.graph(), lat.layout(), &SamplerConfig::new(beta, 200_000, 2)).unwrap();
        let tvd = sqa.tvd(chain.histogram.as_ref().unwrap()).unwrap();
        assert!(tvd < 0.03, "tvd = {tvd}");
        let _ = SliceLayout::flat(1);
    }

    #[test]
    fn sqa_respects_clamps() {
        let mut g = InteractionGraph::new(3);
        g.add_pair(0, 1, 1.0).unwrap();
        g.add_pair(1, 2, 1.0).unwrap();
        let mut c = ClampSet::new();
        c.insert(0, -1).unwrap();
        let sched = Schedule::transverse_field(3.0, 0.1, 200, 10.0).unwrap();
        let r = run_sqa_clamped(&g, &c, 4, &sched, &AnnealConfig::new(2), &default_decoder).unwrap();
        assert!(r.final_states.iter().all(|s| s.values()[0] == -1));
        assert_eq!(r.readouts[0].values(), &[-1, -1, -1]);
        assert!(c.insert(1, 0).is_err());
    }

    #[test]
    fn majority_ties_go_up() {
        let a = PBitState::new(vec![1, -1, -1]).unwrap();
        let b = PBitState::new(vec![-1, -1, 1]).unwrap();
        assert_eq!(majority_vote(&[a, b]).values(), &[1, -1, 1]);
    }

    #[test]
    fn trace_csv_has_columns() {
        let sched = make_linear_schedule(1.0, 0.1, 4).unwrap();
        let cfg = AnnealConfig {
            trace_every: 2,
            ..AnnealConfig::new(0)
        };
        let r = run_ca(&ferro_pair(), &sched, 1, &cfg).unwrap();
        let mut buf = Vec::new();
        r.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("step,beta,gamma,replica_id,decoded_value\n"));
        assert_eq!(text.lines().count(), 1 + 3);
    }
}
