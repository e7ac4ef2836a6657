use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{keyed, DeviceMode, ExperimentConfig};
use super::export::{export_results, write_file, ExportData, ExportFormat, Summary, TraceSample};
use crate::annealing::{run_ca, run_sqa, AnnealConfig, AnnealResult, ScheduleKind};
use crate::device::{
    calibrate_transistor, circuit_mapping, sample_mz, simulate_trace, simulate_transfer,
    write_trace_csv, autocorrelation_time, DeviceNetwork, TransferConfig,
};
use crate::error::{Error, Result};
use crate::exact::{build_hamiltonian, mean_z_operator, QuantumModelSpec, ThermalState};
use crate::factorizer::{build_multiplier, clamp_and_solve, multiply, FactorConfig};
use crate::graph::InteractionGraph;
use crate::histogram::Histogram;
use crate::sampler::{run_chain, run_chains, MAX_HISTOGRAM_SITES};
use crate::trotter::{chain_graph, map_heisenberg, map_tfim, ReplicaLattice};

/// Files written so far plus the summary, filled in by each experiment.
struct Outputs {
    dir: PathBuf,
    files: Vec<PathBuf>,
    data: ExportData,
}

impl Outputs {
    fn file(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut std::io::BufWriter<std::fs::File>) -> std::io::Result<()>,
    ) -> Result<()> {
        let p = write_file(&self.dir, name, body)?;
        self.files.push(p);
        Ok(())
    }
}

/// Runs the experiment and writes its artifacts into `config.output_dir`.
/// Returns the written paths in a fixed order; `summary.json` is last.
pub(crate) fn execute(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let dir = config.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut out = Outputs {
        dir,
        files: Vec::new(),
        data: ExportData {
            summary: Summary::new(config.experiment.name(), config.seed),
            ..ExportData::default()
        },
    };
    use super::config::ExperimentKind as K;
    match config.experiment {
        K::Exact => {
            exact(config, &mut out)?;
        }
        K::Psl => {
            psl(config, &mut out)?;
        }
        K::Compare => {
            let sampled = psl(config, &mut out)?;
            let oracle = exact(config, &mut out)?;
            out.data.summary.tvd = Some(sampled.tvd(&oracle)?);
            out.file("compare.csv", |w| side_by_side(w, &[("exact", &oracle), ("sampled", &sampled)]))?;
        }
        K::Anneal => anneal(config, &mut out)?,
        K::Factor => factor(config, &mut out)?,
        K::Device => device(config, &mut out)?,
    }
    if matches!(config.experiment, K::Psl | K::Compare) {
        out.files.extend(export_results(&out.data, ExportFormat::Csv, &out.dir)?);
    }
    out.files.extend(export_results(&out.data, ExportFormat::SummaryJson, &out.dir)?);
    Ok(out.files)
}

fn side_by_side<W: Write>(w: &mut W, columns: &[(&str, &Histogram)]) -> std::io::Result<()> {
    write!(w, "state_index")?;
    for (name, _) in columns {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for s in 0..columns[0].1.len() {
        write!(w, "{s}")?;
        for (_, h) in columns {
            write!(w, ",{:.12e}", h.prob(s))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

fn exact(config: &ExperimentConfig, out: &mut Outputs) -> Result<Histogram> {
    let model = config.model()?;
    let beta = config.sampler()?.beta;
    let h = build_hamiltonian(model)?;
    let thermal = ThermalState::new(&h, beta)?;
    let hist = thermal.joint_distribution()?;
    let s = &mut out.data.summary;
    s.exact_mean_mz = Some(thermal.expectation(&mean_z_operator(model.sites())?)?);
    s.metric("ground_energy", thermal.ground_energy());
    out.file("histogram_exact.csv", |w| hist.write_csv(w))?;
    Ok(hist)
}

fn lattice(config: &ExperimentConfig) -> Result<ReplicaLattice> {
    let model = config.model()?;
    let n = config.mapping()?.n;
    let beta = config.sampler()?.beta;
    match model {
        QuantumModelSpec::Tfim(_) => map_tfim(model, n, beta),
        QuantumModelSpec::Heisenberg(_) => map_heisenberg(model, n, beta),
    }
    .map_err(|e| keyed("model", e))
}

fn psl(config: &ExperimentConfig, out: &mut Outputs) -> Result<Histogram> {
    let lat = lattice(config)?;
    let section = config.sampler()?;
    let cfg = section.sampler_config(config.seed);
    let runs = run_chains(lat.graph(), lat.layout(), &cfg, section.chains)?;
    let layout = lat.layout();
    let mut counts = vec![0u64; 1 << layout.sites];
    for r in &runs {
        for (c, k) in counts.iter_mut().zip(&r.counts) {
            *c += k;
        }
    }
    let hist = Histogram::from_counts(layout.sites, &counts)?;
    let first = &runs[0];
    out.data.trace = first
        .mz_trace
        .iter()
        .zip(&first.energy_trace)
        .enumerate()
        .map(|(k, (&mz, &energy))| TraceSample {
            sweep: first.burn_in + k + 1,
            mz,
            energy,
        })
        .collect();
    let s = &mut out.data.summary;
    s.mean_mz = Some(runs.iter().map(|r| r.mean_mz()).sum::<f64>() / runs.len() as f64);
    s.metric("effective_sample_size", runs.iter().map(|r| r.effective_sample_size()).sum());
    s.metric("pbits", lat.graph().num_pbits() as f64);
    s.metric("slices", layout.slices as f64);
    out.data.histogram = Some(hist.clone());
    Ok(hist)
}

fn ground_energy(graph: &InteractionGraph) -> Option<f64> {
    let n = graph.num_pbits();
    if n > MAX_HISTOGRAM_SITES {
        return None;
    }
    let mut state = vec![-1i8; n];
    let mut best = f64::INFINITY;
    for b in 0..1usize << n {
        for (i, m) in state.iter_mut().enumerate() {
            *m = if b >> (n - 1 - i) & 1 == 1 { 1 } else { -1 };
        }
        best = best.min(graph.energy(&state));
    }
    Some(best)
}

fn anneal(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let QuantumModelSpec::Tfim(t) = config.model()? else {
        unreachable!("validated")
    };
    let problem = chain_graph(t)?;
    let schedule = config.schedule.as_ref().expect("validated");
    let section = config.anneal.as_ref().expect("validated");
    let quantum = schedule.kind == ScheduleKind::GammaRamp;
    let width = if quantum { config.mapping()?.n } else { section.replicas };
    let results = (0..section.ensembles)
        .into_par_iter()
        .map(|e| {
            let cfg = AnnealConfig {
                stream: (e * if quantum { 1 } else { width }) as u64,
                trace_every: section.trace_every,
                ..AnnealConfig::new(config.seed)
            };
            if quantum {
                run_sqa(&problem, width, schedule, &cfg)
            } else {
                run_ca(&problem, schedule, width, &cfg)
            }
        })
        .collect::<Result<Vec<AnnealResult>>>()?;
    let mut merged = AnnealResult {
        final_states: Vec::new(),
        readouts: Vec::new(),
        trace: Vec::new(),
    };
    let mut rows = Vec::new();
    for (e, r) in results.into_iter().enumerate() {
        for (k, s) in r.readouts.iter().enumerate() {
            rows.push((e, k, problem.energy(s.values()), crate::annealing::default_decoder(s.values())));
        }
        merged.trace.extend(r.trace.into_iter().map(|mut row| {
            row.replica += e * width;
            row
        }));
        merged.readouts.extend(r.readouts);
        merged.final_states.extend(r.final_states);
    }
    out.file("anneal_trace.csv", |w| merged.write_trace_csv(w))?;
    out.file("readouts.csv", |w| {
        writeln!(w, "ensemble_id,readout_id,energy,decoded_value")?;
        for (e, k, en, d) in &rows {
            writeln!(w, "{e},{k},{en:.12e},{d}")?;
        }
        Ok(())
    })?;
    let s = &mut out.data.summary;
    let mean = rows.iter().map(|r| r.2).sum::<f64>() / rows.len() as f64;
    s.metric("mean_final_energy", mean);
    if let Some(g) = ground_energy(&problem) {
        let hits = rows.iter().filter(|r| r.2 <= g + 1e-9).count();
        let p = hits as f64 / rows.len() as f64;
        s.metric("ground_energy", g);
        s.success_rate = Some(p);
        s.success_stderr = Some((p * (1.0 - p) / rows.len() as f64).sqrt());
    }
    Ok(())
}

fn factor(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let f = config.factor()?;
    let circuit = build_multiplier(f.bits, f.merge)?;
    let schedule = config.factor_schedule()?;
    let fc = FactorConfig {
        seed: config.seed,
        replicas: f.replicas,
        slices: f.slices,
        energy_scale: f.energy_scale,
        order: f.order,
    };
    let s = &mut out.data.summary;
    s.metric("pbits", circuit.num_pbits() as f64);
    if let Some([p, q]) = f.forward {
        let stats = multiply(&circuit, p, q, &schedule, f.ensembles, &fc)?;
        s.success_rate = Some(stats.probability());
        s.success_stderr = Some(stats.standard_error());
        out.file("forward.csv", |w| {
            writeln!(w, "product,count")?;
            for (v, c) in &stats.breakdown {
                writeln!(w, "{v},{c}")?;
            }
            Ok(())
        })?;
    } else {
        let report = clamp_and_solve(&circuit, f.product, f.mode, &schedule, f.ensembles, &fc)?;
        s.success_rate = Some(report.success_probability());
        s.success_stderr = Some(report.stats.standard_error());
        for (&(p, q), _) in report.stats.breakdown.iter() {
            if crate::factorizer::is_factorization(f.product, p, q) {
                s.metric(&format!("share_{p}x{q}"), report.share(p, q));
            }
        }
        out.file("factor.csv", |w| report.write_csv(w))?;
    }
    Ok(())
}

fn device(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let d = config.device()?;
    let mut cell = d.cell.clone();
    if d.calibrate {
        let mz = sample_mz(&cell, d.calibration_samples, 10, d.dt, config.seed)?;
        let cal = calibrate_transistor(d.v0, &mz)?;
        cell = cal.apply(&cell);
        out.data.summary.metric("v_slope", cal.v_slope);
        out.data.summary.metric("v_offset", cal.v_offset);
    }
    match d.mode {
        DeviceMode::Trace => {
            let rows = simulate_trace(&cell, d.v_in, d.steps, d.dt, config.seed)?;
            out.file("device_trace.csv", |w| write_trace_csv(&rows, w))?;
            let mean = rows.iter().map(|r| r.v_out).sum::<f64>() / rows.len() as f64;
            out.data.summary.metric("mean_v_out", mean);
            let mz: Vec<f64> = rows.iter().map(|r| r.m.z).collect();
            if let Ok(tau) = autocorrelation_time(&mz, d.dt) {
                out.data.summary.metric("tau_mz_s", tau);
            }
        }
        DeviceMode::Transfer => {
            let grid: Vec<f64> = (0..d.points)
                .map(|k| -d.v_max + 2.0 * d.v_max * k as f64 / (d.points - 1) as f64)
                .collect();
            let tc = TransferConfig {
                duration: d.duration,
                devices: d.devices,
                dt: d.dt,
                seed: config.seed,
            };
            let curve = simulate_transfer(&cell, &grid, &tc)?;
            out.file("transfer.csv", |w| curve.write_csv(w))?;
            let (v0, dev) = curve.fit_tanh();
            out.data.summary.metric("v0_fit", v0);
            out.data.summary.metric("max_deviation", dev);
        }
        DeviceMode::Network => {
            let lat = lattice(config)?;
            let beta = config.sampler()?.beta;
            let r_ref = 2.0 * beta * d.v0 * d.r0 / cell.v_dd;
            let mapping = circuit_mapping(cell.v_dd, d.v0, r_ref, d.r0).map_err(|e| keyed("device", e))?;
            let net = DeviceNetwork::new(lat.graph(), lat.layout(), mapping, cell)?;
            let run = net.run(d.steps, d.dt, config.seed)?;
            let oracle = exact(config, out)?;
            out.data.summary.tvd = Some(run.histogram.tvd(&oracle)?);
            out.data.summary.mean_mz = Some(run.histogram.mean_magnetization());
            let mut columns = vec![("exact", &oracle), ("device", &run.histogram)];
            let reference;
            if let Some(s) = config.sampler.as_ref().filter(|s| s.sweeps > 0) {
                let stats = run_chain(lat.graph(), lat.layout(), &s.sampler_config(config.seed))?;
                reference = stats.histogram.expect("validated width");
                out.data.summary.metric("tvd_sampler", run.histogram.tvd(&reference)?);
                columns.push(("sampler", &reference));
            }
            out.file("device_histogram.csv", |w| run.histogram.write_csv(w))?;
            out.file("compare.csv", |w| side_by_side(w, &columns))?;
        }
    }
    Ok(())
}

pub(crate) fn relative(dir: &Path, path: &Path) -> String {
    path.strip_prefix(dir).unwrap_or(path).to_string_lossy().into_owned()
}
