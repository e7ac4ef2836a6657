//! C ABI over `pbit-emu`.
//!
//! Objects cross the boundary as opaque handles created by a `*_new` or
//! producer function and released with the matching `*_free`. Every fallible
//! call returns a [`PbitStatus`]; on failure a message is kept per thread
//! and can be copied out with [`pbit_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pbit_emu::annealing::{make_linear_schedule, Schedule};
use pbit_emu::exact::{build_hamiltonian, joint_distribution, QuantumModelSpec};
use pbit_emu::experiment::{run_experiment, ExperimentConfig};
use pbit_emu::factorizer::{build_multiplier, clamp_and_solve, CircuitGraph, FactorConfig, FactorMode};
use pbit_emu::sampler::{run_chain, SamplerConfig};
use pbit_emu::trotter::{map_heisenberg, map_tfim, ReplicaLattice};
use pbit_emu::{Error, Histogram};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Runtime = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbitFactorMode {
    Ca = 0,
    Sqa = 1,
}

/// Quantum chain description.
pub struct PbitModel {
    spec: QuantumModelSpec,
}

/// Classical replica lattice of a mapped model.
pub struct PbitLattice {
    lattice: ReplicaLattice,
}

/// Probabilities over `2^sites` basis states.
pub struct PbitHistogram {
    hist: Histogram,
}

/// Invertible multiplier circuit.
pub struct PbitCircuit {
    circuit: CircuitGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(PbitStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_validation() {
            PbitStatus::InvalidArgument
        } else {
            PbitStatus::Runtime
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PbitStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PbitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PbitStatus::Ok
        }
        Ok(Err(Failure(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside pbit-emu".into());
            PbitStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn store<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = value;
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pbit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Length in bytes of the last error message on this thread, without the NUL.
#[no_mangle]
pub extern "C" fn pbit_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message (NUL-terminated) into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pbit_last_error_message(buf: *mut c_char, len: usize) -> PbitStatus {
    if buf.is_null() {
        return PbitStatus::NullPointer;
    }
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if msg.len() + 1 > len {
            return PbitStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), msg.len());
        *buf.add(msg.len()) = 0;
        PbitStatus::Ok
    })
}

/// Uniform periodic TFIM chain.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn pbit_model_tfim(
    sites: usize,
    coupling: f64,
    gamma_x: f64,
    gamma_z: f64,
    out: *mut *mut PbitModel,
) -> PbitStatus {
    guard(|| {
        let spec = QuantumModelSpec::tfim_uniform(sites, coupling, gamma_x, gamma_z);
        spec.validate()?;
        emit(out, PbitModel { spec })
    })
}

/// Periodic XYZ Heisenberg chain in a transverse field.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn pbit_model_heisenberg(
    sites: usize,
    jx: f64,
    jy: f64,
    jz: f64,
    gamma_x: f64,
    out: *mut *mut PbitModel,
) -> PbitStatus {
    guard(|| {
        let spec = QuantumModelSpec::heisenberg(sites, jx, jy, jz, gamma_x);
        spec.validate()?;
        emit(out, PbitModel { spec })
    })
}

/// # Safety
/// `model` must be null or a handle from a `pbit_model_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn pbit_model_free(model: *mut PbitModel) {
    free(model)
}

/// Exact thermal distribution over the computational basis.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pbit_exact_distribution(
    model: *const PbitModel,
    beta: f64,
    out: *mut *mut PbitHistogram,
) -> PbitStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let h = build_hamiltonian(&m.spec)?;
        emit(out, PbitHistogram { hist: joint_distribution(&h, beta)? })
    })
}

/// Maps the model onto `n` Trotter slices (`2n` for Heisenberg).
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pbit_lattice_map(
    model: *const PbitModel,
    n: usize,
    beta: f64,
    out: *mut *mut PbitLattice,
) -> PbitStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let lattice = match m.spec {
            QuantumModelSpec::Tfim(_) => map_tfim(&m.spec, n, beta)?,
            QuantumModelSpec::Heisenberg(_) => map_heisenberg(&m.spec, n, beta)?,
        };
        emit(out, PbitLattice { lattice })
    })
}

/// # Safety
/// `lattice` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pbit_lattice_num_pbits(lattice: *const PbitLattice, out: *mut usize) -> PbitStatus {
    guard(|| store(out, deref(lattice, "lattice")?.lattice.graph().num_pbits()))
}

/// # Safety
/// `lattice` must be null or a handle from [`pbit_lattice_map`].
#[no_mangle]
pub unsafe extern "C" fn pbit_lattice_free(lattice: *mut PbitLattice) {
    free(lattice)
}

/// Runs one p-bit chain and returns the slice histogram pooled over the
/// sweeps after `burn_in`.
///
/// # Safety
/// `lattice` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pbit_sample(
    lattice: *const PbitLattice,
    beta: f64,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
    out: *mut *mut PbitHistogram,
) -> PbitStatus {
    guard(|| {
        let l = &deref(lattice, "lattice")?.lattice;
        let cfg = SamplerConfig {
            burn_in,
            ..SamplerConfig::new(beta, sweeps, seed)
        };
        let stats = run_chain(l.graph(), l.layout(), &cfg)?;
        let hist = stats.histogram.ok_or_else(|| {
            Failure(PbitStatus::InvalidArgument, "slice too wide to histogram".into())
        })?;
        emit(out, PbitHistogram { hist })
    })
}

/// # Safety
/// `hist` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pbit_histogram_len(hist: *const PbitHistogram, out: *mut usize) -> PbitStatus {
    guard(|| store(out, deref(hist, "hist")?.hist.len()))
}

/// Copies all probabilities into `buf`, which must hold at least
/// [`pbit_histogram_len`] values.
///
/// # Safety
/// `hist` must be a live handle and `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pbit_histogram_probs(
    hist: *const PbitHistogram,
    buf: *mut f64,
    len: usize,
) -> PbitStatus {
    guard(|| {
        let p = deref(hist, "hist")?.hist.probs();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < p.len() {
            return Err(Failure(
                PbitStatus::BufferTooSmall,
                format!("need {} values, got room for {len}", p.len()),
            ));
        }
        ptr::copy_nonoverlapping(p.as_ptr(), buf, p.len());
        Ok(())
    })
}

/// Total variation distance between two histograms of equal size.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pbit_histogram_tvd(
    a: *const PbitHistogram,
    b: *const PbitHistogram,
    out: *mut f64,
) -> PbitStatus {
    guard(|| {
        let d = deref(a, "a")?.hist.tvd(&deref(b, "b")?.hist)?;
        store(out, d)
    })
}

/// # Safety
/// `hist` must be null or a histogram handle.
#[no_mangle]
pub unsafe extern "C" fn pbit_histogram_free(hist: *mut PbitHistogram) {
    free(hist)
}

/// Array multiplier with `bits`-bit operands, equality-linked nodes merged.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pbit_multiplier_new(bits: usize, out: *mut *mut PbitCircuit) -> PbitStatus {
    guard(|| emit(out, PbitCircuit { circuit: build_multiplier(bits, true)? }))
}

/// # Safety
/// `circuit` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pbit_circuit_num_pbits(circuit: *const PbitCircuit, out: *mut usize) -> PbitStatus {
    guard(|| store(out, deref(circuit, "circuit")?.circuit.num_pbits()))
}

/// Factors `n` with the default schedule of `mode` and writes the success
/// probability. Gate penalties are multiplied by `energy_scale`.
///
/// # Safety
/// `circuit` must be a live handle and `success` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pbit_factor(
    circuit: *const PbitCircuit,
    n: u64,
    mode: PbitFactorMode,
    steps: usize,
    ensembles: usize,
    energy_scale: f64,
    seed: u64,
    success: *mut f64,
) -> PbitStatus {
    guard(|| {
        let c = &deref(circuit, "circuit")?.circuit;
        let (mode, schedule) = match mode {
            PbitFactorMode::Ca => (FactorMode::Ca, make_linear_schedule(1.0, 0.1, steps)?),
            PbitFactorMode::Sqa => (FactorMode::Sqa, Schedule::transverse_field(3.0, 0.1, steps, 10.0)?),
        };
        let cfg = FactorConfig {
            energy_scale,
            ..FactorConfig::new(seed)
        };
        let report = clamp_and_solve(c, n, mode, &schedule, ensembles, &cfg)?;
        store(success, report.success_probability())
    })
}

/// # Safety
/// `circuit` must be null or a handle from [`pbit_multiplier_new`].
#[no_mangle]
pub unsafe extern "C" fn pbit_circuit_free(circuit: *mut PbitCircuit) {
    free(circuit)
}

/// Runs a TOML experiment config and writes its artifacts to its `output_dir`.
///
/// # Safety
/// `config_toml` must be a valid NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn pbit_run_experiment(config_toml: *const c_char) -> PbitStatus {
    guard(|| {
        if config_toml.is_null() {
            return Err(null("config_toml"));
        }
        let text = CStr::from_ptr(config_toml)
            .to_str()
            .map_err(|e| Failure(PbitStatus::InvalidArgument, format!("config is not UTF-8: {e}")))?;
        let cfg = ExperimentConfig::from_toml_str(text)?;
        run_experiment(&cfg)?;
        Ok(())
    })
}
