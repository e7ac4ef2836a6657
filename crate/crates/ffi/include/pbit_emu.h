#ifndef PBIT_EMU_H
#define PBIT_EMU_H

#include <stddef.h>
#include <stdint.h>

typedef enum PbitStatus {
  PBIT_STATUS_OK = 0,
  PBIT_STATUS_NULL_POINTER = 1,
  PBIT_STATUS_INVALID_ARGUMENT = 2,
  PBIT_STATUS_RUNTIME = 3,
  PBIT_STATUS_BUFFER_TOO_SMALL = 4,
  PBIT_STATUS_PANIC = 5,
} PbitStatus;

typedef enum PbitFactorMode {
  PBIT_FACTOR_MODE_CA = 0,
  PBIT_FACTOR_MODE_SQA = 1,
} PbitFactorMode;

// Invertible multiplier circuit.
typedef struct PbitCircuit PbitCircuit;

// Probabilities over `2^sites` basis states.
typedef struct PbitHistogram PbitHistogram;

// Classical replica lattice of a mapped model.
typedef struct PbitLattice PbitLattice;

// Quantum chain description.
typedef struct PbitModel PbitModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *pbit_version(void);

// Length in bytes of the last error message on this thread, without the NUL.
uintptr_t pbit_last_error_length(void);

// Copies the last error message (NUL-terminated) into `buf`.
//
// # Safety
// `buf` must point to `len` writable bytes.
enum PbitStatus pbit_last_error_message(char *buf, uintptr_t len);

// Uniform periodic TFIM chain.
//
// # Safety
// `out` must be a valid pointer to write the handle to.
enum PbitStatus pbit_model_tfim(uintptr_t sites,
                                double coupling,
                                double gamma_x,
                                double gamma_z,
                                struct PbitModel **out);

// Periodic XYZ Heisenberg chain in a transverse field.
//
// # Safety
// `out` must be a valid pointer to write the handle to.
enum PbitStatus pbit_model_heisenberg(uintptr_t sites,
                                      double jx,
                                      double jy,
                                      double jz,
                                      double gamma_x,
                                      struct PbitModel **out);

// # Safety
// `model` must be null or a handle from a `pbit_model_*` constructor.
void pbit_model_free(struct PbitModel *model);

// Exact thermal distribution over the computational basis.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum PbitStatus pbit_exact_distribution(const struct PbitModel *model,
                                        double beta,
                                        struct PbitHistogram **out);

// Maps the model onto `n` Trotter slices (`2n` for Heisenberg).
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum PbitStatus pbit_lattice_map(const struct PbitModel *model,
                                 uintptr_t n,
                                 double beta,
                                 struct PbitLattice **out);

// # Safety
// `lattice` must be a live handle and `out` a valid pointer.
enum PbitStatus pbit_lattice_num_pbits(const struct PbitLattice *lattice, uintptr_t *out);

// # Safety
// `lattice` must be null or a handle from [`pbit_lattice_map`].
void pbit_lattice_free(struct PbitLattice *lattice);

// Runs one p-bit chain and returns the slice histogram pooled over the
// sweeps after `burn_in`.
//
// # Safety
// `lattice` must be a live handle and `out` a valid pointer.
enum PbitStatus pbit_sample(const struct PbitLattice *lattice,
                            double beta,
                            uintptr_t sweeps,
                            uintptr_t burn_in,
                            uint64_t seed,
                            struct PbitHistogram **out);

// # Safety
// `hist` must be a live handle and `out` a valid pointer.
enum PbitStatus pbit_histogram_len(const struct PbitHistogram *hist, uintptr_t *out);

// Copies all probabilities into `buf`, which must hold at least
// [`pbit_histogram_len`] values.
//
// # Safety
// `hist` must be a live handle and `buf` must point to `len` writable doubles.
enum PbitStatus pbit_histogram_probs(const struct PbitHistogram *hist, double *buf, uintptr_t len);

// Total variation distance between two histograms of equal size.
//
// # Safety
// `a` and `b` must be live handles and `out` a valid pointer.
enum PbitStatus pbit_histogram_tvd(const struct PbitHistogram *a,
                                   const struct PbitHistogram *b,
                                   double *out);

// # Safety
// `hist` must be null or a histogram handle.
void pbit_histogram_free(struct PbitHistogram *hist);

// Array multiplier with `bits`-bit operands, equality-linked nodes merged.
//
// # Safety
// `out` must be a valid pointer.
enum PbitStatus pbit_multiplier_new(uintptr_t bits, struct PbitCircuit **out);

// # Safety
// `circuit` must be a live handle and `out` a valid pointer.
enum PbitStatus pbit_circuit_num_pbits(const struct PbitCircuit *circuit, uintptr_t *out);

// Factors `n` with the default schedule of `mode` and writes the success
// probability. Gate penalties are multiplied by `energy_scale`.
//
// # Safety
// `circuit` must be a live handle and `success` a valid pointer.
enum PbitStatus pbit_factor(const struct PbitCircuit *circuit,
                            uint64_t n,
                            enum PbitFactorMode mode,
                            uintptr_t steps,
                            uintptr_t ensembles,
                            double energy_scale,
                            uint64_t seed,
                            double *success);

// # Safety
// `circuit` must be null or a handle from [`pbit_multiplier_new`].
void pbit_circuit_free(struct PbitCircuit *circuit);

// Runs a TOML experiment config and writes its artifacts to its `output_dir`.
//
// # Safety
// `config_toml` must be a valid NUL-terminated UTF-8 string.
enum PbitStatus pbit_run_experiment(const char *config_toml);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PBIT_EMU_H */
