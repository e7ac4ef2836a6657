use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::operator::DenseOperator;
use crate::error::{Error, Result};
use crate::histogram::Histogram;

/// Eigendecomposition of a Hamiltonian together with shifted Boltzmann weights.
///
/// The ground-state energy is subtracted before exponentiating, so
/// `weights[k] = exp(-beta (E_k - E_0))` never overflows; the shift cancels
/// in every ratio computed from it.
#[derive(Debug, Clone)]
pub struct ThermalState {
    sites: usize,
    beta: f64,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
    weights: DVector<f64>,
    partition: f64,
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() {
        return Err(Error::param("beta", format!("must be finite, got {beta}")));
    }
    if beta <= 0.0 {
        return Err(Error::param(
            "beta",
            format!("must be positive, got {beta}"),
        ));
    }
    Ok(())
}

impl ThermalState {
    pub fn new(h: &DenseOperator, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let eig = SymmetricEigen::new(h.matrix().clone());
        let ground = eig.eigenvalues.min();
        let weights = eig.eigenvalues.map(|e| (-beta * (e - ground)).exp());
        let partition = weights.sum();
        Ok(ThermalState {
            sites: h.sites(),
            beta,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
            weights,
            partition,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies.min()
    }

    /// `Tr[S exp(-beta H)] / Tr[exp(-beta H)]`.
    pub fn expectation(&self, s: &DenseOperator) -> Result<f64> {
        if s.dim() != self.vectors.nrows() {
            return Err(Error::DimensionMismatch {
                left: self.vectors.nrows(),
                right: s.dim(),
            });
        }
        let num = if s.is_diagonal() {
            let diag = s.matrix().diagonal();
            self.density_diagonal_unnormalized()
                .iter()
                .zip(diag.iter())
                .map(|(r, d)| r * d)
                .sum::<f64>()
        } else {
            let sv = s.matrix() * &self.vectors;
            (0..self.vectors.ncols())
                .map(|k| self.weights[k] * self.vectors.column(k).dot(&sv.column(k)))
                .sum::<f64>()
        };
        Ok(num / self.partition)
    }

    fn density_diagonal_unnormalized(&self) -> Vec<f64> {
        let dim = self.vectors.nrows();
        (0..dim)
            .map(|b| {
                let row = self.vectors.row(b);
                row.iter()
                    .zip(self.weights.iter())
                    .map(|(v, w)| w * v * v)
                    .sum()
            })
            .collect()
    }

    /// Diagonal of the thermal density matrix, relabelled into histogram state
    /// codes (matrix index `b` is histogram state `!b`).
    pub fn joint_distribution(&self) -> Result<Histogram> {
        let diag = self.density_diagonal_unnormalized();
        let top = diag.len() - 1;
        let mut probs = vec![0.0; diag.len()];
        for (b, w) in diag.iter().enumerate() {
            probs[top ^ b] = w / self.partition;
        }
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Histogram::new(self.sites, probs)
    }

    /// `exp(-beta (H - E_0))`, entrywise nonnegative for stoquastic `H`.
    pub fn shifted_exponential(&self) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |r, c| {
            self.vectors[(r, c)] * self.weights[c]
        });
        scaled * self.vectors.transpose()
    }
}

/// Thermal expectation of `s` under `h` at inverse temperature `beta`.
pub fn thermal_expectation(h: &DenseOperator, s: &DenseOperator, beta: f64) -> Result<f64> {
    if h.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: s.dim(),
        });
    }
    ThermalState::new(h, beta)?.expectation(s)
}

/// Probability of every basis pattern, indexed by histogram state code.
pub fn joint_distribution(h: &DenseOperator, beta: f64) -> Result<Histogram> {
    ThermalState::new(h, beta)?.joint_distribution()
}

/// Checks that `exp(-beta H)` has no negative entries, up to roundoff
/// relative to its largest entry.
pub fn exp_nonnegative(h: &DenseOperator, beta: f64) -> Result<bool> {
    let e = ThermalState::new(h, beta)?.shifted_exponential();
    let scale = e.amax();
    Ok(e.iter().all(|&x| x >= -1e-10 * scale))
}
