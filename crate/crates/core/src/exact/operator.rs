//! Dense real operators on the 2^M-dimensional spin Hilbert space.
//!
//! Basis convention: matrix index `b` is read as an M-bit word with site 0 in
//! the most significant bit, and a 0 bit is spin up (the +1 eigenvector of
//! sigma-z, the first column of the 2x2 Pauli matrices). This is the plain
//! Kronecker-product order `s_0 (x) s_1 (x) ...`. Histograms use the opposite
//! bit value (up = 1), see [`crate::histogram`].

use std::io::Write;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use super::model::{QuantumModelSpec, MAX_EXACT_SITES};
use crate::error::{Error, Result};
use crate::histogram::Spin;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Real square matrix, `dim = 2^sites`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    sites: usize,
    matrix: DMatrix<f64>,
}

impl DenseOperator {
    pub fn zeros(sites: usize) -> Self {
        let dim = 1usize << sites;
        DenseOperator {
            sites,
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(sites: usize) -> Self {
        let dim = 1usize << sites;
        DenseOperator {
            sites,
            matrix: DMatrix::identity(dim, dim),
        }
    }

    /// Wraps a matrix whose dimension must be a power of two.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: matrix.ncols(),
            });
        }
        if !dim.is_power_of_two() {
            return Err(Error::param(
                "matrix",
                format!("dimension {dim} is not 2^M"),
            ));
        }
        Ok(DenseOperator {
            sites: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix[(row, col)]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        DenseOperator {
            sites: self.sites,
            matrix: &self.matrix * factor,
        }
    }

    /// Largest `|A - A^T|` entry.
    pub fn asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in (r + 1)..d {
                worst = worst.max((self.matrix[(r, c)] - self.matrix[(c, r)]).abs());
            }
        }
        worst
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|r| (0..d).all(|c| r == c || self.matrix[(r, c)] == 0.0))
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }

    /// Row-major CSV dump, one matrix row per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|c| format!("{}", self.matrix[(r, c)]))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    fn check_same(&self, other: &DenseOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same(other)?;
        Ok(DenseOperator {
            sites: self.sites,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn try_add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same(other)?;
        Ok(DenseOperator {
            sites: self.sites,
            matrix: &self.matrix + &other.matrix,
        })
    }
}

impl<'a> Mul for &'a DenseOperator {
    type Output = DenseOperator;

    /// Panics on dimension mismatch; use [`DenseOperator::try_mul`] otherwise.
    fn mul(self, rhs: Self) -> DenseOperator {
        self.try_mul(rhs).expect("operator dimensions differ")
    }
}

impl<'a> Add for &'a DenseOperator {
    type Output = DenseOperator;

    fn add(self, rhs: Self) -> DenseOperator {
        self.try_add(rhs).expect("operator dimensions differ")
    }
}

impl<'a> Sub for &'a DenseOperator {
    type Output = DenseOperator;

    fn sub(self, rhs: Self) -> DenseOperator {
        self.try_add(&rhs.scaled(-1.0))
            .expect("operator dimensions differ")
    }
}

fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 || sites > MAX_EXACT_SITES {
        return Err(Error::param(
            "sites",
            format!("exact operators support 1..={MAX_EXACT_SITES} sites, got {sites}"),
        ));
    }
    Ok(())
}

fn check_site(sites: usize, site: usize) -> Result<()> {
    if site >= sites {
        return Err(Error::SiteOutOfRange { site, sites });
    }
    Ok(())
}

#[inline]
fn bit_of(sites: usize, site: usize) -> usize {
    1usize << (sites - 1 - site)
}

/// Sign of sigma-z at `site` in basis state `b` (+1 for a 0 bit).
#[inline]
fn z_sign(b: usize, mask: usize) -> f64 {
    if b & mask == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `I (x) ... (x) s (x) ... (x) I` with the Pauli matrix `s` at `site` (0-based).
///
/// Sigma-y on its own has imaginary entries and is rejected; see
/// [`embed_pauli_yy`].
pub fn embed_pauli(sites: usize, site: usize, axis: Axis) -> Result<DenseOperator> {
    check_sites(sites)?;
    check_site(sites, site)?;
    let mask = bit_of(sites, site);
    let mut op = DenseOperator::zeros(sites);
    let dim = op.dim();
    match axis {
        Axis::Z => {
            for b in 0..dim {
                op.matrix[(b, b)] = z_sign(b, mask);
            }
        }
        Axis::X => {
            for b in 0..dim {
                op.matrix[(b ^ mask, b)] = 1.0;
            }
        }
        Axis::Y => return Err(Error::LoneSigmaY),
    }
    Ok(op)
}

/// Real product `sigma^y_site sigma^y_{site+1}` with periodic wrap.
///
/// For a single site (M = 1) the wrapped partner is the site itself and the
/// product is the identity.
pub fn embed_pauli_yy(sites: usize, site: usize) -> Result<DenseOperator> {
    check_sites(sites)?;
    check_site(sites, site)?;
    let next = (site + 1) % sites;
    if next == site {
        return Ok(DenseOperator::identity(sites));
    }
    let ma = bit_of(sites, site);
    let mb = bit_of(sites, next);
    let mut op = DenseOperator::zeros(sites);
    for b in 0..op.dim() {
        // sigma^y|0> = i|1>, sigma^y|1> = -i|0>: equal bits give i*i = -1.
        let same = ((b & ma) == 0) == ((b & mb) == 0);
        op.matrix[(b ^ ma ^ mb, b)] = if same { -1.0 } else { 1.0 };
    }
    Ok(op)
}

/// Quantum Hamiltonian of the model, carrying the overall minus sign.
pub fn build_hamiltonian(spec: &QuantumModelSpec) -> Result<DenseOperator> {
    spec.validate()?;
    let sites = spec.sites();
    check_sites(sites)?;
    let mut h = DenseOperator::zeros(sites);
    let dim = h.dim();
    match spec {
        QuantumModelSpec::Tfim(t) => {
            for b in 0..dim {
                let mut diag = 0.0;
                for i in 0..sites {
                    let zi = z_sign(b, bit_of(sites, i));
                    let zj = z_sign(b, bit_of(sites, (i + 1) % sites));
                    diag -= t.bonds[i] * zi * zj + t.gamma_z * zi;
                }
                h.matrix[(b, b)] = diag;
                for i in 0..sites {
                    h.matrix[(b ^ bit_of(sites, i), b)] -= t.gamma_x;
                }
            }
        }
        QuantumModelSpec::Heisenberg(p) => {
            for b in 0..dim {
                for i in 0..sites {
                    let ma = bit_of(sites, i);
                    let mb = bit_of(sites, (i + 1) % sites);
                    let same = z_sign(b, ma) * z_sign(b, mb);
                    h.matrix[(b, b)] -= p.jz * same;
                    // xx flips both spins with +1; yy flips both with -same.
                    h.matrix[(b ^ ma ^ mb, b)] -= p.jx - p.jy * same;
                    h.matrix[(b ^ ma, b)] -= p.gamma_x;
                }
            }
        }
    }
    Ok(h)
}

/// Site-averaged z magnetization `sum_j sigma^z_j / M`.
pub fn mean_z_operator(sites: usize) -> Result<DenseOperator> {
    check_sites(sites)?;
    let mut op = DenseOperator::zeros(sites);
    for b in 0..op.dim() {
        let s: f64 = (0..sites).map(|i| z_sign(b, bit_of(sites, i))).sum();
        op.matrix[(b, b)] = s / sites as f64;
    }
    Ok(op)
}

/// Matrix index of a spin pattern (site 0 first).
pub fn basis_index(pattern: &[Spin]) -> usize {
    pattern.iter().fold(0usize, |acc, s| {
        (acc << 1)
            | match s {
                Spin::Up => 0,
                Spin::Down => 1,
            }
    })
}

/// Product of single-site projectors `P_k = (I +/- sigma^z_k) / 2`.
///
/// The product is diagonal with a single unit entry, so it is written out
/// directly.
pub fn pattern_projector(sites: usize, pattern: &[Spin]) -> Result<DenseOperator> {
    check_sites(sites)?;
    if pattern.len() != sites {
        return Err(Error::param(
            "pattern",
            format!("length {} does not match {} sites", pattern.len(), sites),
        ));
    }
    let mut op = DenseOperator::zeros(sites);
    let b = basis_index(pattern);
    op.matrix[(b, b)] = 1.0;
    Ok(op)
}

/// True iff every off-diagonal entry is `<= 0` in the computational basis.
pub fn is_stoquastic(h: &DenseOperator) -> bool {
    let d = h.dim();
    (0..d).all(|r| (0..d).all(|c| r == c || h.matrix[(r, c)] <= 0.0))
}
