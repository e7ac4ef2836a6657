//! Probability tables over the 2^M spin configurations of a chain.
//!
//! States are labelled by a decimal code: spin up is bit 1, spin down bit 0,
//! site 0 is the most significant bit. All down is 0 and all up is 2^M - 1.

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn from_bipolar(m: i8) -> Spin {
        if m > 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }

    pub fn bipolar(self) -> i8 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }
}

/// Decodes a state code into its spin pattern, site 0 first.
pub fn pattern_of_state(sites: usize, state: usize) -> Vec<Spin> {
    (0..sites)
        .map(|i| {
            if state >> (sites - 1 - i) & 1 == 1 {
                Spin::Up
            } else {
                Spin::Down
            }
        })
        .collect()
}

/// State code of a bipolar slice (`+1` = up).
#[inline]
pub fn state_of_bipolar(values: &[i8]) -> usize {
    values
        .iter()
        .fold(0usize, |acc, &m| (acc << 1) | usize::from(m > 0))
}

/// Normalized probability table over `2^sites` states.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    sites: usize,
    probs: Vec<f64>,
}

pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

impl Histogram {
    /// Builds a histogram from probabilities that already sum to one.
    pub fn new(sites: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << sites {
            return Err(Error::param(
                "probs",
                format!("expected {} entries, got {}", 1usize << sites, probs.len()),
            ));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::param(
                "probs",
                "entries must be finite and nonnegative",
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE * probs.len().max(1) as f64 {
            return Err(Error::param("probs", format!("sum is {total}, not 1")));
        }
        Ok(Histogram { sites, probs })
    }

    /// Normalizes raw weights (counts or Boltzmann factors).
    pub fn from_weights(sites: usize, weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::EmptyInput("histogram weights"));
        }
        Histogram::new(sites, weights.iter().map(|w| w / total).collect())
    }

    pub fn from_counts(sites: usize, counts: &[u64]) -> Result<Self> {
        let w: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        Histogram::from_weights(sites, &w)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, state: usize) -> f64 {
        self.probs[state]
    }

    /// Total variation distance `1/2 sum |p - q|`.
    pub fn tvd(&self, other: &Histogram) -> Result<f64> {
        if self.sites != other.sites {
            return Err(Error::DimensionMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(0.5
            * self
                .probs
                .iter()
                .zip(&other.probs)
                .map(|(p, q)| (p - q).abs())
                .sum::<f64>())
    }

    /// Probability that `site` is up.
    pub fn marginal_up(&self, site: usize) -> f64 {
        let shift = self.sites - 1 - site;
        self.probs
            .iter()
            .enumerate()
            .filter(|(s, _)| s >> shift & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }

    /// Average site magnetization implied by the table.
    pub fn mean_magnetization(&self) -> f64 {
        let m = self.sites as f64;
        self.probs
            .iter()
            .enumerate()
            .map(|(s, p)| {
                let ups = s.count_ones() as f64;
                p * (2.0 * ups - m) / m
            })
            .sum()
    }

    /// Indices sorted from least to most probable.
    pub fn ascending_states(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.probs[a].total_cmp(&self.probs[b]));
        idx
    }

    /// CSV with header `state_index,probability`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "state_index,probability")?;
        for (s, p) in self.probs.iter().enumerate() {
            writeln!(out, "{s},{p:.12e}")?;
        }
        Ok(())
    }
}
