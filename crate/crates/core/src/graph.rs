//! Classical p-bit networks: pairwise weights, 4-body terms and biases.
//!
//! Energy convention, shared by every module:
//!
//! ```text
//! E(m) = - sum_pairs w m_i m_j - sum_quads t m_i m_j m_k m_l - sum_i b_i m_i
//! ```
//!
//! so lower energy is more probable and the input of p-bit `i` is
//! `I_i = -dE/dm_i`.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// One coupling of order 2 or 4 with its members stored in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTerm {
    members: Vec<usize>,
    weight: f64,
}

impl CouplingTerm {
    pub fn new(members: &[usize], weight: f64) -> Result<Self> {
        if members.len() != 2 && members.len() != 4 {
            return Err(Error::InvalidTerm(format!(
                "order must be 2 or 4, got {}",
                members.len()
            )));
        }
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTerm(format!(
                "members must be distinct: {members:?}"
            )));
        }
        if !weight.is_finite() {
            return Err(Error::InvalidTerm(format!("non-finite weight {weight}")));
        }
        Ok(CouplingTerm {
            members: sorted,
            weight,
        })
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    fn product(&self, state: &[i8]) -> f64 {
        self.members.iter().map(|&i| f64::from(state[i])).product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermRef {
    Pair(usize),
    Quad(usize),
}

/// A p-bit network. Weights of repeated member sets are summed on insertion,
/// so every member set appears at most once.
#[derive(Debug, Clone, Default)]
pub struct InteractionGraph {
    biases: Vec<f64>,
    pair_terms: Vec<CouplingTerm>,
    quad_terms: Vec<CouplingTerm>,
    adjacency: Vec<Vec<TermRef>>,
    pair_lookup: HashMap<[usize; 2], usize>,
    quad_lookup: HashMap<[usize; 4], usize>,
}

impl InteractionGraph {
    pub fn new(num_pbits: usize) -> Self {
        InteractionGraph {
            biases: vec![0.0; num_pbits],
            adjacency: vec![Vec::new(); num_pbits],
            ..Default::default()
        }
    }

    pub fn num_pbits(&self) -> usize {
        self.biases.len()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.num_pbits() {
            return Err(Error::InvalidTerm(format!(
                "p-bit {i} out of range for {} p-bits",
                self.num_pbits()
            )));
        }
        Ok(())
    }

    /// Adds `w m_i m_j` (or accumulates onto an existing pair). Returns the term index.
    pub fn add_pair(&mut self, i: usize, j: usize, weight: f64) -> Result<usize> {
        self.check_index(i)?;
        self.check_index(j)?;
        let term = CouplingTerm::new(&[i, j], weight)?;
        let key = [term.members[0], term.members[1]];
        if let Some(&idx) = self.pair_lookup.get(&key) {
            self.pair_terms[idx].weight += weight;
            return Ok(idx);
        }
        let idx = self.pair_terms.len();
        for &m in &key {
            self.adjacency[m].push(TermRef::Pair(idx));
        }
        self.pair_terms.push(term);
        self.pair_lookup.insert(key, idx);
        Ok(idx)
    }

    /// Adds a 4-body term `t m_a m_b m_c m_d`.
    pub fn add_quad(&mut self, members: [usize; 4], weight: f64) -> Result<usize> {
        for &m in &members {
            self.check_index(m)?;
        }
        let term = CouplingTerm::new(&members, weight)?;
        let key = [
            term.members[0],
            term.members[1],
            term.members[2],
            term.members[3],
        ];
        if let Some(&idx) = self.quad_lookup.get(&key) {
            self.quad_terms[idx].weight += weight;
            return Ok(idx);
        }
        let idx = self.quad_terms.len();
        for &m in &key {
            self.adjacency[m].push(TermRef::Quad(idx));
        }
        self.quad_terms.push(term);
        self.quad_lookup.insert(key, idx);
        Ok(idx)
    }

    pub fn add_bias(&mut self, i: usize, bias: f64) -> Result<()> {
        self.check_index(i)?;
        if !bias.is_finite() {
            return Err(Error::InvalidTerm(format!("non-finite bias {bias}")));
        }
        self.biases[i] += bias;
        Ok(())
    }

    /// Overwrites the weight of an existing pair term.
    pub fn set_pair_weight(&mut self, term: usize, weight: f64) {
        self.pair_terms[term].weight = weight;
    }

    pub fn pair_terms(&self) -> &[CouplingTerm] {
        &self.pair_terms
    }

    pub fn quad_terms(&self) -> &[CouplingTerm] {
        &self.quad_terms
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn adjacency(&self, i: usize) -> &[TermRef] {
        &self.adjacency[i]
    }

    pub fn pair_index(&self, i: usize, j: usize) -> Option<usize> {
        let key = if i < j { [i, j] } else { [j, i] };
        self.pair_lookup.get(&key).copied()
    }

    pub fn pair_weight(&self, i: usize, j: usize) -> f64 {
        self.pair_index(i, j)
            .map_or(0.0, |t| self.pair_terms[t].weight)
    }

    /// Number of distinct p-bits sharing at least one term with `i`.
    pub fn degree(&self, i: usize) -> usize {
        let mut nbrs: Vec<usize> = self.adjacency[i]
            .iter()
            .flat_map(|t| self.term(*t).members.iter().copied())
            .filter(|&j| j != i)
            .collect();
        nbrs.sort_unstable();
        nbrs.dedup();
        nbrs.len()
    }

    pub fn term(&self, t: TermRef) -> &CouplingTerm {
        match t {
            TermRef::Pair(k) => &self.pair_terms[k],
            TermRef::Quad(k) => &self.quad_terms[k],
        }
    }

    /// Reference input `I_i = -dE/dm_i`, walking the adjacency list.
    pub fn local_field(&self, state: &[i8], i: usize) -> f64 {
        let mut field = self.biases[i];
        for &t in &self.adjacency[i] {
            let term = self.term(t);
            let others: f64 = term
                .members
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| f64::from(state[j]))
                .product();
            field += term.weight * others;
        }
        field
    }

    pub fn energy(&self, state: &[i8]) -> f64 {
        let pairs: f64 = self
            .pair_terms
            .iter()
            .map(|t| t.weight * t.product(state))
            .sum();
        let quads: f64 = self
            .quad_terms
            .iter()
            .map(|t| t.weight * t.product(state))
            .sum();
        let bias: f64 = self
            .biases
            .iter()
            .zip(state)
            .map(|(b, &m)| b * f64::from(m))
            .sum();
        -(pairs + quads + bias)
    }

    /// Symmetric dense pair matrix `W` (zero diagonal). Only sensible for small graphs.
    pub fn dense_pair_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.num_pbits();
        let mut w = vec![vec![0.0; n]; n];
        for t in &self.pair_terms {
            let (i, j) = (t.members[0], t.members[1]);
            w[i][j] += t.weight;
            w[j][i] += t.weight;
        }
        w
    }

    /// Copy with every weight and bias multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut g = self.clone();
        for t in g.pair_terms.iter_mut().chain(g.quad_terms.iter_mut()) {
            t.weight *= factor;
        }
        for b in &mut g.biases {
            *b *= factor;
        }
        g
    }

    /// All terms, pairs first, as `(members, weight)`.
    pub fn terms(&self) -> impl Iterator<Item = &CouplingTerm> {
        self.pair_terms.iter().chain(self.quad_terms.iter())
    }
}

/// How p-bit indices split into Trotter slices: `index = slice * sites + site`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SliceLayout {
    pub sites: usize,
    pub slices: usize,
}

impl SliceLayout {
    pub fn new(sites: usize, slices: usize) -> Self {
        SliceLayout { sites, slices }
    }

    /// A single slice covering the whole graph.
    pub fn flat(num_pbits: usize) -> Self {
        SliceLayout {
            sites: num_pbits,
            slices: 1,
        }
    }

    pub fn num_pbits(&self) -> usize {
        self.sites * self.slices
    }

    /// Slice indices wrap around, so `slice == slices` is slice 0.
    #[inline]
    pub fn index_of(&self, site: usize, slice: usize) -> usize {
        (slice % self.slices) * self.sites + site
    }

    pub fn slice<'a, T>(&self, state: &'a [T], slice: usize) -> &'a [T] {
        &state[slice * self.sites..(slice + 1) * self.sites]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_pairs_are_summed() {
        let mut g = InteractionGraph::new(3);
        let a = g.add_pair(0, 1, 0.5).unwrap();
        let b = g.add_pair(1, 0, 0.25).unwrap();
        assert_eq!(a, b);
        assert_eq!(g.pair_terms().len(), 1);
        assert_eq!(g.pair_weight(0, 1), 0.75);
        assert_eq!(g.adjacency(0).len(), 1);
    }

    #[test]
    fn duplicate_quads_are_summed() {
        let mut g = InteractionGraph::new(4);
        g.add_quad([0, 1, 2, 3], 0.1).unwrap();
        g.add_quad([3, 2, 1, 0], 0.2).unwrap();
        assert_eq!(g.quad_terms().len(), 1);
        assert!((g.quad_terms()[0].weight() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_terms() {
        let mut g = InteractionGraph::new(3);
        assert!(g.add_pair(0, 0, 1.0).is_err());
        assert!(g.add_pair(0, 3, 1.0).is_err());
        assert!(g.add_quad([0, 1, 1, 2], 1.0).is_err());
        assert!(CouplingTerm::new(&[0, 1, 2], 1.0).is_err());
        assert!(g.add_pair(0, 1, f64::NAN).is_err());
    }

    #[test]
    fn field_examples() {
        let mut g = InteractionGraph::new(2);
        g.add_pair(0, 1, 1.0).unwrap();
        g.add_bias(0, 0.5).unwrap();
        assert_eq!(g.local_field(&[1, 1], 0), 1.5);

        let mut q = InteractionGraph::new(4);
        q.add_quad([0, 1, 2, 3], 0.3).unwrap();
        assert!((q.local_field(&[1, 1, 1, -1], 0) + 0.3).abs() < 1e-15);
    }

    #[test]
    fn all_up_energy() {
        let mut g = InteractionGraph::new(4);
        for i in 0..4 {
            g.add_pair(i, (i + 1) % 4, 1.0).unwrap();
        }
        assert_eq!(g.energy(&[1; 4]), -4.0);
        assert_eq!(g.energy(&[-1; 4]), -4.0);
    }

    #[test]
    fn adjacency_is_inverse_of_terms() {
        let mut g = InteractionGraph::new(5);
        g.add_pair(0, 1, 1.0).unwrap();
        g.add_pair(1, 2, 1.0).unwrap();
        g.add_quad([1, 2, 3, 4], 1.0).unwrap();
        for i in 0..5 {
            for &t in g.adjacency(i) {
                assert!(g.term(t).members().contains(&i));
            }
        }
        let total: usize = (0..5).map(|i| g.adjacency(i).len()).sum();
        assert_eq!(total, 2 + 2 + 4);
        assert_eq!(g.degree(1), 4);
    }
}
