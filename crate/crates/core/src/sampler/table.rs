use crate::graph::{InteractionGraph, TermRef};

#[derive(Debug, Clone, Copy)]
struct PairEdge {
    partner: u32,
    weight: f64,
}

#[derive(Debug, Clone, Copy)]
struct QuadEdge {
    partners: [u32; 3],
    weight: f64,
}

/// Compressed adjacency of an [`InteractionGraph`] laid out for the update loop.
///
/// Each p-bit owns a contiguous run of pair edges and a run of quad edges,
/// so its input is a short linear scan. Pair weights can be rewritten in
/// place through the original term index.
#[derive(Debug, Clone)]
pub struct FieldTable {
    bias: Vec<f64>,
    pair_start: Vec<u32>,
    pairs: Vec<PairEdge>,
    quad_start: Vec<u32>,
    quads: Vec<QuadEdge>,
    pair_slots: Vec<[u32; 2]>,
}

impl FieldTable {
    pub fn new(graph: &InteractionGraph) -> Self {
        let n = graph.num_pbits();
        let mut pair_start = Vec::with_capacity(n + 1);
        let mut quad_start = Vec::with_capacity(n + 1);
        let mut pairs = Vec::new();
        let mut quads = Vec::new();
        let mut pair_slots = vec![[u32::MAX; 2]; graph.pair_terms().len()];
        for i in 0..n {
            pair_start.push(pairs.len() as u32);
            quad_start.push(quads.len() as u32);
            for &t in graph.adjacency(i) {
                let term = graph.term(t);
                let others: Vec<u32> = term
                    .members()
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| j as u32)
                    .collect();
                match t {
                    TermRef::Pair(k) => {
                        let slot = &mut pair_slots[k];
                        let side = usize::from(slot[0] != u32::MAX);
                        slot[side] = pairs.len() as u32;
                        pairs.push(PairEdge {
                            partner: others[0],
                            weight: term.weight(),
                        });
                    }
                    TermRef::Quad(_) => quads.push(QuadEdge {
                        partners: [others[0], others[1], others[2]],
                        weight: term.weight(),
                    }),
                }
            }
        }
        pair_start.push(pairs.len() as u32);
        quad_start.push(quads.len() as u32);
        FieldTable {
            bias: graph.biases().to_vec(),
            pair_start,
            pairs,
            quad_start,
            quads,
            pair_slots,
        }
    }

    pub fn num_pbits(&self) -> usize {
        self.bias.len()
    }

    /// `I_i = b_i + sum w m_j + sum t m_j m_k m_l` on the current state.
    #[inline]
    pub fn field(&self, state: &[i8], i: usize) -> f64 {
        let mut acc = self.bias[i];
        let (a, b) = (self.pair_start[i] as usize, self.pair_start[i + 1] as usize);
        for e in &self.pairs[a..b] {
            acc += e.weight * f64::from(state[e.partner as usize]);
        }
        let (a, b) = (self.quad_start[i] as usize, self.quad_start[i + 1] as usize);
        for q in &self.quads[a..b] {
            let [x, y, z] = q.partners;
            let prod = state[x as usize] * state[y as usize] * state[z as usize];
            acc += q.weight * f64::from(prod);
        }
        acc
    }

    /// Rewrites the weight of pair term `term` (its index in the source graph).
    pub fn set_pair_weight(&mut self, term: usize, weight: f64) {
        for slot in self.pair_slots[term] {
            self.pairs[slot as usize].weight = weight;
        }
    }

    pub fn pair_weight(&self, term: usize) -> f64 {
        self.pairs[self.pair_slots[term][0] as usize].weight
    }
}
