use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{InteractionGraph, SliceLayout};

/// A pair term that carries the inter-slice coupling.
///
/// With two slices the bonds `(i,0)-(i,1)` and `(i,1)-(i,0)` are the same
/// pair, so one stored term may stand for several ring bonds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerpTerm {
    pub term: usize,
    pub multiplicity: f64,
}

/// Classical lattice produced by a Trotter mapping.
#[derive(Debug, Clone)]
pub struct ReplicaLattice {
    graph: InteractionGraph,
    layout: SliceLayout,
    perp_terms: Vec<PerpTerm>,
}

impl ReplicaLattice {
    pub(crate) fn new(
        graph: InteractionGraph,
        layout: SliceLayout,
        perp_terms: Vec<PerpTerm>,
    ) -> Self {
        debug_assert_eq!(graph.num_pbits(), layout.num_pbits());
        ReplicaLattice {
            graph,
            layout,
            perp_terms,
        }
    }

    pub fn graph(&self) -> &InteractionGraph {
        &self.graph
    }

    pub fn layout(&self) -> SliceLayout {
        self.layout
    }

    pub fn sites(&self) -> usize {
        self.layout.sites
    }

    pub fn slices(&self) -> usize {
        self.layout.slices
    }

    pub fn index_of(&self, site: usize, slice: usize) -> usize {
        self.layout.index_of(site, slice)
    }

    pub fn perp_terms(&self) -> &[PerpTerm] {
        &self.perp_terms
    }

    /// Rewrites every inter-slice bond to `j_perp`. Other terms are untouched.
    pub fn set_perp_coupling(&mut self, j_perp: f64) {
        for p in &self.perp_terms {
            self.graph.set_pair_weight(p.term, j_perp * p.multiplicity);
        }
    }

    /// Line-oriented dump: a `sites slices` header, one `order members.. weight`
    /// line per term, `bias i value` lines, then `perp term multiplicity` lines
    /// naming the inter-slice pair terms by their position among the pairs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.layout.sites, self.layout.slices);
        for t in self.graph.terms() {
            let _ = write!(out, "{}", t.order());
            for m in t.members() {
                let _ = write!(out, " {m}");
            }
            let _ = writeln!(out, " {}", t.weight());
        }
        for (i, b) in self.graph.biases().iter().enumerate() {
            let _ = writeln!(out, "bias {i} {b}");
        }
        for p in &self.perp_terms {
            let _ = writeln!(out, "perp {} {}", p.term, p.multiplicity);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: usize, reason: &str| Error::Parse {
            what: format!("lattice line {line}"),
            reason: reason.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad(hl, "header must be `sites slices`"))?;
        if head.len() != 2 || head[0] == 0 || head[1] == 0 {
            return Err(bad(hl, "header must be `sites slices`"));
        }
        let layout = SliceLayout::new(head[0], head[1]);
        let mut graph = InteractionGraph::new(layout.num_pbits());
        let mut perp = Vec::new();
        for (ln, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(ln, "bad number"));
            let idx = |s: &str| s.parse::<usize>().map_err(|_| bad(ln, "bad index"));
            match fields.as_slice() {
                ["2", i, j, w] => {
                    graph.add_pair(idx(i)?, idx(j)?, num(w)?)?;
                }
                ["4", a, b, c, d, w] => {
                    graph.add_quad([idx(a)?, idx(b)?, idx(c)?, idx(d)?], num(w)?)?;
                }
                ["bias", i, v] => graph.add_bias(idx(i)?, num(v)?)?,
                ["perp", t, m] => {
                    let term = idx(t)?;
                    if term >= graph.pair_terms().len() {
                        return Err(bad(ln, "perp names an unknown pair term"));
                    }
                    perp.push(PerpTerm {
                        term,
                        multiplicity: num(m)?,
                    });
                }
                _ => return Err(bad(ln, "unrecognized line")),
            }
        }
        Ok(ReplicaLattice::new(graph, layout, perp))
    }
}

/// The flat p-bit network of a lattice, adjacency included.
pub fn consolidate(lattice: &ReplicaLattice) -> InteractionGraph {
    lattice.graph.clone()
}
