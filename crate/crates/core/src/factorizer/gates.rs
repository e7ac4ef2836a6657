use crate::graph::InteractionGraph;

/// Quadratic penalty `offset + sum h_i s_i + sum_{i<j} q_ij s_i s_j` over
/// binary variables `s in {0, 1}`. Zero exactly on valid assignments.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Qubo {
    pub linear: Vec<f64>,
    pub quadratic: Vec<(usize, usize, f64)>,
}

impl Qubo {
    #[cfg(test)]
    pub fn value(&self, s: &[u8]) -> f64 {
        let lin: f64 = self
            .linear
            .iter()
            .zip(s)
            .map(|(h, &x)| h * f64::from(x))
            .sum();
        let quad: f64 = self
            .quadratic
            .iter()
            .map(|&(i, j, q)| q * f64::from(s[i] * s[j]))
            .sum();
        lin + quad
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    And,
    FullAdder,
}

impl GateKind {
    pub fn variables(self) -> &'static [&'static str] {
        match self {
            GateKind::And => &["a", "b", "out"],
            GateKind::FullAdder => &["a", "b", "cin", "sum", "cout"],
        }
    }

    pub(crate) fn qubo(self) -> Qubo {
        match self {
            // a b - 2 a out - 2 b out + 3 out
            GateKind::And => Qubo {
                linear: vec![0.0, 0.0, 3.0],
                quadratic: vec![(0, 1, 1.0), (0, 2, -2.0), (1, 2, -2.0)],
            },
            // (a + b + cin - sum - 2 cout)^2
            GateKind::FullAdder => {
                let c = [1.0, 1.0, 1.0, -1.0, -2.0];
                let mut quadratic = Vec::new();
                for i in 0..5 {
                    for j in i + 1..5 {
                        quadratic.push((i, j, 2.0 * c[i] * c[j]));
                    }
                }
                Qubo {
                    linear: c.iter().map(|x| x * x).collect(),
                    quadratic,
                }
            }
        }
    }

    fn is_valid(self, s: &[u8]) -> bool {
        match self {
            GateKind::And => s[2] == s[0] & s[1],
            GateKind::FullAdder => {
                let total = s[0] + s[1] + s[2];
                s[3] == total & 1 && s[4] == total >> 1
            }
        }
    }
}

/// A logic gate as a small p-bit network whose ground states are its truth table.
#[derive(Debug, Clone)]
pub struct GateBlock {
    pub kind: GateKind,
    pub variables: Vec<&'static str>,
    pub graph: InteractionGraph,
    /// Added to the network energy this gives the penalty, which is zero on valid rows.
    pub offset: f64,
    /// Valid bipolar assignments in variable order.
    pub truth_table: Vec<Vec<i8>>,
}

impl GateBlock {
    pub fn energy(&self, state: &[i8]) -> f64 {
        self.graph.energy(state)
    }

    pub fn penalty(&self, state: &[i8]) -> f64 {
        self.graph.energy(state) + self.offset
    }
}

/// Bipolar form of a penalty: returns the network and the offset with
/// `penalty = energy + offset`, using `s = (1 + m) / 2`.
pub(crate) fn qubo_to_ising(qubo: &Qubo, graph: &mut InteractionGraph, nodes: &[Option<usize>]) -> f64 {
    let mut offset = 0.0;
    for (i, &h) in qubo.linear.iter().enumerate() {
        match nodes[i] {
            Some(p) => {
                graph.add_bias(p, -h / 2.0).expect("node in range");
                offset += h / 2.0;
            }
            None => {}
        }
    }
    for &(i, j, q) in &qubo.quadratic {
        match (nodes[i], nodes[j]) {
            (Some(a), Some(b)) if a == b => {
                // s^2 = s
                graph.add_bias(a, -q / 2.0).expect("node in range");
                offset += q / 2.0;
            }
            (Some(a), Some(b)) => {
                graph.add_pair(a, b, -q / 4.0).expect("distinct nodes");
                graph.add_bias(a, -q / 4.0).expect("node in range");
                graph.add_bias(b, -q / 4.0).expect("node in range");
                offset += q / 4.0;
            }
            // a constant-zero member removes the term
            _ => {}
        }
    }
    offset
}

pub fn gate_block(kind: GateKind) -> GateBlock {
    let k = kind.variables().len();
    let mut graph = InteractionGraph::new(k);
    let nodes: Vec<Option<usize>> = (0..k).map(Some).collect();
    let offset = qubo_to_ising(&kind.qubo(), &mut graph, &nodes);
    let truth_table = (0..1usize << k)
        .map(|code| (0..k).map(|i| (code >> i & 1) as u8).collect::<Vec<u8>>())
        .filter(|s| kind.is_valid(s))
        .map(|s| s.iter().map(|&x| if x == 1 { 1 } else { -1 }).collect())
        .collect();
    GateBlock {
        kind,
        variables: kind.variables().to_vec(),
        graph,
        offset,
        truth_table,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_states(k: usize) -> Vec<Vec<i8>> {
        (0..1usize << k)
            .map(|c| (0..k).map(|i| if c >> i & 1 == 1 { 1 } else { -1 }).collect())
            .collect()
    }

    fn check_block(kind: GateKind, valid: usize) {
        let block = gate_block(kind);
        let k = block.variables.len();
        let energies: Vec<f64> = all_states(k).iter().map(|s| block.energy(s)).collect();
        let ground = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        let grounds: Vec<Vec<i8>> = all_states(k)
            .into_iter()
            .zip(&energies)
            .filter(|(_, &e)| (e - ground).abs() < 1e-12)
            .map(|(s, _)| s)
            .collect();
        assert_eq!(grounds.len(), valid);
        assert_eq!(block.truth_table.len(), valid);
        for s in &grounds {
            assert!(block.truth_table.contains(s));
            assert!(block.penalty(s).abs() < 1e-12);
        }
        let gap = energies
            .iter()
            .filter(|&&e| e > ground + 1e-12)
            .fold(f64::INFINITY, |a, &e| a.min(e - ground));
        assert!(gap >= 1.0 - 1e-12, "gap {gap}");
    }

    #[test]
    fn and_ground_states() {
        check_block(GateKind::And, 4);
    }

    #[test]
    fn full_adder_ground_states() {
        check_block(GateKind::FullAdder, 8);
    }

    #[test]
    fn penalty_matches_qubo() {
        for kind in [GateKind::And, GateKind::FullAdder] {
            let block = gate_block(kind);
            let q = kind.qubo();
            for s in all_states(block.variables.len()) {
                let bits: Vec<u8> = s.iter().map(|&m| u8::from(m > 0)).collect();
                assert!((block.penalty(&s) - q.value(&bits)).abs() < 1e-12);
            }
        }
    }
}
