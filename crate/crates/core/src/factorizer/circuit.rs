use std::collections::BTreeMap;

use serde::Serialize;

use super::gates::{qubo_to_ising, GateKind, Qubo};
use crate::error::{Error, Result};
use crate::graph::InteractionGraph;

/// What a p-bit of the multiplier stands for. Bit `k` has weight `2^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum NodeRole {
    OperandP { bit: usize },
    OperandQ { bit: usize },
    Product { bit: usize },
    PartialProduct { row: usize, col: usize },
    Sum { row: usize, col: usize },
    Carry { row: usize, col: usize },
    /// Gate-local copy of another node, only present before merging.
    InputCopy { of: usize },
}

#[derive(Debug, Clone)]
pub struct CircuitGraph {
    pub bits: usize,
    pub graph: InteractionGraph,
    pub node_roles: Vec<NodeRole>,
    /// `(kept, removed)` index pairs in the unmerged numbering. Empty when
    /// the circuit was built unmerged.
    pub merged_pairs: Vec<(usize, usize)>,
    /// `penalty = energy + offset`; the penalty vanishes on consistent states.
    pub offset: f64,
    operand_p: Vec<usize>,
    operand_q: Vec<usize>,
    product: Vec<usize>,
    gates: Vec<Gate>,
    copies: Vec<(usize, usize)>,
}

impl CircuitGraph {
    pub fn num_pbits(&self) -> usize {
        self.graph.num_pbits()
    }

    pub fn operand_p(&self) -> &[usize] {
        &self.operand_p
    }

    pub fn operand_q(&self) -> &[usize] {
        &self.operand_q
    }

    /// Product register, least significant bit first.
    pub fn product(&self) -> &[usize] {
        &self.product
    }

    pub fn penalty(&self, state: &[i8]) -> f64 {
        self.graph.energy(state) + self.offset
    }

    /// The consistent state for operands `p` and `q`, found by evaluating
    /// the gates in netlist order.
    pub fn evaluate(&self, p: u64, q: u64) -> Vec<i8> {
        let mut s = vec![0u8; self.num_pbits()];
        for (k, &i) in self.operand_p.iter().enumerate() {
            s[i] = (p >> k & 1) as u8;
        }
        for (k, &i) in self.operand_q.iter().enumerate() {
            s[i] = (q >> k & 1) as u8;
        }
        let mut copies = self.copies.iter().peekable();
        for gate in &self.gates {
            // copies are recorded just before the gate that reads them
            while let Some(&&(src, c)) = copies.peek() {
                if !gate.nodes.contains(&Some(c)) {
                    break;
                }
                s[c] = s[src];
                copies.next();
            }
            let v = |k: usize| gate.nodes[k].map_or(0, |i| s[i]);
            match gate.kind {
                GateKind::And => s[gate.nodes[2].expect("output")] = v(0) & v(1),
                GateKind::FullAdder => {
                    let t = v(0) + v(1) + v(2);
                    s[gate.nodes[3].expect("sum")] = t & 1;
                    s[gate.nodes[4].expect("cout")] = t >> 1;
                }
            }
        }
        s.iter().map(|&x| if x == 1 { 1 } else { -1 }).collect()
    }
}

#[derive(Debug, Clone)]
struct Gate {
    kind: GateKind,
    /// `None` is a constant zero input.
    nodes: Vec<Option<usize>>,
}

struct Netlist {
    roles: Vec<NodeRole>,
    gates: Vec<Gate>,
    /// `(source, copy)`: the copy must equal the source.
    copies: Vec<(usize, usize)>,
}

impl Netlist {
    fn node(&mut self, role: NodeRole) -> usize {
        self.roles.push(role);
        self.roles.len() - 1
    }

    /// Gate input fed by another gate's output: a fresh local copy.
    fn wire(&mut self, source: Option<usize>) -> Option<usize> {
        source.map(|s| {
            let c = self.node(NodeRole::InputCopy { of: s });
            self.copies.push((s, c));
            c
        })
    }
}

/// Ripple-carry array multiplier. Row `j >= 1` adds `p * q_j` to the running
/// sum with one adder per operand bit; missing inputs are constant zeros.
fn array_multiplier(bits: usize) -> (Netlist, Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut net = Netlist {
        roles: Vec::new(),
        gates: Vec::new(),
        copies: Vec::new(),
    };
    let p: Vec<usize> = (0..bits).map(|bit| net.node(NodeRole::OperandP { bit })).collect();
    let q: Vec<usize> = (0..bits).map(|bit| net.node(NodeRole::OperandQ { bit })).collect();
    // pp[row][col] = p_col AND q_row
    let mut pp = vec![vec![0; bits]; bits];
    for (row, &qr) in q.iter().enumerate() {
        for (col, &pc) in p.iter().enumerate() {
            let out = net.node(NodeRole::PartialProduct { row, col });
            net.gates.push(Gate {
                kind: GateKind::And,
                nodes: vec![Some(pc), Some(qr), Some(out)],
            });
            pp[row][col] = out;
        }
    }
    let mut product = vec![pp[0][0]];
    // running[k] holds the bit of weight 2^(row + k) entering the current row
    let mut running: Vec<Option<usize>> = (1..bits).map(|k| Some(pp[0][k])).collect();
    running.push(None);
    for row in 1..bits {
        let mut carry: Option<usize> = None;
        let mut next = Vec::with_capacity(bits);
        for col in 0..bits {
            let a = net.wire(Some(pp[row][col]));
            let b = net.wire(running[col]);
            let cin = net.wire(carry);
            let sum = net.node(NodeRole::Sum { row, col });
            let cout = net.node(NodeRole::Carry { row, col });
            net.gates.push(Gate {
                kind: GateKind::FullAdder,
                nodes: vec![a, b, cin, Some(sum), Some(cout)],
            });
            next.push(sum);
            carry = Some(cout);
        }
        product.push(next[0]);
        running = next[1..].iter().copied().map(Some).collect();
        running.push(carry);
    }
    product.extend(running.iter().map(|r| r.expect("last row is complete")));
    (net, p, q, product)
}

/// Builds the invertible multiplier for `bits`-bit operands. With `merge`,
/// every gate-local input copy is folded into its source node, which then
/// receives the summed input of both.
pub fn build_multiplier(bits: usize, merge: bool) -> Result<CircuitGraph> {
    if bits < 2 {
        return Err(Error::param("bits", format!("need at least 2 operand bits, got {bits}")));
    }
    let (net, p, q, product) = array_multiplier(bits);
    let total = net.roles.len();

    // map every unmerged node to its final index
    let mut target: Vec<usize> = (0..total).collect();
    let mut merged_pairs = Vec::new();
    if merge {
        for &(src, copy) in &net.copies {
            target[copy] = target[src];
            merged_pairs.push((src, copy));
        }
    }
    let mut index = vec![usize::MAX; total];
    let mut roles = Vec::new();
    for node in 0..total {
        if target[node] == node {
            index[node] = roles.len();
            roles.push(net.roles[node]);
        }
    }
    let final_index = |node: usize| index[target[node]];
    for (bit, &node) in product.iter().enumerate() {
        roles[final_index(node)] = NodeRole::Product { bit };
    }

    let mut graph = InteractionGraph::new(roles.len());
    let mut offset = 0.0;
    let mut gates = Vec::with_capacity(net.gates.len());
    for gate in &net.gates {
        let nodes: Vec<Option<usize>> = gate.nodes.iter().map(|n| n.map(final_index)).collect();
        offset += qubo_to_ising(&gate.kind.qubo(), &mut graph, &nodes);
        gates.push(Gate {
            kind: gate.kind,
            nodes,
        });
    }
    let copies = if merge {
        Vec::new()
    } else {
        net.copies.clone()
    };
    if !merge {
        // (s_a - s_b)^2 = s_a + s_b - 2 s_a s_b
        let copy = Qubo {
            linear: vec![1.0, 1.0],
            quadratic: vec![(0, 1, -2.0)],
        };
        for &(src, c) in &net.copies {
            offset += qubo_to_ising(&copy, &mut graph, &[Some(final_index(src)), Some(final_index(c))]);
        }
    }
    for r in &mut roles {
        if let NodeRole::InputCopy { of } = r {
            *of = index[*of];
        }
    }
    Ok(CircuitGraph {
        bits,
        graph,
        node_roles: roles,
        merged_pairs,
        offset,
        operand_p: p.iter().map(|&n| final_index(n)).collect(),
        operand_q: q.iter().map(|&n| final_index(n)).collect(),
        product: product.iter().map(|&n| final_index(n)).collect(),
        gates,
        copies,
    })
}

fn decode_register(state: &[i8], register: &[usize]) -> u64 {
    register
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &i)| acc | (u64::from(state[i] > 0) << k))
}

/// Operand registers read with `-1 -> 0` and `+1 -> 1`.
pub fn decode_factors(state: &[i8], circuit: &CircuitGraph) -> (u64, u64) {
    (
        decode_register(state, &circuit.operand_p),
        decode_register(state, &circuit.operand_q),
    )
}

pub fn decode_product(state: &[i8], circuit: &CircuitGraph) -> u64 {
    decode_register(state, &circuit.product)
}

/// Bipolar assignments that hold `value` in `register`.
pub(crate) fn encode_register(value: u64, register: &[usize]) -> Vec<(usize, i8)> {
    register
        .iter()
        .enumerate()
        .map(|(k, &i)| (i, if value >> k & 1 == 1 { 1 } else { -1 }))
        .collect()
}

/// Per-row tally used by reports: how many p-bits of each role kind exist.
pub fn role_counts(circuit: &CircuitGraph) -> BTreeMap<&'static str, usize> {
    let mut m = BTreeMap::new();
    for r in &circuit.node_roles {
        let k = match r {
            NodeRole::OperandP { .. } | NodeRole::OperandQ { .. } => "operand",
            NodeRole::Product { .. } => "product",
            NodeRole::PartialProduct { .. } => "partial_product",
            NodeRole::Sum { .. } => "sum",
            NodeRole::Carry { .. } => "carry",
            NodeRole::InputCopy { .. } => "input_copy",
        };
        *m.entry(k).or_insert(0) += 1;
    }
    m
}
