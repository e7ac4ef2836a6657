use std::collections::BTreeSet;

use super::*;
use crate::annealing::make_linear_schedule;

fn all_states(k: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1usize << k).map(move |c| (0..k).map(|i| if c >> i & 1 == 1 { 1 } else { -1 }).collect())
}

/// Zero-penalty states of a circuit, found by brute force.
fn ground_states(c: &CircuitGraph) -> Vec<Vec<i8>> {
    all_states(c.num_pbits())
        .filter(|s| c.penalty(s).abs() < 1e-9)
        .collect()
}

fn topology_count(bits: usize) -> (usize, usize) {
    let adders = bits * (bits - 1);
    let merged = 2 * bits + bits * bits + 2 * adders;
    // every adder input is a copy except the zero carry-in of column 0 and
    // the zero running bit in the top column of the first row
    let copies = 3 * adders - (bits - 1) - 1;
    (merged, merged + copies)
}

#[test]
fn pbit_counts() {
    for (bits, expect) in [(2, 12), (4, 48), (8, 192)] {
        let merged = build_multiplier(bits, true).unwrap();
        let plain = build_multiplier(bits, false).unwrap();
        assert_eq!(merged.num_pbits(), expect);
        assert_eq!((merged.num_pbits(), plain.num_pbits()), topology_count(bits));
        assert!(merged.num_pbits() < plain.num_pbits());
        assert_eq!(merged.merged_pairs.len(), plain.num_pbits() - merged.num_pbits());
        assert_eq!(merged.product().len(), 2 * bits);
    }
    assert!(build_multiplier(1, true).is_err());
}

#[test]
fn merged_pairs_were_equalities() {
    let plain = build_multiplier(3, false).unwrap();
    let merged = build_multiplier(3, true).unwrap();
    for &(kept, removed) in &merged.merged_pairs {
        assert_eq!(plain.node_roles[removed], NodeRole::InputCopy { of: kept });
        // the unmerged circuit penalizes disagreement between the pair
        assert!(plain.graph.pair_weight(kept, removed) > 0.0);
    }
}

#[test]
fn ground_states_are_multiplication_triples() {
    let c = build_multiplier(2, true).unwrap();
    let grounds = ground_states(&c);
    assert_eq!(grounds.len(), 16);
    let pairs: BTreeSet<(u64, u64)> = grounds
        .iter()
        .map(|s| {
            let (p, q) = decode_factors(s, &c);
            assert_eq!(decode_product(s, &c), p * q);
            (p, q)
        })
        .collect();
    assert_eq!(pairs.len(), 16);
    // the penalty gap is at least one gate violation
    let min_excited = all_states(c.num_pbits())
        .map(|s| c.penalty(&s))
        .filter(|&e| e > 1e-9)
        .fold(f64::INFINITY, f64::min);
    assert!(min_excited >= 1.0 - 1e-9);
}

#[test]
fn merging_preserves_ground_states() {
    let merged = build_multiplier(2, true).unwrap();
    let plain = build_multiplier(2, false).unwrap();
    let plain_grounds = ground_states(&plain);
    assert_eq!(plain_grounds.len(), 16);
    let kept: Vec<usize> = (0..plain.num_pbits())
        .filter(|&i| !matches!(plain.node_roles[i], NodeRole::InputCopy { .. }))
        .collect();
    assert_eq!(kept.len(), merged.num_pbits());
    let mut images = BTreeSet::new();
    for s in &plain_grounds {
        let projected: Vec<i8> = kept.iter().map(|&i| s[i]).collect();
        assert!(merged.penalty(&projected).abs() < 1e-9);
        let (p, q) = decode_factors(s, &plain);
        assert_eq!(decode_factors(&projected, &merged), (p, q));
        assert_eq!(decode_product(&projected, &merged), p * q);
        images.insert(projected);
    }
    assert_eq!(images.len(), 16);
}

#[test]
fn clamping_prunes_to_factor_pairs() {
    let c = build_multiplier(2, true).unwrap();
    let states: Vec<Vec<i8>> = all_states(c.num_pbits()).collect();
    for n in 0..16u64 {
        let clamps = product_clamps(&c, n).unwrap();
        let allowed: Vec<&Vec<i8>> = states
            .iter()
            .filter(|s| clamps.iter().all(|(i, v)| s[i] == v))
            .collect();
        let min = allowed.iter().map(|s| c.penalty(s)).fold(f64::INFINITY, f64::min);
        let found: BTreeSet<(u64, u64)> = allowed
            .iter()
            .filter(|s| c.penalty(s).abs() < 1e-9)
            .map(|s| decode_factors(s, &c))
            .collect();
        let expect: BTreeSet<(u64, u64)> = (0..4u64)
            .flat_map(|p| (0..4u64).map(move |q| (p, q)))
            .filter(|&(p, q)| p * q == n)
            .collect();
        assert_eq!(found, expect, "N = {n}");
        if expect.is_empty() {
            assert!(min >= 1.0 - 1e-9);
        }
    }
    assert!(product_clamps(&c, 16).is_err());
}

#[test]
fn weights_are_sparse_and_discrete() {
    let mut degrees = Vec::new();
    for bits in [4, 8] {
        let c = build_multiplier(bits, true).unwrap();
        let values: BTreeSet<i64> = c
            .graph
            .pair_terms()
            .iter()
            .map(|t| t.weight())
            .chain(c.graph.biases().iter().copied())
            .map(|w| {
                let k = w * 4.0;
                assert!((k - k.round()).abs() < 1e-12, "weight {w}");
                k.round() as i64
            })
            .collect();
        assert!(values.len() <= 12, "{values:?}");
        assert!(c.graph.quad_terms().is_empty());
        let n = c.num_pbits();
        let edges = c.graph.pair_terms().len();
        assert!(edges * 10 < n * n, "dense: {edges} edges for {n} p-bits");
        let inner = (0..n)
            .filter(|&i| !matches!(c.node_roles[i], NodeRole::OperandP { .. } | NodeRole::OperandQ { .. }))
            .map(|i| c.graph.degree(i))
            .max()
            .unwrap();
        degrees.push(inner);
    }
    assert_eq!(degrees[0], degrees[1]);
}

#[test]
fn decode_examples() {
    let c = build_multiplier(4, true).unwrap();
    let mut s = vec![-1i8; c.num_pbits()];
    assert_eq!(decode_factors(&s, &c), (0, 0));
    for (i, v) in operand_clamps(&c, 0b1011, 0b1101).unwrap().iter() {
        s[i] = v;
    }
    assert_eq!(decode_factors(&s, &c), (11, 13));
    for p in 0..16 {
        for q in 0..16 {
            let mut s = vec![-1i8; c.num_pbits()];
            for (i, v) in operand_clamps(&c, p, q).unwrap().iter() {
                s[i] = v;
            }
            assert_eq!(decode_factors(&s, &c), (p, q));
        }
    }
    assert!(operand_clamps(&c, 16, 1).is_err());
}

#[test]
fn evaluated_states_have_zero_penalty() {
    for (bits, merge) in [(3, true), (4, true), (4, false), (8, true)] {
        let c = build_multiplier(bits, merge).unwrap();
        let limit = 1u64 << bits;
        for p in (0..limit).step_by((limit / 16).max(1) as usize) {
            for q in (1..limit).step_by((limit / 8).max(1) as usize) {
                let s = c.evaluate(p, q);
                assert!(c.penalty(&s).abs() < 1e-9, "bits {bits} merge {merge}: {p} x {q}");
                assert_eq!(decode_product(&s, &c), p * q);
            }
        }
    }
}

#[test]
fn success_rule() {
    assert!(is_factorization(35, 5, 7));
    assert!(is_factorization(35, 7, 5));
    assert!(!is_factorization(35, 1, 35));
    assert!(!is_factorization(35, 5, 5));
}

#[test]
fn forward_multiplication() {
    let c = build_multiplier(4, true).unwrap();
    // Carry-chain defects cost one unit and only anneal out slowly, so the
    // ramp starts cold and is long.
    let sched = make_linear_schedule(0.3, 0.1, 200_000).unwrap();
    let cfg = FactorConfig {
        replicas: 1,
        ..FactorConfig::new(11)
    };
    let stats = multiply(&c, 11, 13, &sched, 100, &cfg).unwrap();
    assert!(stats.probability() >= 0.95, "p = {}", stats.probability());
}

#[test]
fn report_csv() {
    let c = build_multiplier(2, true).unwrap();
    let sched = make_linear_schedule(1.0, 0.1, 200).unwrap();
    let cfg = FactorConfig {
        replicas: 2,
        ..FactorConfig::new(1)
    };
    let r = clamp_and_solve(&c, 6, FactorMode::Ca, &sched, 3, &cfg).unwrap();
    assert_eq!(r.outcomes.len(), 6);
    assert_eq!(r.stats.trials, 6);
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("ensemble_id,p,q,success\n"));
    assert!(clamp_and_solve(&c, 99, FactorMode::Ca, &sched, 3, &cfg).is_err());
}
