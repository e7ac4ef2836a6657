use super::lattice::{PerpTerm, ReplicaLattice};
use crate::error::{Error, Result};
use crate::exact::{QuantumModelSpec, TfimSpec};
use crate::graph::{InteractionGraph, SliceLayout};

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::param(
            name,
            format!("must be finite and positive, got {v}"),
        ));
    }
    Ok(())
}

/// Inter-slice coupling `J_perp = -ln tanh(beta Gamma_x / n) / (2 beta)`.
pub fn perp_coupling(beta: f64, gamma_x: f64, n: usize) -> Result<f64> {
    check_positive("beta", beta)?;
    if !(gamma_x > 0.0) || !gamma_x.is_finite() {
        return Err(Error::DegenerateCoupling(format!(
            "J_perp needs gamma_x > 0 (ln tanh diverges at 0), got {gamma_x}"
        )));
    }
    if n == 0 {
        return Err(Error::param("n", "replica count must be at least 1"));
    }
    let a = beta * gamma_x / n as f64;
    // ln tanh a = ln(1 - e^{-2a}) - ln(1 + e^{-2a}); stays accurate for large a.
    let e = (-2.0 * a).exp();
    let ln_tanh = (-e).ln_1p() - e.ln_1p();
    Ok(-ln_tanh / (2.0 * beta))
}

/// Classical Ising energy of the chain: bonds as pair weights, `Gamma_z` as bias.
pub fn chain_graph(spec: &TfimSpec) -> Result<InteractionGraph> {
    let m = spec.sites();
    let mut g = InteractionGraph::new(m);
    // A one-site ring bonds the spin to itself, which is only a constant.
    if m >= 2 {
        for (i, &j) in spec.bonds.iter().enumerate() {
            g.add_pair(i, (i + 1) % m, j)?;
        }
    }
    for i in 0..m {
        g.add_bias(i, spec.gamma_z)?;
    }
    Ok(g)
}

/// Replicates a classical problem into `n` slices coupled by the transverse
/// field. Every problem term is divided by `n`; site `i` of slice `k` is tied
/// to site `i` of slice `k + 1` (periodic) with `J_perp`.
pub fn replicate_ising(
    problem: &InteractionGraph,
    n: usize,
    beta: f64,
    gamma_x: f64,
) -> Result<ReplicaLattice> {
    if n < 2 {
        return Err(Error::param(
            "n",
            format!("a replica ring needs at least 2 slices, got {n}"),
        ));
    }
    let j_perp = perp_coupling(beta, gamma_x, n)?;
    let sites = problem.num_pbits();
    let layout = SliceLayout::new(sites, n);
    let scale = 1.0 / n as f64;
    let mut g = InteractionGraph::new(layout.num_pbits());
    for k in 0..n {
        let at = |i: usize| layout.index_of(i, k);
        for t in problem.terms() {
            let m = t.members();
            if m.len() == 2 {
                g.add_pair(at(m[0]), at(m[1]), t.weight() * scale)?;
            } else {
                g.add_quad([at(m[0]), at(m[1]), at(m[2]), at(m[3])], t.weight() * scale)?;
            }
        }
        for (i, &b) in problem.biases().iter().enumerate() {
            g.add_bias(at(i), b * scale)?;
        }
    }
    let mut perp: Vec<PerpTerm> = Vec::new();
    for k in 0..n {
        for i in 0..sites {
            let term = g.add_pair(layout.index_of(i, k), layout.index_of(i, k + 1), j_perp)?;
            match perp.iter_mut().find(|p| p.term == term) {
                Some(p) => p.multiplicity += 1.0,
                None => perp.push(PerpTerm {
                    term,
                    multiplicity: 1.0,
                }),
            }
        }
    }
    Ok(ReplicaLattice::new(g, layout, perp))
}

/// Maps a TFIM chain onto an `M x n` classical torus.
pub fn map_tfim(spec: &QuantumModelSpec, n: usize, beta: f64) -> Result<ReplicaLattice> {
    spec.validate()?;
    let QuantumModelSpec::Tfim(t) = spec else {
        return Err(Error::InvalidModel("map_tfim needs a TFIM spec".into()));
    };
    replicate_ising(&chain_graph(t)?, n, beta, t.gamma_x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perp_coupling_examples() {
        let a = perp_coupling(0.5, 10.0, 10).unwrap();
        assert!((a - (-(0.5f64.tanh()).ln())).abs() < 1e-14);
        assert!((a - 0.771_933).abs() < 1e-5);
        let b = perp_coupling(10.0, 1.0, 250).unwrap();
        assert!((b - 0.04f64.tanh().ln() / -20.0).abs() < 1e-14);
        assert!((b - 0.160_970).abs() < 1e-5);
    }

    #[test]
    fn perp_coupling_limits() {
        assert!(perp_coupling(1.0, 1e3, 1).unwrap() < 1e-300);
        assert!(perp_coupling(1.0, 1e3, 1).unwrap() >= 0.0);
        assert!(perp_coupling(1.0, 1e-8, 1).unwrap() > 9.0);
        assert!(matches!(
            perp_coupling(1.0, 0.0, 1),
            Err(Error::DegenerateCoupling(_))
        ));
        assert!(perp_coupling(1.0, -1.0, 1).is_err());
        assert!(perp_coupling(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn four_site_lattice_weights() {
        let spec = QuantumModelSpec::tfim_uniform(4, 1.0, 10.0, 0.0);
        let lat = map_tfim(&spec, 10, 0.5).unwrap();
        let g = lat.graph();
        assert_eq!(g.num_pbits(), 40);
        assert_eq!(g.pair_terms().len(), 80);
        assert!(g.quad_terms().is_empty());
        assert!(g.biases().iter().all(|&b| b == 0.0));
        let jp = perp_coupling(0.5, 10.0, 10).unwrap();
        for k in 0..10 {
            for i in 0..4 {
                let a = lat.index_of(i, k);
                assert!((g.pair_weight(a, lat.index_of((i + 1) % 4, k)) - 0.1).abs() < 1e-15);
                assert_eq!(g.pair_weight(a, lat.index_of(i, k + 1)), jp);
            }
        }
        assert_eq!(lat.perp_terms().len(), 40);
    }

    #[test]
    fn eight_site_lattice_biases() {
        let spec = QuantumModelSpec::tfim_uniform(8, 2.0, 1.0, 1.0);
        let lat = map_tfim(&spec, 250, 10.0).unwrap();
        assert_eq!(lat.graph().num_pbits(), 2000);
        assert!(lat
            .graph()
            .biases()
            .iter()
            .all(|&b| (b - 0.004).abs() < 1e-15));
        for i in 0..2000 {
            assert_eq!(lat.graph().degree(i), 4);
        }
    }

    #[test]
    fn two_slices_and_two_sites_double_up() {
        let spec = QuantumModelSpec::tfim_uniform(2, 1.0, 1.0, 0.0);
        let lat = map_tfim(&spec, 2, 1.0).unwrap();
        let g = lat.graph();
        assert_eq!(g.pair_terms().len(), 4);
        assert_eq!(g.pair_weight(0, 1), 1.0);
        let jp = perp_coupling(1.0, 1.0, 2).unwrap();
        assert_eq!(g.pair_weight(0, 2), 2.0 * jp);
        assert!(lat.perp_terms().iter().all(|p| p.multiplicity == 2.0));
    }

    #[test]
    fn rejects_short_ring_and_wrong_kind() {
        let spec = QuantumModelSpec::tfim_uniform(4, 1.0, 1.0, 0.0);
        assert!(map_tfim(&spec, 1, 1.0).is_err());
        let h = QuantumModelSpec::heisenberg(4, 1.0, 1.0, 1.0, 0.5);
        assert!(map_tfim(&h, 4, 1.0).is_err());
        let zero = QuantumModelSpec::tfim_uniform(4, 1.0, 0.0, 0.0);
        assert!(matches!(
            map_tfim(&zero, 4, 1.0),
            Err(Error::DegenerateCoupling(_))
        ));
    }

    #[test]
    fn perp_reweighting_touches_only_perp_terms() {
        let spec = QuantumModelSpec::tfim_uniform(3, 1.0, 2.0, 0.5);
        let mut lat = map_tfim(&spec, 4, 1.0).unwrap();
        let before = lat.graph().clone();
        lat.set_perp_coupling(7.0);
        let perp: Vec<usize> = lat.perp_terms().iter().map(|p| p.term).collect();
        for (k, (a, b)) in before
            .pair_terms()
            .iter()
            .zip(lat.graph().pair_terms())
            .enumerate()
        {
            if perp.contains(&k) {
                assert_eq!(b.weight(), 7.0);
            } else {
                assert_eq!(a, b);
            }
        }
        assert_eq!(before.biases(), lat.graph().biases());
    }
}
