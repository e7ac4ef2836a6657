//! Exact quantum oracle: dense Hamiltonians from embedded Pauli matrices and
//! thermal averages through full diagonalization.
//!
//! Everything here is brute force and capped at [`MAX_EXACT_SITES`]; it is
//! the reference every sampled result is checked against, never the hot path.

mod model;
mod operator;
mod thermal;

pub use model::{HeisenbergSpec, ModelKind, QuantumModelSpec, TfimSpec, MAX_EXACT_SITES};
pub use operator::{
    basis_index, build_hamiltonian, embed_pauli, embed_pauli_yy, is_stoquastic, mean_z_operator,
    pattern_projector, Axis, DenseOperator,
};
pub use thermal::{exp_nonnegative, joint_distribution, thermal_expectation, ThermalState};

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;
    use crate::histogram::{pattern_of_state, Spin};

    fn pauli(axis: Axis) -> DMatrix<f64> {
        match axis {
            Axis::X => DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            Axis::Z => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
            Axis::Y => unreachable!(),
        }
    }

    /// Independent Kronecker-product construction of an embedded Pauli matrix.
    fn kron_embed(sites: usize, site: usize, axis: Axis) -> DMatrix<f64> {
        let mut m = DMatrix::from_element(1, 1, 1.0);
        for k in 0..sites {
            let f = if k == site {
                pauli(axis)
            } else {
                DMatrix::identity(2, 2)
            };
            m = m.kronecker(&f);
        }
        m
    }

    #[test]
    fn single_site_z_is_pauli() {
        let z = embed_pauli(1, 0, Axis::Z).unwrap();
        assert_eq!(
            z.matrix(),
            &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]))
        );
    }

    #[test]
    fn second_site_z_matches_kronecker() {
        let z = embed_pauli(2, 1, Axis::Z).unwrap();
        assert_eq!(z.matrix(), &kron_embed(2, 1, Axis::Z));
        assert_eq!(z.matrix().diagonal().as_slice(), &[1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn embedding_matches_kronecker_everywhere() {
        for sites in 1..=4 {
            for site in 0..sites {
                for axis in [Axis::X, Axis::Z] {
                    let op = embed_pauli(sites, site, axis).unwrap();
                    assert_eq!(op.matrix(), &kron_embed(sites, site, axis));
                }
            }
        }
    }

    #[test]
    fn x_squares_to_identity() {
        let x = embed_pauli(3, 1, Axis::X).unwrap();
        assert_eq!(&x * &x, DenseOperator::identity(3));
    }

    #[test]
    fn embed_errors() {
        assert!(matches!(
            embed_pauli(3, 3, Axis::X),
            Err(crate::Error::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            embed_pauli(3, 0, Axis::Y),
            Err(crate::Error::LoneSigmaY)
        ));
    }

    #[test]
    fn yy_pair_matches_complex_kronecker() {
        // sigma^y (x) sigma^y = [[0,0,0,-1],[0,0,1,0],[0,1,0,0],[-1,0,0,0]]
        let yy = embed_pauli_yy(2, 0).unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0,
            ],
        );
        assert_eq!(yy.matrix(), &expected);
        // On three sites the pair (2, 0) wraps around.
        let wrapped = embed_pauli_yy(3, 2).unwrap();
        assert!(wrapped.asymmetry() == 0.0);
        assert_eq!(&wrapped * &wrapped, DenseOperator::identity(3));
    }

    #[test]
    fn distinct_sites_commute() {
        for sites in 2..=4 {
            for a in 0..sites {
                for b in 0..sites {
                    if a == b {
                        continue;
                    }
                    for (pa, pb) in [(Axis::X, Axis::Z), (Axis::X, Axis::X), (Axis::Z, Axis::X)] {
                        let x = embed_pauli(sites, a, pa).unwrap();
                        let y = embed_pauli(sites, b, pb).unwrap();
                        assert!((&x * &y).max_abs_diff(&(&y * &x)) < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn single_zeeman_term() {
        let h = build_hamiltonian(&QuantumModelSpec::tfim_uniform(1, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(
            h.matrix(),
            &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0]))
        );
    }

    #[test]
    fn two_site_periodic_doubles_the_bond() {
        let h = build_hamiltonian(&QuantumModelSpec::tfim_uniform(2, 2.0, 0.0, 0.0)).unwrap();
        let z0 = kron_embed(2, 0, Axis::Z);
        let z1 = kron_embed(2, 1, Axis::Z);
        let oracle = -(&z0 * &z1 * 2.0 + &z1 * &z0 * 2.0);
        assert_eq!(h.matrix(), &oracle);
        assert_eq!(h.matrix().diagonal().as_slice(), &[-4.0, 4.0, 4.0, -4.0]);
    }

    #[test]
    fn tfim_matches_kronecker_assembly() {
        let spec = QuantumModelSpec::Tfim(TfimSpec {
            bonds: vec![1.0, -0.5, 2.0],
            gamma_x: 0.7,
            gamma_z: 0.3,
        });
        let h = build_hamiltonian(&spec).unwrap();
        let mut oracle = DMatrix::zeros(8, 8);
        let js = [1.0, -0.5, 2.0];
        for i in 0..3 {
            let zi = kron_embed(3, i, Axis::Z);
            let zj = kron_embed(3, (i + 1) % 3, Axis::Z);
            oracle -= &zi * &zj * js[i] + kron_embed(3, i, Axis::X) * 0.7 + &zi * 0.3;
        }
        assert!((h.matrix() - oracle).amax() < 1e-14);
        assert!(h.asymmetry() < 1e-12);
    }

    #[test]
    fn heisenberg_rejects_odd_sites() {
        assert!(build_hamiltonian(&QuantumModelSpec::heisenberg(3, 1.0, 1.0, 1.0, 0.1)).is_err());
    }

    #[test]
    fn heisenberg_two_sites_spectrum() {
        // Periodic M = 2 carries the bond twice: H = -2 (xx + yy + zz).
        // xx + yy + zz has the triplet at +1 and the singlet at -3.
        let h = build_hamiltonian(&QuantumModelSpec::heisenberg(2, 1.0, 1.0, 1.0, 0.0)).unwrap();
        let xx = &kron_embed(2, 0, Axis::X) * &kron_embed(2, 1, Axis::X);
        let zz = &kron_embed(2, 0, Axis::Z) * &kron_embed(2, 1, Axis::Z);
        let yy = embed_pauli_yy(2, 0).unwrap().into_matrix();
        let oracle = -(xx + yy + zz) * 2.0;
        assert!((h.matrix() - &oracle).amax() < 1e-14);
        let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(oracle)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        let expected = [-2.0, -2.0, -2.0, 6.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn two_level_boltzmann_ratio() {
        let h = build_hamiltonian(&QuantumModelSpec::tfim_uniform(1, 0.0, 0.0, 1.0)).unwrap();
        let z = embed_pauli(1, 0, Axis::Z).unwrap();
        let v = thermal_expectation(&h, &z, 1.0).unwrap();
        assert!((v - 1f64.tanh()).abs() < 1e-14);
        assert!((v - 0.761594).abs() < 1e-6);
    }

    #[test]
    fn infinite_temperature_limit() {
        let h = build_hamiltonian(&QuantumModelSpec::tfim_uniform(4, 1.0, 0.5, 0.8)).unwrap();
        let mz = mean_z_operator(4).unwrap();
        let v = thermal_expectation(&h, &mz, 1e-9).unwrap();
        assert!(v.abs() < 1e-8);
    }

    #[test]
    fn expectation_errors() {
        let h = build_hamiltonian(&QuantumModelSpec::tfim_uniform(2, 1.0, 0.5, 0.0)).unwrap();
        let z = embed_pauli(1, 0, Axis::Z).unwrap();
        assert!(thermal_expectation(&h, &z, 1.0).is_err());
        let z2 = embed_pauli(2, 0, Axis::Z).unwrap();
        assert!(thermal_expectation(&h, &z2, f64::NAN).is_err());
        assert!(thermal_expectation(&h, &z2, f64::INFINITY).is_err());
        assert!(thermal_expectation(&h, &z2, 0.0).is_err());
    }

    #[test]
    fn shift_invariance() {
        let h = build_hamiltonian(&QuantumModelSpec::tfim_uniform(4, 1.3, 0.9, 0.2)).unwrap();
        let x0 = embed_pauli(4, 0, Axis::X).unwrap();
        let mz = mean_z_operator(4).unwrap();
        for c in [-50.0, 3.0, 1e3] {
            let shifted = &h + &DenseOperator::identity(4).scaled(c);
            for s in [&x0, &mz] {
                let a = thermal_expectation(&h, s, 2.0).unwrap();
                let b = thermal_expectation(&shifted, s, 2.0).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn projector_completeness() {
        let up = pattern_projector(1, &[Spin::Up]).unwrap();
        let down = pattern_projector(1, &[Spin::Down]).unwrap();
        assert_eq!(&up + &down, DenseOperator::identity(1));

        let mut total = DenseOperator::zeros(3);
        for s in 0..8 {
            let p = pattern_projector(3, &pattern_of_state(3, s)).unwrap();
            assert_eq!(&p * &p, p);
            total = &total + &p;
        }
        assert_eq!(total, DenseOperator::identity(3));
    }

    #[test]
    fn projector_matches_product_of_site_projectors() {
        let pattern = [Spin::Up, Spin::Down];
        let p = pattern_projector(2, &pattern).unwrap();
        assert_eq!(p.matrix().diagonal().as_slice(), &[0.0, 1.0, 0.0, 0.0]);

        let id = DMatrix::<f64>::identity(8, 8);
        for s in 0..8 {
            let pat = pattern_of_state(3, s);
            let mut prod = id.clone();
            for (k, spin) in pat.iter().enumerate() {
                let z = kron_embed(3, k, Axis::Z);
                let pk = match spin {
                    Spin::Up => (&id + z) * 0.5,
                    Spin::Down => (&id - z) * 0.5,
                };
                prod *= pk;
            }
            assert_eq!(pattern_projector(3, &pat).unwrap().matrix(), &prod);
        }
        assert!(pattern_projector(2, &[Spin::Up]).is_err());
    }

    #[test]
    fn joint_distribution_matches_projector_expectations() {
        let h = build_hamiltonian(&QuantumModelSpec::tfim_uniform(3, 1.0, 0.8, 0.3)).unwrap();
        let hist = joint_distribution(&h, 1.5).unwrap();
        let total: f64 = hist.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for s in 0..8 {
            let p = pattern_projector(3, &pattern_of_state(3, s)).unwrap();
            let v = thermal_expectation(&h, &p, 1.5).unwrap();
            assert!((v - hist.prob(s)).abs() < 1e-12);
        }
        // Marginals reproduce single-site projector averages.
        for site in 0..3 {
            let z = embed_pauli(3, site, Axis::Z).unwrap();
            let up = thermal_expectation(&h, &z, 1.5).unwrap() * 0.5 + 0.5;
            assert!((hist.marginal_up(site) - up).abs() < 1e-10);
        }
    }

    #[test]
    fn antiferro_states_least_probable() {
        let h = build_hamiltonian(&QuantumModelSpec::tfim_uniform(4, 1.0, 10.0, 0.0)).unwrap();
        let hist = joint_distribution(&h, 0.5).unwrap();
        let order = hist.ascending_states();
        let mut lowest = [order[0], order[1]];
        lowest.sort();
        assert_eq!(lowest, [5, 10]);
    }

    #[test]
    fn ferro_ground_state_limit() {
        let h = build_hamiltonian(&QuantumModelSpec::tfim_uniform(4, 1.0, 0.02, 0.5)).unwrap();
        let hist = joint_distribution(&h, 40.0).unwrap();
        assert!(hist.prob(15) > 0.99);
    }

    #[test]
    fn stoquastic_checks() {
        let tfim = build_hamiltonian(&QuantumModelSpec::tfim_uniform(3, -1.0, 0.5, 0.2)).unwrap();
        assert!(is_stoquastic(&tfim));
        let ferro =
            build_hamiltonian(&QuantumModelSpec::heisenberg(4, 1.0, 1.0, 1.0, 0.2)).unwrap();
        assert!(is_stoquastic(&ferro));
        let anti =
            build_hamiltonian(&QuantumModelSpec::heisenberg(4, -1.0, -1.0, 1.0, 0.2)).unwrap();
        assert!(!is_stoquastic(&anti));
        for beta in [0.1, 1.0, 10.0] {
            assert!(exp_nonnegative(&tfim, beta).unwrap());
            assert!(exp_nonnegative(&ferro, beta).unwrap());
        }
    }

    #[test]
    fn eight_site_regression_point() {
        // M = 8, J = +2, Gamma_z = 1, beta = 10, Gamma_x = 5.
        let h = build_hamiltonian(&QuantumModelSpec::tfim_uniform(8, 2.0, 5.0, 1.0)).unwrap();
        let v = thermal_expectation(&h, &mean_z_operator(8).unwrap(), 10.0).unwrap();
        assert!((v - EIGHT_SITE_GX5_MZ).abs() < 1e-9, "{v}");
    }

    // Frozen from an independent numpy eigh evaluation of the same 256 x 256 matrix.
    const EIGHT_SITE_GX5_MZ: f64 = 0.4401047390984371;

    #[test]
    fn csv_export_is_row_major() {
        let x = embed_pauli(1, 0, Axis::X).unwrap();
        let mut buf = Vec::new();
        x.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0,1\n1,0\n");
    }
}
