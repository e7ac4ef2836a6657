use super::lattice::ReplicaLattice;
use crate::error::{Error, Result};
use crate::exact::QuantumModelSpec;
use crate::graph::{InteractionGraph, SliceLayout};

/// Entries of the two-site transfer matrix `exp(-beta zeta / n)`.
///
/// In the basis `up-up, up-down, down-up, down-down` the matrix reads
///
/// ```text
/// X1 X5 X5 X2
/// X5 X3 X4 X5
/// X5 X4 X3 X5
/// X2 X5 X5 X1
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMatrixElements {
    pub x: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
    pub x5: f64,
}

impl CellMatrixElements {
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let CellMatrixElements {
            x1, x2, x3, x4, x5, ..
        } = *self;
        [
            [x1, x5, x5, x2],
            [x5, x3, x4, x5],
            [x5, x4, x3, x5],
            [x2, x5, x5, x1],
        ]
    }

    /// Entry `<m1 m2| exp(-beta zeta / n) |m3 m4>` for bipolar spins.
    pub fn element(&self, m1: i8, m2: i8, m3: i8, m4: i8) -> f64 {
        let row = usize::from(m1 < 0) * 2 + usize::from(m2 < 0);
        let col = usize::from(m3 < 0) * 2 + usize::from(m4 < 0);
        self.matrix()[row][col]
    }
}

/// Closed-form transfer-matrix entries. Valid for any sign of the couplings.
pub fn cell_matrix_elements(
    jx: f64,
    jy: f64,
    gamma_x: f64,
    beta: f64,
    n: usize,
) -> Result<CellMatrixElements> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::param(
            "beta",
            format!("must be finite and positive, got {beta}"),
        ));
    }
    if n == 0 {
        return Err(Error::param("n", "replica count must be at least 1"));
    }
    let a = beta / n as f64;
    let x = gamma_x.hypot(jy);
    let (c, s_over_x) = if x > 0.0 {
        ((a * x).cosh(), (a * x).sinh() / x)
    } else {
        (1.0, a)
    };
    let ex = (a * jx).exp();
    let lo = 0.5 * ex * (c - jy * s_over_x);
    let hi = 0.5 * ex * (c + jy * s_over_x);
    let em = 0.5 * (-a * (jx - jy)).exp();
    let ep = 0.5 * (-a * (jx + jy)).exp();
    Ok(CellMatrixElements {
        x,
        x1: lo + em,
        x2: lo - em,
        x3: hi + ep,
        x4: hi - ep,
        x5: 0.5 * ex * gamma_x * s_over_x,
    })
}

/// Couplings of one shaded chessboard cell plus the in-slice `t0` bond.
///
/// Members of a cell are `m1 = (i, k)`, `m2 = (i+1, k)`, `m3 = (i, k+1)`,
/// `m4 = (i+1, k+1)`. `t1` couples the vertical pairs, `t2` the diagonals,
/// `t3` the horizontal pairs and `t4` all four spins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergCellCoefficients {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub gamma_x: f64,
    pub beta: f64,
    pub n: usize,
    pub elements: CellMatrixElements,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
}

impl HeisenbergCellCoefficients {
    /// Cell energy `-t1(m1m3+m2m4) - t2(m1m4+m2m3) - t3(m1m2+m3m4) - t4 m1m2m3m4`.
    pub fn cell_energy(&self, m1: i8, m2: i8, m3: i8, m4: i8) -> f64 {
        let [a, b, c, d] = [m1, m2, m3, m4].map(f64::from);
        -self.t1 * (a * c + b * d)
            - self.t2 * (a * d + b * c)
            - self.t3 * (a * b + c * d)
            - self.t4 * a * b * c * d
    }

    /// Input on `m1` induced by the cell, `-dE/dm1`.
    pub fn field_on_m1(&self, m2: i8, m3: i8, m4: i8) -> f64 {
        let [b, c, d] = [m2, m3, m4].map(f64::from);
        self.t3 * b + self.t1 * c + self.t2 * d + self.t4 * b * c * d
    }
}

/// Closed-form chessboard coefficients for one cell.
pub fn heisenberg_cell(
    jx: f64,
    jy: f64,
    jz: f64,
    gamma_x: f64,
    beta: f64,
    n: usize,
) -> Result<HeisenbergCellCoefficients> {
    let el = cell_matrix_elements(jx, jy, gamma_x, beta, n)?;
    if !(el.x5 > 0.0) {
        return Err(Error::DegenerateCoupling(format!(
            "X5 = {} is not positive; the 4-body term needs gamma_x > 0 (gamma_x = {gamma_x})",
            el.x5
        )));
    }
    for (name, v) in [("X1", el.x1), ("X2", el.x2), ("X3", el.x3), ("X4", el.x4)] {
        if !(v > 0.0) {
            return Err(Error::DegenerateCoupling(format!(
                "{name} = {v} is not positive; the cell is not stoquastic"
            )));
        }
    }
    let [l1, l2, l3, l4, l5] = [el.x1, el.x2, el.x3, el.x4, el.x5].map(f64::ln);
    let f1 = 0.5 * (l1 - l5);
    let f2 = 0.5 * (l5 - l2);
    let f3 = 0.5 * (l5 - l4);
    let f4 = 0.5 * (l3 - l5);
    let b8 = 8.0 * beta;
    Ok(HeisenbergCellCoefficients {
        jx,
        jy,
        jz,
        gamma_x,
        beta,
        n,
        elements: el,
        f1,
        f2,
        f3,
        f4,
        t0: jz / (2.0 * n as f64),
        t1: (l1 - l2 + l3 - l4) / b8,
        t2: (l1 - l2 - l3 + l4) / b8,
        t3: (l1 + l2 - l3 - l4) / b8,
        t4: (l1 + l2 + l3 + l4 - 4.0 * l5) / b8,
    })
}

/// Heisenberg chessboard with `2n` slices and no longitudinal field.
pub fn map_heisenberg(spec: &QuantumModelSpec, n: usize, beta: f64) -> Result<ReplicaLattice> {
    map_heisenberg_with_field(spec, n, beta, 0.0)
}

/// Heisenberg chessboard with an extra `gamma_z / (2n)` bias on every p-bit.
///
/// Slice `k` (0-based) holds `t0` bonds on every neighbouring pair. Shaded
/// cells join slice `k` to `k + 1`: on even `k` they sit on pairs starting at
/// even sites, on odd `k` on pairs starting at odd sites. Both directions wrap.
pub fn map_heisenberg_with_field(
    spec: &QuantumModelSpec,
    n: usize,
    beta: f64,
    gamma_z: f64,
) -> Result<ReplicaLattice> {
    spec.validate()?;
    let QuantumModelSpec::Heisenberg(h) = spec else {
        return Err(Error::InvalidModel(
            "map_heisenberg needs a Heisenberg spec".into(),
        ));
    };
    if !gamma_z.is_finite() {
        return Err(Error::param("gamma_z", "must be finite"));
    }
    let cell = heisenberg_cell(h.jx, h.jy, h.jz, h.gamma_x, beta, n)?;
    let m = h.sites;
    let slices = 2 * n;
    let layout = SliceLayout::new(m, slices);
    let mut g = InteractionGraph::new(layout.num_pbits());
    let at = |i: usize, k: usize| layout.index_of(i % m, k);
    if m >= 2 {
        for k in 0..slices {
            for i in 0..m {
                g.add_pair(at(i, k), at(i + 1, k), cell.t0)?;
            }
        }
    }
    for k in 0..slices {
        for i in (k % 2..m).step_by(2) {
            let (m1, m2, m3, m4) = (at(i, k), at(i + 1, k), at(i, k + 1), at(i + 1, k + 1));
            g.add_pair(m1, m3, cell.t1)?;
            g.add_pair(m2, m4, cell.t1)?;
            g.add_pair(m1, m4, cell.t2)?;
            g.add_pair(m2, m3, cell.t2)?;
            g.add_pair(m1, m2, cell.t3)?;
            g.add_pair(m3, m4, cell.t3)?;
            g.add_quad([m1, m2, m3, m4], cell.t4)?;
        }
    }
    let bias = gamma_z / slices as f64;
    if bias != 0.0 {
        for p in 0..layout.num_pbits() {
            g.add_bias(p, bias)?;
        }
    }
    Ok(ReplicaLattice::new(g, layout, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPINS: [i8; 2] = [1, -1];

    #[test]
    fn f_and_t_are_consistent() {
        let c = heisenberg_cell(1.0, 0.7, 0.3, 0.4, 2.0, 3).unwrap();
        let b4 = 4.0 * c.beta;
        assert!((c.t1 - (c.f1 + c.f2 + c.f3 + c.f4) / b4).abs() < 1e-12);
        assert!((c.t2 - (c.f1 + c.f2 - c.f3 - c.f4) / b4).abs() < 1e-12);
        assert!((c.t3 - (c.f1 - c.f2 + c.f3 - c.f4) / b4).abs() < 1e-12);
        assert!((c.t4 - (c.f1 - c.f2 - c.f3 + c.f4) / b4).abs() < 1e-12);
        assert_eq!(c.t0, 0.3 / 6.0);
    }

    #[test]
    fn truth_table_first_row_is_f1() {
        let c = heisenberg_cell(1.0, 1.0, 1.0, 0.2, 1.0, 2).unwrap();
        assert!((c.beta * c.field_on_m1(1, 1, 1) - c.f1).abs() < 1e-12);
        assert!((c.beta * c.field_on_m1(-1, -1, -1) + c.f1).abs() < 1e-12);
    }

    #[test]
    fn matrix_layout_is_symmetric() {
        let el = cell_matrix_elements(0.3, -0.8, 1.1, 0.7, 2).unwrap();
        let m = el.matrix();
        for (r, row) in m.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert_eq!(*v, m[c][r]);
            }
        }
        assert_eq!(m[0][0], el.x1);
        assert_eq!(m[3][3], el.x1);
        assert_eq!(m[1][1], el.x3);
        assert_eq!(m[2][2], el.x3);
    }

    #[test]
    fn energy_model_reproduces_log_elements() {
        let c = heisenberg_cell(1.0, 0.5, 0.2, 0.6, 1.5, 2).unwrap();
        let mut offsets = Vec::new();
        for a in SPINS {
            for b in SPINS {
                for cc in SPINS {
                    for d in SPINS {
                        let lhs = -c.elements.element(a, b, cc, d).ln() / c.beta;
                        offsets.push(lhs - c.cell_energy(a, b, cc, d));
                    }
                }
            }
        }
        let first = offsets[0];
        assert!(offsets.iter().all(|o| (o - first).abs() < 1e-12));
    }

    #[test]
    fn degenerate_x5_is_rejected() {
        let err = heisenberg_cell(1.0, 1.0, 1.0, 0.0, 1.0, 2).unwrap_err();
        assert!(matches!(err, Error::DegenerateCoupling(ref s) if s.contains("X5")));
        assert!(cell_matrix_elements(1.0, 0.0, 0.0, 1.0, 2).is_ok());
    }

    #[test]
    fn chessboard_counts() {
        let spec = QuantumModelSpec::heisenberg(4, 1.0, 1.0, 1.0, 0.5);
        let lat = map_heisenberg(&spec, 2, 1.0).unwrap();
        assert_eq!(lat.slices(), 4);
        assert_eq!(lat.graph().num_pbits(), 16);
        assert_eq!(lat.graph().quad_terms().len(), 8);
        assert!(lat.perp_terms().is_empty());
    }

    #[test]
    fn t3_and_t0_bonds_are_summed() {
        let spec = QuantumModelSpec::heisenberg(4, 1.0, 1.0, 1.0, 0.5);
        let lat = map_heisenberg(&spec, 2, 1.0).unwrap();
        let c = heisenberg_cell(1.0, 1.0, 1.0, 0.5, 1.0, 2).unwrap();
        let g = lat.graph();
        // Pair (0,1) of slice 0 is the top edge of a cell; pair (1,2) is the
        // bottom edge of the cell that wraps from slice 3 back to slice 0.
        let w = g.pair_weight(lat.index_of(0, 0), lat.index_of(1, 0));
        assert!((w - (c.t0 + c.t3)).abs() < 1e-15);
        let w = g.pair_weight(lat.index_of(1, 0), lat.index_of(2, 0));
        assert!((w - (c.t0 + c.t3)).abs() < 1e-15);
        // Vertical bonds exist only under shaded cells.
        assert_eq!(g.pair_weight(lat.index_of(0, 0), lat.index_of(0, 1)), c.t1);
        assert!(g
            .pair_index(lat.index_of(0, 1), lat.index_of(1, 2))
            .is_none());
    }

    #[test]
    fn optional_field_bias() {
        let spec = QuantumModelSpec::heisenberg(2, 1.0, 1.0, 1.0, 0.5);
        let lat = map_heisenberg_with_field(&spec, 3, 1.0, 1.2).unwrap();
        assert!(lat
            .graph()
            .biases()
            .iter()
            .all(|&b| (b - 0.2).abs() < 1e-15));
        let off = map_heisenberg(&spec, 3, 1.0).unwrap();
        assert!(off.graph().biases().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn odd_sites_rejected() {
        let spec = QuantumModelSpec::heisenberg(3, 1.0, 1.0, 1.0, 0.5);
        assert!(map_heisenberg(&spec, 2, 1.0).is_err());
    }
}
