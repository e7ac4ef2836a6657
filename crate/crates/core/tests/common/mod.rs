//! Reference implementations shared by the integration and acceptance tests.
//! None of them call into the crate.
#![allow(dead_code)]

pub type Matrix = Vec<Vec<f64>>;

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect()
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &Matrix) -> Matrix {
    let n = a.len();
    let norm = a
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut s = 0;
    while norm * 0.5f64.powi(s) > 0.25 {
        s += 1;
    }
    let scale = 0.5f64.powi(s);
    let x: Matrix = a.iter().map(|r| r.iter().map(|v| v * scale).collect()).collect();
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=24 {
        term = matmul(&term, &x);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// Two-site bond Hamiltonian
/// `-Jx XX - Jy YY - (Gamma_x / 2)(X1 + X2)` in the basis `++, +-, -+, --`.
pub fn zeta(jx: f64, jy: f64, gamma_x: f64) -> Matrix {
    let mut z = vec![vec![0.0; 4]; 4];
    for a in 0..4usize {
        let same = (a >> 1 & 1) == (a & 1);
        z[a ^ 3][a] -= jx;
        // Y|up> = i|down>, Y|down> = -i|up>: the product is -1 on equal spins
        z[a ^ 3][a] -= jy * if same { -1.0 } else { 1.0 };
        z[a ^ 2][a] -= 0.5 * gamma_x;
        z[a ^ 1][a] -= 0.5 * gamma_x;
    }
    z
}

/// `exp(-t * zeta)`.
pub fn cell_transfer(jx: f64, jy: f64, gamma_x: f64, t: f64) -> Matrix {
    let z = zeta(jx, jy, gamma_x);
    expm(&z.iter().map(|r| r.iter().map(|v| -t * v).collect()).collect())
}

pub fn bipolar(code: usize, width: usize) -> Vec<i8> {
    (0..width)
        .map(|i| if code >> (width - 1 - i) & 1 == 1 { 1 } else { -1 })
        .collect()
}

pub fn code(spins: &[i8]) -> usize {
    spins.iter().fold(0, |acc, &m| acc << 1 | usize::from(m > 0))
}

/// Classical Suzuki-Trotter energy of a uniform TFIM ring on an `sites x n`
/// torus. P-bit `k * sites + i` is site `i` of slice `k`.
pub fn tfim_torus_energy(spins: &[i8], sites: usize, n: usize, j: f64, gamma_x: f64, gamma_z: f64, beta: f64) -> f64 {
    let j_par = j / n as f64;
    let j_perp = -(beta * gamma_x / n as f64).tanh().ln() / (2.0 * beta);
    let at = |i: usize, k: usize| f64::from(spins[(k % n) * sites + i % sites]);
    let mut e = 0.0;
    for k in 0..n {
        for i in 0..sites {
            e -= j_par * at(i, k) * at(i + 1, k);
            e -= j_perp * at(i, k) * at(i, k + 1);
            e -= gamma_z / n as f64 * at(i, k);
        }
    }
    e
}

/// Boltzmann law over every full configuration (p-bit 0 most significant).
pub fn boltzmann(width: usize, beta: f64, energy: impl Fn(&[i8]) -> f64) -> Vec<f64> {
    let e: Vec<f64> = (0..1usize << width).map(|c| energy(&bipolar(c, width))).collect();
    let e0 = e.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = e.iter().map(|x| (-beta * (x - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

pub fn tvd(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Largest entrywise difference relative to the largest entry of `b`.
pub fn relative_diff(a: &Matrix, b: &Matrix) -> f64 {
    let scale = b.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
