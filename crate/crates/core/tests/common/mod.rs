//! Reference computations for the integration tests. Plain `f64` arithmetic,
//! nothing from the crate under test.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::FRAC_1_SQRT_2;

pub type Mat = Vec<Vec<f64>>;

pub fn fock(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

pub fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

pub fn axpy(acc: &mut [f64], w: f64, v: &[f64]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += w * x;
    }
}

pub fn outer(a: &[f64], b: &[f64]) -> Mat {
    a.iter()
        .map(|x| b.iter().map(|y| x * y).collect())
        .collect()
}

pub fn mat_add(a: &Mat, b: &Mat, wb: f64) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + wb * y).collect())
        .collect()
}

pub fn kron_mat(a: &Mat, b: &Mat) -> Mat {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![0.0; n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// `tr(rho * op)`.
pub fn expect(rho: &Mat, op: &Mat) -> f64 {
    let n = rho.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += rho[i][j] * op[j][i];
        }
    }
    acc
}

/// `vacuum(N, r)` from the reference script.
pub fn script_vacuum(n: usize, r: f64) -> Vec<f64> {
    let mut v = fock(n, 0);
    for k in 1..n - 1 {
        axpy(&mut v, r.tanh().powf(k as f64), &fock(n, k));
    }
    v.iter().map(|x| x * (1.0 / r.cosh())).collect()
}

/// `particle(N, r)` from the reference script.
pub fn script_particle(n: usize, r: f64) -> Vec<f64> {
    let mut p = fock(n, 0);
    for k in 1..n - 1 {
        axpy(
            &mut p,
            r.tanh().powf(k as f64) * ((k + 1) as f64).sqrt(),
            &fock(n, k + 1),
        );
    }
    p.iter().map(|x| x * (1.0 / r.cosh().powi(2))).collect()
}

pub struct Vectors {
    pub ag: Vec<f64>,
    pub ae: Vec<f64>,
    pub bg: Vec<f64>,
    pub be: Vec<f64>,
}

/// Outcome vectors exactly as the script builds them.
pub fn script_vectors(n: usize, r: f64) -> Vectors {
    Vectors {
        ag: kron(&fock(n, 0), &fock(n, 0)),
        ae: kron(&fock(n, 1), &fock(n, 1)),
        bg: kron(&script_vacuum(n, r), &fock(n, 0)),
        be: kron(&script_particle(n, r), &fock(n, 1)),
    }
}

/// Inertial outcome vectors on qubit fields and qubit labs.
pub fn inertial_vectors() -> Vectors {
    Vectors {
        ag: kron(&fock(2, 0), &fock(2, 0)),
        ae: kron(&fock(2, 1), &fock(2, 1)),
        bg: kron(&fock(2, 0), &fock(2, 0)),
        be: kron(&fock(2, 1), &fock(2, 1)),
    }
}

pub fn script_state(v: &Vectors, theta: f64) -> Vec<f64> {
    let h = 1.0 / 2f64.sqrt();
    let len = v.ag.len() * v.bg.len();
    let mut phi_p = vec![0.0; len];
    axpy(&mut phi_p, h, &kron(&v.ag, &v.bg));
    axpy(&mut phi_p, -h, &kron(&v.ae, &v.be));
    let mut psi_m = vec![0.0; len];
    axpy(&mut psi_m, h, &kron(&v.ag, &v.be));
    axpy(&mut psi_m, h, &kron(&v.ae, &v.bg));
    let mut psi = vec![0.0; len];
    axpy(&mut psi, -(theta / 2.0).sin(), &phi_p);
    axpy(&mut psi, (theta / 2.0).cos(), &psi_m);
    psi
}

/// `(|g><g| - |e><e|, |g><e| + |e><g|)`.
pub fn binary_ops(g: &[f64], e: &[f64]) -> (Mat, Mat) {
    (
        mat_add(&outer(g, g), &outer(e, e), -1.0),
        mat_add(&outer(g, e), &outer(e, g), 1.0),
    )
}

/// Straight-line CHSH evaluation: correlators and `|E1 + E2 + E3 - E4|`.
pub fn chsh_oracle(v: &Vectors, theta: f64) -> ([f64; 4], f64) {
    let psi = script_state(v, theta);
    let rho = outer(&psi, &psi);
    let (a1, a2) = binary_ops(&v.ag, &v.ae);
    let (b1, b2) = binary_ops(&v.bg, &v.be);
    let e = [
        expect(&rho, &kron_mat(&a1, &b1)),
        expect(&rho, &kron_mat(&a1, &b2)),
        expect(&rho, &kron_mat(&a2, &b1)),
        expect(&rho, &kron_mat(&a2, &b2)),
    ];
    (e, (e[0] + e[1] + e[2] - e[3]).abs())
}

pub fn script_s(n: usize, r: f64, theta: f64) -> f64 {
    chsh_oracle(&script_vectors(n, r), theta).1
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric matrix.
pub fn jacobi_eigenvalues(mut a: Mat) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Log-negativity of the two-qubit field state
/// `-sin(theta/2)|phi-> + cos(theta/2)|psi+>`, by explicit 4x4 partial
/// transpose and Jacobi diagonalization.
pub fn inertial_negativity_oracle(theta: f64) -> f64 {
    let h = FRAC_1_SQRT_2;
    let k = |a, b| kron(&fock(2, a), &fock(2, b));
    let mut phi_minus = vec![0.0; 4];
    axpy(&mut phi_minus, h, &k(0, 0));
    axpy(&mut phi_minus, -h, &k(1, 1));
    let mut psi_plus = vec![0.0; 4];
    axpy(&mut psi_plus, h, &k(0, 1));
    axpy(&mut psi_plus, h, &k(1, 0));
    let mut psi = vec![0.0; 4];
    axpy(&mut psi, -(theta / 2.0).sin(), &phi_minus);
    axpy(&mut psi, (theta / 2.0).cos(), &psi_plus);
    let rho = outer(&psi, &psi);
    let mut pt = vec![vec![0.0; 4]; 4];
    for a in 0..2 {
        for b in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    pt[a * 2 + b][a2 * 2 + b2] = rho[a * 2 + b2][a2 * 2 + b];
                }
            }
        }
    }
    jacobi_eigenvalues(pt)
        .iter()
        .map(|l| l.abs())
        .sum::<f64>()
        .log2()
}
