//! Truncated Fock-space oracle for purity and logarithmic negativity.
//!
//! The state is prepared by exponentiating quadratic generators in a finite
//! number basis, its covariance is read off with ladder operators, and the
//! Fock-space `Tr ρ²` and `ln ‖ρ^{T_B}‖₁` are compared with the
//! covariance-matrix formulas.

use nalgebra::{DMatrix, Matrix4, Vector4};
use num_complex::Complex64 as C;
use saddle_core::gaussian::{log_negativity, purity, GaussianState};

// Truncation error is below the tolerances for every state prepared here.
const CUTOFF: usize = 26;

fn ladder() -> DMatrix<C> {
    DMatrix::from_fn(CUTOFF, CUTOFF, |i, j| {
        if j == i + 1 {
            C::new((j as f64).sqrt(), 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    })
}

fn kron(a: &DMatrix<C>, b: &DMatrix<C>) -> DMatrix<C> {
    a.kronecker(b)
}

fn dag(m: &DMatrix<C>) -> DMatrix<C> {
    m.adjoint()
}

/// `exp(g)` computed block by block over the connected components of `g`;
/// every generator used here conserves some photon-number combination, so
/// the blocks are small.
fn block_exp(g: &DMatrix<C>) -> DMatrix<C> {
    let n = g.nrows();
    let mut label = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![start];
        label[start] = id;
        let mut k = 0;
        while k < members.len() {
            let i = members[k];
            for j in 0..n {
                if label[j] == usize::MAX && (g[(i, j)].norm() > 0.0 || g[(j, i)].norm() > 0.0) {
                    label[j] = id;
                    members.push(j);
                }
            }
            k += 1;
        }
        blocks.push(members);
    }
    let mut out = DMatrix::zeros(n, n);
    for members in blocks {
        let m = members.len();
        let sub = DMatrix::from_fn(m, m, |a, b| g[(members[a], members[b])]).exp();
        for a in 0..m {
            for b in 0..m {
                out[(members[a], members[b])] = sub[(a, b)];
            }
        }
    }
    out
}

fn thermal(n: f64) -> DMatrix<C> {
    let q = n / (n + 1.0);
    let mut d = DMatrix::zeros(CUTOFF, CUTOFF);
    for k in 0..CUTOFF {
        d[(k, k)] = C::new(q.powi(k as i32) / (n + 1.0), 0.0);
    }
    d
}

pub struct Prepared {
    rho: DMatrix<C>,
    ops: [DMatrix<C>; 4],
}

/// `ρ = U (ρ_th(n₁) ⊗ ρ_th(n₂)) U†` with `U` a product of a two-mode squeezer,
/// a local squeezer on mode A, a phase on mode B and a beam splitter.
pub fn prepare(n1: f64, n2: f64, r: f64, s: f64, phi: f64, theta: f64) -> Prepared {
    let id = DMatrix::<C>::identity(CUTOFF, CUTOFF);
    let a1 = ladder();
    let a = kron(&a1, &id);
    let b = kron(&id, &a1);
    let (ad, bd) = (dag(&a), dag(&b));
    let i = C::new(0.0, 1.0);
    let gens = [
        (&a * &b - &ad * &bd) * C::new(r, 0.0),
        (&a * &a - &ad * &ad) * C::new(0.5 * s, 0.0),
        (&bd * &b) * (i * phi),
        (&ad * &b - &a * &bd) * C::new(theta, 0.0),
    ];
    let mut rho = kron(&thermal(n1), &thermal(n2));
    for g in gens {
        let u = block_exp(&g);
        rho = &u * rho * dag(&u);
    }
    let tr = rho.trace();
    rho /= tr;
    let s2 = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ops = [
        (&a + &ad) * s2,
        (&a - &ad) * (s2 * -i),
        (&b + &bd) * s2,
        (&b - &bd) * (s2 * -i),
    ];
    Prepared { rho, ops }
}

fn trace_product(x: &DMatrix<C>, y: &DMatrix<C>) -> C {
    let mut acc = C::new(0.0, 0.0);
    for i in 0..x.nrows() {
        for k in 0..x.ncols() {
            acc += x[(i, k)] * y[(k, i)];
        }
    }
    acc
}

fn covariance(p: &Prepared) -> GaussianState {
    let rho_r: Vec<DMatrix<C>> = p.ops.iter().map(|o| &p.rho * o).collect();
    let mean = Vector4::from_fn(|i, _| rho_r[i].trace().re);
    let cov = Matrix4::from_fn(|i, j| {
        let sym = trace_product(&rho_r[i], &p.ops[j]) + trace_product(&rho_r[j], &p.ops[i]);
        0.5 * sym.re - mean[i] * mean[j]
    });
    GaussianState::new(mean, cov, 0.0)
}

fn partial_transpose(rho: &DMatrix<C>) -> DMatrix<C> {
    let n = CUTOFF;
    DMatrix::from_fn(n * n, n * n, |r, c| {
        let (i, j) = (r / n, r % n);
        let (k, l) = (c / n, c % n);
        rho[(i * n + l, k * n + j)]
    })
}

/// Absolute purity and log-negativity errors for one prepared state.
pub fn errors(n1: f64, n2: f64, r: f64, s: f64, phi: f64, theta: f64) -> (f64, f64) {
    let p = prepare(n1, n2, r, s, phi, theta);
    let state = covariance(&p);
    let fock_purity = trace_product(&p.rho, &p.rho).re;
    let eig = partial_transpose(&p.rho).symmetric_eigenvalues();
    let fock_logneg = eig.iter().map(|e| e.abs()).sum::<f64>().ln();
    let (mu, en) = (purity(&state).unwrap(), log_negativity(&state).unwrap());
    ((mu - fock_purity).abs(), (en - fock_logneg).abs())
}

/// States covering vacuum, thermal, pure entangled and mixed entangled cases.
pub const CASES: [[f64; 6]; 5] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.3, 0.1, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.3, 0.0, 0.0, 0.0],
    [0.1, 0.2, 0.35, 0.2, 0.7, 0.4],
    [0.25, 0.25, 0.2, 0.1, 0.3, 0.2],
];

/// Largest errors over [`CASES`].
pub fn worst_errors() -> (f64, f64) {
    CASES.iter().fold((0.0, 0.0), |(a, b), c| {
        let (da, db) = errors(c[0], c[1], c[2], c[3], c[4], c[5]);
        (f64::max(a, da), f64::max(b, db))
    })
}

/// Log-negativity read from the covariance of a prepared state.
pub fn gaussian_log_negativity(n1: f64, n2: f64, r: f64) -> f64 {
    log_negativity(&covariance(&prepare(n1, n2, r, 0.0, 0.0, 0.0))).unwrap()
}
