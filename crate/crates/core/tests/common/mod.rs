//! Independent reference implementations used by the integration tests.
//! Everything here is written from the update formulas with explicit loops
//! and nalgebra primitives, without calling into the crate under test.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type M = DMatrix<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> M {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

pub fn soft(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

pub fn soft_m(m: &M, tau: f64) -> M {
    let mut out = m.clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(i, j)] = soft(m[(i, j)], tau);
        }
    }
    out
}

/// Singular values from the eigenvalues of `M^T M` (or `M M^T`), sorted
/// decreasingly.
pub fn singular_values_eig(m: &M) -> Vec<f64> {
    let g = if m.nrows() >= m.ncols() {
        m.transpose() * m
    } else {
        m * m.transpose()
    };
    let mut s: Vec<f64> = SymmetricEigen::new(g)
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn nuclear(m: &M) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

pub fn svt_oracle(m: &M, tau: f64) -> M {
    let svd = m.clone().svd(true, true);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (k, s) in svd.singular_values.iter().enumerate() {
        let w = (s - tau).max(0.0);
        if w == 0.0 {
            continue;
        }
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] += w * u[(i, k)] * vt[(k, j)];
            }
        }
    }
    out
}

pub fn matmul(a: &M, b: &M) -> M {
    assert_eq!(a.ncols(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            let mut s = 0.0;
            for k in 0..a.ncols() {
                s += a[(i, k)] * b[(k, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

pub fn transpose(a: &M) -> M {
    DMatrix::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)])
}

pub fn zero_diag(mut m: M, s_c: usize) -> M {
    for i in 0..s_c.min(m.nrows()).min(m.ncols()) {
        m[(i, i)] = 0.0;
    }
    m
}

#[derive(Debug, Clone)]
pub struct OracleState {
    pub z: M,
    pub a: M,
    pub e: M,
    pub t1: M,
    pub t2: M,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub eta: f64,
}

/// `1.01 * lambda_max(mu1 V^T V + mu2 I)`.
pub fn eta_oracle(v: &M, mu1: f64, mu2: f64) -> f64 {
    let n = v.ncols();
    let mut g = matmul(&transpose(v), v) * mu1;
    for i in 0..n {
        g[(i, i)] += mu2;
    }
    let top = SymmetricEigen::new(g).eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    1.01 * top
}

/// One low-rank + sparse iteration, entry by entry.
pub fn oracle_step(st: &OracleState, v: &M, x: &M, p: OracleParams) -> OracleState {
    let s_c = x.ncols();
    let vz = matmul(v, &st.z);
    let mut inner = DMatrix::zeros(x.nrows(), s_c);
    for i in 0..x.nrows() {
        for j in 0..s_c {
            inner[(i, j)] = p.mu1 * (vz[(i, j)] + st.e[(i, j)] - x[(i, j)] - st.t1[(i, j)] / p.mu1);
        }
    }
    let vt_inner = matmul(&transpose(v), &inner);
    let mut arg = st.z.clone();
    for i in 0..arg.nrows() {
        for j in 0..s_c {
            let b = vt_inner[(i, j)] + p.mu2 * st.z[(i, j)] - p.mu2 * st.a[(i, j)] - st.t2[(i, j)];
            arg[(i, j)] = st.z[(i, j)] - b / p.eta;
        }
    }
    let z = zero_diag(svt_oracle(&arg, 1.0 / p.eta), s_c);

    let mut a = z.clone();
    for i in 0..a.nrows() {
        for j in 0..s_c {
            a[(i, j)] = soft(z[(i, j)] - st.t2[(i, j)] / p.mu2, p.lambda1 / p.mu2);
        }
    }
    let a = zero_diag(a, s_c);

    let vz = matmul(v, &z);
    let mut e = st.e.clone();
    for i in 0..x.nrows() {
        for j in 0..s_c {
            e[(i, j)] = soft(x[(i, j)] - vz[(i, j)] + st.t1[(i, j)] / p.mu1, p.lambda2 / p.mu1);
        }
    }

    let mut t1 = st.t1.clone();
    for i in 0..x.nrows() {
        for j in 0..s_c {
            t1[(i, j)] -= p.mu1 * (vz[(i, j)] + e[(i, j)] - x[(i, j)]);
        }
    }
    let mut t2 = st.t2.clone();
    for i in 0..z.nrows() {
        for j in 0..s_c {
            t2[(i, j)] -= p.mu2 * (z[(i, j)] - a[(i, j)]);
        }
    }
    OracleState { z, a, e, t1, t2 }
}

pub fn frob(a: &M, b: &M) -> f64 {
    (a - b).norm()
}

pub fn hcat(a: &M, b: &M) -> M {
    M::from_fn(a.nrows(), a.ncols() + b.ncols(), |i, j| {
        if j < a.ncols() {
            a[(i, j)]
        } else {
            b[(i, j - a.ncols())]
        }
    })
}
