//! Independent oracles used by the test suites. Nothing here calls into
//! the solver or sensitivity code paths it is used to check.
#![allow(dead_code)]

use semidiff_core::linalg::{lu_solve, Matrix};
use semidiff_core::QpProblem;

/// Exhaustive active-set enumeration for a strictly convex QP: solves the
/// KKT system of every subset of inequalities (equalities always in) by
/// dense LU and keeps the feasible, dual-feasible point of least value.
/// Returns `(y, value)`.
pub fn brute_force_qp(p: &QpProblem) -> Option<(Vec<f64>, f64)> {
    let d = p.dim();
    let r = p.num_ineq();
    let e = p.num_eq();
    assert!(r <= 16, "enumeration oracle limited to 16 inequalities");
    let mut best: Option<(Vec<f64>, f64)> = None;
    for mask in 0u32..(1u32 << r) {
        let subset: Vec<usize> = (0..r).filter(|i| mask & (1 << i) != 0).collect();
        let k = subset.len() + e;
        if k > d {
            continue;
        }
        let n = d + k;
        let mut kkt = Matrix::zeros(n, n);
        let mut rhs = vec![0.0; n];
        let h = p.hessian();
        for i in 0..d {
            for j in 0..d {
                kkt[(i, j)] = h[(i, j)];
            }
            rhs[i] = -p.linear()[i];
        }
        let rows: Vec<usize> = subset.iter().copied().chain(r..r + e).collect();
        for (t, &ci) in rows.iter().enumerate() {
            let a = p.constraint_row(ci);
            for j in 0..d {
                kkt[(d + t, j)] = a[j];
                kkt[(j, d + t)] = a[j];
            }
            rhs[d + t] = -p.constraint_offset(ci);
        }
        let Some(sol) = lu_solve(&kkt, &rhs, 1e-13) else {
            continue;
        };
        let y = &sol[..d];
        let lam = &sol[d..];
        let primal_ok = (0..r).all(|i| p.constraint_value(i, y) <= 1e-9);
        let dual_ok = subset.iter().enumerate().all(|(t, _)| lam[t] >= -1e-9);
        if primal_ok && dual_ok {
            let v = p.objective(y);
            if best.as_ref().is_none_or(|b| v < b.1) {
                best = Some((y.to_vec(), v));
            }
        }
    }
    best
}

/// Deterministic xorshift generator so the oracles do not share the
/// library's random source.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}

/// Random strictly convex QP with `r` inequalities and `e` equalities,
/// feasible by construction (a random point satisfies all constraints).
pub fn random_qp(rng: &mut XorShift, d: usize, r: usize, e: usize) -> QpProblem {
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = rng.uniform(-1.0, 1.0);
        }
    }
    let mut h = m.tr_mul(&m);
    for i in 0..d {
        h[(i, i)] += 0.1;
    }
    let c: Vec<f64> = (0..d).map(|_| rng.uniform(-3.0, 3.0)).collect();
    let y0: Vec<f64> = (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let mut a = Matrix::zeros(r, d);
    let mut b = vec![0.0; r];
    for i in 0..r {
        for j in 0..d {
            a[(i, j)] = rng.uniform(-1.0, 1.0);
        }
        let ay: f64 = (0..d).map(|j| a[(i, j)] * y0[j]).sum();
        b[i] = -ay - rng.uniform(0.0, 0.5);
    }
    let mut ae = Matrix::zeros(e, d);
    let mut be = vec![0.0; e];
    for i in 0..e {
        for j in 0..d {
            ae[(i, j)] = rng.uniform(-1.0, 1.0);
        }
        be[i] = -(0..d).map(|j| ae[(i, j)] * y0[j]).sum::<f64>();
    }
    QpProblem::new(h, c, a, b, ae, be).unwrap()
}
