//! Steady radial offset carrying the inhomogeneous Robin condition.
//!
//! In each tissue layer `R = A1 I0(s r) + A2 K0(s r)` with `s = sqrt(B/a)`;
//! `R(r_i) = 0`, value and k-flux continuity at r_w and r_p, and
//! `k R' + h R = h γ` at r_s with γ = T_air − T_b.

use super::modal::Layer;
use super::ThermalError;
use crate::linalg::dense_solve;
use crate::specfn::{i0, i1, k0, k1};
use nalgebra::{DMatrix, DVector};

/// Basis `(f, g)` and derivatives at `r`; `(1, ln r)` without perfusion.
fn basis(s: f64, r: f64) -> ([f64; 2], [f64; 2]) {
    if s == 0.0 {
        ([1.0, r.ln()], [0.0, 1.0 / r])
    } else {
        let x = s * r;
        ([i0(x), k0(x)], [s * i1(x), -s * k1(x)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOffset {
    /// sqrt(B/a) per layer [1/mm].
    pub s: [f64; 3],
    pub a1: [f64; 3],
    pub a2: [f64; 3],
    pub gamma: f64,
    pub bounds: [(f64, f64); 3],
}

impl SteadyOffset {
    /// `(R, dR/dr)` at `r`; zero in the lumen.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        if r < self.bounds[0].0 || self.gamma == 0.0 {
            return (0.0, 0.0);
        }
        let i = if r < self.bounds[0].1 {
            0
        } else if r < self.bounds[1].1 {
            1
        } else {
            2
        };
        let (v, d) = basis(self.s[i], r);
        (
            self.a1[i] * v[0] + self.a2[i] * v[1],
            self.a1[i] * d[0] + self.a2[i] * d[1],
        )
    }
}

pub fn steady_robin_offset(layers: &[Layer; 3], h: f64, t_air: f64, t_b: f64) -> Result<SteadyOffset, ThermalError> {
    let gamma = t_air - t_b;
    let s = layers.map(|l| (l.coef.big_b / l.coef.a).sqrt());
    let bounds = layers.map(|l| (l.lo, l.hi));
    if gamma == 0.0 {
        return Ok(SteadyOffset {
            s,
            a1: [0.0; 3],
            a2: [0.0; 3],
            gamma,
            bounds,
        });
    }
    let mut a = DMatrix::zeros(6, 6);
    let mut b = DVector::zeros(6);
    let (v, _) = basis(s[0], layers[0].lo);
    a[(0, 0)] = v[0];
    a[(0, 1)] = v[1];
    for k in 0..2 {
        let rho = layers[k].hi;
        let (va, da) = basis(s[k], rho);
        let (vb, db) = basis(s[k + 1], rho);
        let (ka, kb) = (layers[k].coef.a, layers[k + 1].coef.a);
        let row = 1 + 2 * k;
        for c in 0..2 {
            a[(row, 2 * k + c)] = va[c];
            a[(row, 2 * k + 2 + c)] = -vb[c];
            a[(row + 1, 2 * k + c)] = ka * da[c];
            a[(row + 1, 2 * k + 2 + c)] = -kb * db[c];
        }
    }
    let (v, d) = basis(s[2], layers[2].hi);
    for c in 0..2 {
        a[(5, 4 + c)] = layers[2].coef.a * d[c] + h * v[c];
    }
    b[5] = h * gamma;
    let (x, report) = dense_solve(a, b).ok_or(ThermalError::RankDeficient)?;
    log::debug!("steady offset: condition {:e}", report.condition);
    Ok(SteadyOffset {
        s,
        a1: [x[0], x[2], x[4]],
        a2: [x[1], x[3], x[5]],
        gamma,
        bounds,
    })
}
