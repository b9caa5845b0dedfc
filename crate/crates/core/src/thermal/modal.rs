//! Radial eigenmodes of the tissue layers and the projection of the
//! initial mismatch onto them.
//!
//! Each mode is `R(r) Z(z) exp(ζt)` with `R = 0` at the lumen wall,
//! value and k-weighted flux continuity at r_w and r_p, and the homogeneous
//! Robin condition `k R' + h R = 0` at r_s. Modes are found by shooting
//! from r_i with `R(r_i) = 0, R'(r_i) = 1` and locating sign changes of the
//! Robin residual in ζ.

use super::{GenericPDEParams, ThermalError};
use crate::linalg::dense_solve;
use crate::specfn::RadialPair;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// One tissue layer `[lo, hi]` with its bioheat coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub lo: f64,
    pub hi: f64,
    pub coef: GenericPDEParams,
}

/// `R = c1 f(βr) + c2 g(βr)` for the pair selected by the sign of β².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialShape {
    pub pair: RadialPair,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
}

impl RadialShape {
    /// `(R, dR/dr)` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let x = self.beta * r;
        let (f, g) = self.pair.values(x);
        let (df, dg) = self.pair.derivatives(x);
        (self.c1 * f + self.c2 * g, self.beta * (self.c1 * df + self.c2 * dg))
    }
}

/// Smallest β used when β² vanishes exactly.
const BETA_FLOOR: f64 = 1e-150;

/// Pair and wavenumber for `R'' + R'/r = −β² R`.
fn kind_of(beta2: f64) -> (RadialPair, f64) {
    if beta2 >= 0.0 {
        (RadialPair::Standard, beta2.sqrt().max(BETA_FLOOR))
    } else {
        (RadialPair::Modified, (-beta2).sqrt())
    }
}

/// β² in a layer from the dispersion relation `α ζ = −a(β² + η²) − B`.
pub fn beta_squared(c: &GenericPDEParams, zeta: f64, eta: f64) -> f64 {
    (-c.alpha * zeta - c.big_b) / c.a - eta * eta
}

/// Wall shape with `R(r_i) = 0`, `R'(r_i) = 1`.
fn wall_shape(r_i: f64, beta2: f64) -> RadialShape {
    let (pair, beta) = kind_of(beta2);
    let (f, g) = pair.values(beta * r_i);
    let (c1, c2) = match pair {
        RadialPair::Standard => {
            let s = -0.5 * std::f64::consts::PI * r_i;
            (s * g, -s * f)
        }
        RadialPair::Modified => (r_i * g, -r_i * f),
    };
    RadialShape { pair, beta, c1, c2 }
}

/// Scale turning the unit-slope wall shape into the printed combination
/// `Y0(β r_i) J0(β r) − J0(β r_i) Y0(β r)` (or its I/K analogue).
fn printed_wall_scale(pair: RadialPair, r_i: f64) -> f64 {
    match pair {
        RadialPair::Standard => -0.5 * std::f64::consts::PI * r_i,
        RadialPair::Modified => r_i,
    }
}

/// Continues `(value, k·flux)` across an interface at `rho` into a layer.
fn continue_into(value: f64, kflux: f64, rho: f64, layer: &Layer, beta2: f64) -> RadialShape {
    let (pair, beta) = kind_of(beta2);
    let x = beta * rho;
    let (f, g) = pair.values(x);
    let (df, dg) = pair.derivatives(x);
    let w = pair.wronskian(x);
    let q = kflux / layer.coef.a / beta;
    RadialShape {
        pair,
        beta,
        c1: (value * dg - q * g) / w,
        c2: (q * f - value * df) / w,
    }
}

/// Shapes in the three layers for a trial rate.
fn shoot(layers: &[Layer; 3], zeta: f64, eta: f64) -> [RadialShape; 3] {
    let b2 = layers.map(|l| beta_squared(&l.coef, zeta, eta));
    let wall = wall_shape(layers[0].lo, b2[0]);
    let (v, d) = wall.eval(layers[0].hi);
    let pad = continue_into(v, layers[0].coef.a * d, layers[1].lo, &layers[1], b2[1]);
    let (v, d) = pad.eval(layers[1].hi);
    let skin = continue_into(v, layers[1].coef.a * d, layers[2].lo, &layers[2], b2[2]);
    [wall, pad, skin]
}

/// Robin residual `k R' + h R` at r_s, scaled by the wall slope.
fn robin_residual(layers: &[Layer; 3], h: f64, zeta: f64, eta: f64) -> f64 {
    let shapes = shoot(layers, zeta, eta);
    let (v, d) = shapes[2].eval(layers[2].hi);
    layers[2].coef.a * d + h * v
}

/// One radial eigenmode.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    /// Axial index; the wavenumber is η = mπ/(2L).
    pub m: usize,
    pub eta: f64,
    /// Decay rate ζ < 0 [1/s].
    pub zeta: f64,
    /// Shapes in wall, pad, skin, normalised to unit slope at r_i.
    pub shapes: [RadialShape; 3],
    /// Projection amplitude [°C per unit shape].
    pub amplitude: f64,
}

impl Mode {
    /// Radial shape at `r`; zero inside the lumen.
    pub fn radial(&self, layers: &[Layer; 3], r: f64) -> (f64, f64) {
        if r < layers[0].lo {
            return (0.0, 0.0);
        }
        let i = if r < layers[0].hi {
            0
        } else if r < layers[1].hi {
            1
        } else {
            2
        };
        self.shapes[i].eval(r)
    }

    /// |β_1| per layer [1/mm].
    pub fn beta1(&self) -> [f64; 3] {
        self.shapes.map(|s| s.beta)
    }

    /// Amplitudes in the printed naming (A1_w, A1_p, A2_p, A1_s, A2_s),
    /// including the projection amplitude.
    pub fn printed_amplitudes(&self, r_i: f64) -> [f64; 5] {
        let a = self.amplitude;
        let s = &self.shapes;
        [
            a / printed_wall_scale(s[0].pair, r_i),
            a * s[1].c1,
            a * s[1].c2,
            a * s[2].c1,
            a * s[2].c2,
        ]
    }

    /// Relative residual of the 5×5 interface/Robin system at the stored
    /// amplitudes (value and flux at r_w and r_p, Robin at r_s).
    pub fn interface_residual(&self, layers: &[Layer; 3], h: f64) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..2 {
            let rho = layers[k].hi;
            let (va, da) = self.shapes[k].eval(rho);
            let (vb, db) = self.shapes[k + 1].eval(rho);
            let (fa, fb) = (layers[k].coef.a * da, layers[k + 1].coef.a * db);
            worst = worst.max((va - vb).abs() / va.abs().max(vb.abs()).max(f64::MIN_POSITIVE));
            let fscale = fa.abs().max(fb.abs()).max(layers[k].coef.a * va.abs() / (rho - layers[0].lo));
            worst = worst.max((fa - fb).abs() / fscale.max(f64::MIN_POSITIVE));
        }
        let (v, d) = self.shapes[2].eval(layers[2].hi);
        let k = layers[2].coef.a;
        let scale = (k * d).abs().max((h * v).abs()).max(k * v.abs() / layers[2].hi);
        worst.max((k * d + h * v).abs() / scale.max(f64::MIN_POSITIVE))
    }
}

/// Step in `s = sqrt(−ζ)` of the sign-change scan.
pub const SCAN_STEP: f64 = 2e-4;

/// The first `n_roots` decaying modes with axial wavenumber `eta` and
/// `zeta_lo ≤ ζ < 0`, ordered by decreasing ζ.
pub fn modal_eigenvalues(
    layers: &[Layer; 3],
    h: f64,
    m: usize,
    eta: f64,
    zeta_lo: f64,
    n_roots: usize,
) -> Result<Vec<Mode>, ThermalError> {
    let s_max = (-zeta_lo).max(0.0).sqrt();
    let steps = (s_max / SCAN_STEP).ceil() as usize;
    let g = |s: f64| robin_residual(layers, h, -s * s, eta);
    let samples: Vec<f64> = (0..=steps)
        .into_par_iter()
        .map(|k| g((k as f64 * SCAN_STEP).min(s_max).max(1e-9)))
        .collect();
    let mut modes = Vec::new();
    for k in 0..steps {
        if modes.len() == n_roots {
            break;
        }
        let (ga, gb) = (samples[k], samples[k + 1]);
        if ga == 0.0 || ga.signum() == gb.signum() {
            continue;
        }
        let (mut a, mut b) = ((k as f64 * SCAN_STEP).max(1e-9), ((k + 1) as f64 * SCAN_STEP).min(s_max));
        let mut fa = ga;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = g(mid);
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fm.signum() == fa.signum() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        let s = 0.5 * (a + b);
        let zeta = -s * s;
        modes.push(Mode {
            m,
            eta,
            zeta,
            shapes: shoot(layers, zeta, eta),
            amplitude: 0.0,
        });
    }
    if modes.len() < n_roots {
        return Err(ThermalError::BracketExhausted {
            found: modes.len(),
            wanted: n_roots,
            zeta_lo,
        });
    }
    Ok(modes)
}

/// Panels of the composite Simpson rule in each layer.
pub const PROJECTION_PANELS: usize = 512;

/// Simpson nodes and weights over the three layers.
pub fn layer_quadrature(layers: &[Layer; 3]) -> Vec<(f64, f64, usize)> {
    let n = PROJECTION_PANELS;
    let mut q = Vec::with_capacity(3 * (n + 1));
    for (i, l) in layers.iter().enumerate() {
        let h = (l.hi - l.lo) / n as f64;
        for k in 0..=n {
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            q.push((l.lo + k as f64 * h, w * h / 3.0, i));
        }
    }
    q
}

/// Least-squares amplitudes with weight `ρ c_p r` fitting `target` by the
/// modes; returns the weighted L² norm of the remaining misfit.
pub fn project_initial(
    modes: &mut [Mode],
    layers: &[Layer; 3],
    target: &dyn Fn(f64) -> f64,
) -> Result<f64, ThermalError> {
    if modes.is_empty() {
        return Ok(0.0);
    }
    let quad = layer_quadrature(layers);
    let n = modes.len();
    let basis: Vec<Vec<f64>> = modes
        .iter()
        .map(|md| quad.iter().map(|&(r, _, i)| md.shapes[i].eval(r).0).collect())
        .collect();
    let weight: Vec<f64> = quad.iter().map(|&(r, w, i)| w * layers[i].coef.alpha * r).collect();
    let values: Vec<f64> = quad.iter().map(|&(r, _, _)| target(r)).collect();
    let mut gram = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for a in 0..n {
        for b in a..n {
            let s: f64 = (0..quad.len()).map(|q| weight[q] * basis[a][q] * basis[b][q]).sum();
            gram[(a, b)] = s;
            gram[(b, a)] = s;
        }
        rhs[a] = (0..quad.len()).map(|q| weight[q] * basis[a][q] * values[q]).sum();
    }
    if values.iter().all(|v| *v == 0.0) {
        modes.iter_mut().for_each(|m| m.amplitude = 0.0);
        return Ok(0.0);
    }
    let (c, report) = dense_solve(gram, rhs).ok_or(ThermalError::RankDeficient)?;
    if report.condition > 1e12 {
        log::warn!("projection Gram matrix condition {:e}", report.condition);
    }
    for (md, a) in modes.iter_mut().zip(c.iter()) {
        md.amplitude = *a;
    }
    let misfit: f64 = (0..quad.len())
        .map(|q| {
            let fit: f64 = (0..n).map(|a| c[a] * basis[a][q]).sum();
            weight[q] * (values[q] - fit).powi(2)
        })
        .sum();
    Ok(misfit.sqrt())
}

/// `Z(z) = e^{bz/(2a)} (b sinh[Ξ(L−z)] + √(b²+4a²η²) cosh[Ξ(L−z)])`,
/// `Ξ = √(b²+4a²η²)/(2a)`; satisfies `Z'(L) = 0`.
pub fn eval_z_general(b: f64, a: f64, eta: f64, l: f64, z: f64) -> f64 {
    let root = (b * b + 4.0 * a * a * eta * eta).sqrt();
    let xi = root / (2.0 * a);
    (b * z / (2.0 * a)).exp() * (b * (xi * (l - z)).sinh() + root * (xi * (l - z)).cosh())
}

/// Axial factor of the stagnant case on [−L, L]: `cos(η(L − z))`.
pub fn eval_z_case1(eta: f64, l: f64, z: f64) -> f64 {
    (eta * (l - z)).cos()
}
