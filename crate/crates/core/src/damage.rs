//! Arrhenius damage integral, Riemann-sum bounds on t_crit and damage maps.

use crate::params::{region_of, Material, ParamSet, RegionThermal, KELVIN_OFFSET, R_GAS};
use crate::thermal::TemperatureSolution;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DamageError {
    #[error("invalid Arrhenius parameters A = {a}, E_a = {e_a}")]
    Invalid { a: f64, e_a: f64 },
    #[error(transparent)]
    Thermal(#[from] crate::thermal::ThermalError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DamageParams {
    /// Frequency factor [1/s].
    pub a: f64,
    /// Activation energy [J/mol].
    pub e_a: f64,
}

impl DamageParams {
    pub fn new(a: f64, e_a: f64) -> Result<DamageParams, DamageError> {
        if !(a > 0.0 && e_a > 0.0 && a.is_finite() && e_a.is_finite()) {
            return Err(DamageError::Invalid { a, e_a });
        }
        Ok(DamageParams { a, e_a })
    }

    pub fn of(th: &RegionThermal) -> DamageParams {
        DamageParams { a: th.a_freq, e_a: th.e_a }
    }

    /// `exp(−E_a/(R T_K))`; zero at or below absolute zero.
    pub fn boltzmann(&self, t_celsius: f64) -> f64 {
        let tk = t_celsius + KELVIN_OFFSET;
        if tk <= 0.0 {
            0.0
        } else {
            (-self.e_a / (R_GAS * tk)).exp()
        }
    }
}

/// `Ω(t) = A ∫₀ᵗ exp(−E_a/(R T_K(τ))) dτ` by composite Simpson with `m`
/// panels (each panel uses its two ends and midpoint).
pub fn arrhenius_integral(path: &dyn Fn(f64) -> f64, t: f64, params: &DamageParams, m: usize) -> f64 {
    params.a * boltzmann_integral(path, 0.0, t, params, m)
}

/// `A ∫_{t0}^{t1} exp(−E_a/(R T_K)) dτ` with `m` Simpson panels.
pub fn arrhenius_between(path: &dyn Fn(f64) -> f64, t0: f64, t1: f64, params: &DamageParams, m: usize) -> f64 {
    params.a * boltzmann_integral(path, t0, t1, params, m)
}

fn boltzmann_integral(path: &dyn Fn(f64) -> f64, t0: f64, t1: f64, params: &DamageParams, m: usize) -> f64 {
    let m = m.max(1);
    let h = (t1 - t0) / m as f64;
    let f = |tau: f64| params.boltzmann(path(tau));
    let mut s = f(t0) + f(t1);
    for k in 1..m {
        s += 2.0 * f(t0 + k as f64 * h);
    }
    for k in 0..m {
        s += 4.0 * f(t0 + (k as f64 + 0.5) * h);
    }
    s * h / 6.0
}

/// The two Riemann sums of the t_crit display.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannBounds {
    /// Σ_{m=1..M} exp(−E_a/(R T(m t/M))).
    pub right_sum: f64,
    /// Σ_{m=1..M} exp(−E_a/(R T((m−1) t/M))).
    pub left_sum: f64,
    pub lower_sum: f64,
    pub upper_sum: f64,
}

pub fn riemann_bounds(path: &dyn Fn(f64) -> f64, t_crit_guess: f64, m: usize, params: &DamageParams) -> RiemannBounds {
    let m = m.max(1);
    let e = |k: usize| params.boltzmann(path(k as f64 * t_crit_guess / m as f64));
    let right_sum: f64 = (1..=m).map(e).sum();
    let left_sum: f64 = (0..m).map(e).sum();
    RiemannBounds {
        right_sum,
        left_sum,
        lower_sum: right_sum.min(left_sum),
        upper_sum: right_sum.max(left_sum),
    }
}

/// `(1/A) exp(E_a/(R (T_min + 273.15)))`, with a flag set when the value
/// overflows to +∞.
pub fn t_crit_upper_bound(t_min: f64, params: &DamageParams) -> (f64, bool) {
    let tk = t_min + KELVIN_OFFSET;
    if tk <= 0.0 {
        return (f64::INFINITY, true);
    }
    let v = (params.e_a / (R_GAS * tk) - params.a.ln()).exp();
    (v, v.is_infinite())
}

/// Minimum temperatures of the reference bound table [°C].
pub const BOUND_TMIN: [f64; 6] = [50.0, 60.0, 70.0, 80.0, 90.0, 100.0];

/// Reference upper bounds of t_crit [s]: rows by T_min, columns blood,
/// wall, pad, skin.
pub const BOUND_TABLE: [[f64; 4]; 6] = [
    [3.4e5, 5.8e5, 5.8e5, 1.1e3],
    [2.3e3, 4.7e3, 4.7e3, 9.5e-1],
    [2.1e1, 5.1e1, 5.1e1, 1.3e-3],
    [2.4e-1, 7.2e-1, 7.2e-1, 2.5e-6],
    [3.6e-3, 1.3e-2, 1.3e-2, 6.9e-9],
    [6.8e-5, 2.8e-4, 2.8e-4, 2.6e-11],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table3Row {
    pub t_min: f64,
    pub material: Material,
    pub computed: f64,
    pub reference: f64,
    pub rel_err: f64,
}

/// Recomputes the bound table from the given thermal parameters.
pub fn table3(params: &ParamSet) -> Vec<Table3Row> {
    let mut rows = Vec::with_capacity(24);
    for (i, &t_min) in BOUND_TMIN.iter().enumerate() {
        for m in Material::ALL {
            let (computed, _) = t_crit_upper_bound(t_min, &DamageParams::of(params.thermal(m)));
            let reference = BOUND_TABLE[i][m.index()];
            rows.push(Table3Row {
                t_min,
                material: m,
                computed,
                reference,
                rel_err: (computed - reference).abs() / reference,
            });
        }
    }
    rows
}

/// Damage at one sample point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DamagePoint {
    pub r: f64,
    pub z: f64,
    pub omega: f64,
    pub t_crit: Option<f64>,
}

/// Lower end of the t_crit bisection bracket [s].
pub const T_CRIT_FLOOR: f64 = 1e-12;
/// Relative tolerance of the t_crit bisection.
pub const T_CRIT_RTOL: f64 = 1e-6;

/// First time Ω reaches `threshold` on [T_CRIT_FLOOR, t_end], by bisection.
pub fn t_crit(path: &dyn Fn(f64) -> f64, t_end: f64, threshold: f64, params: &DamageParams, m: usize) -> Option<f64> {
    let omega = |t: f64| arrhenius_integral(path, t, params, m);
    if !(omega(t_end) >= threshold) {
        return None;
    }
    let (mut lo, mut hi) = (T_CRIT_FLOOR, t_end);
    if omega(lo) >= threshold {
        return Some(lo);
    }
    while hi - lo > T_CRIT_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if omega(mid) >= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Ω(t_end) and the first time Ω reaches `threshold`, from one pass of `m`
/// Simpson panels over [0, t_end]. Inside the crossing panel Ω is refined
/// by bisection with a four-panel Simpson rule on the partial panel.
pub fn damage_history(
    path: &dyn Fn(f64) -> f64,
    t_end: f64,
    threshold: f64,
    params: &DamageParams,
    m: usize,
) -> (f64, Option<f64>) {
    let m = m.max(1);
    let h = t_end / m as f64;
    let f = |tau: f64| params.boltzmann(path(tau));
    let mut cumulative = Vec::with_capacity(m + 1);
    cumulative.push(0.0);
    let mut left = f(0.0);
    for k in 0..m {
        let t0 = k as f64 * h;
        let right = f(t0 + h);
        let panel = (left + 4.0 * f(t0 + 0.5 * h) + right) * h / 6.0;
        cumulative.push(cumulative[k] + params.a * panel);
        left = right;
    }
    let omega = cumulative[m];
    if !(omega >= threshold) {
        return (omega, None);
    }
    let k = cumulative.iter().position(|&c| c >= threshold).expect("threshold reached");
    let base = cumulative[k - 1];
    let t0 = (k - 1) as f64 * h;
    let partial = |t: f64| base + arrhenius_between(path, t0, t, params, 4);
    let (mut lo, mut hi) = (t0.max(T_CRIT_FLOOR), k as f64 * h);
    if partial(lo) >= threshold {
        return (omega, Some(lo));
    }
    while hi - lo > T_CRIT_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if partial(mid) >= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (omega, Some(hi))
}

/// Ω(t_end) and t_crit at each (r, z) along the analytic temperature,
/// using [`damage_history`] with `m` panels.
pub fn damage_map(
    temp: &TemperatureSolution,
    points: &[(f64, f64)],
    params: &ParamSet,
    threshold: f64,
    m: usize,
) -> Result<Vec<DamagePoint>, DamageError> {
    let t_end = temp.t_end;
    points
        .par_iter()
        .map(|&(r, z)| {
            let region = region_of(r, temp.geometry()).map_err(crate::thermal::ThermalError::from)?;
            let dp = DamageParams::of(params.thermal(region.material()));
            let history = temp.at_point(r, z)?;
            let path = |t: f64| history.eval(t);
            let (omega, t_crit) = damage_history(&path, t_end, threshold, &dp, m);
            Ok(DamagePoint { r, z, omega, t_crit })
        })
        .collect()
}
