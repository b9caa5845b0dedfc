//! Large-argument evaluation: Hankel asymptotics for J/Y/I/K and a
//! trapezoidal integral for K on the intermediate range.

use super::BesselKind;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Coefficients `a_k(ν) / x^k` of the Hankel expansion, summed until
/// the terms stop shrinking or fall below resolution.
fn hankel_terms(order: u32, x: f64) -> Vec<f64> {
    let mu = 4.0 * (order * order) as f64;
    let mut terms = vec![1.0];
    let mut a = 1.0_f64;
    for k in 1..40 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = a * (mu - odd * odd) / (kf * 8.0 * x);
        if next.abs() >= a.abs() || next == 0.0 {
            break;
        }
        a = next;
        terms.push(a);
        if a.abs() < 1e-18 {
            break;
        }
    }
    terms
}

/// Slowly varying amplitudes `(P, Q)` of `J_ν`, `Y_ν`.
fn hankel_pq(order: u32, x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut q = 0.0;
    for (k, a) in hankel_terms(order, x).into_iter().enumerate() {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
    }
    (p, q)
}

/// `Σ (±1)^k a_k` for the modified functions.
fn modified_sum(order: u32, x: f64, alternating: bool) -> f64 {
    hankel_terms(order, x)
        .into_iter()
        .enumerate()
        .map(|(k, a)| if alternating && k % 2 == 1 { -a } else { a })
        .sum()
}

/// Asymptotic value of `kind` at large `x`.
pub(crate) fn asymptotic(kind: BesselKind, x: f64) -> f64 {
    use BesselKind::*;
    let (s, c) = x.sin_cos();
    // cos(x - π/4) and sin(x - π/4) without forming the shifted argument.
    let cos0 = (c + s) * FRAC_1_SQRT_2;
    let sin0 = (s - c) * FRAC_1_SQRT_2;
    // Shifting by a further π/2 for order one.
    let cos1 = sin0;
    let sin1 = -cos0;
    let amp = (2.0 / (PI * x)).sqrt();
    match kind {
        J0 | Y0 => {
            let (p, q) = hankel_pq(0, x);
            if kind == J0 {
                amp * (p * cos0 - q * sin0)
            } else {
                amp * (p * sin0 + q * cos0)
            }
        }
        J1 | Y1 => {
            let (p, q) = hankel_pq(1, x);
            if kind == J1 {
                amp * (p * cos1 - q * sin1)
            } else {
                amp * (p * sin1 + q * cos1)
            }
        }
        I0 | I1 => {
            let order = if kind == I0 { 0 } else { 1 };
            let sum = modified_sum(order, x, true);
            // Split the exponential so values just past exp's range survive.
            let half = (0.5 * x).exp();
            half * (half * sum / (2.0 * PI * x).sqrt())
        }
        K0 | K1 => {
            let order = if kind == K0 { 0 } else { 1 };
            (PI / (2.0 * x)).sqrt() * (-x).exp() * modified_sum(order, x, false)
        }
    }
}

/// Step of the trapezoidal rule for the K integral.
const K_STEP: f64 = 0.0625;

/// `K_ν(x) = ∫₀^∞ exp(-x cosh t) cosh(νt) dt`, trapezoidal in t.
///
/// The integrand is analytic in a strip, so the rule converges
/// geometrically; the step above is far inside the accuracy needed for
/// x ≥ 2.
pub(crate) fn k_integral(order: u32, x: f64) -> f64 {
    let f = |t: f64| {
        let w = (-x * (t.cosh() - 1.0)).exp();
        if order == 0 {
            w
        } else {
            w * t.cosh()
        }
    };
    let mut sum = 0.5 * f(0.0);
    let mut k = 1;
    loop {
        let v = f(k as f64 * K_STEP);
        sum += v;
        if v < 1e-18 * sum || k > 4000 {
            break;
        }
        k += 1;
    }
    K_STEP * sum * (-x).exp()
}
