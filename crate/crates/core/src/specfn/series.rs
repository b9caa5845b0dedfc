//! Ascending power series about the origin, summed in double-double.
//!
//! The J/Y series alternate with terms far larger than the result once
//! x grows past a few units; double-double summation keeps the
//! cancellation error below f64 resolution up to the crossover.

use super::dd::Dd;
use super::BesselKind;
use std::f64::consts::{FRAC_2_PI, PI};

/// Euler–Mascheroni constant split into double-double parts.
const EULER_GAMMA: Dd = Dd::new(0.5772156649015329, -4.942915152430645e-18);

/// Relative size below which a series term is dropped.
pub(crate) const TERM_CUTOFF: f64 = 1e-17;
/// Hard cap on the number of terms.
pub(crate) const MAX_TERMS: usize = 60;

/// Partial sums for one order: the plain series and the digamma-weighted
/// series that carries the logarithmic second solution.
struct Sums {
    plain: Dd,
    weighted: Dd,
}

/// Sums `Σ s^n c_n` and `Σ s^n w_n c_n` with `c_n = q^n / (n! (n+order)!)`,
/// `q = x²/4`, `s = -1` for the oscillatory family and `+1` otherwise.
/// The weight is `H_n - γ` for order 0 and `H_n + H_{n+1} - 2γ` for order 1.
fn sums(x: f64, order: u32, alternating: bool) -> Sums {
    let q = Dd::square_of(x).div_f64(4.0);
    let mut c = Dd::ONE;
    let mut harmonic = Dd::ZERO;
    let weight = |h: Dd, n: usize| -> Dd {
        if order == 0 {
            h - EULER_GAMMA
        } else {
            let next = h + Dd::recip((n + 1) as f64);
            h + next - EULER_GAMMA - EULER_GAMMA
        }
    };
    let mut plain = c;
    let mut weighted = weight(harmonic, 0) * c;
    for n in 1..MAX_TERMS {
        let nf = n as f64;
        c = (c * q).div_f64(nf * (nf + order as f64));
        if alternating {
            c = -c;
        }
        harmonic = harmonic + Dd::recip(nf);
        let wt = weight(harmonic, n) * c;
        plain = plain + c;
        weighted = weighted + wt;
        let small_plain = c.abs().to_f64() < TERM_CUTOFF * plain.abs().to_f64();
        let small_weighted = wt.abs().to_f64() < TERM_CUTOFF * weighted.abs().to_f64();
        if small_plain && small_weighted {
            break;
        }
    }
    Sums { plain, weighted }
}

/// Power-series value of `kind` at `x > 0` (J0, I0, J1, I1 also at 0).
pub(crate) fn eval(kind: BesselKind, x: f64) -> f64 {
    use BesselKind::*;
    let half = x / 2.0;
    match kind {
        J0 => sums(x, 0, true).plain.to_f64(),
        I0 => sums(x, 0, false).plain.to_f64(),
        J1 => half * sums(x, 1, true).plain.to_f64(),
        I1 => half * sums(x, 1, false).plain.to_f64(),
        Y0 => {
            let s = sums(x, 0, true);
            let log_term = s.plain.mul_f64(half.ln());
            FRAC_2_PI * (log_term - s.weighted).to_f64()
        }
        K0 => {
            let s = sums(x, 0, false);
            (s.weighted - s.plain.mul_f64(half.ln())).to_f64()
        }
        Y1 => {
            let s = sums(x, 1, true);
            let j1 = s.plain.mul_f64(half);
            let log_term = j1.mul_f64(FRAC_2_PI * half.ln());
            let tail = s.weighted.mul_f64(half / PI);
            (log_term - tail).to_f64() - FRAC_2_PI / x
        }
        K1 => {
            let s = sums(x, 1, false);
            let i1 = s.plain.mul_f64(half);
            let tail = s.weighted.mul_f64(half / 2.0);
            1.0 / x + (i1.mul_f64(half.ln()) - tail).to_f64()
        }
    }
}
