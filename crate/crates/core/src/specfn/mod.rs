//! Bessel functions of orders 0 and 1 for real non-negative arguments.
//!
//! Small arguments use the ascending series (summed in double-double),
//! large arguments the Hankel expansions. `K` on the middle range comes
//! from its integral representation, where neither expansion is accurate.

mod dd;
mod large;
mod series;

use thiserror::Error;

/// Below this the ascending series is used for J, Y and I.
pub const SERIES_CROSSOVER: f64 = 20.0;
/// Below this (inclusive) the ascending series is used for K.
pub const K_SERIES_LIMIT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselKind {
    J0,
    J1,
    Y0,
    Y1,
    I0,
    I1,
    K0,
    K1,
}

impl BesselKind {
    pub const ALL: [BesselKind; 8] = [
        BesselKind::J0,
        BesselKind::J1,
        BesselKind::Y0,
        BesselKind::Y1,
        BesselKind::I0,
        BesselKind::I1,
        BesselKind::K0,
        BesselKind::K1,
    ];

    /// Singular at the origin.
    pub fn is_singular(self) -> bool {
        matches!(
            self,
            BesselKind::Y0 | BesselKind::Y1 | BesselKind::K0 | BesselKind::K1
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecFnError {
    #[error("{kind:?} is undefined at x = {x}")]
    Domain { kind: BesselKind, x: f64 },
    #[error("{kind:?}({x}) exceeds the f64 range")]
    Overflow { kind: BesselKind, x: f64 },
}

/// Checked evaluation.
pub fn eval(kind: BesselKind, x: f64) -> Result<f64, SpecFnError> {
    if !(x >= 0.0) || (x == 0.0 && kind.is_singular()) || x.is_infinite() {
        return Err(SpecFnError::Domain { kind, x });
    }
    let v = eval_unchecked(kind, x);
    if v.is_infinite() {
        return Err(SpecFnError::Overflow { kind, x });
    }
    Ok(v)
}

/// Evaluation without domain checks; returns inf/NaN where `eval` errors.
pub fn eval_unchecked(kind: BesselKind, x: f64) -> f64 {
    use BesselKind::*;
    if x == 0.0 {
        return match kind {
            J0 | I0 => 1.0,
            J1 | I1 => 0.0,
            Y0 | Y1 | K0 | K1 => f64::NAN,
        };
    }
    match kind {
        K0 | K1 => {
            if x <= K_SERIES_LIMIT {
                series::eval(kind, x)
            } else if x < SERIES_CROSSOVER {
                large::k_integral(if kind == K0 { 0 } else { 1 }, x)
            } else {
                large::asymptotic(kind, x)
            }
        }
        _ => {
            if x < SERIES_CROSSOVER {
                series::eval(kind, x)
            } else {
                large::asymptotic(kind, x)
            }
        }
    }
}

/// Series-only value, exposed for crossover checks.
pub fn eval_series(kind: BesselKind, x: f64) -> f64 {
    series::eval(kind, x)
}

/// Integral-representation value of K₀ or K₁, exposed for crossover checks.
pub fn eval_k_integral(kind: BesselKind, x: f64) -> f64 {
    match kind {
        BesselKind::K0 => large::k_integral(0, x),
        BesselKind::K1 => large::k_integral(1, x),
        _ => f64::NAN,
    }
}

/// Large-argument value, exposed for crossover checks.
pub fn eval_asymptotic(kind: BesselKind, x: f64) -> f64 {
    large::asymptotic(kind, x)
}

pub fn j0(x: f64) -> f64 {
    eval_unchecked(BesselKind::J0, x)
}
pub fn j1(x: f64) -> f64 {
    eval_unchecked(BesselKind::J1, x)
}
pub fn y0(x: f64) -> f64 {
    eval_unchecked(BesselKind::Y0, x)
}
pub fn y1(x: f64) -> f64 {
    eval_unchecked(BesselKind::Y1, x)
}
pub fn i0(x: f64) -> f64 {
    eval_unchecked(BesselKind::I0, x)
}
pub fn i1(x: f64) -> f64 {
    eval_unchecked(BesselKind::I1, x)
}
pub fn k0(x: f64) -> f64 {
    eval_unchecked(BesselKind::K0, x)
}
pub fn k1(x: f64) -> f64 {
    eval_unchecked(BesselKind::K1, x)
}

/// `J₁(x)Y₀(x) − Y₁(x)J₀(x)`, which equals `2/(πx)`.
pub fn wronskian_standard(x: f64) -> Result<f64, SpecFnError> {
    if !(x > 0.0) {
        return Err(SpecFnError::Domain {
            kind: BesselKind::Y0,
            x,
        });
    }
    Ok(j1(x) * y0(x) - y1(x) * j0(x))
}

/// `K₁(x)I₀(x) + I₁(x)K₀(x)`, which equals `1/x`.
pub fn wronskian_modified(x: f64) -> Result<f64, SpecFnError> {
    if !(x > 0.0) {
        return Err(SpecFnError::Domain {
            kind: BesselKind::K0,
            x,
        });
    }
    let v = k1(x) * i0(x) + i1(x) * k0(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SpecFnError::Overflow {
            kind: BesselKind::I0,
            x,
        })
    }
}

/// Order-zero radial solution pair used for cylindrical layers:
/// `Standard` is (J₀, Y₀), `Modified` is (I₀, K₀).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RadialPair {
    Standard,
    Modified,
}

impl RadialPair {
    /// `(f(x), g(x))`.
    pub fn values(self, x: f64) -> (f64, f64) {
        match self {
            RadialPair::Standard => (j0(x), y0(x)),
            RadialPair::Modified => (i0(x), k0(x)),
        }
    }

    /// `(f'(x), g'(x))` with respect to the argument.
    pub fn derivatives(self, x: f64) -> (f64, f64) {
        match self {
            RadialPair::Standard => (-j1(x), -y1(x)),
            RadialPair::Modified => (i1(x), -k1(x)),
        }
    }

    /// `f g' − f' g`: `2/(πx)` for Standard, `−1/x` for Modified.
    pub fn wronskian(self, x: f64) -> f64 {
        let (f, g) = self.values(x);
        let (df, dg) = self.derivatives(x);
        f * dg - df * g
    }

    pub fn name(self) -> &'static str {
        match self {
            RadialPair::Standard => "standard",
            RadialPair::Modified => "modified",
        }
    }
}
