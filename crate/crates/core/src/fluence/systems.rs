//! Interface systems for the two exponential families.

use super::{BranchFactors, FluenceError};
use crate::linalg::dense_solve;
pub use crate::linalg::SystemReport;
use crate::params::{DerivedOptics, Geometry};
use crate::specfn::RadialPair;
use nalgebra::{DMatrix, DVector};

/// Value and flux rows of one region's pair `c1 f(kr) + c2 g(kr)` at `r`.
fn basis(pair: RadialPair, k: f64, d: f64, r: f64) -> ([f64; 2], [f64; 2]) {
    let (f, g) = pair.values(k * r);
    let (df, dg) = pair.derivatives(k * r);
    ([f, g], [d * k * df, d * k * dg])
}

/// Writes continuity of region `left` (columns `cl`) against region
/// `right` (columns `cr`) at radius `r` into rows `row`, `row + 1`.
#[allow(clippy::too_many_arguments)]
fn couple(
    a: &mut DMatrix<f64>,
    row: usize,
    left: ([f64; 2], [f64; 2]),
    cl: usize,
    right: ([f64; 2], [f64; 2]),
    cr: usize,
) {
    for c in 0..2 {
        a[(row, cl + c)] = left.0[c];
        a[(row, cr + c)] = -right.0[c];
        a[(row + 1, cl + c)] = left.1[c];
        a[(row + 1, cr + c)] = -right.1[c];
    }
}

/// μ_eff family: unknowns B0, (B3, B4) for wall, pad, skin.
pub(super) fn solve_eff(
    geo: &Geometry,
    optics: &[DerivedOptics; 4],
    br: &BranchFactors,
    b0: f64,
) -> Result<(Vec<f64>, SystemReport), FluenceError> {
    let mut a = DMatrix::zeros(7, 7);
    let mut b = DVector::zeros(7);
    a[(0, 0)] = 1.0;
    b[0] = b0;
    let region = |i: usize, r: f64| basis(br.w_kind[i], br.kappa[i], optics[i + 1].d, r);
    // Lumen side at r_i: value B0, no radial flux.
    let wall = region(0, geo.r_i);
    for c in 0..2 {
        a[(1, 1 + c)] = wall.0[c];
        a[(2, 1 + c)] = wall.1[c];
    }
    a[(1, 0)] = -1.0;
    couple(&mut a, 3, region(0, geo.r_w()), 1, region(1, geo.r_w()), 3);
    couple(&mut a, 5, region(1, geo.r_p), 3, region(2, geo.r_p), 5);
    finish(a, b, "mu_eff")
}

/// μ_t family: unknowns (B1, B2) in the annulus, (B5, B6) for wall, pad, skin.
pub(super) fn solve_t(
    geo: &Geometry,
    optics: &[DerivedOptics; 4],
    br: &BranchFactors,
    p_in: f64,
) -> Result<(Vec<f64>, SystemReport), FluenceError> {
    let mut a = DMatrix::zeros(8, 8);
    let mut b = DVector::zeros(8);
    let region =
        |i: usize, r: f64| basis(RadialPair::Standard, br.beta[i], optics[i].d, r);
    // Column side at r_f: value −P_in, no radial flux.
    let ann = region(0, geo.r_f);
    for c in 0..2 {
        a[(0, c)] = ann.0[c];
        a[(1, c)] = ann.1[c];
    }
    b[0] = -p_in;
    couple(&mut a, 2, region(0, geo.r_i), 0, region(1, geo.r_i), 2);
    couple(&mut a, 4, region(1, geo.r_w()), 2, region(2, geo.r_w()), 4);
    couple(&mut a, 6, region(2, geo.r_p), 4, region(3, geo.r_p), 6);
    finish(a, b, "mu_t")
}

fn finish(
    a: DMatrix<f64>,
    b: DVector<f64>,
    family: &'static str,
) -> Result<(Vec<f64>, SystemReport), FluenceError> {
    match dense_solve(a, b) {
        Some((x, report)) => Ok((x.iter().copied().collect(), report)),
        None => Err(FluenceError::SingularSystem {
            family,
            condition_estimate: f64::INFINITY,
        }),
    }
}
