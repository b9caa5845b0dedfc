//! Finite-difference residuals of analytic fields.

use super::{Grid2D, MaterialCoefficients};
use crate::params::{region_of, RegionId};
use rayon::prelude::*;

/// Coefficients of `−a Δu + c u = f`, one pair per material.
pub type SteadyCoefficients = MaterialCoefficients;

/// A field known in closed form, with the forcing it should satisfy.
pub trait AnalyticField: Sync {
    fn value(&self, r: f64, z: f64) -> f64;
    fn source(&self, _r: f64, _z: f64) -> f64 {
        0.0
    }
}

impl<F: Fn(f64, f64) -> f64 + Sync> AnalyticField for F {
    fn value(&self, r: f64, z: f64) -> f64 {
        self(r, z)
    }
}

/// Residual norms in one region on the coarse grid and its refinement,
/// both measured at the coarse nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionResidual {
    pub region: RegionId,
    pub nodes: usize,
    pub max: f64,
    pub l2: f64,
    pub max_fine: f64,
    pub l2_fine: f64,
    /// Largest |c u| + |f| over the probed nodes, for scale.
    pub scale: f64,
}

impl RegionResidual {
    /// Observed order from the two L² norms.
    pub fn order(&self) -> f64 {
        (self.l2 / self.l2_fine).log2()
    }

    /// False when the field vanishes identically here (both norms zero or
    /// at round-off relative to the scale), so no order can be observed.
    pub fn counts(&self) -> bool {
        self.l2 > 1e-13 * self.scale && self.l2_fine > 1e-13 * self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub regions: Vec<RegionResidual>,
}

impl ResidualReport {
    pub fn region(&self, id: RegionId) -> Option<&RegionResidual> {
        self.regions.iter().find(|r| r.region == id)
    }

    /// (smallest, largest) observed order over the regions that count.
    pub fn order_range(&self) -> (f64, f64) {
        self.regions.iter().filter(|r| r.counts()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.order()), hi.max(r.order()))
        })
    }
}

/// Three-point first and second derivative weights for spacings `hm`, `hp`.
fn weights(hm: f64, hp: f64) -> ([f64; 3], [f64; 3]) {
    let s = hm * hp * (hm + hp);
    let d1 = [-hp * hp / s, (hp * hp - hm * hm) / s, hm * hm / s];
    let d2 = [2.0 * hp / s, -2.0 * (hm + hp) / s, 2.0 * hm / s];
    (d1, d2)
}

fn residual_at(
    field: &dyn AnalyticField,
    coef: &SteadyCoefficients,
    m: usize,
    (r, hm, hp): (f64, f64, f64),
    (z, km, kp): (f64, f64, f64),
) -> (f64, f64) {
    let u0 = field.value(r, z);
    let ur = [field.value(r - hm, z), u0, field.value(r + hp, z)];
    let uz = [field.value(r, z - km), u0, field.value(r, z + kp)];
    let (d1r, d2r) = weights(hm, hp);
    let (_, d2z) = weights(km, kp);
    let dot = |w: [f64; 3], u: [f64; 3]| w[0] * u[0] + w[1] * u[1] + w[2] * u[2];
    let lap = dot(d2r, ur) + dot(d1r, ur) / r + dot(d2z, uz);
    let f = field.source(r, z);
    (-coef.a[m] * lap + coef.c[m] * u0 - f, (coef.c[m] * u0).abs() + f.abs())
}

/// Centered-difference residual of `field` at the interior nodes of `grid`
/// whose radial neighbours lie in the same region, using first the grid's
/// own spacing and then half of it at the same nodes.
pub fn residual_probe(
    field: &dyn AnalyticField,
    coef: &SteadyCoefficients,
    grid: &Grid2D,
) -> ResidualReport {
    let (nr, nz) = (grid.nr(), grid.nz());
    let geo = &grid.geo;
    let seg_region = |i: usize| {
        region_of(0.5 * (grid.r[i] + grid.r[i + 1]), geo).expect("segment inside the domain")
    };
    // (region, r, hm, hp, radial weight) for every usable radial node.
    let radial: Vec<(RegionId, f64, f64, f64, f64)> = (1..nr - 1)
        .filter_map(|i| {
            let (left, right) = (seg_region(i - 1), seg_region(i));
            (left == right).then(|| {
                let (lo, hi) = grid.r_cell(i);
                (
                    left,
                    grid.r[i],
                    grid.r[i] - grid.r[i - 1],
                    grid.r[i + 1] - grid.r[i],
                    0.5 * (hi * hi - lo * lo),
                )
            })
        })
        .collect();
    let mut regions = Vec::new();
    for id in RegionId::ALL {
        let m = id.material().index();
        let rows: Vec<_> = radial.iter().filter(|n| n.0 == id).collect();
        if rows.is_empty() {
            continue;
        }
        // (w, coarse residual, fine residual, scale)
        let samples: Vec<(f64, f64, f64, f64)> = (1..nz - 1)
            .into_par_iter()
            .flat_map_iter(|j| {
                let z = grid.z[j];
                let (km, kp) = (z - grid.z[j - 1], grid.z[j + 1] - z);
                let (za, zb) = grid.z_cell(j);
                rows.iter().map(move |&&(_, r, hm, hp, wr)| {
                    let (rc, scale) = residual_at(field, coef, m, (r, hm, hp), (z, km, kp));
                    let (rf, _) =
                        residual_at(field, coef, m, (r, 0.5 * hm, 0.5 * hp), (z, 0.5 * km, 0.5 * kp));
                    (wr * (zb - za), rc, rf, scale)
                })
            })
            .collect();
        let wsum: f64 = samples.iter().map(|s| s.0).sum();
        let l2 = |k: usize| {
            let s: f64 = samples
                .iter()
                .map(|s| s.0 * if k == 0 { s.1 * s.1 } else { s.2 * s.2 })
                .sum();
            (s / wsum).sqrt()
        };
        regions.push(RegionResidual {
            region: id,
            nodes: samples.len(),
            max: samples.iter().fold(0.0, |a, s| a.max(s.1.abs())),
            l2: l2(0),
            max_fine: samples.iter().fold(0.0, |a, s| a.max(s.2.abs())),
            l2_fine: l2(1),
            scale: samples.iter().fold(0.0, |a, s| a.max(s.3)),
        });
    }
    ResidualReport { regions }
}
