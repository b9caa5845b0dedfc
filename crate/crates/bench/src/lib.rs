//! Shared fixtures for the benchmarks.

use evla_core::fdoracle::{graded_axis, Grid2D};
use evla_core::params::{preset, ParamSet};

pub fn scenario(name: &str) -> ParamSet {
    preset(name).expect("built-in preset")
}

/// Radial spacing `hr` [mm], `nz` axial nodes graded toward the tip.
pub fn fluence_grid(params: &ParamSet, hr: f64, nz: usize) -> Grid2D {
    let geo = &params.geometry;
    Grid2D::with_spacing(geo, hr, graded_axis(0.0, geo.l, nz, 8.0))
}

/// Sample points on an `nr` x `nz` lattice over r ∈ [0, r_s], z ∈ [0, L].
pub fn lattice(params: &ParamSet, nr: usize, nz: usize) -> Vec<(f64, f64)> {
    let geo = &params.geometry;
    let mut pts = Vec::with_capacity(nr * nz);
    for j in 0..nz {
        for i in 0..nr {
            pts.push((
                geo.r_s * i as f64 / (nr - 1) as f64,
                geo.l * j as f64 / (nz - 1) as f64,
            ));
        }
    }
    pts
}
