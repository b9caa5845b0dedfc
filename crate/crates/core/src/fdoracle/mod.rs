//! Finite-volume reference solvers on interface-aligned axisymmetric grids.
//!
//! Nodes carry the unknowns; each node owns the control volume between the
//! midpoints to its neighbours, so every interface radius is a node and
//! each half-volume lies in a single material. Face conductances use the
//! segment's own coefficient, which is the harmonic-mean rule for a node
//! pair straddling nothing but one material.

mod grid;
mod heat;
mod probe;
mod sparse;

pub use grid::{graded_axis, uniform_axis, Grid2D};
pub use heat::{solve_heat_fd, AbsorbedPower, HeatRun, NoSource, TimeSource};
pub use probe::{residual_probe, AnalyticField, RegionResidual, ResidualReport, SteadyCoefficients};
pub use sparse::{bicgstab, pcg, CsrMatrix, NonConvergence, SolveStats};

use crate::fluence::{build_source, SourceTerm};
use crate::params::{derive_optics, Material, ParamSet};
use thiserror::Error;

/// Krylov tolerance on ‖b − Ax‖/‖b‖.
pub const SOLVER_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FdError {
    #[error(transparent)]
    NonConvergence(#[from] NonConvergence),
    #[error("grid needs at least 16 nodes per axis, got {nr} x {nz}")]
    GridTooSmall { nr: usize, nz: usize },
    #[error("boundary data has {got} values, expected {expected}")]
    BoundaryLength { got: usize, expected: usize },
    #[error("non-finite value in the solution")]
    NonFinite,
}

/// Condition on one outer side of the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    ZeroValue,
    ZeroFlux,
    /// Prescribed values along the side, one per node.
    Dirichlet(Vec<f64>),
    /// Outward flux `h (u − ambient)` per unit area.
    Robin { h: f64, ambient: f64 },
}

/// Conditions at r = r_s and at the two z ends; the axis is always regular.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundaries {
    pub r_outer: Boundary,
    pub z_lo: Boundary,
    pub z_hi: Boundary,
}

impl Boundaries {
    pub fn uniform(b: Boundary) -> Boundaries {
        Boundaries {
            r_outer: b.clone(),
            z_lo: b.clone(),
            z_hi: b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Fluence,
    Temperature,
}

/// A nodal field on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FDField {
    pub grid: Grid2D,
    pub values: Vec<f64>,
    pub quantity: Quantity,
    pub time: f64,
}

impl FDField {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    /// Volume-weighted relative L² distance to `other` (same grid).
    pub fn relative_l2(&self, other: &[f64]) -> f64 {
        let w = self.grid.volume_weights();
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..w.len() {
            num += w[k] * (self.values[k] - other[k]).powi(2);
            den += w[k] * other[k].powi(2);
        }
        (num / den).sqrt()
    }
}

/// Cell integrals `∫∫ S r dr dz` of a steady source.
pub trait CellSource: Sync {
    fn cell_integral(&self, ra: f64, rb: f64, za: f64, zb: f64) -> f64;
}

/// The Beer–Lambert source frozen at time `t`.
#[derive(Debug, Clone, Copy)]
pub struct FrozenSource {
    pub src: SourceTerm,
    pub t: f64,
}

impl CellSource for FrozenSource {
    fn cell_integral(&self, ra: f64, rb: f64, za: f64, zb: f64) -> f64 {
        let rb = rb.min(self.src.r_f);
        if rb <= ra {
            return 0.0;
        }
        let mu = self.src.mu_t;
        let shift = self.src.v * self.t;
        let zint = ((-mu * (za + shift)).exp() - (-mu * (zb + shift)).exp()) / mu;
        self.src.s0 * 0.5 * (rb * rb - ra * ra) * zint
    }
}

/// A source given pointwise, integrated by tensor Simpson on each cell.
pub struct FnSource<F: Fn(f64, f64) -> f64 + Sync>(pub F);

impl<F: Fn(f64, f64) -> f64 + Sync> CellSource for FnSource<F> {
    fn cell_integral(&self, ra: f64, rb: f64, za: f64, zb: f64) -> f64 {
        let w = [1.0, 4.0, 1.0];
        let mut s = 0.0;
        for (a, wa) in w.iter().enumerate() {
            let r = ra + 0.5 * a as f64 * (rb - ra);
            for (b, wb) in w.iter().enumerate() {
                let z = za + 0.5 * b as f64 * (zb - za);
                s += wa * wb * (self.0)(r, z) * r;
            }
        }
        s * (rb - ra) * (zb - za) / 36.0
    }
}

/// Per-material coefficients of `−∇·(a∇u) + c u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialCoefficients {
    pub a: [f64; 4],
    pub c: [f64; 4],
}

/// Assembled operator over the free nodes.
pub(crate) struct Assembled {
    pub matrix: CsrMatrix,
    /// Right-hand-side contributions of fixed values and Robin ambients.
    pub bc_rhs: Vec<f64>,
    /// Free-node index of each grid node.
    pub map: Vec<Option<usize>>,
    /// Values at fixed (Dirichlet) nodes.
    pub fixed: Vec<f64>,
}

fn side_values(b: &Boundary, n: usize) -> Result<Option<Vec<f64>>, FdError> {
    match b {
        Boundary::ZeroValue => Ok(Some(vec![0.0; n])),
        Boundary::Dirichlet(v) if v.len() != n => Err(FdError::BoundaryLength {
            got: v.len(),
            expected: n,
        }),
        Boundary::Dirichlet(v) => Ok(Some(v.clone())),
        _ => Ok(None),
    }
}

/// Assembles `−∇·(a∇u) + c u` plus optional upwinded axial convection with
/// coefficient `conv` (ρc·u) restricted to blood.
pub(crate) fn assemble(
    grid: &Grid2D,
    coef: &MaterialCoefficients,
    bcs: &Boundaries,
    conv: f64,
) -> Result<Assembled, FdError> {
    let (nr, nz) = (grid.nr(), grid.nz());
    if nr < 16 || nz < 16 {
        return Err(FdError::GridTooSmall { nr, nz });
    }
    let mut fixed = vec![0.0; grid.len()];
    let mut is_fixed = vec![false; grid.len()];
    if let Some(v) = side_values(&bcs.r_outer, nz)? {
        for j in 0..nz {
            fixed[grid.idx(nr - 1, j)] = v[j];
            is_fixed[grid.idx(nr - 1, j)] = true;
        }
    }
    for (side, j) in [(&bcs.z_lo, 0), (&bcs.z_hi, nz - 1)] {
        if let Some(v) = side_values(side, nr)? {
            for i in 0..nr {
                fixed[grid.idx(i, j)] = v[i];
                is_fixed[grid.idx(i, j)] = true;
            }
        }
    }
    let mut map = vec![None; grid.len()];
    let mut n = 0;
    for g in 0..grid.len() {
        if !is_fixed[g] {
            map[g] = Some(n);
            n += 1;
        }
    }
    let mut trip = Vec::with_capacity(7 * n);
    let mut bc_rhs = vec![0.0; n];
    let mi = |m: Option<Material>| m.map_or(0, |m| m.index());
    for j in 0..nz {
        let (za, zb) = grid.z_cell(j);
        let hz = zb - za;
        for i in 0..nr {
            let g = grid.idx(i, j);
            let Some(row) = map[g] else { continue };
            let (ml, vl, mr, vr) = grid.radial_halves(i);
            let (ml, mr) = (mi(ml), mi(mr));
            let mut diag = (coef.c[ml] * vl + coef.c[mr] * vr) * hz;
            let mut link = |other: usize, w: f64, diag: &mut f64| {
                *diag += w;
                match map[other] {
                    Some(col) => trip.push((row, col, -w)),
                    None => bc_rhs[row] += w * fixed[other],
                }
            };
            if i + 1 < nr {
                let face = 0.5 * (grid.r[i] + grid.r[i + 1]);
                let w = coef.a[mr] * face / (grid.r[i + 1] - grid.r[i]) * hz;
                link(grid.idx(i + 1, j), w, &mut diag);
            }
            if i > 0 {
                let face = 0.5 * (grid.r[i - 1] + grid.r[i]);
                let w = coef.a[ml] * face / (grid.r[i] - grid.r[i - 1]) * hz;
                link(grid.idx(i - 1, j), w, &mut diag);
            }
            let az = coef.a[ml] * vl + coef.a[mr] * vr;
            if j + 1 < nz {
                link(grid.idx(i, j + 1), az / (grid.z[j + 1] - grid.z[j]), &mut diag);
            }
            if j > 0 {
                link(grid.idx(i, j - 1), az / (grid.z[j] - grid.z[j - 1]), &mut diag);
            }
            if i + 1 == nr {
                if let Boundary::Robin { h, ambient } = bcs.r_outer {
                    let area = grid.r[i] * hz;
                    diag += h * area;
                    bc_rhs[row] += h * ambient * area;
                }
            }
            for (side, jj) in [(&bcs.z_lo, 0), (&bcs.z_hi, nz - 1)] {
                if let (Boundary::Robin { h, ambient }, true) = (side, j == jj) {
                    diag += h * (vl + vr);
                    bc_rhs[row] += h * ambient * (vl + vr);
                }
            }
            if conv != 0.0 {
                let lumen = |m: usize, v: f64| if m == Material::Blood.index() { v } else { 0.0 };
                let c = conv * (lumen(ml, vl) + lumen(mr, vr));
                if c != 0.0 {
                    // Outflow through the upper face, upwind inflow from below.
                    diag += c;
                    if j > 0 {
                        let other = grid.idx(i, j - 1);
                        match map[other] {
                            Some(col) => trip.push((row, col, -c)),
                            None => bc_rhs[row] += c * fixed[other],
                        }
                    }
                }
            }
            trip.push((row, row, diag));
        }
    }
    Ok(Assembled {
        matrix: CsrMatrix::from_triplets(n, trip),
        bc_rhs,
        map,
        fixed,
    })
}

/// Node-wise cell integrals of a source.
pub fn source_vector(grid: &Grid2D, source: &dyn CellSource) -> Vec<f64> {
    use rayon::prelude::*;
    (0..grid.len())
        .into_par_iter()
        .map(|g| {
            let (i, j) = (g % grid.nr(), g / grid.nr());
            let (ra, rb) = grid.r_cell(i);
            let (za, zb) = grid.z_cell(j);
            source.cell_integral(ra, rb, za, zb)
        })
        .collect()
}

/// Solves `−∇·(a∇u) + c u = S` with the given boundary conditions.
pub fn solve_steady(
    grid: &Grid2D,
    coef: &MaterialCoefficients,
    source: &dyn CellSource,
    bcs: &Boundaries,
) -> Result<(Vec<f64>, SolveStats), FdError> {
    let asm = assemble(grid, coef, bcs, 0.0)?;
    let s = source_vector(grid, source);
    let mut b = asm.bc_rhs.clone();
    for (g, m) in asm.map.iter().enumerate() {
        if let Some(k) = m {
            b[*k] += s[g];
        }
    }
    let mut x = vec![0.0; asm.matrix.n];
    let stats = pcg(&asm.matrix, &b, &mut x, SOLVER_TOL, 200_000)?;
    let mut u = asm.fixed.clone();
    for (g, m) in asm.map.iter().enumerate() {
        if let Some(k) = m {
            u[g] = x[*k];
        }
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(FdError::NonFinite);
    }
    Ok((u, stats))
}

/// Steady fluence in the t = 0 frame (ζ = z) with the given closures.
pub fn solve_fluence_fd(
    grid: &Grid2D,
    params: &ParamSet,
    bcs: &Boundaries,
) -> Result<(FDField, SolveStats), FdError> {
    let optics = Material::ALL.map(|m| derive_optics(params.optics(m)));
    let coef = MaterialCoefficients {
        a: optics.map(|o| o.d),
        c: optics.map(|o| o.mu_a),
    };
    let src = build_source(&params.protocol, &params.geometry, &optics[0]);
    let (values, stats) = solve_steady(grid, &coef, &FrozenSource { src, t: 0.0 }, bcs)?;
    log::info!(
        "fluence FD {}x{}: {} PCG iterations, residual {:e}",
        grid.nr(),
        grid.nz(),
        stats.iterations,
        stats.relative_residual
    );
    Ok((
        FDField {
            grid: grid.clone(),
            values,
            quantity: Quantity::Fluence,
            time: 0.0,
        },
        stats,
    ))
}
