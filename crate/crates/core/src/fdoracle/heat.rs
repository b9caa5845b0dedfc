//! Implicit-Euler bioheat solver.
//!
//! Unknown θ = T − T_b. In every material
//! `ρc ∂θ/∂t + ρ_b c_b u ∂θ/∂z = ∇·(k∇θ) − c_b ω θ + q`,
//! with convection only in the lumen, Robin cooling at r_s toward
//! γ = T_air − T_b, zero axial flux at both ends and θ = 0 initially.
//! With flow, blood enters at the lower end at T_b.

use super::{assemble, bicgstab, pcg, Boundaries, Boundary, FDField, FdError, Grid2D, Quantity, SolveStats, SOLVER_TOL};
use crate::fluence::FluenceSolution;
use crate::params::{region_of, Material, ParamSet};
use super::MaterialCoefficients;
use rayon::prelude::*;

/// Cell integrals `∫∫ q r dr dz` of a time-dependent heat source.
pub trait TimeSource: Sync {
    fn fill(&self, grid: &Grid2D, t: f64, out: &mut [f64]);
}

/// No heating.
pub struct NoSource;

impl TimeSource for NoSource {
    fn fill(&self, _grid: &Grid2D, _t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
    }
}

/// `q = μ_a φ` from the analytic fluence, zero behind the tip.
///
/// The radial integrals of both exponential families are time independent,
/// so they are computed once per node; the z integrals are exact.
pub struct AbsorbedPower {
    /// Per radial node: (∫μ_a E r dr, ∫μ_a F r dr) over its control volume.
    radial: Vec<(f64, f64)>,
    mu_eff: f64,
    mu_t: f64,
    v: f64,
}

/// Sub-intervals of the composite Simpson rule on each half cell.
const HALF_CELL_PANELS: usize = 8;

impl AbsorbedPower {
    pub fn new(sol: &FluenceSolution, grid: &Grid2D) -> AbsorbedPower {
        let radial = (0..grid.nr())
            .into_par_iter()
            .map(|i| {
                let (lo, hi) = grid.r_cell(i);
                let ri = grid.r[i];
                let mut acc = (0.0, 0.0);
                for (a, b) in [(lo, ri), (ri, hi)] {
                    if b <= a {
                        continue;
                    }
                    let region = region_of(0.5 * (a + b), &sol.geo).expect("inside domain");
                    let mu_a = sol.optics[region.material().index()].mu_a;
                    let n = HALF_CELL_PANELS;
                    let h = (b - a) / n as f64;
                    for k in 0..=n {
                        let r = a + k as f64 * h;
                        let w = if k == 0 || k == n {
                            1.0
                        } else if k % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        let (e, _) = sol.radial_eff(region, r);
                        let (f, _) = sol.radial_t(region, r);
                        acc.0 += w * h / 3.0 * mu_a * e * r;
                        acc.1 += w * h / 3.0 * mu_a * f * r;
                    }
                }
                acc
            })
            .collect();
        AbsorbedPower {
            radial,
            mu_eff: sol.mu_eff(),
            mu_t: sol.mu_t(),
            v: sol.v(),
        }
    }
}

/// `∫ exp(−μζ) dζ` over `[a, b] ∩ [0, ∞)`.
fn exp_integral(mu: f64, a: f64, b: f64) -> f64 {
    let a = a.max(0.0);
    if b <= a {
        return 0.0;
    }
    (-mu * a).exp() * -(-mu * (b - a)).exp_m1() / mu
}

impl TimeSource for AbsorbedPower {
    fn fill(&self, grid: &Grid2D, t: f64, out: &mut [f64]) {
        let nr = grid.nr();
        let shift = self.v * t;
        out.par_chunks_mut(nr).enumerate().for_each(|(j, row)| {
            let (za, zb) = grid.z_cell(j);
            let ie = exp_integral(self.mu_eff, za + shift, zb + shift);
            let it = exp_integral(self.mu_t, za + shift, zb + shift);
            for (i, v) in row.iter_mut().enumerate() {
                let (e, f) = self.radial[i];
                *v = e * ie + f * it;
            }
        });
    }
}

/// Snapshots of a transient run.
#[derive(Debug, Clone)]
pub struct HeatRun {
    /// Temperature fields [°C] at the requested times.
    pub snapshots: Vec<FDField>,
    pub steps: usize,
    pub max_iterations: usize,
    pub worst_residual: f64,
}

/// Runs the implicit-Euler scheme to `t_end` with step `dt`, recording
/// the temperature at the step nearest to each of `times`.
pub fn solve_heat_fd(
    grid: &Grid2D,
    params: &ParamSet,
    source: &dyn TimeSource,
    dt: f64,
    t_end: f64,
    times: &[f64],
) -> Result<HeatRun, FdError> {
    let th = params.thermal;
    let c_b = params.thermal(Material::Blood).c_p;
    let proto = &params.protocol;
    let coef = MaterialCoefficients {
        a: th.map(|m| m.k),
        c: th.map(|m| c_b * m.omega + m.capacity() / dt),
    };
    let bcs = Boundaries {
        r_outer: Boundary::Robin {
            h: proto.h_air,
            ambient: proto.t_air - proto.t_b,
        },
        z_lo: Boundary::ZeroFlux,
        z_hi: Boundary::ZeroFlux,
    };
    let rho_c_b = params.thermal(Material::Blood).capacity();
    let conv = rho_c_b * proto.u;
    let asm = assemble(grid, &coef, &bcs, conv)?;
    let n = asm.matrix.n;
    let mass: Vec<f64> = (0..grid.len())
        .map(|g| {
            let (i, j) = (g % grid.nr(), g / grid.nr());
            let (ml, vl, mr, vr) = grid.radial_halves(i);
            let cap = |m: Option<Material>| m.map_or(0.0, |m| th[m.index()].capacity());
            let (za, zb) = grid.z_cell(j);
            (cap(ml) * vl + cap(mr) * vr) * (zb - za) / dt
        })
        .collect();
    let steps = (t_end / dt).round() as usize;
    let mut theta = vec![0.0; n];
    let mut snapshots = Vec::new();
    let mut pending: Vec<f64> = times.to_vec();
    pending.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let record = |theta: &[f64], t: f64| {
        let mut values = vec![proto.t_b; grid.len()];
        for (g, m) in asm.map.iter().enumerate() {
            if let Some(k) = m {
                values[g] = proto.t_b + theta[*k];
            }
        }
        FDField {
            grid: grid.clone(),
            values,
            quantity: Quantity::Temperature,
            time: t,
        }
    };
    let take_due = |pending: &mut Vec<f64>, t: f64| -> bool {
        let due = pending.iter().any(|&s| (s - t).abs() <= 0.5 * dt);
        pending.retain(|&s| (s - t).abs() > 0.5 * dt);
        due
    };
    if take_due(&mut pending, 0.0) {
        snapshots.push(record(&theta, 0.0));
    }
    let mut q = vec![vec![0.0; grid.len()]; 3];
    let mut rhs = vec![0.0; n];
    let (mut max_iterations, mut worst_residual) = (0, 0.0_f64);
    for step in 0..steps {
        let t0 = step as f64 * dt;
        let t1 = t0 + dt;
        // Simpson average of the source over the step.
        source.fill(grid, t0, &mut q[0]);
        source.fill(grid, t0 + 0.5 * dt, &mut q[1]);
        source.fill(grid, t1, &mut q[2]);
        for (g, m) in asm.map.iter().enumerate() {
            if let Some(k) = m {
                let qbar = (q[0][g] + 4.0 * q[1][g] + q[2][g]) / 6.0;
                rhs[*k] = asm.bc_rhs[*k] + mass[g] * theta[*k] + qbar;
            }
        }
        let stats: SolveStats = if conv != 0.0 {
            bicgstab(&asm.matrix, &rhs, &mut theta, SOLVER_TOL, 20_000)?
        } else {
            pcg(&asm.matrix, &rhs, &mut theta, SOLVER_TOL, 20_000)?
        };
        max_iterations = max_iterations.max(stats.iterations);
        worst_residual = worst_residual.max(stats.relative_residual);
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(FdError::NonFinite);
        }
        if take_due(&mut pending, t1) {
            snapshots.push(record(&theta, t1));
        }
    }
    log::info!(
        "heat FD {}x{}, {steps} steps: at most {max_iterations} iterations per step",
        grid.nr(),
        grid.nz()
    );
    Ok(HeatRun {
        snapshots,
        steps,
        max_iterations,
        worst_residual,
    })
}
