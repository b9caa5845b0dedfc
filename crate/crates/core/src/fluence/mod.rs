//! Steady-form analytic fluence over the layered cylinder.
//!
//! With ζ = z + vt the field is a sum of two exponential families,
//!
//! ```text
//! φ = E_j(r) exp(-μ_eff ζ) + F_j(r) exp(-μ_t ζ)
//! ```
//!
//! where μ_eff and μ_t are the blood coefficients and `E_j`, `F_j` are
//! order-zero cylinder functions in each region. The coefficients follow
//! from value and flux continuity at every interface, solved as one
//! dense system per family.

mod systems;

use crate::params::{
    derive_optics, region_of, DerivedOptics, Geometry, Material, Normalization, ParamError,
    ParamSet, Protocol, RegionId,
};
use crate::specfn::RadialPair;
use std::f64::consts::PI;
use thiserror::Error;

pub use systems::SystemReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FluenceError {
    #[error("non-positive radicand for {family} in {region}: {value:e}")]
    NonPositiveRadicand {
        region: Material,
        family: &'static str,
        value: f64,
    },
    #[error("singular {family} system (condition estimate {condition_estimate:e})")]
    SingularSystem {
        family: &'static str,
        condition_estimate: f64,
    },
    #[error("post-solve continuity check failed: {0}")]
    Continuity(String),
    #[error("point (r = {r}, z = {z}, t = {t}) is outside the illuminated domain")]
    OutOfDomain { r: f64, z: f64, t: f64 },
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Moving Beer–Lambert source inside the fiber column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceTerm {
    /// Power density at the tip [W/mm³].
    pub s0: f64,
    /// Blood attenuation coefficient [1/mm].
    pub mu_t: f64,
    /// Pull-back velocity [mm/s].
    pub v: f64,
    /// Fiber radius [mm].
    pub r_f: f64,
}

impl SourceTerm {
    /// S(r, z, t); zero outside the column.
    pub fn eval(&self, r: f64, z: f64, t: f64) -> f64 {
        if r < self.r_f {
            self.s0 * (-self.mu_t * (z + self.v * t)).exp()
        } else {
            0.0
        }
    }
}

pub fn build_source(protocol: &Protocol, geo: &Geometry, blood: &DerivedOptics) -> SourceTerm {
    let irradiance = protocol.p_laser / (PI * geo.r_f * geo.r_f);
    let factor = blood.mu_s * (blood.mu_t + blood.g * blood.mu_a) / (blood.mu_a + blood.mu_s_reduced);
    SourceTerm {
        s0: irradiance * factor,
        mu_t: blood.mu_t,
        v: protocol.v,
        r_f: geo.r_f,
    }
}

/// Radial wavenumbers and function families per region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchFactors {
    /// κ_j for wall, pad, skin.
    pub kappa: [f64; 3],
    /// Pair multiplying the μ_eff family in wall, pad, skin.
    pub w_kind: [RadialPair; 3],
    /// β_j for blood, wall, pad, skin.
    pub beta: [f64; 4],
}

impl BranchFactors {
    pub fn kappa_of(&self, m: Material) -> Option<(f64, RadialPair)> {
        let i = m.index().checked_sub(1)?;
        Some((self.kappa[i], self.w_kind[i]))
    }

    pub fn beta_of(&self, m: Material) -> f64 {
        self.beta[m.index()]
    }
}

/// κ and β from the derived optics of blood, wall, pad, skin.
pub fn branch_factors(optics: &[DerivedOptics; 4]) -> Result<BranchFactors, FluenceError> {
    let blood = &optics[0];
    let eff2 = blood.mu_eff * blood.mu_eff;
    let t2 = blood.mu_t * blood.mu_t;
    let mut kappa = [0.0; 3];
    let mut w_kind = [RadialPair::Standard; 3];
    for (i, m) in Material::OUTER.into_iter().enumerate() {
        let ej2 = optics[m.index()].mu_eff.powi(2);
        let radicand = (ej2 - eff2).abs();
        if !(radicand > 0.0) {
            return Err(FluenceError::NonPositiveRadicand {
                region: m,
                family: "kappa",
                value: ej2 - eff2,
            });
        }
        kappa[i] = radicand.sqrt();
        w_kind[i] = if ej2 > eff2 { RadialPair::Modified } else { RadialPair::Standard };
    }
    let mut beta = [0.0; 4];
    for m in Material::ALL {
        let radicand = t2 - optics[m.index()].mu_eff.powi(2);
        if !(radicand > 0.0) {
            return Err(FluenceError::NonPositiveRadicand {
                region: m,
                family: "beta",
                value: radicand,
            });
        }
        beta[m.index()] = radicand.sqrt();
    }
    Ok(BranchFactors { kappa, w_kind, beta })
}

/// Solved fluence field.
#[derive(Debug, Clone, PartialEq)]
pub struct FluenceSolution {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    /// Per outer region (wall, pad, skin).
    pub b3: [f64; 3],
    pub b4: [f64; 3],
    pub b5: [f64; 3],
    pub b6: [f64; 3],
    /// Particular amplitude S0/(Dμ_t² − μ_a) [W/mm²].
    pub p_in: f64,
    pub branch: BranchFactors,
    pub src: SourceTerm,
    pub geo: Geometry,
    /// Derived optics of blood, wall, pad, skin.
    pub optics: [DerivedOptics; 4],
    pub normalization: Normalization,
    pub eff_report: SystemReport,
    pub t_report: SystemReport,
}

impl FluenceSolution {
    pub fn mu_eff(&self) -> f64 {
        self.optics[0].mu_eff
    }

    pub fn mu_t(&self) -> f64 {
        self.optics[0].mu_t
    }

    pub fn v(&self) -> f64 {
        self.src.v
    }

    /// Diffusion coefficient of the material at `r`.
    pub fn d_at(&self, region: RegionId) -> f64 {
        self.optics[region.material().index()].d
    }

    /// `(E, dE/dr)` of the μ_eff family in `region` at `r`.
    pub fn radial_eff(&self, region: RegionId, r: f64) -> (f64, f64) {
        match region {
            RegionId::FiberColumn | RegionId::BloodAnnulus => (self.b0, 0.0),
            _ => {
                let i = region.material().index() - 1;
                let (kappa, pair) = (self.branch.kappa[i], self.branch.w_kind[i]);
                let (f, g) = pair.values(kappa * r);
                let (df, dg) = pair.derivatives(kappa * r);
                (
                    self.b3[i] * f + self.b4[i] * g,
                    kappa * (self.b3[i] * df + self.b4[i] * dg),
                )
            }
        }
    }

    /// `(F, dF/dr)` of the μ_t family in `region` at `r`.
    pub fn radial_t(&self, region: RegionId, r: f64) -> (f64, f64) {
        let (beta, c1, c2) = match region {
            RegionId::FiberColumn => return (-self.p_in, 0.0),
            RegionId::BloodAnnulus => (self.branch.beta[0], self.b1, self.b2),
            _ => {
                let i = region.material().index();
                (self.branch.beta[i], self.b5[i - 1], self.b6[i - 1])
            }
        };
        let pair = RadialPair::Standard;
        let (f, g) = pair.values(beta * r);
        let (df, dg) = pair.derivatives(beta * r);
        (c1 * f + c2 * g, beta * (c1 * df + c2 * dg))
    }

    /// φ at radius `r` (region chosen by the outer-side rule) and ζ = z + vt.
    pub fn eval_zeta(&self, r: f64, zeta: f64) -> f64 {
        let region = region_of(r, &self.geo).unwrap_or(RegionId::Skin);
        self.eval_in(region, r, zeta)
    }

    /// φ using the closed form of a given region (useful at interfaces).
    pub fn eval_in(&self, region: RegionId, r: f64, zeta: f64) -> f64 {
        let (e, _) = self.radial_eff(region, r);
        let (f, _) = self.radial_t(region, r);
        e * (-self.mu_eff() * zeta).exp() + f * (-self.mu_t() * zeta).exp()
    }

    /// Radial flux D ∂φ/∂r using the closed form of `region`.
    pub fn flux_in(&self, region: RegionId, r: f64, zeta: f64) -> f64 {
        let (_, de) = self.radial_eff(region, r);
        let (_, df) = self.radial_t(region, r);
        self.d_at(region) * (de * (-self.mu_eff() * zeta).exp() + df * (-self.mu_t() * zeta).exp())
    }

    /// ∂φ/∂ζ (equivalently ∂φ/∂z) at `r`.
    pub fn dzeta(&self, r: f64, zeta: f64) -> f64 {
        let region = region_of(r, &self.geo).unwrap_or(RegionId::Skin);
        let (e, _) = self.radial_eff(region, r);
        let (f, _) = self.radial_t(region, r);
        -self.mu_eff() * e * (-self.mu_eff() * zeta).exp() - self.mu_t() * f * (-self.mu_t() * zeta).exp()
    }

    /// Checked evaluation on the illuminated segment −vt ≤ z ≤ L.
    pub fn eval(&self, r: f64, z: f64, t: f64) -> Result<f64, FluenceError> {
        let zeta = z + self.v() * t;
        let tol = 1e-12 * self.geo.l;
        let inside = r >= 0.0
            && r <= self.geo.r_s
            && zeta >= -tol
            && z <= self.geo.l + tol
            && t >= 0.0;
        if !inside {
            return Err(FluenceError::OutOfDomain { r, z, t });
        }
        Ok(self.eval_zeta(r, zeta.max(0.0)))
    }

    /// Largest relative value/flux jumps over the interfaces at the given ζ.
    pub fn continuity_residuals(&self, zetas: &[f64]) -> ContinuityReport {
        let geo = &self.geo;
        let pairs = [
            (geo.r_f, RegionId::FiberColumn, RegionId::BloodAnnulus),
            (geo.r_i, RegionId::BloodAnnulus, RegionId::Wall),
            (geo.r_w(), RegionId::Wall, RegionId::Pad),
            (geo.r_p, RegionId::Pad, RegionId::Skin),
        ];
        let mut report = ContinuityReport::default();
        for (k, (r, inner, outer)) in pairs.into_iter().enumerate() {
            for &zeta in zetas {
                let (a, b) = (self.eval_in(inner, r, zeta), self.eval_in(outer, r, zeta));
                let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
                report.value[k] = report.value[k].max((a - b).abs() / scale);
                let (fa, fb) = (self.flux_in(inner, r, zeta), self.flux_in(outer, r, zeta));
                // A vanishing flux is measured against D·|φ| per mm.
                let d_max = self.d_at(inner).max(self.d_at(outer));
                let fscale = fa.abs().max(fb.abs()).max(d_max * scale);
                report.flux[k] = report.flux[k].max((fa - fb).abs() / fscale);
            }
        }
        report
    }

    /// Coefficients as (family, region, name, value) rows.
    pub fn coefficient_rows(&self) -> Vec<(&'static str, &'static str, &'static str, f64)> {
        let mut rows = vec![
            ("mu_eff", "lumen", "B0", self.b0),
            ("mu_t", "fiber_column", "P_in", self.p_in),
            ("mu_t", "blood_annulus", "B1", self.b1),
            ("mu_t", "blood_annulus", "B2", self.b2),
        ];
        for (i, m) in Material::OUTER.into_iter().enumerate() {
            rows.push(("mu_eff", m.name(), "B3", self.b3[i]));
            rows.push(("mu_eff", m.name(), "B4", self.b4[i]));
        }
        for (i, m) in Material::OUTER.into_iter().enumerate() {
            rows.push(("mu_t", m.name(), "B5", self.b5[i]));
            rows.push(("mu_t", m.name(), "B6", self.b6[i]));
        }
        rows
    }
}

/// Interface jumps at r_f, r_i, r_i+eps, r_p.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ContinuityReport {
    pub value: [f64; 4],
    pub flux: [f64; 4],
}

impl ContinuityReport {
    pub fn max(&self) -> f64 {
        self.value.iter().chain(self.flux.iter()).fold(0.0, |a, b| a.max(*b))
    }
}

/// Tolerance of the post-solve continuity check.
pub const CONTINUITY_TOL: f64 = 1e-9;

/// Builds the source, branch factors and both coefficient systems.
pub fn assemble_and_solve(params: &ParamSet) -> Result<FluenceSolution, FluenceError> {
    params.validate()?;
    let optics = Material::ALL.map(|m| derive_optics(params.optics(m)));
    let blood = optics[0];
    let geo = params.geometry;
    let src = build_source(&params.protocol, &geo, &blood);
    let branch = branch_factors(&optics)?;
    let growth = blood.d * blood.mu_t * blood.mu_t - blood.mu_a;
    if !(growth > 0.0) {
        return Err(FluenceError::NonPositiveRadicand {
            region: Material::Blood,
            family: "D mu_t^2 - mu_a",
            value: growth,
        });
    }
    let p_in = src.s0 / growth;
    let b0 = match params.model.normalization {
        Normalization::TipMaximum => blood.mu_t * p_in / blood.mu_eff,
        Normalization::TipIrradiance => {
            params.protocol.p_laser / (PI * geo.r_f * geo.r_f) + p_in
        }
    };
    let (eff, eff_report) = systems::solve_eff(&geo, &optics, &branch, b0)?;
    let (tfam, t_report) = systems::solve_t(&geo, &optics, &branch, p_in)?;
    let sol = FluenceSolution {
        b0,
        b1: tfam[0],
        b2: tfam[1],
        b3: [eff[1], eff[3], eff[5]],
        b4: [eff[2], eff[4], eff[6]],
        b5: [tfam[2], tfam[4], tfam[6]],
        b6: [tfam[3], tfam[5], tfam[7]],
        p_in,
        branch,
        src,
        geo,
        optics,
        normalization: params.model.normalization,
        eff_report,
        t_report,
    };
    let check = sol.continuity_residuals(&[0.0]);
    if check.max() > CONTINUITY_TOL {
        return Err(FluenceError::Continuity(format!("{check:?}")));
    }
    log::debug!(
        "fluence systems solved: cond(mu_eff) = {:e}, cond(mu_t) = {:e}",
        eff_report.condition,
        t_report.condition
    );
    Ok(sol)
}

/// φ at (r, z, t); see [`FluenceSolution::eval`].
pub fn eval_fluence(sol: &FluenceSolution, r: f64, z: f64, t: f64) -> Result<f64, FluenceError> {
    sol.eval(r, z, t)
}

/// Growth rate ζ = ν(Dμ_t² − μ_a) of the transient column solution [1/ps].
pub fn transient_rate(blood: &DerivedOptics) -> f64 {
    blood.nu * (blood.d * blood.mu_t * blood.mu_t - blood.mu_a)
}

/// Transient fluence in the fiber column, with time in picoseconds.
///
/// φ_ν = ν S(r_f, z, 0)/(ζ + μ_t v) · e^{ζt} (1 − e^{−(ζ + μ_t v)t}).
pub fn eval_fluence_transient(src: &SourceTerm, blood: &DerivedOptics, z: f64, t_ps: f64) -> f64 {
    let zeta = transient_rate(blood);
    let v_ps = src.v * 1e-12;
    let rate = zeta + src.mu_t * v_ps;
    let s = src.s0 * (-src.mu_t * z).exp();
    blood.nu * s / rate * (zeta * t_ps).exp() * -(-rate * t_ps).exp_m1()
}
