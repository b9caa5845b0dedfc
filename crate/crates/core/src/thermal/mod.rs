//! Analytic temperature field.
//!
//! `T = T_b + particular terms + steady offset + Σ modal terms`. The
//! particular terms follow the fluence families through the Duhamel
//! principle; the offset carries the Newton cooling at the skin; the modal
//! series cancels the offset at t = 0 so that the field starts at T_b.

mod modal;
mod offset;
mod particular;

pub use modal::{
    beta_squared, eval_z_case1, eval_z_general, layer_quadrature, modal_eigenvalues, project_initial, Layer,
    Mode, RadialShape, PROJECTION_PANELS, SCAN_STEP,
};
pub use offset::{steady_robin_offset, SteadyOffset};
pub use particular::{particular_terms, FamilyRate, OuterRates, ParticularTerms};

use crate::fluence::{assemble_and_solve, FluenceError};
use crate::params::{region_of, Material, ParamError, ParamSet, RegionId};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermalError {
    #[error("found {found} of {wanted} modes above rate {zeta_lo}")]
    BracketExhausted { found: usize, wanted: usize, zeta_lo: f64 },
    #[error("singular projection or offset system")]
    RankDeficient,
    #[error("point (r = {r}, z = {z}, t = {t}) is outside the domain")]
    OutOfDomain { r: f64, z: f64, t: f64 },
    #[error(transparent)]
    Fluence(#[from] FluenceError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Coefficients of `α ∂υ/∂t + b ∂υ/∂z − a Δυ + B υ = f` in one region,
/// with `f = μ_a φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericPDEParams {
    /// ρ c_p [J/(mm³·°C)].
    pub alpha: f64,
    /// k [W/(mm·°C)].
    pub a: f64,
    /// ρ_b c_b u in the lumen, 0 elsewhere [J/(mm²·s·°C)].
    pub b: f64,
    /// c_b ω outside the lumen, 0 in it [W/(mm³·°C)].
    pub big_b: f64,
    /// Absorption coefficient multiplying φ in the forcing [1/mm].
    pub mu_a: f64,
}

pub fn generic_params(params: &ParamSet, region: RegionId) -> GenericPDEParams {
    let m = region.material();
    let th = params.thermal(m);
    let blood = params.thermal(Material::Blood);
    let lumen = m == Material::Blood;
    GenericPDEParams {
        alpha: th.capacity(),
        a: th.k,
        b: if lumen { blood.capacity() * params.protocol.u } else { 0.0 },
        big_b: if lumen { 0.0 } else { blood.c_p * th.omega },
        mu_a: params.optics(m).mu_a,
    }
}

/// Wall, pad and skin layers with their coefficients.
pub fn tissue_layers(params: &ParamSet) -> [Layer; 3] {
    let geo = &params.geometry;
    [RegionId::Wall, RegionId::Pad, RegionId::Skin].map(|id| {
        let (lo, hi) = geo.bounds(id);
        Layer {
            lo,
            hi,
            coef: generic_params(params, id),
        }
    })
}

/// Initial lower bound of the rate scan; doubled until enough modes fit.
const ZETA_LO_START: f64 = -4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureSolution {
    pub particular: ParticularTerms,
    /// Empty when the modal correction is disabled (flowing blood).
    pub modes: Vec<Mode>,
    pub offset: SteadyOffset,
    pub layers: [Layer; 3],
    pub t_b: f64,
    pub t_air: f64,
    pub h_air: f64,
    pub t_end: f64,
    /// Weighted L² misfit left by the projection.
    pub projection_misfit: f64,
}

/// Builds the full temperature solution. With flowing blood only the
/// particular terms are kept.
pub fn build_temperature(params: &ParamSet) -> Result<TemperatureSolution, ThermalError> {
    let fluence = assemble_and_solve(params)?;
    let particular = particular_terms(&fluence, params);
    let proto = &params.protocol;
    let layers = tissue_layers(params);
    let stagnant = proto.u == 0.0;
    let mut offset = steady_robin_offset(&layers, proto.h_air, proto.t_air, proto.t_b)?;
    let mut modes = Vec::new();
    let mut misfit = 0.0;
    if stagnant {
        let n = params.model.modes;
        let mut zeta_lo = ZETA_LO_START;
        modes = loop {
            match modal_eigenvalues(&layers, proto.h_air, 0, 0.0, zeta_lo, n) {
                Ok(m) => break m,
                Err(ThermalError::BracketExhausted { .. }) if zeta_lo > -1e6 => zeta_lo *= 2.0,
                Err(e) => return Err(e),
            }
        };
        let off = offset;
        misfit = project_initial(&mut modes, &layers, &|r| -off.eval(r).0)?;
    } else {
        log::warn!("flowing blood: modal correction and skin offset are not included");
        offset = steady_robin_offset(&layers, proto.h_air, proto.t_b, proto.t_b)?;
    }
    Ok(TemperatureSolution {
        particular,
        modes,
        offset,
        layers,
        t_b: proto.t_b,
        t_air: proto.t_air,
        h_air: proto.h_air,
        t_end: proto.t_end,
        projection_misfit: misfit,
    })
}

/// Contributions to T − T_b at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureParts {
    pub particular: f64,
    pub offset: f64,
    pub modal: f64,
}

impl TemperatureParts {
    pub fn total(&self) -> f64 {
        self.particular + self.offset + self.modal
    }
}

impl TemperatureSolution {
    pub fn geometry(&self) -> &crate::params::Geometry {
        &self.particular.fluence.geo
    }

    /// Σ modal terms at (r, z, t); the retained modes are axially uniform.
    pub fn modal(&self, r: f64, z: f64, t: f64) -> f64 {
        let l = self.geometry().l;
        self.modes
            .iter()
            .map(|m| m.amplitude * m.radial(&self.layers, r).0 * eval_z_case1(m.eta, l, z) * (m.zeta * t).exp())
            .sum()
    }

    /// r-derivative of the offset plus modal part.
    pub fn homogeneous_slope(&self, r: f64, t: f64) -> f64 {
        let modal: f64 = self
            .modes
            .iter()
            .map(|m| m.amplitude * m.radial(&self.layers, r).1 * (m.zeta * t).exp())
            .sum();
        self.offset.eval(r).1 + modal
    }

    /// Parts of T − T_b using the closed form of `region`.
    pub fn parts_in(&self, region: RegionId, r: f64, z: f64, t: f64) -> TemperatureParts {
        let particular = self.particular.eval_in(region, r, z, t);
        if region.material() == Material::Blood {
            return TemperatureParts {
                particular,
                offset: 0.0,
                modal: 0.0,
            };
        }
        TemperatureParts {
            particular,
            offset: self.offset.eval(r).0,
            modal: self.modal(r, z, t),
        }
    }

    /// Checked evaluation on r ∈ [0, r_s], z ∈ [−L, L], t ∈ [0, t_end].
    pub fn eval(&self, r: f64, z: f64, t: f64) -> Result<f64, ThermalError> {
        let geo = self.geometry();
        let tol = 1e-12 * geo.l.max(self.t_end);
        let inside = z.abs() <= geo.l + tol
            && (0.0..=geo.r_s).contains(&r)
            && t >= -tol
            && t <= self.t_end + tol;
        if !inside {
            return Err(ThermalError::OutOfDomain { r, z, t });
        }
        let region = region_of(r, geo)?;
        Ok(self.t_b + self.parts_in(region, r, z, t.max(0.0)).total())
    }

    /// Spatial factors at (r, z), so that T(t) there costs only exponentials.
    pub fn at_point(&self, r: f64, z: f64) -> Result<PointHistory<'_>, ThermalError> {
        self.eval(r, z, 0.0)?;
        let region = region_of(r, self.geometry())?;
        let fl = &self.particular.fluence;
        let (e, _) = fl.radial_eff(region, r);
        let (f, _) = fl.radial_t(region, r);
        let tissue = region.material() != Material::Blood;
        let l = self.geometry().l;
        let modes = if tissue {
            self.modes
                .iter()
                .map(|m| (m.amplitude * m.radial(&self.layers, r).0 * eval_z_case1(m.eta, l, z), m.zeta))
                .collect()
        } else {
            Vec::new()
        };
        Ok(PointHistory {
            sol: self,
            region,
            z,
            e,
            f,
            offset: if tissue { self.offset.eval(r).0 } else { 0.0 },
            modes,
        })
    }

    /// Mode table rows: (m, ζ, β1 per layer, printed amplitudes, branch letters).
    pub fn mode_rows(&self) -> Vec<ModeRow> {
        let r_i = self.layers[0].lo;
        self.modes
            .iter()
            .map(|m| {
                let kinds: String = m
                    .shapes
                    .iter()
                    .map(|s| match s.pair {
                        crate::specfn::RadialPair::Standard => 'S',
                        crate::specfn::RadialPair::Modified => 'M',
                    })
                    .collect();
                (m.m, m.zeta, m.beta1(), m.printed_amplitudes(r_i), kinds)
            })
            .collect()
    }
}

/// One mode table row; see [`TemperatureSolution::mode_rows`].
pub type ModeRow = (usize, f64, [f64; 3], [f64; 5], String);

/// Temperature history at one point; see [`TemperatureSolution::at_point`].
#[derive(Debug, Clone)]
pub struct PointHistory<'a> {
    sol: &'a TemperatureSolution,
    region: RegionId,
    z: f64,
    e: f64,
    f: f64,
    offset: f64,
    /// (spatial factor, rate) per mode.
    modes: Vec<(f64, f64)>,
}

impl PointHistory<'_> {
    /// T at time `t`, clamped to [0, t_end].
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.sol.t_end);
        let modal: f64 = self.modes.iter().map(|(c, zeta)| c * (zeta * t).exp()).sum();
        self.sol.t_b + self.sol.particular.eval_radial(self.region, self.e, self.f, self.z, t) + self.offset + modal
    }
}

/// T at (r, z, t); see [`TemperatureSolution::eval`].
pub fn eval_temperature(sol: &TemperatureSolution, r: f64, z: f64, t: f64) -> Result<f64, ThermalError> {
    sol.eval(r, z, t)
}
