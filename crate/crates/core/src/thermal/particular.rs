//! Duhamel particular terms driven by `q = μ_a φ`.
//!
//! Every fluence component `R(r) e^{−μ(z+vt)}` whose Laplacian eigenvalue
//! is κ² (`ΔR e^{−μz} = κ² R e^{−μz}`) produces a temperature term
//! `μ_a R e^{−μz} (e^{ρ t} − e^{−μvt}) / den`. In the lumen ρ and `den` are
//! the growth rates and denominators ζ₁, ζ₂, ζ₃ of the closed form; in the
//! tissue layers they depend on the selected [`RateReading`].

use crate::fluence::FluenceSolution;
use crate::params::{Material, ParamSet, RateReading, RegionId};

/// `(e^{x} − 1)/x`, stable near zero.
fn phi1(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + 0.5 * x
    } else {
        x.exp_m1() / x
    }
}

/// Rate and denominator pair of one exponential family in one region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyRate {
    /// Growth rate of the `e^{rate·t}` branch [1/s].
    pub rate: f64,
    /// Denominator [W/(mm³·°C)]; `None` marks the exact Duhamel form,
    /// whose denominator is ρc(rate + μv).
    pub den: Option<f64>,
}

/// Rates of the tissue-layer terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterRates {
    pub material: Material,
    /// (k μ_eff,j² − c_b ω)/(ρ c_p) [1/s].
    pub lambda: f64,
    pub rho_c: f64,
    pub mu_a: f64,
    pub eff: FamilyRate,
    pub t: FamilyRate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticularTerms {
    /// k μ_eff²/(ρ_b c_b) + u μ_eff.
    pub zeta1: f64,
    /// k μ_t²/(ρ_b c_b) + u μ_t.
    pub zeta2: f64,
    /// k μ_eff²/(ρ_b c_b) + u μ_t.
    pub zeta3: f64,
    pub rho_c_b: f64,
    pub mu_a_b: f64,
    pub reading: RateReading,
    pub outer: [OuterRates; 3],
    pub fluence: FluenceSolution,
}

/// One term `amp · (e^{rate t − μ z} − e^{−μ(z+vt)}) / den`.
fn term(amp: f64, mu: f64, v: f64, z: f64, t: f64, fam: FamilyRate, rho_c: f64) -> f64 {
    if amp == 0.0 || t == 0.0 {
        return 0.0;
    }
    let base = -mu * (z + v * t);
    let x = (fam.rate + mu * v) * t;
    match fam.den {
        // ρc(rate + μv) in the denominator: t·e^{base}·φ1(x)/ρc.
        None => {
            if x < 500.0 {
                amp * t * base.exp() * phi1(x) / rho_c
            } else {
                amp * ((fam.rate * t - mu * z).exp() - base.exp()) / (rho_c * (fam.rate + mu * v))
            }
        }
        Some(den) => {
            let bracket = if x < 500.0 {
                base.exp() * x.exp_m1()
            } else {
                (fam.rate * t - mu * z).exp() - base.exp()
            };
            amp * bracket / den
        }
    }
}

/// Relative size below which a printed denominator counts as degenerate;
/// such a region falls back to the exact Duhamel form, whose
/// denominator ρc(λ + μv) stays away from zero.
const DEGENERATE: f64 = 1e-12;

pub fn particular_terms(fluence: &FluenceSolution, params: &ParamSet) -> ParticularTerms {
    let blood = params.thermal(Material::Blood);
    let rho_c_b = blood.capacity();
    let c_b = blood.c_p;
    let u = params.protocol.u;
    let (mu_eff, mu_t) = (fluence.mu_eff(), fluence.mu_t());
    let reading = params.model.rate_reading;
    let mut outer = [None; 3];
    for (i, m) in Material::OUTER.into_iter().enumerate() {
        let th = params.thermal(m);
        let mu_eff_j = fluence.optics[m.index()].mu_eff;
        let num = th.k * mu_eff_j * mu_eff_j - c_b * th.omega;
        let rho_c = th.capacity();
        let lambda = num / rho_c;
        let scale = (th.k * mu_eff_j * mu_eff_j).max(c_b * th.omega);
        let (eff, t) = match reading {
            RateReading::Duhamel => (
                FamilyRate { rate: lambda, den: None },
                FamilyRate { rate: lambda, den: None },
            ),
            RateReading::LinearRate | RateReading::PrintedSqrt if num.abs() <= DEGENERATE * scale => {
                log::warn!("k mu_eff^2 = c_b omega in {m}: using the limit form");
                (
                    FamilyRate { rate: lambda, den: None },
                    FamilyRate { rate: lambda, den: None },
                )
            }
            RateReading::LinearRate | RateReading::PrintedSqrt => {
                let rate = if reading == RateReading::PrintedSqrt && lambda >= 0.0 {
                    lambda.sqrt()
                } else {
                    lambda
                };
                let f = FamilyRate { rate, den: Some(num) };
                (f, f)
            }
        };
        outer[i] = Some(OuterRates {
            material: m,
            lambda,
            rho_c,
            mu_a: fluence.optics[m.index()].mu_a,
            eff,
            t,
        });
    }
    ParticularTerms {
        zeta1: blood.k * mu_eff * mu_eff / rho_c_b + u * mu_eff,
        zeta2: blood.k * mu_t * mu_t / rho_c_b + u * mu_t,
        zeta3: blood.k * mu_eff * mu_eff / rho_c_b + u * mu_t,
        rho_c_b,
        mu_a_b: fluence.optics[0].mu_a,
        reading,
        outer: outer.map(|o| o.expect("filled for every layer")),
        fluence: fluence.clone(),
    }
}

impl ParticularTerms {
    /// Sum of the particular terms in `region` at (r, z, t) [°C].
    pub fn eval_in(&self, region: RegionId, r: f64, z: f64, t: f64) -> f64 {
        let fl = &self.fluence;
        let (e, _) = fl.radial_eff(region, r);
        let (f, _) = fl.radial_t(region, r);
        self.eval_radial(region, e, f, z, t)
    }

    /// As [`eval_in`](Self::eval_in) with the radial factors E(r), F(r)
    /// already evaluated.
    pub fn eval_radial(&self, region: RegionId, e: f64, f: f64, z: f64, t: f64) -> f64 {
        let fl = &self.fluence;
        let (mu_eff, mu_t, v) = (fl.mu_eff(), fl.mu_t(), fl.v());
        match region {
            RegionId::FiberColumn | RegionId::BloodAnnulus => {
                let a = self.mu_a_b;
                let z1 = FamilyRate { rate: self.zeta1, den: None };
                let zt = FamilyRate {
                    rate: if region == RegionId::FiberColumn { self.zeta2 } else { self.zeta3 },
                    den: None,
                };
                term(a * e, mu_eff, v, z, t, z1, self.rho_c_b) + term(a * f, mu_t, v, z, t, zt, self.rho_c_b)
            }
            _ => {
                let o = &self.outer[region.material().index() - 1];
                term(o.mu_a * e, mu_eff, v, z, t, o.eff, o.rho_c) + term(o.mu_a * f, mu_t, v, z, t, o.t, o.rho_c)
            }
        }
    }
}
