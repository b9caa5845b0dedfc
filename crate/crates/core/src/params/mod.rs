//! Physical constants, material tables, geometry and protocol.
//!
//! Internal units: lengths in mm, times in s, temperatures in °C, power in W.
//! Thermal tables are stored per mm (k in W/(mm·°C), ρ in kg/mm³,
//! ω in kg/(mm³·s)).

mod config;
mod registry;

pub use config::{load_config, load_config_str, parse_config};
pub use registry::{
    optics_table, preset, registry_rows, thermal_table, RegistryRow, PRESET_NAMES,
};

use std::fmt;
use thiserror::Error;

/// Universal gas constant [J/(mol·K)].
pub const R_GAS: f64 = 8.314;
/// Vacuum speed of light [mm/ps].
pub const C_LIGHT: f64 = 0.3;
/// Refractive index used for blood and tissue.
pub const N_DEFAULT: f64 = 1.4;
/// Offset from °C to K.
pub const KELVIN_OFFSET: f64 = 273.15;

/// Default anisotropy of blood (not tabulated; user-visible assumption).
pub const G_BLOOD_DEFAULT: f64 = 0.99;
/// Default anisotropy of wall, pad and skin (not tabulated).
pub const G_TISSUE_DEFAULT: f64 = 0.9;
/// Default skin heat-transfer coefficient [W/(mm²·°C)], about 10 W/(m²·K).
pub const H_AIR_DEFAULT: f64 = 1e-5;
/// Default room temperature [°C].
pub const T_AIR_DEFAULT: f64 = 20.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("no tabulated optics for wavelength {0} nm and no explicit coefficients given")]
    UnknownWavelength(u32),
    #[error("unknown preset '{name}' (available: {available})")]
    UnknownPreset { name: String, available: String },
    #[error("radius {r} mm lies outside [0, {r_s}] mm")]
    OutOfDomain { r: f64, r_s: f64 },
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

/// The four materials of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Material {
    Blood,
    Wall,
    Pad,
    Skin,
}

impl Material {
    pub const ALL: [Material; 4] = [Material::Blood, Material::Wall, Material::Pad, Material::Skin];
    /// The three tissue layers outside the lumen.
    pub const OUTER: [Material; 3] = [Material::Wall, Material::Pad, Material::Skin];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Material::Blood => "blood",
            Material::Wall => "wall",
            Material::Pad => "pad",
            Material::Skin => "skin",
        }
    }

    pub fn from_name(s: &str) -> Option<Material> {
        Material::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl fmt::Display for Material {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Radial regions; the lumen is split at the fiber radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionId {
    FiberColumn,
    BloodAnnulus,
    Wall,
    Pad,
    Skin,
}

impl RegionId {
    pub const ALL: [RegionId; 5] = [
        RegionId::FiberColumn,
        RegionId::BloodAnnulus,
        RegionId::Wall,
        RegionId::Pad,
        RegionId::Skin,
    ];

    pub fn material(self) -> Material {
        match self {
            RegionId::FiberColumn | RegionId::BloodAnnulus => Material::Blood,
            RegionId::Wall => Material::Wall,
            RegionId::Pad => Material::Pad,
            RegionId::Skin => Material::Skin,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RegionId::FiberColumn => "fiber_column",
            RegionId::BloodAnnulus => "blood_annulus",
            RegionId::Wall => "wall",
            RegionId::Pad => "pad",
            RegionId::Skin => "skin",
        }
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tabulated laser wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wavelength {
    Nm810,
    Nm980,
    Nm1064,
}

impl Wavelength {
    pub const ALL: [Wavelength; 3] = [Wavelength::Nm810, Wavelength::Nm980, Wavelength::Nm1064];

    pub fn nm(self) -> u32 {
        match self {
            Wavelength::Nm810 => 810,
            Wavelength::Nm980 => 980,
            Wavelength::Nm1064 => 1064,
        }
    }

    pub fn from_nm(nm: u32) -> Option<Wavelength> {
        Wavelength::ALL.into_iter().find(|w| w.nm() == nm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionOptics {
    /// Absorption coefficient [1/mm].
    pub mu_a: f64,
    /// Reduced scattering coefficient [1/mm].
    pub mu_s_reduced: f64,
    /// Scattering anisotropy.
    pub g: f64,
    /// Refractive index.
    pub n: f64,
}

impl RegionOptics {
    pub fn validate(&self, what: &str) -> Result<(), ParamError> {
        let ok = self.mu_a > 0.0
            && self.mu_s_reduced > 0.0
            && (0.0..1.0).contains(&self.g)
            && self.n >= 1.0;
        if ok {
            Ok(())
        } else {
            Err(ParamError::Invalid(format!(
                "{what} optics need mu_a > 0, mu_s_reduced > 0, 0 <= g < 1, n >= 1 (got {self:?})"
            )))
        }
    }
}

/// Optical coefficients derived from [`RegionOptics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedOptics {
    pub mu_a: f64,
    pub mu_s_reduced: f64,
    pub g: f64,
    /// Scattering coefficient [1/mm].
    pub mu_s: f64,
    /// Attenuation coefficient [1/mm].
    pub mu_t: f64,
    /// Diffusion coefficient [mm].
    pub d: f64,
    /// Effective attenuation coefficient [1/mm].
    pub mu_eff: f64,
    /// Speed of light in the medium [mm/ps].
    pub nu: f64,
}

pub fn derive_optics(o: &RegionOptics) -> DerivedOptics {
    let mu_s = o.mu_s_reduced / (1.0 - o.g);
    let transport = o.mu_a + o.mu_s_reduced;
    DerivedOptics {
        mu_a: o.mu_a,
        mu_s_reduced: o.mu_s_reduced,
        g: o.g,
        mu_s,
        mu_t: o.mu_a + mu_s,
        d: 1.0 / (3.0 * transport),
        mu_eff: (3.0 * o.mu_a * transport).sqrt(),
        nu: C_LIGHT / o.n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionThermal {
    /// Conductivity [W/(mm·°C)].
    pub k: f64,
    /// Density [kg/mm³].
    pub rho: f64,
    /// Specific heat [J/(kg·°C)].
    pub c_p: f64,
    /// Perfusion [kg/(mm³·s)].
    pub omega: f64,
    /// Arrhenius frequency factor [1/s].
    pub a_freq: f64,
    /// Activation energy [J/mol].
    pub e_a: f64,
}

impl RegionThermal {
    /// Volumetric heat capacity ρc_p [J/(mm³·°C)].
    pub fn capacity(&self) -> f64 {
        self.rho * self.c_p
    }

    pub fn validate(&self, what: &str) -> Result<(), ParamError> {
        let ok = self.k > 0.0
            && self.rho > 0.0
            && self.c_p > 0.0
            && self.omega >= 0.0
            && self.a_freq > 0.0
            && self.e_a > 0.0;
        if ok {
            Ok(())
        } else {
            Err(ParamError::Invalid(format!(
                "{what} thermal parameters must be positive (omega may be 0), got {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Fiber radius [mm].
    pub r_f: f64,
    /// Lumen radius [mm].
    pub r_i: f64,
    /// Wall thickness [mm].
    pub eps: f64,
    /// Pad outer radius [mm].
    pub r_p: f64,
    /// Skin outer radius [mm].
    pub r_s: f64,
    /// Half-length of the treated segment [mm].
    pub l: f64,
}

impl Geometry {
    /// Pad 10 mm thick, skin 3 mm thick, wall a fifth of the lumen radius.
    pub fn from_lumen(r_f: f64, r_i: f64, l: f64) -> Geometry {
        let eps = r_i / 5.0;
        let r_p = r_i + eps + 10.0;
        Geometry {
            r_f,
            r_i,
            eps,
            r_p,
            r_s: r_p + 3.0,
            l,
        }
    }

    /// Outer wall radius.
    pub fn r_w(&self) -> f64 {
        self.r_i + self.eps
    }

    /// Interface radii from the fiber outward.
    pub fn interfaces(&self) -> [f64; 4] {
        [self.r_f, self.r_i, self.r_w(), self.r_p]
    }

    /// Inner and outer radius of a region.
    pub fn bounds(&self, region: RegionId) -> (f64, f64) {
        match region {
            RegionId::FiberColumn => (0.0, self.r_f),
            RegionId::BloodAnnulus => (self.r_f, self.r_i),
            RegionId::Wall => (self.r_i, self.r_w()),
            RegionId::Pad => (self.r_w(), self.r_p),
            RegionId::Skin => (self.r_p, self.r_s),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let ok = 0.0 < self.r_f
            && self.r_f < self.r_i
            && self.eps > 0.0
            && self.r_w() < self.r_p
            && self.r_p < self.r_s
            && self.l > 0.0;
        if ok {
            Ok(())
        } else {
            Err(ParamError::Invalid(format!(
                "geometry needs 0 < r_f < r_i < r_i + eps < r_p < r_s and L > 0, got {self:?}"
            )))
        }
    }
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry::from_lumen(0.3, 3.75, 10.0)
    }
}

/// Region containing radius `r`; interface points belong to the outer side.
pub fn region_of(r: f64, geo: &Geometry) -> Result<RegionId, ParamError> {
    if !(r >= 0.0 && r <= geo.r_s) {
        return Err(ParamError::OutOfDomain { r, r_s: geo.r_s });
    }
    Ok(if r < geo.r_f {
        RegionId::FiberColumn
    } else if r < geo.r_i {
        RegionId::BloodAnnulus
    } else if r < geo.r_w() {
        RegionId::Wall
    } else if r < geo.r_p {
        RegionId::Pad
    } else {
        RegionId::Skin
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Protocol {
    /// Laser power [W].
    pub p_laser: f64,
    pub wavelength: u32,
    /// Pull-back velocity [mm/s].
    pub v: f64,
    /// Irradiation time [s].
    pub t_end: f64,
    /// Axial blood velocity [mm/s].
    pub u: f64,
    /// Blood temperature [°C].
    pub t_b: f64,
    /// Room temperature [°C].
    pub t_air: f64,
    /// Skin heat-transfer coefficient [W/(mm²·°C)].
    pub h_air: f64,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            p_laser: 15.0,
            wavelength: 810,
            v: 1.0,
            t_end: 10.0,
            u: 0.0,
            t_b: 38.0,
            t_air: T_AIR_DEFAULT,
            h_air: H_AIR_DEFAULT,
        }
    }
}

impl Protocol {
    pub fn validate(&self, geo: &Geometry) -> Result<(), ParamError> {
        let mut problems = Vec::new();
        if !(self.p_laser > 0.0) {
            problems.push("P_laser > 0");
        }
        if !(self.v >= 0.0) {
            problems.push("v >= 0");
        }
        if !(self.t_end > 0.0) {
            problems.push("t_end > 0");
        }
        if !(self.u >= 0.0) {
            problems.push("u >= 0");
        }
        if !(self.t_air < self.t_b) {
            problems.push("T_air < T_b");
        }
        if !(self.h_air >= 0.0) {
            problems.push("h_air >= 0");
        }
        if self.v * self.t_end > geo.l * (1.0 + 1e-12) {
            problems.push("v * t_end <= L (the tip stays inside the segment)");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ParamError::Invalid(format!("protocol violates {}", problems.join(", "))))
        }
    }

    /// Blood flow case: 1 for stagnant blood, 2 for flowing.
    pub fn case(&self) -> u8 {
        if self.u == 0.0 {
            1
        } else {
            2
        }
    }
}

/// How the free amplitude B0 of the diffuse fluence family is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// ∂φ/∂z = 0 on the axis at the tip, so the axial maximum sits under it.
    TipMaximum,
    /// On-axis fluence at the tip equals the bare-fiber irradiance P/(π r_f²).
    TipIrradiance,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::TipMaximum => "tip_maximum",
            Normalization::TipIrradiance => "tip_irradiance",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "tip_maximum" => Some(Normalization::TipMaximum),
            "tip_irradiance" => Some(Normalization::TipIrradiance),
            _ => None,
        }
    }
}

/// Reading of the outer-region particular-term rate in the temperature field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateReading {
    /// λ = (k μ_eff² − c_b ω)/(ρ c_p) with the printed denominator k μ_eff² − c_b ω.
    LinearRate,
    /// √λ when λ ≥ 0, otherwise λ itself, with the printed denominator.
    PrintedSqrt,
    /// Exact Duhamel convolution of the moving exponential source.
    Duhamel,
}

impl RateReading {
    pub const ALL: [RateReading; 3] =
        [RateReading::LinearRate, RateReading::PrintedSqrt, RateReading::Duhamel];

    pub fn name(self) -> &'static str {
        match self {
            RateReading::LinearRate => "linear",
            RateReading::PrintedSqrt => "printed_sqrt",
            RateReading::Duhamel => "duhamel",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        RateReading::ALL.into_iter().find(|r| r.name() == s)
    }
}

/// Modelling switches that are not physical inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOptions {
    pub normalization: Normalization,
    pub rate_reading: RateReading,
    /// Number of radial modes kept in the modal series.
    pub modes: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            normalization: Normalization::TipMaximum,
            rate_reading: RateReading::LinearRate,
            modes: 20,
        }
    }
}

/// A fully validated parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    pub geometry: Geometry,
    pub protocol: Protocol,
    pub optics: [RegionOptics; 4],
    pub thermal: [RegionThermal; 4],
    pub model: ModelOptions,
}

impl ParamSet {
    /// Tabulated materials for the protocol's wavelength.
    pub fn tabulated(geometry: Geometry, protocol: Protocol) -> Result<ParamSet, ParamError> {
        let wl = Wavelength::from_nm(protocol.wavelength)
            .ok_or(ParamError::UnknownWavelength(protocol.wavelength))?;
        let set = ParamSet {
            geometry,
            protocol,
            optics: Material::ALL.map(|m| optics_table(wl, m)),
            thermal: Material::ALL.map(thermal_table),
            model: ModelOptions::default(),
        };
        set.validate()?;
        Ok(set)
    }

    pub fn optics(&self, m: Material) -> &RegionOptics {
        &self.optics[m.index()]
    }

    pub fn derived(&self, m: Material) -> DerivedOptics {
        derive_optics(self.optics(m))
    }

    pub fn thermal(&self, m: Material) -> &RegionThermal {
        &self.thermal[m.index()]
    }

    /// Copy with a different laser power.
    pub fn with_power(&self, p_laser: f64) -> ParamSet {
        let mut s = self.clone();
        s.protocol.p_laser = p_laser;
        s
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        self.geometry.validate()?;
        self.protocol.validate(&self.geometry)?;
        for m in Material::ALL {
            self.optics(m).validate(m.name())?;
            self.thermal(m).validate(m.name())?;
        }
        if self.thermal(Material::Blood).omega != 0.0 {
            return Err(ParamError::Invalid("blood perfusion must be 0".into()));
        }
        if self.model.modes == 0 {
            return Err(ParamError::Invalid("modes must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for ParamSet {
    fn default() -> Self {
        ParamSet::tabulated(Geometry::default(), Protocol::default())
            .expect("built-in parameters are valid")
    }
}
