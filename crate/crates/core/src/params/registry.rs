//! Built-in optical and thermal tables, and the named scenario presets.

use super::{
    Geometry, Material, ParamError, ParamSet, Protocol, RegionOptics, RegionThermal, Wavelength,
    G_BLOOD_DEFAULT, G_TISSUE_DEFAULT, H_AIR_DEFAULT, N_DEFAULT,
};

/// (μ_a, μ_s') in 1/mm for blood, wall, pad, skin.
fn optics_row(wl: Wavelength) -> [(f64, f64); 4] {
    match wl {
        Wavelength::Nm810 => [(0.21, 0.73), (0.2, 2.4), (0.017, 1.2), (0.2, 0.9)],
        Wavelength::Nm980 => [(0.21, 0.6), (0.1, 2.0), (0.03, 1.0), (0.10, 0.81)],
        Wavelength::Nm1064 => [(0.12, 0.58), (0.12, 1.95), (0.034, 0.98), (0.10, 0.77)],
    }
}

/// Table values in their printed units:
/// k [W/(m·°C)], ρ [kg/m³], c_p [J/(kg·°C)], ω [kg/(m³·s)], A [1/s], E_a [J/mol].
pub(crate) fn thermal_row_si(m: Material) -> [f64; 6] {
    match m {
        Material::Blood => [0.52, 1060.0, 3600.0, 0.0, 7.6e66, 4.48e5],
        Material::Wall => [0.53, 1080.0, 3690.0, 1.08, 5.6e63, 4.30e5],
        Material::Pad => [0.21, 1000.0, 2350.0, 1.0, 5.6e63, 4.30e5],
        Material::Skin => [0.21, 1109.0, 3500.0, 0.5545, 3.1e98, 6.28e5],
    }
}

pub(crate) fn default_g(m: Material) -> f64 {
    if m == Material::Blood {
        G_BLOOD_DEFAULT
    } else {
        G_TISSUE_DEFAULT
    }
}

pub fn optics_table(wl: Wavelength, m: Material) -> RegionOptics {
    let (mu_a, mu_s_reduced) = optics_row(wl)[m.index()];
    RegionOptics {
        mu_a,
        mu_s_reduced,
        g: default_g(m),
        n: N_DEFAULT,
    }
}

/// Converts table units to the per-mm storage units.
pub(crate) fn thermal_from_si(si: [f64; 6]) -> RegionThermal {
    RegionThermal {
        k: si[0] / 1000.0,
        rho: si[1] * 1e-9,
        c_p: si[2],
        omega: si[3] * 1e-9,
        a_freq: si[4],
        e_a: si[5],
    }
}

pub fn thermal_table(m: Material) -> RegionThermal {
    thermal_from_si(thermal_row_si(m))
}

pub const PRESET_NAMES: [&str; 4] = ["810-15w", "980-15w", "980-10w", "1064-10w"];

/// Named scenario with default geometry and protocol (stagnant blood).
pub fn preset(name: &str) -> Result<ParamSet, ParamError> {
    let (wavelength, p_laser) = match name {
        "810-15w" => (810, 15.0),
        "980-15w" => (980, 15.0),
        "980-10w" => (980, 10.0),
        "1064-10w" => (1064, 10.0),
        _ => {
            return Err(ParamError::UnknownPreset {
                name: name.to_string(),
                available: PRESET_NAMES.join(", "),
            })
        }
    };
    let protocol = Protocol {
        p_laser,
        wavelength,
        ..Protocol::default()
    };
    ParamSet::tabulated(Geometry::default(), protocol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegistryRow {
    pub region: &'static str,
    /// Empty for wavelength-independent entries.
    pub wavelength: String,
    pub key: &'static str,
    pub value: f64,
    pub unit: &'static str,
    /// `tabulated` for published values, `assumed` for defaults chosen here.
    pub provenance: &'static str,
}

/// Every built-in entry, in printed units.
pub fn registry_rows() -> Vec<RegistryRow> {
    let mut rows = Vec::new();
    for wl in Wavelength::ALL {
        for m in Material::ALL {
            let o = optics_table(wl, m);
            let w = wl.nm().to_string();
            let mut push = |key, value, unit, provenance| {
                rows.push(RegistryRow {
                    region: m.name(),
                    wavelength: w.clone(),
                    key,
                    value,
                    unit,
                    provenance,
                })
            };
            push("mu_a", o.mu_a, "1/mm", "tabulated");
            push("mu_s_reduced", o.mu_s_reduced, "1/mm", "tabulated");
            push("g", o.g, "1", "assumed");
            push("n", o.n, "1", "tabulated");
        }
    }
    const KEYS: [(&str, &str); 6] = [
        ("k", "W/(m*C)"),
        ("rho", "kg/m^3"),
        ("c_p", "J/(kg*C)"),
        ("omega", "kg/(m^3*s)"),
        ("A", "1/s"),
        ("E_a", "J/mol"),
    ];
    for m in Material::ALL {
        for ((key, unit), value) in KEYS.iter().zip(thermal_row_si(m)) {
            rows.push(RegistryRow {
                region: m.name(),
                wavelength: String::new(),
                key,
                value,
                unit,
                provenance: "tabulated",
            });
        }
    }
    rows.push(RegistryRow {
        region: "skin",
        wavelength: String::new(),
        key: "h_air",
        value: H_AIR_DEFAULT,
        unit: "W/(mm^2*C)",
        provenance: "assumed",
    });
    rows
}
