//! Line-oriented `key = value` configuration with `[section]` headers.
//!
//! ```text
//! # comment
//! [geometry]
//! r_i = 3.75
//! [protocol]
//! wavelength = 980
//! P_laser = 10
//! [optical.blood]
//! g = 0.95
//! [thermal.skin]
//! k = 0.21        # W/(m*C), converted on load
//! [model]
//! normalization = tip_irradiance
//! ```
//!
//! Thermal entries use the tabulated SI units; everything else uses mm.

use super::registry::{default_g, optics_table, thermal_row_si, thermal_from_si};
use super::{
    Geometry, Material, ModelOptions, Normalization, ParamError, ParamSet, Protocol, RateReading,
    RegionOptics, Wavelength, N_DEFAULT,
};
use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Section {
    Geometry,
    Protocol,
    Optical(Material),
    Thermal(Material),
    Model,
}

const GEOMETRY_KEYS: &[&str] = &["r_f", "r_i", "eps", "r_p", "r_s", "L"];
const PROTOCOL_KEYS: &[&str] = &["P_laser", "wavelength", "v", "t_end", "u", "T_b", "T_air", "h_air"];
const OPTICAL_KEYS: &[&str] = &["mu_a", "mu_s_reduced", "g", "n"];
const THERMAL_KEYS: &[&str] = &["k", "rho", "c_p", "omega", "A", "E_a"];
const MODEL_KEYS: &[&str] = &["normalization", "rate_reading", "modes"];

fn parse_section(name: &str) -> Option<Section> {
    match name {
        "geometry" => return Some(Section::Geometry),
        "protocol" => return Some(Section::Protocol),
        "model" => return Some(Section::Model),
        _ => {}
    }
    let (kind, region) = name.split_once('.')?;
    let m = Material::from_name(region)?;
    match kind {
        "optical" => Some(Section::Optical(m)),
        "thermal" => Some(Section::Thermal(m)),
        _ => None,
    }
}

fn keys_of(s: Section) -> &'static [&'static str] {
    match s {
        Section::Geometry => GEOMETRY_KEYS,
        Section::Protocol => PROTOCOL_KEYS,
        Section::Optical(_) => OPTICAL_KEYS,
        Section::Thermal(_) => THERMAL_KEYS,
        Section::Model => MODEL_KEYS,
    }
}

/// Raw entries: (section, key) → (value text, line).
type Entries = HashMap<(Section, &'static str), (String, usize)>;

fn tokenize(text: &str) -> Result<Entries, ParamError> {
    let mut entries = Entries::new();
    let mut section: Option<Section> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ParamError::Parse {
                line,
                msg: format!("unterminated section header '{content}'"),
            })?;
            section = Some(parse_section(name.trim()).ok_or_else(|| ParamError::Parse {
                line,
                msg: format!("unknown section '{}'", name.trim()),
            })?);
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ParamError::Parse {
            line,
            msg: format!("expected 'key = value', got '{content}'"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.ok_or_else(|| ParamError::Parse {
            line,
            msg: format!("key '{key}' appears before any section header"),
        })?;
        let known = keys_of(sec).iter().find(|k| **k == key).ok_or_else(|| ParamError::Parse {
            line,
            msg: format!("unknown key '{key}' (expected one of {})", keys_of(sec).join(", ")),
        })?;
        if value.is_empty() {
            return Err(ParamError::Parse {
                line,
                msg: format!("key '{key}' has no value"),
            });
        }
        if let Some((_, first)) = entries.insert((sec, known), (value.to_string(), line)) {
            return Err(ParamError::Parse {
                line,
                msg: format!("duplicate key '{key}' (first set on line {first})"),
            });
        }
    }
    Ok(entries)
}

struct Reader<'a> {
    entries: &'a Entries,
}

impl Reader<'_> {
    fn raw(&self, s: Section, key: &'static str) -> Option<&(String, usize)> {
        self.entries.get(&(s, key))
    }

    fn num(&self, s: Section, key: &'static str) -> Result<Option<f64>, ParamError> {
        match self.raw(s, key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<f64>().map(Some).map_err(|_| ParamError::Parse {
                line: *line,
                msg: format!("'{v}' is not a number (key '{key}')"),
            }),
        }
    }

    fn num_or(&self, s: Section, key: &'static str, default: f64) -> Result<f64, ParamError> {
        Ok(self.num(s, key)?.unwrap_or(default))
    }
}

/// Parses configuration text on top of `base` (the defaults when `None`).
pub fn parse_config(text: &str, base: Option<&ParamSet>) -> Result<ParamSet, ParamError> {
    let entries = tokenize(text)?;
    let rd = Reader { entries: &entries };
    let (base_geo, base_proto, base_model) = match base {
        Some(b) => (b.geometry, b.protocol, b.model),
        None => (Geometry::default(), Protocol::default(), ModelOptions::default()),
    };

    let g = Section::Geometry;
    let r_f = rd.num_or(g, "r_f", base_geo.r_f)?;
    let r_i = rd.num_or(g, "r_i", base_geo.r_i)?;
    let eps = rd.num_or(g, "eps", r_i / 5.0)?;
    let r_p = rd.num_or(g, "r_p", r_i + eps + 10.0)?;
    let r_s = rd.num_or(g, "r_s", r_p + 3.0)?;
    let l = rd.num_or(g, "L", base_geo.l)?;
    let geometry = Geometry { r_f, r_i, eps, r_p, r_s, l };

    let p = Section::Protocol;
    let wavelength = match rd.raw(p, "wavelength") {
        None => base_proto.wavelength,
        Some((v, line)) => v.parse::<u32>().map_err(|_| ParamError::Parse {
            line: *line,
            msg: format!("wavelength must be a positive integer in nm, got '{v}'"),
        })?,
    };
    let protocol = Protocol {
        p_laser: rd.num_or(p, "P_laser", base_proto.p_laser)?,
        wavelength,
        v: rd.num_or(p, "v", base_proto.v)?,
        t_end: rd.num_or(p, "t_end", base_proto.t_end)?,
        u: rd.num_or(p, "u", base_proto.u)?,
        t_b: rd.num_or(p, "T_b", base_proto.t_b)?,
        t_air: rd.num_or(p, "T_air", base_proto.t_air)?,
        h_air: rd.num_or(p, "h_air", base_proto.h_air)?,
    };

    let wl = Wavelength::from_nm(wavelength);
    let mut optics = [RegionOptics { mu_a: 0.0, mu_s_reduced: 0.0, g: 0.0, n: 0.0 }; 4];
    for m in Material::ALL {
        let s = Section::Optical(m);
        let mu_a = rd.num(s, "mu_a")?;
        let mu_s_reduced = rd.num(s, "mu_s_reduced")?;
        let table = match (mu_a, mu_s_reduced, wl) {
            (Some(_), Some(_), _) => None,
            (_, _, Some(w)) => Some(optics_table(w, m)),
            _ => return Err(ParamError::UnknownWavelength(wavelength)),
        };
        optics[m.index()] = RegionOptics {
            mu_a: mu_a.or(table.map(|t| t.mu_a)).unwrap_or_default(),
            mu_s_reduced: mu_s_reduced.or(table.map(|t| t.mu_s_reduced)).unwrap_or_default(),
            g: rd.num_or(s, "g", default_g(m))?,
            n: rd.num_or(s, "n", N_DEFAULT)?,
        };
    }

    let mut thermal = Material::ALL.map(|m| thermal_from_si(thermal_row_si(m)));
    for m in Material::ALL {
        let s = Section::Thermal(m);
        let mut si = thermal_row_si(m);
        for (i, key) in THERMAL_KEYS.iter().enumerate() {
            if let Some(v) = rd.num(s, key)? {
                si[i] = v;
            }
        }
        thermal[m.index()] = thermal_from_si(si);
    }

    let md = Section::Model;
    let mut model = base_model;
    if let Some((v, line)) = rd.raw(md, "normalization") {
        model.normalization = Normalization::from_name(v).ok_or_else(|| ParamError::Parse {
            line: *line,
            msg: format!("normalization must be tip_maximum or tip_irradiance, got '{v}'"),
        })?;
    }
    if let Some((v, line)) = rd.raw(md, "rate_reading") {
        model.rate_reading = RateReading::from_name(v).ok_or_else(|| ParamError::Parse {
            line: *line,
            msg: format!("rate_reading must be linear, printed_sqrt or duhamel, got '{v}'"),
        })?;
    }
    if let Some((v, line)) = rd.raw(md, "modes") {
        model.modes = v.parse().map_err(|_| ParamError::Parse {
            line: *line,
            msg: format!("modes must be a non-negative integer, got '{v}'"),
        })?;
    }

    let set = ParamSet { geometry, protocol, optics, thermal, model };
    set.validate()?;
    Ok(set)
}

/// Parses configuration text over the built-in defaults.
pub fn load_config_str(text: &str) -> Result<ParamSet, ParamError> {
    parse_config(text, None)
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<ParamSet, ParamError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParamError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    load_config_str(&text)
}
