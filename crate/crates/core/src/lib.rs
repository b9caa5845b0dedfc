//! Analytic fluence, temperature and thermal-damage fields for endovenous
//! laser ablation in a layered cylinder (blood, vein wall, pad, skin), with
//! a finite-difference solver used as an independent reference.
//!
//! The usual entry points are [`params::preset`] or [`params::load_config`],
//! then [`fluence::assemble_and_solve`], [`thermal::build_temperature`] and
//! [`damage::damage_map`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod damage;
pub mod fdoracle;
pub mod fluence;
pub mod linalg;
pub mod params;
pub mod specfn;
pub mod thermal;
pub mod validation;

pub use damage::{DamageError, DamageParams, DamagePoint};
pub use fdoracle::{Boundaries, Boundary, FDField, FdError, Grid2D};
pub use fluence::{FluenceError, FluenceSolution};
pub use params::{Geometry, Material, ParamError, ParamSet, Protocol, RegionId};
pub use specfn::{BesselKind, RadialPair};
pub use thermal::{TemperatureSolution, ThermalError};
