use evla_core::fluence::{
    assemble_and_solve, branch_factors, build_source, eval_fluence, eval_fluence_transient, transient_rate,
    FluenceError,
};
use evla_core::params::{derive_optics, preset, region_of, Material, Normalization, ParamSet, RegionOptics, PRESET_NAMES};
use evla_core::specfn::RadialPair;
use proptest::prelude::*;
use std::f64::consts::PI;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

fn default_set() -> ParamSet {
    preset("810-15w").unwrap()
}

#[test]
fn source_strength_without_anisotropy() {
    let mut p = default_set();
    p.optics[0].g = 0.0;
    let blood = derive_optics(p.optics(Material::Blood));
    let src = build_source(&p.protocol, &p.geometry, &blood);
    let irradiance = 15.0 / (PI * 0.09);
    assert!(close(irradiance, 53.0516, 1e-5));
    assert!(close(src.s0, irradiance * 0.73, 1e-12));
    assert!(close(src.s0, 38.7277, 1e-5));
    assert_eq!(src.eval(p.geometry.r_f, 0.0, 0.0), 0.0);
    assert!(src.eval(0.0, 0.0, 0.0) > 0.0);
}

#[test]
fn source_moves_with_the_tip() {
    let p = default_set();
    let src = build_source(&p.protocol, &p.geometry, &p.derived(Material::Blood));
    let r = 0.5 * p.geometry.r_f;
    for (z, t) in [(0.0, 0.0), (1.5, 2.0), (-3.0, 7.0)] {
        let d = 0.37;
        assert!(close(src.eval(r, z + d, t) / src.eval(r, z, t), (-src.mu_t * d).exp(), 1e-12));
        assert!(close(src.eval(r, 0.0, t), src.eval(r, p.protocol.v * t, 0.0), 1e-12));
    }
}

#[test]
fn branch_table_per_wavelength() {
    let kinds = |name: &str| {
        let p = preset(name).unwrap();
        branch_factors(&Material::ALL.map(|m| p.derived(m))).unwrap().w_kind
    };
    use RadialPair::{Modified as M, Standard as S};
    assert_eq!(kinds("810-15w"), [M, S, M]);
    assert_eq!(kinds("980-15w"), [M, S, S]);
    assert_eq!(kinds("1064-10w"), [M, S, M]);
}

#[test]
fn matching_effective_attenuation_is_degenerate() {
    let p = default_set();
    let mut optics = Material::ALL.map(|m| p.derived(m));
    let blood = *p.optics(Material::Blood);
    optics[Material::Pad.index()] = derive_optics(&RegionOptics { g: 0.9, ..blood });
    match branch_factors(&optics) {
        Err(FluenceError::NonPositiveRadicand { region, .. }) => assert_eq!(region, Material::Pad),
        other => panic!("expected NonPositiveRadicand, got {other:?}"),
    }
}

#[test]
fn interfaces_are_continuous_for_every_preset() {
    for name in PRESET_NAMES {
        let sol = assemble_and_solve(&preset(name).unwrap()).unwrap();
        let zetas: Vec<f64> = (0..50).map(|k| 0.2 * k as f64).collect();
        let rep = sol.continuity_residuals(&zetas);
        assert!(rep.max() <= 1e-9, "{name}: {rep:?}");
    }
}

/// Positive in the lumen and the wall. The pad carries the oscillating
/// J₀/Y₀ pair and nothing closes the field at the skin, so it changes sign
/// there for every preset.
#[test]
fn fluence_sign_by_region() {
    for name in PRESET_NAMES {
        let p = preset(name).unwrap();
        let sol = assemble_and_solve(&p).unwrap();
        let geo = p.geometry;
        let mut pad_negative = false;
        for i in 0..=300 {
            let r = geo.r_s * i as f64 / 300.0;
            let region = region_of(r, &geo).unwrap();
            for j in 0..=40 {
                let z = geo.l * j as f64 / 40.0;
                let phi = eval_fluence(&sol, r, z, 0.0).unwrap();
                match region.material() {
                    Material::Blood | Material::Wall => assert!(phi > 0.0, "{name}: phi({r}, {z}) = {phi}"),
                    Material::Pad => pad_negative |= phi < 0.0,
                    Material::Skin => {}
                }
            }
        }
        assert!(pad_negative, "{name}: pad fluence no longer changes sign");
    }
}

#[test]
fn axial_maximum_sits_under_the_tip() {
    let p = default_set();
    let sol = assemble_and_solve(&p).unwrap();
    assert!(sol.dzeta(0.0, 0.0).abs() <= 1e-9 * sol.b0 * sol.mu_t());
    for t in [0.0, 2.5, 5.0, 7.5, 10.0] {
        let tip = -p.protocol.v * t;
        for k in 1..=200 {
            let z = tip + (p.geometry.l - tip) * k as f64 / 200.0;
            assert!(sol.dzeta(0.0, z - tip) < 0.0, "t = {t}, z = {z}");
        }
    }
}

#[test]
fn tip_irradiance_pin_fixes_the_tip_value() {
    let mut p = default_set();
    p.model.normalization = Normalization::TipIrradiance;
    let sol = assemble_and_solve(&p).unwrap();
    let bare = 15.0 / (PI * p.geometry.r_f.powi(2));
    assert!(close(sol.eval(0.0, -3.0, 3.0).unwrap(), bare, 1e-12));
}

#[test]
fn points_outside_the_segment_are_rejected() {
    let p = default_set();
    let sol = assemble_and_solve(&p).unwrap();
    assert!(matches!(sol.eval(0.0, -1.0, 0.5), Err(FluenceError::OutOfDomain { .. })));
    assert!(sol.eval(p.geometry.r_s + 0.1, 0.0, 0.0).is_err());
    assert!(sol.eval(0.0, p.geometry.l + 0.1, 0.0).is_err());
    assert!(sol.eval(0.0, -0.5, 0.5).is_ok());
}

#[test]
fn coefficient_dump_lists_every_amplitude() {
    let sol = assemble_and_solve(&default_set()).unwrap();
    let rows = sol.coefficient_rows();
    assert_eq!(rows.len(), 4 + 12);
    assert!(rows.iter().all(|r| r.3.is_finite()));
}

#[test]
fn transient_column_fluence() {
    let p = default_set();
    let blood = p.derived(Material::Blood);
    let src = build_source(&p.protocol, &p.geometry, &blood);
    assert_eq!(eval_fluence_transient(&src, &blood, 0.0, 0.0), 0.0);
    for name in PRESET_NAMES {
        let q = preset(name).unwrap();
        assert!(transient_rate(&q.derived(Material::Blood)) > 0.0);
    }
    // With g = 0 the rate is a few hundredths of an inverse picosecond.
    let mut iso = *p.optics(Material::Blood);
    iso.g = 0.0;
    let iso = derive_optics(&iso);
    let zeta = transient_rate(&iso);
    assert!(close(zeta, (0.3 / 1.4) * 0.103_333_33, 1e-6), "zeta = {zeta} 1/ps");
    let src = build_source(&p.protocol, &p.geometry, &iso);
    let t = 50.0 / zeta;
    let ratio = eval_fluence_transient(&src, &iso, 0.0, t + 2f64.ln() / zeta) / eval_fluence_transient(&src, &iso, 0.0, t);
    assert!(close(ratio, 2.0, 1e-9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fluence_is_linear_in_power(scale in 0.1f64..5.0, r in 0.0f64..1.0, zeta in 0.0f64..10.0) {
        let p = default_set();
        let a = assemble_and_solve(&p).unwrap();
        let b = assemble_and_solve(&p.with_power(15.0 * scale)).unwrap();
        for (x, y) in a.coefficient_rows().iter().zip(b.coefficient_rows()) {
            prop_assert!(close(y.3, scale * x.3, 1e-12) || (x.3 == 0.0 && y.3 == 0.0));
        }
        let r = r * p.geometry.r_s;
        prop_assert!(close(b.eval_zeta(r, zeta), scale * a.eval_zeta(r, zeta), 1e-12));
    }

    #[test]
    fn fluence_depends_on_z_plus_vt(r in 0.0f64..1.0, z in 0.0f64..10.0, t in 0.0f64..10.0, s in 0.0f64..1.0) {
        let p = default_set();
        let sol = assemble_and_solve(&p).unwrap();
        let (r, s) = (r * p.geometry.r_s, s * t);
        let z = z.min(p.geometry.l - p.protocol.v * s);
        let a = sol.eval(r, z, t).unwrap();
        let b = sol.eval(r, z + p.protocol.v * s, t - s).unwrap();
        prop_assert!(close(a, b, 1e-12));
    }
}
