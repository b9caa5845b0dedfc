use evla_core::damage::{
    arrhenius_between, arrhenius_integral, damage_history, damage_map, riemann_bounds, t_crit, t_crit_upper_bound, table3,
    DamageError, DamageParams, BOUND_TABLE, BOUND_TMIN, T_CRIT_RTOL,
};
use evla_core::params::{preset, Material, ParamSet, KELVIN_OFFSET, R_GAS};
use evla_core::thermal::build_temperature;
use proptest::prelude::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

fn default_set() -> ParamSet {
    preset("810-15w").unwrap()
}

fn params_of(m: Material) -> DamageParams {
    DamageParams::of(default_set().thermal(m))
}

#[test]
fn table_entries_are_reproduced() {
    let rows = table3(&default_set());
    assert_eq!(rows.len(), 24);
    for r in &rows {
        assert!(r.rel_err <= 0.05, "{r:?}");
    }
    let at = |t: f64, m: Material| rows.iter().find(|r| r.t_min == t && r.material == m).unwrap().computed;
    assert!(close(at(50.0, Material::Blood), 3.4e5, 0.05));
    assert!(close(at(100.0, Material::Skin), 2.6e-11, 0.05));
    assert!(close(at(70.0, Material::Wall), 5.1e1, 0.05));
    assert_eq!(BOUND_TMIN.len(), BOUND_TABLE.len());
}

#[test]
fn upper_bound_overflow_is_flagged() {
    let skin = params_of(Material::Skin);
    let (v, overflow) = t_crit_upper_bound(-200.0, &skin);
    assert!(v.is_infinite() && overflow);
    let (v, overflow) = t_crit_upper_bound(60.0, &skin);
    assert!(v.is_finite() && !overflow);
    assert!(t_crit_upper_bound(-KELVIN_OFFSET, &skin).1);
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(matches!(DamageParams::new(0.0, 1e5), Err(DamageError::Invalid { .. })));
    assert!(DamageParams::new(1e60, -1.0).is_err());
    assert!(DamageParams::new(f64::INFINITY, 1.0).is_err());
    assert!(DamageParams::new(7.6e66, 4.48e5).is_ok());
}

#[test]
fn constant_temperature_closed_form() {
    let blood = params_of(Material::Blood);
    let exact = blood.a * (-blood.e_a / (R_GAS * (80.0 + KELVIN_OFFSET))).exp();
    let omega = arrhenius_integral(&|_| 80.0, 1.0, &blood, 16);
    assert!(close(omega, exact, 1e-12));
    assert!(close(omega, 1.0 / t_crit_upper_bound(80.0, &blood).0, 1e-12));
    assert!(close(arrhenius_integral(&|_| 80.0, 2.0, &blood, 16), 2.0 * omega, 1e-12));
    assert!(arrhenius_integral(&|_| 37.0, 10.0, &blood, 16) < 1e-6);
}

#[test]
fn absolute_zero_contributes_nothing() {
    let blood = params_of(Material::Blood);
    assert_eq!(blood.boltzmann(-KELVIN_OFFSET), 0.0);
    assert_eq!(blood.boltzmann(-300.0), 0.0);
    assert_eq!(arrhenius_integral(&|_| -300.0, 5.0, &blood, 8), 0.0);
}

#[test]
fn simpson_converges_at_fourth_order() {
    let blood = params_of(Material::Blood);
    let path = |t: f64| 60.0 + 20.0 * (1.3 * t).sin();
    let om = |m: usize| arrhenius_integral(&path, 2.0, &blood, m);
    let d1 = (om(8) - om(32)).abs();
    let d2 = (om(32) - om(128)).abs();
    let order = (d1 / d2).log(4.0);
    assert!((3.7..4.3).contains(&order), "order {order}");
}

#[test]
fn riemann_sums_for_constant_and_monotone_paths() {
    let blood = params_of(Material::Blood);
    let b = riemann_bounds(&|_| 70.0, 3.0, 16, &blood);
    assert!(close(b.lower_sum, b.upper_sum, 1e-14));

    let ramp = |t: f64| 40.0 + 5.0 * t;
    let t = 4.0;
    let simpson = arrhenius_integral(&ramp, t, &blood, 2048) / blood.a;
    let mut prev_width = f64::INFINITY;
    for m in [4, 8, 16, 32, 64] {
        let b = riemann_bounds(&ramp, t, m, &blood);
        let h = t / m as f64;
        assert!(b.lower_sum * h <= simpson && simpson <= b.upper_sum * h, "M = {m}");
        assert_eq!(b.lower_sum, b.left_sum);
        let width = (b.upper_sum - b.lower_sum) * h;
        if prev_width.is_finite() {
            assert!(close(width, 0.5 * prev_width, 1e-12), "M = {m}");
        }
        prev_width = width;
    }
    // Cooling swaps the roles of the two sums.
    let cool = riemann_bounds(&|s: f64| 60.0 - 5.0 * s, t, 16, &blood);
    assert_eq!(cool.lower_sum, cool.right_sum);
}

#[test]
fn bisection_finds_the_threshold_time() {
    let blood = params_of(Material::Blood);
    let path = |t: f64| 85.0 + t;
    let m = 64;
    let t_end = 10.0;
    let threshold = arrhenius_integral(&path, t_end, &blood, m);
    let tc = t_crit(&path, t_end, threshold, &blood, m).unwrap();
    assert!(close(tc, t_end, 2.0 * T_CRIT_RTOL));
    let tc = t_crit(&path, t_end, 1.0, &blood, m).unwrap();
    assert!(close(arrhenius_integral(&path, tc, &blood, m), 1.0, 1e-4));
    assert!(t_crit(&|_| 38.0, t_end, 1.0, &blood, m).is_none());
}

#[test]
fn single_pass_history_matches_bisection() {
    let blood = params_of(Material::Blood);
    let m = 64;
    for path in [|t: f64| 85.0 + t, |t: f64| 99.0 - 1.5 * t, |_: f64| 88.0] {
        let (omega, tc) = damage_history(&path, 10.0, 1.0, &blood, m);
        assert!(close(omega, arrhenius_integral(&path, 10.0, &blood, m), 1e-12));
        let reference = t_crit(&path, 10.0, 1.0, &blood, m).unwrap();
        let tc = tc.unwrap();
        assert!(close(tc, reference, 1e-5), "{tc} vs {reference}");
    }
    assert_eq!(damage_history(&|_| 38.0, 10.0, 1.0, &blood, m).1, None);
}

#[test]
fn damage_map_along_the_analytic_field() {
    let p = default_set();
    let temp = build_temperature(&p).unwrap();
    let points = [(1.0, 5.0), (4.0, 5.0), (10.0, 8.0), (p.geometry.r_s, 9.0)];
    let map = damage_map(&temp, &points, &p, 1.0, 32).unwrap();
    assert_eq!(map.len(), points.len());
    for (d, (r, z)) in map.iter().zip(points) {
        assert_eq!((d.r, d.z), (r, z));
        if let Some(tc) = d.t_crit {
            assert!(tc > 0.0 && tc <= temp.t_end);
            assert!(d.omega >= 1.0);
        }
    }
    assert!(damage_map(&temp, &[(p.geometry.r_s + 1.0, 0.0)], &p, 1.0, 8).is_err());
}

proptest! {
    #[test]
    fn omega_is_monotone_and_additive(t0 in 40.0f64..110.0, slope in -5.0f64..5.0, t in 0.1f64..10.0) {
        let blood = params_of(Material::Blood);
        let path = move |s: f64| t0 + slope * s;
        let m = 32;
        let a = arrhenius_integral(&path, 0.5 * t, &blood, m);
        let b = arrhenius_integral(&path, t, &blood, 2 * m);
        prop_assert!(b >= a);
        let split = a + arrhenius_between(&path, 0.5 * t, t, &blood, m);
        prop_assert!((b - split).abs() <= 1e-12 * b.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn hotter_histories_fail_sooner(base in 70.0f64..95.0, extra in 0.0f64..10.0) {
        let blood = params_of(Material::Blood);
        let cool = move |s: f64| base + 0.5 * s;
        let hot = move |s: f64| base + extra + 0.5 * s;
        let (a, b) = (t_crit(&cool, 10.0, 1.0, &blood, 32), t_crit(&hot, 10.0, 1.0, &blood, 32));
        match (a, b) {
            (Some(x), Some(y)) => prop_assert!(y <= x * (1.0 + 2.0 * T_CRIT_RTOL)),
            (Some(_), None) => prop_assert!(false, "hotter path never reached the threshold"),
            _ => {}
        }
    }
}
