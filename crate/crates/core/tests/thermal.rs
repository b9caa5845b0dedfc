use evla_core::fluence::assemble_and_solve;
use evla_core::params::{preset, region_of, Material, ParamSet, RateReading, RegionId};
use evla_core::specfn::RadialPair;
use evla_core::thermal::{
    build_temperature, eval_z_case1, eval_z_general, generic_params, modal_eigenvalues, particular_terms,
    project_initial, steady_robin_offset, tissue_layers, TemperatureSolution, ThermalError,
};
use proptest::prelude::*;
use std::sync::LazyLock;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

fn default_set() -> ParamSet {
    preset("810-15w").unwrap()
}

static TEMP: LazyLock<TemperatureSolution> = LazyLock::new(|| build_temperature(&default_set()).unwrap());

#[test]
fn generic_coefficients_by_region() {
    let p = default_set();
    let lumen = generic_params(&p, RegionId::BloodAnnulus);
    assert_eq!(lumen.b, 0.0);
    assert_eq!(lumen.big_b, 0.0);
    let mut flowing = p.clone();
    flowing.protocol.u = 70.0;
    let blood = p.thermal(Material::Blood);
    assert!(close(generic_params(&flowing, RegionId::FiberColumn).b, blood.capacity() * 70.0, 1e-15));
    let wall = generic_params(&flowing, RegionId::Wall);
    assert_eq!(wall.b, 0.0);
    assert!(close(wall.big_b, blood.c_p * p.thermal(Material::Wall).omega, 1e-15));
    assert!(wall.a > 0.0 && wall.alpha > 0.0);
}

#[test]
fn lumen_rates_follow_their_definitions() {
    let p = default_set();
    let fl = assemble_and_solve(&p).unwrap();
    let pt = particular_terms(&fl, &p);
    let b = p.thermal(Material::Blood);
    let (me, mt) = (fl.mu_eff(), fl.mu_t());
    assert!(close(pt.zeta1, b.k * me * me / b.capacity(), 1e-14));
    assert!(close(pt.zeta2, b.k * mt * mt / b.capacity(), 1e-14));
    assert!(close(pt.zeta3, pt.zeta1, 1e-14));

    let mut flowing = p.clone();
    flowing.protocol.u = 70.0;
    let pf = particular_terms(&fl, &flowing);
    assert!(close(pf.zeta1, pt.zeta1 + 70.0 * me, 1e-14));
    assert!(close(pf.zeta2, pt.zeta2 + 70.0 * mt, 1e-14));
    assert!(close(pf.zeta3, pt.zeta1 + 70.0 * mt, 1e-14));
    assert!(pf.zeta1 > pt.zeta1 && pf.zeta3 > pt.zeta3);
}

#[test]
fn particular_terms_vanish_at_t_zero() {
    let p = default_set();
    let fl = assemble_and_solve(&p).unwrap();
    for reading in RateReading::ALL {
        let mut q = p.clone();
        q.model.rate_reading = reading;
        let pt = particular_terms(&fl, &q);
        for id in RegionId::ALL {
            let (lo, hi) = p.geometry.bounds(id);
            for z in [-5.0, 0.0, 3.0] {
                assert_eq!(pt.eval_in(id, 0.5 * (lo + hi), z, 0.0), 0.0);
            }
        }
    }
}

#[test]
fn outer_rates_per_reading() {
    let p = default_set();
    let fl = assemble_and_solve(&p).unwrap();
    let c_b = p.thermal(Material::Blood).c_p;
    for reading in RateReading::ALL {
        let mut q = p.clone();
        q.model.rate_reading = reading;
        let pt = particular_terms(&fl, &q);
        for o in pt.outer {
            let th = p.thermal(o.material);
            let mu = fl.optics[o.material.index()].mu_eff;
            let num = th.k * mu * mu - c_b * th.omega;
            assert!(close(o.lambda, num / th.capacity(), 1e-14));
            match reading {
                RateReading::LinearRate => assert_eq!((o.eff.rate, o.eff.den), (o.lambda, Some(num))),
                RateReading::PrintedSqrt => assert!(close(o.eff.rate, o.lambda.abs().sqrt(), 1e-14) || o.lambda < 0.0),
                RateReading::Duhamel => assert_eq!(o.eff.den, None),
            }
        }
    }
}

#[test]
fn degenerate_printed_denominator_uses_the_limit_form() {
    let mut p = default_set();
    let fl = assemble_and_solve(&p).unwrap();
    let pad = Material::Pad;
    let mu = fl.optics[pad.index()].mu_eff;
    let c_b = p.thermal(Material::Blood).c_p;
    p.thermal[pad.index()].omega = p.thermal(pad).k * mu * mu / c_b;
    let pt = particular_terms(&fl, &p);
    let o = pt.outer[1];
    assert_eq!(o.eff.den, None);
    let r = 0.5 * (p.geometry.r_w() + p.geometry.r_p);
    let v = pt.eval_in(RegionId::Pad, r, 1.0, 2.0);
    assert!(v.is_finite());
    // Exactly the Duhamel reading in that region.
    p.model.rate_reading = RateReading::Duhamel;
    let exact = particular_terms(&fl, &p).eval_in(RegionId::Pad, r, 1.0, 2.0);
    assert!(close(v, exact, 1e-14));
}

#[test]
fn modes_satisfy_the_dispersion_relation_and_interfaces() {
    let p = default_set();
    let sol = &*TEMP;
    assert_eq!(sol.modes.len(), p.model.modes);
    let r_i = p.geometry.r_i;
    for (k, mode) in sol.modes.iter().enumerate() {
        assert!(mode.zeta < 0.0);
        if k > 0 {
            assert!(mode.zeta < sol.modes[k - 1].zeta);
        }
        for (shape, layer) in mode.shapes.iter().zip(&sol.layers) {
            let c = layer.coef;
            let sign = if shape.pair == RadialPair::Standard { 1.0 } else { -1.0 };
            let lhs = c.alpha * mode.zeta;
            let rhs = -c.a * (sign * shape.beta * shape.beta + mode.eta * mode.eta) - c.big_b;
            assert!(close(lhs, rhs, 1e-10), "mode {k}: {lhs} vs {rhs}");
        }
        assert!(mode.radial(&sol.layers, r_i).0.abs() <= 1e-12 * r_i);
        assert!(mode.interface_residual(&sol.layers, p.protocol.h_air) <= 1e-8);
    }
    let rows = sol.mode_rows();
    assert_eq!(rows.len(), sol.modes.len());
    assert!(rows.iter().all(|r| r.4.len() == 3));
}

#[test]
fn mode_count_grows_with_the_rate_threshold() {
    let p = default_set();
    let layers = tissue_layers(&p);
    let h = p.protocol.h_air;
    let count = |zeta_lo: f64| match modal_eigenvalues(&layers, h, 0, 0.0, zeta_lo, 10_000) {
        Err(ThermalError::BracketExhausted { found, .. }) => found,
        other => panic!("expected an exhausted bracket, got {other:?}"),
    };
    let counts: Vec<usize> = [-0.01, -0.05, -0.2, -0.5, -1.0].into_iter().map(count).collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    assert!(counts[4] > counts[0]);
    // Nested brackets find the same leading roots.
    let a = modal_eigenvalues(&layers, h, 0, 0.0, -0.5, counts[2]).unwrap();
    let b = modal_eigenvalues(&layers, h, 0, 0.0, -1.0, counts[2]).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!(close(x.zeta, y.zeta, 1e-9));
    }
}

#[test]
fn projection_of_nothing_is_nothing() {
    let p = default_set();
    let layers = tissue_layers(&p);
    let mut modes = modal_eigenvalues(&layers, p.protocol.h_air, 0, 0.0, -4.0, 8).unwrap();
    modes.iter_mut().for_each(|m| m.amplitude = 1.0);
    let misfit = project_initial(&mut modes, &layers, &|_| 0.0).unwrap();
    assert_eq!(misfit, 0.0);
    assert!(modes.iter().all(|m| m.amplitude == 0.0));
}

#[test]
fn projection_misfit_shrinks_with_more_modes() {
    let p = default_set();
    let layers = tissue_layers(&p);
    let off = steady_robin_offset(&layers, p.protocol.h_air, p.protocol.t_air, p.protocol.t_b).unwrap();
    let all = modal_eigenvalues(&layers, p.protocol.h_air, 0, 0.0, -4.0, 20).unwrap();
    let mut prev = f64::INFINITY;
    for n in [2, 5, 10, 20] {
        let mut modes = all[..n].to_vec();
        let misfit = project_initial(&mut modes, &layers, &|r| -off.eval(r).0).unwrap();
        assert!(misfit < prev, "N = {n}: {misfit} >= {prev}");
        prev = misfit;
    }
}

#[test]
fn steady_offset_satisfies_its_conditions() {
    let p = default_set();
    let layers = tissue_layers(&p);
    let (h, t_air, t_b) = (p.protocol.h_air, p.protocol.t_air, p.protocol.t_b);
    let off = steady_robin_offset(&layers, h, t_air, t_b).unwrap();
    let r_s = p.geometry.r_s;
    let (v, d) = off.eval(r_s);
    let k = layers[2].coef.a;
    let gamma = t_air - t_b;
    assert!((k * d + h * v - h * gamma).abs() <= 1e-10 * (h * gamma).abs());
    assert!(v < 0.0);
    assert!(off.eval(p.geometry.r_i).0.abs() <= 1e-12);
    for (a, b) in [(0, 1), (1, 2)] {
        let rho = layers[a].hi;
        let (inside, _) = off.eval(rho * (1.0 - 1e-12));
        let (outside, _) = off.eval(rho);
        assert!((inside - outside).abs() <= 1e-9 * outside.abs().max(1e-12), "value jump at {rho}");
        let _ = b;
    }
    let zero = steady_robin_offset(&layers, h, t_b, t_b).unwrap();
    assert_eq!((zero.a1, zero.a2), ([0.0; 3], [0.0; 3]));
    assert_eq!(zero.eval(10.0), (0.0, 0.0));
}

#[test]
fn equilibrium_without_cooling_or_heating() {
    let p = default_set();
    let layers = tissue_layers(&p);
    let off = steady_robin_offset(&layers, p.protocol.h_air, p.protocol.t_b, p.protocol.t_b).unwrap();
    let mut modes = modal_eigenvalues(&layers, p.protocol.h_air, 0, 0.0, -4.0, 20).unwrap();
    project_initial(&mut modes, &layers, &|r| -off.eval(r).0).unwrap();
    assert!(modes.iter().all(|m| m.amplitude == 0.0));
    let fl = assemble_and_solve(&p).unwrap();
    let pt = particular_terms(&fl, &p);
    for id in RegionId::ALL {
        let (lo, hi) = p.geometry.bounds(id);
        assert_eq!(pt.eval_in(id, 0.5 * (lo + hi), 2.0, 0.0), 0.0);
    }
}

#[test]
fn initial_field_is_blood_temperature_within_the_gate() {
    let sol = &*TEMP;
    let geo = *sol.geometry();
    for i in 0..=400 {
        let r = geo.r_s * i as f64 / 400.0;
        for z in [-geo.l, 0.0, geo.l] {
            let t = sol.eval(r, z, 0.0).unwrap();
            assert!((t - sol.t_b).abs() <= 0.1, "T({r}, {z}, 0) = {t}");
        }
    }
}

#[test]
fn skin_robin_condition_holds_for_the_cooling_part() {
    let sol = &*TEMP;
    let geo = *sol.geometry();
    let k = sol.layers[2].coef.a;
    let gamma = sol.t_air - sol.t_b;
    for t in [0.0, 0.5, 2.0, 10.0] {
        let parts = sol.parts_in(RegionId::Skin, geo.r_s, 0.0, t);
        let value = parts.offset + parts.modal;
        let res = k * sol.homogeneous_slope(geo.r_s, t) + sol.h_air * (value - gamma);
        assert!(res.abs() <= 1e-3 * sol.h_air * gamma.abs(), "t = {t}: {res}");
    }
}

#[test]
fn evaluation_outside_the_domain_is_rejected() {
    let sol = &*TEMP;
    let geo = *sol.geometry();
    assert!(matches!(sol.eval(geo.r_s + 0.1, 0.0, 1.0), Err(ThermalError::OutOfDomain { .. })));
    assert!(sol.eval(0.0, geo.l + 0.1, 1.0).is_err());
    assert!(sol.eval(0.0, 0.0, sol.t_end + 1.0).is_err());
    assert!(sol.eval(0.0, 0.0, -1.0).is_err());
}

#[test]
fn lumen_is_carried_by_particular_terms_only() {
    let sol = &*TEMP;
    let geo = *sol.geometry();
    for r in [0.0, 0.5 * geo.r_f, geo.r_f, 0.5 * (geo.r_f + geo.r_i)] {
        let id = region_of(r, &geo).unwrap();
        let parts = sol.parts_in(id, r, 2.0, 1.0);
        assert_eq!((parts.offset, parts.modal), (0.0, 0.0));
    }
}

#[test]
fn flowing_blood_keeps_only_particular_terms() {
    let mut p = default_set();
    p.protocol.u = 70.0;
    let sol = build_temperature(&p).unwrap();
    assert!(sol.modes.is_empty());
    assert_eq!(sol.offset.gamma, 0.0);
    assert_eq!(sol.eval(5.0, 1.0, 0.0).unwrap(), p.protocol.t_b);
}

#[test]
fn stagnant_axial_factor_has_zero_slope_at_both_ends() {
    let l = 10.0;
    for m in 0..5 {
        let eta = m as f64 * std::f64::consts::PI / (2.0 * l);
        for end in [-l, l] {
            let h = 1e-5;
            let d = (eval_z_case1(eta, l, end + h) - eval_z_case1(eta, l, end - h)) / (2.0 * h);
            assert!(d.abs() <= 1e-9, "m = {m}, z = {end}: {d}");
        }
    }
}

#[test]
fn general_axial_factor_reduces_to_cosh_without_flow() {
    let (a, l, eta) = (0.5, 10.0, 0.13);
    let base = eval_z_general(0.0, a, eta, l, l);
    for z in [-10.0, -3.0, 0.0, 4.0, 9.5] {
        let want = (eta * (l - z)).cosh();
        assert!(close(eval_z_general(0.0, a, eta, l, z) / base, want, 1e-13));
    }
}

#[test]
fn general_axial_factor_slope_at_l_vanishes_at_second_order() {
    let fd = |b: f64, a: f64, eta: f64, l: f64, h: f64| {
        (eval_z_general(b, a, eta, l, l + h) - eval_z_general(b, a, eta, l, l - h)) / (2.0 * h)
    };
    let l = 3.0;
    // b = 2a with Ξ = 1 forces η = 0, and Z is then constant.
    let a: f64 = 0.7;
    let scale = eval_z_general(2.0 * a, a, 0.0, l, l).abs();
    for h in [1e-1, 1e-2, 1e-3] {
        assert!(fd(2.0 * a, a, 0.0, l, h).abs() <= 1e-12 * scale / h);
    }
    // b = a with Ξ = 1: η = √3/2; the centred difference decays like h².
    let eta = 3f64.sqrt() / 2.0;
    let xi = (a * a + 4.0 * a * a * eta * eta).sqrt() / (2.0 * a);
    assert!(close(xi, 1.0, 1e-15));
    let scale = eval_z_general(a, a, eta, l, l).abs();
    let (d1, d2) = (fd(a, a, eta, l, 1e-2).abs(), fd(a, a, eta, l, 5e-3).abs());
    assert!(d1 <= 1e-3 * scale);
    assert!(close(d1 / d2, 4.0, 1e-2), "ratio {}", d1 / d2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn general_axial_factor_is_flat_at_l(b in 0.0f64..3.0, a in 0.1f64..2.0, eta in 0.0f64..2.0) {
        // Z'(L) from the closed-form derivative.
        let root = (b * b + 4.0 * a * a * eta * eta).sqrt();
        let xi = root / (2.0 * a);
        let l = 2.0;
        let dz = (b * l / (2.0 * a)).exp() * (b / (2.0 * a) * root - xi * b);
        let scale = eval_z_general(b, a, eta, l, l).abs() * (b / a + xi).max(1.0);
        prop_assert!(dz.abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn particular_terms_are_linear_in_power(scale in 0.2f64..3.0, r in 0.0f64..1.0, z in 0.0f64..10.0, t in 0.0f64..0.5) {
        let p = default_set();
        let q = p.with_power(15.0 * scale);
        let (fa, fb) = (assemble_and_solve(&p).unwrap(), assemble_and_solve(&q).unwrap());
        let (pa, pb) = (particular_terms(&fa, &p), particular_terms(&fb, &q));
        let r = r * p.geometry.r_s;
        let id = region_of(r, &p.geometry).unwrap();
        let (x, y) = (pa.eval_in(id, r, z, t), pb.eval_in(id, r, z, t));
        prop_assert!(close(y, scale * x, 1e-12) || (x == 0.0 && y == 0.0));
    }
}

#[test]
fn point_history_matches_direct_evaluation() {
    let temp = &*TEMP;
    let geo = *temp.geometry();
    for (r, z) in [(0.1, 2.0), (1.0, -3.0), (geo.r_w(), 0.5), (geo.r_p + 1.0, 4.0), (geo.r_s, 9.0)] {
        let h = temp.at_point(r, z).unwrap();
        for t in [0.0, 0.7, 3.0, 10.0] {
            let (a, b) = (h.eval(t), temp.eval(r, z, t).unwrap());
            assert!(a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs()), "({r}, {z}, {t}): {a} vs {b}");
        }
    }
    assert!(temp.at_point(geo.r_s + 0.1, 0.0).is_err());
}
