#![allow(clippy::excessive_precision)]

use evla_core::specfn::{self, BesselKind, RadialPair, SpecFnError};
use proptest::prelude::*;

// 40-digit reference values from an arbitrary-precision library, rounded to f64.
// Columns: J0, J1, Y0, Y1, I0, I1, K0, K1.
const REFERENCE: &[(f64, [f64; 8])] = &[
    (1e-6, [9.9999999999975e-1, 4.999999999999375e-7, -8.8690314816594437, -6.3661977237217501e+5, 1.00000000000025, 5.000000000000625e-7, 1.3931442073626419e+1, 9.9999999999278428e+5]),
    (0.01, [9.9997500015624957e-1, 4.9999375002604161e-3, -3.005455637083646, -6.3678596282060656e+1, 1.0000250001562504, 5.0000625002604172e-3, 4.721244730161095, 9.9973894118296248e+1]),
    (0.1, [9.9750156206604003e-1, 4.9937526036241998e-2, -1.5342386513503668, -6.458951094702027, 1.0025015629340956, 5.0062526047092692e-2, 2.4270690247020166, 9.8538447808706061]),
    (0.5, [9.384698072408129e-1, 2.4226845767487389e-1, -4.4451873350670656e-1, -1.4714723926702431, 1.0634833707413235, 2.5789430539089632e-1, 9.2441907122766586e-1, 1.6564411200033009]),
    (1.0, [7.6519768655796655e-1, 4.4005058574493352e-1, 8.8256964215676958e-2, -7.8121282130028872e-1, 1.2660658777520083, 5.6515910399248503e-1, 4.2102443824070833e-1, 6.0190723019723457e-1]),
    (2.0, [2.2389077914123567e-1, 5.7672480775687339e-1, 5.1037567264974512e-1, -1.0703243154093755e-1, 2.2795853023360673, 1.5906368546373291, 1.1389387274953344e-1, 1.3986588181652243e-1]),
    (3.5, [-3.8012773998726338e-1, 1.3737752736232719e-1, 1.8902194392082651e-1, 4.1018841788751188e-1, 7.3782034322254797, 6.2058349222583655, 1.9598897170368489e-2, 2.2239392925923834e-2]),
    (5.0, [-1.775967713143383e-1, -3.2757913759146522e-1, -3.0851762524903378e-1, 1.4786314339122684e-1, 2.7239871823604447e+1, 2.4335642142450527e+1, 3.6910983340425943e-3, 4.0446134454521642e-3]),
    (7.5, [2.663396578803784e-1, 1.3524842757970551e-1, 1.1731328614820863e-1, -2.5912851048611625e-1, 2.6816131151518936e+2, 2.4958436542268814e+2, 2.4917761635611439e-4, 2.6529739012528953e-4]),
    (10.0, [-2.4593576445134834e-1, 4.3472746168861437e-2, 5.5671167283599391e-2, 2.4901542420695388e-1, 2.8157166284662545e+3, 2.6709883037012547e+3, 1.7780062316167652e-5, 1.8648773453825585e-5]),
    (12.0, [4.7689310796833537e-2, -2.2344710449062761e-1, -2.2523731263436143e-1, -5.7099218260896521e-2, 1.8948925349296309e+4, 1.8141348781638832e+4, 2.2008253973114914e-6, 2.2907574647671878e-6]),
    (15.0, [-1.4224472826780773e-2, 2.0510403861352276e-1, 2.0546429603891826e-1, 2.1073628036873512e-2, 3.3964937329791388e+5, 3.281249219702064e+5, 9.8195364823964345e-8, 1.0141729369762092e-7]),
    (19.9, [1.7287775639261839e-1, 5.0117424807379983e-2, 4.5762094159385723e-2, -1.7178303121049249e-1, 3.9513376520066878e+7, 3.8507423874862336e+7, 6.360780949642304e-10, 6.5186855008514674e-10]),
    (20.1, [1.5953606793729721e-1, 8.2801005760209543e-2, 7.8810592428750069e-2, -1.5762598074781167e-1, 4.8017874107136437e+7, 4.6807739533029818e+7, 5.1821017487977234e-10, 5.309480556151326e-10]),
    (25.0, [9.6266783275958116e-2, -1.253502495802899e-1, -1.2724943226800614e-1, -9.882996478323741e-2, 5.7745606064663103e+9, 5.6578651298787014e+9, 3.4641615622131144e-12, 3.5327780731999338e-12]),
    (35.0, [-1.2684568275631257e-1, 4.399094217962564e-2, 4.5797987195155641e-2, 1.2751273354559012e-1, 1.0733881849451406e+14, 1.0579412605189627e+14, 1.3310351491429469e-16, 1.3499178340011057e-16]),
    (50.0, [5.5812327669251815e-2, -9.7511828125175138e-2, -9.8064995470077079e-2, -5.6795668562014768e-2, 2.9325537838493363e+20, 2.9030785901035568e+20, 3.4101677497894955e-23, 3.4441022267175556e-23]),
    (75.0, [3.4643913805097056e-2, -8.5139995044829104e-2, -8.536904764777561e-2, -3.5213785160580486e-2, 1.7226390780358047e+31, 1.7111160152965292e+31, 3.8701170455869119e-34, 3.8958329467421914e-34]),
    (100.0, [1.9985850304223122e-2, -7.7145352014112158e-2, -7.7244313365083152e-2, -2.0372312002759793e-2, 1.0737517071310738e+42, 1.0683693903381625e+42, 4.656628229175902e-45, 4.6798537356369093e-45]),
];

/// Error scale: the oscillation envelope for J/Y, the value itself for I/K.
fn scale(kind: BesselKind, x: f64, row: &[f64; 8]) -> f64 {
    match kind {
        BesselKind::J0 | BesselKind::Y0 => row[0].hypot(row[2]),
        BesselKind::J1 | BesselKind::Y1 => row[1].hypot(row[3]),
        _ => {
            let i = BesselKind::ALL.iter().position(|k| *k == kind).unwrap();
            let _ = x;
            row[i].abs()
        }
    }
}

#[test]
fn matches_reference_table() {
    let mut worst = 0.0_f64;
    for (x, row) in REFERENCE {
        for (i, kind) in BesselKind::ALL.iter().enumerate() {
            let got = specfn::eval(*kind, *x).unwrap();
            let err = (got - row[i]).abs() / scale(*kind, *x, row);
            worst = worst.max(err);
            assert!(err <= 1e-12, "{kind:?}({x}) = {got:e}, want {:e}, rel {err:e}", row[i]);
        }
    }
    eprintln!("worst relative error {worst:e}");
}

#[test]
fn values_at_origin() {
    assert_eq!(specfn::eval(BesselKind::J0, 0.0).unwrap(), 1.0);
    assert_eq!(specfn::eval(BesselKind::I0, 0.0).unwrap(), 1.0);
    assert_eq!(specfn::eval(BesselKind::J1, 0.0).unwrap(), 0.0);
    assert_eq!(specfn::eval(BesselKind::I1, 0.0).unwrap(), 0.0);
}

#[test]
fn thirty_term_series_values() {
    // Independent plain-f64 sum of the first 30 ascending-series terms.
    let mut j0 = 0.0;
    let mut k0 = 0.0;
    let mut c = 1.0;
    let mut h = 0.0;
    let gamma = 0.577_215_664_901_532_9;
    for n in 0..30 {
        if n > 0 {
            c *= 0.25 / (n * n) as f64;
            h += 1.0 / n as f64;
        }
        j0 += if n % 2 == 0 { c } else { -c };
        k0 += (h - gamma) * c;
    }
    k0 -= specfn::i0(1.0) * 0.5_f64.ln();
    assert!((specfn::j0(1.0) - j0).abs() < 1e-15);
    assert!((specfn::k0(1.0) - k0).abs() < 1e-15);
    assert!((specfn::j0(1.0) - 0.765197686557967).abs() < 1e-15);
    assert!((specfn::k0(1.0) - 0.421024438240708).abs() < 1e-15);
}

#[test]
fn singular_kinds_reject_zero() {
    for kind in [BesselKind::Y0, BesselKind::Y1, BesselKind::K0, BesselKind::K1] {
        assert!(matches!(specfn::eval(kind, 0.0), Err(SpecFnError::Domain { .. })));
    }
    assert!(specfn::eval(BesselKind::J0, -1.0).is_err());
    assert!(specfn::wronskian_standard(0.0).is_err());
    assert!(specfn::wronskian_modified(0.0).is_err());
}

#[test]
fn modified_overflow_is_signalled() {
    assert!(specfn::eval(BesselKind::I0, 700.0).is_ok());
    assert!(matches!(specfn::eval(BesselKind::I0, 800.0), Err(SpecFnError::Overflow { .. })));
    assert!(matches!(specfn::eval(BesselKind::I1, 800.0), Err(SpecFnError::Overflow { .. })));
}

#[test]
fn wronskian_examples() {
    let pi = std::f64::consts::PI;
    assert!((specfn::wronskian_standard(1.0).unwrap() - 2.0 / pi).abs() < 1e-14);
    assert!((specfn::wronskian_standard(2.0).unwrap() - 1.0 / pi).abs() < 1e-14);
    assert!((specfn::wronskian_standard(10.0).unwrap() - 0.063661977236758).abs() < 1e-13);
    assert!((specfn::wronskian_modified(1.0).unwrap() - 1.0).abs() < 1e-14);
    assert!((specfn::wronskian_modified(4.0).unwrap() - 0.25).abs() < 1e-14);
    assert!((specfn::wronskian_modified(0.5).unwrap() - 2.0).abs() < 1e-13);
}

#[test]
fn wronskians_on_log_grid() {
    let pi = std::f64::consts::PI;
    let n = 1000;
    for i in 0..n {
        let x = 0.01 * (5000.0_f64).powf(i as f64 / (n - 1) as f64);
        let ws = specfn::wronskian_standard(x).unwrap();
        let wm = specfn::wronskian_modified(x).unwrap();
        let es = 2.0 / (pi * x);
        assert!((ws - es).abs() <= 1e-10 * (1.0 + es), "standard at {x}");
        assert!((wm - 1.0 / x).abs() <= 1e-10 * (1.0 + 1.0 / x), "modified at {x}");
    }
}

#[test]
fn radial_pair_wronskians() {
    let pi = std::f64::consts::PI;
    for x in [0.3, 1.7, 6.0, 22.0] {
        assert!((RadialPair::Standard.wronskian(x) - 2.0 / (pi * x)).abs() < 1e-12);
        assert!((RadialPair::Modified.wronskian(x) + 1.0 / x).abs() < 1e-12 / x);
    }
}

#[test]
fn derivative_recurrences_are_second_order() {
    type Pair = (fn(f64) -> f64, fn(f64) -> f64, f64);
    let pairs: [Pair; 4] = [
        (specfn::j0, specfn::j1, -1.0),
        (specfn::i0, specfn::i1, 1.0),
        (specfn::k0, specfn::k1, -1.0),
        (specfn::y0, specfn::y1, -1.0),
    ];
    for (f, df, sign) in pairs {
        for x in [0.7, 3.0, 9.0] {
            let exact = sign * df(x);
            let err = |h: f64| ((f(x + h) - f(x - h)) / (2.0 * h) - exact).abs();
            let (e1, e2) = (err(1e-2), err(5e-3));
            let order = (e1 / e2).log2();
            assert!((1.8..=2.2).contains(&order), "order {order} at {x}");
        }
    }
}

#[test]
fn regimes_agree_in_overlap_window() {
    for kind in [BesselKind::J0, BesselKind::J1, BesselKind::Y0, BesselKind::Y1] {
        for x in [18.0, 19.0, 20.0, 21.0, 22.0] {
            let s = specfn::eval_series(kind, x);
            let a = specfn::eval_asymptotic(kind, x);
            let env = (2.0 / (std::f64::consts::PI * x)).sqrt();
            assert!((s - a).abs() <= 1e-10 * env, "{kind:?} at {x}: {s} vs {a}");
        }
    }
    for kind in [BesselKind::I0, BesselKind::I1] {
        for x in [19.0, 20.0, 21.0] {
            let s = specfn::eval_series(kind, x);
            let a = specfn::eval_asymptotic(kind, x);
            assert!((s - a).abs() <= 1e-10 * a.abs(), "{kind:?} at {x}: {s} vs {a}");
        }
    }
    // K has three regimes: series up to 2, the integral, then asymptotics.
    for kind in [BesselKind::K0, BesselKind::K1] {
        for x in [1.5, 2.0, 2.5] {
            let s = specfn::eval_series(kind, x);
            let q = specfn::eval_k_integral(kind, x);
            assert!((s - q).abs() <= 1e-10 * q.abs(), "{kind:?} at {x}: {s} vs {q}");
        }
        for x in [19.0, 20.0, 21.0] {
            let s = specfn::eval_k_integral(kind, x);
            let a = specfn::eval_asymptotic(kind, x);
            assert!((s - a).abs() <= 1e-10 * a.abs(), "{kind:?} at {x}: {s} vs {a}");
        }
    }
}

proptest! {
    #[test]
    fn standard_wronskian_holds(x in 0.01f64..50.0) {
        let w = specfn::wronskian_standard(x).unwrap();
        let e = 2.0 / (std::f64::consts::PI * x);
        prop_assert!((w - e).abs() <= 1e-10 * (1.0 + e));
    }

    #[test]
    fn modified_wronskian_holds(x in 0.01f64..50.0) {
        let w = specfn::wronskian_modified(x).unwrap();
        prop_assert!((w - 1.0 / x).abs() <= 1e-10 * (1.0 + 1.0 / x));
    }

    #[test]
    fn modified_functions_are_positive(x in 1e-4f64..100.0) {
        prop_assert!(specfn::i0(x) >= 1.0);
        prop_assert!(specfn::k0(x) > 0.0 && specfn::k1(x) > specfn::k0(x));
    }
}
