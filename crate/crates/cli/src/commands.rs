use crate::output::{csv_sink, num, text_sink};
use crate::{CliError, Global};
use evla_core::damage::{damage_map as run_damage_map, t_crit_upper_bound, table3 as run_table3, DamageParams};
use evla_core::fluence::assemble_and_solve;
use evla_core::params::{region_of, registry_rows, Material, ParamSet, RegionId};
use evla_core::thermal::build_temperature;
use evla_core::validation::{self, ValidationOptions, CRITERIA};
use std::io::Write;

const FLUENCE_GRID: (usize, usize) = (101, 201);
const TEMPERATURE_GRID: (usize, usize) = (41, 81);
const DAMAGE_GRID: (usize, usize) = (21, 41);

/// Blood speed used by `--case 2` when the configuration leaves u = 0 [mm/s].
pub const CASE2_U: f64 = 70.0;

/// Simpson panels per damage integral.
const DAMAGE_PANELS: usize = 64;

fn solver<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Solver(e.to_string())
}

fn axis(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// `xs` with `extra` merged in, sorted and without near-duplicates.
fn with_points(mut xs: Vec<f64>, extra: &[f64]) -> Vec<f64> {
    let tol = 1e-12 * xs.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    for &e in extra {
        if !xs.iter().any(|x| (x - e).abs() <= tol) {
            xs.push(e);
        }
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    xs
}

fn check_times(g: &Global, params: &ParamSet) -> Result<(), CliError> {
    let t_end = params.protocol.t_end;
    match g.times.iter().find(|t| !(0.0..=t_end).contains(*t)) {
        Some(t) => Err(CliError::Config(format!("time {t} s outside [0, {t_end}] s"))),
        None => Ok(()),
    }
}

fn region_name(r: f64, params: &ParamSet) -> &'static str {
    region_of(r, &params.geometry).map_or("", RegionId::name)
}

pub fn fluence(g: &Global, params: &ParamSet) -> Result<(), CliError> {
    check_times(g, params)?;
    let sol = assemble_and_solve(params).map_err(solver)?;
    let geo = &params.geometry;
    let v = params.protocol.v;
    let (nr, nz) = g.grid.unwrap_or(FLUENCE_GRID);
    let radii = with_points(axis(0.0, geo.r_s, nr), &geo.interfaces());
    let mut w = csv_sink(g)?;
    w.write_record(["r_mm", "z_mm", "t_s", "region", "phi_W_per_mm2"])?;
    for &t in &g.times {
        let tip = 0.0 - v * t;
        // φ is defined on the illuminated segment −vt ≤ z ≤ L.
        let on_axis = axis(tip, geo.l, nz);
        let samples = on_axis.iter().map(|&z| (0.0, z)).chain(radii.iter().map(|&r| (r, tip)));
        for (r, z) in samples {
            let phi = sol.eval(r, z, t).map_err(solver)?;
            w.write_record([num(r), num(z), num(t), region_name(r, params).into(), num(phi)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn temperature(g: &Global, mut params: ParamSet, case: Option<u8>) -> Result<(), CliError> {
    match case {
        Some(1) => params.protocol.u = 0.0,
        Some(2) if params.protocol.u == 0.0 => params.protocol.u = CASE2_U,
        _ => {}
    }
    params.validate()?;
    check_times(g, &params)?;
    if params.protocol.case() == 2 {
        log::warn!(
            "case 2 (u = {} mm/s): particular terms only; the modal correction is not implemented for flowing blood",
            params.protocol.u
        );
    }
    let temp = build_temperature(&params).map_err(solver)?;
    let geo = &params.geometry;
    let (nr, nz) = g.grid.unwrap_or(TEMPERATURE_GRID);
    let (radii, zs) = (axis(0.0, geo.r_s, nr), axis(-geo.l, geo.l, nz));
    // values[k][point] for time k, points z-major.
    let mut values = vec![Vec::with_capacity(nr * nz); g.times.len()];
    for &z in &zs {
        for &r in &radii {
            let history = temp.at_point(r, z).map_err(solver)?;
            for (k, &t) in g.times.iter().enumerate() {
                values[k].push(history.eval(t));
            }
        }
    }
    let mut w = csv_sink(g)?;
    w.write_record(["r_mm", "z_mm", "t_s", "region", "T_C"])?;
    for (k, &t) in g.times.iter().enumerate() {
        let points = zs.iter().flat_map(|&z| radii.iter().map(move |&r| (r, z)));
        for ((r, z), value) in points.zip(&values[k]) {
            w.write_record([num(r), num(z), num(t), region_name(r, &params).into(), num(*value)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn table3(g: &Global, params: &ParamSet) -> Result<(), CliError> {
    let mut w = csv_sink(g)?;
    w.write_record(["T_min_C", "region", "computed_s", "paper_s", "rel_err"])?;
    for row in run_table3(params) {
        w.write_record([
            num(row.t_min),
            row.material.name().into(),
            num(row.computed),
            num(row.reference),
            num(row.rel_err),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Ω(t_end) and t_crit on the sample grid. With `tmin`, only points whose
/// peak temperature over the sample times reaches it are kept.
pub fn damage_map(g: &Global, params: &ParamSet, tmin: Option<f64>) -> Result<(), CliError> {
    check_times(g, params)?;
    let temp = build_temperature(params).map_err(solver)?;
    let geo = &params.geometry;
    let (nr, nz) = g.grid.unwrap_or(DAMAGE_GRID);
    let mut points = Vec::with_capacity(nr * nz);
    for z in axis(-geo.l, geo.l, nz) {
        for r in axis(0.0, geo.r_s, nr) {
            points.push((r, z));
        }
    }
    if let Some(t_min) = tmin {
        let mut times = g.times.clone();
        times.push(params.protocol.t_end);
        let mut kept = Vec::new();
        for (r, z) in points {
            let history = temp.at_point(r, z).map_err(solver)?;
            let peak = times.iter().map(|&t| history.eval(t)).fold(f64::NEG_INFINITY, f64::max);
            if peak >= t_min {
                kept.push((r, z));
            }
        }
        points = kept;
        for m in Material::ALL {
            let (bound, _) = t_crit_upper_bound(t_min, &DamageParams::of(params.thermal(m)));
            eprintln!("{}: held at {t_min} C, damage is certain after {} s", m.name(), num(bound));
        }
    }
    let map = run_damage_map(&temp, &points, params, 1.0, DAMAGE_PANELS).map_err(solver)?;
    let mut w = csv_sink(g)?;
    w.write_record(["r_mm", "z_mm", "omega", "t_crit_s"])?;
    for p in &map {
        w.write_record([num(p.r), num(p.z), num(p.omega), p.t_crit.map(num).unwrap_or_default()])?;
    }
    w.flush()?;
    // Earliest t_crit per region on stderr.
    for id in RegionId::ALL {
        let hits: Vec<_> = map
            .iter()
            .filter(|p| region_of(p.r, geo).ok() == Some(id))
            .filter_map(|p| p.t_crit.map(|t| (t, p.r, p.z)))
            .collect();
        match hits.iter().min_by(|a, b| a.0.total_cmp(&b.0)) {
            Some(&(t, r, z)) => eprintln!(
                "{}: {} points reach t_crit, earliest {} s at r = {} mm, z = {} mm",
                id.name(),
                hits.len(),
                num(t),
                num(r),
                num(z)
            ),
            None => eprintln!("{}: no point reaches t_crit", id.name()),
        }
    }
    Ok(())
}

pub fn validate(g: &Global, only: &[String], grid_refine: usize) -> Result<(), CliError> {
    let ids: Vec<&str> = if only.is_empty() {
        CRITERIA.iter().map(|(id, _)| *id).collect()
    } else {
        only.iter()
            .map(|s| {
                validation::find(s).map(|(id, _)| id).ok_or_else(|| {
                    let known: Vec<String> = CRITERIA.iter().map(|(id, n)| format!("{id}/{n}")).collect();
                    CliError::Config(format!("unknown criterion '{s}' (known: {})", known.join(", ")))
                })
            })
            .collect::<Result<_, _>>()?
    };
    let opts = ValidationOptions { grid_refine };
    let mut out = text_sink(g)?;
    let mut failed = Vec::new();
    for id in ids {
        let report = validation::run(id, &opts).expect("known criterion");
        writeln!(out, "{}", report.line())?;
        for d in &report.details {
            writeln!(out, "  {d}")?;
        }
        out.flush()?;
        if !report.passed {
            failed.push(format!("{} {}", report.id, report.name));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join(", ")))
    }
}

pub fn registry(g: &Global) -> Result<(), CliError> {
    let mut w = csv_sink(g)?;
    w.write_record(["region", "wavelength", "key", "value", "unit", "provenance"])?;
    for row in registry_rows() {
        w.write_record([
            row.region.to_string(),
            row.wavelength,
            row.key.into(),
            num(row.value),
            row.unit.into(),
            row.provenance.into(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
