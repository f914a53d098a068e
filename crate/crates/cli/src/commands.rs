use std::path::Path;

use serde_json::{json, Value};

use logskel::arith::{fmt_q, parse_q, q, Q};
use logskel::complexes::{
    character_variety_complex, homology, link_complex, random_sphere_points, sphere_quotient_map_check, tate_strata, Group,
    SimplicialComplex,
};
use logskel::logstructure::{kato_fan_toric, trace, KatoFan, Mode, Pair};
use logskel::polyhedra::compactified_fan_strata;
use logskel::valuations::{classify_closure_point, normalize_dvf, SkeletonPoint};
use logskel::weights::{
    essential_skeleton, essential_skeleton_log_cy, gauss_weight_identity, ks_skeleton, residue, slice_dvf, weight, Form, SubFan,
};

use crate::io::{load_fan, load_form, load_pair, load_value, write_file};
use crate::{lib_err, CliError, Source};

type Report = Result<Value, CliError>;

fn kato_fan_of(src: &Source) -> Result<(Option<Pair>, KatoFan), CliError> {
    match src {
        Source { pair: Some(p), .. } => {
            let pair = load_pair(p)?;
            let fan = pair.kato_fan().map_err(lib_err)?;
            Ok((Some(pair), fan))
        }
        Source { fan: Some(f), .. } => Ok((None, kato_fan_toric(&load_fan(f)?).map_err(lib_err)?)),
        _ => Err(CliError::Input("give --pair or --fan".into())),
    }
}

pub fn skeleton(src: &Source) -> Report {
    let (pair, fan) = kato_fan_of(src)?;
    let mut out = json!({ "kato_fan": fan.to_value() });
    if let Some(p) = pair {
        out["pair"] = p.to_value();
    }
    Ok(out)
}

/// Points from a JSON list, or from `{"points": [...]}`.
fn read_points(fan: &KatoFan, spec: &str) -> Result<Vec<SkeletonPoint>, CliError> {
    let v = load_value(spec)?;
    let list = v.get("points").unwrap_or(&v).as_array().ok_or_else(|| CliError::Input(format!("{spec}: expected a list of points")))?;
    list.iter()
        .enumerate()
        .map(|(i, p)| SkeletonPoint::from_value(fan, p).map_err(|e| CliError::Input(format!("{spec}: points[{i}]: {e}"))))
        .collect()
}

pub fn closure(src: &Source, points: Option<&str>) -> Report {
    let (_, fan) = kato_fan_of(src)?;
    let mut strata = Vec::new();
    for y in 0..fan.len() {
        let t = trace(&fan, y).map_err(lib_err)?;
        strata.push(json!({
            "stratum": fan.points[y].label,
            "dimension": t.points.iter().map(|p| p.rank()).max().unwrap_or(0),
            "kato_points": t.points.iter().map(|p| p.label.clone()).collect::<Vec<_>>(),
        }));
    }
    let mut out = json!({ "strata": strata });
    if let Some(f) = &src.fan {
        let toric = load_fan(f)?;
        let cs = compactified_fan_strata(&toric).map_err(lib_err)?;
        out["orbit_closures"] = cs
            .iter()
            .map(|s| json!({"cone": toric.cones[s.cone], "dimension": s.dimension, "fan": s.fan}))
            .collect();
    }
    if let Some(spec) = points {
        let mut rows = Vec::new();
        for v in read_points(&fan, spec)? {
            let (y, t, p) = classify_closure_point(&fan, &v).map_err(lib_err)?;
            rows.push(json!({"input": v.to_value(&fan), "stratum": fan.points[y].label, "point": p.to_value(&t)}));
        }
        out["classified"] = Value::Array(rows);
    }
    Ok(out)
}

/// The divisorial points `v_D` of the rank-one Kato points; in dvf mode they
/// are normalized and horizontal components are skipped.
fn divisorial_points(pair: &Pair, fan: &KatoFan) -> Result<Vec<SkeletonPoint>, CliError> {
    let mut out = Vec::new();
    for (x, p) in fan.points.iter().enumerate().filter(|(_, p)| p.index_set.len() == 1) {
        let v = SkeletonPoint::finite(fan, x, &[q(1)], Mode::Trivial).map_err(lib_err)?;
        if pair.mode == Mode::Dvf {
            let b: Vec<Q> = pair.multiplicities(&p.index_set).into_iter().map(|m| q(m.into())).collect();
            if b.iter().all(|x| *x == q(0)) {
                continue;
            }
            out.push(normalize_dvf(&v, &b).map_err(lib_err)?);
        } else {
            out.push(v);
        }
    }
    Ok(out)
}

pub fn weight_report(pair_spec: &str, form_spec: &str, points: Option<&str>) -> Report {
    let pair = load_pair(pair_spec)?;
    let form = load_form(&pair, form_spec)?;
    let fan = pair.kato_fan().map_err(lib_err)?;
    let pts = match points {
        Some(spec) => read_points(&fan, spec)?,
        None => divisorial_points(&pair, &fan)?,
    };
    let mut rows = Vec::new();
    for v in &pts {
        let w = weight(&pair, &fan, &form, v).map_err(lib_err)?;
        rows.push(json!({"point": v.to_value(&fan), "weight": w.to_string()}));
    }
    Ok(json!({ "mode": pair.mode, "values": rows }))
}

fn forms(pair: &Pair, specs: &[String]) -> Result<Vec<Form>, CliError> {
    specs.iter().map(|s| load_form(pair, s)).collect()
}

pub fn ks(pair_spec: &str, form_spec: &str) -> Report {
    let pair = load_pair(pair_spec)?;
    let form = load_form(&pair, form_spec)?;
    let fan = pair.kato_fan().map_err(lib_err)?;
    Ok(ks_skeleton(&pair, &form).map_err(lib_err)?.to_value(&fan))
}

fn essential_of(pair: &Pair, specs: &[String]) -> Result<SubFan, CliError> {
    if specs.is_empty() {
        essential_skeleton_log_cy(pair).map_err(lib_err)
    } else {
        essential_skeleton(pair, &forms(pair, specs)?).map_err(lib_err)
    }
}

pub fn essential(pair_spec: &str, form_specs: &[String]) -> Report {
    let pair = load_pair(pair_spec)?;
    let fan = pair.kato_fan().map_err(lib_err)?;
    Ok(essential_of(&pair, form_specs)?.to_value(&fan))
}

/// `b` from `{"b": {component: "p/q"}}`, defaulting to the multiplicities in `π`.
fn slice_weights(pair: &Pair, fan: &KatoFan, spec: Option<&str>) -> Result<Vec<Q>, CliError> {
    let Some(spec) = spec else {
        return Ok(fan.labels.iter().map(|l| q(pair.components[pair.component_index(l).unwrap()].pi_multiplicity.into())).collect());
    };
    let v = load_value(spec)?;
    let map = v.get("b").and_then(Value::as_object).ok_or_else(|| CliError::Input(format!("{spec}: expected an object \"b\"")))?;
    fan.labels
        .iter()
        .map(|l| {
            let s = map.get(l).and_then(Value::as_str).ok_or_else(|| CliError::Input(format!("{spec}: b.{l} is missing")))?;
            parse_q(s).map_err(|e| CliError::Input(format!("{spec}: b.{l}: {e}")))
        })
        .collect()
}

fn complex_report(k: &SimplicialComplex, off: Option<&Path>) -> Report {
    if let Some(p) = off {
        write_file(p, &k.to_off(None))?;
    }
    let h = homology(k).map_err(lib_err)?;
    Ok(json!({ "complex": k, "f_vector": k.f_vector(), "homology": h, "betti": h.betti() }))
}

pub fn slice(pair_spec: &str, form_specs: &[String], b: Option<&str>, off: Option<&Path>) -> Report {
    let pair = load_pair(pair_spec)?;
    let fan = pair.kato_fan().map_err(lib_err)?;
    let sk = essential_of(&pair, form_specs)?;
    let b = slice_weights(&pair, &fan, b)?;
    let cx = slice_dvf(&fan, &sk, &b).map_err(lib_err)?;
    let simplicial = cx.to_simplicial().map_err(lib_err)?;
    let mut out = complex_report(&simplicial, off)?;
    out["b"] = fan.labels.iter().cloned().zip(b.iter().map(|x| json!(fmt_q(x)))).collect::<serde_json::Map<_, _>>().into();
    out["slice"] = cx.to_value(&fan);
    Ok(out)
}

pub fn residue_report(pair_spec: &str, form_spec: &str, along: &[String]) -> Report {
    let pair = load_pair(pair_spec)?;
    let form = load_form(&pair, form_spec)?;
    let j: Vec<usize> = along
        .iter()
        .map(|id| pair.component_index(id).ok_or_else(|| CliError::Input(format!("unknown component {id:?}"))))
        .collect::<Result<_, _>>()?;
    let (tp, tf) = residue(&pair, &form, &j).map_err(lib_err)?;
    let tk = tp.kato_fan().map_err(lib_err)?;
    let ks = ks_skeleton(&tp, &tf).map_err(lib_err)?;
    Ok(json!({ "pair": tp.to_value(), "form": tf.to_value(&tp), "ks": ks.to_value(&tk) }))
}

pub fn dual_complex(src: &Source, off: Option<&Path>) -> Report {
    let k = match src {
        Source { pair: Some(p), .. } => {
            let pair = load_pair(p)?;
            let strata: Vec<&Vec<usize>> = pair.strata.iter().filter(|s| !s.is_empty()).collect();
            let facets: Vec<Vec<String>> = strata
                .iter()
                .filter(|s| !strata.iter().any(|t| t.len() > s.len() && s.iter().all(|i| t.contains(i))))
                .map(|s| s.iter().map(|&i| pair.components[i].id.clone()).collect())
                .collect();
            SimplicialComplex::from_labeled_facets(&facets).map_err(lib_err)?
        }
        Source { fan: Some(f), .. } => link_complex(&load_fan(f)?),
        _ => return Err(CliError::Input("give --pair or --fan".into())),
    };
    complex_report(&k, off)
}

pub fn homology_report(spec: &str, off: Option<&Path>) -> Report {
    let v = load_value(spec)?;
    let raw: SimplicialComplex = serde_json::from_value(v).map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
    let k = SimplicialComplex::from_facets(raw.labels, raw.facets).map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
    complex_report(&k, off)
}

pub fn character_variety(group: Group, n: usize, off: Option<&Path>) -> Report {
    let cv = character_variety_complex(group, n).map_err(lib_err)?;
    let h = homology(&cv.quotient.complex).map_err(lib_err)?;
    if let Some(p) = off {
        write_file(p, &cv.quotient.complex.to_off(None))?;
    }
    let d = match group {
        Group::Gl => 2 * n - 1,
        Group::Sl => 2 * n - 3,
    };
    Ok(json!({
        "group": group,
        "n": n,
        "cover_f_vector": cv.cover.f_vector(),
        "group_order": cv.quotient.group_order,
        "subdivisions": cv.quotient.subdivisions,
        "quotient_f_vector": cv.quotient.complex.f_vector(),
        "homology": h,
        "betti": h.betti(),
        "expected_sphere_dimension": d,
        "sphere_profile": h == logskel::complexes::HomologyProfile::sphere(d),
    }))
}

pub fn tate(n: usize, alpha: &[i64]) -> Report {
    let c = tate_strata(n, alpha).map_err(lib_err)?;
    Ok(json!({ "n": n, "alpha": alpha, "classification": c }))
}

pub fn gauss(c: &str, a: u64, l: u64, m: u64) -> Report {
    let c = parse_q(c).map_err(|e| CliError::Input(format!("--c: {e}")))?;
    let r = gauss_weight_identity(&c, a, l, m).map_err(lib_err)?;
    Ok(serde_json::to_value(r).expect("record serializes"))
}

pub fn sphere_check(n: usize, samples: usize, seed: u64, tolerance: f64) -> Report {
    let pts = random_sphere_points(n, samples, seed);
    let r = sphere_quotient_map_check(n, &pts, tolerance).map_err(lib_err)?;
    Ok(json!({
        "n": r.n,
        "samples": r.samples,
        "tolerance": r.tolerance,
        "orbit_defect": r.orbit_defect,
        "norm_defect": r.norm_defect,
        "recovery_defect": r.recovery_defect,
        "orbits_equal": r.orbits_equal,
        "on_sphere": r.on_sphere,
        "injective": r.injective,
        "passed": r.passed(),
    }))
}
