//! The bundled regression suite run by `logskel fixtures`.

use serde_json::{json, Value};

use logskel::arith::{q, qr, ExtQ};
use logskel::complexes::{
    character_variety_complex, cycle, homology, join, link_complex, quotient, random_sphere_points, sphere_quotient_map_check,
    tate_strata, Group, GroupAction, HomologyProfile, TateClassification,
};
use logskel::fixtures;
use logskel::logstructure::{kato_fan_toric, Mode, Pair};
use logskel::polyhedra::{compactified_fan_strata, Fan};
use logskel::valuations::{normalize_dvf, LaurentRational, SkeletonPoint};
use logskel::weights::{gauss_weight_identity, ks_skeleton, log_discrepancy, residue, slice_dvf, weight, Form};

type Check = Result<String, String>;
type Named<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn example() -> Result<(Pair, Form), String> {
    let p = Pair::from_json(fixtures::EXAMPLE_PAIR).map_err(e)?;
    let f = Form::from_json(&p, fixtures::EXAMPLE_FORM).map_err(e)?;
    Ok((p, f))
}

fn p2() -> Result<Fan, String> {
    Fan::from_json(fixtures::P2_FAN).map_err(e)
}

fn p2_strata() -> Check {
    let mut dims: Vec<usize> = compactified_fan_strata(&p2()?).map_err(e)?.iter().map(|s| s.dimension).collect();
    dims.sort_unstable_by(|a, b| b.cmp(a));
    ensure(dims == [2, 1, 1, 1, 0, 0, 0], format!("dimensions {dims:?}"))?;
    Ok("7 strata of dimensions 2,1,1,1,0,0,0".into())
}

fn p2_kato_points() -> Check {
    let n = kato_fan_toric(&p2()?).map_err(e)?.len();
    ensure(n == 7, format!("{n} points"))?;
    Ok("7 Kato points".into())
}

fn example_kato_points() -> Check {
    let (p, _) = example()?;
    let fan = p.kato_fan().map_err(e)?;
    let labels: Vec<&str> = fan.points.iter().map(|x| x.label.as_str()).collect();
    let expected = [
        "{}", "{D1}", "{D2}", "{D3}", "{D4}", "{D1,D2}", "{D1,D3}", "{D2,D3}", "{D2,D4}", "{D3,D4}", "{D1,D2,D3}", "{D2,D3,D4}",
    ];
    ensure(labels == expected, format!("points {labels:?}"))?;
    Ok(format!("{} Kato points matching the listed strata", labels.len()))
}

fn dvf_normalization() -> Check {
    let (p, _) = example()?;
    let fan = p.kato_fan().map_err(e)?;
    let x = fan.point_by_label("{D1,D2,D3}").ok_or("missing point")?;
    let v = SkeletonPoint::finite(&fan, x, &[q(1), q(0), q(0)], Mode::Trivial).map_err(e)?;
    let n = normalize_dvf(&v, &[q(2), q(1), q(1)]).map_err(e)?;
    let expected: Vec<ExtQ> = [qr(1, 2), q(0), q(0)].into_iter().map(ExtQ::Finite).collect();
    ensure(n.weights == expected, format!("{:?}", n.weights))?;
    Ok("(1,0,0) normalizes to (1/2,0,0)".into())
}

fn log_discrepancy_vanishes() -> Check {
    let p = Pair::from_json(fixtures::EXAMPLE_PAIR_TRIVIAL).map_err(e)?;
    let fan = p.kato_fan().map_err(e)?;
    for (x, pt) in fan.points.iter().enumerate().filter(|(_, pt)| pt.index_set.len() == 1) {
        let v = SkeletonPoint::finite(&fan, x, &[q(1)], Mode::Trivial).map_err(e)?;
        let a = log_discrepancy(&p, &fan, &v).map_err(e)?;
        ensure(a == q(0), format!("A(v_{}) = {a}", pt.label))?;
    }
    Ok("A = 0 at every divisorial point".into())
}

fn example_weights() -> Check {
    let (p, f) = example()?;
    let fan = p.kato_fan().map_err(e)?;
    let mut got = Vec::new();
    for (label, w) in [("{D1}", qr(1, 2)), ("{D2}", q(1)), ("{D3}", q(1))] {
        let x = fan.point_by_label(label).ok_or("missing point")?;
        let v = SkeletonPoint::finite(&fan, x, &[w], Mode::Dvf).map_err(e)?;
        got.push(weight(&p, &fan, &f, &v).map_err(e)?);
    }
    ensure(got == [2, 3, 3].map(|x| ExtQ::Finite(q(x))), format!("{got:?}"))?;
    Ok("weights 2, 3, 3".into())
}

fn example_ks() -> Check {
    let (p, f) = example()?;
    let fan = p.kato_fan().map_err(e)?;
    let ks = ks_skeleton(&p, &f).map_err(e)?;
    let d1 = fan.point_by_label("{D1}").ok_or("missing point")?;
    ensure(ks.min_value == Some(q(2)), "minimum is not 2")?;
    ensure(
        ks.faces.len() == 1 && ks.faces[0].kato_point == d1 && ks.faces[0].vertices == [vec![qr(1, 2)]],
        "skeleton is not {v_D1}",
    )?;
    Ok("Sk = {v_D1}, minimum 2".into())
}

fn example_residue() -> Check {
    let (p, f) = example()?;
    let (tp, tf) = residue(&p, &f, &[p.component_index("D4").ok_or("no D4")?]).map_err(e)?;
    let piece = tf.pieces.first().ok_or("empty residue")?;
    let expected: LaurentRational = serde_json::from_value(json!([{"exp": [2, 2], "coeff_val": "0", "coeff": "6"}])).map_err(e)?;
    ensure(tf.pieces.len() == 1 && piece.numerator == expected, format!("{:?}", piece.numerator))?;
    ensure(piece.dlog == [tp.component_index("D3").ok_or("no D3")?], "dlog part is not dT3/T3")?;
    let tk = tp.kato_fan().map_err(e)?;
    let ks = ks_skeleton(&tp, &tf).map_err(e)?;
    ensure(ks.kato_points().len() == tk.len() - 1 && ks.min_value == Some(q(3)), "residue skeleton is not the whole trace")?;
    Ok("Res = 6·T2²T3² dlog T3; its skeleton is the whole trace skeleton".into())
}

fn toric_skeleton() -> Check {
    let fan = p2()?;
    let pair = Pair::from_smooth_fan(&fan, None).map_err(e)?;
    let one: LaurentRational = serde_json::from_value(json!([{"exp": [0, 0], "coeff_val": "0"}])).map_err(e)?;
    let form = Form::toric(&pair, &fan, &one, 1).map_err(e)?;
    let ks = ks_skeleton(&pair, &form).map_err(e)?;
    let kf = pair.kato_fan().map_err(e)?;
    ensure(ks.kato_points().len() == kf.len() && ks.min_value == Some(q(0)), "torus form skeleton is not all of |Σ|")?;
    ensure(ks.faces.iter().all(|f| f.rays.len() == kf.points[f.kato_point].rank()), "a face is not a whole cone")?;
    Ok("torus form on P²: skeleton is the whole fan".into())
}

fn dwork_circle() -> Check {
    let pair = Pair::from_json(fixtures::DWORK_PAIR).map_err(e)?;
    let form = Form::from_json(&pair, fixtures::DWORK_FORM).map_err(e)?;
    let fan = pair.kato_fan().map_err(e)?;
    let ks = ks_skeleton(&pair, &form).map_err(e)?;
    let cx = slice_dvf(&fan, &ks, &[q(1), q(1), q(1)]).map_err(e)?;
    let h = homology(&cx.to_simplicial().map_err(e)?).map_err(e)?;
    ensure(h == HomologyProfile::sphere(1), format!("betti {:?}", h.betti()))?;
    Ok("slice is a circle".into())
}

fn gauss_example() -> Check {
    let r = gauss_weight_identity(&q(1), 1, 2, 1).map_err(e)?;
    ensure(r.holds && (r.log_r.clone(), r.log_triv.clone(), r.log_disc.clone()) == (q(-2), q(-2), q(-4)), format!("{r:?}"))?;
    Ok("exponents (-2, -2, -4), identity holds".into())
}

fn p2_link() -> Check {
    let k = link_complex(&p2()?);
    ensure(k.facets.len() == 3 && homology(&k).map_err(e)? == HomologyProfile::sphere(1), "link is not a 3-cycle")?;
    Ok("link is a 3-cycle".into())
}

fn join_of_squares() -> Check {
    let k = join(&cycle(4), &cycle(4));
    let swap: Vec<usize> = (0..8).map(|v| (v + 4) % 8).collect();
    let qk = quotient(&k, &GroupAction { generators: vec![swap] }).map_err(e)?;
    ensure(homology(&qk).map_err(e)? == HomologyProfile::sphere(3), "quotient is not a homology S³")?;
    Ok("(square * square) / S2 has the homology of S³".into())
}

fn character_varieties() -> Check {
    for (g, n, d) in [(Group::Gl, 2, 3), (Group::Sl, 2, 1)] {
        let cv = character_variety_complex(g, n).map_err(e)?;
        ensure(homology(&cv.quotient.complex).map_err(e)? == HomologyProfile::sphere(d), format!("{g:?} n = {n}"))?;
    }
    Ok("GL n=2 gives S³, SL n=2 gives S¹".into())
}

fn tate_cases() -> Check {
    ensure(matches!(tate_strata(2, &[1, 1]).map_err(e)?, TateClassification::GenericOnly), "(1,1) is not generic-only")?;
    ensure(matches!(tate_strata(2, &[1, -1]).map_err(e)?, TateClassification::SingleDivisor { .. }), "(1,-1) is not a single divisor")?;
    Ok("(1,1) generic only; (1,-1) a single divisor".into())
}

fn sphere_maps(tolerance: f64) -> Check {
    for n in 1..=3 {
        let r = sphere_quotient_map_check(n, &random_sphere_points(n, 1000, n as u64), tolerance).map_err(e)?;
        ensure(r.passed(), format!("n = {n}: {r:?}"))?;
    }
    Ok(format!("n = 1, 2, 3 pass at tolerance {tolerance:e}"))
}

/// Runs every check; the flag is false when some check failed.
pub fn run(tolerance: f64) -> (Value, bool) {
    let checks: Vec<Named> = vec![
        ("p2_compactified_strata", Box::new(p2_strata)),
        ("p2_kato_points", Box::new(p2_kato_points)),
        ("example_kato_points", Box::new(example_kato_points)),
        ("dvf_normalization", Box::new(dvf_normalization)),
        ("log_discrepancy_at_divisorial_points", Box::new(log_discrepancy_vanishes)),
        ("example_weights", Box::new(example_weights)),
        ("example_ks_skeleton", Box::new(example_ks)),
        ("example_residue", Box::new(example_residue)),
        ("toric_skeleton", Box::new(toric_skeleton)),
        ("dwork_slice_circle", Box::new(dwork_circle)),
        ("gauss_exponents", Box::new(gauss_example)),
        ("p2_link", Box::new(p2_link)),
        ("join_of_squares_quotient", Box::new(join_of_squares)),
        ("character_varieties", Box::new(character_varieties)),
        ("tate_cases", Box::new(tate_cases)),
        ("sphere_quotient_maps", Box::new(move || sphere_maps(tolerance))),
    ];
    let mut rows = Vec::new();
    let mut failed = 0;
    for (name, f) in &checks {
        let (passed, detail) = match f() {
            Ok(d) => (true, d),
            Err(d) => {
                failed += 1;
                (false, d)
            }
        };
        rows.push(json!({"name": name, "passed": passed, "detail": detail}));
    }
    let report = json!({"checks": rows, "passed": checks.len() - failed, "failed": failed});
    (report, failed == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes() {
        let (report, ok) = run(1e-9);
        assert!(ok, "{report:#}");
    }
}
