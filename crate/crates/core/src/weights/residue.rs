use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{invalid, Error, Result};
use crate::logstructure::{trace, BoundaryComponent, KatoFan, LogChart, Mode, Pair};
use crate::valuations::{LaurentPoly, LaurentRational};

use super::ks::{SubFace, SubFan};
use super::{Form, PluriForm};

/// Terms with zero exponent at `drop`, with those coordinates deleted.
fn restrict(p: &LaurentPoly, drop: &[usize]) -> LaurentPoly {
    let n = p.nvars - drop.len();
    let mut out = LaurentPoly::zero(n);
    for (e, c) in &p.terms {
        if drop.iter().all(|&i| e[i] == 0) {
            let kept: Vec<i64> = e.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, x)| *x).collect();
            out.terms.insert(kept, c.clone());
        }
    }
    out
}

fn restrict_rational(f: &LaurentRational, drop: &[usize], path: &str) -> Result<LaurentRational> {
    let num = restrict(&f.num, drop);
    let den = restrict(&f.den, drop);
    if den.is_zero() {
        return Err(invalid(format!("{path}.den"), "denominator vanishes identically on the stratum"));
    }
    if num.is_zero() {
        return Err(Error::Undefined(format!("{path} vanishes identically on the stratum")));
    }
    Ok(LaurentRational { num, den })
}

/// `Res_{D_J}(η)` and the pair `(D_J, D|_{D_J})` it lives on.
pub fn residue(pair: &Pair, form: &Form, j: &[usize]) -> Result<(Pair, Form)> {
    form.validate(pair)?;
    let mut j: Vec<usize> = j.to_vec();
    j.sort();
    j.dedup();
    if j.is_empty() || !pair.strata.contains(&j) {
        return Err(invalid("stratum", "residues are taken along a nonempty declared stratum"));
    }
    if pair.mode == Mode::Dvf && j.iter().any(|&i| pair.components[i].pi_multiplicity > 0) {
        return Err(Error::Unsupported("dvf residues are taken along horizontal components only".into()));
    }
    let ids: Vec<&str> = j.iter().map(|&i| pair.components[i].id.as_str()).collect();
    let mut charts = Vec::new();
    let mut chart_map = Vec::new();
    for (ci, c) in pair.charts.iter().enumerate() {
        let Some(drop) = pair.positions(ci, &j) else { continue };
        let mut boundary = Vec::new();
        for (bi, b) in c.boundary.iter().enumerate() {
            let idx = pair.component_index(&b.id).unwrap();
            if j.contains(&idx) {
                continue;
            }
            let mut with: Vec<usize> = j.iter().copied().chain(std::iter::once(idx)).collect();
            with.sort();
            if !pair.strata.contains(&with) {
                continue;
            }
            boundary.push(BoundaryComponent {
                id: b.id.clone(),
                coefficient: b.coefficient.clone(),
                equation: restrict_rational(&b.equation, &drop, &format!("charts[{ci}].boundary[{bi}].equation"))?,
                pi_multiplicity: b.pi_multiplicity,
            });
        }
        chart_map.push((ci, drop.clone(), charts.len()));
        charts.push(LogChart {
            name: c.name.clone(),
            coords: c.coords.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, x)| x.clone()).collect(),
            boundary,
            relative_dimension: c.relative_dimension.saturating_sub(j.len()),
        });
    }
    let strata: Vec<Vec<String>> = pair
        .strata
        .iter()
        .filter(|s| j.iter().all(|i| s.contains(i)))
        .map(|s| s.iter().filter(|i| !j.contains(i)).map(|&i| pair.components[i].id.clone()).collect())
        .collect();
    let trace_pair = Pair::new(pair.mode, pair.log_cy, charts, &strata)?;
    let mut pieces = Vec::new();
    for (ci, drop, new) in &chart_map {
        let Some(p) = form.piece(*ci) else { continue };
        if !j.iter().all(|i| p.dlog.contains(i)) {
            return Err(invalid("stratum", format!("{{{}}} is not contained in the dlog set, there is no log pole", ids.join(","))));
        }
        let numerator = restrict_rational(&p.numerator, drop, "numerator")?;
        let dlog: Vec<usize> = p
            .dlog
            .iter()
            .filter(|i| !j.contains(i))
            .map(|&i| trace_pair.component_index(&pair.components[i].id).unwrap())
            .sorted()
            .collect();
        pieces.push(PluriForm { chart: *new, m: p.m, dlog, numerator });
    }
    if pieces.is_empty() {
        return Err(invalid("form", "the form has no expression on a chart cutting the stratum"));
    }
    Ok((trace_pair, Form { m: form.m, pieces }))
}

/// Closure of `sub` inside the stratum `y`: for each piece whose recession cone
/// reaches `α_{I_y} = +∞`, the projection onto the remaining coordinates.
pub fn closure_on_stratum(fan: &KatoFan, sub: &SubFan, y: usize) -> Result<(KatoFan, SubFan)> {
    let t = trace(fan, y)?;
    let iy = &fan.points[y].index_set;
    let keep: Vec<usize> = (0..fan.labels.len()).filter(|i| !iy.contains(i)).collect();
    let mut out = SubFan::empty(sub.mode);
    for f in &sub.faces {
        let px = &fan.points[f.kato_point];
        if !fan.in_closure(f.kato_point, y) {
            continue;
        }
        let jpos: Vec<usize> = (0..px.index_set.len()).filter(|&i| iy.contains(&px.index_set[i])).collect();
        let rest: Vec<usize> = (0..px.index_set.len()).filter(|i| !jpos.contains(i)).collect();
        let vertical: Vec<&Vec<i64>> = f.rays.iter().filter(|r| rest.iter().all(|&i| r[i] == 0)).collect();
        if !jpos.iter().all(|&jp| vertical.iter().any(|r| r[jp] > 0)) {
            continue;
        }
        let set: Vec<usize> = rest.iter().map(|&i| keep.iter().position(|&k| k == px.index_set[i]).unwrap()).collect();
        let x = t.point_with_index_set(&set).unwrap();
        let vertices: Vec<Vec<_>> = f.vertices.iter().map(|v| rest.iter().map(|&i| v[i].clone()).collect()).collect();
        let rays: BTreeSet<Vec<i64>> = f
            .rays
            .iter()
            .map(|r| rest.iter().map(|&i| r[i]).collect::<Vec<_>>())
            .filter(|r| r.iter().any(|&x| x != 0))
            .map(|r| crate::lattice::primitive(&r))
            .collect();
        out.faces.push(SubFace::canonical(x, &vertices, &rays.into_iter().collect::<Vec<_>>(), rest.len())?);
    }
    out.normalize(&t)?;
    Ok((t, out))
}

/// Converts a trivially valued form on a pair with `π`-multiplicities into the
/// dvf normal form `η / (dlog π)^m`: numerator `f · π^{-m}`, dlog set minus
/// the first vertical component of each chart.
pub fn gelfand_leray(pair: &Pair, form: &Form) -> Result<(Pair, Form)> {
    if pair.mode != Mode::Trivial {
        return Err(invalid("mode", "expected a trivially valued pair"));
    }
    form.validate(pair)?;
    let charts: Vec<LogChart> = pair
        .charts
        .iter()
        .map(|c| LogChart { relative_dimension: c.relative_dimension.saturating_sub(1), ..c.clone() })
        .collect();
    let strata: Vec<Vec<String>> = pair.strata.iter().map(|s| s.iter().map(|&i| pair.components[i].id.clone()).collect()).collect();
    let dvf = Pair::new(Mode::Dvf, pair.log_cy, charts, &strata)?;
    let mut pieces = Vec::new();
    for p in &form.pieces {
        let c = &pair.charts[p.chart];
        let verticals: Vec<&BoundaryComponent> = c.boundary.iter().filter(|b| b.is_vertical()).collect();
        let Some(first) = verticals.first() else {
            return Err(invalid("pair", format!("chart {} has no vertical component", c.name)));
        };
        let mut shift = vec![0i64; c.dim()];
        for b in &verticals {
            let idx = pair.component_index(&b.id).unwrap();
            if !p.dlog.contains(&idx) {
                return Err(invalid("form.dlog", format!("vertical component {} must carry a log pole", b.id)));
            }
            shift[c.coordinate_of(&b.id).unwrap()] -= i64::from(p.m) * i64::from(b.pi_multiplicity);
        }
        let e = pair.component_index(&first.id).unwrap();
        let dlog: Vec<usize> = p.dlog.iter().copied().filter(|&i| i != e).collect();
        pieces.push(PluriForm { chart: p.chart, m: p.m, dlog, numerator: p.numerator.shift(&shift) });
    }
    let out = Form { m: form.m, pieces };
    out.validate(&dvf)?;
    Ok((dvf, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::weights::ks_skeleton;
    use crate::weights::tests::plane_pair;

    fn sum() -> LaurentRational {
        LaurentRational::poly(LaurentPoly::from_exact(2, &[(vec![1, 0], q(1)), (vec![0, 1], q(1))]))
    }

    #[test]
    fn residue_restricts_terms() {
        let p = plane_pair("1");
        let f = Form::single(PluriForm { chart: 0, m: 1, dlog: vec![0, 1], numerator: sum() });
        let (tp, r) = residue(&p, &f, &[1]).unwrap();
        assert_eq!(tp.charts[0].coords, vec!["z1"]);
        assert_eq!(tp.components.len(), 1);
        assert_eq!(r.pieces[0].numerator, LaurentRational::monomial(vec![1]));
        assert_eq!(r.pieces[0].dlog, vec![0]);
        assert!(residue(&p, &f, &[0, 1]).is_err());
        let partial = Form::single(PluriForm { chart: 0, m: 1, dlog: vec![0], numerator: sum() });
        assert!(residue(&p, &partial, &[1]).is_err());
    }

    #[test]
    fn closure_law_on_the_plane() {
        let p = plane_pair("1");
        let fan = p.kato_fan().unwrap();
        let f = Form::single(PluriForm { chart: 0, m: 1, dlog: vec![0, 1], numerator: sum() });
        let ks = ks_skeleton(&p, &f).unwrap();
        for y in [1, 2] {
            let (t, cl) = closure_on_stratum(&fan, &ks, y).unwrap();
            let (tp, r) = residue(&p, &f, &fan.points[y].index_set).unwrap();
            let kr = ks_skeleton(&tp, &r).unwrap();
            let tk = tp.kato_fan().unwrap();
            let ids = |k: &KatoFan, s: &SubFan| -> Vec<Vec<String>> {
                s.faces.iter().map(|f| k.points[f.kato_point].generator_labels.clone()).collect()
            };
            assert_eq!(ids(&t, &cl), ids(&tk, &kr));
        }
    }

    #[test]
    fn gelfand_leray_divides_by_pi() {
        let p = Pair::from_json(
            r#"{"mode":"trivial","charts":[{"coords":["x","y"],"boundary":[
            {"id":"X","coefficient":"1","pi_multiplicity":1,"equation":[{"exp":[1,0],"coeff_val":"0","nonzero":true}]},
            {"id":"Y","coefficient":"1","pi_multiplicity":1,"equation":[{"exp":[0,1],"coeff_val":"0","nonzero":true}]}]}],
            "strata":[["X"],["Y"],["X","Y"]]}"#,
        )
        .unwrap();
        let f = Form::single(PluriForm { chart: 0, m: 1, dlog: vec![0, 1], numerator: LaurentRational::one(2) });
        let (d, g) = gelfand_leray(&p, &f).unwrap();
        assert_eq!(d.mode, Mode::Dvf);
        assert_eq!(g.pieces[0].dlog, vec![1]);
        assert_eq!(g.pieces[0].numerator, LaurentRational::monomial(vec![-1, -1]));
    }
}
