use std::collections::BTreeSet;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::arith::{fmt_q, q, Q};
use crate::error::{Error, Result};
use crate::lattice::{dot_iq, dot_q, neg, primitive_q, rref};
use crate::logstructure::{KatoFan, Mode, Pair};
use crate::polyhedra::{polyhedron_rays, polyhedron_vertices, Cone};
use crate::valuations::LaurentPoly;

use super::Form;

type Affine = (Vec<Q>, Q);

/// A polyhedron `conv(vertices) + cone(rays)` inside the face of a Kato point,
/// in the coordinates given by the point's generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubFace {
    pub kato_point: usize,
    pub vertices: Vec<Vec<Q>>,
    pub rays: Vec<Vec<i64>>,
}

/// A union of polyhedra in the faces of a Kato fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubFan {
    pub mode: Mode,
    pub faces: Vec<SubFace>,
    pub min_value: Option<Q>,
    pub notices: Vec<String>,
}

fn integral(v: &[Q]) -> (Vec<i64>, i64) {
    let l = v.iter().fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<i64> = v.iter().map(|x| i64::try_from(x.numer() * (&l / x.denom())).unwrap_or(i64::MAX)).collect();
    (scaled, i64::try_from(l).unwrap_or(i64::MAX))
}

/// Equalities and facet inequalities `a·x >= b` of `conv(vertices) + cone(rays)`.
pub(crate) fn hrep(vertices: &[Vec<Q>], rays: &[Vec<i64>], k: usize) -> Result<(Vec<Affine>, Vec<Affine>)> {
    let mut gens: Vec<Vec<i64>> = vertices
        .iter()
        .map(|v| {
            let (mut s, l) = integral(v);
            s.push(l);
            s
        })
        .collect();
    gens.extend(rays.iter().map(|r| r.iter().copied().chain(std::iter::once(0)).collect()));
    let cone = Cone::new(k + 1, gens)?;
    let rows: Vec<Vec<i64>> = cone.inequalities().to_vec();
    let set: BTreeSet<&Vec<i64>> = rows.iter().collect();
    let eq_rows: Vec<Vec<Q>> = rows.iter().filter(|h| set.contains(&neg(h))).map(|h| h.iter().map(|&x| q(x)).collect()).collect();
    let (reduced, pivots) = rref(&eq_rows);
    let affine = |h: &[i64]| -> Affine { (h[..k].iter().map(|&x| q(x)).collect(), -q(h[k])) };
    let eqs: Vec<Affine> = reduced.iter().map(|r| affine(&primitive_q(r).expect("nonzero row"))).collect();
    // Inequalities are reduced modulo the equations so that each facet has one
    // printed form; what remains of `t >= 0` is implied by `t = 1` and dropped.
    let mut ineqs = BTreeSet::new();
    for h in rows.iter().filter(|h| !set.contains(&neg(h))) {
        let mut r: Vec<Q> = h.iter().map(|&x| q(x)).collect();
        for (row, &c) in reduced.iter().zip(&pivots) {
            if !r[c].is_zero() {
                let f = r[c].clone();
                r.iter_mut().zip(row).for_each(|(x, y)| *x -= &f * y);
            }
        }
        if r[..k].iter().all(Zero::is_zero) {
            continue;
        }
        ineqs.insert(primitive_q(&r)?);
    }
    Ok((eqs, ineqs.iter().map(|h| affine(h)).collect()))
}

impl SubFace {
    pub fn constraints(&self, fan: &KatoFan) -> Result<(Vec<Affine>, Vec<Affine>)> {
        hrep(&self.vertices, &self.rays, fan.points[self.kato_point].realization.generators.len())
    }

    pub fn contains(&self, fan: &KatoFan, x: &[Q]) -> Result<bool> {
        let (eqs, ineqs) = self.constraints(fan)?;
        Ok(eqs.iter().all(|(a, b)| dot_q(a, x) == *b) && ineqs.iter().all(|(a, b)| dot_q(a, x) >= *b))
    }

    fn contains_face(&self, fan: &KatoFan, other: &SubFace) -> Result<bool> {
        if self.kato_point != other.kato_point {
            return Ok(false);
        }
        let (eqs, ineqs) = self.constraints(fan)?;
        let ok_v = other.vertices.iter().all(|x| eqs.iter().all(|(a, b)| dot_q(a, x) == *b) && ineqs.iter().all(|(a, b)| dot_q(a, x) >= *b));
        let ok_r = other.rays.iter().all(|r| eqs.iter().all(|(a, _)| dot_iq(r, a).is_zero()) && ineqs.iter().all(|(a, _)| !dot_iq(r, a).is_negative()));
        Ok(ok_v && ok_r)
    }

    /// A point of the relative interior.
    pub fn interior_point(&self) -> Vec<Q> {
        let k = self.vertices.first().map_or(0, Vec::len);
        let nv = q(self.vertices.len() as i64);
        (0..k).map(|i| self.vertices.iter().map(|v| v[i].clone()).sum::<Q>() / &nv + self.rays.iter().map(|r| q(r[i])).sum::<Q>()).collect()
    }

    fn meets_open_face(&self) -> bool {
        self.interior_point().iter().all(Signed::is_positive)
    }

    /// Recomputes vertices and rays from the constraints, dropping redundant generators.
    pub(crate) fn canonical(kato_point: usize, vertices: &[Vec<Q>], rays: &[Vec<i64>], k: usize) -> Result<SubFace> {
        let (eqs, ineqs) = hrep(vertices, rays, k)?;
        Ok(SubFace { kato_point, vertices: polyhedron_vertices(&ineqs, &eqs, k), rays: polyhedron_rays(&ineqs, &eqs, k)? })
    }
}

fn fmt_linear(labels: &[String], a: &[Q], rel: &str, b: &Q) -> String {
    let mut s = String::new();
    for (c, l) in a.iter().zip(labels) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let sign = if c.is_negative() { "-" } else { "+" };
        if s.is_empty() {
            if c.is_negative() {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        if mag.is_one() {
            s.push_str(l);
        } else {
            s.push_str(&format!("{}*{l}", fmt_q(&mag)));
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    format!("{s} {rel} {}", fmt_q(b))
}

impl SubFan {
    pub fn empty(mode: Mode) -> SubFan {
        SubFan { mode, faces: Vec::new(), min_value: None, notices: Vec::new() }
    }

    /// Kato points whose open face meets the subfan.
    pub fn kato_points(&self) -> BTreeSet<usize> {
        self.faces.iter().map(|f| f.kato_point).collect()
    }

    pub fn contains(&self, fan: &KatoFan, x: usize, alpha: &[Q]) -> Result<bool> {
        for f in self.faces.iter().filter(|f| f.kato_point == x) {
            if f.contains(fan, alpha)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Removes duplicates and pieces contained in another piece of the same face.
    pub(crate) fn normalize(&mut self, fan: &KatoFan) -> Result<()> {
        let mut faces: Vec<SubFace> = Vec::new();
        let mut seen = BTreeSet::new();
        for f in std::mem::take(&mut self.faces) {
            let k = fan.points[f.kato_point].realization.generators.len();
            let c = SubFace::canonical(f.kato_point, &f.vertices, &f.rays, k)?;
            if seen.insert((c.kato_point, c.vertices.clone(), c.rays.clone())) {
                faces.push(c);
            }
        }
        let mut keep = vec![true; faces.len()];
        for i in 0..faces.len() {
            for j in 0..faces.len() {
                if i != j && keep[j] && faces[j].contains_face(fan, &faces[i])? {
                    keep[i] = false;
                    break;
                }
            }
        }
        let mut out: Vec<SubFace> = faces.into_iter().zip(keep).filter(|(_, k)| *k).map(|(f, _)| f).collect();
        out.sort_by(|a, b| (a.kato_point, &a.vertices, &a.rays).cmp(&(b.kato_point, &b.vertices, &b.rays)));
        self.faces = out;
        Ok(())
    }

    pub fn to_value(&self, fan: &KatoFan) -> Value {
        let faces: Vec<Value> = self
            .faces
            .iter()
            .map(|f| {
                let p = &fan.points[f.kato_point];
                let (eqs, ineqs) = f.constraints(fan).unwrap_or_default();
                let cons: Vec<String> = eqs
                    .iter()
                    .map(|(a, b)| fmt_linear(&p.generator_labels, a, "=", b))
                    .chain(ineqs.iter().map(|(a, b)| fmt_linear(&p.generator_labels, a, ">=", b)))
                    .collect();
                json!({
                    "kato_point": p.label,
                    "generators": p.generator_labels,
                    "constraints": cons,
                    "vertices": f.vertices.iter().map(|v| v.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "rays": f.rays,
                })
            })
            .collect();
        json!({
            "schema": "1",
            "mode": self.mode,
            "faces": faces,
            "min_value": self.min_value.as_ref().map(fmt_q),
            "notices": self.notices,
        })
    }
}

/// `base + Σ_t c_t · min_j ℓ_{t,j}` on the face coordinates.
struct PiecewiseLinear {
    base: Affine,
    terms: Vec<(Q, Vec<Affine>)>,
}

impl PiecewiseLinear {
    fn new(k: usize) -> Self {
        PiecewiseLinear { base: (vec![Q::zero(); k], Q::zero()), terms: Vec::new() }
    }

    fn add_min(&mut self, c: &Q, p: &LaurentPoly, pos: &[usize]) {
        let mut pieces: Vec<Affine> = Vec::new();
        for (e, coeff) in &p.terms {
            let lin: Vec<Q> = pos.iter().map(|&i| q(e[i])).collect();
            match pieces.iter_mut().find(|(l, _)| *l == lin) {
                Some((_, k)) if *k > coeff.coeff_val => *k = coeff.coeff_val.clone(),
                Some(_) => {}
                None => pieces.push((lin, coeff.coeff_val.clone())),
            }
        }
        if pieces.len() == 1 {
            let (l, k) = &pieces[0];
            for (b, x) in self.base.0.iter_mut().zip(l) {
                *b += c * x;
            }
            self.base.1 += c * k;
        } else if !pieces.is_empty() {
            self.terms.push((c.clone(), pieces));
        }
    }

    fn add_linear(&mut self, lin: &[Q], k: &Q) {
        for (b, x) in self.base.0.iter_mut().zip(lin) {
            *b += x;
        }
        self.base.1 += k;
    }

    /// Linear regions: inequalities making the chosen pieces active, and the affine function there.
    fn regions(&self) -> Vec<(Vec<Affine>, Affine)> {
        let mut out = Vec::new();
        for choice in self.terms.iter().map(|(_, p)| 0..p.len()).multi_cartesian_product() {
            let mut ineq = Vec::new();
            let mut f = self.base.clone();
            for ((c, pieces), &j) in self.terms.iter().zip(&choice) {
                let (lj, kj) = &pieces[j];
                for (jj, (l, k)) in pieces.iter().enumerate() {
                    if jj != j {
                        ineq.push((l.iter().zip(lj).map(|(a, b)| a - b).collect::<Vec<_>>(), kj - k));
                    }
                }
                for (fi, x) in f.0.iter_mut().zip(lj) {
                    *fi += c * x;
                }
                f.1 += c * kj;
            }
            out.push((ineq, f));
        }
        if self.terms.is_empty() {
            out.push((Vec::new(), self.base.clone()));
        }
        out
    }
}

struct FaceRegion {
    kato_point: usize,
    ineq: Vec<Affine>,
    eq: Vec<Affine>,
    f: Affine,
    min: Q,
}

/// Minimizes the weight of `form` over the skeleton of `pair` and returns the argmin.
pub fn ks_skeleton(pair: &Pair, form: &Form) -> Result<SubFan> {
    form.validate(pair)?;
    let fan = pair.kato_fan()?;
    let mut regions: Vec<FaceRegion> = Vec::new();
    let mut notices = Vec::new();
    for (x, p) in fan.points.iter().enumerate() {
        let k = p.index_set.len();
        let chart = p.realization.chart;
        let Some(piece) = form.piece(chart) else {
            return Err(Error::Validation {
                path: "form".into(),
                message: format!("no expression on chart {} realizing {}", pair.charts[chart].name, p.label),
            });
        };
        let mut eq = Vec::new();
        if pair.mode == Mode::Dvf {
            let b: Vec<Q> = pair.multiplicities(&p.index_set).into_iter().map(|x| q(i64::from(x))).collect();
            if b.iter().all(Zero::is_zero) {
                continue;
            }
            eq.push((b, Q::one()));
        }
        let pos = pair.positions(chart, &p.index_set).expect("realizing chart cuts the stratum");
        let m = q(i64::from(piece.m));
        let c = &pair.charts[chart];
        let mut pl = PiecewiseLinear::new(k);
        pl.add_min(&Q::one(), &piece.numerator.num, &pos);
        pl.add_min(&-Q::one(), &piece.numerator.den, &pos);
        for b in piece.correction_components(pair, c) {
            pl.add_min(&m, &b.equation.num, &pos);
            pl.add_min(&-m.clone(), &b.equation.den, &pos);
        }
        if pair.mode == Mode::Dvf {
            pl.add_linear(&vec![Q::zero(); k], &m);
        }
        pl.add_linear(&vec![m.clone(); k], &Q::zero());
        for b in &c.boundary {
            let ma = &m * &b.coefficient;
            pl.add_min(&-ma.clone(), &b.equation.num, &pos);
            pl.add_min(&ma, &b.equation.den, &pos);
        }
        for (mut ineq, f) in pl.regions() {
            for i in 0..k {
                let mut e = vec![Q::zero(); k];
                e[i] = Q::one();
                ineq.push((e, Q::zero()));
            }
            let verts = polyhedron_vertices(&ineq, &eq, k);
            if verts.is_empty() {
                continue;
            }
            for r in polyhedron_rays(&ineq, &eq, k)? {
                if dot_iq(&r, &f.0).is_negative() {
                    let dir: Vec<String> = p.generator_labels.iter().zip(&r).filter(|(_, x)| **x != 0).map(|(l, x)| format!("{x}*{l}")).collect();
                    return Err(Error::Unbounded { ray: format!("{} in direction {}", p.label, dir.join(" + ")) });
                }
            }
            let min = verts.iter().map(|v| dot_q(&f.0, v) + &f.1).min().unwrap();
            regions.push(FaceRegion { kato_point: x, ineq, eq: eq.clone(), f, min });
        }
    }
    let Some(global) = regions.iter().map(|r| r.min.clone()).min() else {
        notices.push("the skeleton is empty".into());
        return Ok(SubFan { mode: pair.mode, faces: Vec::new(), min_value: None, notices });
    };
    let mut out = SubFan { mode: pair.mode, faces: Vec::new(), min_value: Some(global.clone()), notices };
    for r in regions.iter().filter(|r| r.min == global) {
        let k = fan.points[r.kato_point].index_set.len();
        let mut eq = r.eq.clone();
        eq.push((r.f.0.clone(), &global - &r.f.1));
        let vertices = polyhedron_vertices(&r.ineq, &eq, k);
        let rays = polyhedron_rays(&r.ineq, &eq, k)?;
        let face = SubFace { kato_point: r.kato_point, vertices, rays };
        if face.meets_open_face() {
            out.faces.push(face);
        }
    }
    if pair.mode == Mode::Trivial && !global.is_zero() {
        out.notices.push(format!("minimal weight is {}, the form is not log canonical at the trivial valuation", fmt_q(&global)));
    }
    out.normalize(&fan)?;
    Ok(out)
}

/// Union of the Kontsevich-Soibelman skeleta of `forms`.
pub fn essential_skeleton(pair: &Pair, forms: &[Form]) -> Result<SubFan> {
    let fan = pair.kato_fan()?;
    let mut out = SubFan::empty(pair.mode);
    if forms.is_empty() {
        out.notices.push("no forms given: the essential skeleton is empty".into());
        return Ok(out);
    }
    for f in forms {
        let ks = ks_skeleton(pair, f)?;
        out.faces.extend(ks.faces);
        out.notices.extend(ks.notices);
    }
    out.normalize(&fan)?;
    Ok(out)
}

/// Essential skeleton of a log Calabi-Yau pair: the faces of `D^{=1}`.
pub fn essential_skeleton_log_cy(pair: &Pair) -> Result<SubFan> {
    if pair.mode != Mode::Trivial {
        return Err(Error::Unsupported("the log Calabi-Yau shortcut applies to trivially valued pairs".into()));
    }
    let fan = pair.kato_fan()?;
    let mut out = SubFan::empty(Mode::Trivial);
    if !pair.log_cy {
        out.notices.push("pair is not flagged log Calabi-Yau".into());
    }
    for (x, p) in fan.points.iter().enumerate() {
        if p.index_set.iter().all(|&i| pair.components[i].coefficient.is_one()) {
            let k = p.index_set.len();
            let rays = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
            out.faces.push(SubFace { kato_point: x, vertices: vec![vec![Q::zero(); k]], rays });
        }
    }
    out.min_value = Some(Q::zero());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;
    use crate::weights::tests::{monomial, plane_pair};
    use crate::weights::PluriForm;
    use crate::valuations::LaurentRational;

    fn sum_form() -> Form {
        let f = LaurentRational::poly(LaurentPoly::from_exact(2, &[(vec![1, 0], q(1)), (vec![0, 1], q(1))]));
        Form::single(PluriForm { chart: 0, m: 1, dlog: vec![0, 1], numerator: f })
    }

    #[test]
    fn sum_of_coordinates_gives_the_two_rays() {
        let p = plane_pair("1");
        let ks = ks_skeleton(&p, &sum_form()).unwrap();
        assert_eq!(ks.min_value, Some(q(0)));
        assert_eq!(ks.kato_points(), BTreeSet::from([0, 1, 2]));
        for f in &ks.faces {
            assert_eq!(f.rays.len(), f.vertices[0].len());
        }
    }

    #[test]
    fn unit_form_gives_everything() {
        let p = plane_pair("1");
        let f = Form::single(PluriForm { chart: 0, m: 1, dlog: vec![0, 1], numerator: monomial(&[0, 0]) });
        let ks = ks_skeleton(&p, &f).unwrap();
        assert_eq!(ks.kato_points(), BTreeSet::from([0, 1, 2, 3]));
        let fan = p.kato_fan().unwrap();
        assert!(ks.contains(&fan, 3, &[q(4), qr(1, 3)]).unwrap());
    }

    #[test]
    fn pole_is_reported() {
        let p = plane_pair("1");
        let f = Form::single(PluriForm { chart: 0, m: 1, dlog: vec![0, 1], numerator: monomial(&[-1, 0]) });
        match ks_skeleton(&p, &f) {
            Err(Error::Unbounded { ray }) => assert!(ray.contains("D1"), "{ray}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn half_coefficient_excluded() {
        let p = plane_pair("1/2");
        let f = Form::single(PluriForm { chart: 0, m: 2, dlog: vec![0, 1], numerator: monomial(&[0, 0]) });
        let ks = ks_skeleton(&p, &f).unwrap();
        assert_eq!(ks.kato_points(), BTreeSet::from([0, 2]));
        let cy = essential_skeleton_log_cy(&p).unwrap();
        assert_eq!(cy.kato_points(), BTreeSet::from([0, 2]));
        assert!(essential_skeleton(&p, &[]).unwrap().faces.is_empty());
    }

    #[test]
    fn constraint_text() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert_eq!(fmt_linear(&labels, &[q(1), q(-2)], ">=", &q(0)), "a - 2*b >= 0");
        assert_eq!(fmt_linear(&labels, &[q(0), qr(-1, 2)], "=", &q(1)), "-1/2*b = 1");
    }
}
