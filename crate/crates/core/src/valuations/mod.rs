//! Quasi-monomial (semi)valuations attached to Kato points and their tropical
//! evaluation on Laurent data.

mod laurent;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

pub use laurent::{Coeff, LaurentPoly, LaurentRational};

use crate::arith::{q, ExtQ, Q};
use crate::error::{invalid, Error, Result};
use crate::lattice::{dot_iq, solve_q};
use crate::logstructure::{trace, KatoFan, Mode, Pair};

/// A point of the closure of a skeleton face: weights on the generators of `C_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonPoint {
    pub kato_point: usize,
    pub weights: Vec<ExtQ>,
    pub mode: Mode,
}

/// A skeleton point in local lattice coordinates: a finite part `n` and the
/// local rays along which it has escaped to infinity.
#[derive(Debug, Clone)]
struct LocalPoint {
    n: Vec<Q>,
    inf_rays: Vec<usize>,
}

impl SkeletonPoint {
    /// Checks that the weights define a monoid homomorphism `C_x → R̄_{≥0}`.
    pub fn new(fan: &KatoFan, kato_point: usize, weights: Vec<ExtQ>, mode: Mode) -> Result<SkeletonPoint> {
        let p = fan.points.get(kato_point).ok_or_else(|| invalid("kato_point", format!("no Kato point {kato_point}")))?;
        if weights.len() != p.realization.generators.len() {
            return Err(invalid("weights", format!("expected {} weights, got {}", p.realization.generators.len(), weights.len())));
        }
        if let Some(i) = weights.iter().position(|w| w.finite().is_some_and(Signed::is_negative)) {
            return Err(invalid(format!("weights[{i}]"), "weights must be nonnegative"));
        }
        let v = SkeletonPoint { kato_point, weights, mode };
        v.local(fan)?;
        Ok(v)
    }

    pub fn finite(fan: &KatoFan, kato_point: usize, weights: &[Q], mode: Mode) -> Result<SkeletonPoint> {
        SkeletonPoint::new(fan, kato_point, weights.iter().cloned().map(ExtQ::Finite).collect(), mode)
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| !w.is_infinite())
    }

    /// Finite weights, when all of them are finite.
    pub fn finite_weights(&self) -> Option<Vec<Q>> {
        self.weights.iter().map(|w| w.finite().cloned()).collect()
    }

    fn local(&self, fan: &KatoFan) -> Result<LocalPoint> {
        let r = &fan.points[self.kato_point].realization;
        let k = r.rank();
        let finite: Vec<usize> = (0..self.weights.len()).filter(|&j| !self.weights[j].is_infinite()).collect();
        let inf_rays: Vec<usize> =
            (0..r.rays.len()).filter(|&i| finite.iter().all(|&j| crate::lattice::dot(&r.generators[j], &r.rays[i]) == 0)).collect();
        let expected: Vec<usize> = (0..self.weights.len())
            .filter(|&j| inf_rays.iter().all(|&i| crate::lattice::dot(&r.generators[j], &r.rays[i]) == 0))
            .collect();
        if expected != finite {
            return Err(invalid("weights", "infinite weights do not cut out a face of the cone"));
        }
        let n = if k == 0 {
            Vec::new()
        } else {
            let a: Vec<Vec<Q>> = finite.iter().map(|&j| r.generators[j].iter().map(|&x| q(x)).collect()).collect();
            let b: Vec<Q> = finite.iter().map(|&j| self.weights[j].finite().unwrap().clone()).collect();
            if a.is_empty() {
                vec![Q::zero(); k]
            } else {
                solve_q(&a, &b).ok_or_else(|| invalid("weights", "weights are not additive on the monoid"))?
            }
        };
        Ok(LocalPoint { n, inf_rays })
    }

    pub fn to_value(&self, fan: &KatoFan) -> Value {
        json!({
            "kato_point": fan.points[self.kato_point].label,
            "weights": self.weights.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "mode": self.mode,
        })
    }

    pub fn from_value(fan: &KatoFan, v: &Value) -> Result<SkeletonPoint> {
        let label = v.get("kato_point").ok_or_else(|| invalid("kato_point", "missing"))?;
        let x = match label {
            Value::String(s) => fan.point_by_label(s),
            Value::Number(n) => n.as_u64().map(|i| i as usize).filter(|&i| i < fan.len()),
            _ => None,
        }
        .ok_or_else(|| invalid("kato_point", format!("unknown Kato point {label}")))?;
        let ws = v.get("weights").and_then(Value::as_array).ok_or_else(|| invalid("weights", "expected a list"))?;
        let weights = ws
            .iter()
            .enumerate()
            .map(|(i, w)| match w {
                Value::String(s) => ExtQ::parse(s).map_err(|_| invalid(format!("weights[{i}]"), format!("cannot parse {s:?}"))),
                Value::Number(n) => n.as_i64().map(|x| ExtQ::Finite(q(x))).ok_or_else(|| invalid(format!("weights[{i}]"), "expected an integer")),
                _ => Err(invalid(format!("weights[{i}]"), "expected \"p/q\" or \"inf\"")),
            })
            .collect::<Result<Vec<_>>>()?;
        let mode = match v.get("mode").and_then(Value::as_str) {
            None | Some("trivial") => Mode::Trivial,
            Some("dvf") => Mode::Dvf,
            Some(m) => return Err(invalid("mode", format!("unknown mode {m:?}"))),
        };
        SkeletonPoint::new(fan, x, weights, mode)
    }
}

fn monomial_value(fan: &KatoFan, v: &SkeletonPoint, lp: &LocalPoint, exp: &[i64]) -> Result<ExtQ> {
    let r = &fan.points[v.kato_point].realization;
    let u = r.local_exponent(exp);
    let signs: Vec<i64> = lp.inf_rays.iter().map(|&i| crate::lattice::dot(&u, &r.rays[i])).collect();
    if signs.iter().all(|&s| s == 0) {
        Ok(ExtQ::Finite(dot_iq(&u, &lp.n)))
    } else if signs.iter().all(|&s| s >= 0) {
        Ok(ExtQ::Infinity)
    } else {
        Err(Error::Undefined(format!("monomial {exp:?} has a pole along the boundary stratum of {}", fan.points[v.kato_point].label)))
    }
}

fn poly_value(fan: &KatoFan, v: &SkeletonPoint, lp: &LocalPoint, p: &LaurentPoly) -> Result<ExtQ> {
    let mut best = ExtQ::Infinity;
    for (e, c) in &p.terms {
        best = best.min(ExtQ::Finite(c.coeff_val.clone()) + monomial_value(fan, v, lp, e)?);
    }
    Ok(best)
}

/// Tropical value `v(f)`: min over numerator terms minus min over denominator terms.
/// Exact for admissible expansions, a lower bound otherwise.
pub fn evaluate(fan: &KatoFan, v: &SkeletonPoint, f: &LaurentRational) -> Result<ExtQ> {
    let r = &fan.points[v.kato_point].realization;
    let d = fan.chart_dim(r.chart);
    if f.num.is_zero() {
        return Err(Error::Undefined("the zero function has no valuation".into()));
    }
    f.validate("f", d)?;
    let lp = v.local(fan)?;
    let num = poly_value(fan, v, &lp, &f.num)?;
    match poly_value(fan, v, &lp, &f.den)? {
        ExtQ::Infinity => Err(Error::Undefined("denominator vanishes on the stratum".into())),
        ExtQ::Finite(b) => Ok(match num {
            ExtQ::Infinity => ExtQ::Infinity,
            ExtQ::Finite(a) => ExtQ::Finite(a - b),
        }),
    }
}

/// Value of `f` at the monomial valuation with weights `w` on chart coordinates.
pub fn evaluate_chart(w: &[Q], f: &LaurentRational) -> Result<Q> {
    if f.num.is_zero() {
        return Err(Error::Undefined("the zero function has no valuation".into()));
    }
    f.validate("f", w.len())?;
    let val = |p: &LaurentPoly| p.terms.iter().map(|(e, c)| &c.coeff_val + dot_iq(e, w)).min().unwrap();
    Ok(val(&f.num) - val(&f.den))
}

/// `a · v`; only trivially valued points can be scaled.
pub fn scale(a: &Q, v: &SkeletonPoint) -> Result<SkeletonPoint> {
    if v.mode != Mode::Trivial {
        return Err(Error::Unsupported("normalized dvf points cannot be rescaled".into()));
    }
    if a.is_negative() {
        return Err(invalid("a", "scale factor must be nonnegative"));
    }
    Ok(SkeletonPoint { kato_point: v.kato_point, weights: v.weights.iter().map(|w| w.scale(a)).collect::<Result<_>>()?, mode: v.mode })
}

/// Restriction of chart weights to the boundary coordinates.
pub fn retract(chart_weights: &[Q], boundary: &[usize]) -> Result<Vec<Q>> {
    if let Some(i) = chart_weights.iter().position(Signed::is_negative) {
        return Err(invalid(format!("chart_weights[{i}]"), "weights must be nonnegative"));
    }
    boundary
        .iter()
        .map(|&i| chart_weights.get(i).cloned().ok_or_else(|| invalid("boundary", format!("coordinate {i} out of range"))))
        .collect()
}

/// Retraction of a chart monomial point onto the skeleton of `pair`.
pub fn retract_point(pair: &Pair, fan: &KatoFan, chart: usize, chart_weights: &[Q]) -> Result<SkeletonPoint> {
    let c = pair.charts.get(chart).ok_or_else(|| invalid("chart", format!("no chart {chart}")))?;
    if chart_weights.len() != c.dim() {
        return Err(invalid("chart_weights", format!("expected {} weights", c.dim())));
    }
    let mut set = Vec::new();
    let mut pos = Vec::new();
    for (i, comp) in pair.components.iter().enumerate() {
        if let Some(k) = c.coordinate_of(&comp.id) {
            if chart_weights[k].is_positive() {
                set.push(i);
                pos.push(k);
            }
        }
    }
    let w = retract(chart_weights, &pos)?;
    let x = fan.point_with_index_set(&set).ok_or_else(|| invalid("chart_weights", "the center is not a declared stratum"))?;
    SkeletonPoint::finite(fan, x, &w, pair.mode)
}

/// The stratum `D_y` containing the limit of `v`, and the corresponding point of `Sk(D_y)`.
pub fn classify_closure_point(fan: &KatoFan, v: &SkeletonPoint) -> Result<(usize, KatoFan, SkeletonPoint)> {
    if v.is_finite() {
        return Ok((0, fan.clone(), v.clone()));
    }
    if let (Some((a, b)), Some((x1, x2))) = (fan.factor_fans(), fan.factor_points(v.kato_point)) {
        let k1 = a.points[x1].realization.generators.len();
        let v1 = SkeletonPoint { kato_point: x1, weights: v.weights[..k1].to_vec(), mode: v.mode };
        let v2 = SkeletonPoint { kato_point: x2, weights: v.weights[k1..].to_vec(), mode: v.mode };
        let (y1, _, w1) = classify_closure_point(a, &v1)?;
        let (y2, _, w2) = classify_closure_point(b, &v2)?;
        let y = (0..fan.len()).find(|&i| fan.factor_points(i) == Some((y1, y2))).unwrap();
        let t = trace(fan, y)?;
        let x = (0..t.len()).find(|&i| t.factor_points(i) == Some((w1.kato_point, w2.kato_point))).unwrap();
        let weights = w1.weights.into_iter().chain(w2.weights).collect();
        return Ok((y, t.clone(), SkeletonPoint::new(&t, x, weights, v.mode)?));
    }
    let px = &fan.points[v.kato_point];
    let lp = v.local(fan)?;
    let mut yset: Vec<usize> = lp.inf_rays.iter().map(|&i| px.index_set[i]).collect();
    yset.sort();
    let y = fan.point_with_index_set(&yset).ok_or_else(|| Error::Undefined("limit stratum is missing from the fan".into()))?;
    let t = trace(fan, y)?;
    let rest: Vec<usize> = px.index_set.iter().filter(|i| !yset.contains(i)).copied().collect();
    let keep: Vec<usize> = (0..fan.labels.len()).filter(|i| !yset.contains(i)).collect();
    let relabeled: Vec<usize> = rest.iter().map(|i| keep.iter().position(|j| j == i).unwrap()).collect();
    let x = t.point_with_index_set(&relabeled).unwrap();
    let rt = &t.points[x].realization;
    let (src, proj) = &t.chart_maps[rt.chart];
    if *src != px.realization.chart {
        return Err(Error::Unsupported("trace chart does not come from the point's chart".into()));
    }
    let d = fan.chart_dim(px.realization.chart);
    let chart_n = px.realization.to_chart(&lp.n, d);
    let image: Vec<Q> = proj.iter().map(|row| dot_iq(row, &chart_n)).collect();
    let dt = t.chart_dim(rt.chart);
    let weights = if rt.rank() == 0 {
        Vec::new()
    } else {
        let a: Vec<Vec<Q>> = (0..dt).map(|c| rt.basis.iter().map(|b| q(b[c])).collect()).collect();
        let z = solve_q(&a, &image).ok_or_else(|| Error::Undefined("projected point leaves the trace lattice".into()))?;
        rt.generators.iter().map(|g| ExtQ::Finite(dot_iq(g, &z))).collect()
    };
    Ok((y, t.clone(), SkeletonPoint::new(&t, x, weights, v.mode)?))
}

/// Rescales `v` so that `v(π) = ⟨b, weights⟩ = 1`.
pub fn normalize_dvf(v: &SkeletonPoint, b: &[Q]) -> Result<SkeletonPoint> {
    if b.len() != v.weights.len() {
        return Err(invalid("b", format!("expected {} multiplicities", v.weights.len())));
    }
    let mut s = ExtQ::zero();
    for (bi, w) in b.iter().zip(&v.weights) {
        s = s + w.scale(bi)?;
    }
    let s = match s {
        ExtQ::Infinity => return Err(Error::Undefined("v(π) is infinite".into())),
        ExtQ::Finite(s) if s.is_zero() => return Err(Error::Undefined("v(π) = 0: the point is not in the dvf skeleton".into())),
        ExtQ::Finite(s) => s,
    };
    let inv = Q::from_integer(1.into()) / s;
    Ok(SkeletonPoint { kato_point: v.kato_point, weights: v.weights.iter().map(|w| w.scale(&inv)).collect::<Result<_>>()?, mode: Mode::Dvf })
}
