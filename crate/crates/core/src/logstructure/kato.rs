use std::collections::BTreeSet;

use itertools::Itertools;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::q;
use crate::error::{invalid, Error, Result};
use crate::lattice::{identity, inverse_unimodular, mat_vec, quotient_transform, solve_q, Mat};
use crate::polyhedra::{Cone, Fan};

/// Coordinates of a Kato point inside a chart lattice `Z^d`.
///
/// `basis` holds `k` vectors of `Z^d` spanning the saturated lattice of the
/// point's cone; `rays` are the cone's rays in that basis, in index-set order;
/// `generators` present the characteristic monoid inside the dual `Z^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Realization {
    pub chart: usize,
    pub basis: Mat,
    pub rays: Mat,
    pub generators: Mat,
}

impl Realization {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// `Σ_i n_i · basis_i` in the chart lattice.
    pub fn to_chart(&self, local: &[crate::arith::Q], d: usize) -> Vec<crate::arith::Q> {
        (0..d).map(|c| self.basis.iter().zip(local).map(|(b, x)| x * q(b[c])).sum()).collect()
    }

    /// Pairing of a chart exponent with the basis, i.e. the exponent in local dual coordinates.
    pub fn local_exponent(&self, exp: &[i64]) -> Vec<i64> {
        self.basis.iter().map(|b| crate::lattice::dot(b, exp)).collect()
    }

    fn free(chart: usize, d: usize, positions: &[usize]) -> Realization {
        let k = positions.len();
        Realization {
            chart,
            basis: positions.iter().map(|&p| (0..d).map(|c| i64::from(c == p)).collect()).collect(),
            rays: identity(k),
            generators: identity(k),
        }
    }

    fn of_cone(chart: usize, d: usize, gens: &[Vec<i64>]) -> Result<Realization> {
        let (p, k) = quotient_transform(gens, d)?;
        let pinv = inverse_unimodular(&p)?;
        let basis: Mat = (0..k).map(|j| (0..d).map(|i| pinv[i][j]).collect()).collect();
        let rays: Mat = gens.iter().map(|g| mat_vec(&p, g)[..k].to_vec()).collect();
        let generators = if k == 0 { Vec::new() } else { Cone::new(k, rays.clone())?.dual()?.hilbert_basis()? };
        Ok(Realization { chart, basis, rays, generators })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KatoPoint {
    pub label: String,
    pub index_set: Vec<usize>,
    pub generator_labels: Vec<String>,
    pub realization: Realization,
    #[serde(skip)]
    factors: Option<(usize, usize)>,
}

impl KatoPoint {
    pub fn rank(&self) -> usize {
        self.realization.rank()
    }
}

/// A Kato fan with points ordered by `(|I_x|, I_x)`; point 0 is the generic point.
/// `x` lies in the closure of `y` iff `I_y ⊆ I_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatoFan {
    pub labels: Vec<String>,
    pub charts: Vec<(String, Vec<String>)>,
    pub points: Vec<KatoPoint>,
    /// Every monoid is free on its index set and specializations are projections.
    pub free: bool,
    factors: Option<Box<(KatoFan, KatoFan)>>,
    /// For traces of single-chart fans: per chart, the source chart and the quotient map.
    pub chart_maps: Vec<(usize, Mat)>,
}

fn set_label(labels: &[String], set: &[usize]) -> String {
    format!("{{{}}}", set.iter().map(|&i| labels[i].as_str()).join(","))
}

fn sort_points(points: &mut [KatoPoint]) {
    points.sort_by(|a, b| a.index_set.len().cmp(&b.index_set.len()).then(a.index_set.cmp(&b.index_set)));
}

/// Chart index and coordinate positions realizing a stratum.
pub(crate) type Realize<'a> = &'a dyn Fn(&[usize]) -> Option<(usize, Vec<usize>)>;

/// Builds a free Kato fan; `realize` gives the chart and coordinate positions of a stratum.
pub(crate) fn snc_fan(
    labels: Vec<String>,
    charts: Vec<(String, Vec<String>)>,
    strata: &[Vec<usize>],
    realize: Realize<'_>,
) -> Result<KatoFan> {
    let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    sets.insert(Vec::new());
    for (i, s) in strata.iter().enumerate() {
        let mut s = s.clone();
        s.sort();
        if s.windows(2).any(|w| w[0] == w[1]) || s.iter().any(|&j| j >= labels.len()) {
            return Err(invalid(format!("strata[{i}]"), "index set must consist of distinct known components"));
        }
        sets.insert(s);
    }
    for s in &sets {
        for sub in s.iter().copied().powerset() {
            if !sets.contains(&sub) {
                return Err(invalid("strata", format!("{} is missing its face {}", set_label(&labels, s), set_label(&labels, &sub))));
            }
        }
    }
    let mut points = Vec::new();
    for s in sets {
        let (chart, pos) = realize(&s).ok_or_else(|| invalid("strata", format!("{} has no chart", set_label(&labels, &s))))?;
        points.push(KatoPoint {
            label: set_label(&labels, &s),
            generator_labels: s.iter().map(|&i| labels[i].clone()).collect(),
            realization: Realization::free(chart, charts[chart].1.len(), &pos),
            index_set: s,
            factors: None,
        });
    }
    sort_points(&mut points);
    Ok(KatoFan { labels, charts, points, free: true, factors: None, chart_maps: Vec::new() })
}

/// Kato fan of an snc divisor with components `labels` meeting along `strata`.
pub fn kato_fan_snc(labels: Vec<String>, strata: &[Vec<usize>]) -> Result<KatoFan> {
    let charts = vec![("snc".to_string(), labels.clone())];
    snc_fan(labels, charts, strata, &|s: &[usize]| Some((0, s.to_vec())))
}

/// Kato fan of the toric variety of `fan`: one point per cone, monoid `S_σ` modulo units.
pub fn kato_fan_toric(fan: &Fan) -> Result<KatoFan> {
    fan.validate()?;
    let labels: Vec<String> = (0..fan.rays.len()).map(|i| format!("r{i}")).collect();
    let d = fan.rank;
    let mut points = Vec::new();
    for c in &fan.cones {
        let realization = Realization::of_cone(0, d, &fan.cone_generators(c))?;
        points.push(KatoPoint {
            label: set_label(&labels, c),
            generator_labels: realization.generators.iter().map(|g| format!("({})", g.iter().join(","))).collect(),
            index_set: c.clone(),
            realization,
            factors: None,
        });
    }
    sort_points(&mut points);
    Ok(KatoFan {
        labels,
        charts: vec![("N".into(), (1..=d).map(|i| format!("e{i}")).collect())],
        points,
        free: false,
        factors: None,
        chart_maps: Vec::new(),
    })
}

impl KatoFan {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn chart_dim(&self, chart: usize) -> usize {
        self.charts[chart].1.len()
    }

    pub fn point_with_index_set(&self, set: &[usize]) -> Option<usize> {
        self.points.iter().position(|p| p.index_set == set)
    }

    pub fn point_by_label(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p.label == label)
    }

    /// Whether `x` lies in the closure of `y`.
    pub fn in_closure(&self, x: usize, y: usize) -> bool {
        let ix = &self.points[x].index_set;
        self.points[y].index_set.iter().all(|i| ix.contains(i))
    }

    /// Factor points of a point of a product fan.
    pub fn factor_points(&self, x: usize) -> Option<(usize, usize)> {
        self.points[x].factors
    }

    pub fn factor_fans(&self) -> Option<(&KatoFan, &KatoFan)> {
        self.factors.as_deref().map(|(a, b)| (a, b))
    }

    /// The surjection `C_x → C_y` for `x` in the closure of `y`, as a `k_y × k_x`
    /// integer matrix on local dual coordinates.
    pub fn specialization(&self, x: usize, y: usize) -> Result<Mat> {
        if !self.in_closure(x, y) {
            return Err(Error::Undefined(format!("{} is not in the closure of {}", self.points[x].label, self.points[y].label)));
        }
        let (px, py) = (&self.points[x], &self.points[y]);
        if let (Some((a, b)), Some((x1, x2)), Some((y1, y2))) = (self.factor_fans(), px.factors, py.factors) {
            let m1 = a.specialization(x1, y1)?;
            let m2 = b.specialization(x2, y2)?;
            let (k1, k2) = (a.points[x1].rank(), b.points[x2].rank());
            let mut out: Mat = m1.iter().map(|r| r.iter().copied().chain(std::iter::repeat_n(0, k2)).collect()).collect();
            out.extend(m2.iter().map(|r| std::iter::repeat_n(0, k1).chain(r.iter().copied()).collect()));
            return Ok(out);
        }
        if self.free {
            return Ok(py
                .index_set
                .iter()
                .map(|i| px.index_set.iter().map(|j| i64::from(i == j)).collect())
                .collect());
        }
        let (rx, ry) = (&px.realization, &py.realization);
        if rx.chart != ry.chart {
            return Err(Error::Unsupported("specialization across charts of a non-free fan".into()));
        }
        let d = self.chart_dim(rx.chart);
        let a: Vec<Vec<crate::arith::Q>> = (0..d).map(|c| rx.basis.iter().map(|b| q(b[c])).collect()).collect();
        let mut out = Vec::new();
        for b in &ry.basis {
            let rhs: Vec<_> = b.iter().map(|&v| q(v)).collect();
            let l = solve_q(&a, &rhs).ok_or_else(|| Error::Undefined("face lattice is not contained in the cone lattice".into()))?;
            out.push(
                l.iter()
                    .map(|v| if v.is_integer() { i64::try_from(v.to_integer()).map_err(|_| Error::Overflow("specialization")) } else { Err(Error::Undefined("face lattice is not saturated".into())) })
                    .collect::<Result<Vec<i64>>>()?,
            );
        }
        Ok(out)
    }

    /// Checks the poset axioms and functoriality of the specializations.
    pub fn validate(&self) -> Result<()> {
        let generic: Vec<usize> = (0..self.len()).filter(|&i| self.points[i].index_set.is_empty()).collect();
        if generic != [0] || self.points[0].rank() != 0 {
            return Err(invalid("points", "the generic point must be the unique minimum"));
        }
        for x in 0..self.len() {
            for y in 0..self.len() {
                if !self.in_closure(x, y) {
                    continue;
                }
                let sxy = self.specialization(x, y)?;
                for z in 0..self.len() {
                    if self.in_closure(y, z) {
                        let lhs = self.specialization(x, z)?;
                        let syz = self.specialization(y, z)?;
                        if crate::lattice::mat_mul(&syz, &sxy) != lhs && !(lhs.is_empty() && syz.is_empty()) {
                            return Err(invalid("points", format!("specializations do not compose at {}", self.points[x].label)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_value(&self) -> Value {
        let pts: Vec<Value> = self
            .points
            .iter()
            .map(|p| {
                json!({
                    "label": p.label,
                    "index_set": p.index_set.iter().map(|&i| self.labels[i].clone()).collect::<Vec<_>>(),
                    "rank": p.rank(),
                    "chart": self.charts[p.realization.chart].0,
                    "generators": p.generator_labels,
                })
            })
            .collect();
        let mut specs = Vec::new();
        for x in 0..self.len() {
            for y in 0..self.len() {
                if x != y && self.in_closure(x, y) && self.points[x].index_set.len() == self.points[y].index_set.len() + 1 {
                    if let Ok(m) = self.specialization(x, y) {
                        specs.push(json!({"from": self.points[x].label, "to": self.points[y].label, "matrix": m}));
                    }
                }
            }
        }
        json!({"points": pts, "specializations": specs})
    }
}

/// The Kato fan of the stratum closure `D_y`.
pub fn trace(k: &KatoFan, y: usize) -> Result<KatoFan> {
    if y >= k.len() {
        return Err(invalid("y", format!("no Kato point with index {y}")));
    }
    if k.points[y].index_set.is_empty() {
        return Ok(k.clone());
    }
    if let (Some(f), Some((y1, y2))) = (&k.factors, k.points[y].factors) {
        return product(&trace(&f.0, y1)?, &trace(&f.1, y2)?);
    }
    let iy = &k.points[y].index_set;
    let keep: Vec<usize> = (0..k.labels.len()).filter(|i| !iy.contains(i)).collect();
    let relabel = |s: &[usize]| -> Vec<usize> { s.iter().filter(|i| !iy.contains(i)).map(|i| keep.iter().position(|j| j == i).unwrap()).collect() };
    let labels: Vec<String> = keep.iter().map(|&i| k.labels[i].clone()).collect();
    let ylabel = &k.points[y].label;
    let mut charts: Vec<(String, Vec<String>)> = Vec::new();
    let mut chart_maps: Vec<(usize, Mat)> = Vec::new();
    let mut points = Vec::new();
    let closure: Vec<usize> = (0..k.len()).filter(|&x| k.in_closure(x, y)).collect();
    if k.free {
        for &x in &closure {
            let px = &k.points[x];
            let r = &px.realization;
            let d = k.chart_dim(r.chart);
            let pos = |b: &Vec<i64>| b.iter().position(|&v| v == 1).unwrap();
            let drop: Vec<usize> = px.index_set.iter().zip(&r.basis).filter(|(i, _)| iy.contains(i)).map(|(_, b)| pos(b)).collect();
            let kept_coords: Vec<usize> = (0..d).filter(|c| !drop.contains(c)).collect();
            let ci = match chart_maps.iter().position(|(src, _)| *src == r.chart) {
                Some(ci) => ci,
                None => {
                    let (name, coords) = &k.charts[r.chart];
                    charts.push((format!("{name}/{ylabel}"), kept_coords.iter().map(|&c| coords[c].clone()).collect()));
                    chart_maps.push((r.chart, kept_coords.iter().map(|&c| (0..d).map(|j| i64::from(j == c)).collect()).collect()));
                    charts.len() - 1
                }
            };
            let positions: Vec<usize> = px
                .index_set
                .iter()
                .zip(&r.basis)
                .filter(|(i, _)| !iy.contains(i))
                .map(|(_, b)| kept_coords.iter().position(|&c| c == pos(b)).unwrap())
                .collect();
            let set = relabel(&px.index_set);
            points.push(KatoPoint {
                label: set_label(&labels, &set),
                generator_labels: set.iter().map(|&i| labels[i].clone()).collect(),
                realization: Realization::free(ci, kept_coords.len(), &positions),
                index_set: set,
                factors: None,
            });
        }
    } else {
        let ry = &k.points[y].realization;
        let d = k.chart_dim(ry.chart);
        let global = |r: &Realization, local: &[i64]| -> Vec<i64> { (0..d).map(|c| r.basis.iter().zip(local).map(|(b, x)| b[c] * x).sum()).collect() };
        let yrays: Vec<Vec<i64>> = ry.rays.iter().map(|l| global(ry, l)).collect();
        let (p, kk) = quotient_transform(&yrays, d)?;
        let proj: Mat = p[kk..].to_vec();
        let (name, _) = &k.charts[ry.chart];
        charts.push((format!("{name}/{ylabel}"), (1..=d - kk).map(|i| format!("e{i}")).collect()));
        chart_maps.push((ry.chart, proj.clone()));
        for &x in &closure {
            let px = &k.points[x];
            let r = &px.realization;
            if r.chart != ry.chart {
                return Err(Error::Unsupported("trace across charts of a non-free fan".into()));
            }
            let gens: Vec<Vec<i64>> = px
                .index_set
                .iter()
                .zip(&r.rays)
                .filter(|(i, _)| !iy.contains(i))
                .map(|(_, l)| mat_vec(&proj, &global(r, l)))
                .collect();
            let realization = Realization::of_cone(0, d - kk, &gens)?;
            let set = relabel(&px.index_set);
            points.push(KatoPoint {
                label: set_label(&labels, &set),
                generator_labels: realization.generators.iter().map(|g| format!("({})", g.iter().join(","))).collect(),
                index_set: set,
                realization,
                factors: None,
            });
        }
    }
    sort_points(&mut points);
    Ok(KatoFan { labels, charts, points, free: k.free, factors: None, chart_maps })
}

/// Product Kato fan: points are pairs, monoids are direct sums.
pub fn product(k1: &KatoFan, k2: &KatoFan) -> Result<KatoFan> {
    let clash = k1.labels.iter().any(|a| k2.labels.contains(a));
    let name = |side: usize, s: &String| if clash { format!("{}.{s}", side + 1) } else { s.clone() };
    let labels: Vec<String> = k1.labels.iter().map(|s| name(0, s)).chain(k2.labels.iter().map(|s| name(1, s))).collect();
    let n1 = k1.labels.len();
    let mut charts = Vec::new();
    for (a, ca) in &k1.charts {
        for (b, cb) in &k2.charts {
            let cc = ca.iter().any(|x| cb.contains(x));
            let cn = |side: usize, s: &String| if cc { format!("{}.{s}", side + 1) } else { s.clone() };
            charts.push((format!("{a}*{b}"), ca.iter().map(|s| cn(0, s)).chain(cb.iter().map(|s| cn(1, s))).collect()));
        }
    }
    let nc2 = k2.charts.len();
    let mut points = Vec::new();
    for (i1, p1) in k1.points.iter().enumerate() {
        for (i2, p2) in k2.points.iter().enumerate() {
            let (r1, r2) = (&p1.realization, &p2.realization);
            let (d1, d2) = (k1.chart_dim(r1.chart), k2.chart_dim(r2.chart));
            let (l1, l2) = (r1.rank(), r2.rank());
            let pad = |v: &[i64], front: usize, back: usize| -> Vec<i64> {
                std::iter::repeat_n(0, front).chain(v.iter().copied()).chain(std::iter::repeat_n(0, back)).collect()
            };
            let block = |m1: &Mat, m2: &Mat, w1: usize, w2: usize| -> Mat {
                m1.iter().map(|v| pad(v, 0, w2)).chain(m2.iter().map(|v| pad(v, w1, 0))).collect()
            };
            let set: Vec<usize> = p1.index_set.iter().copied().chain(p2.index_set.iter().map(|i| i + n1)).collect();
            points.push(KatoPoint {
                label: set_label(&labels, &set),
                index_set: set,
                generator_labels: p1.generator_labels.iter().map(|s| name(0, s)).chain(p2.generator_labels.iter().map(|s| name(1, s))).collect(),
                realization: Realization {
                    chart: r1.chart * nc2 + r2.chart,
                    basis: block(&r1.basis, &r2.basis, d1, d2),
                    rays: block(&r1.rays, &r2.rays, l1, l2),
                    generators: block(&r1.generators, &r2.generators, l1, l2),
                },
                factors: Some((i1, i2)),
            });
        }
    }
    sort_points(&mut points);
    Ok(KatoFan {
        labels,
        charts,
        points,
        free: k1.free && k2.free,
        factors: Some(Box::new((k1.clone(), k2.clone()))),
        chart_maps: Vec::new(),
    })
}
