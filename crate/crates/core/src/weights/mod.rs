//! Weight functions of pluricanonical forms on skeleta, and the skeleta they cut out.

mod gauss;
mod ks;
mod residue;
mod slice;

use std::collections::BTreeSet;

use num_traits::One;
use serde_json::{json, Value};

pub use gauss::{gauss_weight_identity, GaussRecord};
pub use ks::{essential_skeleton, essential_skeleton_log_cy, ks_skeleton, SubFace, SubFan};
pub use residue::{closure_on_stratum, gelfand_leray, residue};
pub use slice::{slice_dvf, PolyCell, PolyComplex};

use crate::arith::{q, ExtQ, Q};
use crate::error::{invalid, Error, Result};
use crate::logstructure::{smooth_chart_bases, KatoFan, LogChart, Mode, Pair};
use crate::polyhedra::Fan;
use crate::valuations::{evaluate_chart, LaurentRational, SkeletonPoint};

/// `f · (⊗_{i∈P} dlog z_i)^{⊗m} ∧ (plain differentials)` on one chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PluriForm {
    pub chart: usize,
    pub m: u32,
    pub dlog: Vec<usize>,
    pub numerator: LaurentRational,
}

/// A form given by its expressions on some of the charts of a pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    pub m: u32,
    pub pieces: Vec<PluriForm>,
}

impl PluriForm {
    /// Checks the dlog set and, in dvf mode, the normal form.
    pub fn validate(&self, pair: &Pair, path: &str) -> Result<()> {
        let chart = pair.charts.get(self.chart).ok_or_else(|| invalid(format!("{path}.chart"), "unknown chart"))?;
        if self.m == 0 {
            return Err(invalid(format!("{path}.m"), "m must be positive"));
        }
        for &i in &self.dlog {
            if chart.component(&pair.components[i].id).is_none() {
                return Err(invalid(format!("{path}.dlog"), format!("{} is not a boundary component of chart {}", pair.components[i].id, chart.name)));
            }
        }
        self.numerator.validate(&format!("{path}.numerator"), chart.dim())?;
        if pair.mode == Mode::Dvf {
            let outside = chart.boundary.iter().filter(|b| b.is_vertical() && !self.dlog.contains(&pair.component_index(&b.id).unwrap())).count();
            if outside != 1 {
                return Err(invalid(
                    format!("{path}.dlog"),
                    format!("dvf normal form needs exactly one vertical component outside the dlog set, found {outside}"),
                ));
            }
        }
        Ok(())
    }

    fn in_dlog(&self, pair: &Pair, id: &str) -> bool {
        self.dlog.iter().any(|&i| pair.components[i].id == id)
    }

    /// Components entering the weight with a plain `v(g_h)` term: the boundary
    /// outside `P`, horizontal only in dvf mode.
    pub(crate) fn correction_components<'a>(&self, pair: &Pair, chart: &'a LogChart) -> Vec<&'a crate::logstructure::BoundaryComponent> {
        chart
            .boundary
            .iter()
            .filter(|b| !self.in_dlog(pair, &b.id) && (pair.mode == Mode::Trivial || !b.is_vertical()))
            .collect()
    }
}

fn ids(pair: &Pair, v: &Value, path: &str) -> Result<Vec<usize>> {
    let arr = v.as_array().ok_or_else(|| invalid(path, "expected a list of component ids"))?;
    let mut out = BTreeSet::new();
    for (j, x) in arr.iter().enumerate() {
        let s = x.as_str().ok_or_else(|| invalid(format!("{path}[{j}]"), "expected a string"))?;
        out.insert(pair.component_index(s).ok_or_else(|| invalid(format!("{path}[{j}]"), format!("unknown component {s:?}")))?);
    }
    Ok(out.into_iter().collect())
}

impl Form {
    pub fn single(piece: PluriForm) -> Form {
        Form { m: piece.m, pieces: vec![piece] }
    }

    /// Parses `{m, charts: [{chart, dlog, numerator}]}` or a single `{m, chart?, dlog, numerator}`.
    pub fn from_json(pair: &Pair, s: &str) -> Result<Form> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse { what: "form", input: e.to_string() })?;
        Form::from_value(pair, &v)
    }

    pub fn from_value(pair: &Pair, v: &Value) -> Result<Form> {
        if let Some(s) = v.get("schema").and_then(Value::as_str) {
            if s != "1" {
                return Err(invalid("schema", format!("unsupported schema version {s:?}")));
            }
        }
        let m = v.get("m").and_then(Value::as_u64).ok_or_else(|| invalid("m", "expected a positive integer"))?;
        let m = u32::try_from(m).map_err(|_| invalid("m", "too large"))?;
        let entries: Vec<(String, &Value)> = match v.get("charts").and_then(Value::as_array) {
            Some(list) => list.iter().enumerate().map(|(i, e)| (format!("charts[{i}]"), e)).collect(),
            None => vec![(String::new(), v)],
        };
        let mut pieces = Vec::new();
        for (path, e) in entries {
            let p = |f: &str| if path.is_empty() { f.to_string() } else { format!("{path}.{f}") };
            let chart = match e.get("chart") {
                None => 0,
                Some(Value::String(name)) => pair.chart_index(name).ok_or_else(|| invalid(p("chart"), format!("unknown chart {name:?}")))?,
                Some(Value::Number(n)) => n.as_u64().map(|x| x as usize).filter(|&x| x < pair.charts.len()).ok_or_else(|| invalid(p("chart"), "unknown chart"))?,
                Some(_) => return Err(invalid(p("chart"), "expected a chart name")),
            };
            let dlog = ids(pair, e.get("dlog").unwrap_or(&Value::Array(vec![])), &p("dlog"))?;
            let raw = e.get("numerator").ok_or_else(|| invalid(p("numerator"), "missing"))?;
            let mut numerator: LaurentRational =
                serde_json::from_value(raw.clone()).map_err(|err| invalid(p("numerator"), err.to_string()))?;
            let n = pair.charts[chart].dim();
            numerator.num.nvars = n;
            numerator.den.nvars = n;
            let piece = PluriForm { chart, m, dlog, numerator };
            piece.validate(pair, if path.is_empty() { "form" } else { &path })?;
            if pieces.iter().any(|x: &PluriForm| x.chart == chart) {
                return Err(invalid(p("chart"), "chart listed twice"));
            }
            pieces.push(piece);
        }
        Ok(Form { m, pieces })
    }

    pub fn to_value(&self, pair: &Pair) -> Value {
        json!({
            "schema": "1",
            "m": self.m,
            "charts": self.pieces.iter().map(|p| json!({
                "chart": pair.charts[p.chart].name,
                "dlog": p.dlog.iter().map(|&i| pair.components[i].id.clone()).collect::<Vec<_>>(),
                "numerator": p.numerator,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn piece(&self, chart: usize) -> Option<&PluriForm> {
        self.pieces.iter().find(|p| p.chart == chart)
    }

    pub fn validate(&self, pair: &Pair) -> Result<()> {
        for (i, p) in self.pieces.iter().enumerate() {
            if p.m != self.m {
                return Err(invalid(format!("charts[{i}].m"), "pieces disagree on m"));
            }
            p.validate(pair, &format!("charts[{i}]"))?;
        }
        Ok(())
    }

    /// `η^{⊗k}`.
    pub fn power(&self, k: u32) -> Form {
        Form {
            m: self.m * k,
            pieces: self
                .pieces
                .iter()
                .map(|p| PluriForm { chart: p.chart, m: p.m * k, dlog: p.dlog.clone(), numerator: p.numerator.pow(k) })
                .collect(),
        }
    }

    /// The torus-invariant form `f · (dlog t_1 ∧ … ∧ dlog t_d)^{⊗m}` on the pair of a smooth fan;
    /// `f` is written in the character lattice.
    pub fn toric(pair: &Pair, fan: &Fan, f: &LaurentRational, m: u32) -> Result<Form> {
        let d = fan.rank;
        f.validate("f", d)?;
        let mut pieces = Vec::new();
        for (chart, (sigma, b)) in smooth_chart_bases(fan)?.into_iter().enumerate() {
            let k = fan.cones[sigma].len();
            let map = |e: &[i64]| -> Vec<i64> { (0..d).map(|j| (0..d).map(|i| b[i][j] * e[i]).sum()).collect() };
            let shift: Vec<i64> = (0..d).map(|j| if j < k { 0 } else { -i64::from(m) }).collect();
            let numerator = f.map_exponents(&map, d).shift(&shift);
            let dlog = fan.cones[sigma].iter().map(|r| pair.component_index(&format!("D{r}")).unwrap()).collect::<BTreeSet<_>>().into_iter().collect();
            pieces.push(PluriForm { chart, m, dlog, numerator });
        }
        Ok(Form { m, pieces })
    }

    /// The form `η₁ ⊠ η₂` on `pair = p1.product(p2)`.
    pub fn product(p1: &Pair, f1: &Form, p2: &Pair, f2: &Form, pair: &Pair) -> Result<Form> {
        if f1.m != f2.m {
            return Err(invalid("m", "factors must have the same m"));
        }
        let lookup = |side: usize, id: &str| pair.component_index(id).or_else(|| pair.component_index(&format!("{}.{id}", side + 1))).unwrap();
        let mut pieces = Vec::new();
        for a in &f1.pieces {
            for b in &f2.pieces {
                let (n1, n2) = (p1.charts[a.chart].dim(), p2.charts[b.chart].dim());
                let l = |e: &[i64]| e.iter().copied().chain(std::iter::repeat_n(0, n2)).collect::<Vec<_>>();
                let r = |e: &[i64]| std::iter::repeat_n(0, n1).chain(e.iter().copied()).collect::<Vec<_>>();
                let numerator = a.numerator.map_exponents(&l, n1 + n2).mul(&b.numerator.map_exponents(&r, n1 + n2));
                let mut dlog: Vec<usize> = a
                    .dlog
                    .iter()
                    .map(|&i| lookup(0, &p1.components[i].id))
                    .chain(b.dlog.iter().map(|&i| lookup(1, &p2.components[i].id)))
                    .collect();
                dlog.sort();
                pieces.push(PluriForm { chart: a.chart * p2.charts.len() + b.chart, m: f1.m, dlog, numerator });
            }
        }
        Ok(Form { m: f1.m, pieces })
    }
}

/// `A_{(X,Δ)}` at the monomial point `w` of a chart, for `Δ = Σ c_j div(g_j)`:
/// `Σ_i w_i − Σ_j c_j·v_w(g_j)`.
pub fn log_discrepancy_of_divisor(w: &[Q], divisor: &[(Q, &LaurentRational)]) -> Result<Q> {
    let mut a: Q = w.iter().sum();
    for (c, g) in divisor {
        a -= c * evaluate_chart(w, g)?;
    }
    Ok(a)
}

/// `A_{(X,D)}` at a monomial point of chart `chart`.
pub fn log_discrepancy_chart(pair: &Pair, chart: usize, w: &[Q]) -> Result<Q> {
    let c = pair.charts.get(chart).ok_or_else(|| invalid("chart", format!("no chart {chart}")))?;
    if w.len() != c.dim() {
        return Err(invalid("weights", format!("expected {} weights", c.dim())));
    }
    let div: Vec<(Q, &LaurentRational)> = c.boundary.iter().map(|b| (b.coefficient.clone(), &b.equation)).collect();
    log_discrepancy_of_divisor(w, &div)
}

/// Chart and chart weights of a finite skeleton point of a pair's Kato fan.
pub fn chart_point(fan: &KatoFan, v: &SkeletonPoint) -> Result<(usize, Vec<Q>)> {
    let w = v.finite_weights().ok_or_else(|| Error::Undefined("point has infinite weights; classify it onto a stratum first".into()))?;
    let r = &fan.points[v.kato_point].realization;
    let d = fan.chart_dim(r.chart);
    let n: Vec<Q> = if r.rank() == 0 {
        Vec::new()
    } else {
        let a: Vec<Vec<Q>> = r.generators.iter().map(|g| g.iter().map(|&x| q(x)).collect()).collect();
        crate::lattice::solve_q(&a, &w).ok_or_else(|| invalid("weights", "inconsistent weights"))?
    };
    Ok((r.chart, r.to_chart(&n, d)))
}

/// `A_{(X,D)}(v)`, linear on each face with value `Σ α_i (1 − a_i)` on snc faces.
pub fn log_discrepancy(pair: &Pair, fan: &KatoFan, v: &SkeletonPoint) -> Result<Q> {
    if v.mode != Mode::Trivial {
        return Err(Error::Unsupported("log discrepancy is defined for trivially valued points".into()));
    }
    let (chart, w) = chart_point(fan, v)?;
    log_discrepancy_chart(pair, chart, &w)
}

/// Weight of `piece` at the monomial point `w` of its chart.
pub fn weight_chart(pair: &Pair, piece: &PluriForm, w: &[Q]) -> Result<Q> {
    let chart = &pair.charts[piece.chart];
    let m = q(i64::from(piece.m));
    let mut wt = evaluate_chart(w, &piece.numerator)?;
    for b in piece.correction_components(pair, chart) {
        wt += &m * evaluate_chart(w, &b.equation)?;
    }
    if pair.mode == Mode::Dvf {
        wt += &m;
    }
    Ok(wt + &m * log_discrepancy_chart(pair, piece.chart, w)?)
}

/// The same weight computed as `m · A_{(X, D − div_{(X,D)}(η)/m)}(w)`.
pub fn weight_chart_via_discrepancy(pair: &Pair, piece: &PluriForm, w: &[Q]) -> Result<Q> {
    if pair.mode != Mode::Trivial {
        return Err(Error::Unsupported("only trivially valued pairs".into()));
    }
    let chart = &pair.charts[piece.chart];
    let m = q(i64::from(piece.m));
    let minv = Q::one() / &m;
    let mut div: Vec<(Q, &LaurentRational)> = chart.boundary.iter().map(|b| (b.coefficient.clone(), &b.equation)).collect();
    div.push((-minv, &piece.numerator));
    for b in piece.correction_components(pair, chart) {
        div.push((-Q::one(), &b.equation));
    }
    Ok(m * log_discrepancy_of_divisor(w, &div)?)
}

/// `wt_η(v)` at a finite skeleton point; dvf points must be normalized.
pub fn weight(pair: &Pair, fan: &KatoFan, form: &Form, v: &SkeletonPoint) -> Result<ExtQ> {
    let (chart, w) = chart_point(fan, v)?;
    let piece = form
        .piece(chart)
        .ok_or_else(|| invalid("form", format!("no expression of the form on chart {}", pair.charts[chart].name)))?;
    piece.validate(pair, "form")?;
    if pair.mode == Mode::Dvf {
        let set = &fan.points[v.kato_point].index_set;
        let b = pair.multiplicities(set);
        let s: Q = b.iter().zip(v.finite_weights().unwrap()).map(|(&bi, a)| q(i64::from(bi)) * a).sum();
        if s != Q::one() {
            return Err(invalid("weights", "dvf points must satisfy v(π) = 1"));
        }
    }
    Ok(ExtQ::Finite(weight_chart(pair, piece, &w)?))
}
