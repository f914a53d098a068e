use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::{fmt_q, q, Q};
use crate::error::{invalid, Error, Result};
use crate::lattice::{inverse_unimodular, quotient_transform, smith_normal_form, transpose, Mat};
use crate::logstructure::kato::{snc_fan, KatoFan};
use crate::polyhedra::Fan;
use crate::valuations::{LaurentPoly, LaurentRational};

/// Trivially valued base field, or a complete discretely valued field with uniformizer `π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Trivial,
    Dvf,
}

/// One boundary component as seen in a chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryComponent {
    pub id: String,
    pub coefficient: Q,
    pub equation: LaurentRational,
    pub pi_multiplicity: u32,
}

impl BoundaryComponent {
    pub fn is_vertical(&self) -> bool {
        self.pi_multiplicity > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogChart {
    pub name: String,
    pub coords: Vec<String>,
    pub boundary: Vec<BoundaryComponent>,
    pub relative_dimension: usize,
}

/// If `f` is a single chart coordinate with a unit coefficient, its position.
fn coordinate_position(f: &LaurentRational) -> Option<usize> {
    if !f.den.terms.iter().all(|(e, c)| e.iter().all(|&x| x == 0) && c.coeff_val.is_zero()) || f.den.terms.len() != 1 {
        return None;
    }
    let (e, c) = f.num.terms.iter().exactly_one().ok()?;
    if !c.coeff_val.is_zero() || e.iter().filter(|&&x| x != 0).count() != 1 {
        return None;
    }
    let pos = e.iter().position(|&x| x != 0)?;
    (e[pos] == 1).then_some(pos)
}

impl LogChart {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn component(&self, id: &str) -> Option<&BoundaryComponent> {
        self.boundary.iter().find(|b| b.id == id)
    }

    /// Position of the coordinate cutting out component `id`, when it is coordinate-cut.
    pub fn coordinate_of(&self, id: &str) -> Option<usize> {
        coordinate_position(&self.component(id)?.equation)
    }

    /// `(component id, b)` for every component along which `π` vanishes.
    pub fn pi_factorization(&self) -> Vec<(String, u32)> {
        self.boundary.iter().filter(|b| b.is_vertical()).map(|b| (b.id.clone(), b.pi_multiplicity)).collect()
    }
}

/// Chart-independent data of a boundary component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentInfo {
    pub id: String,
    #[serde(with = "crate::arith::qstr")]
    pub coefficient: Q,
    pub pi_multiplicity: u32,
}

/// A log-regular pair `(X, D)` presented by charts and declared strata.
/// `strata` are sorted index sets into `components`, downward closed, starting with `∅`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    pub mode: Mode,
    pub log_cy: bool,
    pub charts: Vec<LogChart>,
    pub components: Vec<ComponentInfo>,
    pub strata: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairJson {
    #[serde(default)]
    schema: Option<String>,
    mode: Mode,
    #[serde(default)]
    log_cy: bool,
    charts: Vec<ChartJson>,
    strata: Vec<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartJson {
    #[serde(default)]
    name: Option<String>,
    coords: Vec<String>,
    boundary: Vec<ComponentJson>,
    #[serde(default)]
    relative_dimension: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentJson {
    id: String,
    #[serde(with = "crate::arith::qstr")]
    coefficient: Q,
    equation: LaurentRational,
    #[serde(default)]
    pi_multiplicity: u32,
}

impl Pair {
    pub fn from_json(s: &str) -> Result<Pair> {
        let raw: PairJson = serde_json::from_str(s).map_err(|e| Error::Parse { what: "pair", input: e.to_string() })?;
        if let Some(v) = &raw.schema {
            if v != "1" {
                return Err(invalid("schema", format!("unsupported schema version {v:?}")));
            }
        }
        let charts = raw
            .charts
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                let n = c.coords.len();
                LogChart {
                    name: c.name.unwrap_or_else(|| format!("chart{i}")),
                    relative_dimension: c.relative_dimension.unwrap_or(match raw.mode {
                        Mode::Trivial => n,
                        Mode::Dvf => n.saturating_sub(1),
                    }),
                    coords: c.coords,
                    boundary: c
                        .boundary
                        .into_iter()
                        .map(|b| {
                            let mut equation = b.equation;
                            equation.num.nvars = n;
                            equation.den.nvars = n;
                            BoundaryComponent { id: b.id, coefficient: b.coefficient, equation, pi_multiplicity: b.pi_multiplicity }
                        })
                        .collect(),
                }
            })
            .collect();
        Pair::new(raw.mode, raw.log_cy, charts, &raw.strata)
    }

    /// Validates charts and strata. `∅` is added to the strata when missing.
    pub fn new(mode: Mode, log_cy: bool, charts: Vec<LogChart>, strata: &[Vec<String>]) -> Result<Pair> {
        if charts.is_empty() {
            return Err(invalid("charts", "at least one chart is required"));
        }
        let mut components: Vec<ComponentInfo> = Vec::new();
        for (ci, c) in charts.iter().enumerate() {
            let p = format!("charts[{ci}]");
            if c.coords.iter().collect::<BTreeSet<_>>().len() != c.coords.len() {
                return Err(invalid(format!("{p}.coords"), "coordinate names must be distinct"));
            }
            if c.relative_dimension > c.coords.len() {
                return Err(invalid(format!("{p}.relative_dimension"), "exceeds the number of coordinates"));
            }
            let mut used = BTreeMap::new();
            for (bi, b) in c.boundary.iter().enumerate() {
                let bp = format!("{p}.boundary[{bi}]");
                if c.boundary[..bi].iter().any(|o| o.id == b.id) {
                    return Err(invalid(format!("{bp}.id"), format!("duplicate component {:?}", b.id)));
                }
                if b.coefficient > Q::one() {
                    return Err(invalid(format!("{bp}.coefficient"), "boundary coefficients must be at most 1"));
                }
                b.equation.validate(&format!("{bp}.equation"), c.coords.len())?;
                let pos = coordinate_position(&b.equation);
                if mode == Mode::Dvf && b.is_vertical() && pos.is_none() {
                    return Err(invalid(format!("{bp}.equation"), "vertical components must be cut by a single coordinate"));
                }
                if let Some(k) = pos {
                    if let Some(other) = used.insert(k, &b.id) {
                        return Err(invalid(format!("{bp}.equation"), format!("coordinate {} already cuts {other:?}", c.coords[k])));
                    }
                }
                match components.iter().find(|x| x.id == b.id) {
                    Some(x) if x.coefficient != b.coefficient || x.pi_multiplicity != b.pi_multiplicity => {
                        return Err(invalid(bp, format!("component {:?} has inconsistent data across charts", b.id)));
                    }
                    Some(_) => {}
                    None => components.push(ComponentInfo {
                        id: b.id.clone(),
                        coefficient: b.coefficient.clone(),
                        pi_multiplicity: b.pi_multiplicity,
                    }),
                }
            }
        }
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        sets.insert(Vec::new());
        for (si, s) in strata.iter().enumerate() {
            let mut idx = Vec::new();
            for (j, id) in s.iter().enumerate() {
                let k = components
                    .iter()
                    .position(|c| &c.id == id)
                    .ok_or_else(|| invalid(format!("strata[{si}][{j}]"), format!("unknown component {id:?}")))?;
                idx.push(k);
            }
            idx.sort();
            if idx.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(format!("strata[{si}]"), "repeated component"));
            }
            sets.insert(idx);
        }
        for (si, s) in sets.iter().enumerate() {
            for sub in s.iter().copied().powerset() {
                if !sets.contains(&sub) {
                    let names: Vec<&str> = sub.iter().map(|&i| components[i].id.as_str()).collect();
                    return Err(invalid(format!("strata[{si}]"), format!("face {{{}}} of a declared stratum is missing", names.join(","))));
                }
            }
        }
        let mut strata: Vec<Vec<usize>> = sets.into_iter().collect();
        strata.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let pair = Pair { mode, log_cy, charts, components, strata };
        for s in &pair.strata {
            if pair.chart_for(s).is_none() {
                let names: Vec<&str> = s.iter().map(|&i| pair.components[i].id.as_str()).collect();
                return Err(invalid("strata", format!("stratum {{{}}} is not cut by coordinates in any chart", names.join(","))));
            }
        }
        Ok(pair)
    }

    pub fn component_index(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    pub fn chart_index(&self, name: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.name == name)
    }

    /// First chart in which every component of `set` is coordinate-cut.
    pub fn chart_for(&self, set: &[usize]) -> Option<usize> {
        self.charts
            .iter()
            .position(|c| set.iter().all(|&i| c.coordinate_of(&self.components[i].id).is_some()))
    }

    /// Coordinate positions of the components of `set` in chart `chart`.
    pub fn positions(&self, chart: usize, set: &[usize]) -> Option<Vec<usize>> {
        set.iter().map(|&i| self.charts[chart].coordinate_of(&self.components[i].id)).collect()
    }

    /// The Kato fan: one point per stratum, free monoids, realized in [`Pair::chart_for`].
    pub fn kato_fan(&self) -> Result<KatoFan> {
        let labels = self.components.iter().map(|c| c.id.clone()).collect();
        let charts = self.charts.iter().map(|c| (c.name.clone(), c.coords.clone())).collect();
        snc_fan(labels, charts, &self.strata, &|s: &[usize]| {
            let c = self.chart_for(s)?;
            Some((c, self.positions(c, s)?))
        })
    }

    /// `π`-multiplicities of the components of `set`.
    pub fn multiplicities(&self, set: &[usize]) -> Vec<u32> {
        set.iter().map(|&i| self.components[i].pi_multiplicity).collect()
    }

    pub fn to_value(&self) -> Value {
        let charts: Vec<Value> = self
            .charts
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "coords": c.coords,
                    "relative_dimension": c.relative_dimension,
                    "boundary": c.boundary.iter().map(|b| json!({
                        "id": b.id,
                        "coefficient": fmt_q(&b.coefficient),
                        "equation": b.equation,
                        "pi_multiplicity": b.pi_multiplicity,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "schema": "1",
            "mode": self.mode,
            "log_cy": self.log_cy,
            "charts": charts,
            "strata": self.strata.iter().filter(|s| !s.is_empty()).map(|s| s.iter().map(|&i| self.components[i].id.clone()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    /// Product of two trivially valued pairs: charts are pairs of charts.
    pub fn product(&self, other: &Pair) -> Result<Pair> {
        if self.mode != Mode::Trivial || other.mode != Mode::Trivial {
            return Err(Error::Unsupported("products are only formed for trivially valued pairs".into()));
        }
        let clash = self.components.iter().any(|a| other.components.iter().any(|b| a.id == b.id));
        let rename = |side: usize, id: &str| if clash { format!("{}.{id}", side + 1) } else { id.to_string() };
        let mut charts = Vec::new();
        for c1 in &self.charts {
            for c2 in &other.charts {
                let (n1, n2) = (c1.dim(), c2.dim());
                let coord_clash = c1.coords.iter().any(|x| c2.coords.contains(x));
                let cname = |side: usize, x: &String| if coord_clash { format!("{}.{x}", side + 1) } else { x.clone() };
                let pad = |side: usize| {
                    move |e: &[i64]| -> Vec<i64> {
                        if side == 0 {
                            e.iter().copied().chain(std::iter::repeat_n(0, n2)).collect()
                        } else {
                            std::iter::repeat_n(0, n1).chain(e.iter().copied()).collect()
                        }
                    }
                };
                let mut boundary = Vec::new();
                for (side, c) in [(0, c1), (1, c2)] {
                    let f = pad(side);
                    for b in &c.boundary {
                        boundary.push(BoundaryComponent {
                            id: rename(side, &b.id),
                            coefficient: b.coefficient.clone(),
                            equation: b.equation.map_exponents(&f, n1 + n2),
                            pi_multiplicity: b.pi_multiplicity,
                        });
                    }
                }
                charts.push(LogChart {
                    name: format!("{}*{}", c1.name, c2.name),
                    coords: c1.coords.iter().map(|x| cname(0, x)).chain(c2.coords.iter().map(|x| cname(1, x))).collect(),
                    boundary,
                    relative_dimension: c1.relative_dimension + c2.relative_dimension,
                });
            }
        }
        let mut strata = Vec::new();
        for s1 in &self.strata {
            for s2 in &other.strata {
                strata.push(
                    s1.iter()
                        .map(|&i| rename(0, &self.components[i].id))
                        .chain(s2.iter().map(|&i| rename(1, &other.components[i].id)))
                        .collect(),
                );
            }
        }
        Pair::new(Mode::Trivial, self.log_cy && other.log_cy, charts, &strata)
    }

    /// The toric pair of a smooth fan with boundary `Σ a_ρ D_ρ`: one chart per
    /// maximal cone, component `D{i}` for ray `i`.
    pub fn from_smooth_fan(fan: &Fan, coefficients: Option<&[Q]>) -> Result<Pair> {
        let coeff = |i: usize| coefficients.map_or_else(|| q(1), |c| c[i].clone());
        if let Some(c) = coefficients {
            if c.len() != fan.rays.len() {
                return Err(invalid("coefficients", format!("expected {} values", fan.rays.len())));
            }
        }
        let d = fan.rank;
        let mut charts = Vec::new();
        for (sigma, _) in smooth_chart_bases(fan)? {
            let rays = &fan.cones[sigma];
            let coords: Vec<String> = (0..d)
                .map(|j| if j < rays.len() { format!("z{}", rays[j]) } else { format!("t{}", j - rays.len() + 1) })
                .collect();
            let boundary = rays
                .iter()
                .enumerate()
                .map(|(j, &r)| {
                    let mut e = vec![0; d];
                    e[j] = 1;
                    BoundaryComponent {
                        id: format!("D{r}"),
                        coefficient: coeff(r),
                        equation: LaurentRational::poly(LaurentPoly::monomial(e)),
                        pi_multiplicity: 0,
                    }
                })
                .collect();
            charts.push(LogChart { name: format!("U{sigma}"), coords, boundary, relative_dimension: d });
        }
        let strata: Vec<Vec<String>> = fan.cones.iter().map(|c| c.iter().map(|r| format!("D{r}")).collect()).collect();
        let log_cy = coefficients.is_none_or(|c| c.iter().all(|x| x.is_one()));
        Pair::new(Mode::Trivial, log_cy, charts, &strata)
    }
}

/// For every maximal cone `σ` of a smooth fan, a unimodular matrix whose first
/// columns are the rays of `σ` in order. Chart exponents of `χ^u` are `Bᵀu`.
pub fn smooth_chart_bases(fan: &Fan) -> Result<Vec<(usize, Mat)>> {
    let d = fan.rank;
    fan.maximal_cones()
        .into_iter()
        .map(|sigma| {
            let gens = fan.cone_generators(&fan.cones[sigma]);
            if !gens.is_empty() {
                let s = smith_normal_form(&transpose(&gens, d), gens.len())?;
                if s.invariant_factors().iter().any(|&x| x != 1) || s.rank() != gens.len() {
                    return Err(invalid(format!("cones[{sigma}]"), "cone is not unimodular"));
                }
            }
            let (p, k) = quotient_transform(&gens, d)?;
            let pinv = inverse_unimodular(&p)?;
            let mut cols: Vec<Vec<i64>> = gens.clone();
            cols.extend((k..d).map(|j| (0..d).map(|i| pinv[i][j]).collect()));
            Ok((sigma, transpose(&cols, d)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_lines() -> Pair {
        Pair::from_json(
            r#"{"mode":"trivial","charts":[{"coords":["z1","z2"],"boundary":[
                {"id":"D1","coefficient":"1","equation":[{"exp":[1,0],"coeff_val":"0","nonzero":true}]},
                {"id":"D2","coefficient":"1","equation":[{"exp":[0,1],"coeff_val":"0","nonzero":true}]}]}],
                "strata":[["D1"],["D2"],["D1","D2"]]}"#,
        )
        .unwrap()
    }

    #[test]
    fn strata_are_closed_downward() {
        let p = two_lines();
        assert_eq!(p.strata, vec![vec![], vec![0], vec![1], vec![0, 1]]);
        assert_eq!(p.chart_for(&[0, 1]), Some(0));
        assert_eq!(p.charts[0].coordinate_of("D2"), Some(1));
    }

    #[test]
    fn validation_paths() {
        let bad = r#"{"mode":"trivial","charts":[{"coords":["z1"],"boundary":[
            {"id":"D1","coefficient":"3/2","equation":[{"exp":[1],"coeff_val":"0","nonzero":true}]}]}],"strata":[]}"#;
        match Pair::from_json(bad) {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "charts[0].boundary[0].coefficient"),
            other => panic!("{other:?}"),
        }
        let short = r#"{"mode":"trivial","charts":[{"coords":["z1","z2"],"boundary":[
            {"id":"D1","coefficient":"1","equation":[{"exp":[1],"coeff_val":"0","nonzero":true}]}]}],"strata":[]}"#;
        match Pair::from_json(short) {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "charts[0].boundary[0].equation.num[0].exp"),
            other => panic!("{other:?}"),
        }
        let unknown = r#"{"mode":"trivial","charts":[{"coords":["z1"],"boundary":[]}],"strata":[["E"]]}"#;
        assert!(matches!(Pair::from_json(unknown), Err(Error::Validation { .. })));
    }

    #[test]
    fn vertical_components_must_be_coordinates() {
        let bad = r#"{"mode":"dvf","charts":[{"coords":["x","y"],"boundary":[
            {"id":"V","coefficient":"1","pi_multiplicity":1,"equation":[{"exp":[1,0],"coeff_val":"0","nonzero":true},{"exp":[0,1],"coeff_val":"0","nonzero":true}]}]}],"strata":[]}"#;
        assert!(matches!(Pair::from_json(bad), Err(Error::Validation { .. })));
    }

    #[test]
    fn smooth_fan_pair_and_product() {
        let p1 = Fan::from_parts(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        let pair = Pair::from_smooth_fan(&p1, None).unwrap();
        assert_eq!(pair.charts.len(), 2);
        assert_eq!(pair.strata.len(), 3);
        let sq = pair.product(&pair).unwrap();
        assert_eq!(sq.charts.len(), 4);
        assert_eq!(sq.strata.len(), 9);
        assert_eq!(sq.components.len(), 4);
    }

    #[test]
    fn chart_bases_start_with_rays() {
        let p2 = Fan::from_parts(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        for (sigma, b) in smooth_chart_bases(&p2).unwrap() {
            for (j, &r) in p2.cones[sigma].iter().enumerate() {
                assert_eq!((0..2).map(|i| b[i][j]).collect::<Vec<_>>(), p2.rays[r]);
            }
        }
    }
}
