//! Finite simplicial complexes, subdivisions, joins, group quotients and
//! integral homology, plus the character-variety and Tate-curve pipelines.

mod character;
mod homology;
pub mod quotient;
mod sphere;
mod tate;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::rank_i;
use crate::polyhedra::Fan;

pub use character::{character_variety_complex, gl_braid_fan, sl_kernel_fan, CharacterVariety, Group};
pub use homology::{homology, HomologyGroup, HomologyProfile};
pub use quotient::{quotient, quotient_with_report, GroupAction, QuotientReport};
pub use sphere::{random_sphere_points, sphere_quotient_map, sphere_quotient_map_check, SphereCheckReport};
pub use tate::{tate_strata, TateClassification, TateCoordinate, TateStratum};

/// A finite abstract simplicial complex given by its facets.
///
/// Facets are sorted vertex lists, none contained in another, and the list of
/// facets is sorted. Every vertex occurs in some facet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    #[serde(rename = "vertices")]
    pub labels: Vec<String>,
    pub facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    pub fn from_facets(labels: Vec<String>, facets: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        let mut fs: Vec<Vec<usize>> = Vec::with_capacity(facets.len());
        for (i, f) in facets.into_iter().enumerate() {
            let mut f = f;
            f.sort_unstable();
            f.dedup();
            if f.is_empty() {
                continue;
            }
            if let Some(&v) = f.iter().find(|&&v| v >= n) {
                return Err(invalid(format!("facets[{i}]"), format!("vertex {v} out of range")));
            }
            fs.push(f);
        }
        let fs = maximal_only(fs);
        let mut used = vec![false; n];
        for f in &fs {
            for &v in f {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(invalid(format!("vertices[{v}]"), "vertex lies in no facet"));
        }
        Ok(SimplicialComplex { labels, facets: fs })
    }

    /// Builds a complex from facets over arbitrary labels, numbering vertices in
    /// label order.
    pub fn from_labeled_facets(facets: &[Vec<String>]) -> Result<Self> {
        let labels: Vec<String> = facets.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let index: HashMap<&String, usize> = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let fs = facets.iter().map(|f| f.iter().map(|l| index[l]).collect()).collect();
        SimplicialComplex::from_facets(labels, fs)
    }

    pub fn empty() -> Self {
        SimplicialComplex { labels: Vec::new(), facets: Vec::new() }
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    /// Dimension; the empty complex has dimension -1.
    pub fn dim(&self) -> isize {
        self.facets.iter().map(|f| f.len() as isize - 1).max().unwrap_or(-1)
    }

    /// All simplices grouped by dimension, each group sorted.
    pub fn simplices(&self) -> Vec<Vec<Vec<usize>>> {
        let d = self.dim();
        if d < 0 {
            return Vec::new();
        }
        let mut sets: Vec<HashSet<Vec<usize>>> = vec![HashSet::new(); d as usize + 1];
        for f in &self.facets {
            let k = f.len();
            for mask in 1u64..(1u64 << k) {
                let s: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                sets[s.len() - 1].insert(s);
            }
        }
        sets.into_iter()
            .map(|s| {
                let mut v: Vec<Vec<usize>> = s.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.simplices().iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().iter().enumerate().map(|(i, &n)| if i % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
    }

    /// Barycentric subdivision. Vertex `i` of the result is the barycenter of
    /// the simplex `origin[i]` of `self`.
    pub fn barycentric_subdivision(&self) -> (SimplicialComplex, Vec<Vec<usize>>) {
        self.derived_subdivision(&|s: &[usize]| s.len() > 1)
    }

    /// Derived subdivision relative to an upward-closed family of simplices:
    /// every simplex in the family receives a barycenter, subdividing in order of
    /// decreasing dimension. Returns the complex and the origin of each vertex.
    pub fn derived_subdivision(&self, in_family: &dyn Fn(&[usize]) -> bool) -> (SimplicialComplex, Vec<Vec<usize>>) {
        let mut origin: Vec<Vec<usize>> = (0..self.labels.len()).map(|v| vec![v]).collect();
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut facets: Vec<Vec<usize>> = Vec::new();
        for f in &self.facets {
            let mut out = Vec::new();
            derive(f, in_family, &mut origin, &mut ids, &mut out);
            facets.extend(out);
        }
        let labels: Vec<String> = origin
            .iter()
            .map(|o| {
                if o.len() == 1 {
                    self.labels[o[0]].clone()
                } else {
                    format!("[{}]", o.iter().map(|&v| self.labels[v].as_str()).collect::<Vec<_>>().join(","))
                }
            })
            .collect();
        let k = SimplicialComplex::from_facets(labels, facets).expect("subdivision is a complex");
        (k, origin)
    }

    /// The join, with labels prefixed `a:` and `b:` to keep them disjoint.
    pub fn join(&self, other: &SimplicialComplex) -> SimplicialComplex {
        join(self, other)
    }

    /// Writes the facets in OFF format. Without coordinates the vertices are
    /// placed on the moment curve. Simplices of dimension above two are written
    /// as their triangles.
    pub fn to_off(&self, coords: Option<&[Vec<f64>]>) -> String {
        let pts: Vec<[f64; 3]> = (0..self.labels.len())
            .map(|i| match coords {
                Some(c) => {
                    let p = &c[i];
                    [p.first().copied().unwrap_or(0.0), p.get(1).copied().unwrap_or(0.0), p.get(2).copied().unwrap_or(0.0)]
                }
                None => {
                    let t = i as f64 / self.labels.len().max(1) as f64;
                    [t, t * t, t * t * t]
                }
            })
            .collect();
        let mut faces: Vec<Vec<usize>> = Vec::new();
        for f in &self.facets {
            if f.len() <= 3 {
                faces.push(f.clone());
            } else {
                for a in 0..f.len() {
                    for b in a + 1..f.len() {
                        for c in b + 1..f.len() {
                            faces.push(vec![f[a], f[b], f[c]]);
                        }
                    }
                }
            }
        }
        faces.sort();
        faces.dedup();
        let mut s = String::new();
        let _ = writeln!(s, "OFF");
        let _ = writeln!(s, "{} {} 0", pts.len(), faces.len());
        for p in &pts {
            let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
        }
        for f in &faces {
            let _ = writeln!(s, "{} {}", f.len(), f.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
        }
        s
    }
}

fn derive(
    s: &[usize],
    in_family: &dyn Fn(&[usize]) -> bool,
    origin: &mut Vec<Vec<usize>>,
    ids: &mut HashMap<Vec<usize>, usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if s.len() <= 1 || !in_family(s) {
        out.push(s.to_vec());
        return;
    }
    let w = *ids.entry(s.to_vec()).or_insert_with(|| {
        origin.push(s.to_vec());
        origin.len() - 1
    });
    for skip in 0..s.len() {
        let face: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
        let mut sub = Vec::new();
        derive(&face, in_family, origin, ids, &mut sub);
        for mut t in sub {
            t.push(w);
            out.push(t);
        }
    }
}

/// Keeps the inclusion-maximal sets, sorted and deduplicated.
fn maximal_only(mut fs: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    fs.sort_unstable();
    fs.dedup();
    let max_len = fs.iter().map(Vec::len).max().unwrap_or(0);
    if fs.iter().all(|f| f.len() == max_len) {
        return fs;
    }
    let lens: BTreeSet<usize> = fs.iter().map(Vec::len).collect();
    let mut covered: HashSet<Vec<usize>> = HashSet::new();
    for f in &fs {
        for &l in lens.iter().filter(|&&l| l < f.len()) {
            for c in itertools::Itertools::combinations(f.iter().cloned(), l) {
                covered.insert(c);
            }
        }
    }
    fs.into_iter().filter(|f| !covered.contains(f)).collect()
}

pub fn join(a: &SimplicialComplex, b: &SimplicialComplex) -> SimplicialComplex {
    let na = a.labels.len();
    let labels: Vec<String> = a
        .labels
        .iter()
        .map(|l| format!("a:{l}"))
        .chain(b.labels.iter().map(|l| format!("b:{l}")))
        .collect();
    let facets: Vec<Vec<usize>> = if a.facets.is_empty() {
        b.facets.iter().map(|g| g.iter().map(|v| v + na).collect()).collect()
    } else if b.facets.is_empty() {
        a.facets.clone()
    } else {
        a.facets
            .iter()
            .flat_map(|f| b.facets.iter().map(move |g| f.iter().cloned().chain(g.iter().map(|v| v + na)).collect()))
            .collect()
    };
    SimplicialComplex::from_facets(labels, facets).expect("join of complexes")
}

/// The boundary of the `n`-simplex on `n + 1` vertices, a sphere of dimension `n - 1`.
pub fn simplex_boundary(n: usize) -> SimplicialComplex {
    let labels = (0..=n).map(|i| format!("v{i}")).collect();
    let facets = (0..=n).map(|skip| (0..=n).filter(|&v| v != skip).collect()).collect();
    SimplicialComplex::from_facets(labels, facets).expect("simplex boundary")
}

/// The cycle on `n >= 3` vertices.
pub fn cycle(n: usize) -> SimplicialComplex {
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    let facets = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    SimplicialComplex::from_facets(labels, facets).expect("cycle")
}

/// The link of a fan: vertices are rays, simplices are cones. Non-simplicial
/// cones are stellarly subdivided at the sum of their rays, in order of
/// decreasing dimension. Extra vertices are labelled `c<cone index>`.
pub fn link_complex(fan: &Fan) -> SimplicialComplex {
    link_complex_with_coords(fan).0
}

/// As [`link_complex`], also returning a point of the cone for every vertex.
pub fn link_complex_with_coords(fan: &Fan) -> (SimplicialComplex, Vec<Vec<i64>>) {
    let dims: Vec<usize> = fan.cones.iter().map(|c| rank_i(&fan.cone_generators(c))).collect();
    let mut labels: Vec<String> = (0..fan.rays.len()).map(|i| format!("r{i}")).collect();
    let mut coords: Vec<Vec<i64>> = fan.rays.clone();
    let mut centers: HashMap<usize, usize> = HashMap::new();
    let mut facets = Vec::new();
    for m in fan.maximal_cones() {
        if fan.cones[m].is_empty() {
            continue;
        }
        let mut out = Vec::new();
        link_cone(fan, &dims, m, &mut labels, &mut coords, &mut centers, &mut out);
        facets.extend(out);
    }
    let k = SimplicialComplex::from_facets(labels, facets).expect("link complex");
    (k, coords)
}

fn link_cone(
    fan: &Fan,
    dims: &[usize],
    c: usize,
    labels: &mut Vec<String>,
    coords: &mut Vec<Vec<i64>>,
    centers: &mut HashMap<usize, usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let rays = &fan.cones[c];
    if rays.len() == dims[c] {
        out.push(rays.clone());
        return;
    }
    let w = *centers.entry(c).or_insert_with(|| {
        labels.push(format!("c{c}"));
        coords.push(crate::lattice::primitive(
            &(0..fan.rank).map(|j| rays.iter().map(|&r| fan.rays[r][j]).sum()).collect::<Vec<i64>>(),
        ));
        labels.len() - 1
    });
    for (t, tr) in fan.cones.iter().enumerate() {
        if dims[t] + 1 == dims[c] && tr.iter().all(|r| rays.contains(r)) && !tr.is_empty() {
            let mut sub = Vec::new();
            link_cone(fan, dims, t, labels, coords, centers, &mut sub);
            for mut s in sub {
                s.push(w);
                out.push(s);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranks(k: &SimplicialComplex) -> Vec<usize> {
        homology(k).unwrap().degree.iter().map(|g| g.rank).collect()
    }

    #[test]
    fn join_of_two_point_pairs_is_a_square() {
        let s0 = SimplicialComplex::from_facets(vec!["p".into(), "q".into()], vec![vec![0], vec![1]]).unwrap();
        let sq = join(&s0, &s0);
        assert_eq!(sq.facets.len(), 4);
        assert_eq!(ranks(&sq), vec![1, 1]);
    }

    #[test]
    fn join_with_point_is_a_cone() {
        let pt = SimplicialComplex::from_facets(vec!["o".into()], vec![vec![0]]).unwrap();
        let c = join(&cycle(3), &pt);
        assert_eq!(ranks(&c), vec![1, 0, 0]);
    }

    #[test]
    fn subdivision_preserves_homology() {
        let k = simplex_boundary(3);
        let (sd, origin) = k.barycentric_subdivision();
        assert_eq!(sd.facets.len(), 24);
        assert_eq!(origin.len(), 14);
        assert_eq!(ranks(&sd), vec![1, 0, 1]);
        assert_eq!(sd.euler_characteristic(), 2);
    }

    #[test]
    fn non_maximal_facets_are_dropped() {
        let k = SimplicialComplex::from_facets(vec!["a".into(), "b".into(), "c".into()], vec![vec![0, 1, 2], vec![0, 1]]).unwrap();
        assert_eq!(k.facets, vec![vec![0, 1, 2]]);
        assert!(SimplicialComplex::from_facets(vec!["a".into(), "b".into()], vec![vec![0]]).is_err());
    }

    #[test]
    fn links_of_small_fans() {
        let p2 = Fan::from_parts(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let l = link_complex(&p2);
        assert_eq!(l.facets.len(), 3);
        assert_eq!(ranks(&l), vec![1, 1]);
        let ray = Fan::from_parts(2, vec![vec![1, 0]], vec![vec![0]]).unwrap();
        assert_eq!(link_complex(&ray).facets, vec![vec![0]]);
        let oct = Fan::from_parts(3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(link_complex(&oct).facets, vec![vec![0, 1, 2]]);
        let square = Fan::from_parts(
            3,
            vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        let ls = link_complex(&square);
        assert_eq!(ls.facets.len(), 4);
        assert_eq!(ranks(&ls), vec![1, 0, 0]);
    }

    #[test]
    fn off_export_lists_triangles() {
        let off = simplex_boundary(3).to_off(None);
        assert!(off.starts_with("OFF\n4 4 0\n"));
    }
}
