use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::SimplicialComplex;
use crate::error::{invalid, Result};

/// A finite group acting on the vertex set by simplicial permutations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAction {
    pub generators: Vec<Vec<usize>>,
}

const MAX_GROUP_ORDER: usize = 100_000;

impl GroupAction {
    pub fn trivial() -> Self {
        GroupAction { generators: Vec::new() }
    }

    /// Checks that each generator is a permutation of the vertices mapping facets to facets.
    pub fn validate(&self, k: &SimplicialComplex) -> Result<()> {
        let n = k.labels.len();
        let facets: HashSet<&Vec<usize>> = k.facets.iter().collect();
        for (i, g) in self.generators.iter().enumerate() {
            let mut seen = vec![false; n];
            if g.len() != n || g.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
                return Err(invalid(format!("generators[{i}]"), "not a permutation of the vertex set"));
            }
            for f in &k.facets {
                if !facets.contains(&apply(g, f)) {
                    return Err(invalid(format!("generators[{i}]"), format!("facet {f:?} is not mapped to a facet")));
                }
            }
        }
        Ok(())
    }

    /// All group elements, starting with the identity.
    pub fn elements(&self, n: usize) -> Result<Vec<Vec<usize>>> {
        let id: Vec<usize> = (0..n).collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::from([id.clone()]);
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            for g in &self.generators {
                let h: Vec<usize> = out[i].iter().map(|&v| g[v]).collect();
                if seen.insert(h.clone()) {
                    out.push(h);
                    if out.len() > MAX_GROUP_ORDER {
                        return Err(invalid("generators", "group is too large"));
                    }
                }
            }
            i += 1;
        }
        Ok(out)
    }
}

pub(crate) fn apply(g: &[usize], s: &[usize]) -> Vec<usize> {
    let mut t: Vec<usize> = s.iter().map(|&v| g[v]).collect();
    t.sort_unstable();
    t
}

/// The quotient together with the subdivisions that were needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientReport {
    pub complex: SimplicialComplex,
    pub subdivisions: Vec<String>,
    pub group_order: usize,
}

/// A triangulation of the orbit space `|K| / G`.
pub fn quotient(k: &SimplicialComplex, g: &GroupAction) -> Result<SimplicialComplex> {
    quotient_with_report(k, g).map(|r| r.complex)
}

/// Regularizes the action and identifies vertex orbits.
///
/// Simplices fixed setwise but not pointwise by some element receive a relative
/// derived subdivision of their upward closure; if the action is still not
/// regular, one barycentric subdivision follows.
pub fn quotient_with_report(k: &SimplicialComplex, g: &GroupAction) -> Result<QuotientReport> {
    g.validate(k)?;
    let mut elems = g.elements(k.labels.len())?;
    let group_order = elems.len();
    let mut cur = k.clone();
    let mut subdivisions = Vec::new();
    if group_order > 1 {
        let simplices: Vec<Vec<usize>> = cur.simplices().into_iter().flatten().collect();
        let bad: HashSet<Vec<usize>> = simplices.iter().filter(|s| !pointwise_if_setwise(&elems, s)).cloned().collect();
        if !bad.is_empty() {
            let mut upward: HashSet<Vec<usize>> = HashSet::new();
            let mut by_dim: Vec<&Vec<usize>> = simplices.iter().collect();
            by_dim.sort_by_key(|s| s.len());
            for s in by_dim {
                let hit = bad.contains(s)
                    || (s.len() > 1
                        && (0..s.len()).any(|skip| {
                            let f: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                            upward.contains(&f)
                        }));
                if hit {
                    upward.insert(s.clone());
                }
            }
            let (sub, origin) = cur.derived_subdivision(&|s: &[usize]| upward.contains(s));
            elems = lift_elements(&elems, &origin);
            cur = sub;
            subdivisions.push(format!("derived subdivision of {} simplices", upward.len()));
        }
        if !is_regular(&cur, &elems) {
            let (sub, origin) = cur.barycentric_subdivision();
            elems = lift_elements(&elems, &origin);
            cur = sub;
            subdivisions.push("barycentric subdivision".into());
            debug_assert!(is_regular(&cur, &elems));
        }
    }
    let complex = identify(&cur, &elems);
    Ok(QuotientReport { complex, subdivisions, group_order })
}

/// Every element fixing `s` setwise fixes it pointwise.
fn pointwise_if_setwise(elems: &[Vec<usize>], s: &[usize]) -> bool {
    elems.iter().all(|g| apply(g, s) != s || s.iter().all(|&v| g[v] == v))
}

fn lift_elements(elems: &[Vec<usize>], origin: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let index: HashMap<&[usize], usize> = origin.iter().enumerate().map(|(i, o)| (o.as_slice(), i)).collect();
    elems
        .iter()
        .map(|g| origin.iter().map(|o| index[apply(g, o).as_slice()]).collect())
        .collect()
}

fn orbit_ids(n: usize, elems: &[Vec<usize>]) -> Vec<usize> {
    (0..n).map(|v| elems.iter().map(|g| g[v]).min().unwrap_or(v)).collect()
}

/// Vertices of a simplex lie in distinct orbits, and simplices with equal orbit
/// images are related by a group element.
pub fn is_regular(k: &SimplicialComplex, elems: &[Vec<usize>]) -> bool {
    let orbit = orbit_ids(k.labels.len(), elems);
    for f in &k.facets {
        let o: BTreeSet<usize> = f.iter().map(|&v| orbit[v]).collect();
        if o.len() != f.len() {
            return false;
        }
    }
    let mut canon_by_image: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for level in k.simplices() {
        for s in level {
            let mut img: Vec<usize> = s.iter().map(|&v| orbit[v]).collect();
            img.sort_unstable();
            let canon = elems.iter().map(|g| apply(g, &s)).min().expect("nonempty group");
            match canon_by_image.get(&img) {
                Some(c) if *c != canon => return false,
                Some(_) => {}
                None => {
                    canon_by_image.insert(img, canon);
                }
            }
        }
    }
    true
}

fn identify(k: &SimplicialComplex, elems: &[Vec<usize>]) -> SimplicialComplex {
    let orbit = orbit_ids(k.labels.len(), elems);
    let reps: Vec<usize> = orbit.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let new_id: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let labels = reps.iter().map(|&r| k.labels[r].clone()).collect();
    let facets = k.facets.iter().map(|f| f.iter().map(|&v| new_id[&orbit[v]]).collect()).collect();
    SimplicialComplex::from_facets(labels, facets).expect("orbit complex")
}

#[cfg(test)]
mod tests {
    use super::super::{cycle, homology, join, HomologyProfile};
    use super::*;

    #[test]
    fn trivial_group_is_identity() {
        let k = cycle(5);
        assert_eq!(quotient(&k, &GroupAction::trivial()).unwrap(), k);
    }

    #[test]
    fn antipodal_square() {
        let k = cycle(4);
        let g = GroupAction { generators: vec![vec![2, 3, 0, 1]] };
        let r = quotient_with_report(&k, &g).unwrap();
        assert_eq!(homology(&r.complex).unwrap(), HomologyProfile::sphere(1));
        assert_eq!(r.group_order, 2);
    }

    #[test]
    fn swapping_join_factors_gives_three_sphere() {
        let c = cycle(4);
        let k = join(&c, &c);
        let swap: Vec<usize> = (0..8).map(|v| (v + 4) % 8).collect();
        let q = quotient(&k, &GroupAction { generators: vec![swap] }).unwrap();
        assert_eq!(homology(&q).unwrap(), HomologyProfile::sphere(3));
    }

    #[test]
    fn non_simplicial_generator_is_rejected() {
        let k = cycle(4);
        let g = GroupAction { generators: vec![vec![1, 0, 2, 3]] };
        assert!(quotient(&k, &g).is_err());
    }

    #[test]
    fn reflection_of_a_triangle_boundary() {
        // a reflection fixes a vertex and swaps the other two: quotient is an interval
        let k = cycle(3);
        let q = quotient(&k, &GroupAction { generators: vec![vec![0, 2, 1]] }).unwrap();
        assert_eq!(homology(&q).unwrap().betti(), vec![1, 0]);
    }
}
