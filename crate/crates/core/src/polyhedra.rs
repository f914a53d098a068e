//! Rational polyhedral cones and fans with exact integer data.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{q, Q};
use crate::error::{invalid, Error, Result};
use crate::lattice::{
    dot, integer_kernel, inverse_unimodular, is_saturated_basis, mat_vec, nullspace_q, primitive, primitive_q,
    quotient_transform, rank_i, rref, to_q,
};

/// Generators of `{y : <y, g> >= 0 for all g}`: the extreme rays of its pointed
/// part inside `span(gens)` followed by `±` a lattice basis of `gens^⊥`.
pub fn dual_generators(gens: &[Vec<i64>], d: usize) -> Result<Vec<Vec<i64>>> {
    let gens: Vec<Vec<i64>> = gens.iter().filter(|g| g.iter().any(|&x| x != 0)).cloned().collect();
    let lin = integer_kernel(&gens, d)?;
    let k = d - lin.len();
    let mut rays: BTreeSet<Vec<i64>> = BTreeSet::new();
    if k > 0 {
        let lin_q = to_q(&lin);
        let gens_q = to_q(&gens);
        for sub in (0..gens.len()).combinations(k - 1) {
            let mut rows: Vec<Vec<Q>> = lin_q.clone();
            rows.extend(sub.iter().map(|&i| gens_q[i].clone()));
            if crate::lattice::rank_q(&rows) != d - 1 {
                continue;
            }
            let ns = nullspace_q(&rows, d);
            let y = &ns[0];
            let vals: Vec<Q> = gens_q.iter().map(|g| crate::lattice::dot_q(g, y)).collect();
            let sign = if vals.iter().all(|v| !v.is_negative()) {
                1
            } else if vals.iter().all(|v| !v.is_positive()) {
                -1
            } else {
                continue;
            };
            let p = primitive_q(y)?;
            rays.insert(p.iter().map(|x| sign * x).collect());
        }
    }
    let mut out: Vec<Vec<i64>> = rays.into_iter().collect();
    for l in lin {
        let l = primitive(&l);
        out.push(l.iter().map(|x| -x).collect());
        out.push(l);
    }
    Ok(out)
}

/// A rational polyhedral cone `cone(generators) ⊆ R^d`.
///
/// Generators are primitive, sorted and free of duplicates; a pointed cone keeps
/// exactly its extreme rays. The inequality description is cached.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cone {
    ambient: usize,
    generators: Vec<Vec<i64>>,
    inequalities: Vec<Vec<i64>>,
    dimension: usize,
    pointed: bool,
}

impl Cone {
    pub fn new(ambient: usize, gens: Vec<Vec<i64>>) -> Result<Self> {
        for (i, g) in gens.iter().enumerate() {
            if g.len() != ambient {
                return Err(invalid(format!("generators[{i}]"), format!("expected length {ambient}, got {}", g.len())));
            }
        }
        let mut gs: Vec<Vec<i64>> = gens.iter().filter(|g| g.iter().any(|&x| x != 0)).map(|g| primitive(g)).collect();
        gs.sort();
        gs.dedup();
        let inequalities = dual_generators(&gs, ambient)?;
        let dimension = rank_i(&gs);
        let pointed = rank_i(&inequalities) == ambient;
        if pointed {
            gs.retain(|g| {
                let tight: Vec<Vec<i64>> = inequalities.iter().filter(|h| dot(h, g) == 0).cloned().collect();
                rank_i(&tight) == ambient - 1
            });
        }
        Ok(Cone { ambient, generators: gs, inequalities, dimension, pointed })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    /// Extreme rays; only meaningful for pointed cones.
    pub fn rays(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn inequalities(&self) -> &[Vec<i64>] {
        &self.inequalities
    }

    pub fn dim(&self) -> usize {
        self.dimension
    }

    pub fn is_pointed(&self) -> bool {
        self.pointed
    }

    pub fn is_simplicial(&self) -> bool {
        self.pointed && self.generators.len() == self.dimension
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.inequalities.iter().all(|h| dot(h, v) >= 0)
    }

    pub fn contains_q(&self, v: &[Q]) -> bool {
        self.inequalities.iter().all(|h| !crate::lattice::dot_iq(h, v).is_negative())
    }

    /// True when `v` lies in the relative interior.
    pub fn contains_in_relint(&self, v: &[i64]) -> bool {
        self.contains(v)
            && self
                .inequalities
                .iter()
                .all(|h| dot(h, v) > 0 || self.generators.iter().all(|g| dot(h, g) == 0))
    }

    /// A lattice basis of `cone ∩ -cone`.
    pub fn lineality_basis(&self) -> Result<Vec<Vec<i64>>> {
        integer_kernel(&self.inequalities, self.ambient)
    }

    pub fn dual(&self) -> Result<Cone> {
        Cone::new(self.ambient, self.inequalities.clone())
    }

    /// Set equality of cones, independent of the generating sets.
    pub fn same_set(&self, other: &Cone) -> bool {
        self.ambient == other.ambient
            && self.generators.iter().all(|g| other.contains(g))
            && other.generators.iter().all(|g| self.contains(g))
            && self.lineality_basis().map(|b| b.iter().all(|l| other.contains(l) && other.contains(&crate::lattice::neg(l)))).unwrap_or(false)
            && other.lineality_basis().map(|b| b.iter().all(|l| self.contains(l) && self.contains(&crate::lattice::neg(l)))).unwrap_or(false)
    }

    pub fn intersection(&self, other: &Cone) -> Result<Cone> {
        let mut h = self.inequalities.clone();
        h.extend(other.inequalities.iter().cloned());
        let gens = dual_generators(&h, self.ambient)?;
        Cone::new(self.ambient, gens)
    }

    /// Faces of a pointed cone, each given by the indices of its extreme rays.
    /// The list contains the zero face and the cone itself, sorted by size.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let n = self.generators.len();
        let facets: Vec<BTreeSet<usize>> = self
            .inequalities
            .iter()
            .map(|h| (0..n).filter(|&i| dot(h, &self.generators[i]) == 0).collect::<BTreeSet<usize>>())
            .filter(|s| s.len() < n)
            .collect();
        let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        let mut stack = vec![(0..n).collect::<BTreeSet<usize>>()];
        while let Some(f) = stack.pop() {
            if !found.insert(f.clone()) {
                continue;
            }
            for fa in &facets {
                let g: BTreeSet<usize> = f.intersection(fa).cloned().collect();
                if !found.contains(&g) {
                    stack.push(g);
                }
            }
        }
        let mut out: Vec<Vec<usize>> = found.into_iter().map(|s| s.into_iter().collect()).collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    }

    /// Minimal generators of the monoid `cone ∩ Z^d` of a pointed cone.
    pub fn hilbert_basis(&self) -> Result<Vec<Vec<i64>>> {
        if !self.pointed {
            return Err(invalid("cone", "Hilbert basis requires a pointed cone"));
        }
        if self.generators.is_empty() {
            return Ok(Vec::new());
        }
        let d = self.ambient;
        let (p, k) = quotient_transform(&self.generators, d)?;
        let pinv = inverse_unimodular(&p)?;
        let local: Vec<Vec<i64>> = self.generators.iter().map(|g| mat_vec(&p, g)[..k].to_vec()).collect();
        let local_cone = Cone::new(k, local.clone())?;
        let lo: Vec<i64> = (0..k).map(|j| local.iter().map(|r| r[j].min(0)).sum()).collect();
        let hi: Vec<i64> = (0..k).map(|j| local.iter().map(|r| r[j].max(0)).sum()).collect();
        let mut cands: Vec<Vec<i64>> = Vec::new();
        let mut x = lo.clone();
        'outer: loop {
            if x.iter().any(|&v| v != 0) && local_cone.contains(&x) {
                cands.push(x.clone());
            }
            for j in 0..k {
                if x[j] < hi[j] {
                    x[j] += 1;
                    continue 'outer;
                }
                x[j] = lo[j];
            }
            break;
        }
        let irreducible: Vec<Vec<i64>> = cands
            .iter()
            .filter(|x| {
                !cands.iter().any(|y| {
                    y != *x && {
                        let diff: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                        local_cone.contains(&diff)
                    }
                })
            })
            .cloned()
            .collect();
        let mut out: Vec<Vec<i64>> = irreducible
            .into_iter()
            .map(|y| {
                let mut full = y;
                full.resize(d, 0);
                mat_vec(&pinv, &full)
            })
            .collect();
        out.sort();
        Ok(out)
    }

    /// `sum of rays`, a relative interior point of a pointed cone.
    pub fn interior_point(&self) -> Vec<i64> {
        (0..self.ambient).map(|j| self.generators.iter().map(|g| g[j]).sum()).collect()
    }
}

/// A fan in `N_R = R^rank`, closed under taking faces. Cones are sorted lists
/// of ray indices; the list of cones is sorted by size, then lexicographically,
/// and starts with the zero cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

impl Fan {
    /// Builds a fan from cones given by generators. Rays are collected, faces are
    /// added, and the result is validated.
    pub fn from_cones(rank: usize, cones: &[Vec<Vec<i64>>]) -> Result<Fan> {
        let fan = Fan::from_cones_unchecked(rank, cones)?;
        fan.validate()?;
        Ok(fan)
    }

    /// As [`Fan::from_cones`] without the pairwise intersection check, for
    /// cones known to form a fan (chambers of an arrangement, products of fans).
    pub fn from_cones_unchecked(rank: usize, cones: &[Vec<Vec<i64>>]) -> Result<Fan> {
        let cs: Vec<Cone> = cones.iter().map(|g| Cone::new(rank, g.clone())).collect::<Result<_>>()?;
        for (i, c) in cs.iter().enumerate() {
            if !c.is_pointed() {
                return Err(invalid(format!("cones[{i}]"), "cone is not pointed"));
            }
        }
        let rays: Vec<Vec<i64>> = cs.iter().flat_map(|c| c.rays().to_vec()).collect::<BTreeSet<_>>().into_iter().collect();
        let index: BTreeMap<&Vec<i64>, usize> = rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        all.insert(Vec::new());
        for c in &cs {
            for f in c.faces() {
                let mut ids: Vec<usize> = f.iter().map(|&i| index[&c.rays()[i]]).collect();
                ids.sort();
                all.insert(ids);
            }
        }
        let mut cones: Vec<Vec<usize>> = all.into_iter().collect();
        cones.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        Ok(Fan { rank, rays, cones })
    }

    /// Accepts a JSON fan whose cone list may contain only maximal cones.
    pub fn from_parts(rank: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != rank {
                return Err(invalid(format!("rays[{i}]"), format!("expected length {rank}")));
            }
            if r.iter().all(|&x| x == 0) || primitive(r) != *r {
                return Err(invalid(format!("rays[{i}]"), "ray must be a primitive nonzero vector"));
            }
        }
        let mut gen_lists = Vec::new();
        for (i, c) in cones.iter().enumerate() {
            let mut gens = Vec::new();
            for (j, &r) in c.iter().enumerate() {
                let ray = rays.get(r).ok_or_else(|| invalid(format!("cones[{i}][{j}]"), format!("ray index {r} out of range")))?;
                gens.push(ray.clone());
            }
            let cone = Cone::new(rank, gens.clone())?;
            if cone.rays().len() != gens.iter().collect::<BTreeSet<_>>().len() {
                return Err(invalid(format!("cones[{i}]"), "listed rays are not all extreme rays of the cone"));
            }
            gen_lists.push(gens);
        }
        let mut fan = Fan::from_cones(rank, &gen_lists)?;
        for r in &rays {
            if !fan.rays.contains(r) {
                fan.rays.push(r.clone());
                fan.cones.push(vec![fan.rays.len() - 1]);
            }
        }
        Fan::from_cones(rank, &fan.cones.iter().map(|c| fan.cone_generators(c)).collect::<Vec<_>>())
    }

    /// Parses `{"rank", "rays", "cones"}`; cones may list only the maximal ones.
    pub fn from_json(s: &str) -> Result<Fan> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            #[serde(default)]
            schema: Option<String>,
            rank: usize,
            rays: Vec<Vec<i64>>,
            cones: Vec<Vec<usize>>,
        }
        let raw: Raw = serde_json::from_str(s).map_err(|e| Error::Parse { what: "fan", input: e.to_string() })?;
        if let Some(v) = raw.schema.filter(|v| v != "1") {
            return Err(invalid("schema", format!("unsupported schema version {v:?}")));
        }
        Fan::from_parts(raw.rank, raw.rays, raw.cones)
    }

    /// The product fan in `N × N'`, cones being products of cones.
    pub fn product(&self, other: &Fan) -> Result<Fan> {
        let d = self.rank + other.rank;
        let mut cones = Vec::new();
        for a in self.maximal_cones() {
            for b in other.maximal_cones() {
                let mut g: Vec<Vec<i64>> = self.cones[a]
                    .iter()
                    .map(|&r| self.rays[r].iter().cloned().chain(std::iter::repeat_n(0, other.rank)).collect())
                    .collect();
                g.extend(other.cones[b].iter().map(|&r| std::iter::repeat_n(0, self.rank).chain(other.rays[r].iter().cloned()).collect()));
                cones.push(g);
            }
        }
        Fan::from_cones_unchecked(d, &cones)
    }

    pub fn cone_generators(&self, cone: &[usize]) -> Vec<Vec<i64>> {
        cone.iter().map(|&i| self.rays[i].clone()).collect()
    }

    pub fn cone(&self, idx: usize) -> Result<Cone> {
        Cone::new(self.rank, self.cone_generators(&self.cones[idx]))
    }

    pub fn cone_index(&self, rays: &[usize]) -> Option<usize> {
        let mut s = rays.to_vec();
        s.sort();
        self.cones.iter().position(|c| *c == s)
    }

    pub fn maximal_cones(&self) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&i| {
                !self.cones.iter().any(|c| c.len() > self.cones[i].len() && self.cones[i].iter().all(|r| c.contains(r)))
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.cones.iter().map(|c| rank_i(&self.cone_generators(c))).max().unwrap_or(0)
    }

    /// Checks pointedness, closure under faces, and that two cones meet in a common face.
    pub fn validate(&self) -> Result<()> {
        let set: BTreeSet<&Vec<usize>> = self.cones.iter().collect();
        let cones: Vec<Cone> = (0..self.cones.len()).map(|i| self.cone(i)).collect::<Result<_>>()?;
        for (i, c) in cones.iter().enumerate() {
            if !c.is_pointed() {
                return Err(invalid(format!("cones[{i}]"), "cone is not pointed"));
            }
            if c.rays().len() != self.cones[i].len() {
                return Err(invalid(format!("cones[{i}]"), "listed rays are not all extreme"));
            }
            for f in c.faces() {
                let mut ids: Vec<usize> = f
                    .iter()
                    .map(|&j| self.rays.iter().position(|r| *r == c.rays()[j]).expect("ray of cone"))
                    .collect();
                ids.sort();
                if !set.contains(&ids) {
                    return Err(invalid(format!("cones[{i}]"), format!("face {ids:?} is missing")));
                }
            }
        }
        let maximal = self.maximal_cones();
        for (a, &i) in maximal.iter().enumerate() {
            for &j in &maximal[a + 1..] {
                let common: Vec<usize> = self.cones[i].iter().filter(|r| self.cones[j].contains(r)).cloned().collect();
                let meet = cones[i].intersection(&cones[j])?;
                let expected = Cone::new(self.rank, self.cone_generators(&common))?;
                if !meet.same_set(&expected) || !set.contains(&common) {
                    return Err(invalid(
                        format!("cones[{i}]"),
                        format!("cones {:?} and {:?} do not meet in a common face", self.cones[i], self.cones[j]),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Face relation as pairs `(tau, sigma)` with `tau ⪯ sigma`, by cone index.
    pub fn face_relation(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, t) in self.cones.iter().enumerate() {
            for (j, s) in self.cones.iter().enumerate() {
                if t.iter().all(|r| s.contains(r)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The star of a cone, as a fan in `N / span(sigma)`.
    pub fn star_fan(&self, sigma: usize) -> Result<Fan> {
        let s = &self.cones[sigma];
        let (p, k) = quotient_transform(&self.cone_generators(s), self.rank)?;
        let proj = |r: &Vec<i64>| mat_vec(&p, r)[k..].to_vec();
        let cones: Vec<Vec<Vec<i64>>> = self
            .cones
            .iter()
            .filter(|t| s.iter().all(|r| t.contains(r)))
            .map(|t| t.iter().filter(|r| !s.contains(r)).map(|&r| proj(&self.rays[r])).collect())
            .collect();
        Fan::from_cones(self.rank - k, &cones)
    }

    /// The fan `{tau ∩ V}` in coordinates of a basis of the saturated sublattice `V ∩ N`.
    pub fn intersect_subspace(&self, basis: &[Vec<i64>]) -> Result<Fan> {
        for (i, b) in basis.iter().enumerate() {
            if b.len() != self.rank {
                return Err(invalid(format!("basis[{i}]"), format!("expected length {}", self.rank)));
            }
        }
        if !is_saturated_basis(basis, self.rank)? {
            return Err(invalid("basis", "basis does not span a saturated sublattice"));
        }
        let k = basis.len();
        let mut cones = Vec::new();
        for i in 0..self.cones.len() {
            let c = self.cone(i)?;
            let proj: Vec<Vec<i64>> = c.inequalities().iter().map(|h| basis.iter().map(|b| dot(b, h)).collect()).collect();
            let gens = dual_generators(&proj, k)?;
            cones.push(gens);
        }
        Fan::from_cones(k, &cones)
    }

    /// True when the support of the fan is all of `N_R`.
    pub fn is_complete(&self) -> Result<bool> {
        // Every codimension-one cone lies in exactly two maximal cones, and all maximal cones are full.
        let max = self.maximal_cones();
        if max.iter().any(|&i| rank_i(&self.cone_generators(&self.cones[i])) != self.rank) {
            return Ok(false);
        }
        for (i, c) in self.cones.iter().enumerate() {
            if rank_i(&self.cone_generators(c)) + 1 == self.rank {
                let n = max.iter().filter(|&&m| c.iter().all(|r| self.cones[m].contains(r))).count();
                if n != 2 {
                    let _ = i;
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// A stratum of the toric compactification: the orbit closure of a cone, with
/// its own fan (the star of the cone).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub cone: usize,
    pub dimension: usize,
    pub fan: Fan,
}

pub fn compactified_fan_strata(fan: &Fan) -> Result<Vec<Stratum>> {
    (0..fan.cones.len())
        .map(|i| {
            let star = fan.star_fan(i)?;
            Ok(Stratum { cone: i, dimension: star.rank, fan: star })
        })
        .collect()
}

/// Vertices of a polyhedron by enumeration: the inequality rows `a·x >= b`,
/// the equality rows `e·x = f`. Returns sorted, deduplicated rational points.
pub fn polyhedron_vertices(ineq: &[(Vec<Q>, Q)], eq: &[(Vec<Q>, Q)], n: usize) -> Vec<Vec<Q>> {
    let mut out: BTreeSet<Vec<Q>> = BTreeSet::new();
    let need = n.saturating_sub(rank_rows(eq));
    let base: Vec<Vec<Q>> = eq.iter().map(|(a, b)| a.iter().cloned().chain(std::iter::once(b.clone())).collect()).collect();
    for sub in (0..ineq.len()).combinations(need) {
        let mut rows = base.clone();
        rows.extend(sub.iter().map(|&i| ineq[i].0.iter().cloned().chain(std::iter::once(ineq[i].1.clone())).collect()));
        let (r, piv) = rref(&rows);
        if piv.len() != n || piv.contains(&n) {
            continue;
        }
        let x: Vec<Q> = (0..n).map(|j| r[j][n].clone()).collect();
        if ineq.iter().all(|(a, b)| crate::lattice::dot_q(a, &x) >= *b) {
            out.insert(x);
        }
    }
    out.into_iter().collect()
}

/// Extreme rays of the recession cone `{a·x >= 0, e·x = 0}` of a pointed polyhedron,
/// as primitive integer vectors.
pub fn polyhedron_rays(ineq: &[(Vec<Q>, Q)], eq: &[(Vec<Q>, Q)], n: usize) -> Result<Vec<Vec<i64>>> {
    let mut out: BTreeSet<Vec<i64>> = BTreeSet::new();
    let er = rank_rows(eq);
    if n <= er {
        return Ok(Vec::new());
    }
    let need = n - er - 1;
    let eq_rows: Vec<Vec<Q>> = eq.iter().map(|(a, _)| a.clone()).collect();
    for sub in (0..ineq.len()).combinations(need) {
        let mut rows = eq_rows.clone();
        rows.extend(sub.iter().map(|&i| ineq[i].0.clone()));
        if crate::lattice::rank_q(&rows) != n - 1 {
            continue;
        }
        let y = &nullspace_q(&rows, n)[0];
        for s in [1i64, -1] {
            let cand: Vec<Q> = y.iter().map(|v| v * q(s)).collect();
            if ineq.iter().all(|(a, _)| !crate::lattice::dot_q(a, &cand).is_negative()) {
                out.insert(primitive_q(&cand)?);
            }
        }
    }
    Ok(out.into_iter().collect())
}

fn rank_rows(eq: &[(Vec<Q>, Q)]) -> usize {
    crate::lattice::rank_q(&eq.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>())
}

pub fn is_zero_q(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}
