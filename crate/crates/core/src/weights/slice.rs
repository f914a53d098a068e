use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::arith::{fmt_q, Q};
use crate::complexes::SimplicialComplex;
use crate::error::{invalid, Result};
use crate::lattice::{dot_q, rank_q};
use crate::logstructure::KatoFan;
use crate::polyhedra::{polyhedron_rays, polyhedron_vertices};

use super::ks::{hrep, SubFan};

/// A vertex of a slice: its support (fan label indices) and its coordinates there.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SliceVertex {
    pub support: Vec<usize>,
    pub coords: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCell {
    pub kato_point: usize,
    pub vertices: Vec<usize>,
}

/// A compact polyhedral complex: cells are polytopes listed by vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyComplex {
    pub labels: Vec<String>,
    pub vertices: Vec<SliceVertex>,
    pub cells: Vec<PolyCell>,
    pub notices: Vec<String>,
}

/// Intersects every piece of `sub` with `⟨b, α⟩ = 1`; `b` is indexed by fan labels.
/// Pieces whose slice is unbounded contribute their bounded faces.
pub fn slice_dvf(fan: &KatoFan, sub: &SubFan, b: &[Q]) -> Result<PolyComplex> {
    if b.len() != fan.labels.len() {
        return Err(invalid("b", format!("expected {} multiplicities", fan.labels.len())));
    }
    let mut index: BTreeMap<SliceVertex, usize> = BTreeMap::new();
    let mut cells: Vec<PolyCell> = Vec::new();
    let mut notices = Vec::new();
    for f in &sub.faces {
        let p = &fan.points[f.kato_point];
        let k = p.index_set.len();
        let bx: Vec<Q> = p.index_set.iter().map(|&i| b[i].clone()).collect();
        if bx.iter().all(Zero::is_zero) {
            notices.push(format!("{} is horizontal and has no slice", p.label));
            continue;
        }
        let (mut eqs, ineqs) = hrep(&f.vertices, &f.rays, k)?;
        eqs.push((bx, Q::one()));
        let verts = polyhedron_vertices(&ineqs, &eqs, k);
        if verts.is_empty() {
            continue;
        }
        let rays = polyhedron_rays(&ineqs, &eqs, k)?;
        let groups: Vec<Vec<usize>> = if rays.is_empty() {
            vec![(0..verts.len()).collect()]
        } else {
            notices.push(format!("slice of {} is unbounded; keeping its bounded faces", p.label));
            bounded_faces(&verts, &rays, &ineqs)
        };
        let ids: Vec<usize> = verts
            .iter()
            .map(|v| {
                let support: Vec<usize> = (0..k).filter(|&i| !v[i].is_zero()).collect();
                let key = SliceVertex {
                    coords: support.iter().map(|&i| v[i].clone()).collect(),
                    support: support.iter().map(|&i| p.index_set[i]).collect(),
                };
                let n = index.len();
                *index.entry(key).or_insert(n)
            })
            .collect();
        for g in groups {
            let mut vs: Vec<usize> = g.iter().map(|&i| ids[i]).collect();
            vs.sort();
            cells.push(PolyCell { kato_point: f.kato_point, vertices: vs });
        }
    }
    let mut vertices = vec![None; index.len()];
    for (v, i) in index {
        vertices[i] = Some(v);
    }
    Ok(PolyComplex { labels: fan.labels.clone(), vertices: vertices.into_iter().map(Option::unwrap).collect(), cells, notices })
}

/// Vertex sets of the maximal bounded faces of `conv(verts) + cone(rays)`.
fn bounded_faces(verts: &[Vec<Q>], rays: &[Vec<i64>], ineqs: &[(Vec<Q>, Q)]) -> Vec<Vec<usize>> {
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let k = verts[0].len();
    for size in 1..=ineqs.len().min(k) {
        for s in (0..ineqs.len()).combinations(size) {
            let tight_v: Vec<usize> = (0..verts.len()).filter(|&i| s.iter().all(|&h| dot_q(&ineqs[h].0, &verts[i]) == ineqs[h].1)).collect();
            let unbounded = rays.iter().any(|r| s.iter().all(|&h| crate::lattice::dot_iq(r, &ineqs[h].0).is_zero()));
            if !tight_v.is_empty() && !unbounded {
                found.insert(tight_v);
            }
        }
    }
    let all: Vec<Vec<usize>> = found.into_iter().collect();
    all.iter().filter(|a| !all.iter().any(|b| b != *a && a.iter().all(|x| b.contains(x)))).cloned().collect()
}

fn affine_dim(points: &[Vec<Q>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vec<Q>> = points[1..].iter().map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect()).collect();
    rank_q(&diffs)
}

/// Pulling triangulation of the polytope with the given vertex ids, pulling the smallest id first.
fn pull(ids: &[usize], coords: &dyn Fn(usize) -> Vec<Q>) -> Result<Vec<Vec<usize>>> {
    let pts: Vec<Vec<Q>> = ids.iter().map(|&i| coords(i)).collect();
    let d = affine_dim(&pts);
    if ids.len() == d + 1 {
        return Ok(vec![ids.to_vec()]);
    }
    let k = pts[0].len();
    let (_, ineqs) = hrep(&pts, &[], k)?;
    let apex = *ids.iter().min().unwrap();
    let mut out = Vec::new();
    for (a, b) in &ineqs {
        let facet: Vec<usize> = ids.iter().zip(&pts).filter(|(_, p)| dot_q(a, p) == *b).map(|(&i, _)| i).collect();
        if facet.contains(&apex) {
            continue;
        }
        for mut s in pull(&facet, coords)? {
            s.push(apex);
            s.sort();
            out.push(s);
        }
    }
    Ok(out)
}

impl PolyComplex {
    pub fn vertex_label(&self, i: usize) -> String {
        let v = &self.vertices[i];
        v.support.iter().zip(&v.coords).map(|(&s, c)| format!("{}={}", self.labels[s], fmt_q(c))).join(",")
    }

    /// A simplicial complex refining the cells, consistent on shared faces.
    pub fn to_simplicial(&self) -> Result<SimplicialComplex> {
        let mut facets: Vec<Vec<String>> = Vec::new();
        for cell in &self.cells {
            let support: Vec<usize> = cell.vertices.iter().flat_map(|&v| self.vertices[v].support.clone()).collect::<BTreeSet<_>>().into_iter().collect();
            let coords = |i: usize| -> Vec<Q> {
                let v = &self.vertices[i];
                support.iter().map(|s| v.support.iter().position(|x| x == s).map_or_else(Q::zero, |j| v.coords[j].clone())).collect()
            };
            for s in pull(&cell.vertices, &coords)? {
                facets.push(s.iter().map(|&i| self.vertex_label(i)).collect());
            }
        }
        SimplicialComplex::from_labeled_facets(&facets)
    }

    pub fn to_value(&self, fan: &KatoFan) -> Value {
        json!({
            "schema": "1",
            "vertices": (0..self.vertices.len()).map(|i| self.vertex_label(i)).collect::<Vec<_>>(),
            "cells": self.cells.iter().map(|c| json!({
                "kato_point": fan.points[c.kato_point].label,
                "vertices": c.vertices,
            })).collect::<Vec<_>>(),
            "notices": self.notices,
        })
    }
}
