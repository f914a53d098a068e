use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::SimplicialComplex;
use crate::error::{Error, Result};
use crate::lattice::smith_normal_form;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

/// Integral homology in degrees `0..=dim`. Torsion orders exceed one and form
/// a divisibility chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyProfile {
    pub degree: Vec<HomologyGroup>,
}

impl HomologyProfile {
    /// The profile of the `d`-sphere.
    pub fn sphere(d: usize) -> Self {
        let degree = (0..=d)
            .map(|i| HomologyGroup { rank: usize::from(i == 0 || i == d) + usize::from(d == 0 && i == 0), torsion: Vec::new() })
            .collect();
        HomologyProfile { degree }
    }

    pub fn betti(&self) -> Vec<usize> {
        self.degree.iter().map(|g| g.rank).collect()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.degree.iter().all(|g| g.torsion.is_empty())
    }
}

/// Rank and non-unit invariant factors of a sparse integer matrix given by
/// columns of `(row, value)` pairs.
///
/// Unit pivots are eliminated first, choosing the sparsest row; the residual
/// block is handed to the dense Smith normal form.
pub(crate) fn sparse_invariants(nrows: usize, mut cols: Vec<Vec<(usize, i64)>>) -> Result<(usize, Vec<u64>)> {
    let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); nrows];
    for (c, col) in cols.iter_mut().enumerate() {
        col.sort_unstable();
        for &(r, _) in col.iter() {
            row_cols[r].push(c);
        }
    }
    let mut alive = vec![true; cols.len()];
    let mut rank = 0usize;
    let mut progress = true;
    while progress {
        progress = false;
        for c in 0..cols.len() {
            if !alive[c] || cols[c].is_empty() {
                continue;
            }
            let pivot = cols[c]
                .iter()
                .filter(|(_, v)| v.abs() == 1)
                .min_by_key(|(r, _)| row_cols[*r].len())
                .copied();
            let Some((r, pv)) = pivot else { continue };
            let pcol = std::mem::take(&mut cols[c]);
            let others = std::mem::take(&mut row_cols[r]);
            let mut kept = Vec::new();
            for j in others {
                if j == c || !alive[j] {
                    continue;
                }
                let Ok(pos) = cols[j].binary_search_by_key(&r, |e| e.0) else { continue };
                let f = cols[j][pos].1 * pv;
                let merged = axpy(&cols[j], &pcol, -f)?;
                for &(rr, _) in &merged {
                    if rr != r && cols[j].binary_search_by_key(&rr, |e| e.0).is_err() {
                        row_cols[rr].push(j);
                    }
                }
                cols[j] = merged;
                kept.push(j);
            }
            let _ = kept;
            alive[c] = false;
            rank += 1;
            progress = true;
        }
    }
    let rest: Vec<usize> = (0..cols.len()).filter(|&c| alive[c] && !cols[c].is_empty()).collect();
    if rest.is_empty() {
        return Ok((rank, Vec::new()));
    }
    let mut rows: Vec<usize> = rest.iter().flat_map(|&c| cols[c].iter().map(|e| e.0)).collect();
    rows.sort_unstable();
    rows.dedup();
    let ridx: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut dense = vec![vec![0i64; rest.len()]; rows.len()];
    for (j, &c) in rest.iter().enumerate() {
        for &(r, v) in &cols[c] {
            dense[ridx[&r]][j] = v;
        }
    }
    let snf = smith_normal_form(&dense, rest.len())?;
    let f = snf.invariant_factors();
    rank += f.len();
    Ok((rank, f.into_iter().filter(|&x| x > 1).map(|x| x as u64).collect()))
}

fn axpy(a: &[(usize, i64)], b: &[(usize, i64)], f: i64) -> Result<Vec<(usize, i64)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        let (r, v) = if take_a {
            i += 1;
            a[i - 1]
        } else if take_b {
            j += 1;
            let w = b[j - 1].1.checked_mul(f).ok_or(Error::Overflow("homology elimination"))?;
            (b[j - 1].0, w)
        } else {
            let w = b[j].1.checked_mul(f).and_then(|w| w.checked_add(a[i].1)).ok_or(Error::Overflow("homology elimination"))?;
            i += 1;
            j += 1;
            (a[i - 1].0, w)
        };
        if v != 0 {
            out.push((r, v));
        }
    }
    Ok(out)
}

/// Simplicial homology with integer coefficients.
pub fn homology(k: &SimplicialComplex) -> Result<HomologyProfile> {
    let simplices = k.simplices();
    let n = simplices.len();
    if n == 0 {
        return Ok(HomologyProfile { degree: Vec::new() });
    }
    let index: Vec<HashMap<&[usize], usize>> = simplices
        .iter()
        .map(|level| level.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect())
        .collect();
    // boundary[d] : C_d -> C_{d-1}, for d >= 1
    let mut ranks = vec![0usize; n + 1];
    let mut torsion: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    for d in 1..n {
        let cols: Vec<Vec<(usize, i64)>> = simplices[d]
            .iter()
            .map(|s| {
                (0..s.len())
                    .map(|skip| {
                        let face: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                        (index[d - 1][face.as_slice()], if skip % 2 == 0 { 1 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        let (r, t) = sparse_invariants(simplices[d - 1].len(), cols)?;
        ranks[d] = r;
        torsion[d] = t;
    }
    let degree = (0..n)
        .map(|d| HomologyGroup { rank: simplices[d].len() - ranks[d] - ranks[d + 1], torsion: torsion[d + 1].clone() })
        .collect();
    Ok(HomologyProfile { degree })
}

#[cfg(test)]
mod tests {
    use super::super::{cycle, simplex_boundary};
    use super::*;

    #[test]
    fn spheres() {
        assert_eq!(homology(&simplex_boundary(3)).unwrap(), HomologyProfile::sphere(2));
        assert_eq!(homology(&cycle(3)).unwrap(), HomologyProfile::sphere(1));
        assert_eq!(HomologyProfile::sphere(0).betti(), vec![2]);
    }

    #[test]
    fn projective_plane_has_two_torsion() {
        // 6-vertex real projective plane
        let f = vec![
            vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 4], vec![0, 4, 5], vec![0, 1, 5],
            vec![1, 2, 4], vec![2, 3, 5], vec![1, 3, 4], vec![2, 4, 5], vec![1, 3, 5],
        ];
        let labels = (0..6).map(|i| i.to_string()).collect();
        let k = SimplicialComplex::from_facets(labels, f).unwrap();
        let h = homology(&k).unwrap();
        assert_eq!(h.betti(), vec![1, 0, 0]);
        assert_eq!(h.degree[1].torsion, vec![2]);
    }

    #[test]
    fn dense_fallback_finds_invariants() {
        let cols = vec![vec![(0, 2), (1, 4)], vec![(0, 6), (1, 6)]];
        let (r, t) = sparse_invariants(2, cols).unwrap();
        assert_eq!(r, 2);
        assert_eq!(t, vec![2, 6]);
    }
}
