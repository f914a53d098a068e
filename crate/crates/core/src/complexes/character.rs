use std::collections::HashMap;

use itertools::Itertools;

use serde::{Deserialize, Serialize};

use super::{link_complex_with_coords, quotient_with_report, GroupAction, QuotientReport, SimplicialComplex};
use crate::error::{invalid, Result};
use crate::polyhedra::Fan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Gl,
    Sl,
}

/// A dual complex with the symmetric-group action and its orbit space.
#[derive(Debug, Clone)]
pub struct CharacterVariety {
    pub group: Group,
    pub n: usize,
    pub cover: SimplicialComplex,
    pub action: GroupAction,
    pub quotient: QuotientReport,
}

pub fn character_variety_complex(group: Group, n: usize) -> Result<CharacterVariety> {
    let (cover, action) = match group {
        Group::Gl => {
            if !(1..=3).contains(&n) {
                return Err(invalid("n", "GL requires 1 <= n <= 3"));
            }
            gl_cover(n)?
        }
        Group::Sl => {
            if !(2..=3).contains(&n) {
                return Err(invalid("n", "SL requires 2 <= n <= 3"));
            }
            sl_cover(n)?
        }
    };
    let quotient = quotient_with_report(&cover, &action)?;
    Ok(CharacterVariety { group, n, cover, action, quotient })
}

/// The fan on `(R^2)^n` cut out by the forms `x_i`, `y_i`, `x_i - x_j`, `y_i - y_j`.
///
/// It refines the coordinate orthant fan, whose link is the join of `n` squares,
/// and a factor permutation fixing one of its cones fixes that cone pointwise.
pub fn gl_braid_fan(n: usize) -> Result<Fan> {
    let chambers: Vec<Vec<Vec<i64>>> = (0..=n)
        .permutations(n + 1)
        .map(|order| {
            let pos: Vec<usize> = (0..=n).map(|e| order.iter().position(|&o| o == e).expect("permutation")).collect();
            (1..=n)
                .map(|cut| (1..=n).map(|i| i64::from(pos[i] >= cut) - i64::from(pos[0] >= cut)).collect())
                .collect()
        })
        .collect();
    let d = 2 * n;
    let mut cones = Vec::new();
    for cx in &chambers {
        for cy in &chambers {
            let mut g = Vec::new();
            for r in cx {
                let mut v = vec![0i64; d];
                for i in 0..n {
                    v[2 * i] = r[i];
                }
                g.push(v);
            }
            for r in cy {
                let mut v = vec![0i64; d];
                for i in 0..n {
                    v[2 * i + 1] = r[i];
                }
                g.push(v);
            }
            cones.push(g);
        }
    }
    Fan::from_cones_unchecked(d, &cones)
}

fn gl_cover(n: usize) -> Result<(SimplicialComplex, GroupAction)> {
    let fan = gl_braid_fan(n)?;
    let (cover, coords) = link_complex_with_coords(&fan);
    let generators = factor_swaps(n, &coords, &|c: &[i64]| c.to_vec(), &|x: Vec<i64>| x)?;
    Ok((cover, GroupAction { generators }))
}

/// Adjacent factor transpositions acting on vertices given by coordinates;
/// `lift` and `lower` convert between vertex coordinates and `(R^2)^n`.
fn factor_swaps(
    n: usize,
    coords: &[Vec<i64>],
    lift: &dyn Fn(&[i64]) -> Vec<i64>,
    lower: &dyn Fn(Vec<i64>) -> Vec<i64>,
) -> Result<Vec<Vec<usize>>> {
    let index: HashMap<&Vec<i64>, usize> = coords.iter().enumerate().map(|(i, c)| (c, i)).collect();
    (0..n.saturating_sub(1))
        .map(|i| {
            coords
                .iter()
                .map(|c| {
                    let mut x = lift(c);
                    x.swap(2 * i, 2 * i + 2);
                    x.swap(2 * i + 1, 2 * i + 3);
                    index
                        .get(&lower(x))
                        .copied()
                        .ok_or_else(|| invalid("fan", "factor permutation does not preserve the fan"))
                })
                .collect()
        })
        .collect()
}

/// The fan `{τ ∩ ker α_n}` for the product of `n` copies of the fan of the
/// projective plane, in the coordinates of the first `n - 1` factors.
pub fn sl_kernel_fan(n: usize) -> Result<Fan> {
    let p2 = [[1i64, 0], [0, 1], [-1, -1]];
    let max2 = [[0usize, 1], [1, 2], [0, 2]];
    let d = 2 * n;
    let mut cones: Vec<Vec<Vec<i64>>> = vec![Vec::new()];
    for i in 0..n {
        cones = cones
            .into_iter()
            .flat_map(|c| {
                max2.iter().map(move |m| {
                    let mut g = c.clone();
                    for &r in m {
                        let mut v = vec![0i64; d];
                        v[2 * i] = p2[r][0];
                        v[2 * i + 1] = p2[r][1];
                        g.push(v);
                    }
                    g
                })
            })
            .collect();
    }
    let product = Fan::from_cones_unchecked(d, &cones)?;
    let basis: Vec<Vec<i64>> = (0..d - 2)
        .map(|j| {
            let mut v = vec![0i64; d];
            v[j] = 1;
            v[d - 2 + j % 2] = -1;
            v
        })
        .collect();
    product.intersect_subspace(&basis)
}

fn sl_cover(n: usize) -> Result<(SimplicialComplex, GroupAction)> {
    let fan = sl_kernel_fan(n)?;
    let (cover, coords) = link_complex_with_coords(&fan);
    let lift = |y: &[i64]| -> Vec<i64> {
        let mut x = y.to_vec();
        x.push(-y.iter().step_by(2).sum::<i64>());
        x.push(-y.iter().skip(1).step_by(2).sum::<i64>());
        x
    };
    let lower = |mut x: Vec<i64>| {
        x.truncate(2 * n - 2);
        x
    };
    let generators = factor_swaps(n, &coords, &lift, &lower)?;
    Ok((cover, GroupAction { generators }))
}

#[cfg(test)]
mod tests {
    use super::super::{homology, HomologyProfile};
    use super::*;

    #[test]
    fn sl2_kernel_fan_is_a_hexagon() {
        let f = sl_kernel_fan(2).unwrap();
        assert_eq!(f.rays.len(), 6);
        assert!(f.is_complete().unwrap());
    }

    #[test]
    fn small_cases() {
        let gl1 = character_variety_complex(Group::Gl, 1).unwrap();
        assert_eq!(gl1.quotient.complex.facets.len(), 4);
        assert_eq!(homology(&gl1.quotient.complex).unwrap(), HomologyProfile::sphere(1));
        let sl2 = character_variety_complex(Group::Sl, 2).unwrap();
        assert_eq!(homology(&sl2.quotient.complex).unwrap(), HomologyProfile::sphere(1));
        assert!(character_variety_complex(Group::Gl, 4).is_err());
        assert!(character_variety_complex(Group::Sl, 1).is_err());
    }
}
