use itertools::Itertools;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Outcome of the numeric checks on `z ↦ φ(ψ(z)) / |φ(ψ(z))|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereCheckReport {
    pub n: usize,
    pub samples: usize,
    pub tolerance: f64,
    /// Largest distance between the images of two points of one orbit.
    pub orbit_defect: f64,
    /// Largest deviation of an image norm from one.
    pub norm_defect: f64,
    /// Largest distance between a sample and the orbit recovered from its image.
    pub recovery_defect: f64,
    pub orbits_equal: bool,
    pub on_sphere: bool,
    pub injective: bool,
}

impl SphereCheckReport {
    pub fn passed(&self) -> bool {
        self.orbits_equal && self.on_sphere && self.injective
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Coefficients `c_1, ..., c_n` of the monic polynomial `∏ (t - z_i)`.
fn coefficients(z: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in z {
        let mut next = c.clone();
        next.push(Complex64::new(0.0, 0.0));
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] -= r * ci;
        }
        c = next;
    }
    c.remove(0);
    c
}

/// The map `φ ∘ ψ` followed by normalization: roots to coefficients, then each
/// coefficient's modulus replaced by its `j`-th root.
pub fn sphere_quotient_map(z: &[Complex64]) -> Vec<Complex64> {
    let w: Vec<Complex64> = coefficients(z)
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let (r, theta) = c.to_polar();
            Complex64::from_polar(r.powf(1.0 / (i + 1) as f64), theta)
        })
        .collect();
    let s = norm(&w);
    w.into_iter().map(|x| x / s).collect()
}

/// Roots of `t^n + c_1 t^{n-1} + ... + c_n` by Weierstrass iteration, polished by Newton steps.
fn roots(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let eval = |t: Complex64| c.iter().fold(Complex64::new(1.0, 0.0), |acc, &ci| acc * t + ci);
    let deriv = |t: Complex64| {
        c.iter()
            .enumerate()
            .take(n - 1)
            .fold(Complex64::new(n as f64, 0.0), |acc, (i, &ci)| acc * t + ci * (n - 1 - i) as f64)
    };
    let bound = 1.0 + c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound * 0.5).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let den = (0..n).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            if den.norm() == 0.0 {
                z[i] += Complex64::new(1e-8, 1e-8);
                continue;
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * bound {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = deriv(*r);
            if d.norm() > 0.0 {
                *r -= eval(*r) / d;
            }
        }
    }
    z
}

/// Recovers the orbit of a unit vector from its image under [`sphere_quotient_map`].
fn recover(w: &[Complex64]) -> Vec<Complex64> {
    let c: Vec<Complex64> = w
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let (r, theta) = x.to_polar();
            Complex64::from_polar(r.powi(i as i32 + 1), theta)
        })
        .collect();
    let z = roots(&c);
    let s = norm(&z);
    z.into_iter().map(|x| x / s).collect()
}

fn permutation_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    (0..a.len())
        .permutations(a.len())
        .map(|p| p.iter().enumerate().map(|(i, &j)| (a[i] - b[j]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// Runs the orbit, norm and injectivity checks on the given unit vectors.
pub fn sphere_quotient_map_check(n: usize, points: &[Vec<Complex64>], tolerance: f64) -> Result<SphereCheckReport> {
    if n == 0 {
        return Err(invalid("n", "n must be positive"));
    }
    let mut orbit_defect = 0.0f64;
    let mut norm_defect = 0.0f64;
    let mut recovery_defect = 0.0f64;
    for (k, z) in points.iter().enumerate() {
        if z.len() != n {
            return Err(invalid(format!("points[{k}]"), format!("expected {n} coordinates")));
        }
        if (norm(z) - 1.0).abs() > tolerance {
            return Err(invalid(format!("points[{k}]"), "point is not on the unit sphere"));
        }
        let w = sphere_quotient_map(z);
        norm_defect = norm_defect.max((norm(&w) - 1.0).abs());
        for p in (0..n).permutations(n) {
            let zp: Vec<Complex64> = p.iter().map(|&i| z[i]).collect();
            let wp = sphere_quotient_map(&zp);
            orbit_defect = orbit_defect.max(w.iter().zip(&wp).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        }
        recovery_defect = recovery_defect.max(permutation_distance(&recover(&w), z));
    }
    Ok(SphereCheckReport {
        n,
        samples: points.len(),
        tolerance,
        orbit_defect,
        norm_defect,
        recovery_defect,
        orbits_equal: orbit_defect <= tolerance,
        on_sphere: norm_defect <= tolerance,
        injective: recovery_defect <= tolerance,
    })
}

/// Uniformly distributed points on the unit sphere of `C^n`, reproducible from the seed.
pub fn random_sphere_points(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            let s = norm(&v);
            v.into_iter().map(|x| x / s).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable_is_negation() {
        let z = vec![Complex64::from_polar(1.0, 0.3)];
        let w = sphere_quotient_map(&z);
        assert!((w[0] + z[0]).norm() < 1e-15);
    }

    #[test]
    fn antipodal_pair_orbit() {
        let a = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, 1.1);
        let w1 = sphere_quotient_map(&[a, -a]);
        let w2 = sphere_quotient_map(&[-a, a]);
        assert!(w1.iter().zip(&w2).all(|(x, y)| (x - y).norm() < 1e-15));
    }

    #[test]
    fn random_checks_pass() {
        for n in 1..=3 {
            let pts = random_sphere_points(n, 300, 7);
            let r = sphere_quotient_map_check(n, &pts, 1e-9).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let bad = vec![vec![Complex64::new(2.0, 0.0)]];
        assert!(sphere_quotient_map_check(1, &bad, 1e-9).is_err());
    }
}
