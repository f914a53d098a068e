use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TateCoordinate {
    X,
    Y,
}

/// The stratum `Z_(J,j)`: `x_i = 0` for `i ∈ J`, `y_i = 0` for `i ∉ J` and for `i = j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TateStratum {
    /// One-based indices.
    pub j_set: Vec<usize>,
    pub j: usize,
    /// Exponents `(a, b)` of the local equation `unit · x_j^a · y_j^b = 1`.
    pub exponents: (i64, i64),
    pub contained: bool,
    /// The coordinate cutting out the special fibre near the stratum.
    pub divisor: Option<TateCoordinate>,
    /// Every pair `(x_i, y_i)` has an invertible member at the generic point.
    pub boundary_codim_two: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum TateClassification {
    GenericOnly,
    SingleDivisor { local_model: String, divisor: String },
    Strata { strata: Vec<TateStratum> },
}

/// Classifies the special fibre of the closure of `{∏ x_{α_i} = t^{-|α|}}` in the chart
/// indexed by `α`.
pub fn tate_strata(n: usize, alpha: &[i64]) -> Result<TateClassification> {
    if alpha.is_empty() {
        return Err(invalid("alpha", "alpha must be nonempty"));
    }
    if n < 2 {
        return Err(invalid("n", "n must be at least 2"));
    }
    if alpha.len() != n {
        return Err(invalid("alpha", format!("expected {n} entries, got {}", alpha.len())));
    }
    let total: i64 = alpha.iter().sum();
    if total > 0 {
        return Ok(TateClassification::GenericOnly);
    }
    if total == 0 {
        return Ok(TateClassification::SingleDivisor {
            local_model: format!("G_m^{} x A^1", n - 1),
            divisor: format!("y_{{{}}} = 0", alpha[0] + 1),
        });
    }
    let mut strata = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let j_set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        for &j in &j_set {
            // x_j contributes (1, 0); each other x_i with i in J is y_i^{-1} x_j y_j; t = x_j y_j.
            let lhs = (1 + (j_set.len() as i64 - 1), j_set.len() as i64 - 1);
            let exponents = (lhs.0 + total, lhs.1 + total);
            let divisor = match exponents {
                (0, b) if b != 0 => Some(TateCoordinate::X),
                (a, 0) if a != 0 => Some(TateCoordinate::Y),
                _ => None,
            };
            let boundary_codim_two = divisor.map(|d| {
                (0..n).all(|i| {
                    let x_unit = !j_set.contains(&i) || (i == j && d == TateCoordinate::Y);
                    let y_unit = (j_set.contains(&i) && i != j) || (i == j && d == TateCoordinate::X);
                    x_unit || y_unit
                })
            });
            strata.push(TateStratum {
                j_set: j_set.iter().map(|i| i + 1).collect(),
                j: j + 1,
                exponents,
                contained: divisor.is_some(),
                divisor,
                boundary_codim_two,
            });
        }
    }
    Ok(TateClassification::Strata { strata })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_cases() {
        assert_eq!(tate_strata(2, &[1, 1]).unwrap(), TateClassification::GenericOnly);
        match tate_strata(2, &[1, -1]).unwrap() {
            TateClassification::SingleDivisor { local_model, .. } => assert_eq!(local_model, "G_m^1 x A^1"),
            other => panic!("{other:?}"),
        }
        let TateClassification::Strata { strata } = tate_strata(2, &[-1, -1]).unwrap() else { panic!() };
        for s in &strata {
            assert_eq!(s.contained, s.j_set.len() == 2);
            if s.contained {
                assert_eq!(s.divisor, Some(TateCoordinate::X));
                assert_eq!(s.boundary_codim_two, Some(true));
            }
        }
        assert!(tate_strata(2, &[]).is_err());
    }
}
