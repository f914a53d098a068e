//! Laurent polynomials whose coefficients are known through their valuation,
//! optionally with an exact value.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{fmt_q, is_nonneg, Q};
use crate::error::{invalid, Result};

/// A nonzero coefficient: its valuation and, when known, its exact value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coeff {
    pub coeff_val: Q,
    pub exact: Option<Q>,
}

impl Coeff {
    pub fn unit() -> Self {
        Coeff { coeff_val: Q::zero(), exact: Some(Q::one()) }
    }

    pub fn exact(x: Q) -> Self {
        Coeff { coeff_val: Q::zero(), exact: Some(x) }
    }

    fn mul(&self, o: &Coeff) -> Coeff {
        Coeff {
            coeff_val: &self.coeff_val + &o.coeff_val,
            exact: match (&self.exact, &o.exact) {
                (Some(a), Some(b)) => Some(a * b),
                _ => None,
            },
        }
    }

    /// Sum of two coefficients on one monomial; `None` when they cancel exactly.
    fn add(&self, o: &Coeff) -> Option<Coeff> {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) if self.coeff_val == o.coeff_val => {
                let s = a + b;
                if s.is_zero() {
                    None
                } else {
                    Some(Coeff { coeff_val: self.coeff_val.clone(), exact: Some(s) })
                }
            }
            _ => Some(Coeff { coeff_val: (&self.coeff_val).min(&o.coeff_val).clone(), exact: None }),
        }
    }
}

/// A Laurent polynomial in `nvars` variables; every stored coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<i64>, Coeff>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        LaurentPoly::monomial(vec![0; nvars])
    }

    pub fn monomial(exp: Vec<i64>) -> Self {
        let nvars = exp.len();
        LaurentPoly { nvars, terms: BTreeMap::from([(exp, Coeff::unit())]) }
    }

    pub fn term(exp: Vec<i64>, c: Coeff) -> Self {
        let nvars = exp.len();
        LaurentPoly { nvars, terms: BTreeMap::from([(exp, c)]) }
    }

    /// Builds from `(exponent, exact coefficient)` pairs with trivial coefficient valuations.
    pub fn from_exact(nvars: usize, terms: &[(Vec<i64>, Q)]) -> Self {
        let mut p = LaurentPoly::zero(nvars);
        for (e, c) in terms {
            p = p.add(&LaurentPoly::term(e.clone(), Coeff::exact(c.clone())));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            match terms.get(e) {
                Some(d) => match d.add(c) {
                    Some(s) => {
                        terms.insert(e.clone(), s);
                    }
                    None => {
                        terms.remove(e);
                    }
                },
                None => {
                    terms.insert(e.clone(), c.clone());
                }
            }
        }
        LaurentPoly { nvars: self.nvars.max(o.nvars), terms }
    }

    pub fn mul(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.nvars.max(o.nvars));
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out = out.add(&LaurentPoly::term(e, c1.mul(c2)));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        (0..k).fold(LaurentPoly::one(self.nvars), |acc, _| acc.mul(self))
    }

    /// Multiplies every exponent by a monomial shift.
    pub fn shift(&self, by: &[i64]) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.iter().zip(by).map(|(a, b)| a + b).collect(), c.clone())).collect(),
        }
    }

    /// Applies an integer linear change of exponents `e ↦ map·e`, producing `nout` variables.
    pub fn map_exponents(&self, f: &dyn Fn(&[i64]) -> Vec<i64>, nout: usize) -> LaurentPoly {
        let mut out = LaurentPoly::zero(nout);
        for (e, c) in &self.terms {
            out = out.add(&LaurentPoly::term(f(e), c.clone()));
        }
        out.nvars = nout;
        out
    }

    pub fn validate(&self, path: &str, nvars: usize) -> Result<()> {
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if e.len() != nvars {
                return Err(invalid(format!("{path}[{i}].exp"), format!("expected {nvars} exponents, got {}", e.len())));
            }
            if !is_nonneg(&c.coeff_val) {
                return Err(invalid(format!("{path}[{i}].coeff_val"), "coefficient valuation must be nonnegative"));
            }
            if c.exact.as_ref().is_some_and(Zero::is_zero) {
                return Err(invalid(format!("{path}[{i}].coeff"), "coefficient must be nonzero"));
            }
        }
        Ok(())
    }
}

/// A quotient `num / den` of Laurent polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentRational {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

impl LaurentRational {
    pub fn poly(p: LaurentPoly) -> Self {
        let n = p.nvars;
        LaurentRational { num: p, den: LaurentPoly::one(n) }
    }

    pub fn monomial(exp: Vec<i64>) -> Self {
        LaurentRational::poly(LaurentPoly::monomial(exp))
    }

    pub fn one(nvars: usize) -> Self {
        LaurentRational::poly(LaurentPoly::one(nvars))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars.max(self.den.nvars)
    }

    pub fn mul(&self, o: &LaurentRational) -> LaurentRational {
        LaurentRational { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }
    }

    pub fn pow(&self, k: u32) -> LaurentRational {
        LaurentRational { num: self.num.pow(k), den: self.den.pow(k) }
    }

    pub fn shift(&self, by: &[i64]) -> LaurentRational {
        LaurentRational { num: self.num.shift(by), den: self.den.clone() }
    }

    pub fn map_exponents(&self, f: &dyn Fn(&[i64]) -> Vec<i64>, nout: usize) -> LaurentRational {
        LaurentRational { num: self.num.map_exponents(f, nout), den: self.den.map_exponents(f, nout) }
    }

    pub fn validate(&self, path: &str, nvars: usize) -> Result<()> {
        if self.num.is_zero() {
            return Err(invalid(format!("{path}.num"), "the zero function has no valuation"));
        }
        if self.den.is_zero() {
            return Err(invalid(format!("{path}.den"), "denominator must be nonzero"));
        }
        self.num.validate(&format!("{path}.num"), nvars)?;
        self.den.validate(&format!("{path}.den"), nvars)
    }

    pub fn is_one(&self) -> bool {
        self.den.terms.len() == 1
            && self.num == self.den
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<i64>,
    #[serde(with = "crate::arith::qstr")]
    coeff_val: Q,
    #[serde(default = "yes")]
    nonzero: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeff: Option<String>,
}

fn yes() -> bool {
    true
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|(e, c)| TermJson {
            exp: e.clone(),
            coeff_val: c.coeff_val.clone(),
            nonzero: true,
            coeff: c.exact.as_ref().map(fmt_q),
        }))
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let terms = Vec::<TermJson>::deserialize(d)?;
        let nvars = terms.first().map_or(0, |t| t.exp.len());
        let mut out = LaurentPoly::zero(nvars);
        for (i, t) in terms.into_iter().enumerate() {
            if !t.nonzero {
                return Err(D::Error::custom(format!("term {i}: coefficients must be nonzero")));
            }
            let exact = t.coeff.map(|c| crate::arith::parse_q(&c)).transpose().map_err(D::Error::custom)?;
            if out.terms.contains_key(&t.exp) {
                return Err(D::Error::custom(format!("term {i}: duplicate exponent {:?}", t.exp)));
            }
            out.terms.insert(t.exp, Coeff { coeff_val: t.coeff_val, exact });
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RationalJson {
    Quotient { num: LaurentPoly, #[serde(default)] den: Option<LaurentPoly> },
    Poly(LaurentPoly),
}

impl Serialize for LaurentRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalJson::Quotient { num: self.num.clone(), den: Some(self.den.clone()) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match RationalJson::deserialize(d)? {
            RationalJson::Poly(p) => LaurentRational::poly(p),
            RationalJson::Quotient { num, den } => {
                let n = num.nvars;
                let den = den.unwrap_or_else(|| LaurentPoly::one(n));
                let nv = num.nvars.max(den.nvars);
                let mut num = num;
                let mut den = den;
                num.nvars = nv;
                den.nvars = nv;
                LaurentRational { num, den }
            }
        })
    }
}
