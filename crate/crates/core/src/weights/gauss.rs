use serde::Serialize;

use crate::arith::{q, Q};
use crate::error::{invalid, Result};

/// Exponents of `r`, of the trivially valued norm and of the discretely valued
/// norm of the divisorial section, as functions of `(c, a, l, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaussRecord {
    #[serde(with = "crate::arith::qstr")]
    pub c: Q,
    pub a: u64,
    pub l: u64,
    pub m: u64,
    #[serde(with = "crate::arith::qstr")]
    pub log_r: Q,
    #[serde(with = "crate::arith::qstr")]
    pub log_triv: Q,
    #[serde(with = "crate::arith::qstr")]
    pub log_disc: Q,
    pub holds: bool,
}

/// `log r = −c(a+1)`, `log‖s‖_triv = −cm(1+(l−1)a)`, `log‖s‖_disc = −cm(2+la)`,
/// and whether `−m·log r + log‖s‖_disc = log‖s‖_triv`.
pub fn gauss_weight_identity(c: &Q, a: u64, l: u64, m: u64) -> Result<GaussRecord> {
    if *c <= q(0) {
        return Err(invalid("c", "must be positive"));
    }
    if l == 0 || m == 0 {
        return Err(invalid(if l == 0 { "l" } else { "m" }, "must be at least 1"));
    }
    let z = |x: u64| Q::from_integer(x.into());
    let (aq, lq, mq) = (z(a), z(l), z(m));
    let log_r = -c * (&aq + q(1));
    let log_triv = -c * &mq * (q(1) + (&lq - q(1)) * &aq);
    let log_disc = -c * &mq * (q(2) + &lq * &aq);
    let holds = -(&mq * &log_r) + &log_disc == log_triv;
    Ok(GaussRecord { c: c.clone(), a, l, m, log_r, log_triv, log_disc, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    #[test]
    fn worked_values() {
        let r = gauss_weight_identity(&q(1), 1, 2, 1).unwrap();
        assert_eq!((r.log_r, r.log_triv, r.log_disc, r.holds), (q(-2), q(-2), q(-4), true));
        let c = qr(3, 7);
        let r = gauss_weight_identity(&c, 0, 5, 2).unwrap();
        assert_eq!((r.log_r, r.log_triv, r.log_disc), (-c.clone(), -&c * q(2), -&c * q(4)));
        assert!(r.holds);
        assert!(gauss_weight_identity(&q(0), 1, 1, 1).is_err());
    }
}
