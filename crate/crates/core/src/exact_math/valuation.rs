use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::Zero;

use super::rational::{ExtRational, Rational};
use crate::error::{Error, Result};

/// Either a p-adic valuation on ℚ or an explicit table keyed by term identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Valuation {
    PAdic(u64),
    Explicit(BTreeMap<String, ExtRational>),
}

impl Valuation {
    pub fn p_adic(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Valuation::PAdic(p))
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn multiplicity(mut n: BigInt, p: &BigInt) -> i64 {
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

/// Valuation of a rational number; explicit tables cannot valuate bare numbers.
pub fn valuate(x: &Rational, v: &Valuation) -> Result<ExtRational> {
    match v {
        Valuation::PAdic(p) => {
            if x.is_zero() {
                return Ok(ExtRational::Infinity);
            }
            let p = BigInt::from(*p);
            let k = multiplicity(x.numer().clone(), &p) - multiplicity(x.denom().clone(), &p);
            Ok(ExtRational::Finite(Rational::from_integer(BigInt::from(k))))
        }
        Valuation::Explicit(_) => Err(Error::MissingValuation(super::rational::format_rational(x))),
    }
}

/// Valuation of the coefficient of a named term: table lookup or p-adic valuation.
pub fn valuate_term(id: &str, coefficient: &Rational, v: &Valuation) -> Result<ExtRational> {
    match v {
        Valuation::PAdic(_) => valuate(coefficient, v),
        Valuation::Explicit(table) => table
            .get(id)
            .cloned()
            .ok_or_else(|| Error::MissingValuation(id.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_math::rational::{int, rat};

    #[test]
    fn p_adic_examples() {
        let v5 = Valuation::p_adic(5).unwrap();
        assert_eq!(valuate(&int(50), &v5).unwrap(), ExtRational::Finite(int(2)));
        assert_eq!(valuate(&rat(3, 125), &v5).unwrap(), ExtRational::Finite(int(-3)));
        assert_eq!(valuate(&int(0), &v5).unwrap(), ExtRational::Infinity);
        assert_eq!(valuate(&int(-7), &v5).unwrap(), ExtRational::Finite(int(0)));
        assert_eq!(Valuation::p_adic(6), Err(Error::InvalidPrime(6)));
        assert_eq!(Valuation::p_adic(1), Err(Error::InvalidPrime(1)));
    }

    #[test]
    fn explicit_table_lookup() {
        let mut t = BTreeMap::new();
        t.insert("1,1,2".to_string(), ExtRational::Finite(rat(1, 2)));
        let v = Valuation::Explicit(t);
        assert_eq!(valuate_term("1,1,2", &int(9), &v).unwrap(), ExtRational::Finite(rat(1, 2)));
        assert_eq!(
            valuate_term("0,0,4", &int(9), &v),
            Err(Error::MissingValuation("0,0,4".into()))
        );
    }
}
