use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::exponent::Exponent;
use super::{JetError, Rational};

/// A truncated power series in `nvars` variables with exact rational
/// coefficients.
///
/// Terms of total degree above `order` are never stored. Besides the
/// truncation order every jet carries a *reliable order*: coefficients of
/// degree `<= reliable` are exact coefficients of the underlying germ, those
/// above may have been lost to truncation (differentiation, division by a
/// non-unit, substitution). The reliable order can become negative, in which
/// case nothing about the germ is known.
///
/// Equality compares `nvars`, `order` and the term map only.
#[derive(Clone)]
pub struct Jet {
    nvars: usize,
    order: u32,
    reliable: i32,
    terms: BTreeMap<Exponent, Rational>,
}

/// Reading a coefficient the jet cannot vouch for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BeyondReliable {
    pub degree: u32,
    pub reliable: i32,
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.order == other.order && self.terms == other.terms
    }
}

impl Eq for Jet {}

impl Jet {
    pub fn zero(nvars: usize, order: u32) -> Self {
        assert!(nvars <= Exponent::MAX_VARS, "at most {} variables", Exponent::MAX_VARS);
        assert!(order <= Exponent::MAX_DEGREE, "order at most {}", Exponent::MAX_DEGREE);
        Jet {
            nvars,
            order,
            reliable: order as i32,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, order: u32, c: Rational) -> Self {
        let mut j = Self::zero(nvars, order);
        j.insert(Exponent::zero(), c);
        j
    }

    pub fn one(nvars: usize, order: u32) -> Self {
        Self::constant(nvars, order, Rational::one())
    }

    /// The coordinate function `t_{i+1}` (0-based index `i`).
    pub fn var(nvars: usize, order: u32, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        Self::monomial(nvars, order, Exponent::unit(i), Rational::one())
    }

    pub fn monomial(nvars: usize, order: u32, e: Exponent, c: Rational) -> Self {
        let mut j = Self::zero(nvars, order);
        j.insert(e, c);
        j
    }

    /// Builds a jet from `(powers, coefficient)` pairs; repeated monomials add up.
    pub fn from_terms<I>(nvars: usize, order: u32, terms: I) -> Result<Self, JetError>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut j = Self::zero(nvars, order);
        for (powers, c) in terms {
            if powers.len() != nvars {
                return Err(JetError::ExponentLength {
                    expected: nvars,
                    found: powers.len(),
                });
            }
            let e = Exponent::new(&powers)?;
            j.add_term(e, c);
        }
        Ok(j)
    }

    pub(crate) fn from_map(
        nvars: usize,
        order: u32,
        reliable: i32,
        mut terms: BTreeMap<Exponent, Rational>,
    ) -> Self {
        terms.retain(|e, c| e.degree() <= order && !c.is_zero());
        Jet {
            nvars,
            order,
            reliable: reliable.min(order as i32),
            terms,
        }
    }

    fn insert(&mut self, e: Exponent, c: Rational) {
        if e.degree() <= self.order && !c.is_zero() {
            self.terms.insert(e, c);
        }
    }

    /// Adds `c * t^e` in place, dropping it if it falls above the truncation order.
    pub fn add_term(&mut self, e: Exponent, c: Rational) {
        if e.degree() > self.order || c.is_zero() {
            return;
        }
        debug_assert!(e.fits(self.nvars));
        let remove = {
            let slot = self.terms.entry(e).or_insert_with(Rational::zero);
            *slot += c;
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&e);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn reliable_order(&self) -> i32 {
        self.reliable
    }

    /// Lowers the reliable order to `r` (never raises it).
    pub fn with_reliable(mut self, r: i32) -> Self {
        self.reliable = self.reliable.min(r);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: Exponent) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `t^e`, refusing degrees above the reliable order.
    pub fn reliable_coeff(&self, e: Exponent) -> Result<Rational, BeyondReliable> {
        if (e.degree() as i32) > self.reliable {
            Err(BeyondReliable {
                degree: e.degree(),
                reliable: self.reliable,
            })
        } else {
            Ok(self.coeff(e))
        }
    }

    pub fn value_at_origin(&self) -> Result<Rational, BeyondReliable> {
        self.reliable_coeff(Exponent::zero())
    }

    /// Lowest degree carrying a stored term.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().next().map(|e| e.degree())
    }

    /// A lower bound for the order of the underlying germ, valid even when
    /// every stored coefficient is zero.
    pub(crate) fn valuation_bound(&self) -> i64 {
        let stored = self.valuation().map_or(i64::MAX, |v| v as i64);
        stored.min(self.reliable as i64 + 1)
    }

    pub fn homogeneous_part(&self, degree: u32) -> Jet {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.degree() == degree)
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        Jet::from_map(self.nvars, self.order, self.reliable, terms)
    }

    /// The nonzero homogeneous part of least degree.
    pub fn lowest_part(&self) -> Option<Jet> {
        self.valuation().map(|v| self.homogeneous_part(v))
    }

    /// Largest term in graded-lex order.
    pub fn leading_term(&self) -> Option<(Exponent, Rational)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, c.clone()))
    }

    /// Drops all terms above `degree`; the reliable order is capped accordingly.
    pub fn truncate(&self, degree: u32) -> Jet {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.degree() <= degree)
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        Jet::from_map(self.nvars, self.order, self.reliable.min(degree as i32), terms)
    }

    /// Re-embeds the jet at a different truncation order. Raising the order
    /// does not raise the reliable order.
    pub fn with_order(&self, order: u32) -> Jet {
        Jet::from_map(self.nvars, order, self.reliable.min(order as i32), self.terms.clone())
    }

    /// Views the jet as a jet in `nvars >= self.nvars` variables.
    pub fn widen(&self, nvars: usize) -> Jet {
        assert!(nvars >= self.nvars);
        Jet {
            nvars,
            ..self.clone()
        }
    }

    fn check_same(&self, other: &Jet) -> Result<(), JetError> {
        if self.nvars != other.nvars || self.order != other.order {
            return Err(JetError::ShapeMismatch {
                left: (self.nvars, self.order),
                right: (other.nvars, other.order),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out.reliable = self.reliable.min(other.reliable);
        Ok(out)
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.try_add(&other.scale(&-Rational::one()))
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_same(other)?;
        let order = self.order;
        // Integer convolution over a common denominator: one normalization
        // per output term instead of one per product.
        let (a, da) = self.integer_form();
        let (b, db) = other.integer_form();
        let mut acc: HashMap<Exponent, BigInt> = HashMap::with_capacity(a.len() * 2);
        for (ea, ca) in &a {
            let room = order - ea.degree();
            for (eb, cb) in &b {
                if eb.degree() > room {
                    break;
                }
                let e = Exponent::from_raw(ea.raw() + eb.raw());
                *acc.entry(e).or_default() += ca * cb;
            }
        }
        let den = da * db;
        let terms = acc
            .into_iter()
            .filter(|(_, n)| !n.is_zero())
            .map(|(e, n)| (e, Rational::new(n, den.clone())))
            .collect();
        let reliable = (order as i64)
            .min(self.valuation_bound().saturating_add(other.reliable as i64))
            .min((self.reliable as i64).saturating_add(other.valuation_bound()));
        Ok(Jet::from_map(self.nvars, order, clamp_i32(reliable), terms))
    }

    /// Numerators over the least common denominator, in term order.
    pub(crate) fn integer_form(&self) -> (Vec<(Exponent, BigInt)>, BigInt) {
        let mut den = BigInt::one();
        for c in self.terms.values() {
            if !c.denom().is_one() {
                den = den.lcm(c.denom());
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (*e, c.numer() * (&den / c.denom())))
            .collect();
        (terms, den)
    }

    pub fn scale(&self, q: &Rational) -> Jet {
        if q.is_zero() {
            return Jet::zero(self.nvars, self.order);
        }
        let terms = self.terms.iter().map(|(e, c)| (*e, c * q)).collect();
        Jet::from_map(self.nvars, self.order, self.reliable, terms)
    }

    /// Multiplies by the monomial `t^e`.
    pub fn shift(&self, e: Exponent) -> Jet {
        let terms = self
            .terms
            .iter()
            .filter_map(|(a, c)| a.checked_mul(e).map(|p| (p, c.clone())))
            .collect();
        let reliable = (self.reliable as i64 + e.degree() as i64).min(self.order as i64);
        Jet::from_map(self.nvars, self.order, clamp_i32(reliable), terms)
    }

    pub fn pow(&self, k: u32) -> Jet {
        let mut out = Jet::one(self.nvars, self.order);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Formal partial derivative with respect to variable `i` (0-based).
    pub fn derive(&self, i: usize) -> Jet {
        assert!(i < self.nvars, "variable index out of range");
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let p = e.power(i);
            if let Some(lowered) = e.lower(i) {
                terms.insert(lowered, c * Rational::from_integer(p.into()));
            }
        }
        Jet::from_map(self.nvars, self.order, self.reliable - 1, terms)
    }

    /// Evaluates at a rational point by plain substitution of the stored terms.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, x) in point.iter().enumerate() {
                let p = e.power(i);
                if p > 0 {
                    term *= num_traits::pow(x.clone(), p as usize);
                }
            }
            total += term;
        }
        total
    }

    /// Keeps the terms whose exponent satisfies the predicate.
    pub fn filter_terms(&self, mut keep: impl FnMut(Exponent) -> bool) -> Jet {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| keep(**e))
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        Jet::from_map(self.nvars, self.order, self.reliable, terms)
    }

    /// Renders the jet with variable names `t1, t2, ...`.
    pub fn to_poly_string(&self) -> String {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("t{i}")).collect();
        self.format_with(&names)
    }

    /// Renders the jet as a polynomial expression in the given variable names,
    /// lowest degree first. The output parses back with the document parser.
    pub fn format_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = e.format_with(names);
            if e.degree() == 0 {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

/// Sums of rational multiples of jets kept as integers over one running
/// common denominator.
#[derive(Default)]
pub(crate) struct Accumulator {
    den: Option<BigInt>,
    terms: HashMap<Exponent, BigInt>,
}

impl Accumulator {
    pub(crate) fn add_scaled(&mut self, c: &Rational, j: &Jet) {
        if c.is_zero() || j.terms.is_empty() {
            return;
        }
        let (nums, d) = j.integer_form();
        let bd = c.denom() * d;
        let den = match self.den.take() {
            None => bd.clone(),
            Some(old) => {
                let l = old.lcm(&bd);
                if l != old {
                    let f = &l / &old;
                    for v in self.terms.values_mut() {
                        *v *= &f;
                    }
                }
                l
            }
        };
        let factor = c.numer() * (&den / &bd);
        for (e, n) in nums {
            *self.terms.entry(e).or_default() += n * &factor;
        }
        self.den = Some(den);
    }

    pub(crate) fn into_terms(self) -> BTreeMap<Exponent, Rational> {
        let Some(den) = self.den else {
            return BTreeMap::new();
        };
        self.terms
            .into_iter()
            .filter(|(_, n)| !n.is_zero())
            .map(|(e, n)| (e, Rational::new(n, den.clone())))
            .collect()
    }
}

pub(crate) fn clamp_i32(x: i64) -> i32 {
    x.clamp(i32::MIN as i64, i32::MAX as i64) as i32
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_poly_string())
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Jet[n={}, N={}, rel={}]({})",
            self.nvars,
            self.order,
            self.reliable,
            self.to_poly_string()
        )
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.try_add(rhs).expect("jet shapes must match")
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.try_sub(rhs).expect("jet shapes must match")
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.try_mul(rhs).expect("jet shapes must match")
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(&-Rational::one())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcalc::q;

    fn t(n: usize, order: u32, i: usize) -> Jet {
        Jet::var(n, order, i)
    }

    #[test]
    fn difference_of_squares() {
        let one = Jet::one(2, 6);
        let t1 = t(2, 6, 0);
        let prod = &(&one + &t1) * &(&one - &t1);
        assert_eq!(prod, &one - &(&t1 * &t1));
    }

    #[test]
    fn cancellation_removes_terms() {
        let t1 = t(2, 6, 0);
        let t2 = t(2, 6, 1);
        let a = &t2.pow(3) + &(&t1 * &t2);
        let b = -&(&t1 * &t2);
        assert_eq!(&a + &b, t2.pow(3));
        assert_eq!((&a + &b).num_terms(), 1);
    }

    #[test]
    fn hand_convolution() {
        // (3 t2^2 + t1)(2 t2) = 6 t2^3 + 2 t1 t2
        let t1 = t(2, 3, 0);
        let t2 = t(2, 3, 1);
        let a = &t2.pow(2).scale(&q(3, 1)) + &t1;
        let b = t2.scale(&q(2, 1));
        let expected = &t2.pow(3).scale(&q(6, 1)) + &(&t1 * &t2).scale(&q(2, 1));
        assert_eq!(&a * &b, expected);
    }

    #[test]
    fn derivatives() {
        let t1 = t(2, 6, 0);
        let t2 = t(2, 6, 1);
        let h = &t2.pow(3) + &(&t1 * &t2);
        assert_eq!(h.derive(1), &t2.pow(2).scale(&q(3, 1)) + &t1);
        assert!(t2.pow(3).derive(0).is_zero());
        // d/dt2 (3/4 t2^4 + 1/2 t1 t2^2) = 3 t2^3 + t1 t2
        let h = &t2.pow(4).scale(&q(3, 4)) + &(&t1 * &t2.pow(2)).scale(&q(1, 2));
        let expected = &t2.pow(3).scale(&q(3, 1)) + &(&t1 * &t2);
        assert_eq!(h.derive(1), expected);
        assert_eq!(h.derive(1).reliable_order(), 5);
    }

    #[test]
    fn truncation_drops_high_terms() {
        let t1 = t(1, 4, 0);
        assert!(t1.pow(5).is_zero());
        assert_eq!(t1.pow(4).num_terms(), 1);
    }

    #[test]
    fn reliability_through_products() {
        let t1 = t(2, 6, 0);
        let d = t1.pow(3).derive(0); // 3 t1^2, reliable 5
        let p = &d * &t1; // error of d at degree >= 6, times t1: degree >= 7
        assert_eq!(p.reliable_order(), 6);
        let u = &Jet::one(2, 6) + &t1;
        assert_eq!((&d * &u).reliable_order(), 5);
    }

    #[test]
    fn mismatched_shapes_error() {
        let a = Jet::one(2, 5);
        let b = Jet::one(2, 6);
        assert!(a.try_add(&b).is_err());
        assert!(a.try_mul(&Jet::one(3, 5)).is_err());
    }

    #[test]
    fn formatting() {
        let t1 = t(2, 6, 0);
        let t2 = t(2, 6, 1);
        let h = &t2.pow(4).scale(&q(3, 4)) - &(&t1 * &t2.pow(2)).scale(&q(1, 2));
        assert_eq!(h.to_poly_string(), "-1/2*t1*t2^2 + 3/4*t2^4");
    }

    #[test]
    fn reliable_coefficient_guard() {
        let h = t(1, 4, 0).pow(2).derive(0).derive(0).derive(0);
        assert_eq!(h.reliable_order(), 1);
        assert!(h.value_at_origin().is_ok());
        assert!(h.reliable_coeff(Exponent::new(&[2]).unwrap()).is_err());
    }
}
