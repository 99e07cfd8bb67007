use std::fmt;

use super::JetError;

/// A monomial exponent vector packed into a single word.
///
/// The top byte holds the total degree and the remaining seven bytes hold the
/// per-variable powers, first variable in the most significant position. The
/// derived integer ordering is therefore graded lexicographic with
/// `t1 > t2 > ...`, which is the ordering used for every tie-break in the
/// crate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Exponent(u64);

impl Exponent {
    pub const MAX_VARS: usize = 7;
    pub const MAX_DEGREE: u32 = 255;

    pub const fn zero() -> Self {
        Exponent(0)
    }

    pub fn new(powers: &[u32]) -> Result<Self, JetError> {
        if powers.len() > Self::MAX_VARS {
            return Err(JetError::TooManyVariables(powers.len()));
        }
        let degree: u32 = powers.iter().sum();
        if degree > Self::MAX_DEGREE {
            return Err(JetError::DegreeOverflow(degree));
        }
        let mut packed = (degree as u64) << 56;
        for (i, &p) in powers.iter().enumerate() {
            packed |= (p as u64) << Self::shift(i);
        }
        Ok(Exponent(packed))
    }

    /// The exponent of the `i`-th coordinate function (0-based).
    pub fn unit(i: usize) -> Self {
        debug_assert!(i < Self::MAX_VARS);
        Exponent((1u64 << 56) | (1u64 << Self::shift(i)))
    }

    #[inline]
    fn shift(i: usize) -> u32 {
        48 - 8 * i as u32
    }

    #[inline]
    pub(crate) fn raw(self) -> u64 {
        self.0
    }

    /// Caller guarantees the packed word is a valid exponent (no per-byte carry).
    #[inline]
    pub(crate) fn from_raw(raw: u64) -> Self {
        Exponent(raw)
    }

    #[inline]
    pub fn degree(self) -> u32 {
        (self.0 >> 56) as u32
    }

    #[inline]
    pub fn power(self, i: usize) -> u32 {
        ((self.0 >> Self::shift(i)) & 0xff) as u32
    }

    pub fn powers(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.power(i)).collect()
    }

    /// Product of monomials. `None` when the total degree would overflow.
    #[inline]
    pub fn checked_mul(self, other: Exponent) -> Option<Exponent> {
        if self.degree() + other.degree() > Self::MAX_DEGREE {
            None
        } else {
            Some(Exponent(self.0 + other.0))
        }
    }

    /// Quotient of monomials, `None` unless `other` divides `self`.
    pub fn checked_div(self, other: Exponent) -> Option<Exponent> {
        for i in 0..Self::MAX_VARS {
            if other.power(i) > self.power(i) {
                return None;
            }
        }
        Some(Exponent(self.0 - other.0))
    }

    pub fn divides(self, other: Exponent) -> bool {
        other.checked_div(self).is_some()
    }

    /// Lowers the power of variable `i` by one.
    pub fn lower(self, i: usize) -> Option<Exponent> {
        if self.power(i) == 0 {
            None
        } else {
            Some(Exponent(self.0 - Self::unit(i).0))
        }
    }

    /// True when only variables with index `< nvars` appear.
    pub fn fits(self, nvars: usize) -> bool {
        (nvars..Self::MAX_VARS).all(|i| self.power(i) == 0)
    }

    /// Writes the monomial using the given variable names; `1` for the empty monomial.
    pub fn format_with(self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, name) in names.iter().enumerate() {
            match self.power(i) {
                0 => {}
                1 => parts.push(name.clone()),
                p => parts.push(format!("{name}^{p}")),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let powers: Vec<u32> = (0..Self::MAX_VARS).map(|i| self.power(i)).collect();
        let last = powers.iter().rposition(|&p| p != 0).map_or(0, |p| p + 1);
        write!(f, "Exponent{:?}", &powers[..last])
    }
}

/// All exponents in `nvars` variables of total degree `degree`, ascending.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Exponent> {
    fn rec(nvars: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if i + 1 == nvars {
            cur.push(left);
            out.push(Exponent::new(cur).expect("bounded exponent"));
            cur.pop();
            return;
        }
        for p in 0..=left {
            cur.push(p);
            rec(nvars, i + 1, left - p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Exponent::zero());
        }
        return out;
    }
    rec(nvars, 0, degree, &mut Vec::with_capacity(nvars), &mut out);
    out.sort();
    out
}

/// All exponents of total degree `lo..=hi`, in ascending graded-lex order.
pub fn monomials_in_range(nvars: usize, lo: u32, hi: u32) -> Vec<Exponent> {
    (lo..=hi)
        .flat_map(|d| monomials_of_degree(nvars, d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_round_trips() {
        let e = Exponent::new(&[3, 0, 2]).unwrap();
        assert_eq!(e.degree(), 5);
        assert_eq!(e.powers(3), vec![3, 0, 2]);
        assert!(e.fits(3));
        assert!(!e.fits(2));
    }

    #[test]
    fn ordering_is_graded_lex() {
        let t1 = Exponent::unit(0);
        let t2 = Exponent::unit(1);
        let t2sq = Exponent::new(&[0, 2]).unwrap();
        assert!(t1 > t2);
        assert!(t2sq > t1);
        assert!(Exponent::new(&[1, 1]).unwrap() > t2sq);
    }

    #[test]
    fn division_and_lowering() {
        let a = Exponent::new(&[2, 1]).unwrap();
        let b = Exponent::new(&[1, 1]).unwrap();
        assert_eq!(a.checked_div(b), Some(Exponent::unit(0)));
        assert_eq!(b.checked_div(a), None);
        assert_eq!(a.lower(1), Some(Exponent::new(&[2, 0]).unwrap()));
        assert_eq!(Exponent::unit(0).lower(1), None);
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_of_degree(2, 3).len(), 4);
        assert_eq!(monomials_in_range(2, 0, 12).len(), 91);
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
    }

    #[test]
    fn rejects_oversized() {
        assert!(Exponent::new(&[1; 8]).is_err());
        assert!(Exponent::new(&[200, 100]).is_err());
    }
}
