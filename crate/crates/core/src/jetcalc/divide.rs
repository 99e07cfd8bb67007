use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use super::exponent::Exponent;
use super::jet::{clamp_i32, Jet};
use super::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DivideError {
    #[error("division by zero")]
    ZeroDivisor,
    #[error("not divisible: inconsistency at degree {degree}")]
    NotDivisible { degree: u32 },
    #[error("divisor is not determined at the available order")]
    Undetermined,
    #[error("operands live in different jet spaces")]
    ShapeMismatch,
}

type Poly = BTreeMap<Exponent, Rational>;

/// Exact quotient `num / den` in the formal power series ring, computed one
/// homogeneous degree at a time against the lowest part of `den`.
///
/// `NotDivisible` is only reported at degrees where both operands are
/// reliable, so it certifies non-divisibility of the underlying germs. The
/// quotient's reliable order accounts for the lost degrees of `den`'s
/// valuation.
pub fn divide(num: &Jet, den: &Jet) -> Result<Jet, DivideError> {
    if num.nvars() != den.nvars() || num.order() != den.order() {
        return Err(DivideError::ShapeMismatch);
    }
    let order = num.order();
    let v = match den.valuation() {
        Some(v) if (v as i32) <= den.reliable_order() => v,
        None if den.reliable_order() >= order as i32 => return Err(DivideError::ZeroDivisor),
        _ => return Err(DivideError::Undetermined),
    };
    let rel_n = num.reliable_order() as i64;
    let rel_d = den.reliable_order() as i64;
    let lead: Poly = den
        .terms()
        .filter(|(e, _)| e.degree() == v)
        .map(|(e, c)| (*e, c.clone()))
        .collect();

    let mut residual: Poly = num.terms().map(|(e, c)| (*e, c.clone())).collect();
    // Terms below the divisor's valuation can never be matched.
    if let Some((e, _)) = residual.iter().next() {
        if e.degree() < v && (e.degree() as i64) <= rel_n {
            return Err(DivideError::NotDivisible { degree: e.degree() });
        }
    }

    let mut quotient: Poly = BTreeMap::new();
    let mut q_val: Option<u32> = None;
    for k in 0..=(order - v) {
        let d = k + v;
        let trusted = (d as i64) <= rel_n && q_val.is_none_or(|qv| (d as i64) <= rel_d + qv as i64);
        let part: Poly = residual
            .range(Exponent::from_raw((d as u64) << 56)..Exponent::from_raw(((d + 1) as u64) << 56))
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        if part.is_empty() {
            continue;
        }
        let qk = match divide_homogeneous(part, &lead) {
            Some(qk) => qk,
            None if trusted => return Err(DivideError::NotDivisible { degree: d }),
            None => break,
        };
        // residual -= qk * den
        for (qe, qc) in &qk {
            for (de, dc) in den.terms() {
                if qe.degree() + de.degree() > order {
                    break;
                }
                let e = Exponent::from_raw(qe.raw() + de.raw());
                let slot = residual.entry(e).or_insert_with(Rational::zero);
                *slot -= qc * dc;
                if slot.is_zero() {
                    residual.remove(&e);
                }
            }
        }
        if q_val.is_none() {
            q_val = Some(k);
        }
        quotient.extend(qk);
    }

    let lbq = q_val.map_or(i64::MAX, |x| x as i64);
    let rel = (order as i64).min(rel_n).min(lbq.saturating_add(rel_d)) - v as i64;
    Ok(Jet::from_map(num.nvars(), order, clamp_i32(rel), quotient))
}

/// Exact division of homogeneous polynomials by leading-term reduction.
fn divide_homogeneous(mut p: Poly, d: &Poly) -> Option<Poly> {
    let (lt_e, lt_c) = d.iter().next_back().map(|(e, c)| (*e, c.clone()))?;
    let mut out = Poly::new();
    while let Some((e, c)) = p.iter().next_back().map(|(e, c)| (*e, c.clone())) {
        let m = e.checked_div(lt_e)?;
        let f = c / &lt_c;
        for (de, dc) in d {
            let t = Exponent::from_raw(m.raw() + de.raw());
            let slot = p.entry(t).or_insert_with(Rational::zero);
            *slot -= &f * dc;
            if slot.is_zero() {
                p.remove(&t);
            }
        }
        out.insert(m, f);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcalc::q;

    fn tu(order: u32) -> (Jet, Jet) {
        (Jet::var(2, order, 0), Jet::var(2, order, 1))
    }

    #[test]
    fn mond_quotients() {
        let (t, u) = tu(12);
        let d12 = (&t * &u).scale(&q(6, 1));
        let d13 = (&t.pow(2) * &u).scale(&q(12, 1));
        let d23 = (&t.pow(4) * &u).scale(&q(12, 1));
        assert_eq!(divide(&d13, &d12).unwrap(), t.scale(&q(2, 1)));
        assert_eq!(divide(&d23, &d12).unwrap(), t.pow(3).scale(&q(2, 1)));
    }

    #[test]
    fn distinct_variables() {
        let (t1, t2) = tu(6);
        assert_eq!(divide(&t1, &t2), Err(DivideError::NotDivisible { degree: 1 }));
        assert_eq!(divide(&t1, &Jet::zero(2, 6)), Err(DivideError::ZeroDivisor));
    }

    #[test]
    fn unit_divisor_and_reliability() {
        let (t1, t2) = tu(8);
        let one = Jet::one(2, 8);
        let den = &one + &t1;
        let num = &(&t2 * &den) * &den;
        assert_eq!(divide(&num, &den).unwrap(), &t2 * &den);
        let lam = &t2.pow(2).scale(&q(3, 1)) + &t1;
        let qt = &t1 + &t2.pow(3);
        let got = divide(&(&qt * &lam), &lam).unwrap();
        assert_eq!(got, qt);
        assert_eq!(got.reliable_order(), 7);
    }

    #[test]
    fn undetermined_divisor() {
        let (t1, _) = tu(4);
        let d = t1.pow(3).derive(0).derive(0).derive(0).derive(0);
        assert_eq!(divide(&t1, &d), Err(DivideError::Undetermined));
    }
}
