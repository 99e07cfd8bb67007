use std::collections::HashMap;

use num_traits::{One, Zero};

use super::exponent::Exponent;
use super::jet::{clamp_i32, Accumulator, Jet};
use super::{JetError, Rational};
use crate::linalg::{self, Matrix};

/// Substitutes `inner` into `outer`: the jet of `outer(inner_1, ..., inner_m)`.
///
/// The result lives in the variables and truncation order of `inner`. Every
/// inner jet must vanish at the origin.
pub fn compose(outer: &Jet, inner: &[Jet]) -> Result<Jet, JetError> {
    Substitution::new(inner)?.apply(outer)
}

/// Substitution of a fixed inner map into many outer jets, sharing the
/// images of monomials between calls.
pub struct Substitution<'a> {
    inner: &'a [Jet],
    nvars: usize,
    order: u32,
    lbmin: i64,
    rel_inner: i64,
    cache: HashMap<Exponent, Jet>,
}

impl<'a> Substitution<'a> {
    pub fn new(inner: &'a [Jet]) -> Result<Self, JetError> {
        let (nvars, order) = match inner.first() {
            Some(j) => (j.nvars(), j.order()),
            None => (0, 0),
        };
        for (index, j) in inner.iter().enumerate() {
            if j.nvars() != nvars || j.order() != order {
                return Err(JetError::ShapeMismatch {
                    left: (nvars, order),
                    right: (j.nvars(), j.order()),
                });
            }
            if !j.coeff(Exponent::zero()).is_zero() {
                return Err(JetError::NonzeroConstantTerm { index });
            }
        }
        // The inner jets vanish at 0 by hypothesis, so each has order >= 1.
        let lbmin = inner.iter().map(|j| j.valuation_bound().max(1)).min().unwrap_or(1);
        let rel_inner = inner.iter().map(|j| j.reliable_order() as i64).min().unwrap_or(i64::MAX);
        let mut cache = HashMap::new();
        if !inner.is_empty() {
            cache.insert(Exponent::zero(), Jet::one(nvars, order));
        }
        Ok(Substitution {
            inner,
            nvars,
            order,
            lbmin,
            rel_inner,
            cache,
        })
    }

    pub fn apply(&mut self, outer: &Jet) -> Result<Jet, JetError> {
        if self.inner.len() != outer.nvars() {
            return Err(JetError::ArityMismatch {
                expected: outer.nvars(),
                found: self.inner.len(),
            });
        }
        if self.inner.is_empty() {
            return Ok(outer.clone());
        }
        let (order, lbmin) = (self.order, self.lbmin);
        let mut acc = Accumulator::default();
        for (e, c) in outer.terms() {
            if (e.degree() as i64) * lbmin > order as i64 {
                continue;
            }
            let prod = self.image(*e);
            acc.add_scaled(c, &prod);
        }
        let outer_lb = outer.valuation_bound().max(1);
        let reliable = (order as i64)
            .min((outer.reliable_order() as i64 + 1).saturating_mul(lbmin) - 1)
            .min(self.rel_inner.saturating_add((outer_lb - 1).saturating_mul(lbmin)));
        Ok(Jet::from_map(self.nvars, order, clamp_i32(reliable), acc.into_terms()))
    }

    pub fn apply_all(&mut self, outers: &[Jet]) -> Result<Vec<Jet>, JetError> {
        outers.iter().map(|o| self.apply(o)).collect()
    }

    fn image(&mut self, e: Exponent) -> Jet {
        if let Some(j) = self.cache.get(&e) {
            return j.clone();
        }
        let i = (0..self.inner.len()).rev().find(|&i| e.power(i) > 0).expect("nonzero exponent");
        let lower = e.lower(i).expect("positive power");
        let prev = self.image(lower);
        let out = &prev * &self.inner[i];
        self.cache.insert(e, out.clone());
        out
    }
}

/// The matrix of linear coefficients: row `i` holds the `t_j` coefficients of `map[i]`.
pub fn linear_part(map: &[Jet]) -> Matrix {
    map.iter()
        .map(|f| (0..f.nvars()).map(|j| f.coeff(Exponent::unit(j))).collect())
        .collect()
}

/// Formal inverse of a diffeomorphism germ `σ : (R^n,0) → (R^n,0)`.
pub fn invert_map(sigma: &[Jet]) -> Result<Vec<Jet>, JetError> {
    let n = sigma.len();
    let order = match sigma.first() {
        Some(j) => j.order(),
        None => return Ok(Vec::new()),
    };
    for (index, s) in sigma.iter().enumerate() {
        if s.nvars() != n {
            return Err(JetError::WrongVariableCount {
                expected: n,
                found: s.nvars(),
            });
        }
        if !s.coeff(Exponent::zero()).is_zero() {
            return Err(JetError::NonzeroConstantTerm { index });
        }
    }
    let lin = linear_part(sigma);
    let linv = linalg::inverse(&lin).ok_or(JetError::SingularLinearPart)?;
    let nonlinear: Vec<Jet> = sigma.iter().map(|s| s.filter_terms(|e| e.degree() >= 2)).collect();
    let rel = sigma.iter().map(|s| s.reliable_order()).min().unwrap_or(order as i32);

    // Fixed point of τ = L⁻¹(t − N(τ)); each pass fixes one more degree, so
    // pass k runs at truncation order k.
    let mut tau: Vec<Jet> = (0..n).map(|i| Jet::var(n, 1, i).scale(&Rational::one())).collect();
    tau = apply_matrix(&linv, &tau);
    for k in 2..=order {
        let tk: Vec<Jet> = tau.iter().map(|t| t.with_order(k)).collect();
        let mut rhs: Vec<Jet> = (0..n).map(|i| Jet::var(n, k, i)).collect();
        let mut sub = Substitution::new(&tk)?;
        for (r, nl) in rhs.iter_mut().zip(&nonlinear) {
            let img = sub.apply(&nl.with_order(k))?;
            *r = &*r - &img;
        }
        tau = apply_matrix(&linv, &rhs);
    }
    Ok(tau.into_iter().map(|t| reembed(&t, order, rel)).collect())
}

fn apply_matrix(m: &Matrix, v: &[Jet]) -> Vec<Jet> {
    m.iter()
        .map(|row| {
            let mut acc = Jet::zero(v[0].nvars(), v[0].order());
            for (c, j) in row.iter().zip(v) {
                if !c.is_zero() {
                    acc = &acc + &j.scale(c);
                }
            }
            acc
        })
        .collect()
}

fn reembed(j: &Jet, order: u32, reliable: i32) -> Jet {
    let terms = j.terms().map(|(e, c)| (*e, c.clone())).collect();
    Jet::from_map(j.nvars(), order, reliable, terms)
}

/// Solves `F(s, y) = 0` for `y = y(s)` with `y(0) = 0`.
///
/// `f` holds `k` jets in `n + k` variables, the first `n` being `s`. The
/// block `∂F/∂y` at the origin must be invertible and `F(0, 0) = 0`. The
/// solution is returned as `k` jets in `n` variables at truncation order
/// `order`.
pub fn implicit_solve(f: &[Jet], n: usize, order: u32) -> Result<Vec<Jet>, JetError> {
    let k = f.len();
    for (index, fi) in f.iter().enumerate() {
        if fi.nvars() != n + k {
            return Err(JetError::WrongVariableCount {
                expected: n + k,
                found: fi.nvars(),
            });
        }
        if !fi.coeff(Exponent::zero()).is_zero() {
            return Err(JetError::NonzeroConstantTerm { index });
        }
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let a: Matrix = f
        .iter()
        .map(|fi| (0..k).map(|j| fi.coeff(Exponent::unit(n + j))).collect())
        .collect();
    let ainv = linalg::inverse(&a).ok_or(JetError::SingularLinearPart)?;
    let rel = f.iter().map(|fi| fi.reliable_order()).min().unwrap_or(order as i32);

    let mut y: Vec<Jet> = (0..k).map(|_| Jet::zero(n, 0)).collect();
    for d in 1..=order {
        let yd: Vec<Jet> = y.iter().map(|j| j.with_order(d)).collect();
        let mut subs: Vec<Jet> = (0..n).map(|i| Jet::var(n, d, i)).collect();
        subs.extend(yd.iter().cloned());
        let mut sub = Substitution::new(&subs)?;
        let mut residual = Vec::with_capacity(k);
        for fi in f {
            residual.push(sub.apply(&fi.with_order(d))?);
        }
        let step = apply_matrix(&ainv, &residual);
        y = yd.iter().zip(&step).map(|(a, b)| a - b).collect();
    }
    Ok(y.into_iter().map(|j| reembed(&j, order, rel)).collect())
}

/// `1/u` for a jet with nonzero constant term.
pub fn unit_inverse(u: &Jet) -> Option<Jet> {
    let c = u.coeff(Exponent::zero());
    if c.is_zero() || u.reliable_order() < 0 {
        return None;
    }
    let cinv = c.recip();
    // u = c(1 + v), 1/u = c⁻¹ Σ (−v)^k
    let v = (u - &Jet::constant(u.nvars(), u.order(), c)).scale(&cinv);
    let negv = -&v;
    let mut sum = Jet::one(u.nvars(), u.order());
    let mut power = Jet::one(u.nvars(), u.order());
    for _ in 0..u.order() {
        power = &power * &negv;
        if power.is_zero() {
            break;
        }
        sum = &sum + &power;
    }
    Some(sum.scale(&cinv).with_reliable(u.reliable_order()))
}

/// Square root of a jet whose constant term is the square of a positive
/// rational; the root with positive constant term.
pub fn sqrt_unit(u: &Jet) -> Result<Jet, JetError> {
    let c = u.coeff(Exponent::zero());
    if u.reliable_order() < 0 || c <= Rational::zero() {
        return Err(JetError::NotASquare);
    }
    let root = rational_sqrt(&c).ok_or(JetError::NotASquare)?;
    let v = (u - &Jet::constant(u.nvars(), u.order(), c.clone())).scale(&c.recip());
    // (1 + v)^{1/2} = Σ binom(1/2, k) v^k
    let half = Rational::new(1.into(), 2.into());
    let mut coeff = Rational::one();
    let mut sum = Jet::one(u.nvars(), u.order());
    let mut power = Jet::one(u.nvars(), u.order());
    for k in 0..u.order() {
        coeff = coeff * (&half - Rational::from_integer(k.into())) / Rational::from_integer((k + 1).into());
        power = &power * &v;
        if power.is_zero() {
            break;
        }
        sum = &sum + &power.scale(&coeff);
    }
    Ok(sum.scale(&root).with_reliable(u.reliable_order()))
}

fn rational_sqrt(c: &Rational) -> Option<Rational> {
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    if &(&n * &n) == c.numer() && &(&d * &d) == c.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcalc::q;

    fn vars(n: usize, order: u32) -> Vec<Jet> {
        (0..n).map(|i| Jet::var(n, order, i)).collect()
    }

    #[test]
    fn monomial_substitution() {
        let x = vars(2, 8);
        let t = vars(2, 8);
        let outer = x[1].pow(2);
        let got = compose(&outer, &[t[0].clone(), t[1].pow(3)]).unwrap();
        assert_eq!(got, t[1].pow(6));
        let got = compose(&(&x[0] + &x[1]), &[t[0].clone(), t[1].pow(2)]).unwrap();
        assert_eq!(got, &t[0] + &t[1].pow(2));
    }

    #[test]
    fn expand_and_compare() {
        let x = vars(2, 6);
        let t = vars(2, 6);
        let got = compose(&(&x[0] * &x[1]), &[&t[0] + &t[1], &t[0] - &t[1]]).unwrap();
        assert_eq!(got, &t[0].pow(2) - &t[1].pow(2));
    }

    #[test]
    fn compose_rejects_constant_terms() {
        let x = vars(1, 4);
        let one = Jet::one(1, 4);
        assert_eq!(
            compose(&x[0], &[&one + &x[0]]),
            Err(JetError::NonzeroConstantTerm { index: 0 })
        );
    }

    #[test]
    fn inverse_of_identity_and_linear() {
        let t = vars(2, 6);
        assert_eq!(invert_map(&t).unwrap(), t);
        let inv = invert_map(&[t[0].scale(&q(2, 1)), t[1].clone()]).unwrap();
        assert_eq!(inv, vec![t[0].scale(&q(1, 2)), t[1].clone()]);
    }

    #[test]
    fn inverse_round_trip() {
        let t = vars(2, 4);
        let sigma = vec![&t[0] + &t[0].pow(2), t[1].clone()];
        let tau = invert_map(&sigma).unwrap();
        for (i, s) in sigma.iter().enumerate() {
            assert_eq!(compose(s, &tau).unwrap(), t[i]);
        }
        // t1 - t1^2 + 2 t1^3 - 5 t1^4
        assert_eq!(tau[0].coeff(Exponent::new(&[4, 0]).unwrap()), q(-5, 1));
        assert!(invert_map(&[t[0].pow(2), t[1].clone()]).is_err());
    }

    #[test]
    fn implicit_curve() {
        // y - s - y^2 = 0  gives the Catalan series y = s + s^2 + 2 s^3 + 5 s^4 + ...
        let v = vars(2, 6);
        let f = &(&v[1] - &v[0]) - &v[1].pow(2);
        let y = implicit_solve(&[f], 1, 6).unwrap();
        let expected: Vec<i64> = vec![0, 1, 1, 2, 5, 14, 42];
        for (k, c) in expected.iter().enumerate() {
            assert_eq!(y[0].coeff(Exponent::new(&[k as u32]).unwrap()), q(*c, 1));
        }
    }

    #[test]
    fn square_roots_and_inverses() {
        let t = vars(2, 8);
        let one = Jet::one(2, 8);
        let a = &one + &(&t[0] + &t[1].pow(2));
        let sq = &a * &a;
        assert_eq!(sqrt_unit(&sq).unwrap(), a);
        let four = sq.scale(&q(4, 1));
        assert_eq!(sqrt_unit(&four).unwrap(), a.scale(&q(2, 1)));
        assert!(sqrt_unit(&a.scale(&q(2, 1))).is_err());
        let inv = unit_inverse(&a).unwrap();
        assert_eq!(&inv * &a, one);
    }
}
