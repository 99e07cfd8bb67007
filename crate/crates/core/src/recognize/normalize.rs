//! Auxiliary normalizations used by the decision tree: fold normal form,
//! formal branches of a Morse Jacobian and the double-point test.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::germs::{JetMap, VectorFieldJet};
use crate::jetcalc::{
    compose, divide, implicit_solve, invert_map, sqrt_unit, wedge_coefficient, Exponent, FormJet, Jet, Rational,
};

fn var(n: usize, order: u32, i: usize) -> Jet {
    Jet::var(n, order, i)
}

/// Odd part in the second variable.
fn odd_part(h: &Jet) -> Jet {
    h.filter_terms(|e| e.power(1) % 2 == 1)
}

/// Functionals of a fold opening after normalizing the base to `(s, q0 w²)`.
#[derive(Clone, Debug)]
pub struct FoldFunctionals {
    pub q0: Rational,
    /// `(dλ ∧ d(η³F_k))(0)` with `λ = 2 q0 w` and `η = ∂/∂w`, per extra component.
    pub alpha: Vec<Option<Rational>>,
    /// `(η⁵F_k)(0)` per extra component.
    pub beta: Vec<Option<Rational>>,
}

/// `g` is a prepared germ whose base `(s1, φ2)` is a fold. The extra
/// components are rewritten in coordinates `(s1, w)` where `φ2 = a(s1) + q0 w²`;
/// their parts even in `w` are functions of the base and are discarded.
pub fn fold_functionals(g: &JetMap) -> Result<FoldFunctionals> {
    let order = g.order();
    let phi2 = g.comp(1);
    let lambda = phi2.derive(1);

    // Critical curve s2 = c(s1).
    let c = implicit_solve(std::slice::from_ref(&lambda), 1, order)?.remove(0).widen(2);
    let s1 = var(2, order, 0);
    let u = var(2, order, 1);
    let big_phi = compose(phi2, &[s1.clone(), &c + &u])?;
    let a = big_phi.filter_terms(|e| e.power(1) == 0);
    let quad = divide(&(&big_phi - &a), &u.pow(2))?;
    let q0 = quad
        .value_at_origin()
        .map_err(|_| Error::Precondition("fold coefficient undetermined".into()))?;
    if q0.is_zero() {
        return Err(Error::Precondition("base is not a fold".into()));
    }
    let root = sqrt_unit(&quad.scale(&q0.recip()))?;
    let w_u = &u * &root;
    let w = compose(&w_u, &[s1.clone(), &u - &c])?;
    let sigma = invert_map(&[s1.clone(), w])?;

    let two_q0 = &q0 + &q0;
    let lam_n = var(2, order, 1).scale(&two_q0);
    let eta = VectorFieldJet::coordinate(2, order, 1);
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for fk in &g.comps()[2..] {
        let big_f = odd_part(&compose(fk, &sigma)?);
        let e3 = eta.apply_n(&big_f, 3);
        let wedge = wedge_coefficient(&FormJet::d(&lam_n), &FormJet::d(&e3))?;
        alpha.push(wedge.value_at_origin().ok());
        beta.push(eta.apply_n(&big_f, 5).value_at_origin().ok());
    }
    Ok(FoldFunctionals { q0, alpha, beta })
}

/// A formal branch of `{λ = 0}` through the origin, as a curve in one variable.
#[derive(Clone, Debug)]
pub struct Branch {
    /// Tangent direction `(p, q)`.
    pub direction: (Rational, Rational),
    pub curve: [Jet; 2],
}

/// Parametrizes the two branches of a Morse function with indefinite Hessian.
/// Returns `None` when the tangent directions are irrational.
pub fn morse_branches(lambda: &Jet) -> Result<Option<Vec<Branch>>> {
    let order = lambda.order();
    let e = |p: &[u32]| lambda.coeff(Exponent::new(p).expect("small exponent"));
    let (a, b, c) = (e(&[2, 0]), e(&[1, 1]), e(&[0, 2]));
    // a p² + b p q + c q² = 0
    let disc = &b * &b - Rational::from_integer(4.into()) * &a * &c;
    if disc <= Rational::zero() {
        return Err(Error::Precondition("Jacobian is not indefinite Morse".into()));
    }
    let Some(root) = rational_sqrt(&disc) else {
        return Ok(None);
    };
    let mut directions = Vec::new();
    if a.is_zero() {
        // q (b p + c q) = 0: the lines q = 0 and b p + c q = 0.
        directions.push((Rational::one(), Rational::zero()));
        directions.push((-c.clone(), b.clone()));
    } else {
        // p = 1 is never a root direction only if a = 0; here solve for p/q with q = 1.
        let two_a = &a + &a;
        for sign in [1i64, -1] {
            let p = (-&b + Rational::from_integer(sign.into()) * &root) / &two_a;
            directions.push((p, Rational::one()));
        }
    }

    let mut out = Vec::new();
    for (p, qd) in directions {
        let tau = var(2, order, 0);
        let w = var(2, order, 1);
        // Move along (p, q) and perturb in the complementary coordinate.
        let (x, y, swap) = if !qd.is_zero() {
            let kappa = &p / &qd;
            (&tau.scale(&kappa) + &(&tau * &w), tau.clone(), false)
        } else {
            (tau.clone(), &tau * &w, true)
        };
        let blown = compose(lambda, &[x, y])?;
        let g = divide(&blown, &tau.pow(2))?;
        let sol = implicit_solve(&[g], 1, order)?.remove(0);
        let t1 = var(1, order, 0);
        let perturbed = &t1 * &sol;
        let curve = if swap {
            [t1.clone(), perturbed]
        } else {
            let kappa = &p / &qd;
            [&t1.scale(&kappa) + &perturbed, t1.clone()]
        };
        out.push(Branch {
            direction: (p, qd),
            curve,
        });
    }
    Ok(Some(out))
}

/// Whether `h` vanishes identically along the branch, through the reliable
/// order of the restriction. `None` when nothing is reliable.
pub fn vanishes_along(h: &Jet, branch: &Branch) -> Result<Option<bool>> {
    let r = compose(h, &branch.curve)?;
    let rel = r.reliable_order();
    if let Some(v) = r.valuation() {
        if (v as i32) <= rel {
            return Ok(Some(false));
        }
    }
    Ok(if rel >= 1 { Some(true) } else { None })
}

/// For each branch of the Morse Jacobian, whether `η³h` vanishes along it.
/// `None` for the whole result when the branches cannot be parametrized.
pub fn branch_vanishing(lambda: &Jet, h: &Jet, eta: &VectorFieldJet) -> Result<Option<Vec<Option<bool>>>> {
    let target = eta.apply_n(h, 3);
    functions_vanish_on_branches(lambda, &target)
}

pub fn functions_vanish_on_branches(lambda: &Jet, target: &Jet) -> Result<Option<Vec<Option<bool>>>> {
    let Some(branches) = morse_branches(lambda)? else {
        return Ok(None);
    };
    let flags = branches
        .iter()
        .map(|b| vanishes_along(target, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(flags))
}

fn rational_sqrt(c: &Rational) -> Option<Rational> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    (&(&n * &n) == c.numer() && &(&d * &d) == c.denom()).then(|| Rational::new(n, d))
}

/// Evidence of the double-point test on a cusp opening `(s1, φ2, φ3)`.
#[derive(Clone, Debug)]
pub struct DoublePoints {
    /// Lowest homogeneous part of the reduced double-point function, as the
    /// coefficients of `x^d, x^(d−1) y, …, y^d`.
    pub form: Option<Vec<Rational>>,
    pub samples: Vec<Rational>,
}

/// Two distinct points `(a, x)`, `(a, y)` share an image iff `a = A(x, y)`
/// solves the divided difference of `φ2` and the divided difference of `φ3`
/// vanishes there. That function is `(x − y)² E(x, y)`; a definite lowest
/// part of `E` rules out double points near the origin.
pub fn double_points(g: &JetMap, seed: u64) -> Result<DoublePoints> {
    let order = g.order();
    // variables (x, y, a)
    let x = var(3, order, 0);
    let y = var(3, order, 1);
    let a = var(3, order, 2);
    let diff = &x - &y;
    let divided = |h: &Jet| -> Result<Jet> {
        let hx = compose(h, &[a.clone(), x.clone()])?;
        let hy = compose(h, &[a.clone(), y.clone()])?;
        Ok(divide(&(&hx - &hy), &diff)?)
    };
    let d2 = divided(g.comp(1))?;
    let d3 = divided(g.comp(2))?;
    let big_a = implicit_solve(&[d2], 2, order)?.remove(0);
    let x2 = var(2, order, 0);
    let y2 = var(2, order, 1);
    let restricted = compose(&d3, &[x2.clone(), y2.clone(), big_a])?;
    let e = divide(&restricted, &(&x2 - &y2).pow(2))?;

    let mut out = DoublePoints {
        form: None,
        samples: Vec::new(),
    };
    let Some(v) = e.valuation() else {
        return Ok(out);
    };
    if v as i32 > e.reliable_order() {
        return Ok(out);
    }
    let form: Vec<Rational> = (0..=v)
        .map(|i| e.coeff(Exponent::new(&[v - i, i]).expect("small exponent")))
        .collect();
    if v > 2 && v % 2 == 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lowest = e.homogeneous_part(v);
        for _ in 0..64 {
            let p = Rational::new(rng.gen_range(-50i64..=50).into(), rng.gen_range(1i64..=50).into());
            let point = if rng.gen_bool(0.5) {
                [Rational::one(), p]
            } else {
                [p, Rational::one()]
            };
            out.samples.push(lowest.eval(&point));
        }
    }
    out.form = Some(form);
    Ok(out)
}

/// A diagnostic fit of the folded-pleat parameter `c`, read off the pure
/// `s2⁵` and `s2⁶` coefficients of the third component. Not an invariant.
pub fn folded_pleat_parameter(g: &JetMap) -> Option<Rational> {
    let f3 = g.comp(2);
    let c5 = f3.reliable_coeff(Exponent::new(&[0, 5]).ok()?).ok()?;
    let c6 = f3.reliable_coeff(Exponent::new(&[0, 6]).ok()?).ok()?;
    if c5.is_zero() {
        return None;
    }
    // normal form: c5 = 3/5, c6 = c/2
    let scale = Rational::new(3.into(), 5.into()) / c5;
    Some(c6 * scale * Rational::from_integer(2.into()))
}
