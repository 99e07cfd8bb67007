//! Random jets and the jet-engine invariants, shared by the property tests
//! and the acceptance run.

use frontal_core::jetcalc::{compose, divide, invert_map, q, Exponent, Jet};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const N: u32 = 6;

fn coeff() -> impl Strategy<Value = (i64, i64)> {
    (-6i64..=6, 1i64..=4)
}

/// Sparse jets in `nvars` variables with monomials of degree `lo..=N`.
pub fn jet(nvars: usize, lo: u32) -> impl Strategy<Value = Jet> {
    proptest::collection::vec((proptest::collection::vec(0..=N, nvars), coeff()), 0..8).prop_map(move |terms| {
        let mut j = Jet::zero(nvars, N);
        for (powers, (a, b)) in terms {
            let e = Exponent::new(&powers).unwrap();
            if e.degree() >= lo && e.degree() <= N {
                j.add_term(e, q(a, b));
            }
        }
        j
    })
}

/// A diffeomorphism germ of the plane: invertible linear part plus higher terms.
pub fn diffeo() -> impl Strategy<Value = Vec<Jet>> {
    let lin = (coeff(), coeff(), coeff(), coeff())
        .prop_filter("invertible", |(a, b, c, d)| q(a.0, a.1) * q(d.0, d.1) != q(b.0, b.1) * q(c.0, c.1));
    (lin, jet(2, 2), jet(2, 2)).prop_map(|((a, b, c, d), h1, h2)| {
        let t = |i| Jet::var(2, N, i);
        let row = |x: (i64, i64), y: (i64, i64), h: Jet| &(&t(0).scale(&q(x.0, x.1)) + &t(1).scale(&q(y.0, y.1))) + &h;
        vec![row(a, b, h1), row(c, d, h2)]
    })
}

fn agree_through(a: &Jet, b: &Jet, degree: u32) -> bool {
    a.truncate(degree) == b.truncate(degree)
}

pub fn ring_axioms(a: &Jet, b: &Jet, c: &Jet) -> Result<(), TestCaseError> {
    let (n, order) = (a.nvars(), a.order());
    prop_assert_eq!(&(a + b) + c, a + &(b + c));
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    prop_assert_eq!(&(a * &Jet::one(n, order)), a);
    prop_assert_eq!(&(a + &Jet::zero(n, order)), a);
    prop_assert!((&(a + b) - b) == *a);
    Ok(())
}

pub fn compose_invert(sigma: &[Jet]) -> Result<(), TestCaseError> {
    let tau = invert_map(sigma).unwrap();
    for i in 0..sigma.len() {
        let id = Jet::var(sigma.len(), N, i);
        prop_assert_eq!(compose(&tau[i], sigma).unwrap(), id.clone());
        prop_assert_eq!(compose(&sigma[i], &tau).unwrap(), id);
    }
    Ok(())
}

/// `divide(quot·d, d)` recovers `quot` through degree `N − ord(d)`.
pub fn divide_mul(quot: &Jet, d: &Jet) -> Result<(), TestCaseError> {
    let Some(v) = d.valuation() else {
        return Ok(());
    };
    let r = divide(&(quot * d), d).unwrap();
    prop_assert!(r.reliable_order() >= (N - v) as i32);
    prop_assert!(agree_through(&r, quot, r.reliable_order() as u32));
    Ok(())
}

pub fn leibniz(a: &Jet, b: &Jet, i: usize) -> Result<(), TestCaseError> {
    let lhs = (a * b).derive(i);
    let rhs = &(&a.derive(i) * b) + &(a * &b.derive(i));
    prop_assert!(lhs.reliable_order() < N as i32);
    prop_assert!(agree_through(&lhs, &rhs, N - 1));
    prop_assert!(agree_through(&(a + b).derive(i), &(&a.derive(i) + &b.derive(i)), N - 1));
    Ok(())
}
