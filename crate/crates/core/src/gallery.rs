//! Fixture factory: normal forms, tangent surfaces and random A-perturbations.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::germs::JetMap;
use crate::jetcalc::{q, Exponent, Jet, Rational};
use crate::linalg::{self, Matrix};
use crate::recognize::SingularityClass;

/// Leading exponents `ℓ₁ < ℓ₂ < …` plus optional higher terms per component.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveType {
    exponents: Vec<u32>,
    extra: Vec<Vec<(u32, Rational)>>,
}

impl CurveType {
    pub fn new(exponents: &[u32]) -> Result<Self> {
        if exponents.is_empty() || exponents[0] == 0 || exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCurveType(format!("{exponents:?} is not strictly increasing and positive")));
        }
        Ok(CurveType {
            exponents: exponents.to_vec(),
            extra: vec![Vec::new(); exponents.len()],
        })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Adds `c·t^k` to component `i`. Terms at or below the leading exponent
    /// would change the type and are rejected.
    pub fn with_term(mut self, i: usize, k: u32, c: Rational) -> Result<Self> {
        let Some(&l) = self.exponents.get(i) else {
            return Err(Error::InvalidCurveType(format!("no component {i}")));
        };
        if k <= l {
            return Err(Error::InvalidCurveType(format!(
                "term t^{k} in component {i} does not lie above its leading exponent {l}"
            )));
        }
        self.extra[i].push((k, c));
        Ok(self)
    }

    /// Random higher terms up to degree `max_degree`, coefficients `p/q` with `|p|, q ≤ 9`.
    pub fn randomized(mut self, seed: u64, max_degree: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (i, &l) in self.exponents.iter().enumerate() {
            for k in l + 1..=max_degree {
                if rng.gen_bool(0.5) {
                    self.extra[i].push((k, small_rational(&mut rng)));
                }
            }
        }
        self
    }
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    let mut num = 0i64;
    while num == 0 {
        num = rng.gen_range(-9..=9);
    }
    q(num, rng.gen_range(1..=9))
}

/// `(t^{ℓ₁} + …, t^{ℓ₂} + …, …)` as one-variable jets.
pub fn curve_of_type(ty: &CurveType, order: u32) -> Vec<Jet> {
    ty.exponents
        .iter()
        .zip(&ty.extra)
        .map(|(&l, extra)| {
            let mut c = Jet::zero(1, order);
            if l <= order {
                c.add_term(Exponent::new(&[l]).expect("one variable"), Rational::one());
            }
            for (k, a) in extra {
                if *k <= order {
                    c.add_term(Exponent::new(&[*k]).expect("one variable"), a.clone());
                }
            }
            c
        })
        .collect()
}

/// The ruled surface of tangent lines, `(t, u) ↦ γ(t) + u·γ'(t)/t^{ℓ₁−1}`,
/// with `t` the first source variable. For a regular curve this is
/// `γ(t) + u·γ'(t)`.
pub fn tangent_surface(gamma: &[Jet], order: u32) -> Result<JetMap> {
    let l1 = gamma.iter().filter_map(|g| g.valuation()).min().unwrap_or(1);
    if l1 == 0 {
        return Err(Error::InvalidCurveType("the curve must pass through the origin".into()));
    }
    let comps = gamma
        .iter()
        .map(|g| {
            let mut out = Jet::zero(2, order);
            for (e, c) in g.terms() {
                let k = e.degree();
                out.add_term(Exponent::new(&[k, 0])?, c.clone());
                if k - l1 < order {
                    out.add_term(Exponent::new(&[k - l1, 1])?, c * Rational::from_integer(k.into()));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    JetMap::new(comps)
}

/// Sum of `c·t1^a·t2^b` over `(c, a, b)`.
fn poly(order: u32, terms: &[(Rational, u32, u32)]) -> Jet {
    let mut j = Jet::zero(2, order);
    for (c, a, b) in terms {
        if a + b <= order {
            j.add_term(Exponent::new(&[*a, *b]).expect("two variables"), c.clone());
        }
    }
    j
}

fn one() -> Rational {
    Rational::one()
}

/// Tags of every catalogued normal form, their class and smallest target dimension.
pub const CATALOG: &[(&str, usize)] = &[
    ("fold", 2),
    ("cusp", 2),
    ("beaks", 2),
    ("swallowtail_base", 2),
    ("lips", 2),
    ("CE", 3),
    ("ECE", 4),
    ("FU", 3),
    ("OFU", 4),
    ("SW", 3),
    ("OSW", 4),
    ("MD", 3),
    ("OMD", 4),
    ("SB", 3),
    ("CS", 3),
    ("CL", 3),
    ("FP", 3),
];

/// The class a normal form is expected to carry.
pub fn expected_class(tag: &str) -> Result<SingularityClass> {
    use SingularityClass::*;
    Ok(match tag {
        "fold" => Fold,
        "cusp" => WhitneyCusp,
        "beaks" => BeakToBeak,
        "swallowtail_base" => SwallowtailBase,
        "lips" => LipsBase,
        "CE" => CuspidalEdge,
        "ECE" => EmbeddedCuspidalEdge,
        "FU" => FoldedUmbrella,
        "OFU" => OpenFoldedUmbrella,
        "SW" => Swallowtail,
        "OSW" => OpenSwallowtail,
        "MD" => Mond,
        "OMD" => OpenMond,
        "SB" => Shcherbak,
        "CS" => CuspidalSwallowtail,
        "CL" => CuspidalLips,
        "FP" => FoldedPleatClass,
        other => return Err(Error::UnknownNormalForm(other.to_string())),
    })
}

/// The smallest target dimension of a tag.
pub fn minimal_target(tag: &str) -> Result<usize> {
    CATALOG
        .iter()
        .find(|(t, _)| *t == tag)
        .map(|&(_, m)| m)
        .ok_or_else(|| Error::UnknownNormalForm(tag.to_string()))
}

/// The normal form of `tag`, padded with zero components up to `m`.
/// Bases and the classes living in `R^3` only accept their own dimension.
/// `FP` is the member with `c = 0`.
pub fn normal_form(tag: &str, m: usize, order: u32) -> Result<JetMap> {
    let m0 = minimal_target(tag)?;
    let open = matches!(tag, "ECE" | "OFU" | "OSW" | "OMD");
    if m < m0 || (!open && m != m0) {
        return Err(Error::Precondition(format!("normal form {tag} is not defined in dimension {m}")));
    }
    let p = |terms: &[(Rational, u32, u32)]| poly(order, terms);
    let t1 = p(&[(one(), 1, 0)]);
    let cusp = p(&[(one(), 0, 3), (one(), 1, 1)]);
    let beaks = p(&[(one(), 0, 3), (one(), 1, 2)]);
    let comps = match tag {
        "fold" => vec![t1, p(&[(one(), 0, 2)])],
        "cusp" => vec![t1, cusp],
        "beaks" => vec![t1, beaks],
        "swallowtail_base" => vec![t1, p(&[(one(), 0, 4), (one(), 1, 1)])],
        "lips" => vec![t1, p(&[(one(), 0, 3), (one(), 2, 1)])],
        "CE" | "ECE" => vec![t1, p(&[(one(), 0, 2)]), p(&[(one(), 0, 3)])],
        "FU" => vec![t1, p(&[(one(), 0, 2)]), p(&[(one(), 1, 3)])],
        "OFU" => vec![t1, p(&[(one(), 0, 2)]), p(&[(one(), 1, 3)]), p(&[(one(), 0, 5)])],
        "SW" => vec![t1, cusp, p(&[(q(3, 4), 0, 4), (q(1, 2), 1, 2)])],
        "OSW" => vec![
            t1,
            cusp,
            p(&[(q(3, 4), 0, 4), (q(1, 2), 1, 2)]),
            p(&[(q(3, 5), 0, 5), (q(1, 3), 1, 3)]),
        ],
        "MD" => vec![t1, beaks, p(&[(q(3, 4), 0, 4), (q(2, 3), 1, 3)])],
        "OMD" => vec![
            t1,
            beaks,
            p(&[(q(3, 4), 0, 4), (q(2, 3), 1, 3)]),
            p(&[(q(3, 5), 0, 5), (q(1, 2), 1, 4)]),
        ],
        "SB" => vec![t1, beaks, p(&[(q(3, 5), 0, 5), (q(1, 2), 1, 4)])],
        "CS" => vec![
            t1,
            p(&[(one(), 0, 4), (one(), 1, 1)]),
            p(&[(q(4, 5), 0, 5), (q(1, 2), 1, 2)]),
        ],
        "CL" => vec![
            t1,
            p(&[(one(), 0, 3), (one(), 2, 1)]),
            p(&[(q(3, 4), 0, 4), (q(1, 2), 2, 2)]),
        ],
        "FP" => return folded_pleat(&Rational::zero(), order),
        other => return Err(Error::UnknownNormalForm(other.to_string())),
    };
    Ok(JetMap::new(comps)?.pad_to(m))
}

/// `(t1, t2³+t1t2, ⅗t2⁵+⅓t1t2³ + c(½t2⁶+¼t1t2⁴))`.
///
/// This is the frontal member of the family; with the coefficients ½ and ¾
/// the Jacobi ideal is not principal.
pub fn folded_pleat(c: &Rational, order: u32) -> Result<JetMap> {
    let f3 = poly(
        order,
        &[
            (q(3, 5), 0, 5),
            (q(1, 3), 1, 3),
            (c * q(1, 2), 0, 6),
            (c * q(1, 4), 1, 4),
        ],
    );
    JetMap::new(vec![
        poly(order, &[(one(), 1, 0)]),
        poly(order, &[(one(), 0, 3), (one(), 1, 1)]),
        f3,
    ])
}

/// The butterfly pair `(t1, t1t2 + t2⁵ + t2⁷)` and `(t1, t1t2 + t2⁵)`.
/// J-equivalent only through a nontrivial source change, which is not
/// searched for; kept as an exploratory fixture.
pub fn butterfly_pair(order: u32) -> Result<(JetMap, JetMap)> {
    let t1 = poly(order, &[(one(), 1, 0)]);
    let f = JetMap::new(vec![t1.clone(), poly(order, &[(one(), 1, 1), (one(), 0, 5), (one(), 0, 7)])])?;
    let g = JetMap::new(vec![t1, poly(order, &[(one(), 1, 1), (one(), 0, 5)])])?;
    Ok((f, g))
}

/// The folded-pleat family with the coefficients exactly as printed.
pub fn folded_pleat_as_printed(c: &Rational, order: u32) -> Result<JetMap> {
    let f3 = poly(
        order,
        &[
            (q(3, 5), 0, 5),
            (q(1, 2), 1, 3),
            (c * q(1, 2), 0, 6),
            (c * q(3, 4), 1, 4),
        ],
    );
    JetMap::new(vec![
        poly(order, &[(one(), 1, 0)]),
        poly(order, &[(one(), 0, 3), (one(), 1, 1)]),
        f3,
    ])
}

#[derive(Clone, Copy, Debug)]
pub struct Perturbation {
    /// Highest degree of the random terms of σ and τ.
    pub degree: u32,
    /// Keep the linear parts of σ and τ equal to the identity.
    pub identity_linear: bool,
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation {
            degree: 4,
            identity_linear: false,
        }
    }
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    loop {
        let a: Matrix = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            small_rational(rng)
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        if !linalg::det(&a).is_zero() {
            return a;
        }
    }
}

/// A random diffeomorphism jet of `R^n`: invertible linear part plus random
/// terms of degree `2..=degree`.
pub fn random_diffeo(rng: &mut ChaCha8Rng, n: usize, order: u32, p: &Perturbation) -> Vec<Jet> {
    let lin = if p.identity_linear {
        linalg::identity(n)
    } else {
        random_invertible(rng, n)
    };
    let monos = crate::jetcalc::monomials_in_range(n, 2, p.degree.min(order));
    lin.iter()
        .map(|row| {
            let mut c = Jet::zero(n, order);
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    c.add_term(Exponent::unit(j), a.clone());
                }
            }
            for &e in &monos {
                if rng.gen_bool(0.3) {
                    c.add_term(e, small_rational(rng));
                }
            }
            c
        })
        .collect()
}

/// `τ∘f∘σ` for seeded random diffeomorphism jets σ and τ.
pub fn random_a_perturbation(f: &JetMap, seed: u64, degree: u32) -> Result<JetMap> {
    random_a_perturbation_with(
        f,
        seed,
        &Perturbation {
            degree,
            ..Perturbation::default()
        },
    )
}

pub fn random_a_perturbation_with(f: &JetMap, seed: u64, p: &Perturbation) -> Result<JetMap> {
    if p.degree > f.order() {
        return Err(Error::Precondition(format!(
            "perturbation degree {} exceeds the truncation order {}",
            p.degree,
            f.order()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = random_diffeo(&mut rng, f.n(), f.order(), p);
    let tau = random_diffeo(&mut rng, f.m(), f.order(), p);
    f.compose_source(&sigma)?.compose_target(&tau)
}
