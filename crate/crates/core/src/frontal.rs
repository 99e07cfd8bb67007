//! Frontality, the Jacobian λ, Plücker coefficients, adapted coordinates and
//! the kernel field.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::germs::{corank, jacobi_matrix, minors, prepare, JetMap, PreparedGerm, VectorFieldJet};
use crate::jetcalc::{compose, divide, BeyondReliable, DivideError, Exponent, Jet, Rational};
use crate::linalg::{self, Matrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FrontalStatus {
    ProperFrontal,
    DegenerateJacobiIdeal,
    /// `D_offending` is not a multiple of `D_generator`.
    NotFrontalWitness {
        generator: Vec<usize>,
        offending: Vec<usize>,
        degree: u32,
    },
    InconclusiveAtOrder { order: i32 },
}

impl fmt::Display for FrontalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrontalStatus::ProperFrontal => write!(f, "ProperFrontal"),
            FrontalStatus::DegenerateJacobiIdeal => write!(f, "DegenerateJacobiIdeal"),
            FrontalStatus::NotFrontalWitness {
                generator,
                offending,
                degree,
            } => write!(
                f,
                "NotFrontalWitness(D{} does not divide D{} at degree {degree})",
                one_based(generator),
                one_based(offending)
            ),
            FrontalStatus::InconclusiveAtOrder { order } => {
                write!(f, "InconclusiveAtOrder({order})")
            }
        }
    }
}

/// Renders a 0-based index set as the 1-based subscript `{1,3}`.
pub fn one_based(set: &[usize]) -> String {
    let parts: Vec<String> = set.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// A linear target change `x ↦ matrix · P x` where `P` moves component
/// `perm[k]` into slot `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetChange {
    pub perm: Vec<usize>,
    pub matrix: Matrix,
}

impl TargetChange {
    pub fn apply(&self, f: &JetMap) -> Result<JetMap> {
        f.permute(&self.perm).apply_linear(&self.matrix)
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(k, &p)| k == p)
            && self.matrix == linalg::identity(self.perm.len())
    }
}

#[derive(Clone, Debug)]
pub struct FrontalData {
    pub status: FrontalStatus,
    pub minors: Vec<(Vec<usize>, Jet)>,
    pub lambda: Option<Jet>,
    pub generator_index: Option<Vec<usize>>,
    /// `h_I` with `D_I = h_I λ`, keyed by sorted 0-based index set.
    pub pluecker: BTreeMap<Vec<usize>, Jet>,
    pub kernel: Option<VectorFieldJet>,
    pub adapted: Option<TargetChange>,
}

impl FrontalData {
    pub fn is_proper(&self) -> bool {
        self.status == FrontalStatus::ProperFrontal
    }

    pub fn lambda(&self) -> Result<&Jet> {
        self.lambda
            .as_ref()
            .filter(|_| self.is_proper())
            .ok_or_else(|| Error::NotProperFrontal(self.status.to_string()))
    }
}

pub fn frontality(f: &JetMap) -> Result<FrontalData> {
    let mut data = frontality_core(f)?;
    if data.is_proper() && corank(f) == 1 {
        if let Ok(p) = prepare(f) {
            data.kernel = kernel_field(f, &p).ok();
        }
    }
    Ok(data)
}

/// Frontality without the kernel field.
pub(crate) fn frontality_core(f: &JetMap) -> Result<FrontalData> {
    let all = minors(f);
    let mut data = FrontalData {
        status: FrontalStatus::DegenerateJacobiIdeal,
        minors: all.clone(),
        lambda: None,
        generator_index: None,
        pluecker: BTreeMap::new(),
        kernel: None,
        adapted: None,
    };

    // Least valuation, then the first index set.
    let mut best: Option<(u32, usize)> = None;
    for (k, (_, d)) in all.iter().enumerate() {
        if let Some(v) = d.valuation() {
            if best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, k));
            }
        }
    }
    let Some((v, k0)) = best else {
        let rel = all.iter().map(|(_, d)| d.reliable_order()).min().unwrap_or(0);
        data.status = if rel >= 0 {
            FrontalStatus::DegenerateJacobiIdeal
        } else {
            FrontalStatus::InconclusiveAtOrder { order: rel }
        };
        return Ok(data);
    };
    let (i0, lambda) = all[k0].clone();
    // A minor whose unknown part could undercut the chosen valuation.
    if let Some(rel) = all
        .iter()
        .map(|(_, d)| d.reliable_order())
        .find(|&r| r < v as i32)
    {
        data.status = FrontalStatus::InconclusiveAtOrder { order: rel };
        return Ok(data);
    }

    data.generator_index = Some(i0.clone());
    data.lambda = Some(lambda.clone());
    for (set, d) in &all {
        if *set == i0 {
            data.pluecker.insert(set.clone(), Jet::one(f.n(), f.order()));
            continue;
        }
        match divide(d, &lambda) {
            Ok(h) => {
                data.pluecker.insert(set.clone(), h);
            }
            Err(DivideError::NotDivisible { degree }) => {
                data.status = FrontalStatus::NotFrontalWitness {
                    generator: i0,
                    offending: set.clone(),
                    degree,
                };
                return Ok(data);
            }
            Err(_) => {
                data.status = FrontalStatus::InconclusiveAtOrder {
                    order: lambda.reliable_order(),
                };
                return Ok(data);
            }
        }
    }
    data.status = FrontalStatus::ProperFrontal;
    data.adapted = adapting_change(f, &data).ok();
    Ok(data)
}

/// `∂/∂s_n` of the prepared coordinates, pushed back to the coordinates of `f`.
pub fn kernel_field(f: &JetMap, prepared: &PreparedGerm) -> Result<VectorFieldJet> {
    let k = corank(f);
    if k != 1 {
        return Err(Error::Corank(k));
    }
    let n = f.n();
    let coeffs = prepared
        .src_change
        .iter()
        .map(|s| compose(&s.derive(n - 1), &prepared.src_inverse))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(VectorFieldJet::new(coeffs))
}

/// Checks `η f_i ∈ (λ)` for every component; `None` when a division is
/// undetermined at the available order.
pub fn kernel_membership(f: &JetMap, lambda: &Jet, eta: &VectorFieldJet) -> Option<bool> {
    for c in f.comps() {
        match divide(&eta.apply(c), lambda) {
            Ok(_) => {}
            Err(DivideError::NotDivisible { .. }) => return Some(false),
            Err(_) => return None,
        }
    }
    Some(true)
}

/// The coefficients `h_ij` of `df_i = Σ_j h_ij df_{I0[j]}` for `i ∉ I0`,
/// as rows indexed by the components outside `I0` in increasing order.
pub fn legendre_coefficients(f: &JetMap, fd: &FrontalData) -> Result<Vec<(usize, Vec<Jet>)>> {
    let i0 = fd
        .generator_index
        .clone()
        .filter(|_| fd.is_proper())
        .ok_or_else(|| Error::NotProperFrontal(fd.status.to_string()))?;
    let mut rows = Vec::new();
    for i in (0..f.m()).filter(|i| !i0.contains(i)) {
        let mut hs = Vec::with_capacity(f.n());
        for p in 0..f.n() {
            let mut set = i0.clone();
            set[p] = i;
            let sign = sort_sign(&mut set);
            let h = fd
                .pluecker
                .get(&set)
                .ok_or_else(|| Error::Precondition("missing Plücker coefficient".into()))?;
            hs.push(if sign { h.clone() } else { -h });
        }
        rows.push((i, hs));
    }
    Ok(rows)
}

/// Sorts in place; returns true for an even permutation.
fn sort_sign(set: &mut [usize]) -> bool {
    let mut even = true;
    for i in 0..set.len() {
        for j in 0..set.len() - 1 - i {
            if set[j] > set[j + 1] {
                set.swap(j, j + 1);
                even = !even;
            }
        }
    }
    even
}

/// The linear target change putting `f` in adapted coordinates: `I0` moved
/// to the front, then `x̃_i = x_i − Σ_{j ≤ n} h_ij(0) x_j` for `i > n`.
pub fn adapting_change(f: &JetMap, fd: &FrontalData) -> Result<TargetChange> {
    let m = f.m();
    let n = f.n();
    if m == n {
        return Ok(TargetChange {
            perm: (0..m).collect(),
            matrix: linalg::identity(m),
        });
    }
    let i0 = fd.generator_index.clone().unwrap_or_default();
    let rows = legendre_coefficients(f, fd)?;
    let mut perm = i0.clone();
    perm.extend(rows.iter().map(|(i, _)| *i));
    let mut matrix = linalg::identity(m);
    for (slot, (_, hs)) in rows.iter().enumerate() {
        for (j, h) in hs.iter().enumerate() {
            let v = h.value_at_origin().map_err(|e| unresolved(e, "h_ij(0)"))?;
            matrix[n + slot][j] = -v;
        }
    }
    Ok(TargetChange { perm, matrix })
}

fn unresolved(e: BeyondReliable, what: &str) -> Error {
    Error::Precondition(format!(
        "{what} needs degree {} but the jets are reliable only to {}",
        e.degree, e.reliable
    ))
}

/// `f` in adapted target coordinates.
pub fn adapt_target(f: &JetMap, fd: &FrontalData) -> Result<JetMap> {
    if f.m() != f.n() && !fd.is_proper() {
        return Err(Error::NotProperFrontal(fd.status.to_string()));
    }
    let k = corank(f);
    if k > 1 {
        return Err(Error::Corank(k));
    }
    adapting_change(f, fd)?.apply(f)
}

/// Whether the Legendre lift `(f, h_ij)` is immersive at the origin.
pub fn is_front(f: &JetMap, fd: &FrontalData) -> Result<bool> {
    let n = f.n();
    let mut rows: Matrix = Vec::new();
    for c in f.comps() {
        rows.push(linear_coefficients(c)?);
    }
    if f.m() > n {
        for (_, hs) in legendre_coefficients(f, fd)? {
            for h in hs {
                rows.push(linear_coefficients(&h)?);
            }
        }
    }
    Ok(linalg::rank(&rows) == n)
}

fn linear_coefficients(h: &Jet) -> Result<Vec<Rational>> {
    (0..h.nvars())
        .map(|j| {
            h.reliable_coeff(Exponent::unit(j))
                .map_err(|e| unresolved(e, "lift differential"))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KTag {
    Unit,
    Regular,
    MorseIndefinite,
    MorseDefinite,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KClass {
    pub tag: KTag,
    pub hessian_det: Option<Rational>,
}

/// The contact class of a function-germ on the plane, through its 2-jet.
pub fn kclass_of_lambda(lambda: &Jet) -> Result<KClass> {
    if lambda.nvars() != 2 {
        return Err(crate::jetcalc::JetError::WrongVariableCount {
            expected: 2,
            found: lambda.nvars(),
        }
        .into());
    }
    let c = |p: &[u32]| {
        lambda
            .reliable_coeff(Exponent::new(p).expect("small exponent"))
            .map_err(|e| unresolved(e, "Jacobian jet"))
    };
    if !c(&[0, 0])?.is_zero() {
        return Ok(KClass {
            tag: KTag::Unit,
            hessian_det: None,
        });
    }
    if !c(&[1, 0])?.is_zero() || !c(&[0, 1])?.is_zero() {
        return Ok(KClass {
            tag: KTag::Regular,
            hessian_det: None,
        });
    }
    let h = hessian(lambda).map_err(|e| unresolved(e, "Hessian"))?;
    let d = linalg::det(&h);
    let tag = if d.is_zero() {
        KTag::Degenerate
    } else if d < Rational::zero() {
        KTag::MorseIndefinite
    } else {
        KTag::MorseDefinite
    };
    Ok(KClass {
        tag,
        hessian_det: Some(d),
    })
}

/// The Hessian matrix at the origin of a function on the plane.
pub fn hessian(lambda: &Jet) -> std::result::Result<Matrix, BeyondReliable> {
    let two = Rational::one() + Rational::one();
    let a = lambda.reliable_coeff(Exponent::new(&[2, 0]).expect("small"))?;
    let b = lambda.reliable_coeff(Exponent::new(&[1, 1]).expect("small"))?;
    let c = lambda.reliable_coeff(Exponent::new(&[0, 2]).expect("small"))?;
    Ok(vec![vec![&two * a, b.clone()], vec![b, &two * c]])
}

/// The Jacobian matrix of the combined lift, exposed for diagnostics.
pub fn lift_jacobi(f: &JetMap, fd: &FrontalData) -> Result<Vec<Vec<Jet>>> {
    let mut out = jacobi_matrix(f);
    for (_, hs) in legendre_coefficients(f, fd)? {
        for h in hs {
            out.push((0..f.n()).map(|j| h.derive(j)).collect());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcalc::q;

    fn tt(order: u32) -> (Jet, Jet) {
        (Jet::var(2, order, 0), Jet::var(2, order, 1))
    }

    fn map(comps: Vec<Jet>) -> JetMap {
        JetMap::new(comps).unwrap()
    }

    #[test]
    fn mond_surface_frontality() {
        let (u, t) = tt(12);
        let f = map(vec![
            &t + &u,
            &t.pow(3) + &(&t.pow(2) * &u).scale(&q(3, 1)),
            &t.pow(4) + &(&t.pow(3) * &u).scale(&q(4, 1)),
        ]);
        let fd = frontality(&f).unwrap();
        assert_eq!(fd.status, FrontalStatus::ProperFrontal);
        assert_eq!(fd.generator_index, Some(vec![0, 1]));
        assert_eq!(fd.lambda, Some((&t * &u).scale(&q(6, 1))));
        assert_eq!(fd.pluecker[&vec![0, 1]], Jet::one(2, 12));
        assert_eq!(fd.pluecker[&vec![0, 2]], t.scale(&q(2, 1)));
        assert_eq!(fd.pluecker[&vec![1, 2]], t.pow(3).scale(&q(2, 1)));
        assert!(fd.adapted.as_ref().unwrap().is_identity());
        assert_eq!(adapt_target(&f, &fd).unwrap(), f);
    }

    #[test]
    fn cone_is_degenerate() {
        let v: Vec<Jet> = (0..3).map(|i| Jet::var(3, 12, i)).collect();
        let f = map(vec![
            v[0].pow(3),
            &v[0].pow(2) * &v[1],
            &v[0] * &v[1].pow(2),
            v[1].pow(3),
        ]);
        let fd = frontality(&f).unwrap();
        assert_eq!(fd.status, FrontalStatus::DegenerateJacobiIdeal);
        assert!(fd.lambda().is_err());
    }

    #[test]
    fn fold_jacobian() {
        let (t1, t2) = tt(8);
        let f = map(vec![t1.clone(), t2.pow(2)]);
        let fd = frontality(&f).unwrap();
        assert!(fd.is_proper());
        assert_eq!(fd.lambda, Some(t2.scale(&q(2, 1))));
        assert_eq!(fd.kernel.unwrap(), VectorFieldJet::coordinate(2, 8, 1));
    }

    #[test]
    fn non_principal_witness() {
        // minors 2t2, t1, -2t2^2: the ideal (t1, t2) is not principal
        let (t1, t2) = tt(6);
        let f = map(vec![t1.clone(), t2.pow(2), &t1 * &t2]);
        let fd = frontality(&f).unwrap();
        match fd.status {
            FrontalStatus::NotFrontalWitness { generator, offending, degree } => {
                assert_eq!(generator, vec![0, 1]);
                assert_eq!(offending, vec![0, 2]);
                assert_eq!(degree, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn adapting_hand_example() {
        let (t1, t2) = tt(10);
        let f = map(vec![t1.clone(), t2.pow(2), &t2.pow(2) + &t2.pow(3)]);
        let fd = frontality(&f).unwrap();
        let h = legendre_coefficients(&f, &fd).unwrap();
        assert_eq!(h[0].1[1], &Jet::one(2, 10) + &t2.scale(&q(3, 2)));
        let g = adapt_target(&f, &fd).unwrap();
        assert_eq!(g, map(vec![t1.clone(), t2.pow(2), t2.pow(3)]));
        let gd = frontality(&g).unwrap();
        for (_, hs) in legendre_coefficients(&g, &gd).unwrap() {
            assert!(hs.iter().all(|h| h.value_at_origin().unwrap().is_zero()));
        }
    }

    #[test]
    fn kernel_after_swap() {
        let (t1, t2) = tt(8);
        let f = map(vec![t2.pow(2), t1.clone(), t2.pow(3)]);
        let fd = frontality(&f).unwrap();
        let eta = fd.kernel.unwrap();
        assert_eq!(eta, VectorFieldJet::coordinate(2, 8, 1));
        assert_eq!(kernel_membership(&f, fd.lambda.as_ref().unwrap(), &eta), Some(true));
    }

    #[test]
    fn fronts_and_non_fronts() {
        let (t1, t2) = tt(10);
        let ce = map(vec![t1.clone(), t2.pow(2), t2.pow(3)]);
        assert!(is_front(&ce, &frontality(&ce).unwrap()).unwrap());
        let fu = map(vec![t1.clone(), t2.pow(2), &t1 * &t2.pow(3)]);
        assert!(!is_front(&fu, &frontality(&fu).unwrap()).unwrap());
        let imm = map(vec![t1.clone(), t2.clone(), Jet::zero(2, 10)]);
        assert!(is_front(&imm, &frontality(&imm).unwrap()).unwrap());
    }

    #[test]
    fn k_classes() {
        let (t1, t2) = tt(6);
        let cusp = &t2.pow(2).scale(&q(3, 1)) + &t1;
        assert_eq!(kclass_of_lambda(&cusp).unwrap().tag, KTag::Regular);
        let btb = &t2.pow(2).scale(&q(3, 1)) + &(&t1 * &t2).scale(&q(2, 1));
        let k = kclass_of_lambda(&btb).unwrap();
        assert_eq!(k.tag, KTag::MorseIndefinite);
        assert_eq!(k.hessian_det, Some(q(-4, 1)));
        let lips = &t1.pow(2) + &t2.pow(2);
        assert_eq!(kclass_of_lambda(&lips).unwrap().tag, KTag::MorseDefinite);
        assert_eq!(kclass_of_lambda(&Jet::one(2, 6)).unwrap().tag, KTag::Unit);
        assert_eq!(kclass_of_lambda(&t1.pow(3)).unwrap().tag, KTag::Degenerate);
    }
}
