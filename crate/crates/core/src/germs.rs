//! Map-germs `(R^n,0) → (R^m,0)` as tuples of jets.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::jetcalc::{invert_map, Substitution, linear_part, Exponent, Jet, Rational};
use crate::linalg::{self, Matrix};

#[derive(Clone, PartialEq, Eq)]
pub struct JetMap {
    n: usize,
    order: u32,
    comps: Vec<Jet>,
}

impl JetMap {
    pub fn new(comps: Vec<Jet>) -> Result<Self> {
        let first = comps.first().ok_or(Error::NoComponents)?;
        let (n, order) = (first.nvars(), first.order());
        for (index, c) in comps.iter().enumerate() {
            if c.nvars() != n || c.order() != order {
                return Err(crate::jetcalc::JetError::ShapeMismatch {
                    left: (n, order),
                    right: (c.nvars(), c.order()),
                }
                .into());
            }
            if !c.coeff(Exponent::zero()).is_zero() {
                return Err(Error::NonzeroConstant { index });
            }
        }
        if n > comps.len() {
            return Err(Error::DimensionOrder { n, m: comps.len() });
        }
        Ok(JetMap { n, order, comps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.comps.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn comps(&self) -> &[Jet] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Jet {
        &self.comps[i]
    }

    pub fn into_comps(self) -> Vec<Jet> {
        self.comps
    }

    /// The least reliable order among the components.
    pub fn reliable_order(&self) -> i32 {
        self.comps.iter().map(|c| c.reliable_order()).min().unwrap_or(0)
    }

    pub fn with_order(&self, order: u32) -> JetMap {
        JetMap {
            n: self.n,
            order,
            comps: self.comps.iter().map(|c| c.with_order(order)).collect(),
        }
    }

    /// The germ formed by the first `k` components.
    pub fn prefix(&self, k: usize) -> Result<JetMap> {
        JetMap::new(self.comps[..k].to_vec())
    }

    /// `f ∘ σ` for a source change `σ` given as `n` jets.
    pub fn compose_source(&self, sigma: &[Jet]) -> Result<JetMap> {
        let comps = Substitution::new(sigma)?.apply_all(&self.comps)?;
        JetMap::new(comps)
    }

    /// `τ ∘ f` for a target change `τ` given as jets in `m` variables.
    pub fn compose_target(&self, tau: &[Jet]) -> Result<JetMap> {
        let comps = Substitution::new(&self.comps)?.apply_all(tau)?;
        JetMap::new(comps)
    }

    /// Applies the linear target change `x ↦ A x`.
    pub fn apply_linear(&self, a: &Matrix) -> Result<JetMap> {
        let comps = a
            .iter()
            .map(|row| {
                let mut acc = Jet::zero(self.n, self.order);
                for (c, f) in row.iter().zip(&self.comps) {
                    if !c.is_zero() {
                        acc = &acc + &f.scale(c);
                    }
                }
                acc
            })
            .collect();
        JetMap::new(comps)
    }

    pub fn permute(&self, perm: &[usize]) -> JetMap {
        JetMap {
            n: self.n,
            order: self.order,
            comps: perm.iter().map(|&i| self.comps[i].clone()).collect(),
        }
    }

    /// Appends zero components up to target dimension `m`.
    pub fn pad_to(&self, m: usize) -> JetMap {
        let mut comps = self.comps.clone();
        while comps.len() < m {
            comps.push(Jet::zero(self.n, self.order));
        }
        JetMap { comps, ..self.clone() }
    }

    pub fn format_with(&self, names: &[String]) -> Vec<String> {
        self.comps.iter().map(|c| c.format_with(names)).collect()
    }
}

impl fmt::Debug for JetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_poly_string()).collect();
        write!(f, "JetMap[n={}, m={}, N={}]({})", self.n, self.m(), self.order, parts.join(", "))
    }
}

/// A vector field `Σ coeffs[i] ∂/∂t_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorFieldJet {
    coeffs: Vec<Jet>,
}

impl VectorFieldJet {
    pub fn new(coeffs: Vec<Jet>) -> Self {
        VectorFieldJet { coeffs }
    }

    /// The coordinate field `∂/∂t_{i+1}`.
    pub fn coordinate(nvars: usize, order: u32, i: usize) -> Self {
        let coeffs = (0..nvars)
            .map(|k| if k == i { Jet::one(nvars, order) } else { Jet::zero(nvars, order) })
            .collect();
        VectorFieldJet { coeffs }
    }

    pub fn coeffs(&self) -> &[Jet] {
        &self.coeffs
    }

    /// The derivative `η h`.
    pub fn apply(&self, h: &Jet) -> Jet {
        let mut acc = Jet::zero(h.nvars(), h.order()).with_reliable(h.reliable_order() - 1);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = &acc + &(c * &h.derive(i));
        }
        acc
    }

    /// `η^k h`.
    pub fn apply_n(&self, h: &Jet, k: u32) -> Jet {
        let mut out = h.clone();
        for _ in 0..k {
            out = self.apply(&out);
        }
        out
    }

    /// The value of the field at the origin.
    pub fn at_origin(&self) -> Vec<Rational> {
        self.coeffs.iter().map(|c| c.coeff(Exponent::zero())).collect()
    }
}

/// The `m × n` matrix of partial derivatives.
pub fn jacobi_matrix(f: &JetMap) -> Vec<Vec<Jet>> {
    f.comps
        .iter()
        .map(|c| (0..f.n).map(|j| c.derive(j)).collect())
        .collect()
}

/// The minor `D_I` for a 0-based index set `I` of size `n`.
pub fn minor(f: &JetMap, rows: &[usize]) -> Result<Jet> {
    check_index_set(f, rows)?;
    let jm = jacobi_matrix(f);
    let sub: Vec<Vec<Jet>> = rows.iter().map(|&i| jm[i].clone()).collect();
    Ok(jet_det(&sub))
}

fn check_index_set(f: &JetMap, rows: &[usize]) -> Result<()> {
    let increasing = rows.windows(2).all(|w| w[0] < w[1]);
    if rows.len() != f.n || !increasing || rows.iter().any(|&i| i >= f.m()) {
        return Err(Error::BadIndexSet(rows.to_vec()));
    }
    Ok(())
}

/// Every `n`-subset of `0..m` in lexicographic order.
pub fn index_sets(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=(m - left) {
            cur.push(i);
            rec(i + 1, m, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n <= m {
        rec(0, m, n, &mut Vec::new(), &mut out);
    }
    out
}

/// All `n`-minors keyed by index set, lexicographic order.
pub fn minors(f: &JetMap) -> Vec<(Vec<usize>, Jet)> {
    let jm = jacobi_matrix(f);
    index_sets(f.m(), f.n)
        .into_iter()
        .map(|rows| {
            let sub: Vec<Vec<Jet>> = rows.iter().map(|&i| jm[i].clone()).collect();
            let d = jet_det(&sub);
            (rows, d)
        })
        .collect()
}

/// Determinant of a square matrix of jets by cofactor expansion.
pub fn jet_det(a: &[Vec<Jet>]) -> Jet {
    let n = a.len();
    match n {
        0 => unreachable!("empty matrix"),
        1 => a[0][0].clone(),
        2 => &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0]),
        _ => {
            let mut acc: Option<Jet> = None;
            for col in 0..n {
                let sub: Vec<Vec<Jet>> = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != col)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let mut term = &a[0][col] * &jet_det(&sub);
                if col % 2 == 1 {
                    term = -&term;
                }
                acc = Some(match acc {
                    None => term,
                    Some(s) => &s + &term,
                });
            }
            acc.expect("nonempty")
        }
    }
}

pub fn corank(f: &JetMap) -> usize {
    f.n - linalg::rank(&linear_part(&f.comps))
}

/// `f` rewritten as `(s_1, …, s_{n−1}, φ_n, …, φ_m)`.
///
/// The prepared germ equals `perm(f) ∘ src_change`, where `perm` lists the
/// original component index in each slot.
#[derive(Clone, Debug)]
pub struct PreparedGerm {
    pub germ: JetMap,
    /// The source change `σ` as `n` jets in the new coordinates `s`.
    pub src_change: Vec<Jet>,
    /// Its inverse `σ⁻¹`, the new coordinates as functions of `t`.
    pub src_inverse: Vec<Jet>,
    pub tgt_permutation: Vec<usize>,
    pub tgt_linear: Matrix,
}

impl PreparedGerm {
    /// Rebuilds the input germ from the prepared form and the recorded changes.
    pub fn reconstruct(&self) -> Result<JetMap> {
        let back = self.germ.compose_source(&self.src_inverse)?;
        let lin = linalg::inverse(&self.tgt_linear)
            .ok_or_else(|| Error::Precondition("target change not invertible".into()))?;
        let unmixed = back.apply_linear(&lin)?;
        let mut comps = vec![Jet::zero(unmixed.n(), unmixed.order()); unmixed.m()];
        for (slot, &orig) in self.tgt_permutation.iter().enumerate() {
            comps[orig] = unmixed.comps[slot].clone();
        }
        JetMap::new(comps)
    }
}

pub fn prepare(f: &JetMap) -> Result<PreparedGerm> {
    let k = corank(f);
    if k != 1 {
        return Err(Error::Corank(k));
    }
    let n = f.n;
    let lin = linear_part(&f.comps);

    // Greedy pivot rows in component order.
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Matrix = Vec::new();
    for (i, row) in lin.iter().enumerate() {
        if chosen.len() == n - 1 {
            break;
        }
        let mut trial = basis.clone();
        trial.push(row.clone());
        if linalg::rank(&trial) == trial.len() {
            basis = trial;
            chosen.push(i);
        }
    }
    let mut perm = chosen.clone();
    perm.extend((0..f.m()).filter(|i| !chosen.contains(i)));
    let permuted = f.permute(&perm);

    // ψ = (f_1, …, f_{n−1}, t_j) with the first j making ψ invertible.
    let mut psi: Option<Vec<Jet>> = None;
    for j in 0..n {
        let mut cand: Vec<Jet> = permuted.comps[..n - 1].to_vec();
        cand.push(Jet::var(n, f.order, j));
        if !linalg::det(&linear_part(&cand)).is_zero() {
            psi = Some(cand);
            break;
        }
    }
    let psi = psi.expect("corank one leaves a complementary coordinate");
    let sigma = invert_map(&psi)?;
    let mut germ = permuted.compose_source(&sigma)?;
    // The first n−1 components are s_i up to truncation noise; make them exact.
    for i in 0..n - 1 {
        germ.comps[i] = Jet::var(n, f.order, i).with_reliable(germ.comps[i].reliable_order());
    }
    Ok(PreparedGerm {
        germ,
        src_change: sigma,
        src_inverse: psi,
        tgt_permutation: perm,
        tgt_linear: linalg::identity(f.m()),
    })
}

/// The identity map germ on `n` variables.
pub fn identity_map(n: usize, order: u32) -> JetMap {
    JetMap::new((0..n).map(|i| Jet::var(n, order, i)).collect()).expect("identity is a germ")
}

/// `Σ_j a_j x_j` for a rational row.
pub fn linear_form(row: &[Rational], nvars: usize, order: u32) -> Jet {
    let mut acc = Jet::zero(nvars, order);
    for (j, c) in row.iter().enumerate() {
        if !c.is_zero() {
            acc = &acc + &Jet::var(nvars, order, j).scale(c);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcalc::q;

    fn t(order: u32) -> (Jet, Jet) {
        (Jet::var(2, order, 0), Jet::var(2, order, 1))
    }

    // source coordinates ordered (u, t)
    fn mond(order: u32) -> JetMap {
        let (u, t) = t(order);
        JetMap::new(vec![
            &t + &u,
            &t.pow(3) + &(&t.pow(2) * &u).scale(&q(3, 1)),
            &t.pow(4) + &(&t.pow(3) * &u).scale(&q(4, 1)),
        ])
        .unwrap()
    }

    #[test]
    fn mond_minors() {
        let f = mond(12);
        let (u, t) = t(12);
        assert_eq!(minor(&f, &[0, 1]).unwrap(), (&t * &u).scale(&q(6, 1)));
        assert_eq!(minor(&f, &[0, 2]).unwrap(), (&t.pow(2) * &u).scale(&q(12, 1)));
        assert_eq!(minor(&f, &[1, 2]).unwrap(), (&t.pow(4) * &u).scale(&q(12, 1)));
        assert!(minor(&f, &[0]).is_err());
        assert!(minor(&f, &[1, 0]).is_err());
    }

    #[test]
    fn identity_minor_and_coranks() {
        assert_eq!(minor(&identity_map(2, 6), &[0, 1]).unwrap(), Jet::one(2, 6));
        let (t1, t2) = t(6);
        let z = Jet::zero(2, 6);
        assert_eq!(corank(&JetMap::new(vec![t1.clone(), t2.clone(), z]).unwrap()), 0);
        assert_eq!(corank(&JetMap::new(vec![t1.clone(), t2.pow(2), t2.pow(3)]).unwrap()), 1);
        let c2 = JetMap::new(vec![t1.pow(2), t2.pow(2), &t1 * &t2]).unwrap();
        assert_eq!(corank(&c2), 2);
        assert_eq!(prepare(&c2).unwrap_err(), Error::Corank(2));
    }

    #[test]
    fn prepare_swaps_targets() {
        let (t1, t2) = t(8);
        let f = JetMap::new(vec![t2.pow(2), t1.clone(), t2.pow(3)]).unwrap();
        let p = prepare(&f).unwrap();
        assert_eq!(p.tgt_permutation, vec![1, 0, 2]);
        assert_eq!(p.germ.comps(), &[t1.clone(), t2.pow(2), t2.pow(3)]);
        assert_eq!(p.src_change, vec![t1, t2]);
    }

    #[test]
    fn prepare_round_trip() {
        let (t1, t2) = t(8);
        let f = JetMap::new(vec![&t1 + &t1.pow(2), &t2.pow(3) + &(&t1 * &t2)]).unwrap();
        let p = prepare(&f).unwrap();
        assert_eq!(p.germ.comp(0), &t1);
        assert_eq!(p.reconstruct().unwrap(), f);
        // φ2 = s2^3 + (s1 − s1^2 + …) s2
        let phi = p.germ.comp(1);
        assert_eq!(phi.coeff(Exponent::new(&[0, 3]).unwrap()), q(1, 1));
        assert_eq!(phi.coeff(Exponent::new(&[1, 1]).unwrap()), q(1, 1));
        assert_eq!(phi.coeff(Exponent::new(&[2, 1]).unwrap()), q(-1, 1));
    }

    #[test]
    fn vector_field_powers() {
        let (t1, t2) = t(8);
        let eta = VectorFieldJet::coordinate(2, 8, 1);
        let h = &t2.pow(3) + &(&t1 * &t2);
        assert_eq!(eta.apply(&h), &t2.pow(2).scale(&q(3, 1)) + &t1);
        assert_eq!(eta.apply_n(&h, 3), Jet::constant(2, 8, q(6, 1)));
    }
}
