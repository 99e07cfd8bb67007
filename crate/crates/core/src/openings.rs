//! Jacobi modules, ramification modules and openings on truncated coefficient spaces.
//!
//! Every answer here is order-qualified: a statement about truncations of
//! the modules, never about the germs themselves.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::germs::JetMap;
use crate::jetcalc::{monomials_in_range, Exponent, FormJet, Jet, Rational};
use crate::linalg::Matrix;

pub type SparseVec = BTreeMap<usize, Rational>;

/// A coefficient space: `components` copies of the jets of degree `≤ max_degree`
/// in `nvars` variables. One copy models functions, `nvars` copies model 1-forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambient {
    nvars: usize,
    components: usize,
    max_degree: u32,
    monos: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
}

impl Ambient {
    fn new(nvars: usize, components: usize, max_degree: u32) -> Self {
        let monos = monomials_in_range(nvars, 0, max_degree);
        let index = monos.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        Ambient {
            nvars,
            components,
            max_degree,
            monos,
            index,
        }
    }

    pub fn functions(nvars: usize, max_degree: u32) -> Self {
        Ambient::new(nvars, 1, max_degree)
    }

    pub fn forms(nvars: usize, max_degree: u32) -> Self {
        Ambient::new(nvars, nvars, max_degree)
    }

    pub fn dim(&self) -> usize {
        self.components * self.monos.len()
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    fn coord(&self, comp: usize, e: Exponent) -> Option<usize> {
        self.index.get(&e).map(|i| comp * self.monos.len() + i)
    }

    /// Coefficients of `u·h` in component `comp`, truncated to the space.
    fn shifted(&self, out: &mut SparseVec, comp: usize, h: &Jet, u: Exponent, scale: &Rational) {
        for (e, c) in h.terms() {
            let Some(p) = e.checked_mul(u) else { continue };
            if let Some(k) = self.coord(comp, p) {
                let slot = out.entry(k).or_insert_with(Rational::zero);
                *slot += c * scale;
                if slot.is_zero() {
                    out.remove(&k);
                }
            }
        }
    }

    pub fn jet_vector(&self, h: &Jet) -> SparseVec {
        let mut v = SparseVec::new();
        self.shifted(&mut v, 0, h, Exponent::zero(), &Rational::one());
        v
    }

    pub fn form_vector(&self, w: &FormJet) -> SparseVec {
        let mut v = SparseVec::new();
        for (i, c) in w.coeffs().iter().enumerate() {
            self.shifted(&mut v, i, c, Exponent::zero(), &Rational::one());
        }
        v
    }

    /// Reads a function vector back as a jet of the given order.
    pub fn to_jet(&self, v: &SparseVec, order: u32) -> Jet {
        let mut h = Jet::zero(self.nvars, order);
        for (k, c) in v {
            h.add_term(self.monos[k % self.monos.len()], c.clone());
        }
        h
    }
}

/// A row echelon basis kept fully reduced, optionally remembering each
/// row as a combination of the inserted vectors.
#[derive(Clone, Debug, Default)]
struct Echelon {
    rows: Vec<(usize, SparseVec, SparseVec)>,
}

fn axpy(y: &mut SparseVec, a: &Rational, x: &SparseVec) {
    for (k, c) in x {
        let slot = y.entry(*k).or_insert_with(Rational::zero);
        *slot -= a * c;
        if slot.is_zero() {
            y.remove(k);
        }
    }
}

impl Echelon {
    /// Reduces `v` (tracked by `combo`) against the rows.
    fn reduce(&self, v: &mut SparseVec, combo: &mut SparseVec) {
        for (p, row, rc) in &self.rows {
            if let Some(a) = v.get(p).cloned() {
                axpy(v, &a, row);
                axpy(combo, &a, rc);
            }
        }
    }

    /// Inserts `v`. Returns `None` when it grew the span, otherwise the
    /// relation among the inserted vectors exhibiting the dependence.
    fn insert(&mut self, mut v: SparseVec, mut combo: SparseVec) -> Option<SparseVec> {
        self.reduce(&mut v, &mut combo);
        let (&p, lead) = match v.iter().next() {
            Some(x) => x,
            None => return Some(combo),
        };
        let inv = lead.recip();
        for c in v.values_mut() {
            *c *= &inv;
        }
        for c in combo.values_mut() {
            *c *= &inv;
        }
        for (_, row, rc) in self.rows.iter_mut() {
            if let Some(a) = row.get(&p).cloned() {
                axpy(row, &a, &v);
                axpy(rc, &a, &combo);
            }
        }
        let at = self.rows.partition_point(|(q, _, _)| *q < p);
        self.rows.insert(at, (p, v, combo));
        None
    }
}

/// A subspace of an [`Ambient`] space in canonical reduced echelon form.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: Ambient,
    basis: Echelon,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient
            && self.basis.rows.len() == other.basis.rows.len()
            && self
                .basis
                .rows
                .iter()
                .zip(&other.basis.rows)
                .all(|(a, b)| a.0 == b.0 && a.1 == b.1)
    }
}

impl Subspace {
    pub fn zero(ambient: Ambient) -> Self {
        Subspace {
            ambient,
            basis: Echelon::default(),
        }
    }

    pub fn span(ambient: Ambient, vectors: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut s = Subspace::zero(ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    /// Returns whether the span grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        self.basis.insert(v, SparseVec::new()).is_none()
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.rows.iter().map(|r| r.0).collect()
    }

    pub fn basis(&self) -> Vec<SparseVec> {
        self.basis.rows.iter().map(|r| r.1.clone()).collect()
    }

    /// The basis as a dense matrix, one row per vector.
    pub fn basis_matrix(&self) -> Matrix {
        self.basis
            .rows
            .iter()
            .map(|(_, r, _)| {
                let mut row = vec![Rational::zero(); self.ambient.dim()];
                for (k, c) in r {
                    row[*k] = c.clone();
                }
                row
            })
            .collect()
    }

    /// The remainder of `v` after reduction against the basis.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        self.basis.reduce(&mut v, &mut SparseVec::new());
        v
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    pub fn contains_jet(&self, h: &Jet) -> bool {
        self.contains(&self.ambient.jet_vector(h))
    }

    pub fn contains_form(&self, w: &FormJet) -> bool {
        self.contains(&self.ambient.form_vector(w))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.rows.iter().all(|(_, r, _)| other.contains(r))
    }

    /// Basis vectors read as jets; only meaningful for function spaces.
    pub fn basis_jets(&self, order: u32) -> Vec<Jet> {
        self.basis.rows.iter().map(|(_, r, _)| self.ambient.to_jet(r, order)).collect()
    }
}

fn check_order(f: &JetMap, order: u32) -> Result<()> {
    if order == 0 || (order as i32) > f.reliable_order() {
        return Err(Error::Precondition(format!(
            "order {order} exceeds the reliable order {} of the germ",
            f.reliable_order()
        )));
    }
    Ok(())
}

/// `𝒥_f` truncated to 1-forms with coefficients of degree `≤ order − 1`:
/// the span of `u·df_j` over monomials `u`.
pub fn jacobi_module(f: &JetMap, order: u32) -> Result<Subspace> {
    check_order(f, order)?;
    let amb = Ambient::forms(f.n(), order - 1);
    let diffs: Vec<FormJet> = f.comps().iter().map(FormJet::d).collect();
    let monos = monomials_in_range(f.n(), 0, order - 1);
    let mut s = Subspace::zero(amb);
    for u in &monos {
        for w in &diffs {
            let mut v = SparseVec::new();
            for (i, c) in w.coeffs().iter().enumerate() {
                s.ambient.shifted(&mut v, i, c, *u, &Rational::one());
            }
            s.insert(v);
        }
    }
    Ok(s)
}

/// Jets `h` of degree `1..=order` without constant term such that
/// `dh ∈ 𝒥_g` modulo forms of degree `≥ order`.
pub fn ramification_jets(g: &JetMap, order: u32) -> Result<Subspace> {
    let jm = jacobi_module(g, order)?;
    let fun = Ambient::functions(g.n(), order);
    let mut relations = Echelon::default();
    let mut kernel = Subspace::zero(fun.clone());
    for e in monomials_in_range(g.n(), 1, order) {
        let h = Jet::monomial(g.n(), order, e, Rational::one());
        let rem = jm.reduce(&jm.ambient.form_vector(&FormJet::d(&h)));
        let mut combo = SparseVec::new();
        combo.insert(fun.coord(0, e).expect("monomial in range"), Rational::one());
        if let Some(rel) = relations.insert(rem, combo) {
            kernel.insert(rel);
        }
    }
    Ok(kernel)
}

fn check_prefix(f: &JetMap, g: &JetMap) -> Result<()> {
    if f.n() != g.n() || f.order() != g.order() || g.m() > f.m() || f.comps()[..g.m()] != *g.comps() {
        return Err(Error::Precondition("the first components of f must be the components of g".into()));
    }
    Ok(())
}

/// Whether every extra component of `f` has its differential in `𝒥_g`.
pub fn is_opening(f: &JetMap, g: &JetMap, order: u32) -> Result<bool> {
    check_prefix(f, g)?;
    let jm = jacobi_module(g, order)?;
    Ok(f.comps()[g.m()..].iter().all(|h| jm.contains_form(&FormJet::d(h))))
}

/// The versality verdict with the order it refers to.
#[derive(Clone, Debug, PartialEq)]
pub struct Versality {
    pub versal: bool,
    /// The working order `N' = N − max valuation of the components of g`.
    pub order: u32,
    /// A ramification jet not generated by `1` and the extra components.
    pub missing: Option<Jet>,
}

/// Checks that `ℛ_g` is generated over `g*` by `1, f_{n+1}, …, f_m` at the
/// working order `N'`.
pub fn is_versal_opening(f: &JetMap, g: &JetMap, order: u32) -> Result<Versality> {
    check_prefix(f, g)?;
    check_order(f, order)?;
    let vmax = g.comps().iter().filter_map(|c| c.valuation()).max().unwrap_or(0);
    if vmax == 0 || vmax >= order {
        return Err(Error::Precondition("g must have components vanishing to order below N".into()));
    }
    let np = order - vmax;
    let r = ramification_jets(g, np)?;

    // Span of g*(x^a)·k with k in {1, f_{n+1}, …} inside the functions of degree ≤ N'.
    let fun = Ambient::functions(f.n(), np);
    let extras: Vec<Jet> = std::iter::once(Jet::one(f.n(), order))
        .chain(f.comps()[g.m()..].iter().cloned())
        .collect();
    let vals: Vec<u32> = g.comps().iter().map(|c| c.valuation().unwrap_or(np + 1)).collect();
    let mut pulled: HashMap<Exponent, Jet> = HashMap::new();
    pulled.insert(Exponent::zero(), Jet::one(f.n(), order));
    let mut w = Subspace::zero(fun);
    for a in monomials_in_range(g.m(), 0, np) {
        let weight: u32 = (0..g.m()).map(|i| a.power(i) * vals[i]).sum();
        if weight > np {
            continue;
        }
        let img = pullback(a, g, &mut pulled);
        for k in &extras {
            w.insert(w.ambient.jet_vector(&(&img * k)));
        }
    }
    let missing = r
        .basis
        .rows
        .iter()
        .find(|(_, v, _)| !w.contains(v))
        .map(|(_, v, _)| r.ambient.to_jet(v, order));
    Ok(Versality {
        versal: missing.is_none(),
        order: np,
        missing,
    })
}

fn pullback(a: Exponent, g: &JetMap, cache: &mut HashMap<Exponent, Jet>) -> Jet {
    if let Some(j) = cache.get(&a) {
        return j.clone();
    }
    let i = (0..g.m()).rev().find(|&i| a.power(i) > 0).expect("nonzero exponent");
    let prev = pullback(a.lower(i).expect("positive power"), g, cache);
    let out = &prev * g.comp(i);
    cache.insert(a, out.clone());
    out
}

/// Witnesses of `J(f') = P J(f)` and `J(f) = Q J(f')`, or the first obstruction.
#[derive(Clone, Debug, PartialEq)]
pub enum JModuleComparison {
    Equal {
        /// `m' × m` multipliers with `df'_i = Σ_j P_ij df_j`.
        p: Vec<Vec<Jet>>,
        /// `m × m'` multipliers with `df_i = Σ_j Q_ij df'_j`.
        q: Vec<Vec<Jet>>,
        order: u32,
    },
    Differ {
        /// `"f' over f"` or `"f over f'"`.
        direction: String,
        /// The component (0-based) whose differential is not in the other module.
        component: usize,
        order: u32,
    },
}

impl JModuleComparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, JModuleComparison::Equal { .. })
    }
}

/// Solves `dh_i = Σ_j M_ij dk_j` for every `h_i`, multipliers of degree `≤ order − 1`.
/// Constant multipliers are tried first, so equal inputs give the identity.
fn multipliers(h: &JetMap, k: &JetMap, order: u32) -> std::result::Result<Vec<Vec<Jet>>, usize> {
    let amb = Ambient::forms(k.n(), order - 1);
    let monos = monomials_in_range(k.n(), 0, order - 1);
    let diffs: Vec<FormJet> = k.comps().iter().map(FormJet::d).collect();
    let mut ech = Echelon::default();
    for (ui, u) in monos.iter().enumerate() {
        for (j, w) in diffs.iter().enumerate() {
            let mut v = SparseVec::new();
            for (i, c) in w.coeffs().iter().enumerate() {
                amb.shifted(&mut v, i, c, *u, &Rational::one());
            }
            let mut combo = SparseVec::new();
            combo.insert(ui * k.m() + j, Rational::one());
            ech.insert(v, combo);
        }
    }
    let mut out = Vec::with_capacity(h.m());
    for (i, hc) in h.comps().iter().enumerate() {
        let mut v = amb.form_vector(&FormJet::d(hc));
        let mut combo = SparseVec::new();
        ech.reduce(&mut v, &mut combo);
        if !v.is_empty() {
            return Err(i);
        }
        // v − Σ combo·rows = 0, so the solution is −combo.
        let mut row = vec![Jet::zero(k.n(), order); k.m()];
        for (col, c) in combo {
            let (ui, j) = (col / k.m(), col % k.m());
            row[j].add_term(monos[ui], -c);
        }
        out.push(row);
    }
    Ok(out)
}

pub fn j_module_equal(f: &JetMap, f2: &JetMap, order: u32) -> Result<JModuleComparison> {
    if f.n() != f2.n() {
        return Err(Error::Precondition("both germs need the same source".into()));
    }
    check_order(f, order)?;
    check_order(f2, order)?;
    let (f, f2) = (f.with_order(order), f2.with_order(order));
    let p = match multipliers(&f2, &f, order) {
        Ok(p) => p,
        Err(component) => {
            return Ok(JModuleComparison::Differ {
                direction: "f' over f".into(),
                component,
                order,
            })
        }
    };
    let q = match multipliers(&f, &f2, order) {
        Ok(q) => q,
        Err(component) => {
            return Ok(JModuleComparison::Differ {
                direction: "f over f'".into(),
                component,
                order,
            })
        }
    };
    Ok(JModuleComparison::Equal { p, q, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::normal_form;
    use crate::germs::identity_map;
    use crate::jetcalc::q;

    fn jet(order: u32, terms: &[(Rational, u32, u32)]) -> Jet {
        let mut j = Jet::zero(2, order);
        for (c, a, b) in terms {
            j.add_term(Exponent::new(&[*a, *b]).unwrap(), c.clone());
        }
        j
    }

    fn t2(order: u32) -> Jet {
        Jet::var(2, order, 1)
    }

    #[test]
    fn identity_module_is_everything() {
        let jm = jacobi_module(&identity_map(2, 6), 6).unwrap();
        assert_eq!(jm.dim(), jm.ambient().dim());
    }

    #[test]
    fn fold_module() {
        let fold = normal_form("fold", 2, 8).unwrap();
        let jm = jacobi_module(&fold, 8).unwrap();
        let dt1 = FormJet::new(vec![Jet::one(2, 8), Jet::zero(2, 8)]).unwrap();
        let t2dt2 = FormJet::new(vec![Jet::zero(2, 8), t2(8)]).unwrap();
        let dt2 = FormJet::new(vec![Jet::zero(2, 8), Jet::one(2, 8)]).unwrap();
        assert!(jm.contains_form(&dt1));
        assert!(jm.contains_form(&t2dt2));
        assert!(!jm.contains_form(&dt2));
    }

    #[test]
    fn target_changes_keep_the_module() {
        let f = normal_form("SW", 3, 10).unwrap();
        let a = jacobi_module(&f, 8).unwrap();
        for seed in 0..3 {
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let tau = crate::gallery::random_diffeo(&mut rng, 3, 10, &Default::default());
            let g = f.compose_target(&tau).unwrap();
            assert_eq!(jacobi_module(&g, 8).unwrap(), a);
        }
    }

    #[test]
    fn cusp_ramification() {
        let g = normal_form("cusp", 2, 10).unwrap();
        let r = ramification_jets(&g, 10).unwrap();
        let u1 = jet(10, &[(q(3, 4), 0, 4), (q(1, 2), 1, 2)]);
        let u2 = jet(10, &[(q(3, 5), 0, 5), (q(1, 3), 1, 3)]);
        assert!(r.contains_jet(&u1));
        assert!(r.contains_jet(&u2));
        assert!(!r.contains_jet(&t2(10)));
        for c in g.comps() {
            assert!(r.contains_jet(c));
        }
        let id = ramification_jets(&identity_map(2, 5), 5).unwrap();
        assert_eq!(id.dim(), id.ambient().dim() - 1);
    }

    #[test]
    fn openings_of_the_cusp() {
        let g = normal_form("cusp", 2, 12).unwrap();
        let sw = normal_form("SW", 3, 12).unwrap();
        assert!(is_opening(&sw, &g, 12).unwrap());
        let mut comps = g.comps().to_vec();
        comps.push(t2(12));
        assert!(!is_opening(&JetMap::new(comps).unwrap(), &g, 12).unwrap());
        assert!(is_opening(&g.pad_to(3), &g, 12).unwrap());
        assert!(is_opening(&sw, &normal_form("fold", 2, 12).unwrap(), 12).is_err());
    }

    #[test]
    fn versality() {
        let g = normal_form("cusp", 2, 12).unwrap();
        let osw = normal_form("OSW", 4, 12).unwrap();
        let v = is_versal_opening(&osw, &g, 12).unwrap();
        assert!(v.versal, "{v:?}");
        assert_eq!(v.order, 10);
        let sw = normal_form("SW", 3, 12).unwrap();
        let v = is_versal_opening(&sw, &g, 12).unwrap();
        assert!(!v.versal);
        assert!(v.missing.is_some());
    }

    #[test]
    fn identical_germs_give_identity_witnesses() {
        let f = normal_form("MD", 3, 8).unwrap();
        match j_module_equal(&f, &f, 8).unwrap() {
            JModuleComparison::Equal { p, q, .. } => {
                for (i, row) in p.iter().chain(&q).enumerate() {
                    for (j, c) in row.iter().enumerate() {
                        let expect = if i % 3 == j { Jet::one(2, 8) } else { Jet::zero(2, 8) };
                        assert_eq!(c, &expect);
                    }
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn opening_shares_the_module() {
        let g = normal_form("cusp", 2, 8).unwrap();
        let sw = normal_form("SW", 3, 8).unwrap();
        let cmp = j_module_equal(&sw, &g, 8).unwrap();
        assert!(cmp.is_equal());
        if let JModuleComparison::Equal { p, .. } = cmp {
            // Witness check: dg_i = Σ P_ij d(sw)_j through degree 6.
            for (i, row) in p.iter().enumerate() {
                for var in 0..2 {
                    let mut lhs = g.comp(i).derive(var);
                    for (j, c) in row.iter().enumerate() {
                        lhs = &lhs - &(c * &sw.comp(j).derive(var));
                    }
                    assert!(lhs.terms().all(|(e, _)| e.degree() > 6), "{lhs}");
                }
            }
        }
    }

    #[test]
    fn fold_and_cusp_differ() {
        let fold = normal_form("fold", 2, 8).unwrap();
        let cusp = normal_form("cusp", 2, 8).unwrap();
        assert!(!j_module_equal(&fold, &cusp, 8).unwrap().is_equal());
    }
}
