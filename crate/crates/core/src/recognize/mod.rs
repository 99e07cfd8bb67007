//! The recognition decision tree for corank-one surface germs.

mod certificate;
mod normalize;

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use certificate::{Certificate, Check, Entry, VanishingOrder, Verdict, Q};
pub use normalize::{
    branch_vanishing, double_points, fold_functionals, folded_pleat_parameter, functions_vanish_on_branches,
    morse_branches, Branch, DoublePoints, FoldFunctionals,
};

use crate::error::{Error, Result};
use crate::frontal::{adapt_target, frontality_core, hessian, FrontalStatus, KTag};
use crate::germs::{corank, prepare, JetMap, VectorFieldJet};
use crate::jetcalc::{divide, Exponent, Jet, Rational};
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum SingularityClass {
    Immersion,
    Fold,
    WhitneyCusp,
    BeakToBeak,
    SwallowtailBase,
    LipsBase,
    CuspidalEdge,
    EmbeddedCuspidalEdge,
    FoldedUmbrella,
    OpenFoldedUmbrella,
    Swallowtail,
    OpenSwallowtail,
    Mond,
    OpenMond,
    Shcherbak,
    CuspidalSwallowtail,
    CuspidalLips,
    FoldedPleatClass,
    Unrecognized { failed: String },
    Inconclusive { order: i32, reason: String },
}

impl SingularityClass {
    pub fn name(&self) -> &'static str {
        use SingularityClass::*;
        match self {
            Immersion => "Immersion",
            Fold => "Fold",
            WhitneyCusp => "WhitneyCusp",
            BeakToBeak => "BeakToBeak",
            SwallowtailBase => "SwallowtailBase",
            LipsBase => "LipsBase",
            CuspidalEdge => "CuspidalEdge",
            EmbeddedCuspidalEdge => "EmbeddedCuspidalEdge",
            FoldedUmbrella => "FoldedUmbrella",
            OpenFoldedUmbrella => "OpenFoldedUmbrella",
            Swallowtail => "Swallowtail",
            OpenSwallowtail => "OpenSwallowtail",
            Mond => "Mond",
            OpenMond => "OpenMond",
            Shcherbak => "Shcherbak",
            CuspidalSwallowtail => "CuspidalSwallowtail",
            CuspidalLips => "CuspidalLips",
            FoldedPleatClass => "FoldedPleatClass",
            Unrecognized { .. } => "Unrecognized",
            Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn is_definite(&self) -> bool {
        !matches!(self, SingularityClass::Unrecognized { .. } | SingularityClass::Inconclusive { .. })
    }
}

impl fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularityClass::Unrecognized { failed } => write!(f, "Unrecognized (first failed: {failed})"),
            SingularityClass::Inconclusive { order, reason } => {
                write!(f, "Inconclusive ({reason}; reliable order {order})")
            }
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RecognizeOptions {
    /// Cap for every vanishing-order search.
    pub max_eta_order: u32,
    /// Seed of the sampler in the double-point test.
    pub seed: u64,
}

impl Default for RecognizeOptions {
    fn default() -> Self {
        RecognizeOptions {
            max_eta_order: 7,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Recognition {
    pub class: SingularityClass,
    pub certificate: Certificate,
}

/// `ord^η(h)` searched up to `max`.
pub fn vanishing_order(h: &Jet, eta: &VectorFieldJet, max: u32) -> VanishingOrder {
    let mut cur = h.clone();
    for i in 0..=max {
        match cur.value_at_origin() {
            Err(_) => return VanishingOrder::AtLeast(i),
            Ok(v) if !v.is_zero() => return VanishingOrder::Exact(i),
            Ok(_) => {}
        }
        if i < max {
            cur = eta.apply(&cur);
        }
    }
    VanishingOrder::AtLeast(max + 1)
}

fn sv(name: &str, value: impl fmt::Display) -> (String, String) {
    (name.to_string(), value.to_string())
}

fn opt_q(v: Option<Rational>) -> Option<Q> {
    v.map(Q)
}

fn show_opt(v: &Option<Rational>) -> String {
    v.as_ref().map_or("undetermined".to_string(), |r| r.to_string())
}

/// Full pipeline: corank, frontality, adapted coordinates, prepared form,
/// then the base or frontal decision tree.
pub fn recognize(f: &JetMap, opts: &RecognizeOptions) -> Result<Recognition> {
    if f.n() != 2 {
        return Err(Error::SourceDimension(f.n()));
    }
    if f.m() == 2 {
        classify_base(f, opts)
    } else {
        classify_frontal(f, opts)
    }
}

struct Tree<'a> {
    cert: Certificate,
    opts: &'a RecognizeOptions,
    order: u32,
}

impl Tree<'_> {
    fn done(self, class: SingularityClass) -> Recognition {
        Recognition {
            class,
            certificate: self.cert,
        }
    }

    fn unrecognized(self) -> Recognition {
        let failed = self
            .cert
            .first_failure()
            .map_or("no criterion matched".to_string(), |e| format!("{}: {}", e.id, e.statement));
        self.done(SingularityClass::Unrecognized { failed })
    }

    fn inconclusive(self, reason: &str) -> Recognition {
        let order = self.order as i32;
        self.done(SingularityClass::Inconclusive {
            order,
            reason: reason.to_string(),
        })
    }

    fn order_check(&mut self, id: &str, statement: &str, h: &Jet, eta: &VectorFieldJet, expected: u32) -> Verdict {
        let o = vanishing_order(h, eta, self.opts.max_eta_order);
        self.cert.push(
            id,
            statement,
            vec![sv("order", o)],
            Check::OrderEquals {
                observed: o,
                expected,
            },
        )
    }
}

/// The data shared by both trees once the germ is prepared.
struct Base {
    germ: JetMap,
    lambda: Jet,
    eta: VectorFieldJet,
    ktag: Option<KTag>,
    r: VanishingOrder,
}

fn base_data(tree: &mut Tree<'_>, g: JetMap) -> Base {
    let order = g.order();
    let lambda = g.comp(1).derive(1);
    let eta = VectorFieldJet::coordinate(2, order, 1);
    let v0 = lambda.value_at_origin().ok();
    let grad: Option<Vec<Rational>> = (0..2)
        .map(|j| lambda.reliable_coeff(Exponent::unit(j)).ok())
        .collect();
    let hdet = hessian(&lambda).ok().map(|h| linalg::det(&h));
    let check = Check::KClassIn {
        value_at_origin: v0.clone().map(Q),
        gradient: grad.clone().map(|g| g.into_iter().map(Q).collect()),
        hessian_det: hdet.clone().map(Q),
        expected: vec![KTag::Regular, KTag::MorseIndefinite, KTag::MorseDefinite],
    };
    let ktag = certificate::ktag_from(
        v0.map(Q).as_ref(),
        grad.map(|g| g.into_iter().map(Q).collect::<Vec<_>>()).as_deref(),
        hdet.clone().map(Q).as_ref(),
    );
    tree.cert.push(
        "kclass",
        "λ is K-equivalent to t1, t1·t2 or t1²+t2²",
        vec![
            sv("lambda", &lambda),
            sv("class", ktag.map_or("undetermined".to_string(), |t| format!("{t:?}"))),
            sv("hessian_det", show_opt(&hdet)),
        ],
        check,
    );
    let r = vanishing_order(&lambda, &eta, tree.opts.max_eta_order);
    tree.cert.push("base.order", "ord^η(λ)", vec![sv("order", r)], Check::Info);
    Base {
        germ: g,
        lambda,
        eta,
        ktag,
        r,
    }
}

fn prepared_or_finish<'a>(
    f: &JetMap,
    opts: &'a RecognizeOptions,
    adapt: bool,
) -> Result<std::result::Result<(Tree<'a>, JetMap), Recognition>> {
    let mut tree = Tree {
        cert: Certificate::default(),
        opts,
        order: f.order(),
    };
    let k = corank(f);
    tree.cert.push(
        "corank",
        "corank of f at 0 is 1",
        vec![sv("corank", k)],
        Check::IntEquals {
            observed: Some(k as i64),
            expected: 1,
        },
    );
    match k {
        0 => return Ok(Err(tree.done(SingularityClass::Immersion))),
        1 => {}
        _ => return Err(Error::Corank(k)),
    }
    let mut g = f.clone();
    if adapt {
        let fd = frontality_core(f)?;
        let observed = fd.status.to_string();
        tree.cert.push(
            "frontal",
            "the Jacobi ideal is principal with a nonzero generator",
            vec![
                sv("status", &observed),
                sv("lambda", fd.lambda.as_ref().map_or("none".to_string(), |l| l.to_string())),
            ],
            Check::StatusIs {
                observed,
                expected: "ProperFrontal".into(),
            },
        );
        match fd.status {
            FrontalStatus::ProperFrontal => {}
            FrontalStatus::InconclusiveAtOrder { order } => {
                tree.order = order.max(0) as u32;
                return Ok(Err(tree.inconclusive("frontality undetermined")));
            }
            other => return Err(Error::NotProperFrontal(other.to_string())),
        }
        g = match adapt_target(f, &fd) {
            Ok(a) => a,
            Err(Error::Precondition(reason)) => return Ok(Err(tree.inconclusive(&reason))),
            Err(e) => return Err(e),
        };
    }
    let p = prepare(&g)?;
    let rel = p.germ.reliable_order();
    tree.cert.push(
        "prepared",
        "prepared form (s1, φ2, …) with kernel ∂/∂s2",
        p.germ
            .comps()
            .iter()
            .enumerate()
            .map(|(i, c)| sv(&format!("phi{}", i + 1), c))
            .chain(std::iter::once(sv("reliable_order", rel)))
            .collect(),
        Check::Info,
    );
    Ok(Ok((tree, p.germ)))
}

/// Plane-to-plane germs: immersion, fold, cusp, beak-to-beak, swallowtail or lips.
pub fn classify_base(g: &JetMap, opts: &RecognizeOptions) -> Result<Recognition> {
    if g.n() != 2 || g.m() != 2 {
        return Err(Error::Precondition("classify_base needs a germ (R^2,0) → (R^2,0)".into()));
    }
    let (mut tree, prepared) = match prepared_or_finish(g, opts, false)? {
        Ok(x) => x,
        Err(done) => return Ok(done),
    };
    let base = base_data(&mut tree, prepared);
    Ok(match base_class(&mut tree, &base) {
        Some(c) => tree.done(c),
        None if tree.cert.entries.iter().any(|e| e.verdict == Verdict::Inconclusive) => {
            tree.inconclusive("base class undetermined")
        }
        None => tree.unrecognized(),
    })
}

fn base_class(tree: &mut Tree<'_>, b: &Base) -> Option<SingularityClass> {
    use KTag::*;
    match (b.ktag?, b.r.exact()) {
        (Regular, Some(1)) => Some(SingularityClass::Fold),
        (Regular, Some(2)) => Some(SingularityClass::WhitneyCusp),
        (Regular, Some(3)) => Some(SingularityClass::SwallowtailBase),
        (MorseIndefinite, Some(2)) => Some(SingularityClass::BeakToBeak),
        (MorseDefinite, Some(2)) => Some(SingularityClass::LipsBase),
        (_, None) => {
            tree.cert.push(
                "base.decided",
                "ord^η(λ) is determined",
                vec![sv("order", b.r)],
                Check::IntEquals {
                    observed: None,
                    expected: 0,
                },
            );
            None
        }
        (tag, Some(r)) => {
            tree.cert.push(
                "base.known",
                "(K-class, ord^η(λ)) is a known base",
                vec![sv("class", format!("{tag:?}")), sv("order", r)],
                Check::StatusIs {
                    observed: format!("{tag:?}/{r}"),
                    expected: "one of Regular/1, Regular/2, Regular/3, MorseIndefinite/2, MorseDefinite/2".into(),
                },
            );
            None
        }
    }
}

/// Surface germs in `R^m`, `m ≥ 3`.
pub fn classify_frontal(f: &JetMap, opts: &RecognizeOptions) -> Result<Recognition> {
    if f.n() != 2 {
        return Err(Error::SourceDimension(f.n()));
    }
    if f.m() < 3 {
        return Err(Error::Precondition("classify_frontal needs m >= 3".into()));
    }
    let (mut tree, prepared) = match prepared_or_finish(f, opts, true)? {
        Ok(x) => x,
        Err(done) => return Ok(done),
    };
    let b = base_data(&mut tree, prepared);
    let Some(base) = base_class(&mut tree, &b) else {
        return Ok(if tree.cert.entries.iter().any(|e| e.verdict == Verdict::Inconclusive) {
            tree.inconclusive("base class undetermined")
        } else {
            tree.unrecognized()
        });
    };
    let m = b.germ.m();
    let orders: Vec<VanishingOrder> = b.germ.comps()[2..]
        .iter()
        .map(|h| vanishing_order(h, &b.eta, tree.opts.max_eta_order))
        .collect();
    tree.cert.push(
        "orders",
        "ord^η(f_k), k ≥ 3",
        orders
            .iter()
            .enumerate()
            .map(|(i, o)| sv(&format!("f{}", i + 3), o))
            .collect(),
        Check::Info,
    );
    let class = match base {
        SingularityClass::Fold => fold_openings(&mut tree, &b, &orders, m),
        SingularityClass::WhitneyCusp => cusp_openings(&mut tree, &b, m),
        SingularityClass::BeakToBeak => beaks_openings(&mut tree, &b, m),
        SingularityClass::SwallowtailBase if m == 3 => {
            match tree.order_check("cs.order", "ord^η(f_3) = 5", b.germ.comp(2), &b.eta, 5) {
                Verdict::Pass => Some(SingularityClass::CuspidalSwallowtail),
                _ => None,
            }
        }
        SingularityClass::LipsBase if m == 3 => {
            match tree.order_check("cl.order", "ord^η(f_3) = 4", b.germ.comp(2), &b.eta, 4) {
                Verdict::Pass => Some(SingularityClass::CuspidalLips),
                _ => None,
            }
        }
        _ => {
            tree.cert.push(
                "catalog",
                "the base admits a catalogued opening in this target dimension",
                vec![sv("base", base.name()), sv("m", m)],
                Check::IntEquals {
                    observed: Some(0),
                    expected: 1,
                },
            );
            None
        }
    };
    Ok(finish(tree, class))
}

fn finish(tree: Tree<'_>, class: Option<SingularityClass>) -> Recognition {
    match class {
        Some(c) if c.is_definite() => tree.done(c),
        Some(c) => tree.done(c),
        None => {
            let last = tree.cert.entries.last().map(|e| e.verdict);
            if last == Some(Verdict::Inconclusive) {
                let reason = tree.cert.entries.last().map(|e| e.statement.clone()).unwrap_or_default();
                tree.inconclusive(&format!("undetermined: {reason}"))
            } else {
                tree.unrecognized()
            }
        }
    }
}

fn fold_openings(
    tree: &mut Tree<'_>,
    b: &Base,
    orders: &[VanishingOrder],
    m: usize,
) -> Option<SingularityClass> {
    let v = tree.cert.push(
        "ce.order",
        "ord^η(f_k) = 3 for some k ≥ 3",
        vec![],
        Check::AnyOrderEquals {
            observed: orders.to_vec(),
            expected: 3,
        },
    );
    match v {
        Verdict::Pass if m == 3 => return Some(SingularityClass::CuspidalEdge),
        Verdict::Pass => return Some(SingularityClass::EmbeddedCuspidalEdge),
        Verdict::Inconclusive => return None,
        Verdict::Fail => {}
    }
    let ff = match fold_functionals(&b.germ) {
        Ok(ff) => ff,
        Err(e) => {
            tree.cert.push(
                "fold.normal",
                "fold base normalized to (s1, q0·w²)",
                vec![sv("error", e)],
                Check::NonZero { value: None },
            );
            return None;
        }
    };
    let mut values = vec![sv("q0", &ff.q0)];
    for (i, (a, be)) in ff.alpha.iter().zip(&ff.beta).enumerate() {
        values.push(sv(&format!("alpha{}", i + 3), show_opt(a)));
        values.push(sv(&format!("beta{}", i + 3), show_opt(be)));
    }
    tree.cert.push("fold.normal", "fold base normalized to (s1, q0·w²); odd parts F_k in w", values, Check::Info);
    if m == 3 {
        let v = tree.cert.push(
            "fu.wedge",
            "(dλ ∧ d(η³F_3))(0) ≠ 0",
            vec![sv("alpha3", show_opt(&ff.alpha[0]))],
            Check::NonZero {
                value: opt_q(ff.alpha[0].clone()),
            },
        );
        return (v == Verdict::Pass).then_some(SingularityClass::FoldedUmbrella);
    }
    let rows = ff
        .alpha
        .iter()
        .zip(&ff.beta)
        .map(|(a, be)| vec![opt_q(a.clone()), opt_q(be.clone())])
        .collect();
    let v = tree.cert.push(
        "ofu.rank",
        "the rows ((dλ ∧ d(η³F_k))(0), (η⁵F_k)(0)), k ≥ 3, have rank 2",
        vec![],
        Check::RankTwo { rows },
    );
    (v == Verdict::Pass).then_some(SingularityClass::OpenFoldedUmbrella)
}

/// `(η^j f_k)(0)` for `j = 3, 4, 5` and every extra component.
fn eta_values(b: &Base) -> Vec<[Option<Rational>; 3]> {
    b.germ.comps()[2..]
        .iter()
        .map(|h| {
            let e3 = b.eta.apply_n(h, 3);
            let e4 = b.eta.apply(&e3);
            let e5 = b.eta.apply(&e4);
            [e3, e4, e5].map(|e| e.value_at_origin().ok())
        })
        .collect()
}

/// The open-class test: all `(η³f_k)(0)` vanish and the rows
/// `((η⁴f_k)(0), (η⁵f_k)(0))` have rank 2.
fn open_rank(tree: &mut Tree<'_>, b: &Base, prefix: &str) -> Verdict {
    let vals = eta_values(b);
    let v = tree.cert.push(
        &format!("{prefix}.eta3"),
        "(η³f_k)(0) = 0 for all k ≥ 3",
        vals.iter()
            .enumerate()
            .map(|(i, v)| sv(&format!("eta3_f{}", i + 3), show_opt(&v[0])))
            .collect(),
        Check::AllZero {
            values: vals.iter().map(|v| opt_q(v[0].clone())).collect(),
        },
    );
    if v != Verdict::Pass {
        return v;
    }
    let rows = vals
        .iter()
        .map(|v| vec![opt_q(v[1].clone()), opt_q(v[2].clone())])
        .collect();
    tree.cert.push(
        &format!("{prefix}.rank"),
        "the rows ((η⁴f_k)(0), (η⁵f_k)(0)), k ≥ 3, have rank 2",
        vec![],
        Check::RankTwo { rows },
    )
}

fn cusp_openings(tree: &mut Tree<'_>, b: &Base, m: usize) -> Option<SingularityClass> {
    if m >= 4 {
        return (open_rank(tree, b, "osw") == Verdict::Pass).then_some(SingularityClass::OpenSwallowtail);
    }
    let f3 = b.germ.comp(2);
    match tree.order_check("sw.order", "ord^η(f_3) = 4", f3, &b.eta, 4) {
        Verdict::Pass => return Some(SingularityClass::Swallowtail),
        Verdict::Inconclusive => return None,
        Verdict::Fail => {}
    }
    if tree.order_check("fp.order", "ord^η(f_3) = 5", f3, &b.eta, 5) != Verdict::Pass {
        return None;
    }
    let dp = double_points(&b.germ, tree.opts.seed);
    let (coeffs, samples) = match dp {
        Ok(dp) => (dp.form, dp.samples),
        Err(_) => (None, Vec::new()),
    };
    let check = Check::DefiniteForm {
        coeffs: coeffs.clone().map(|c| c.into_iter().map(Q).collect()),
        samples: samples.into_iter().map(Q).collect(),
    };
    let v = tree.cert.push(
        "fp.injective",
        "the reduced double-point function has a definite lowest part (no double points near 0)",
        vec![sv(
            "lowest_form",
            coeffs.map_or("undetermined".to_string(), |c| {
                c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
            }),
        )],
        check,
    );
    tree.cert.push(
        "fp.parameter",
        "fitted normal-form parameter c (diagnostic, not an invariant)",
        vec![sv("c", show_opt(&folded_pleat_parameter(&b.germ)))],
        Check::Info,
    );
    match v {
        Verdict::Pass => Some(SingularityClass::FoldedPleatClass),
        _ => Some(SingularityClass::Inconclusive {
            order: tree.order as i32,
            reason: "injectivity not certified".into(),
        }),
    }
}

fn beaks_openings(tree: &mut Tree<'_>, b: &Base, m: usize) -> Option<SingularityClass> {
    if m >= 4 {
        return (open_rank(tree, b, "omd") == Verdict::Pass).then_some(SingularityClass::OpenMond);
    }
    let f3 = b.germ.comp(2);
    match tree.order_check("md.order", "ord^η(f_3) = 4", f3, &b.eta, 4) {
        Verdict::Pass => return Some(SingularityClass::Mond),
        Verdict::Inconclusive => return None,
        Verdict::Fail => {}
    }
    if tree.order_check("sb.order", "ord^η(f_3) = 5", f3, &b.eta, 5) != Verdict::Pass {
        return None;
    }
    // With df_3 = h31 ds1 + h32 dφ2, the order of f_3 at a singular point c
    // in coordinates adapted at c is at least 4 iff (η h32)(c) = 0.
    let flags = divide(&b.eta.apply(f3), &b.lambda)
        .ok()
        .map(|h32| functions_vanish_on_branches(&b.lambda, &b.eta.apply(&h32)));
    let flags = match flags {
        Some(Ok(Some(f))) => f,
        _ => vec![None],
    };
    let v = tree.cert.push(
        "sb.branch",
        "ord_c^η(f_3) ≥ 4 along one branch of S(f), i.e. η(h32) vanishes on it",
        flags
            .iter()
            .enumerate()
            .map(|(i, f)| sv(&format!("branch{}", i + 1), format!("{f:?}")))
            .collect(),
        Check::AnyTrue { flags },
    );
    (v == Verdict::Pass).then_some(SingularityClass::Shcherbak)
}
