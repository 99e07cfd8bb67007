use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::frontal::KTag;
use crate::jetcalc::Rational;

/// An exact rational that serializes as the string `"num/den"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom()))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rational::from_str(&s)
            .map(Q)
            .map_err(|_| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<Rational> for Q {
    fn from(r: Rational) -> Self {
        Q(r)
    }
}

/// `ord^η(h)`: exact, or only bounded below because the jet ran out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VanishingOrder {
    Exact(u32),
    AtLeast(u32),
}

impl VanishingOrder {
    pub fn exact(self) -> Option<u32> {
        match self {
            VanishingOrder::Exact(k) => Some(k),
            VanishingOrder::AtLeast(_) => None,
        }
    }

    /// Whether the order equals `c`, if decidable.
    pub fn equals(self, c: u32) -> Option<bool> {
        match self {
            VanishingOrder::Exact(k) => Some(k == c),
            VanishingOrder::AtLeast(k) if k > c => Some(false),
            VanishingOrder::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for VanishingOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VanishingOrder::Exact(k) => write!(f, "{k}"),
            VanishingOrder::AtLeast(k) => write!(f, ">= {k} (undetermined)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_option(v: Option<bool>) -> Self {
        match v {
            Some(true) => Verdict::Pass,
            Some(false) => Verdict::Fail,
            None => Verdict::Inconclusive,
        }
    }

    pub fn as_option(self) -> Option<bool> {
        match self {
            Verdict::Pass => Some(true),
            Verdict::Fail => Some(false),
            Verdict::Inconclusive => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// The recorded evidence of one test, from which its verdict is recomputed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Check {
    IntEquals {
        observed: Option<i64>,
        expected: i64,
    },
    StatusIs {
        observed: String,
        expected: String,
    },
    NonZero {
        value: Option<Q>,
    },
    AllZero {
        values: Vec<Option<Q>>,
    },
    OrderEquals {
        observed: VanishingOrder,
        expected: u32,
    },
    AnyOrderEquals {
        observed: Vec<VanishingOrder>,
        expected: u32,
    },
    KClassIn {
        value_at_origin: Option<Q>,
        gradient: Option<Vec<Q>>,
        hessian_det: Option<Q>,
        expected: Vec<KTag>,
    },
    /// Some 2×2 minor of the rows is nonzero.
    RankTwo {
        rows: Vec<Vec<Option<Q>>>,
    },
    AnyTrue {
        flags: Vec<Option<bool>>,
    },
    /// A binary form is definite: by discriminant when quadratic, otherwise
    /// by the signs of its values at the stored sample directions.
    DefiniteForm {
        coeffs: Option<Vec<Q>>,
        samples: Vec<Q>,
    },
    Info,
}

impl Check {
    pub fn evaluate(&self) -> Verdict {
        match self {
            Check::IntEquals { observed, expected } => {
                Verdict::from_option(observed.map(|o| o == *expected))
            }
            Check::StatusIs { observed, expected } => Verdict::from_option(Some(observed == expected)),
            Check::NonZero { value } => Verdict::from_option(value.as_ref().map(|v| !v.0.is_zero())),
            Check::AllZero { values } => {
                Verdict::from_option(all_of(values.iter().map(|v| v.as_ref().map(|q| q.0.is_zero()))))
            }
            Check::OrderEquals { observed, expected } => {
                Verdict::from_option(observed.equals(*expected))
            }
            Check::AnyOrderEquals { observed, expected } => {
                Verdict::from_option(any_of(observed.iter().map(|o| o.equals(*expected))))
            }
            Check::KClassIn {
                value_at_origin,
                gradient,
                hessian_det,
                expected,
            } => Verdict::from_option(
                ktag_from(value_at_origin.as_ref(), gradient.as_deref(), hessian_det.as_ref())
                    .map(|t| expected.contains(&t)),
            ),
            Check::RankTwo { rows } => Verdict::from_option(rank_two(rows)),
            Check::AnyTrue { flags } => Verdict::from_option(any_of(flags.iter().copied())),
            Check::DefiniteForm { coeffs, samples } => {
                Verdict::from_option(coeffs.as_ref().map(|c| definite(c, samples)))
            }
            Check::Info => Verdict::Pass,
        }
    }
}

pub(crate) fn any_of(items: impl Iterator<Item = Option<bool>>) -> Option<bool> {
    let mut unknown = false;
    for x in items {
        match x {
            Some(true) => return Some(true),
            None => unknown = true,
            Some(false) => {}
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}

pub(crate) fn all_of(items: impl Iterator<Item = Option<bool>>) -> Option<bool> {
    any_of(items.map(|x| x.map(|b| !b))).map(|b| !b)
}

/// The contact class from the 2-jet data; `None` when data needed is missing.
pub fn ktag_from(value: Option<&Q>, gradient: Option<&[Q]>, hessian_det: Option<&Q>) -> Option<KTag> {
    if !value?.0.is_zero() {
        return Some(KTag::Unit);
    }
    if gradient?.iter().any(|g| !g.0.is_zero()) {
        return Some(KTag::Regular);
    }
    let d = &hessian_det?.0;
    Some(if d.is_zero() {
        KTag::Degenerate
    } else if *d < Rational::zero() {
        KTag::MorseIndefinite
    } else {
        KTag::MorseDefinite
    })
}

pub(crate) fn rank_two(rows: &[Vec<Option<Q>>]) -> Option<bool> {
    let mut unknown = false;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            match (&a[0], &a[1], &b[0], &b[1]) {
                (Some(a0), Some(a1), Some(b0), Some(b1)) => {
                    if !(&a0.0 * &b1.0 - &a1.0 * &b0.0).is_zero() {
                        return Some(true);
                    }
                }
                _ => unknown = true,
            }
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}

/// Definiteness of the binary form `Σ coeffs[i] x^(d−i) y^i`.
pub(crate) fn definite(coeffs: &[Q], samples: &[Q]) -> bool {
    let d = coeffs.len().saturating_sub(1);
    if d == 0 || d % 2 == 1 {
        return false;
    }
    if d == 2 {
        let (a, b, c) = (&coeffs[0].0, &coeffs[1].0, &coeffs[2].0);
        let four = Rational::from_integer(4.into());
        return b * b - four * a * c < Rational::zero();
    }
    // Both axis directions must be nonzero for a definite form.
    if coeffs[0].0.is_zero() || coeffs[d].0.is_zero() {
        return false;
    }
    let positive = coeffs[0].0 > Rational::zero();
    samples
        .iter()
        .all(|s| !s.0.is_zero() && (s.0 > Rational::zero()) == positive)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub statement: String,
    pub values: Vec<(String, String)>,
    pub check: Check,
    pub verdict: Verdict,
}

/// The ordered audit trail of a classification.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub entries: Vec<Entry>,
}

impl Certificate {
    pub fn push(
        &mut self,
        id: &str,
        statement: &str,
        values: Vec<(String, String)>,
        check: Check,
    ) -> Verdict {
        let verdict = check.evaluate();
        self.entries.push(Entry {
            id: id.to_string(),
            statement: statement.to_string(),
            values,
            check,
            verdict,
        });
        verdict
    }

    /// Recomputes every verdict from its stored evidence. Returns the ids of
    /// entries whose stored verdict disagrees.
    pub fn replay(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.check.evaluate() != e.verdict)
            .map(|e| e.id.clone())
            .collect()
    }

    pub fn replays(&self) -> bool {
        self.replay().is_empty()
    }

    pub fn first_failure(&self) -> Option<&Entry> {
        self.entries.iter().find(|e| e.verdict == Verdict::Fail)
    }

    pub fn get(&self, id: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.id == id)
    }
}
