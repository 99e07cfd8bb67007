//! The germ input document and its polynomial expression language.
//!
//! ```toml
//! vars = ["t1", "t2"]
//! components = ["t1", "t2^3 + t1*t2", "3/4*t2^4 + 1/2*t1*t2^2"]
//! order = 12
//! [metadata]
//! name = "swallowtail"
//! ```
//!
//! Expressions use rationals, `+ - * / ^`, parentheses and the declared
//! variables. `/` only divides by nonzero constants. `·` and `−` are accepted
//! as `*` and `-`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::germs::JetMap;
use crate::jetcalc::{Exponent, Jet, Rational, DEFAULT_ORDER};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GermDocument {
    pub vars: Vec<String>,
    pub components: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    /// Source point the germ is taken at; the germ is translated to the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

/// Degree bound for intermediate polynomials before truncation.
const POLY_ORDER: u32 = 255;

impl GermDocument {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(text, s.start))
                .unwrap_or((0, 0));
            Error::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("documents serialize")
    }

    pub fn new(vars: &[&str], components: &[&str]) -> Self {
        GermDocument {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            components: components.iter().map(|s| s.to_string()).collect(),
            order: None,
            base_point: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn order(&self) -> u32 {
        self.order.unwrap_or(DEFAULT_ORDER)
    }

    /// Parses every component into a germ truncated at `order` (the
    /// document's own order when `None`). Positions in errors refer to
    /// `source` when given, else to the expression itself.
    pub fn to_germ(&self, order: Option<u32>, source: Option<&str>) -> Result<JetMap> {
        let order = order.unwrap_or_else(|| self.order());
        if order == 0 || order > POLY_ORDER {
            return Err(Error::Document(format!("order {order} outside 1..={POLY_ORDER}")));
        }
        let n = self.vars.len();
        if n == 0 || n > Exponent::MAX_VARS {
            return Err(Error::Document(format!(
                "between 1 and {} variables are supported, got {n}",
                Exponent::MAX_VARS
            )));
        }
        for (i, v) in self.vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(Error::Document(format!("variable name {v:?} is not an identifier")));
            }
            if self.vars[..i].contains(v) {
                return Err(Error::Document(format!("variable {v:?} declared twice")));
            }
        }
        if self.components.is_empty() {
            return Err(Error::NoComponents);
        }
        let mut polys = Vec::with_capacity(self.components.len());
        for text in &self.components {
            let p = parse_polynomial(text, &self.vars).map_err(|e| locate(e, text, source))?;
            polys.push(p);
        }
        if let Some(point) = &self.base_point {
            if point.len() != n {
                return Err(Error::Document(format!(
                    "base point has {} coordinates, expected {n}",
                    point.len()
                )));
            }
            let shift = point
                .iter()
                .map(|s| {
                    let c = parse_polynomial(s, &[]).map_err(|e| locate(e, s, source))?;
                    if c.terms().any(|(e, _)| e.degree() > 0) {
                        return Err(Error::Document(format!("base point coordinate {s:?} is not a constant")));
                    }
                    Ok(c)
                })
                .collect::<Result<Vec<_>>>()?;
            let subs: Vec<Jet> = shift
                .iter()
                .enumerate()
                .map(|(i, c)| &Jet::var(n, POLY_ORDER, i) + &c.widen(n).with_order(POLY_ORDER))
                .collect();
            polys = polys.iter().map(|p| substitute(p, &subs)).collect();
            for p in polys.iter_mut() {
                let c = p.coeff(Exponent::zero());
                p.add_term(Exponent::zero(), -c);
            }
        }
        for (index, p) in polys.iter().enumerate() {
            if !p.coeff(Exponent::zero()).is_zero() {
                return Err(Error::NonzeroConstant { index });
            }
        }
        JetMap::new(polys.iter().map(|p| p.with_order(order)).collect())
    }
}

/// Plain substitution that allows constant terms in `subs`.
fn substitute(p: &Jet, subs: &[Jet]) -> Jet {
    let n = subs.len();
    let mut out = Jet::zero(n, POLY_ORDER);
    for (e, c) in p.terms() {
        let mut m = Jet::one(n, POLY_ORDER);
        for (i, s) in subs.iter().enumerate() {
            for _ in 0..e.power(i) {
                m = &m * s;
            }
        }
        out = &out + &m.scale(c);
    }
    out
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn line_col(text: &str, byte: usize) -> (usize, usize) {
    let before = &text[..byte.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Moves an expression-relative error to its place in `source`.
fn locate(e: Error, expr: &str, source: Option<&str>) -> Error {
    let Error::Parse { column, message, .. } = e else {
        return e;
    };
    if let Some(src) = source {
        if let Some(at) = src.find(&format!("\"{expr}\"")) {
            let (line, col) = line_col(src, at + 1);
            return Error::Parse {
                line,
                column: col + column - 1,
                message,
            };
        }
    }
    Error::Parse {
        line: 1,
        column,
        message: format!("in {expr:?}: {message}"),
    }
}

/// Parses a polynomial over `vars` exactly (degree at most 255).
pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<Jet> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        vars,
        nvars: vars.len().max(1),
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected {:?}", p.chars[p.pos])));
    }
    Ok(out)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a [String],
    nvars: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: 1,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Jet> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                '-' | '−' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Jet> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                '*' | '·' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                '/' => {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let d = self.unary()?;
                    let c = d.coeff(Exponent::zero());
                    if d.terms().any(|(e, _)| e.degree() > 0) || c.is_zero() {
                        self.pos = at;
                        return Err(self.error("division is only by nonzero constants"));
                    }
                    acc = acc.scale(&c.recip());
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Jet> {
        match self.peek() {
            Some('-' | '−') => {
                self.pos += 1;
                Ok(self.unary()?.scale(&-Rational::from_integer(1.into())))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Jet> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let k = self.integer()?;
            let k: u32 = k
                .to_string()
                .parse()
                .ok()
                .filter(|&k| k <= POLY_ORDER)
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    column: start + 1,
                    message: format!("exponent must be an integer in 0..={POLY_ORDER}"),
                })?;
            if base.valuation().is_some_and(|v| v.saturating_mul(k) > POLY_ORDER) {
                return Err(Error::Parse {
                    line: 1,
                    column: start + 1,
                    message: "degree exceeds 255".into(),
                });
            }
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<num_bigint::BigInt> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a non-negative integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<Jet> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let k = self.integer()?;
                Ok(Jet::constant(self.nvars, POLY_ORDER, Rational::from_integer(k)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Jet::var(self.nvars, POLY_ORDER, i)),
                    None => {
                        self.pos = start;
                        Err(self.error(format!("unknown variable {name:?}")))
                    }
                }
            }
            Some(c) => Err(self.error(format!("unexpected {c:?}"))),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

/// Renders a germ back into document form with the given variable names.
pub fn document_of(f: &JetMap, vars: &[String]) -> GermDocument {
    GermDocument {
        vars: vars.to_vec(),
        components: f.comps().iter().map(|c| c.format_with(vars)).collect(),
        order: Some(f.order()),
        base_point: None,
        metadata: BTreeMap::new(),
    }
}

/// Default source names `t1, t2, …`.
pub fn default_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("t{i}")).collect()
}
