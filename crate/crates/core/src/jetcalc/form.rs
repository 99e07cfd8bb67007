use super::jet::Jet;
use super::JetError;

/// A differential 1-form `Σ coeffs[i] dt_{i+1}` with jet coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormJet {
    coeffs: Vec<Jet>,
}

impl FormJet {
    pub fn new(coeffs: Vec<Jet>) -> Result<Self, JetError> {
        if let Some(first) = coeffs.first() {
            if coeffs.len() != first.nvars() {
                return Err(JetError::WrongVariableCount {
                    expected: first.nvars(),
                    found: coeffs.len(),
                });
            }
            for c in &coeffs[1..] {
                if c.nvars() != first.nvars() || c.order() != first.order() {
                    return Err(JetError::ShapeMismatch {
                        left: (first.nvars(), first.order()),
                        right: (c.nvars(), c.order()),
                    });
                }
            }
        }
        Ok(FormJet { coeffs })
    }

    /// The exterior derivative `dh`.
    pub fn d(h: &Jet) -> Self {
        FormJet {
            coeffs: (0..h.nvars()).map(|i| h.derive(i)).collect(),
        }
    }

    pub fn coeffs(&self) -> &[Jet] {
        &self.coeffs
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    /// Multiplies every coefficient by the function `u`.
    pub fn scale_by(&self, u: &Jet) -> Self {
        FormJet {
            coeffs: self.coeffs.iter().map(|c| c * u).collect(),
        }
    }

    pub fn add(&self, other: &FormJet) -> Result<Self, JetError> {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_, _>>()?;
        Ok(FormJet { coeffs })
    }
}

/// The `dt1 ∧ dt2` coefficient of `ω1 ∧ ω2` on a surface.
pub fn wedge_coefficient(w1: &FormJet, w2: &FormJet) -> Result<Jet, JetError> {
    for w in [w1, w2] {
        if w.nvars() != 2 {
            return Err(JetError::WrongVariableCount {
                expected: 2,
                found: w.nvars(),
            });
        }
    }
    let a = w1.coeffs[0].try_mul(&w2.coeffs[1])?;
    let b = w1.coeffs[1].try_mul(&w2.coeffs[0])?;
    a.try_sub(&b)
}
