//! JSON polynomial schema:
//! `{ "dim": int, "terms": [ { "nu": [int,...], "sin": number|string, "cos": number|string } ] }`.
//! String coefficients are exact rationals `"p/q"`; missing coefficients default to 0.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{Coefficient, TrigPolynomial};
use crate::error::{Error, Result};
use crate::exact;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientLiteral {
    Number(serde_json::Number),
    Text(String),
}

impl CoefficientLiteral {
    fn to_rational(&self) -> Result<BigRational> {
        match self {
            CoefficientLiteral::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(BigRational::from_integer(i.into()))
                } else if let Some(u) = n.as_u64() {
                    Ok(BigRational::from_integer(u.into()))
                } else {
                    let f = n.as_f64().ok_or_else(|| Error::Malformed(format!("bad number {n}")))?;
                    exact::rational_from_f64(f)
                }
            }
            CoefficientLiteral::Text(s) => exact::parse_rational(s),
        }
    }

    fn from_coefficient(c: &Coefficient) -> Self {
        let r = c.exact();
        if r.is_integer() {
            if let Ok(i) = r.numer().to_string().parse::<i64>() {
                return CoefficientLiteral::Number(i.into());
            }
        }
        if c.representation_error() == 0.0 {
            if let Some(n) = serde_json::Number::from_f64(c.value()) {
                return CoefficientLiteral::Number(n);
            }
        }
        CoefficientLiteral::Text(exact::format_rational(r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    pub nu: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sin: Option<CoefficientLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cos: Option<CoefficientLiteral>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialDocument {
    pub dim: usize,
    pub terms: Vec<TermDocument>,
}

impl PolynomialDocument {
    pub fn build(&self) -> Result<TrigPolynomial> {
        if self.terms.is_empty() {
            return Err(Error::Malformed("empty term list".into()));
        }
        let raw = self
            .terms
            .iter()
            .map(|t| {
                let a = t.sin.as_ref().map_or_else(|| Ok(BigRational::zero()), |c| c.to_rational())?;
                let b = t.cos.as_ref().map_or_else(|| Ok(BigRational::zero()), |c| c.to_rational())?;
                Ok((t.nu.clone(), a, b))
            })
            .collect::<Result<Vec<_>>>()?;
        TrigPolynomial::new(self.dim, raw)
    }
}

pub(super) fn parse(document: &str) -> Result<TrigPolynomial> {
    let doc: PolynomialDocument =
        serde_json::from_str(document).map_err(|e| Error::Malformed(e.to_string()))?;
    doc.build()
}

pub(super) fn to_document(f: &TrigPolynomial) -> PolynomialDocument {
    PolynomialDocument {
        dim: f.dim,
        terms: f
            .terms
            .iter()
            .map(|t| TermDocument {
                nu: t.nu.0.clone(),
                sin: (!t.sin_coeff.is_zero()).then(|| CoefficientLiteral::from_coefficient(&t.sin_coeff)),
                cos: (!t.cos_coeff.is_zero()).then(|| CoefficientLiteral::from_coefficient(&t.cos_coeff)),
            })
            .collect(),
    }
}
