//! Dense univariate polynomials over one tower field.
//!
//! Coefficients are stored low-order first and kept trimmed: the zero
//! polynomial has an empty coefficient vector and degree `None`. These are
//! small objects (repair check polynomials have degree < n), so the
//! arithmetic here favours clarity over asymptotics.

use std::fmt;

use crate::galois::{Element, FieldId};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    field: FieldId,
    coeffs: Vec<Element>,
}

impl Polynomial {
    pub fn zero(field: FieldId) -> Polynomial {
        Polynomial { field, coeffs: Vec::new() }
    }

    pub fn one(field: FieldId) -> Polynomial {
        Polynomial { field, coeffs: vec![field.one()] }
    }

    pub fn constant(c: Element) -> Polynomial {
        Polynomial::from_coeffs(c.field(), &[c])
    }

    /// Build from low-order-first coefficients, trimming leading zeros.
    pub fn from_coeffs(field: FieldId, coeffs: &[Element]) -> Polynomial {
        let mut coeffs = coeffs.to_vec();
        for c in &coeffs {
            assert_eq!(c.field(), field, "mixed-field polynomial");
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { field, coeffs }
    }

    /// Build from raw byte values, low-order first.
    pub fn from_values(field: FieldId, values: &[u8]) -> Polynomial {
        let coeffs: Vec<Element> = values.iter().map(|&v| field.elem(v)).collect();
        Polynomial::from_coeffs(field, &coeffs)
    }

    /// The monic polynomial `Π (x − r)` over the roots' field.
    pub fn from_roots(field: FieldId, roots: &[Element]) -> Polynomial {
        let mut p = Polynomial::one(field);
        for &r in roots {
            p = p.mul(&Polynomial::from_coeffs(field, &[r, field.one()]));
        }
        p
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    /// Low-order-first coefficients (no leading zeros).
    pub fn coeffs(&self) -> &[Element] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == self.field.one())
    }

    /// Coefficient of `x^i` (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> Element {
        self.coeffs.get(i).copied().unwrap_or_else(|| self.field.zero())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Element) -> Element {
        assert_eq!(x.field(), self.field, "evaluation point from wrong field");
        let mut acc = self.field.zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.field, rhs.field, "mixed-field polynomial addition");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs: Vec<Element> = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Polynomial::from_coeffs(self.field, &coeffs)
    }

    pub fn mul(&self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.field, rhs.field, "mixed-field polynomial product");
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero(self.field);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(self.field, &coeffs)
    }

    pub fn scale(&self, c: Element) -> Polynomial {
        assert_eq!(c.field(), self.field, "scalar from wrong field");
        let coeffs: Vec<Element> = self.coeffs.iter().map(|&a| a * c).collect();
        Polynomial::from_coeffs(self.field, &coeffs)
    }

    /// Substitute `x ↦ a·x + b`, i.e. return `p(a·x + b)`.
    pub fn compose_linear(&self, a: Element, b: Element) -> Polynomial {
        let inner = Polynomial::from_coeffs(self.field, &[b, a]);
        let mut acc = Polynomial::zero(self.field);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(&inner).add(&Polynomial::constant(c));
        }
        acc
    }

    /// Map every coefficient through a subfield embedding, producing the same
    /// polynomial over the larger field.
    pub fn embed(&self, emb: &crate::galois::SubfieldEmbedding) -> Polynomial {
        let coeffs: Vec<Element> = self.coeffs.iter().map(|&c| emb.apply(c)).collect();
        Polynomial::from_coeffs(emb.target, &coeffs)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}·x"),
                _ => format!("{c}·x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
