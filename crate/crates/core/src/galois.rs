//! The tower of binary fields GF(2) ⊂ GF(4) ⊂ GF(16) ⊂ GF(256).
//!
//! Every field is represented on bytes: bit `i` of a value is the coefficient
//! of `z^i` in the polynomial representation, where `z` is the residue of the
//! indeterminate modulo the field's Conway polynomial. `z` (value 2, except in
//! GF(2) where it reduces to 1) generates the multiplicative group, so
//! multiplication runs on log/antilog tables with an explicit zero branch.
//!
//! Subfield embeddings are Conway-compatible: the primitive element of the
//! subfield maps to `z^s` in the extension, `s = (order−1)/(suborder−1)`, and
//! construction asserts that the image is a root of the subfield's modulus.
//! On top of the embeddings the module offers traces down to a subfield,
//! ranks of element sets over a subfield, dual bases, and subspace
//! polynomials — the linear-algebra kit used by repair schemes.
//!
//! Arithmetic on [`Element`] panics on field mismatch and on division by
//! zero, mirroring integer arithmetic; data-dependent failures (logarithm of
//! zero, non-basis input, non-subspace input) surface as [`GaloisError`].

use std::fmt;
use std::sync::LazyLock;

use thiserror::Error;

use crate::poly::Polynomial;

/// Errors from fallible field operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaloisError {
    #[error("logarithm of zero is undefined")]
    LogOfZero,
    #[error("{0:?} is not a subfield of {1:?}")]
    NotASubfieldPair(FieldId, FieldId),
    #[error("expected {expected} basis elements, got {got}")]
    WrongBasisSize { expected: usize, got: usize },
    #[error("elements do not form a basis over the requested subfield")]
    NotABasis,
    #[error("set is not a subspace over the requested subfield")]
    NotASubspace,
}

/// Identifies one member of the field tower. Copyable handle used by
/// [`Element`] and everything above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldId {
    Gf2,
    Gf4,
    Gf16,
    Gf256,
}

impl FieldId {
    pub const ALL: [FieldId; 4] = [FieldId::Gf2, FieldId::Gf4, FieldId::Gf16, FieldId::Gf256];

    fn index(self) -> usize {
        match self {
            FieldId::Gf2 => 0,
            FieldId::Gf4 => 1,
            FieldId::Gf16 => 2,
            FieldId::Gf256 => 3,
        }
    }

    /// The backing table set for this field.
    pub fn descriptor(self) -> &'static Field {
        &FIELDS[self.index()]
    }

    /// Extension degree over GF(2).
    pub fn m(self) -> u32 {
        self.descriptor().m
    }

    /// Number of field elements.
    pub fn order(self) -> u16 {
        self.descriptor().order
    }

    /// Wrap a raw value in this field. Panics if out of range.
    pub fn elem(self, value: u8) -> Element {
        assert!(
            (value as u16) < self.order(),
            "value {value} out of range for {self:?}"
        );
        Element { field: self, value }
    }

    pub fn zero(self) -> Element {
        Element { field: self, value: 0 }
    }

    pub fn one(self) -> Element {
        Element { field: self, value: 1 }
    }

    /// The canonical multiplicative generator `z` (reduces to 1 in GF(2)).
    pub fn z(self) -> Element {
        self.elem(self.descriptor().exp[if self == FieldId::Gf2 { 0 } else { 1 }])
    }

    /// `z^e`, exponent taken modulo `order − 1`.
    pub fn exp(self, e: u32) -> Element {
        let f = self.descriptor();
        Element { field: self, value: f.exp[(e % (f.order as u32 - 1)) as usize] }
    }

    /// All field elements in value order.
    pub fn elements(self) -> impl Iterator<Item = Element> {
        (0..self.order()).map(move |v| Element { field: self, value: v as u8 })
    }

    /// Parse names like `gf256` / `GF16`.
    pub fn parse(s: &str) -> Option<FieldId> {
        match s.to_ascii_lowercase().as_str() {
            "gf2" => Some(FieldId::Gf2),
            "gf4" => Some(FieldId::Gf4),
            "gf16" => Some(FieldId::Gf16),
            "gf256" => Some(FieldId::Gf256),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldId::Gf2 => "gf2",
            FieldId::Gf4 => "gf4",
            FieldId::Gf16 => "gf16",
            FieldId::Gf256 => "gf256",
        }
    }
}

/// Table set for one field: modulus, degree, order and log/antilog tables.
pub struct Field {
    /// Extension degree over GF(2).
    pub m: u32,
    /// Conway polynomial as a bitmask (bit `i` = coefficient of `z^i`).
    pub modulus: u16,
    /// `2^m`.
    pub order: u16,
    /// `exp[e] = z^e`; doubled length so products of logs need no reduction.
    exp: Vec<u8>,
    /// `log[v] = e` with `z^e = v`; entry 0 is a never-read placeholder.
    log: Vec<u16>,
}

impl Field {
    /// Raw antilog table (doubled length), for table-driven hot loops that
    /// cannot afford the `Element` wrapper.
    pub(crate) fn exp_table(&self) -> &[u8] {
        &self.exp
    }

    /// Raw log table; entry 0 is a placeholder and must never be read.
    pub(crate) fn log_table(&self) -> &[u16] {
        &self.log
    }
}

impl Field {
    fn build(m: u32, modulus: u16) -> Field {
        let order: u16 = 1 << m;
        let group = (order - 1) as usize;
        let mut exp = vec![0u8; 2 * group];
        let mut log = vec![0u16; order as usize];
        let mut a: u16 = 1;
        for e in 0..group {
            exp[e] = a as u8;
            exp[e + group] = a as u8;
            log[a as usize] = e as u16;
            a <<= 1;
            if a & order != 0 {
                a ^= modulus;
            }
        }
        debug_assert_eq!(a, 1, "z must have multiplicative order 2^m − 1");
        Field { m, modulus, order, exp, log }
    }

    #[inline]
    fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    #[inline]
    fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "division by zero in GF({})", self.order);
        let group = (self.order - 1) as usize;
        self.exp[group - self.log[a as usize] as usize]
    }
}

static FIELDS: LazyLock<[Field; 4]> = LazyLock::new(|| {
    [
        Field::build(1, 0b11),          // z + 1
        Field::build(2, 0b111),         // z^2 + z + 1
        Field::build(4, 0b1_0011),      // z^4 + z + 1
        Field::build(8, 0b1_0001_1101), // z^8 + z^4 + z^3 + z^2 + 1
    ]
});

/// An element of one tower field. Copy, ordered by (field, value).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    field: FieldId,
    value: u8,
}

impl Element {
    pub fn field(self) -> FieldId {
        self.field
    }

    pub fn value(self) -> u8 {
        self.value
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Discrete log base `z`. Errors on zero.
    pub fn log(self) -> Result<u32, GaloisError> {
        if self.value == 0 {
            return Err(GaloisError::LogOfZero);
        }
        Ok(self.field.descriptor().log[self.value as usize] as u32)
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self) -> Element {
        Element { field: self.field, value: self.field.descriptor().inv(self.value) }
    }

    /// `self^e` for a signed exponent (`0^0 = 1`; negative exponents of zero panic).
    pub fn pow(self, e: i64) -> Element {
        if self.value == 0 {
            if e == 0 {
                return self.field.one();
            }
            assert!(e > 0, "negative power of zero");
            return self.field.zero();
        }
        let f = self.field.descriptor();
        let group = (f.order - 1) as i64;
        let e = (f.log[self.value as usize] as i64 * (e % group)).rem_euclid(group);
        Element { field: self.field, value: f.exp[e as usize] }
    }

    fn check_same(self, rhs: Element) -> FieldId {
        assert_eq!(self.field, rhs.field, "mixed-field arithmetic");
        self.field
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.field.name(), self.value)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl std::ops::Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        let field = self.check_same(rhs);
        Element { field, value: self.value ^ rhs.value }
    }
}

impl std::ops::Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        // Characteristic 2: subtraction is addition.
        self + rhs
    }
}

impl std::ops::Mul for Element {
    type Output = Element;
    fn mul(self, rhs: Element) -> Element {
        let field = self.check_same(rhs);
        Element { field, value: field.descriptor().mul(self.value, rhs.value) }
    }
}

impl std::ops::Div for Element {
    type Output = Element;
    fn div(self, rhs: Element) -> Element {
        self * rhs.inv()
    }
}

impl std::ops::AddAssign for Element {
    fn add_assign(&mut self, rhs: Element) {
        *self = *self + rhs;
    }
}

impl std::ops::MulAssign for Element {
    fn mul_assign(&mut self, rhs: Element) {
        *self = *self * rhs;
    }
}

/// Field addition on two elements (convenience free function).
pub fn add(a: Element, b: Element) -> Element {
    a + b
}

/// Field multiplication on two elements (convenience free function).
pub fn mul(a: Element, b: Element) -> Element {
    a * b
}

/// `z^e` in `field`.
pub fn exp_to_int(e: u32, field: FieldId) -> Element {
    field.exp(e)
}

/// Discrete log base `z`; errors on zero.
pub fn int_to_exp(a: Element) -> Result<u32, GaloisError> {
    a.log()
}

// ---------------------------------------------------------------------------
// GF(2) bit-matrix helper (≤ 16 columns), used for coordinate maps.
// ---------------------------------------------------------------------------

/// Square bit matrix over GF(2); row `r` is a bitmask of its columns.
#[derive(Clone, Debug)]
pub(crate) struct BitMat {
    pub n: usize,
    pub rows: Vec<u16>,
}

impl BitMat {
    pub fn from_columns(n: usize, cols: &[u16]) -> BitMat {
        assert_eq!(cols.len(), n);
        let mut rows = vec![0u16; n];
        for (c, col) in cols.iter().enumerate() {
            for (r, row) in rows.iter_mut().enumerate() {
                *row |= ((col >> r) & 1) << c;
            }
        }
        BitMat { n, rows }
    }

    /// `M · x` with `x` a column bit-vector.
    pub fn mul_vec(&self, x: u16) -> u16 {
        let mut y = 0u16;
        for (r, row) in self.rows.iter().enumerate() {
            y |= (((row & x).count_ones() & 1) as u16) << r;
        }
        y
    }

    /// Inverse via Gauss-Jordan on augmented rows; `None` if singular.
    pub fn inverse(&self) -> Option<BitMat> {
        let n = self.n;
        let mut aug: Vec<u32> = self
            .rows
            .iter()
            .enumerate()
            .map(|(r, &row)| (row as u32) | (1u32 << (n + r)))
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| aug[r] >> col & 1 == 1)?;
            aug.swap(col, pivot);
            for r in 0..n {
                if r != col && aug[r] >> col & 1 == 1 {
                    aug[r] ^= aug[col];
                }
            }
        }
        let rows = aug.iter().map(|&r| (r >> n) as u16).collect();
        Some(BitMat { n, rows })
    }
}

// ---------------------------------------------------------------------------
// Subfield embeddings.
// ---------------------------------------------------------------------------

/// A Conway-compatible embedding of one tower field into a larger one,
/// with the derived tables used by traces, ranks and coordinates.
#[derive(Debug)]
pub struct SubfieldEmbedding {
    pub source: FieldId,
    pub target: FieldId,
    /// Degree of the target over the embedded source.
    pub degree: u32,
    /// `fwd[v]` = image in the target of source value `v`.
    fwd: Vec<u8>,
    /// Preimage in the source of target value `v`; `0xffff` if not in the image.
    back: Vec<u16>,
    /// `trace[v]` = source value of the trace of target value `v` down to the source.
    trace: Vec<u8>,
    /// Maps target bit-coordinates to concatenated source coordinates with
    /// respect to the target basis `1, z, …, z^(degree−1)` over the source.
    coord: BitMat,
}

impl SubfieldEmbedding {
    fn build(source: FieldId, target: FieldId) -> SubfieldEmbedding {
        let (s, t) = (source.descriptor(), target.descriptor());
        let degree = t.m / s.m;
        let sgroup = (s.order - 1) as u32;
        let tgroup = (t.order - 1) as u32;
        let stride = tgroup / sgroup;

        let mut fwd = vec![0u8; s.order as usize];
        let mut back = vec![u16::MAX; t.order as usize];
        back[0] = 0;
        for e in 0..sgroup {
            let img = t.exp[(e * stride) as usize];
            fwd[s.exp[e as usize] as usize] = img;
            back[img as usize] = s.exp[e as usize] as u16;
        }

        // The image of the source generator must be a root of the source
        // modulus; this is what makes the exponent-stride map a homomorphism.
        let image_of_z = target.elem(fwd[source.z().value() as usize]);
        let mut conway = target.zero();
        for i in 0..=s.m {
            if s.modulus >> i & 1 == 1 {
                conway += image_of_z.pow(i as i64);
            }
        }
        assert!(conway.is_zero(), "embedding image must satisfy the source modulus");

        // Trace of x down to the source: sum of conjugates x^(q^i).
        let q = s.order as i64;
        let mut trace = vec![0u8; t.order as usize];
        for (v, tr) in trace.iter_mut().enumerate() {
            let x = target.elem(v as u8);
            let mut acc = target.zero();
            let mut conj = x;
            for _ in 0..degree {
                acc += conj;
                conj = conj.pow(q);
            }
            assert_ne!(back[acc.value() as usize], u16::MAX, "trace must land in the subfield");
            *tr = back[acc.value() as usize] as u8;
        }

        // Bit matrix sending source coordinates (w.r.t. 1, z, …, z^(degree−1))
        // to target bits, inverted so we can read coordinates back off.
        let mut cols = Vec::with_capacity(t.m as usize);
        for i in 0..degree {
            let basis_i = target.z().pow(i as i64);
            for bit in 0..s.m {
                cols.push((target.elem(fwd[1usize << bit]) * basis_i).value() as u16);
            }
        }
        let coord = BitMat::from_columns(t.m as usize, &cols)
            .inverse()
            .expect("tower basis must be invertible");

        SubfieldEmbedding { source, target, degree, fwd, back, trace, coord }
    }

    /// Image of a source element in the target field.
    pub fn apply(&self, a: Element) -> Element {
        assert_eq!(a.field(), self.source, "embedding applied to wrong field");
        self.target.elem(self.fwd[a.value() as usize])
    }

    /// Preimage of a target element, if it lies in the embedded subfield.
    pub fn preimage(&self, a: Element) -> Option<Element> {
        assert_eq!(a.field(), self.target, "preimage from wrong field");
        match self.back[a.value() as usize] {
            u16::MAX => None,
            v => Some(self.source.elem(v as u8)),
        }
    }

    /// Whether a target element lies in the embedded subfield.
    pub fn contains(&self, a: Element) -> bool {
        self.back[a.value() as usize] != u16::MAX
    }

    /// Trace of a target element down to the source field.
    pub fn trace(&self, a: Element) -> Element {
        assert_eq!(a.field(), self.target, "trace from wrong field");
        self.source.elem(self.trace[a.value() as usize])
    }

    /// Raw-byte trace for hot paths: target value in, source value out.
    #[inline]
    pub fn trace_value(&self, v: u8) -> u8 {
        self.trace[v as usize]
    }

    /// Coordinates of a target element over the source field with respect to
    /// the basis `1, z, …, z^(degree−1)`.
    pub fn coordinates(&self, a: Element) -> Vec<Element> {
        assert_eq!(a.field(), self.target, "coordinates from wrong field");
        let bits = self.coord.mul_vec(a.value() as u16);
        let m = self.source.m();
        (0..self.degree)
            .map(|i| self.source.elem(((bits >> (i * m)) & ((1 << m) - 1)) as u8))
            .collect()
    }
}

static EMBEDDINGS: LazyLock<Vec<Option<SubfieldEmbedding>>> = LazyLock::new(|| {
    let mut table = Vec::with_capacity(16);
    for src in FieldId::ALL {
        for dst in FieldId::ALL {
            table.push(if dst.m() % src.m() == 0 {
                Some(SubfieldEmbedding::build(src, dst))
            } else {
                None
            });
        }
    }
    table
});

/// The embedding of `source` into `target`, or an error if the pair does not
/// nest in the tower.
pub fn embedding(
    source: FieldId,
    target: FieldId,
) -> Result<&'static SubfieldEmbedding, GaloisError> {
    EMBEDDINGS[source.index() * 4 + target.index()]
        .as_ref()
        .ok_or(GaloisError::NotASubfieldPair(source, target))
}

/// Trace of `a` down to `base`. Panics if `base` is not a subfield of the
/// field of `a`; validate pairs with [`embedding`] first when in doubt.
pub fn trace(a: Element, base: FieldId) -> Element {
    embedding(base, a.field()).expect("trace requires a subfield pair").trace(a)
}

/// Rank over `base` of a set of elements of a common extension field,
/// computed by Gaussian elimination on base-coordinate vectors.
pub fn rank_over(elems: &[Element], base: FieldId) -> usize {
    let Some(&first) = elems.first() else { return 0 };
    let emb = embedding(base, first.field()).expect("rank_over requires a subfield pair");
    let mut rows: Vec<Vec<Element>> = elems
        .iter()
        .map(|&e| {
            assert_eq!(e.field(), first.field(), "mixed-field rank input");
            emb.coordinates(e)
        })
        .collect();
    let cols = emb.degree as usize;
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let inv = rows[rank][c].inv();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = rows[r][c] * inv;
                for j in c..cols {
                    let sub = rows[rank][j] * f;
                    rows[r][j] += sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dual basis of `basis` over `base`: returns `D` with
/// `trace(basis[i] · D[j]) = δ_ij`. Errors if `basis` has the wrong size or
/// is linearly dependent over `base`.
pub fn dual_basis(basis: &[Element], base: FieldId) -> Result<Vec<Element>, GaloisError> {
    let field = basis.first().map(|e| e.field()).unwrap_or(base);
    let emb = embedding(base, field)?;
    let d = emb.degree as usize;
    if basis.len() != d {
        return Err(GaloisError::WrongBasisSize { expected: d, got: basis.len() });
    }

    // Unknown D_j = Σ_t x_tj z^t with x over the base; trace-linearity turns
    // trace(B_i · D_j) = δ_ij into the base-field system T·X = I with
    // T_it = trace(B_i · z^t).
    let zpow: Vec<Element> = (0..d).map(|t| field.z().pow(t as i64)).collect();
    let mut t_mat = vec![vec![base.zero(); d]; d];
    for (i, &b) in basis.iter().enumerate() {
        for (t, &zt) in zpow.iter().enumerate() {
            t_mat[i][t] = emb.trace(b * zt);
        }
    }
    let x = invert_small(&t_mat, base).ok_or(GaloisError::NotABasis)?;
    Ok((0..d)
        .map(|j| {
            let mut acc = field.zero();
            for (t, &zt) in zpow.iter().enumerate() {
                acc += emb.apply(x[t][j]) * zt;
            }
            acc
        })
        .collect())
}

/// Gauss-Jordan inverse of a small dense matrix over one field.
fn invert_small(m: &[Vec<Element>], field: FieldId) -> Option<Vec<Vec<Element>>> {
    let n = m.len();
    let mut a: Vec<Vec<Element>> = m.iter().map(|row| {
        assert_eq!(row.len(), n);
        row.clone()
    }).collect();
    let mut inv: Vec<Vec<Element>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let f = a[col][col].inv();
        for j in 0..n {
            a[col][j] *= f;
            inv[col][j] *= f;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..n {
                    let (s, t) = (a[col][j] * f, inv[col][j] * f);
                    a[r][j] += s;
                    inv[r][j] += t;
                }
            }
        }
    }
    Some(inv)
}

/// The subspace polynomial `L_W(x) = Π_{w ∈ W} (x − w)` of a `base`-subspace
/// `W` of a tower field. Verifies that `W` really is a subspace (contains 0,
/// closed under addition and base scalars) and that the result is
/// `base`-linearized: only coefficients at exponents `|base|^i` are nonzero.
pub fn subspace_poly(w: &[Element], base: FieldId) -> Result<Polynomial, GaloisError> {
    let field = w.first().map(|e| e.field()).unwrap_or(base);
    let emb = embedding(base, field)?;
    let set: std::collections::BTreeSet<Element> = w.iter().copied().collect();
    if set.len() != w.len() || !set.contains(&field.zero()) {
        return Err(GaloisError::NotASubspace);
    }
    let q = base.order() as usize;
    if !set.len().is_power_of_two() || {
        let mut n = set.len();
        let mut ok = true;
        while n > 1 {
            if n % q != 0 {
                ok = false;
                break;
            }
            n /= q;
        }
        !ok
    } {
        return Err(GaloisError::NotASubspace);
    }
    for &a in &set {
        for &b in &set {
            if !set.contains(&(a + b)) {
                return Err(GaloisError::NotASubspace);
            }
        }
        for s in base.elements() {
            if !set.contains(&(emb.apply(s) * a)) {
                return Err(GaloisError::NotASubspace);
            }
        }
    }

    let mut poly = Polynomial::one(field);
    for &root in &set {
        poly = poly.mul(&Polynomial::from_coeffs(field, &[root, field.one()]));
    }
    debug_assert!(poly
        .coeffs()
        .iter()
        .enumerate()
        .all(|(i, c)| c.is_zero() || is_power_of(i, q)));
    Ok(poly)
}

fn is_power_of(mut n: usize, q: usize) -> bool {
    if n == 0 {
        return false;
    }
    while n % q == 0 {
        n /= q;
    }
    n == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent multiplication oracle: carry-less product reduced by the
    /// modulus, bit by bit.
    fn oracle_mul(field: FieldId, a: u8, b: u8) -> u8 {
        let f = field.descriptor();
        let mut prod: u32 = 0;
        for i in 0..f.m {
            if a >> i & 1 == 1 {
                prod ^= (b as u32) << i;
            }
        }
        for i in (f.m..2 * f.m).rev() {
            if prod >> i & 1 == 1 {
                prod ^= (f.modulus as u32) << (i - f.m);
            }
        }
        prod as u8
    }

    #[test]
    fn multiplication_matches_polynomial_oracle() {
        for field in FieldId::ALL {
            for a in field.elements() {
                for b in field.elements() {
                    assert_eq!(
                        (a * b).value(),
                        oracle_mul(field, a.value(), b.value()),
                        "{a:?} * {b:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn addition_is_xor_and_characteristic_two() {
        let f = FieldId::Gf256;
        for a in f.elements() {
            assert!((a + a).is_zero());
            for b in f.elements() {
                assert_eq!((a + b).value(), a.value() ^ b.value());
                assert_eq!(a + b, b + a);
                assert_eq!(a - b, a + b);
            }
        }
    }

    #[test]
    fn known_generator_powers_in_gf256() {
        let f = FieldId::Gf256;
        for (e, v) in [(229u32, 122u8), (25, 3), (50, 5), (26, 6), (198, 7), (3, 8)] {
            assert_eq!(exp_to_int(e, f).value(), v, "z^{e}");
            assert_eq!(int_to_exp(f.elem(v)).unwrap(), e, "log {v}");
        }
        assert_eq!(f.z().value(), 2);
    }

    #[test]
    fn log_exp_round_trip_and_inverses() {
        for field in FieldId::ALL {
            let group = field.order() as u32 - 1;
            for e in 0..group {
                assert_eq!(int_to_exp(field.exp(e)).unwrap(), e);
            }
            for a in field.elements().skip(1) {
                assert_eq!(a * a.inv(), field.one());
                assert_eq!(a / a, field.one());
                assert_eq!(a.pow(group as i64), field.one());
            }
            assert_eq!(int_to_exp(field.zero()), Err(GaloisError::LogOfZero));
        }
    }

    #[test]
    fn embeddings_are_field_homomorphisms() {
        for src in FieldId::ALL {
            for dst in FieldId::ALL {
                let Ok(emb) = embedding(src, dst) else {
                    assert_ne!(dst.m() % src.m(), 0);
                    continue;
                };
                for a in src.elements() {
                    for b in src.elements() {
                        assert_eq!(emb.apply(a + b), emb.apply(a) + emb.apply(b));
                        assert_eq!(emb.apply(a * b), emb.apply(a) * emb.apply(b));
                    }
                    assert_eq!(emb.preimage(emb.apply(a)), Some(a));
                }
                assert_eq!(emb.apply(src.one()), dst.one());
            }
        }
    }

    #[test]
    fn embeddings_compose_through_the_tower() {
        let lo = embedding(FieldId::Gf4, FieldId::Gf16).unwrap();
        let hi = embedding(FieldId::Gf16, FieldId::Gf256).unwrap();
        let direct = embedding(FieldId::Gf4, FieldId::Gf256).unwrap();
        for a in FieldId::Gf4.elements() {
            assert_eq!(hi.apply(lo.apply(a)), direct.apply(a));
        }
        // Spot values: the GF(16) generator lands on z^17, the GF(4) one on z^85.
        assert_eq!(hi.apply(FieldId::Gf16.z()), FieldId::Gf256.exp(17));
        assert_eq!(direct.apply(FieldId::Gf4.z()), FieldId::Gf256.exp(85));
    }

    #[test]
    fn invalid_pairs_are_rejected() {
        assert_eq!(
            embedding(FieldId::Gf16, FieldId::Gf4).unwrap_err(),
            GaloisError::NotASubfieldPair(FieldId::Gf16, FieldId::Gf4),
        );
        assert!(embedding(FieldId::Gf256, FieldId::Gf16).is_err());
    }

    /// Trace oracle by repeated squaring, independent of the cached tables.
    fn oracle_trace(a: Element, base: FieldId) -> Element {
        let q = base.order() as i64;
        let d = a.field().m() / base.m();
        let mut acc = a.field().zero();
        let mut conj = a;
        for _ in 0..d {
            acc += conj;
            conj = conj.pow(q);
        }
        embedding(base, a.field()).unwrap().preimage(acc).unwrap()
    }

    #[test]
    fn trace_to_gf2_is_balanced_and_matches_oracle() {
        let mut ones = 0;
        for a in FieldId::Gf256.elements() {
            let t = trace(a, FieldId::Gf2);
            assert_eq!(t, oracle_trace(a, FieldId::Gf2));
            ones += t.value() as usize;
        }
        // The trace functional is a nonzero GF(2)-linear map, so it splits
        // the field evenly.
        assert_eq!(ones, 128);
    }

    #[test]
    fn trace_is_base_linear_and_transitive() {
        for base in [FieldId::Gf2, FieldId::Gf4, FieldId::Gf16] {
            let emb = embedding(base, FieldId::Gf256).unwrap();
            for s in base.elements() {
                for a in FieldId::Gf256.elements().step_by(7) {
                    assert_eq!(trace(emb.apply(s) * a, base), s * trace(a, base));
                }
            }
        }
        // Transitivity: tracing through GF(16) or GF(4) agrees with tracing
        // straight down to GF(2).
        for a in FieldId::Gf256.elements() {
            for mid in [FieldId::Gf4, FieldId::Gf16] {
                assert_eq!(trace(trace(a, mid), FieldId::Gf2), trace(a, FieldId::Gf2));
            }
        }
    }

    /// Rank oracle: multiply by a GF(2)-basis of the base field and row-reduce
    /// bit vectors over GF(2), then divide by the base degree.
    fn oracle_rank(elems: &[Element], base: FieldId) -> usize {
        let field = elems[0].field();
        let emb = embedding(base, field).unwrap();
        let mut rows: Vec<u16> = Vec::new();
        for &u in elems {
            for bit in 0..base.m() {
                rows.push((emb.apply(base.elem(1 << bit)) * u).value() as u16);
            }
        }
        let mut rank = 0;
        for col in 0..field.m() {
            if let Some(p) = (rank..rows.len()).find(|&r| rows[r] >> col & 1 == 1) {
                rows.swap(rank, p);
                let pivot = rows[rank];
                for (r, row) in rows.iter_mut().enumerate() {
                    if r != rank && *row >> col & 1 == 1 {
                        *row ^= pivot;
                    }
                }
                rank += 1;
            }
        }
        rank / base.m() as usize
    }

    #[test]
    fn rank_over_matches_oracle_on_random_sets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let field = [FieldId::Gf16, FieldId::Gf256][rng.gen_range(0..2)];
            let base = match field {
                FieldId::Gf16 => [FieldId::Gf2, FieldId::Gf4][rng.gen_range(0..2)],
                _ => [FieldId::Gf2, FieldId::Gf4, FieldId::Gf16][rng.gen_range(0..3)],
            };
            let len = rng.gen_range(0..=9);
            let elems: Vec<Element> = (0..len)
                .map(|_| field.elem(rng.gen_range(0..field.order()) as u8))
                .collect();
            if elems.is_empty() {
                assert_eq!(rank_over(&elems, base), 0);
            } else {
                assert_eq!(rank_over(&elems, base), oracle_rank(&elems, base));
            }
        }
    }

    #[test]
    fn rank_over_known_cases() {
        let f16 = FieldId::Gf16;
        let pows: Vec<Element> = (0..4).map(|i| f16.z().pow(i)).collect();
        assert_eq!(rank_over(&pows, FieldId::Gf2), 4);
        assert_eq!(rank_over(&pows, FieldId::Gf4), 2);
        assert_eq!(rank_over(&[f16.zero()], FieldId::Gf2), 0);
        let f = FieldId::Gf256;
        assert_eq!(rank_over(&[f.one(), f.z(), f.one() + f.z()], FieldId::Gf2), 2);
    }

    #[test]
    fn dual_basis_pairs_by_trace() {
        for (field, base) in [
            (FieldId::Gf256, FieldId::Gf2),
            (FieldId::Gf256, FieldId::Gf4),
            (FieldId::Gf256, FieldId::Gf16),
            (FieldId::Gf16, FieldId::Gf2),
            (FieldId::Gf16, FieldId::Gf4),
            (FieldId::Gf4, FieldId::Gf2),
        ] {
            let d = (field.m() / base.m()) as usize;
            let basis: Vec<Element> = (0..d).map(|i| field.z().pow(i as i64)).collect();
            let dual = dual_basis(&basis, base).unwrap();
            for (i, &b) in basis.iter().enumerate() {
                for (j, &dj) in dual.iter().enumerate() {
                    let expect = if i == j { base.one() } else { base.zero() };
                    assert_eq!(trace(b * dj, base), expect);
                }
            }
            // Duality is an involution.
            let back = dual_basis(&dual, base).unwrap();
            assert_eq!(back, basis);
        }
    }

    #[test]
    fn dual_basis_rejects_bad_input() {
        let f = FieldId::Gf256;
        let dep: Vec<Element> = (0..7).map(|i| f.z().pow(i)).chain([f.one()]).collect();
        assert_eq!(dual_basis(&dep, FieldId::Gf2).unwrap_err(), GaloisError::NotABasis);
        assert_eq!(
            dual_basis(&[f.one()], FieldId::Gf2).unwrap_err(),
            GaloisError::WrongBasisSize { expected: 8, got: 1 },
        );
    }

    #[test]
    fn subspace_poly_small_cases() {
        let f = FieldId::Gf256;
        let l0 = subspace_poly(&[f.zero()], FieldId::Gf2).unwrap();
        assert_eq!(l0.coeffs(), &[f.zero(), f.one()]); // x

        let l1 = subspace_poly(&[f.zero(), f.one()], FieldId::Gf2).unwrap();
        assert_eq!(l1.coeffs(), &[f.zero(), f.one(), f.one()]); // x^2 + x

        // The embedded GF(4) inside GF(256) is a GF(2)- and a GF(4)-subspace.
        let emb = embedding(FieldId::Gf4, FieldId::Gf256).unwrap();
        let w: Vec<Element> = FieldId::Gf4.elements().map(|a| emb.apply(a)).collect();
        let l2 = subspace_poly(&w, FieldId::Gf2).unwrap();
        assert_eq!(l2.degree(), Some(4));
        // Linearized: kernel is exactly W and the map is additive.
        for &x in &w {
            assert!(l2.eval(x).is_zero());
        }
        for a in f.elements() {
            for b in [f.z(), f.exp(100)] {
                assert_eq!(l2.eval(a + b), l2.eval(a) + l2.eval(b));
            }
        }
    }

    #[test]
    fn subspace_poly_rejects_non_subspaces() {
        let f = FieldId::Gf16;
        // Missing zero.
        assert_eq!(
            subspace_poly(&[f.one(), f.z()], FieldId::Gf2).unwrap_err(),
            GaloisError::NotASubspace
        );
        // Not additively closed.
        assert_eq!(
            subspace_poly(&[f.zero(), f.one(), f.z(), f.elem(4)], FieldId::Gf2).unwrap_err(),
            GaloisError::NotASubspace
        );
        // GF(4)-subspace check: {0,1} is GF(2)- but not GF(4)-closed.
        assert_eq!(
            subspace_poly(&[f.zero(), f.one()], FieldId::Gf4).unwrap_err(),
            GaloisError::NotASubspace
        );
    }
}
