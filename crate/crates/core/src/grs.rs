//! Generalized Reed-Solomon codes and the systematic constructions used by
//! practical storage systems.
//!
//! Everything with a valid GRS description is normalized into [`GrsCode`]
//! (evaluation points `A` plus column multipliers `λ`), since repair theory
//! operates on evaluation points. The constructions covered:
//!
//! * [`classical_rs`] — plain RS(A,k), `λ = 1`.
//! * [`cauchy_systematic`] / [`cauchy_to_grs`] — the systematic Cauchy matrix
//!   `[I_k | C]`, `c_ij = 1/(x_i + y_j)`, and its exact GRS description.
//! * [`backblaze_code`] — the `V_1^{-1}V` systematic Vandermonde form; same
//!   codeword set as RS([0,n−1], k).
//! * [`genpoly_code`] — the generator-polynomial code `g(x) = Π (x − z^i)`,
//!   returned through its dual description.
//! * [`vandermonde_systematic`] — the `[I_k | V]` form that is *not* MDS in
//!   general; kept as a raw matrix and probed with [`is_mds`].

use std::fmt;
use std::ops::Index;

use thiserror::Error;

use crate::galois::{Element, FieldId};
use crate::poly::Polynomial;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrsError {
    #[error("evaluation points must be distinct")]
    RepeatedPoints,
    #[error("multipliers must be nonzero")]
    ZeroMultiplier,
    #[error("need 1 <= k < n <= field order, got n={n}, k={k}")]
    BadDimensions { n: usize, k: usize },
    #[error("expected {expected} symbols, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("invalid code descriptor: {0}")]
    Parse(String),
}

// ---------------------------------------------------------------------------
// Dense matrices over one field.
// ---------------------------------------------------------------------------

/// Row-major dense matrix over a single tower field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldId,
    rows: usize,
    cols: usize,
    data: Vec<Element>,
}

impl Matrix {
    pub fn zero(field: FieldId, rows: usize, cols: usize) -> Matrix {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldId, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(
        field: FieldId,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Element,
    ) -> Matrix {
        let mut m = Matrix::zero(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, i: usize, j: usize, v: Element) {
        assert_eq!(v.field(), self.field, "mixed-field matrix entry");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Element] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Matrix product.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        assert_eq!(self.field, rhs.field);
        Matrix::from_fn(self.field, self.rows, rhs.cols, |i, j| {
            let mut acc = self.field.zero();
            for t in 0..self.cols {
                acc += self[(i, t)] * rhs[(t, j)];
            }
            acc
        })
    }

    /// Row-vector times matrix.
    pub fn left_mul_vec(&self, u: &[Element]) -> Vec<Element> {
        assert_eq!(u.len(), self.rows, "vector length must match row count");
        (0..self.cols)
            .map(|j| {
                let mut acc = self.field.zero();
                for (i, &ui) in u.iter().enumerate() {
                    acc += ui * self[(i, j)];
                }
                acc
            })
            .collect()
    }

    /// Keep the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    /// Keep the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), self.cols, |i, j| self[(rows[i], j)])
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.field, other.field);
        Matrix::from_fn(self.field, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)]
            } else {
                other[(i - self.rows, j)]
            }
        })
    }

    /// Place `other` to the right of `self`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.field, other.field);
        Matrix::from_fn(self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        })
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Rank by Gaussian elimination on a working copy.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            let Some(p) = (rank..a.rows).find(|&r| !a[(r, col)].is_zero()) else { continue };
            for j in 0..a.cols {
                let tmp = a[(rank, j)];
                a.set(rank, j, a[(p, j)]);
                a.set(p, j, tmp);
            }
            let inv = a[(rank, col)].inv();
            for r in 0..a.rows {
                if r != rank && !a[(r, col)].is_zero() {
                    let f = a[(r, col)] * inv;
                    for j in col..a.cols {
                        let sub = a[(rank, j)] * f;
                        a.set(r, j, a[(r, j)] + sub);
                    }
                }
            }
            rank += 1;
            if rank == a.rows {
                break;
            }
        }
        rank
    }

    /// Gauss-Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "only square matrices invert");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(self.field, n);
        for col in 0..n {
            let p = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            for j in 0..n {
                let (x, y) = (a[(col, j)], a[(p, j)]);
                a.set(col, j, y);
                a.set(p, j, x);
                let (x, y) = (inv[(col, j)], inv[(p, j)]);
                inv.set(col, j, y);
                inv.set(p, j, x);
            }
            let f = a[(col, col)].inv();
            for j in 0..n {
                a.set(col, j, a[(col, j)] * f);
                inv.set(col, j, inv[(col, j)] * f);
            }
            for r in 0..n {
                if r != col && !a[(r, col)].is_zero() {
                    let f = a[(r, col)];
                    for j in 0..n {
                        let s = a[(col, j)] * f;
                        a.set(r, j, a[(r, j)] + s);
                        let s = inv[(col, j)] * f;
                        inv.set(r, j, inv[(r, j)] + s);
                    }
                }
            }
        }
        Some(inv)
    }

    /// Basis-independent codeword-set equality:
    /// rank(stack) = rank(self) = rank(other).
    pub fn same_row_space(&self, other: &Matrix) -> bool {
        if self.cols != other.cols || self.field != other.field {
            return false;
        }
        let (r1, r2) = (self.rank(), other.rank());
        r1 == r2 && self.vstack(other).rank() == r1
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Element;
    fn index(&self, (i, j): (usize, usize)) -> &Element {
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {}", self.rows, self.cols, self.field.name())?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// GRS codes.
// ---------------------------------------------------------------------------

/// A generalized Reed-Solomon code GRS(A, k, λ): the codeword of a message
/// polynomial `f` (deg f < k) is `(λ_1 f(α_1), …, λ_n f(α_n))`.
#[derive(Clone, PartialEq, Eq)]
pub struct GrsCode {
    field: FieldId,
    k: usize,
    points: Vec<Element>,
    multipliers: Vec<Element>,
}

impl GrsCode {
    pub fn new(
        field: FieldId,
        points: Vec<Element>,
        k: usize,
        multipliers: Vec<Element>,
    ) -> Result<GrsCode, GrsError> {
        let n = points.len();
        if !(1 <= k && k < n && n <= field.order() as usize) {
            return Err(GrsError::BadDimensions { n, k });
        }
        if multipliers.len() != n {
            return Err(GrsError::SizeMismatch { expected: n, got: multipliers.len() });
        }
        let mut seen = [false; 256];
        for &a in &points {
            assert_eq!(a.field(), field, "evaluation point from wrong field");
            if std::mem::replace(&mut seen[a.value() as usize], true) {
                return Err(GrsError::RepeatedPoints);
            }
        }
        for &l in &multipliers {
            assert_eq!(l.field(), field, "multiplier from wrong field");
            if l.is_zero() {
                return Err(GrsError::ZeroMultiplier);
            }
        }
        Ok(GrsCode { field, k, points, multipliers })
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of parities, `r = n − k`.
    pub fn r(&self) -> usize {
        self.n() - self.k
    }

    pub fn points(&self) -> &[Element] {
        &self.points
    }

    pub fn multipliers(&self) -> &[Element] {
        &self.multipliers
    }

    pub fn is_plain_rs(&self) -> bool {
        self.multipliers.iter().all(|l| *l == self.field.one())
    }

    /// Vandermonde-with-multipliers generator: entry (i,j) = λ_j α_j^i.
    pub fn generator(&self) -> GeneratorMatrix {
        let mat = Matrix::from_fn(self.field, self.k, self.n(), |i, j| {
            self.multipliers[j] * self.points[j].pow(i as i64)
        });
        GeneratorMatrix { code: Some(self.clone()), mat }
    }

    /// Codeword of a message polynomial (deg < k): `(λ_j f(α_j))_j`.
    pub fn encode_poly(&self, f: &Polynomial) -> Vec<Element> {
        assert!(f.degree().is_none_or(|d| d < self.k), "message degree must be < k");
        self.points
            .iter()
            .zip(&self.multipliers)
            .map(|(&a, &l)| l * f.eval(a))
            .collect()
    }

    /// The dual code: GRS(A, n−k, γ) with
    /// `γ_j = 1 / (λ_j · Π_{s≠j} (α_j − α_s))`.
    ///
    /// Dual multiplier vectors are only determined up to a global nonzero
    /// scalar; the result is canonicalized so that `γ_n = 1`.
    pub fn dual(&self) -> GrsCode {
        let mut gamma: Vec<Element> = (0..self.n())
            .map(|j| {
                let mut prod = self.multipliers[j];
                for (s, &a) in self.points.iter().enumerate() {
                    if s != j {
                        prod *= self.points[j] + a;
                    }
                }
                prod.inv()
            })
            .collect();
        let scale = gamma.last().expect("codes are nonempty").inv();
        for g in &mut gamma {
            *g *= scale;
        }
        GrsCode {
            field: self.field,
            k: self.r(),
            points: self.points.clone(),
            multipliers: gamma,
        }
    }

    /// Membership test via the dual generator (all parities must vanish).
    pub fn is_codeword(&self, w: &[Element]) -> bool {
        if w.len() != self.n() {
            return false;
        }
        let dual = self.dual();
        let h = dual.generator();
        (0..dual.k()).all(|i| {
            let mut acc = self.field.zero();
            for (j, &wj) in w.iter().enumerate() {
                acc += h.matrix()[(i, j)] * wj;
            }
            acc.is_zero()
        })
    }
}

impl fmt::Debug for GrsCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GRS(n={}, k={}, {}, A=[{}], λ=[{}])",
            self.n(),
            self.k,
            self.field.name(),
            join(&self.points),
            join(&self.multipliers),
        )
    }
}

fn join(v: &[Element]) -> String {
    v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

/// A `k×n` full-rank generator matrix, optionally tied to the [`GrsCode`] it
/// generates (absent for the raw Vandermonde-systematic construction).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    code: Option<GrsCode>,
    mat: Matrix,
}

impl GeneratorMatrix {
    pub fn from_matrix(mat: Matrix) -> GeneratorMatrix {
        assert_eq!(mat.rank(), mat.rows(), "generator must have full row rank");
        GeneratorMatrix { code: None, mat }
    }

    pub fn code(&self) -> Option<&GrsCode> {
        self.code.as_ref()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn k(&self) -> usize {
        self.mat.rows()
    }

    pub fn n(&self) -> usize {
        self.mat.cols()
    }
}

/// Plain RS(A,k): GRS with all multipliers one.
pub fn classical_rs(field: FieldId, points: Vec<Element>, k: usize) -> Result<GrsCode, GrsError> {
    let n = points.len();
    GrsCode::new(field, points, k, vec![field.one(); n])
}

/// Codeword `u · G`.
pub fn encode(g: &GeneratorMatrix, u: &[Element]) -> Result<Vec<Element>, GrsError> {
    if u.len() != g.k() {
        return Err(GrsError::SizeMismatch { expected: g.k(), got: u.len() });
    }
    Ok(g.matrix().left_mul_vec(u))
}

/// ISA-L's Cauchy-based systematic generator `[I_k | C]` over GF(256),
/// `c_ij = 1/(x_i + y_j)` with `x_i = i−1`, `y_j = k+j−1` as field integers.
pub fn cauchy_systematic(n: usize, k: usize) -> Result<GeneratorMatrix, GrsError> {
    let field = FieldId::Gf256;
    if !(1 <= k && k < n && n <= field.order() as usize) {
        return Err(GrsError::BadDimensions { n, k });
    }
    let cauchy = Matrix::from_fn(field, k, n - k, |i, j| {
        (field.elem(i as u8) + field.elem((k + j) as u8)).inv()
    });
    let mat = Matrix::identity(field, k).hstack(&cauchy);
    Ok(GeneratorMatrix { code: Some(cauchy_to_grs(n, k)?), mat })
}

/// The GRS description of [`cauchy_systematic`]: `A = [0, n−1]` and the
/// two-case closed-form multipliers
/// `λ_j = 1/Π_{s≠j, s≤k}(x_s + x_j)` for `j ≤ k`, and
/// `λ_j = 1/Π_{s≤k}(x_s + y_{j−k})` for `j > k`.
pub fn cauchy_to_grs(n: usize, k: usize) -> Result<GrsCode, GrsError> {
    let field = FieldId::Gf256;
    if !(1 <= k && k < n && n <= field.order() as usize) {
        return Err(GrsError::BadDimensions { n, k });
    }
    let points: Vec<Element> = (0..n).map(|j| field.elem(j as u8)).collect();
    let multipliers: Vec<Element> = (0..n)
        .map(|j| {
            let mut prod = field.one();
            for s in 0..k {
                if s != j {
                    prod *= points[s] + points[j];
                }
            }
            prod.inv()
        })
        .collect();
    GrsCode::new(field, points, k, multipliers)
}

/// Backblaze's systematic form `V_1^{-1} V` over `A = [0, n−1]`; same
/// codeword set as the plain RS over those points.
pub fn backblaze_code(n: usize, k: usize) -> Result<GeneratorMatrix, GrsError> {
    let field = FieldId::Gf256;
    let points: Vec<Element> = (0..n).map(|j| field.elem(j as u8)).collect();
    let code = classical_rs(field, points, k)?;
    let vand = code.generator().mat;
    let v1 = vand.select_columns(&(0..k).collect::<Vec<_>>());
    let inv = v1.inverse().expect("Vandermonde block over distinct points is invertible");
    Ok(GeneratorMatrix { code: Some(code), mat: inv.mul(&vand) })
}

/// The generator-polynomial code with `g(x) = Π_{i<r} (x − z^i)` over
/// GF(256), via its dual description: the dual of RS({1, z, …, z^{n−1}}, r).
/// Codewords are the coefficient vectors of multiples of `g` of degree < n.
pub fn genpoly_code(n: usize, r: usize) -> Result<GrsCode, GrsError> {
    let field = FieldId::Gf256;
    if n > field.order() as usize - 1 {
        // Points are the n distinct powers z^0 … z^{n−1}; z has order 255.
        return Err(GrsError::BadDimensions { n, k: n - r });
    }
    let points: Vec<Element> = (0..n).map(|j| field.exp(j as u32)).collect();
    Ok(classical_rs(field, points, r)?.dual())
}

/// The generator polynomial `g(x) = Π_{i<r} (x − z^i)` itself.
pub fn generator_polynomial(r: usize) -> Polynomial {
    let field = FieldId::Gf256;
    let roots: Vec<Element> = (0..r).map(|i| field.exp(i as u32)).collect();
    Polynomial::from_roots(field, &roots)
}

/// The *invalid in general* systematic construction `[I_k | V]` with
/// Vandermonde `V = (x_j^{i−1})`, `x_j = z^{j−1}`. Returned as a raw matrix:
/// it has no GRS description and is not MDS for all parameters.
pub fn vandermonde_systematic(n: usize, k: usize) -> Result<GeneratorMatrix, GrsError> {
    let field = FieldId::Gf256;
    if !(1 <= k && k < n && n <= field.order() as usize) {
        return Err(GrsError::BadDimensions { n, k });
    }
    let v = Matrix::from_fn(field, k, n - k, |i, j| field.z().pow(j as i64).pow(i as i64));
    Ok(GeneratorMatrix { code: None, mat: Matrix::identity(field, k).hstack(&v) })
}

/// Visit all `t`-subsets of `0..n` in lexicographic order; stop early if the
/// callback returns `false`.
pub(crate) fn for_each_combination(
    n: usize,
    t: usize,
    mut f: impl FnMut(&[usize]) -> bool,
) -> bool {
    if t > n {
        return true;
    }
    let mut idx: Vec<usize> = (0..t).collect();
    loop {
        if !f(&idx) {
            return false;
        }
        // Advance to the next combination.
        let mut i = t;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] != i + n - t {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..t {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// MDS test: every `k×k` column subset of the generator is invertible.
pub fn is_mds(g: &GeneratorMatrix) -> bool {
    let (k, n) = (g.k(), g.n());
    for_each_combination(n, k, |cols| g.matrix().select_columns(cols).rank() == k)
}

/// The first (smallest `n`, then smallest `k`) Vandermonde-systematic code
/// that fails the MDS property, together with a singular square submatrix of
/// its `V` block (row indices, column indices, both 0-based).
pub fn first_vandermonde_mds_failure() -> (usize, usize, Vec<usize>, Vec<usize>) {
    let field = FieldId::Gf256;
    // V for (n,k) is the top-left k×(n−k) corner of z^(i·j); a systematic
    // [I|V] code is MDS iff every square submatrix of V is invertible.
    for n in 3..=field.order() as usize {
        for k in 1..n {
            let m = n - k;
            let v = Matrix::from_fn(field, k, m, |i, j| field.z().pow((i * j) as i64));
            let mut witness = None;
            for t in 2..=k.min(m) {
                let found = !for_each_combination(k, t, |rows| {
                    for_each_combination(m, t, |cols| {
                        let sub = v.select_rows(rows).select_columns(cols);
                        if sub.rank() < t {
                            witness = Some((rows.to_vec(), cols.to_vec()));
                            false
                        } else {
                            true
                        }
                    })
                });
                if found {
                    break;
                }
            }
            if let Some((rows, cols)) = witness {
                return (n, k, rows, cols);
            }
        }
    }
    unreachable!("a non-MDS Vandermonde-systematic code exists within the field");
}

// ---------------------------------------------------------------------------
// Named code families.
// ---------------------------------------------------------------------------

/// ISA-L-style plain RS over GF(256) with `A = [0, n−1]`.
pub fn isal_code(n: usize, k: usize) -> Result<GrsCode, GrsError> {
    let field = FieldId::Gf256;
    let points: Vec<Element> = (0..n).map(|j| field.elem(j as u8)).collect();
    classical_rs(field, points, k)
}

/// The GF(16) evaluation-point family `A = {0, 1, z16, …, z16^{n−2}}`, n ≤ 16.
pub fn f16_code(n: usize, k: usize) -> Result<GrsCode, GrsError> {
    let field = FieldId::Gf16;
    if n > 16 {
        return Err(GrsError::BadDimensions { n, k });
    }
    let mut points = vec![field.zero()];
    points.extend((0..n.saturating_sub(1)).map(|i| field.exp(i as u32)));
    classical_rs(field, points, k)
}

/// [`f16_code`] with its points embedded into GF(256): the code actually
/// deployed after lifting a GF(16) repair scheme.
pub fn f16_code_in_gf256(n: usize, k: usize) -> Result<GrsCode, GrsError> {
    let emb = crate::galois::embedding(FieldId::Gf16, FieldId::Gf256).unwrap();
    let small = f16_code(n, k)?;
    let points: Vec<Element> = small.points().iter().map(|&a| emb.apply(a)).collect();
    classical_rs(FieldId::Gf256, points, k)
}

// ---------------------------------------------------------------------------
// Code descriptor lines.
// ---------------------------------------------------------------------------

/// One-line text descriptor:
/// `code <name> field=<gfN> n=<n> k=<k> A=<comma ints> lambda=<comma ints>`.
pub fn format_descriptor(name: &str, code: &GrsCode) -> String {
    format!(
        "code {} field={} n={} k={} A={} lambda={}",
        name,
        code.field().name(),
        code.n(),
        code.k(),
        join(code.points()),
        join(code.multipliers()),
    )
}

/// Parse a [`format_descriptor`] line back into a name and a code.
pub fn parse_descriptor(line: &str) -> Result<(String, GrsCode), GrsError> {
    let err = |msg: &str| GrsError::Parse(format!("{msg}: {line}"));
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some("code") {
        return Err(err("expected leading `code`"));
    }
    let name = tokens.next().ok_or_else(|| err("missing name"))?.to_string();
    let (mut field, mut n, mut k, mut a, mut lambda) = (None, None, None, None, None);
    for tok in tokens {
        let (key, value) = tok.split_once('=').ok_or_else(|| err("expected key=value"))?;
        match key {
            "field" => field = Some(FieldId::parse(value).ok_or_else(|| err("bad field"))?),
            "n" => n = Some(value.parse::<usize>().map_err(|_| err("bad n"))?),
            "k" => k = Some(value.parse::<usize>().map_err(|_| err("bad k"))?),
            "A" => a = Some(parse_values(value).map_err(|_| err("bad A"))?),
            "lambda" => lambda = Some(parse_values(value).map_err(|_| err("bad lambda"))?),
            _ => return Err(err("unknown key")),
        }
    }
    let field = field.ok_or_else(|| err("missing field"))?;
    let n = n.ok_or_else(|| err("missing n"))?;
    let k = k.ok_or_else(|| err("missing k"))?;
    let a = a.ok_or_else(|| err("missing A"))?;
    let lambda = lambda.ok_or_else(|| err("missing lambda"))?;
    if a.len() != n || lambda.len() != n {
        return Err(err("A/lambda length disagrees with n"));
    }
    let to_elems = |vals: Vec<u16>| -> Result<Vec<Element>, GrsError> {
        vals.into_iter()
            .map(|v| {
                if v < field.order() {
                    Ok(field.elem(v as u8))
                } else {
                    Err(err("value out of field range"))
                }
            })
            .collect()
    };
    let code = GrsCode::new(field, to_elems(a)?, k, to_elems(lambda)?)?;
    Ok((name, code))
}

fn parse_values(s: &str) -> Result<Vec<u16>, std::num::ParseIntError> {
    s.split(',').map(|v| v.parse::<u16>()).collect()
}
