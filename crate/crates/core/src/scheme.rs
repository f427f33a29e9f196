//! Linear trace repair schemes for (generalized) Reed-Solomon codes.
//!
//! A scheme for recovering component `j*` of codewords of a code over `F`
//! with base field `K ⊆ F` is a set of `[F:K]` check polynomials of degree
//! at most `r−1` whose evaluations at `α_{j*}` are linearly independent over
//! `K` (the full-rank condition). Each helper `j ≠ j*` then only ships
//! `r_j = rank_K{g_i(α_j)}` base-field symbols — traces of its symbol against
//! a spanning set — instead of its whole symbol, and the receiver rebuilds
//! `c_{j*}` through a dual basis. The scheme's bandwidth is `Σ_{j≠j*} r_j`
//! base symbols, reported here in bits.
//!
//! Besides representation ([`CheckSet`]) and verification ([`RepairScheme`]),
//! the module implements the bandwidth-preserving transforms used to move
//! schemes between fields and codes: degree normalization, lifting a
//! subfield-code scheme to an extension code, extending a scheme to a finer
//! base field, and transporting a scheme along an affine map of the
//! evaluation points.

use std::fmt;

use thiserror::Error;

use crate::galois::{self, Element, FieldId, GaloisError};
use crate::grs::{self, GrsCode, GrsError};
use crate::poly::Polynomial;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("scheme needs {expected} check polynomials, got {got}")]
    WrongPolyCount { expected: usize, got: usize },
    #[error("check polynomial {index} has degree {degree}, maximum is {max}")]
    DegreeTooHigh { index: usize, degree: usize, max: usize },
    #[error("base field must embed in the code field")]
    BadBase,
    #[error("target index {target} out of range for length {n}")]
    BadTarget { target: usize, n: usize },
    #[error("check polynomial from the wrong field")]
    WrongField,
    #[error("full-rank condition fails at the target position")]
    FullRankFailed,
    #[error("all check polynomials are zero")]
    AllZero,
    #[error("input vector is not a codeword")]
    NonCodeword,
    #[error("expected {expected} codeword symbols, got {got}")]
    WrongCodewordLength { expected: usize, got: usize },
    #[error("supplied elements do not form a basis of the required extension")]
    BadBasis,
    #[error("transport requires a nonzero scale")]
    ZeroScale,
    #[error("invalid scheme file: {0}")]
    Parse(String),
    #[error(transparent)]
    Grs(#[from] GrsError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
}

/// Per-position ranks `r_1..r_n` over the scheme's base field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankProfile(pub Vec<u8>);

/// Achievable repair bandwidth per position, in bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandwidthProfile(pub Vec<u32>);

impl BandwidthProfile {
    /// The summary figure usually quoted for a profile: the worst position.
    pub fn max_bits(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

/// A candidate repair scheme: target position, base field, and one check
/// polynomial per base-degree of the code field. Structurally validated;
/// the full-rank condition is checked by [`RepairScheme::verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckSet {
    code: GrsCode,
    target: usize,
    base: FieldId,
    polys: Vec<Polynomial>,
}

impl CheckSet {
    pub fn new(
        code: GrsCode,
        target: usize,
        base: FieldId,
        polys: Vec<Polynomial>,
    ) -> Result<CheckSet, SchemeError> {
        let field = code.field();
        let emb = galois::embedding(base, field).map_err(|_| SchemeError::BadBase)?;
        if target >= code.n() {
            return Err(SchemeError::BadTarget { target, n: code.n() });
        }
        let expected = emb.degree as usize;
        if polys.len() != expected {
            return Err(SchemeError::WrongPolyCount { expected, got: polys.len() });
        }
        let max = code.r() - 1;
        for (index, p) in polys.iter().enumerate() {
            if p.field() != field {
                return Err(SchemeError::WrongField);
            }
            if let Some(degree) = p.degree() {
                if degree > max {
                    return Err(SchemeError::DegreeTooHigh { index, degree, max });
                }
            }
        }
        Ok(CheckSet { code, target, base, polys })
    }

    pub fn code(&self) -> &GrsCode {
        &self.code
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn base(&self) -> FieldId {
        self.base
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// Number of check polynomials, `[F:K]`.
    pub fn ell(&self) -> usize {
        self.polys.len()
    }

    /// Raw column evaluations `{g_i(α_j)}` (multipliers omitted — they never
    /// change ranks).
    pub fn column(&self, j: usize) -> Vec<Element> {
        let a = self.code.points()[j];
        self.polys.iter().map(|g| g.eval(a)).collect()
    }

    /// Dual-codeword column `{γ_j · g_i(α_j)}`, the entries actually used by
    /// the repair identity.
    pub fn dual_column(&self, dual_multipliers: &[Element], j: usize) -> Vec<Element> {
        let a = self.code.points()[j];
        self.polys.iter().map(|g| dual_multipliers[j] * g.eval(a)).collect()
    }
}

/// True iff the column at the target has full rank over the base field.
pub fn full_rank_condition(cs: &CheckSet) -> bool {
    galois::rank_over(&cs.column(cs.target), cs.base) == cs.ell()
}

/// Rank profile and total bandwidth in bits. Errors unless the candidate
/// satisfies the full-rank condition.
pub fn bandwidth(cs: &CheckSet) -> Result<(RankProfile, u32), SchemeError> {
    if !full_rank_condition(cs) {
        return Err(SchemeError::FullRankFailed);
    }
    let profile: Vec<u8> =
        (0..cs.code.n()).map(|j| galois::rank_over(&cs.column(j), cs.base) as u8).collect();
    let bits_per_symbol = cs.base.m();
    let total: u32 = profile
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != cs.target)
        .map(|(_, &r)| r as u32 * bits_per_symbol)
        .sum();
    Ok((RankProfile(profile), total))
}

/// A verified repair scheme: a [`CheckSet`] that passed the full-rank
/// condition, with its rank profile and total bandwidth attached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairScheme {
    check: CheckSet,
    profile: RankProfile,
    bandwidth_bits: u32,
}

impl RepairScheme {
    /// Verify a candidate and freeze its profile and bandwidth.
    pub fn verify(check: CheckSet) -> Result<RepairScheme, SchemeError> {
        let (profile, bandwidth_bits) = bandwidth(&check)?;
        Ok(RepairScheme { check, profile, bandwidth_bits })
    }

    pub fn check(&self) -> &CheckSet {
        &self.check
    }

    pub fn code(&self) -> &GrsCode {
        &self.check.code
    }

    pub fn target(&self) -> usize {
        self.check.target
    }

    pub fn base(&self) -> FieldId {
        self.check.base
    }

    pub fn profile(&self) -> &RankProfile {
        &self.profile
    }

    pub fn bandwidth_bits(&self) -> u32 {
        self.bandwidth_bits
    }

    /// Repair `c_{j*}` from the other symbols of a codeword.
    pub fn repair(&self, codeword: &[Element]) -> Result<Element, SchemeError> {
        self.repair_with_stats(codeword).map(|(v, _)| v)
    }

    /// Repair, also returning the number of bits downloaded from helpers
    /// (equals the scheme bandwidth by construction).
    pub fn repair_with_stats(&self, codeword: &[Element]) -> Result<(Element, u32), SchemeError> {
        let code = &self.check.code;
        let base = self.check.base;
        let field = code.field();
        let n = code.n();
        if codeword.len() != n {
            return Err(SchemeError::WrongCodewordLength { expected: n, got: codeword.len() });
        }
        let dual = code.dual();
        let gamma = dual.multipliers();

        // Cheap non-codeword detection: one dual parity (the constant dual
        // polynomial), O(n).
        let mut parity = field.zero();
        for (j, &c) in codeword.iter().enumerate() {
            parity += gamma[j] * c;
        }
        if !parity.is_zero() {
            return Err(SchemeError::NonCodeword);
        }

        let emb = galois::embedding(base, field).expect("validated at construction");
        let j_star = self.check.target;

        // Receiver-side precomputation: dual basis of the target column.
        let u = self.check.dual_column(gamma, j_star);
        let dual_basis = galois::dual_basis(&u, base)?;

        // Each helper ships traces of its symbol against a base-spanning
        // subset of its column; the receiver reassembles every column trace
        // as a base-linear combination of those.
        let ell = self.check.ell();
        let mut sums = vec![base.zero(); ell];
        let mut bits = 0u32;
        for j in (0..n).filter(|&j| j != j_star) {
            let column = self.check.dual_column(gamma, j);
            let (mu, coords) = base_span_decomposition(&column, base);
            // Helper j sends r_j base symbols.
            let traces: Vec<Element> = mu.iter().map(|&m| emb.trace(m * codeword[j])).collect();
            bits += traces.len() as u32 * base.m();
            for i in 0..ell {
                // Tr(v_ij · c_j) = Σ_s a_ijs · Tr(μ_s · c_j), a over the base.
                let mut t = base.zero();
                for (s, &tr) in traces.iter().enumerate() {
                    t += coords[i][s] * tr;
                }
                sums[i] += t;
            }
        }

        // The check identity says each target trace equals the sum over
        // helpers; recombine through the dual basis.
        let mut repaired = field.zero();
        for (i, &d) in dual_basis.iter().enumerate() {
            repaired += emb.apply(sums[i]) * d;
        }
        Ok((repaired, bits))
    }
}

/// Greedy base-spanning subset of `v` plus, for every element of `v`, its
/// base-field coordinates with respect to that subset.
fn base_span_decomposition(
    v: &[Element],
    base: FieldId,
) -> (Vec<Element>, Vec<Vec<Element>>) {
    let field = v.first().map(|e| e.field()).expect("nonempty column");
    let mut mu: Vec<Element> = Vec::new();
    for &x in v {
        let mut trial = mu.clone();
        trial.push(x);
        if galois::rank_over(&trial, base) > mu.len() {
            mu.push(x);
        }
    }
    let coords = v.iter().map(|&x| solve_base_coords(&mu, x, base, field)).collect();
    (mu, coords)
}

/// Solve `x = Σ_s a_s · μ_s` for base-field coefficients `a`.
fn solve_base_coords(
    mu: &[Element],
    x: Element,
    base: FieldId,
    field: FieldId,
) -> Vec<Element> {
    let emb = galois::embedding(base, field).expect("validated");
    let d = emb.degree as usize;
    let r = mu.len();
    // Augmented system over the base: columns are coordinates of μ_s, rhs is x.
    let mut rows: Vec<Vec<Element>> = vec![vec![base.zero(); r + 1]; d];
    for (s, &m) in mu.iter().enumerate() {
        for (t, c) in emb.coordinates(m).into_iter().enumerate() {
            rows[t][s] = c;
        }
    }
    for (t, c) in emb.coordinates(x).into_iter().enumerate() {
        rows[t][r] = c;
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(p) = (row..d).find(|&t| !rows[t][col].is_zero()) else { continue };
        rows.swap(row, p);
        let inv = rows[row][col].inv();
        for c in col..=r {
            rows[row][c] *= inv;
        }
        for t in 0..d {
            if t != row && !rows[t][col].is_zero() {
                let f = rows[t][col];
                for c in col..=r {
                    let s = rows[row][c] * f;
                    rows[t][c] += s;
                }
            }
        }
        pivots.push((col, row));
        row += 1;
    }
    debug_assert!(
        rows[row..].iter().all(|t| t[r].is_zero()),
        "element must lie in the span of μ"
    );
    let mut solution = vec![base.zero(); r];
    for &(col, prow) in &pivots {
        solution[col] = rows[prow][r];
    }
    solution
}

/// Degree normalization: rewrite a candidate so every polynomial has degree
/// exactly `r−1`, never increasing bandwidth and preserving the full-rank
/// condition.
///
/// If some polynomial already has top degree, it is added to all lower-degree
/// ones (column spans are untouched). Otherwise every polynomial is first
/// multiplied by `(x − ᾱ)^(r−1−maxdeg)` where `ᾱ` is the smallest-index
/// evaluation point other than the target's — that zeroes one helper column
/// and scales the rest — and the addition step then runs.
pub fn normalize_degree(cs: &CheckSet) -> Result<CheckSet, SchemeError> {
    let max_deg: usize = cs
        .polys
        .iter()
        .filter_map(|p| p.degree())
        .max()
        .ok_or(SchemeError::AllZero)?;
    let top = cs.code.r() - 1;
    let field = cs.code.field();

    let mut polys = cs.polys.clone();
    if max_deg < top {
        let alpha_bar = cs
            .code
            .points()
            .iter()
            .enumerate()
            .find(|&(j, _)| j != cs.target)
            .map(|(_, &a)| a)
            .expect("codes have length at least 2");
        let shift = Polynomial::from_roots(field, &vec![alpha_bar; top - max_deg]);
        for p in &mut polys {
            *p = p.mul(&shift);
        }
    }
    let lead = polys
        .iter()
        .position(|p| p.degree() == Some(top))
        .expect("some polynomial reaches top degree after the shift");
    let lead_poly = polys[lead].clone();
    for p in &mut polys {
        if p.degree() != Some(top) {
            *p = p.add(&lead_poly);
        }
    }
    CheckSet::new(cs.code.clone(), cs.target, cs.base, polys)
}

/// Lift a scheme for a subfield code to the corresponding extension-field
/// code: multiply the (embedded) check polynomials by an `F`-basis of the
/// extension, where `F` is the subfield. Bandwidth scales by the basis size.
pub fn lift(s: &RepairScheme, basis: &[Element]) -> Result<RepairScheme, SchemeError> {
    let small = s.code().field();
    let big = basis.first().map(|b| b.field()).ok_or(SchemeError::BadBasis)?;
    let emb = galois::embedding(small, big).map_err(|_| SchemeError::BadBase)?;
    if basis.len() != emb.degree as usize
        || galois::rank_over(basis, small) != basis.len()
    {
        return Err(SchemeError::BadBasis);
    }
    let points: Vec<Element> = s.code().points().iter().map(|&a| emb.apply(a)).collect();
    let multipliers: Vec<Element> =
        s.code().multipliers().iter().map(|&l| emb.apply(l)).collect();
    let code = GrsCode::new(big, points, s.code().k(), multipliers)?;
    let mut polys = Vec::with_capacity(basis.len() * s.check.polys.len());
    for &beta in basis {
        for g in &s.check.polys {
            polys.push(g.embed(emb).scale(beta));
        }
    }
    RepairScheme::verify(CheckSet::new(code, s.target(), s.base(), polys)?)
}

/// Convenience [`lift`] along the canonical basis `1, z, …` of the extension
/// over the scheme's code field.
pub fn lift_canonical(s: &RepairScheme, big: FieldId) -> Result<RepairScheme, SchemeError> {
    let emb = galois::embedding(s.code().field(), big).map_err(|_| SchemeError::BadBase)?;
    let basis: Vec<Element> = (0..emb.degree).map(|i| big.z().pow(i as i64)).collect();
    lift(s, &basis)
}

/// Refine a scheme's base field: replace each check polynomial `g_i` by
/// `{γ_j · g_i}` for a basis `{γ_j}` of the old base over the new one. The
/// bit total is unchanged (ranks scale by the degree, symbols shrink).
pub fn extend(
    s: &RepairScheme,
    new_base: FieldId,
    basis: &[Element],
) -> Result<RepairScheme, SchemeError> {
    let old_base = s.base();
    let emb_bases = galois::embedding(new_base, old_base).map_err(|_| SchemeError::BadBase)?;
    let need = emb_bases.degree as usize;
    if basis.len() != need
        || basis.iter().any(|b| b.field() != old_base)
        || galois::rank_over(basis, new_base) != need
    {
        return Err(SchemeError::BadBasis);
    }
    let emb_code =
        galois::embedding(old_base, s.code().field()).expect("validated at construction");
    let mut polys = Vec::with_capacity(need * s.check.polys.len());
    for &gamma in basis {
        for g in &s.check.polys {
            polys.push(g.scale(emb_code.apply(gamma)));
        }
    }
    RepairScheme::verify(CheckSet::new(s.code().clone(), s.target(), new_base, polys)?)
}

/// Convenience [`extend`] along the canonical basis `1, z, …` of the old
/// base over the new one.
pub fn extend_canonical(s: &RepairScheme, new_base: FieldId) -> Result<RepairScheme, SchemeError> {
    let emb = galois::embedding(new_base, s.base()).map_err(|_| SchemeError::BadBase)?;
    let basis: Vec<Element> = (0..emb.degree).map(|i| s.base().z().pow(i as i64)).collect();
    extend(s, new_base, &basis)
}

/// Transport a scheme along the affine map `α ↦ β·α + γ` of evaluation
/// points: the new code is GRS(βA+γ, k) (same multipliers) and the new check
/// polynomials are `h_i(x) = g_i((x−γ)/β)`, so every column evaluation — and
/// hence the whole profile — is preserved.
pub fn transport(
    s: &RepairScheme,
    beta: Element,
    gamma: Element,
) -> Result<RepairScheme, SchemeError> {
    if beta.is_zero() {
        return Err(SchemeError::ZeroScale);
    }
    let field = s.code().field();
    assert_eq!(beta.field(), field, "affine map from wrong field");
    assert_eq!(gamma.field(), field, "affine map from wrong field");
    let points: Vec<Element> = s.code().points().iter().map(|&a| beta * a + gamma).collect();
    let code = GrsCode::new(field, points, s.code().k(), s.code().multipliers().to_vec())?;
    let binv = beta.inv();
    let polys: Vec<Polynomial> =
        s.check.polys.iter().map(|g| g.compose_linear(binv, binv * gamma)).collect();
    RepairScheme::verify(CheckSet::new(code, s.target(), s.base(), polys)?)
}

/// The bandwidth-8k baseline: all check polynomials share the `r−1` roots
/// `A ∖ {α_{j*}}`-prefix, scaled by a base-basis of the code field, so every
/// helper beyond the roots ships its entire symbol.
pub fn naive_scheme(
    code: &GrsCode,
    target: usize,
    base: FieldId,
) -> Result<RepairScheme, SchemeError> {
    let field = code.field();
    let emb = galois::embedding(base, field).map_err(|_| SchemeError::BadBase)?;
    if target >= code.n() {
        return Err(SchemeError::BadTarget { target, n: code.n() });
    }
    let roots: Vec<Element> = code
        .points()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != target)
        .take(code.r() - 1)
        .map(|(_, &a)| a)
        .collect();
    let g = Polynomial::from_roots(field, &roots);
    let polys: Vec<Polynomial> =
        (0..emb.degree).map(|i| g.scale(field.z().pow(i as i64))).collect();
    RepairScheme::verify(CheckSet::new(code.clone(), target, base, polys)?)
}

// ---------------------------------------------------------------------------
// Scheme files.
// ---------------------------------------------------------------------------

/// Serialize one code and any number of verified schemes for it:
///
/// ```text
/// rs-scheme v1
/// code <name> field=<gfN> n=<n> k=<k> A=<ints> lambda=<ints>
/// target j=<j*> base=<gfN> bandwidth=<bits>
/// poly <comma ints, low-degree-first>
/// …
/// ```
pub fn format_scheme_file(name: &str, code: &GrsCode, schemes: &[RepairScheme]) -> String {
    let mut out = String::from("rs-scheme v1\n");
    out.push_str(&grs::format_descriptor(name, code));
    out.push('\n');
    for s in schemes {
        assert_eq!(s.code(), code, "scheme file mixes codes");
        out.push_str(&format!(
            "target j={} base={} bandwidth={}\n",
            s.target(),
            s.base().name(),
            s.bandwidth_bits()
        ));
        for p in s.check().polys() {
            let vals: Vec<String> = if p.is_zero() {
                vec!["0".into()]
            } else {
                p.coeffs().iter().map(|c| c.to_string()).collect()
            };
            out.push_str(&format!("poly {}\n", vals.join(",")));
        }
    }
    out
}

/// Parse and re-verify a scheme file; the recorded bandwidths must match the
/// recomputed ones exactly.
pub fn parse_scheme_file(text: &str) -> Result<(String, GrsCode, Vec<RepairScheme>), SchemeError> {
    let err = |msg: &str| SchemeError::Parse(msg.to_string());
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("rs-scheme v1") {
        return Err(err("missing `rs-scheme v1` header"));
    }
    let code_line = lines.next().ok_or_else(|| err("missing code descriptor"))?;
    let (name, code) = grs::parse_descriptor(code_line)?;

    struct Block {
        target: usize,
        base: FieldId,
        bandwidth: u32,
        polys: Vec<Polynomial>,
    }
    let mut blocks: Vec<Block> = Vec::new();
    for line in lines {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("target ") {
            let (mut target, mut base, mut bw) = (None, None, None);
            for tok in rest.split_whitespace() {
                let (key, value) =
                    tok.split_once('=').ok_or_else(|| err("expected key=value in target line"))?;
                match key {
                    "j" => target = value.parse::<usize>().ok(),
                    "base" => base = FieldId::parse(value),
                    "bandwidth" => bw = value.parse::<u32>().ok(),
                    _ => return Err(err("unknown key in target line")),
                }
            }
            blocks.push(Block {
                target: target.ok_or_else(|| err("bad target index"))?,
                base: base.ok_or_else(|| err("bad base field"))?,
                bandwidth: bw.ok_or_else(|| err("bad bandwidth"))?,
                polys: Vec::new(),
            });
        } else if let Some(rest) = line.strip_prefix("poly ") {
            let block = blocks.last_mut().ok_or_else(|| err("poly line before target line"))?;
            let vals: Vec<u16> = rest
                .split(',')
                .map(|v| v.trim().parse::<u16>())
                .collect::<Result<_, _>>()
                .map_err(|_| err("bad polynomial coefficient"))?;
            if vals.iter().any(|&v| v >= code.field().order()) {
                return Err(err("coefficient out of field range"));
            }
            let coeffs: Vec<u8> = vals.into_iter().map(|v| v as u8).collect();
            block.polys.push(Polynomial::from_values(code.field(), &coeffs));
        } else {
            return Err(err("unrecognized line"));
        }
    }

    let mut schemes = Vec::with_capacity(blocks.len());
    for b in blocks {
        let scheme = RepairScheme::verify(CheckSet::new(code.clone(), b.target, b.base, b.polys)?)?;
        if scheme.bandwidth_bits() != b.bandwidth {
            return Err(err("recorded bandwidth disagrees with the polynomials"));
        }
        schemes.push(scheme);
    }
    Ok((name, code, schemes))
}

impl fmt::Display for RankProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grs::{encode, f16_code, isal_code};
    use rand::{Rng, SeedableRng};

    fn rng() -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(11)
    }

    fn random_codeword(code: &GrsCode, rng: &mut impl Rng) -> Vec<Element> {
        let u: Vec<Element> = (0..code.k())
            .map(|_| code.field().elem(rng.gen_range(0..code.field().order()) as u8))
            .collect();
        encode(&code.generator(), &u).unwrap()
    }

    /// Rank oracle independent of galois::rank_over: brute-force span count.
    fn oracle_rank(v: &[Element], base: FieldId) -> usize {
        let field = v[0].field();
        let emb = galois::embedding(base, field).unwrap();
        let scalars: Vec<Element> = base.elements().map(|s| emb.apply(s)).collect();
        let mut span = std::collections::BTreeSet::new();
        span.insert(field.zero());
        for &x in v {
            let snapshot: Vec<Element> = span.iter().copied().collect();
            for &s in &scalars {
                for &y in &snapshot {
                    span.insert(s * x + y);
                }
            }
            // Re-close under addition.
            loop {
                let items: Vec<Element> = span.iter().copied().collect();
                let before = span.len();
                for &a in &items {
                    for &b in &items {
                        span.insert(a + b);
                    }
                }
                if span.len() == before {
                    break;
                }
            }
        }
        // |span| = |base|^rank.
        let mut rank = 0;
        let mut size = 1usize;
        while size < span.len() {
            size *= base.order() as usize;
            rank += 1;
        }
        assert_eq!(size, span.len(), "span must be a subspace");
        rank
    }

    #[test]
    fn full_rank_condition_cases() {
        let code = f16_code(5, 3).unwrap();
        let f = code.field();
        let g = Polynomial::from_values(f, &[1, 1]); // x + 1
        // All-equal polynomials: rank 1 < 4.
        let same = CheckSet::new(code.clone(), 0, FieldId::Gf2, vec![g.clone(); 4]).unwrap();
        assert!(!full_rank_condition(&same));
        // Scaled basis {z^i · g} with g(α_0) ≠ 0: full rank.
        let polys: Vec<Polynomial> = (0..4).map(|i| g.scale(f.z().pow(i))).collect();
        let scaled = CheckSet::new(code.clone(), 0, FieldId::Gf2, polys).unwrap();
        assert!(g.eval(code.points()[0]) != f.zero());
        assert!(full_rank_condition(&scaled));
        // Random candidates agree with the independent rank oracle.
        let mut rng = rng();
        for _ in 0..50 {
            let polys: Vec<Polynomial> = (0..4)
                .map(|_| {
                    Polynomial::from_values(
                        f,
                        &[rng.gen_range(0..16) as u8, rng.gen_range(0..16) as u8],
                    )
                })
                .collect();
            let cs = CheckSet::new(code.clone(), 1, FieldId::Gf2, polys).unwrap();
            let col = cs.column(1);
            assert_eq!(
                full_rank_condition(&cs),
                oracle_rank(&col, FieldId::Gf2) == 4
            );
        }
    }

    #[test]
    fn construction_rejects_bad_candidates() {
        let code = isal_code(9, 6).unwrap();
        let f = code.field();
        let too_big = Polynomial::from_values(f, &[1, 1, 1, 1]); // degree 3 > r−1 = 2
        assert_eq!(
            CheckSet::new(code.clone(), 0, FieldId::Gf2, vec![too_big; 8]).unwrap_err(),
            SchemeError::DegreeTooHigh { index: 0, degree: 3, max: 2 }
        );
        let g = Polynomial::one(f);
        assert_eq!(
            CheckSet::new(code.clone(), 0, FieldId::Gf2, vec![g.clone(); 7]).unwrap_err(),
            SchemeError::WrongPolyCount { expected: 8, got: 7 }
        );
        assert_eq!(
            CheckSet::new(code.clone(), 9, FieldId::Gf2, vec![g; 8]).unwrap_err(),
            SchemeError::BadTarget { target: 9, n: 9 }
        );
    }

    #[test]
    fn naive_scheme_bandwidth_is_8k_on_gf256() {
        for (n, k) in [(9, 6), (14, 10), (12, 8)] {
            let code = isal_code(n, k).unwrap();
            for j in [0, n - 1] {
                let s = naive_scheme(&code, j, FieldId::Gf2).unwrap();
                assert_eq!(s.bandwidth_bits(), 8 * k as u32, "({n},{k}) target {j}");
            }
        }
        // Bandwidth refuses unverified candidates.
        let code = f16_code(5, 3).unwrap();
        let g = Polynomial::one(code.field());
        let cs = CheckSet::new(code, 0, FieldId::Gf2, vec![g; 4]).unwrap();
        assert_eq!(bandwidth(&cs).unwrap_err(), SchemeError::FullRankFailed);
    }

    #[test]
    fn bandwidth_matches_per_column_oracle() {
        let mut rng = rng();
        let code = f16_code(6, 4).unwrap();
        let f = code.field();
        let mut checked = 0;
        while checked < 10 {
            let polys: Vec<Polynomial> = (0..4)
                .map(|_| {
                    Polynomial::from_values(
                        f,
                        &[rng.gen_range(0..16) as u8, rng.gen_range(0..16) as u8],
                    )
                })
                .collect();
            let cs = CheckSet::new(code.clone(), 2, FieldId::Gf2, polys).unwrap();
            let Ok((profile, bits)) = bandwidth(&cs) else { continue };
            checked += 1;
            let mut expect = 0u32;
            for j in 0..code.n() {
                let r = oracle_rank(&cs.column(j), FieldId::Gf2) as u8;
                assert_eq!(profile.0[j], r);
                if j != 2 {
                    expect += r as u32;
                }
            }
            assert_eq!(bits, expect);
        }
    }

    #[test]
    fn lambda_never_affects_the_profile() {
        let mut rng = rng();
        let f = FieldId::Gf256;
        for _ in 0..20 {
            let points: Vec<Element> = (0..7).map(|v| f.elem(v)).collect();
            let lambda: Vec<Element> =
                (0..7).map(|_| f.elem(rng.gen_range(1..=255) as u8)).collect();
            let plain = crate::grs::classical_rs(f, points.clone(), 4).unwrap();
            let scaled = GrsCode::new(f, points, 4, lambda.clone()).unwrap();
            let polys: Vec<Polynomial> = (0..8)
                .map(|_| {
                    Polynomial::from_values(
                        f,
                        &[rng.gen(), rng.gen(), rng.gen()],
                    )
                })
                .collect();
            let a = CheckSet::new(plain, 3, FieldId::Gf2, polys.clone()).unwrap();
            let b = CheckSet::new(scaled, 3, FieldId::Gf2, polys).unwrap();
            for j in 0..7 {
                // Ranks of the raw column and the multiplier-scaled column agree.
                let col = a.column(j);
                let scaled_col: Vec<Element> =
                    col.iter().map(|&v| lambda[j] * v).collect();
                assert_eq!(
                    galois::rank_over(&col, FieldId::Gf2),
                    galois::rank_over(&scaled_col, FieldId::Gf2)
                );
                assert_eq!(a.column(j), b.column(j), "profiles ignore λ entirely");
            }
        }
    }

    #[test]
    fn repair_round_trips_on_small_code() {
        let mut rng = rng();
        let code = f16_code(5, 3).unwrap();
        for j in 0..code.n() {
            let s = naive_scheme(&code, j, FieldId::Gf2).unwrap();
            // Zero codeword repairs to zero.
            let zero = vec![code.field().zero(); code.n()];
            assert!(s.repair(&zero).unwrap().is_zero());
            for _ in 0..200 {
                let c = random_codeword(&code, &mut rng);
                let (got, bits) = s.repair_with_stats(&c).unwrap();
                assert_eq!(got, c[j]);
                assert_eq!(bits, s.bandwidth_bits());
            }
        }
        // Non-codewords are rejected.
        let s = naive_scheme(&code, 0, FieldId::Gf2).unwrap();
        let mut c = random_codeword(&code, &mut rng);
        c[1] += code.field().one();
        assert_eq!(s.repair(&c).unwrap_err(), SchemeError::NonCodeword);
    }

    #[test]
    fn repair_works_on_generalized_codes_and_other_bases() {
        let mut rng = rng();
        // A GRS code with nontrivial multipliers.
        let code = crate::grs::cauchy_to_grs(9, 6).unwrap();
        for base in [FieldId::Gf2, FieldId::Gf4, FieldId::Gf16] {
            let s = naive_scheme(&code, 4, base).unwrap();
            for _ in 0..50 {
                let c = random_codeword(&code, &mut rng);
                assert_eq!(s.repair(&c).unwrap(), c[4]);
            }
        }
    }

    #[test]
    fn normalize_degree_cases() {
        let code = isal_code(9, 6).unwrap(); // r = 3, top degree 2
        let f = code.field();
        let mut rng = rng();

        // Case 1: some polynomial already has top degree.
        let polys: Vec<Polynomial> = vec![
            Polynomial::from_values(f, &[3, 0, 5]), // degree 2
            Polynomial::from_values(f, &[1, 2]),
            Polynomial::from_values(f, &[9]),
            Polynomial::from_values(f, &[0, 7]),
            Polynomial::from_values(f, &[1, 1]),
            Polynomial::from_values(f, &[2]),
            Polynomial::from_values(f, &[4, 4]),
            Polynomial::zero(f),
        ];
        let cs = CheckSet::new(code.clone(), 0, FieldId::Gf2, polys).unwrap();
        let out = normalize_degree(&cs).unwrap();
        for p in out.polys() {
            assert_eq!(p.degree(), Some(2));
        }
        // Column spans are identical at every evaluation point.
        for j in 0..code.n() {
            let before = cs.column(j);
            let after = out.column(j);
            let all: Vec<Element> = before.iter().chain(after.iter()).copied().collect();
            let r = galois::rank_over(&before, FieldId::Gf2);
            assert_eq!(galois::rank_over(&after, FieldId::Gf2), r);
            assert_eq!(galois::rank_over(&all, FieldId::Gf2), r);
        }

        // Already max-degree candidates are untouched.
        let again = normalize_degree(&out).unwrap();
        assert_eq!(again, out, "idempotent");

        // Case 2: all degrees below the top; bandwidth never increases.
        for _ in 0..20 {
            let polys: Vec<Polynomial> = (0..8)
                .map(|_| Polynomial::from_values(f, &[rng.gen(), rng.gen()]))
                .collect();
            let cs = CheckSet::new(code.clone(), 2, FieldId::Gf2, polys).unwrap();
            let out = normalize_degree(&cs).unwrap();
            for p in out.polys() {
                assert_eq!(p.degree(), Some(2));
            }
            if let Ok((_, before)) = bandwidth(&cs) {
                let (_, after) = bandwidth(&out).expect("full rank is preserved");
                assert!(after <= before, "bandwidth may not grow");
            }
        }

        // All-zero candidate is refused.
        let zero = CheckSet::new(code, 0, FieldId::Gf2, vec![Polynomial::zero(f); 8]).unwrap();
        assert_eq!(normalize_degree(&zero).unwrap_err(), SchemeError::AllZero);
    }

    #[test]
    fn lift_multiplies_bandwidth_by_the_degree() {
        let mut rng = rng();
        let code = f16_code(5, 3).unwrap();
        let s = naive_scheme(&code, 1, FieldId::Gf2).unwrap();
        let lifted = lift_canonical(&s, FieldId::Gf256).unwrap();
        assert_eq!(lifted.bandwidth_bits(), 2 * s.bandwidth_bits());
        assert_eq!(lifted.check().ell(), 8);
        // The lifted scheme actually repairs codewords of the lifted code.
        for _ in 0..100 {
            let c = random_codeword(lifted.code(), &mut rng);
            assert_eq!(lifted.repair(&c).unwrap(), c[1]);
        }
        // Degenerate "basis" is rejected.
        let f = FieldId::Gf256;
        assert_eq!(
            lift(&s, &[f.one(), f.one()]).unwrap_err(),
            SchemeError::BadBasis
        );
    }

    #[test]
    fn extend_preserves_total_bits() {
        let mut rng = rng();
        let code = isal_code(9, 6).unwrap();
        let coarse = naive_scheme(&code, 3, FieldId::Gf16).unwrap();
        let mid = extend_canonical(&coarse, FieldId::Gf4).unwrap();
        let fine = extend_canonical(&mid, FieldId::Gf2).unwrap();
        assert_eq!(coarse.check().ell(), 2);
        assert_eq!(mid.check().ell(), 4);
        assert_eq!(fine.check().ell(), 8);
        assert_eq!(coarse.bandwidth_bits(), mid.bandwidth_bits());
        assert_eq!(mid.bandwidth_bits(), fine.bandwidth_bits());
        // The naive scheme stays naive: 8k bits.
        assert_eq!(fine.bandwidth_bits(), 8 * 6);
        // And the refined scheme still repairs.
        for _ in 0..50 {
            let c = random_codeword(&code, &mut rng);
            assert_eq!(fine.repair(&c).unwrap(), c[3]);
            assert_eq!(mid.repair(&c).unwrap(), c[3]);
        }
    }

    #[test]
    fn transport_moves_schemes_between_affine_codes() {
        let mut rng = rng();
        let code = f16_code(6, 4).unwrap();
        let f = code.field();
        let s = naive_scheme(&code, 2, FieldId::Gf2).unwrap();

        // Identity transport.
        let same = transport(&s, f.one(), f.zero()).unwrap();
        assert_eq!(same, s);

        let (beta, gamma) = (f.elem(7), f.elem(9));
        let moved = transport(&s, beta, gamma).unwrap();
        // h_i(β·α + γ) = g_i(α) pointwise.
        for (g, h) in s.check().polys().iter().zip(moved.check().polys()) {
            for &a in code.points() {
                assert_eq!(h.eval(beta * a + gamma), g.eval(a));
            }
        }
        assert_eq!(moved.profile(), s.profile());
        assert_eq!(moved.bandwidth_bits(), s.bandwidth_bits());
        for _ in 0..50 {
            let c = random_codeword(moved.code(), &mut rng);
            assert_eq!(moved.repair(&c).unwrap(), c[2]);
        }

        // Round trip back to the original code.
        let back = transport(&moved, beta.inv(), beta.inv() * gamma).unwrap();
        assert_eq!(back.code(), s.code());
        assert_eq!(back.profile(), s.profile());

        assert_eq!(
            transport(&s, f.zero(), gamma).unwrap_err(),
            SchemeError::ZeroScale
        );
    }

    #[test]
    fn scheme_file_round_trip() {
        let code = f16_code(5, 3).unwrap();
        let schemes: Vec<RepairScheme> = (0..2)
            .map(|j| naive_scheme(&code, j, FieldId::Gf2).unwrap())
            .collect();
        let text = format_scheme_file("f16-5-3", &code, &schemes);
        assert!(text.starts_with("rs-scheme v1\ncode f16-5-3 field=gf16 n=5 k=3"));
        let (name, parsed_code, parsed) = parse_scheme_file(&text).unwrap();
        assert_eq!(name, "f16-5-3");
        assert_eq!(&parsed_code, &code);
        assert_eq!(parsed, schemes);

        // Tampered bandwidth is caught.
        let bad = text.replace("bandwidth=12", "bandwidth=11");
        assert!(parse_scheme_file(&bad).is_err());
        assert!(parse_scheme_file("garbage").is_err());
    }
}
