//! Scheme-to-lookup-table compiler and streaming repair engines.
//!
//! A verified repair scheme per target position is flattened into three byte
//! tables: per-helper sender masks `H`, receiver recombination masks `R`, and
//! dual-basis bytes `D`. With those in hand, repairing one erased symbol
//! costs a handful of AND/XOR/parity-bit operations per helper — or, on the
//! fully fused path, a single table lookup per helper — instead of field
//! arithmetic. A matrix-inversion baseline and a benchmark harness that
//! streams many codewords through both engines round out the module.
//!
//! The sender for helper `i` repairing position `j` emits the bits
//! `RepairTrace_i[s] = sp[H[i][j][s+1] & c_i]` for `s < r_i = H[i][j][0]`.
//! The receiver rebuilds each column trace as
//! `ColumnTrace_i[s] = sp[R[i][j][s] & Dec(RepairTrace_i)]`, XORs column
//! traces across helpers, and recombines
//! `c_j = ⊕_s ((⊕_i ColumnTrace_i[s]) × D[j][s])`, where `×` is GF(256)
//! multiplication (by a single bit, so it degenerates to a masked XOR).

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::galois::{self, FieldId, SubfieldEmbedding};
use crate::grs::{GeneratorMatrix, GrsCode, Matrix};
use crate::scheme::RepairScheme;

/// Errors from table compilation, repair execution, and table file I/O.
#[derive(Debug, Error)]
pub enum CodecError {
    /// The scheme set handed to the compiler is not one verified scheme per
    /// target position of a single code.
    #[error("scheme set mismatch: {0}")]
    SchemeSetMismatch(String),
    /// The configuration falls outside what the byte tables can express.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    /// A helper's trace has the wrong number of bits.
    #[error("trace shape mismatch at helper {helper}: expected {expected} bits, got {got}")]
    TraceShape { helper: usize, expected: usize, got: usize },
    /// The number of per-helper traces does not match the helper count.
    #[error("expected traces from {expected} helpers, got {got}")]
    TraceCount { expected: usize, got: usize },
    /// The helper columns selected for naive repair are not invertible.
    #[error("selected helper columns form a singular submatrix")]
    SingularSubmatrix,
    /// Compiled tables do not belong to the supplied code.
    #[error("tables do not match the supplied code: {0}")]
    CodeMismatch(String),
    /// A table file failed structural validation.
    #[error("corrupt table file: {0}")]
    CorruptTables(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

// ---------------------------------------------------------------------------
// Parity array
// ---------------------------------------------------------------------------

/// The 256-entry bit-parity array: `sp[m]` is the XOR of the 8 bits of `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityArray {
    sp: [u8; 256],
}

impl ParityArray {
    /// Parity bit of `m` (0 or 1).
    #[inline]
    pub fn at(&self, m: u8) -> u8 {
        self.sp[m as usize]
    }

    pub fn table(&self) -> &[u8; 256] {
        &self.sp
    }
}

/// Build the parity array by XOR-folding the bits of every byte.
pub fn build_sp() -> ParityArray {
    let mut sp = [0u8; 256];
    for (m, slot) in sp.iter_mut().enumerate() {
        let mut x = m as u8;
        let mut b = 0u8;
        while x != 0 {
            b ^= x & 1;
            x >>= 1;
        }
        *slot = b;
    }
    ParityArray { sp }
}

// ---------------------------------------------------------------------------
// Repair traces
// ---------------------------------------------------------------------------

/// The bits one helper sends for one codeword: `r_i` trace bits, packable
/// into the integer `Dec(RepairTrace)` with bit `s` equal to trace bit `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairTrace {
    bits: Vec<u8>,
}

impl RepairTrace {
    /// Wrap raw trace bits (each must be 0 or 1, at most 8 of them).
    pub fn from_bits(bits: Vec<u8>) -> RepairTrace {
        assert!(bits.len() <= 8, "a trace carries at most 8 bits");
        assert!(bits.iter().all(|&b| b <= 1), "trace bits must be 0 or 1");
        RepairTrace { bits }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Packed integer value of the trace bits.
    pub fn dec(&self) -> u8 {
        dec(&self.bits)
    }
}

/// Pack up to 8 trace bits into a byte: bit `s` of the result is trace bit
/// `s` (the first trace bit is the least significant).
pub fn dec(bits: &[u8]) -> u8 {
    assert!(bits.len() <= 8, "dec packs at most 8 bits");
    bits.iter().enumerate().fold(0u8, |acc, (s, &b)| acc | ((b & 1) << s))
}

// ---------------------------------------------------------------------------
// Lookup tables
// ---------------------------------------------------------------------------

/// The compiled repair tables for one code: for every helper/target pair
/// `(i, j)`, `H` stores the helper's rank `r_i` and its `r_i` sender masks;
/// `R` stores eight recombination masks expressing each column trace in the
/// sent bits; `D` stores the eight dual-basis bytes of the target column.
///
/// Tables compiled in-process keep their code and scheme set attached;
/// tables loaded from a file carry only the shape (`n`, `k`, field) and the
/// bytes, which is all the repair engines need.
#[derive(Clone)]
pub struct LookupTables {
    n: usize,
    k: usize,
    field: FieldId,
    /// `n×n×9`: entry `(i, j)` starts at `(i·n + j)·9`; byte 0 is `r_i`,
    /// bytes `1..=r_i` are sender masks.
    h: Vec<u8>,
    /// `n×n×8` recombination masks.
    r: Vec<u8>,
    /// `n×8` dual-basis bytes, indexed by target `j`.
    d: Vec<u8>,
    sp: ParityArray,
    code: Option<GrsCode>,
    schemes: Option<Vec<RepairScheme>>,
}

impl fmt::Debug for LookupTables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LookupTables")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("field", &self.field.name())
            .field("compiled_in_process", &self.code.is_some())
            .finish()
    }
}

impl PartialEq for LookupTables {
    /// Byte-level equality of the tables themselves; attached code/scheme
    /// references do not participate.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.field == other.field
            && self.h == other.h
            && self.r == other.r
            && self.d == other.d
    }
}

impl Eq for LookupTables {}

impl LookupTables {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    /// The code these tables were compiled from, when known.
    pub fn code(&self) -> Option<&GrsCode> {
        self.code.as_ref()
    }

    /// The underlying scheme set, when compiled in-process.
    pub fn schemes(&self) -> Option<&[RepairScheme]> {
        self.schemes.as_deref()
    }

    /// Helper `i`'s rank (= number of trace bits it sends) for target `j`.
    pub fn rank(&self, i: usize, j: usize) -> usize {
        self.h_entry(i, j)[0] as usize
    }

    /// Total bits downloaded to repair position `j` (the scheme bandwidth).
    pub fn repair_bits(&self, j: usize) -> u32 {
        (0..self.n).filter(|&i| i != j).map(|i| self.rank(i, j) as u32).sum()
    }

    /// The 9-byte `H` entry for `(helper i, target j)`.
    pub fn h_entry(&self, i: usize, j: usize) -> &[u8] {
        let base = (i * self.n + j) * 9;
        &self.h[base..base + 9]
    }

    /// The 8 recombination masks for `(helper i, target j)`.
    pub fn r_masks(&self, i: usize, j: usize) -> &[u8] {
        let base = (i * self.n + j) * 8;
        &self.r[base..base + 8]
    }

    /// The 8 dual-basis bytes for target `j`.
    pub fn d_bytes(&self, j: usize) -> &[u8] {
        &self.d[j * 8..j * 8 + 8]
    }
}

/// Reduced echelon basis of the GF(2)-span of `vs` (bytes as bit vectors):
/// unique pivot bits in strictly descending order, every pivot cleared from
/// all other rows. Returns the rows and their pivot bit positions. The
/// result depends only on the span, so masks derived from it are canonical.
fn rref_basis(vs: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let mut mu: Vec<u8> = Vec::new();
    let mut pivots: Vec<u8> = Vec::new();
    for &v in vs {
        let mut rem = v;
        for (t, &p) in pivots.iter().enumerate() {
            if rem >> p & 1 == 1 {
                rem ^= mu[t];
            }
        }
        if rem == 0 {
            continue;
        }
        let p = 7 - rem.leading_zeros() as u8;
        for row in mu.iter_mut() {
            if *row >> p & 1 == 1 {
                *row ^= rem;
            }
        }
        let pos = pivots.iter().position(|&q| q < p).unwrap_or(pivots.len());
        mu.insert(pos, rem);
        pivots.insert(pos, p);
    }
    (mu, pivots)
}

/// Express `v` over the reduced basis: bit `t` of the result says whether
/// row `t` participates. `None` if `v` falls outside the span.
fn reduce_to_mask(v: u8, mu: &[u8], pivots: &[u8]) -> Option<u8> {
    let mut rem = v;
    let mut mask = 0u8;
    for (t, &p) in pivots.iter().enumerate() {
        if rem >> p & 1 == 1 {
            rem ^= mu[t];
            mask |= 1 << t;
        }
    }
    (rem == 0).then_some(mask)
}

/// The unique byte `M` with `sp[M & x] = Tr(μ·x)` for all `x`, built bit by
/// bit: bit `t` of `M` is `Tr(μ·z^t)`.
fn trace_mask(emb: &SubfieldEmbedding, mu: u8) -> u8 {
    let f = FieldId::Gf256;
    let mut mask = 0u8;
    for t in 0..8u32 {
        if emb.trace_value((f.elem(mu) * f.exp(t)).value()) == 1 {
            mask |= 1 << t;
        }
    }
    mask
}

/// Compile one verified scheme per target position into the three lookup
/// tables. Requires a code over GF(256) and schemes over base GF(2); the
/// scheme at index `j` must target position `j` of the common code.
///
/// For each helper/target pair the helper basis `{μ_s}` is the reduced
/// echelon basis of `span{γ_i·g_s(α_i)}` in bit coordinates, which makes
/// every mask a pure function of the scheme set. Every sender mask is
/// checked against its trace functional on all 256 bytes before the tables
/// are returned.
pub fn compile_tables(schemes: &[RepairScheme]) -> Result<LookupTables, CodecError> {
    let first = schemes
        .first()
        .ok_or_else(|| CodecError::SchemeSetMismatch("empty scheme set".into()))?;
    let code = first.code().clone();
    let n = code.n();
    if schemes.len() != n {
        return Err(CodecError::SchemeSetMismatch(format!(
            "need one scheme per position: got {} for n = {n}",
            schemes.len()
        )));
    }
    if code.field() != FieldId::Gf256 {
        return Err(CodecError::Unsupported(format!(
            "byte tables require a code over GF(256), got {}",
            code.field().name()
        )));
    }
    for (j, s) in schemes.iter().enumerate() {
        if s.target() != j {
            return Err(CodecError::SchemeSetMismatch(format!(
                "scheme at index {j} targets position {}",
                s.target()
            )));
        }
        if s.code() != &code {
            return Err(CodecError::SchemeSetMismatch(format!(
                "scheme for target {j} belongs to a different code"
            )));
        }
        if s.base() != FieldId::Gf2 {
            return Err(CodecError::Unsupported(format!(
                "byte tables require base GF(2) schemes, got {}",
                s.base().name()
            )));
        }
    }

    let sp = build_sp();
    let gamma = code.dual().multipliers().to_vec();
    let emb = galois::embedding(FieldId::Gf2, FieldId::Gf256).expect("tower pair");
    let f = FieldId::Gf256;

    let mut h = vec![0u8; n * n * 9];
    let mut r = vec![0u8; n * n * 8];
    let mut d = vec![0u8; n * 8];

    for j in 0..n {
        let sch = &schemes[j];
        let target_column = sch.check().dual_column(&gamma, j);
        let dual = galois::dual_basis(&target_column, FieldId::Gf2)
            .expect("verified scheme has a full-rank target column");
        for (s, &e) in dual.iter().enumerate() {
            d[j * 8 + s] = e.value();
        }
        for i in 0..n {
            if i == j {
                continue;
            }
            let column = sch.check().dual_column(&gamma, i);
            let vs: Vec<u8> = column.iter().map(|e| e.value()).collect();
            let (mu, pivots) = rref_basis(&vs);
            let hb = (i * n + j) * 9;
            h[hb] = mu.len() as u8;
            for (s, &m) in mu.iter().enumerate() {
                let mask = trace_mask(emb, m);
                // Each sender mask must realize the trace functional of its
                // basis element exactly; check all 256 inputs.
                for x in 0..=255u8 {
                    assert_eq!(
                        sp.at(mask & x),
                        emb.trace_value((f.elem(m) * f.elem(x)).value()),
                        "sender mask for helper {i}, target {j}, bit {s} \
                         does not realize its trace functional"
                    );
                }
                h[hb + 1 + s] = mask;
            }
            let rb = (i * n + j) * 8;
            for (s, &v) in vs.iter().enumerate() {
                r[rb + s] = reduce_to_mask(v, &mu, &pivots)
                    .expect("column element lies in its own span");
            }
        }
    }

    Ok(LookupTables {
        n,
        k: code.k(),
        field: code.field(),
        h,
        r,
        d,
        sp,
        code: Some(code),
        schemes: Some(schemes.to_vec()),
    })
}

// ---------------------------------------------------------------------------
// Staged sender / receiver
// ---------------------------------------------------------------------------

/// The bits helper `i` sends toward repairing position `j`, given its own
/// symbol `c_i`: `RepairTrace[s] = sp[H[i][j][s+1] & c_i]`.
pub fn sender_traces(t: &LookupTables, j: usize, i: usize, c_i: u8) -> RepairTrace {
    assert!(i < t.n && j < t.n, "helper/target out of range");
    assert_ne!(i, j, "a helper cannot repair itself");
    let entry = t.h_entry(i, j);
    let r = entry[0] as usize;
    let bits = (0..r).map(|s| t.sp.at(entry[1 + s] & c_i)).collect();
    RepairTrace { bits }
}

/// Recover `c_j` from the helpers' traces, ordered by ascending helper
/// index with position `j` skipped. Stages the published formulas directly:
/// column traces via `R`, then the dual-basis recombination via `D`.
pub fn receiver_recover(
    t: &LookupTables,
    j: usize,
    traces: &[RepairTrace],
) -> Result<u8, CodecError> {
    assert!(j < t.n, "target out of range");
    if traces.len() != t.n - 1 {
        return Err(CodecError::TraceCount { expected: t.n - 1, got: traces.len() });
    }
    let mut acc = 0u8;
    for (slot, i) in (0..t.n).filter(|&i| i != j).enumerate() {
        let trace = &traces[slot];
        let r = t.rank(i, j);
        if trace.len() != r {
            return Err(CodecError::TraceShape { helper: i, expected: r, got: trace.len() });
        }
        let packed = trace.dec();
        let masks = t.r_masks(i, j);
        for (s, &mask) in masks.iter().enumerate() {
            acc ^= t.sp.at(mask & packed) << s;
        }
    }
    // c_j = ⊕_s bit_s(acc) × D[j][s]; the GF(256) product with a single bit
    // is the dual byte itself or zero.
    let d = t.d_bytes(j);
    let mut c = 0u8;
    for (s, &db) in d.iter().enumerate() {
        if acc >> s & 1 == 1 {
            c ^= db;
        }
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// Fused repair engine
// ---------------------------------------------------------------------------

/// Fully fused repair: the staged per-bit formulas folded into one 256-byte
/// table per helper/target pair on each side, so a repair costs one lookup
/// per helper plus XORs. Construction asserts equality with the staged
/// engine on every sender input and on randomized receiver inputs.
pub struct CompiledRepair {
    n: usize,
    /// `s_lut[(i·n + j)·256 + c]`: `Dec` of helper `i`'s trace for target `j`.
    s_lut: Vec<u8>,
    /// `l_lut[(i·n + j)·256 + dec]`: helper `i`'s packed column-trace byte.
    l_lut: Vec<u8>,
    /// `dual_lut[j·256 + acc]`: XOR of `D[j][s]` over the set bits of `acc`.
    dual_lut: Vec<u8>,
    /// `ranks[i·n + j]`: trace bits helper `i` sends for target `j`.
    ranks: Vec<u8>,
}

impl CompiledRepair {
    pub fn new(t: &LookupTables) -> CompiledRepair {
        let n = t.n;
        let mut s_lut = vec![0u8; n * n * 256];
        let mut l_lut = vec![0u8; n * n * 256];
        let mut dual_lut = vec![0u8; n * 256];
        let mut ranks = vec![0u8; n * n];

        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                ranks[i * n + j] = t.rank(i, j) as u8;
                let entry = t.h_entry(i, j);
                let masks = t.r_masks(i, j);
                let base = (i * n + j) * 256;
                for c in 0..=255u8 {
                    let mut packed = 0u8;
                    for s in 0..entry[0] as usize {
                        packed |= t.sp.at(entry[1 + s] & c) << s;
                    }
                    s_lut[base + c as usize] = packed;
                }
                for dec_val in 0..=255u8 {
                    let mut col = 0u8;
                    for (s, &mask) in masks.iter().enumerate() {
                        col |= t.sp.at(mask & dec_val) << s;
                    }
                    l_lut[base + dec_val as usize] = col;
                }
            }
        }
        for j in 0..n {
            let d = t.d_bytes(j);
            // Subset-XOR table built incrementally: strip the lowest set bit.
            for acc in 1..256usize {
                let low = acc & acc.wrapping_neg();
                let s = low.trailing_zeros() as usize;
                dual_lut[j * 256 + acc] = dual_lut[j * 256 + (acc ^ low)] ^ d[s];
            }
        }

        let fused = CompiledRepair { n, s_lut, l_lut, dual_lut, ranks };
        fused.assert_matches_staged(t);
        fused
    }

    /// Exhaustively check the fused sender against [`sender_traces`] and the
    /// fused receiver against [`receiver_recover`] on seeded random traces.
    fn assert_matches_staged(&self, t: &LookupTables) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for c in 0..=255u8 {
                    assert_eq!(
                        self.sender_dec(j, i, c),
                        sender_traces(t, j, i, c).dec(),
                        "fused sender diverges at helper {i}, target {j}"
                    );
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut decs = vec![0u8; n - 1];
        for j in 0..n {
            for _ in 0..256 {
                let mut traces = Vec::with_capacity(n - 1);
                for (slot, i) in (0..n).filter(|&i| i != j).enumerate() {
                    let r = self.ranks[i * n + j] as usize;
                    let bits: Vec<u8> = (0..r).map(|_| rng.gen_range(0..=1u8)).collect();
                    decs[slot] = dec(&bits);
                    traces.push(RepairTrace::from_bits(bits));
                }
                let staged = receiver_recover(t, j, &traces).expect("well-shaped traces");
                assert_eq!(
                    self.recover(j, &decs),
                    staged,
                    "fused receiver diverges at target {j}"
                );
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Trace bits helper `i` sends for target `j`.
    pub fn rank(&self, i: usize, j: usize) -> usize {
        self.ranks[i * self.n + j] as usize
    }

    /// Bits downloaded per repaired codeword for target `j`.
    pub fn bits_per_repair(&self, j: usize) -> u32 {
        (0..self.n).filter(|&i| i != j).map(|i| self.rank(i, j) as u32).sum()
    }

    /// Fused sender: packed trace of helper `i`'s symbol for target `j`.
    #[inline]
    pub fn sender_dec(&self, j: usize, i: usize, c_i: u8) -> u8 {
        self.s_lut[(i * self.n + j) * 256 + c_i as usize]
    }

    /// Fused receiver: `decs` are the packed traces by ascending helper
    /// index with `j` skipped.
    #[inline]
    pub fn recover(&self, j: usize, decs: &[u8]) -> u8 {
        debug_assert_eq!(decs.len(), self.n - 1);
        let mut acc = 0u8;
        for (slot, i) in (0..self.n).filter(|&i| i != j).enumerate() {
            acc ^= self.l_lut[(i * self.n + j) * 256 + decs[slot] as usize];
        }
        self.dual_lut[j * 256 + acc as usize]
    }
}

// ---------------------------------------------------------------------------
// Naive baseline
// ---------------------------------------------------------------------------

/// Matrix-inversion repair baseline: download whole symbols from the first
/// `k` helpers, invert the corresponding generator columns once, and dot the
/// received symbols with the cached weights for every codeword thereafter.
pub struct NaiveRepairer {
    target: usize,
    helpers: Vec<usize>,
    weights: Vec<u8>,
    /// One 256-entry multiply table per weight, so steady-state repair is
    /// `k` lookups and XORs per codeword.
    luts: Vec<[u8; 256]>,
}

impl NaiveRepairer {
    /// Build the repairer for position `j` under generator `g`, using the
    /// first `k` positions other than `j` as helpers.
    pub fn new(g: &GeneratorMatrix, j: usize) -> Result<NaiveRepairer, CodecError> {
        let k = g.k();
        let n = g.n();
        assert!(j < n, "target out of range");
        let helpers: Vec<usize> = (0..n).filter(|&i| i != j).take(k).collect();
        let sub = g.matrix().select_columns(&helpers);
        let inv = sub.inverse().ok_or(CodecError::SingularSubmatrix)?;
        let field = g.matrix().field();
        let gj = Matrix::from_fn(field, k, 1, |t, _| g.matrix().row(t)[j]);
        let w = inv.mul(&gj);
        let weights: Vec<u8> = (0..k).map(|t| w.row(t)[0].value()).collect();
        let luts = weights
            .iter()
            .map(|&wv| {
                let we = field.elem(wv);
                let mut lut = [0u8; 256];
                for (x, slot) in lut.iter_mut().enumerate() {
                    *slot = (we * field.elem(x as u8)).value();
                }
                lut
            })
            .collect();
        Ok(NaiveRepairer { target: j, helpers, weights, luts })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Helper positions, ascending; the receiver downloads these symbols.
    pub fn helpers(&self) -> &[usize] {
        &self.helpers
    }

    /// The cached combination weights (the inverted submatrix applied to the
    /// target's generator column).
    pub fn weights(&self) -> &[u8] {
        &self.weights
    }

    /// Whole bytes downloaded per repaired codeword.
    pub fn downloaded_bytes(&self) -> usize {
        self.helpers.len()
    }

    /// Repair from the helper symbols, ordered as [`Self::helpers`].
    #[inline]
    pub fn repair(&self, symbols: &[u8]) -> u8 {
        debug_assert_eq!(symbols.len(), self.helpers.len());
        let mut acc = 0u8;
        for (lut, &s) in self.luts.iter().zip(symbols) {
            acc ^= lut[s as usize];
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Benchmark harness
// ---------------------------------------------------------------------------

/// Which position gets erased in each benchmarked codeword.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Erasure {
    /// Every codeword loses the same position.
    Fixed(usize),
    /// Each codeword loses a seeded-uniform random position.
    Random,
}

/// Benchmark settings. Timing is single-threaded by default; `parallel`
/// switches the repair passes to a work-stealing throughput mode.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub codewords: u64,
    pub erasure: Erasure,
    pub seed: u64,
    pub parallel: bool,
}

impl BenchConfig {
    pub fn new(codewords: u64, erasure: Erasure) -> BenchConfig {
        BenchConfig { codewords, erasure, seed: 0, parallel: false }
    }
}

/// One benchmark measurement: a method (`trace` or `naive`), a role
/// (`sender`, `receiver`, or `total`), wall-clock seconds, and the exact
/// transfer volume in bits. Transfer is per direction, so the sender,
/// receiver, and total rows of one method all carry the same volume.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub method: &'static str,
    pub role: &'static str,
    pub seconds: f64,
    pub bits_transferred: u64,
    pub codewords: u64,
}

/// A benchmark report; renders as CSV with header
/// `method,role,seconds,bytes_transferred,codewords`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn rows(&self) -> &[BenchRow] {
        &self.rows
    }

    pub fn row(&self, method: &str, role: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.method == method && r.role == role)
    }

    /// CSV rendering. `bytes_transferred` is the exact bit count divided by
    /// eight; when the bits are not byte-aligned the value is fractional.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,role,seconds,bytes_transferred,codewords\n");
        for r in &self.rows {
            let bytes = r.bits_transferred as f64 / 8.0;
            out.push_str(&format!(
                "{},{},{:.6},{},{}\n",
                r.method, r.role, r.seconds, bytes, r.codewords
            ));
        }
        out
    }
}

/// Stream `cfg.codewords` random codewords of `code` through both repair
/// engines and time each side. Sender time is the maximum over helpers
/// (each helper's pass over its own symbol stripe), receiver time is one
/// pass over the trace stripes, and totals are their sums. Recovered
/// symbols are checked against the erased originals after the clocks stop.
pub fn bench(
    code: &GrsCode,
    tables: &LookupTables,
    cfg: &BenchConfig,
) -> Result<BenchReport, CodecError> {
    if tables.n != code.n() || tables.k != code.k() || tables.field != code.field() {
        return Err(CodecError::CodeMismatch(format!(
            "tables are for n = {}, k = {}, field {}; code has n = {}, k = {}, field {}",
            tables.n,
            tables.k,
            tables.field.name(),
            code.n(),
            code.k(),
            code.field().name()
        )));
    }
    if code.field() != FieldId::Gf256 {
        return Err(CodecError::Unsupported(
            "the benchmark streams byte symbols; the code must live over GF(256)".into(),
        ));
    }
    if let Erasure::Fixed(j) = cfg.erasure {
        if j >= code.n() {
            return Err(CodecError::Unsupported(format!(
                "erasure position {j} out of range for n = {}",
                code.n()
            )));
        }
    }
    let mut report = BenchReport::default();
    let t = usize::try_from(cfg.codewords)
        .map_err(|_| CodecError::Unsupported("codeword count exceeds address space".into()))?;
    if t == 0 {
        return Ok(report);
    }

    let n = code.n();
    let k = code.k();
    let field = code.field();

    // Untimed setup: compiled engines, random messages, stripe layout
    // (symbol i of codeword t lives at offset t of buffer i).
    let fused = CompiledRepair::new(tables);
    let naive: Vec<NaiveRepairer> = (0..n)
        .map(|j| NaiveRepairer::new(&code.generator(), j))
        .collect::<Result<_, _>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let erasures: Vec<u8> = match cfg.erasure {
        Erasure::Fixed(j) => vec![j as u8; t],
        Erasure::Random => (0..t).map(|_| rng.gen_range(0..n) as u8).collect(),
    };

    // Column lookup tables for encoding: symbol i of a codeword is
    // ⊕_s enc_lut[s][i][m_s].
    let g = code.generator();
    let enc_lut: Vec<Vec<[u8; 256]>> = (0..k)
        .map(|s| {
            (0..n)
                .map(|i| {
                    let ge = g.matrix().row(s)[i];
                    let mut lut = [0u8; 256];
                    for (x, slot) in lut.iter_mut().enumerate() {
                        *slot = (ge * field.elem(x as u8)).value();
                    }
                    lut
                })
                .collect()
        })
        .collect();
    let mut stripes: Vec<Vec<u8>> = vec![vec![0u8; t]; n];
    let mut message = vec![0u8; k];
    for idx in 0..t {
        rng.fill(&mut message[..]);
        for (i, stripe) in stripes.iter_mut().enumerate() {
            let mut c = 0u8;
            for (s, &m) in message.iter().enumerate() {
                c ^= enc_lut[s][i][m as usize];
            }
            stripe[idx] = c;
        }
    }

    // --- Trace method ---------------------------------------------------
    let mut dec_stripes: Vec<Vec<u8>> = vec![vec![0u8; t]; n];
    let mut trace_sender = 0f64;
    for i in 0..n {
        let stripe = &stripes[i];
        let out = &mut dec_stripes[i];
        let clock = Instant::now();
        if cfg.parallel {
            use rayon::prelude::*;
            out.par_iter_mut().enumerate().for_each(|(idx, slot)| {
                let j = erasures[idx] as usize;
                if j != i {
                    *slot = fused.sender_dec(j, i, stripe[idx]);
                }
            });
        } else {
            for idx in 0..t {
                let j = erasures[idx] as usize;
                if j != i {
                    out[idx] = fused.sender_dec(j, i, stripe[idx]);
                }
            }
        }
        trace_sender = trace_sender.max(clock.elapsed().as_secs_f64());
    }

    let mut recovered = vec![0u8; t];
    let clock = Instant::now();
    if cfg.parallel {
        use rayon::prelude::*;
        recovered.par_iter_mut().enumerate().for_each(|(idx, slot)| {
            let j = erasures[idx] as usize;
            let mut acc = 0u8;
            for i in (0..n).filter(|&i| i != j) {
                acc ^= fused.l_lut[(i * n + j) * 256 + dec_stripes[i][idx] as usize];
            }
            *slot = fused.dual_lut[j * 256 + acc as usize];
        });
    } else {
        for idx in 0..t {
            let j = erasures[idx] as usize;
            let mut acc = 0u8;
            for i in (0..n).filter(|&i| i != j) {
                acc ^= fused.l_lut[(i * n + j) * 256 + dec_stripes[i][idx] as usize];
            }
            recovered[idx] = fused.dual_lut[j * 256 + acc as usize];
        }
    }
    let trace_receiver = clock.elapsed().as_secs_f64();
    for idx in 0..t {
        assert_eq!(
            recovered[idx],
            stripes[erasures[idx] as usize][idx],
            "trace repair failed at codeword {idx}"
        );
    }
    let trace_bits: u64 =
        erasures.iter().map(|&j| u64::from(tables.repair_bits(j as usize))).sum();

    // --- Naive method ---------------------------------------------------
    // Helper i participates in codeword idx iff it is among the first k
    // positions other than the erased one; it then sends its whole symbol.
    let mut participates = vec![false; n * n];
    for j in 0..n {
        for &i in naive[j].helpers() {
            participates[i * n + j] = true;
        }
    }
    let mut sent_stripes: Vec<Vec<u8>> = vec![vec![0u8; t]; n];
    let mut naive_sender = 0f64;
    for i in 0..n {
        let stripe = &stripes[i];
        let out = &mut sent_stripes[i];
        let clock = Instant::now();
        if cfg.parallel {
            use rayon::prelude::*;
            out.par_iter_mut().enumerate().for_each(|(idx, slot)| {
                let j = erasures[idx] as usize;
                if participates[i * n + j] {
                    *slot = stripe[idx];
                }
            });
        } else {
            for idx in 0..t {
                let j = erasures[idx] as usize;
                if participates[i * n + j] {
                    out[idx] = stripe[idx];
                }
            }
        }
        naive_sender = naive_sender.max(clock.elapsed().as_secs_f64());
    }

    let mut naive_recovered = vec![0u8; t];
    let clock = Instant::now();
    if cfg.parallel {
        use rayon::prelude::*;
        naive_recovered.par_iter_mut().enumerate().for_each(|(idx, slot)| {
            let j = erasures[idx] as usize;
            let rep = &naive[j];
            let mut acc = 0u8;
            for (s, &i) in rep.helpers().iter().enumerate() {
                acc ^= rep.luts[s][sent_stripes[i][idx] as usize];
            }
            *slot = acc;
        });
    } else {
        for idx in 0..t {
            let j = erasures[idx] as usize;
            let rep = &naive[j];
            let mut acc = 0u8;
            for (s, &i) in rep.helpers().iter().enumerate() {
                acc ^= rep.luts[s][sent_stripes[i][idx] as usize];
            }
            naive_recovered[idx] = acc;
        }
    }
    let naive_receiver = clock.elapsed().as_secs_f64();
    for idx in 0..t {
        assert_eq!(
            naive_recovered[idx],
            stripes[erasures[idx] as usize][idx],
            "naive repair failed at codeword {idx}"
        );
    }
    let naive_bits = (t as u64) * (k as u64) * 8;

    let cw = cfg.codewords;
    report.rows = vec![
        BenchRow {
            method: "trace",
            role: "sender",
            seconds: trace_sender,
            bits_transferred: trace_bits,
            codewords: cw,
        },
        BenchRow {
            method: "trace",
            role: "receiver",
            seconds: trace_receiver,
            bits_transferred: trace_bits,
            codewords: cw,
        },
        BenchRow {
            method: "trace",
            role: "total",
            seconds: trace_sender + trace_receiver,
            bits_transferred: trace_bits,
            codewords: cw,
        },
        BenchRow {
            method: "naive",
            role: "sender",
            seconds: naive_sender,
            bits_transferred: naive_bits,
            codewords: cw,
        },
        BenchRow {
            method: "naive",
            role: "receiver",
            seconds: naive_receiver,
            bits_transferred: naive_bits,
            codewords: cw,
        },
        BenchRow {
            method: "naive",
            role: "total",
            seconds: naive_sender + naive_receiver,
            bits_transferred: naive_bits,
            codewords: cw,
        },
    ];
    Ok(report)
}

// ---------------------------------------------------------------------------
// Table file I/O
// ---------------------------------------------------------------------------

const TABLE_MAGIC: &[u8; 6] = b"RSLT1\0";
const TABLE_VERSION: u32 = 1;

/// Write compiled tables bit-exactly: magic, version, `n`, `k`, field, then
/// the raw `H` (n·n·9), `R` (n·n·8), and `D` (n·8) bytes. The file is
/// written to a sibling temporary path and renamed into place.
pub fn write_tables(path: &Path, t: &LookupTables) -> Result<(), CodecError> {
    let mut buf =
        Vec::with_capacity(6 + 4 + 8 + 1 + t.h.len() + t.r.len() + t.d.len());
    buf.extend_from_slice(TABLE_MAGIC);
    buf.extend_from_slice(&TABLE_VERSION.to_le_bytes());
    buf.extend_from_slice(&(t.n as u32).to_le_bytes());
    buf.extend_from_slice(&(t.k as u32).to_le_bytes());
    buf.push(t.field.m() as u8);
    buf.extend_from_slice(&t.h);
    buf.extend_from_slice(&t.r);
    buf.extend_from_slice(&t.d);
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, &buf)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Read tables written by [`write_tables`]. The result carries no code or
/// scheme references — only the byte tables the repair engines consume.
pub fn read_tables(path: &Path) -> Result<LookupTables, CodecError> {
    let buf = fs::read(path)?;
    let need = |len: usize| -> Result<(), CodecError> {
        if buf.len() < len {
            Err(CodecError::CorruptTables(format!(
                "file is {} bytes, need at least {len}",
                buf.len()
            )))
        } else {
            Ok(())
        }
    };
    need(15)?;
    if &buf[0..6] != TABLE_MAGIC {
        return Err(CodecError::CorruptTables("bad magic".into()));
    }
    let version = u32::from_le_bytes(buf[6..10].try_into().unwrap());
    if version != TABLE_VERSION {
        return Err(CodecError::CorruptTables(format!("unsupported version {version}")));
    }
    let n = u32::from_le_bytes(buf[10..14].try_into().unwrap()) as usize;
    if n == 0 || n > 255 {
        return Err(CodecError::CorruptTables(format!("implausible n = {n}")));
    }
    need(19)?;
    let k = u32::from_le_bytes(buf[14..18].try_into().unwrap()) as usize;
    if k == 0 || k >= n {
        return Err(CodecError::CorruptTables(format!("implausible k = {k} for n = {n}")));
    }
    let field = match buf[18] {
        1 => FieldId::Gf2,
        2 => FieldId::Gf4,
        4 => FieldId::Gf16,
        8 => FieldId::Gf256,
        other => {
            return Err(CodecError::CorruptTables(format!("unknown field tag {other}")));
        }
    };
    let h_len = n * n * 9;
    let r_len = n * n * 8;
    let d_len = n * 8;
    let total = 19 + h_len + r_len + d_len;
    if buf.len() != total {
        return Err(CodecError::CorruptTables(format!(
            "file is {} bytes, expected {total}",
            buf.len()
        )));
    }
    let h = buf[19..19 + h_len].to_vec();
    let r = buf[19 + h_len..19 + h_len + r_len].to_vec();
    let d = buf[19 + h_len + r_len..total].to_vec();
    for i in 0..n {
        for j in 0..n {
            let rank = h[(i * n + j) * 9];
            if rank > 8 {
                return Err(CodecError::CorruptTables(format!(
                    "rank {rank} at helper {i}, target {j} exceeds 8"
                )));
            }
        }
    }
    Ok(LookupTables { n, k, field, h, r, d, sp: build_sp(), code: None, schemes: None })
}

// ---------------------------------------------------------------------------
