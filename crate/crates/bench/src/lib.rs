//! Shared fixtures for the criterion benchmarks: a compiled scheme set and
//! codeword batches for the repair engines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rslab_core::codec::{compile_tables, LookupTables};
use rslab_core::galois::FieldId;
use rslab_core::grs::{self, GrsCode};
use rslab_core::scheme::{lift_canonical, RepairScheme};
use rslab_core::search::{exhaustive_search, SearchConfig};

/// RS(5,3) over GF(256) with searched 16-point schemes lifted to bytes —
/// small enough to build in milliseconds, real enough to exercise every
/// engine path.
pub fn lifted_rs53() -> (GrsCode, Vec<RepairScheme>, LookupTables) {
    let cfg = SearchConfig::new(grs::f16_code(5, 3).expect("valid"), FieldId::Gf2);
    let result = exhaustive_search(&cfg).expect("search succeeds");
    let schemes: Vec<RepairScheme> = result
        .bests()
        .iter()
        .map(|b| lift_canonical(b.as_ref().expect("covered"), FieldId::Gf256).expect("lifts"))
        .collect();
    let code = schemes[0].code().clone();
    let tables = compile_tables(&schemes).expect("compiles");
    (code, schemes, tables)
}

/// `count` random codewords of `code`, as byte vectors.
pub fn random_codewords(code: &GrsCode, count: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = code.field();
    let g = code.generator();
    (0..count)
        .map(|_| {
            let message: Vec<_> =
                (0..code.k()).map(|_| field.elem(rng.gen::<u8>())).collect();
            grs::encode(&g, &message)
                .expect("length matches")
                .iter()
                .map(|e| e.value())
                .collect()
        })
        .collect()
}
