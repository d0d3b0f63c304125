//! Constructive decompositions: practical + triangular for every `n`, and the
//! congruence machinery behind practical + two s-gonal numbers.

mod pairs;
mod theorem2;
mod tri;
mod witness;

pub use pairs::{
    all_pair_solutions, gonal_mod, pair_mod_2, pair_mod_p, pair_mod_pk, pair_mod_pk_alternatives,
    special_prime, PairCongruence,
};
pub use theorem2::{
    constant_a, theorem2_decompose, theorem2_decompose_with, theorem2_params, theorem2_threshold,
    Certification, PolyDecomposition, PolyProof, Theorem2Decomposition, Theorem2Params,
    DEFAULT_MAX_COMBINATIONS,
};
pub use tri::{decompose_practical_triangular, TriDecomposition};
pub use witness::{Components, Proof, ResidueEntry, Witness, WitnessKind};
