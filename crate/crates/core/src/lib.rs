//! Hybrid classical/quantum rainbow-table lookup.
//!
//! Chains are built classically from MD5 and base62 reduction functions.
//! Chain ends are grouped into 16-slot buckets by a 16-bit Pearson hash, and
//! membership of a candidate inside its bucket is decided by a simulated
//! Grover search over a 4-qubit register.

pub mod error;
pub mod hashing;
pub mod quantum_sim;
pub mod rainbow_table;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
pub use hashing::{
    build_permutation, canonical_reduction_specs, md5_hex, pearson16, reduce, HexDigest,
    PearsonPermutation, ReductionSpec,
};
pub use quantum_sim::{grover_search, GroverOutcome, Statevector};
pub use rainbow_table::{
    build_buckets, end_hash_indices, generate_table, load_table, save_table, BucketIndex, Chain,
    RainbowTable,
};
pub use search::{crack, crack_classical, SearchConfig, SearchReport};
