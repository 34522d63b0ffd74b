use serde::{Deserialize, Serialize};

/// Size bounds shared by every exhaustive routine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest admissible structure size `q`.
    pub max_q: u64,
    /// Largest `q^d` that may be enumerated (whole-space sums, sampling).
    pub max_space: u64,
    /// Tuple visits allowed to the brute-force chain counter.
    pub brute_budget: u128,
    /// Largest `k` accepted by the support decomposition (`2^k` supports).
    pub max_decompose_k: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_q: 10_000,
            max_space: 1 << 22,
            brute_budget: 100_000_000,
            max_decompose_k: 16,
        }
    }
}
