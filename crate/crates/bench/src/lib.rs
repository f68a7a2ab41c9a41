//! Benchmark fixtures for `prodsys-core`.

use prodsys_core::{FiberDim, Monoid, ProductSystem};

/// `(ℕ,2) * (ℕ,3)`, the word-graded free product used by the benches.
pub fn free_product_2_3() -> ProductSystem {
    let n = Monoid::naturals();
    ProductSystem::free_product(&[
        ProductSystem::word_graded(n.clone(), vec![FiberDim::Finite(2)]).expect("finite fiber"),
        ProductSystem::word_graded(n, vec![FiberDim::Finite(3)]).expect("finite fiber"),
    ])
    .expect("word-graded factors")
}

/// `ℕ²` with words of length `m + n` over two letters.
pub fn concatenated_n2() -> ProductSystem {
    ProductSystem::concatenated(Monoid::direct_sum(2), FiberDim::Finite(2)).expect("finite alphabet")
}
