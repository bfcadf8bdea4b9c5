//! Optimal spectral-norm reduction of one-letter weighted finite automata.
//!
//! A [`Wfa`] `⟨α, A, β⟩` realizes `f(k) = αᵀAᵏβ`. For a stable automaton the
//! best rank-`k` approximation of its Hankel operator in spectral norm has
//! error exactly `σ_k`, the `k`-th Hankel singular number, and is again
//! realized by a `k`-state automaton. [`aak_reduce`] computes it from the
//! singular-value canonical form and certifies the result against a
//! truncated-Hankel oracle.

// Guards are written `!(x < bound)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aak;
pub mod error;
pub mod extensions;
pub mod linalg;
pub mod oracle;
pub mod random;
pub mod symbol;
pub mod tolerances;
pub mod wfa;

pub use aak::{aak_reduce, ReduceOptions, ReductionReport};
pub use error::{Error, Result};
pub use extensions::{reduce_general, reflect_unstable, split_stable_unstable, SplitWfa};
pub use tolerances::Tolerances;
pub use wfa::{equivalent, minimize, to_sva, SvaWfa, Wfa};
