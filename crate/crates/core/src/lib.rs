//! Exact computations around multinorm-one tori `T_{L/k}` attached to an
//! étale algebra `L = K_0 × ... × K_m`.
//!
//! The crate is organised bottom-up:
//!
//! * [`abelian`]: Smith normal form and finite abelian groups in canonical
//!   invariant-factor form. Every group-valued result lives here.
//! * [`kummer`]: Kummer families `K_i = k((ℓ1^{a_i} ℓ2^{b_i})^{1/p^n})` over
//!   `k = Q(ζ_{p^n})` and the intersection combinatorics derived from them.
//! * [`lee`]: assembly of the Tate–Shafarevich group from that combinatorics,
//!   with the patching degrees and degrees of freedom supplied by a provider.
//! * [`hnp`]: a rule engine deciding when the Hasse norm principle holds.
//! * [`localnorm`]: local norm indices from group-theoretic local data.
//! * [`units`]: global unit norm indices and a continued-fraction Pell solver.
//! * [`ono`]: the Ono invariants and class-number formulas for `T_{L/k}`.
//!
//! Everything is exact: integers are arbitrary precision and quotients are
//! reduced rationals.

pub mod abelian;
pub mod arith;
pub mod hnp;
pub mod kummer;
pub mod lee;
pub mod localnorm;
pub mod ono;
pub mod units;

mod error;

pub use abelian::{FiniteAbelianGroup, IntMatrix, SubgroupGens};
pub use error::Error;
pub use kummer::{EquivalenceStructure, KummerFamily, NormalizedFamily};
pub use lee::{InvariantProvider, OverrideProvider, ReferenceProvider, ShaResult};
