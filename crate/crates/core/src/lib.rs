//! Simulation and statistical verification of a family of ontological models
//! that reproduce projective-measurement quantum statistics exactly.
//!
//! An ontological model assigns every preparation of a `d`-dimensional
//! quantum system a probability distribution (an *epistemic state*) over a
//! space of *ontic states*, and assigns every measurement a deterministic
//! response function on that space. Here the ontic state space is
//! `CP^{d-1} x [0, 1]`: a pure-state direction `|lambda>` together with an
//! auxiliary coordinate `x`.
//!
//! Four models are implemented:
//!
//! - **`bell`** - the baseline model. Preparing `|psi>` puts all weight on
//!   the line `{(|psi>, x) : x in [0, 1]}`, and a measurement is answered by
//!   cutting `[0, 1]` into consecutive intervals of lengths
//!   `|<phi_k|lambda>|^2`. Distinct preparations have disjoint supports, so
//!   the quantum state is ontic: it can be read off the ontic state.
//! - **`qubit-hemisphere`** (`d = 2` only) - carves two regions out of the
//!   ontic space, one around each pole of the Bloch sphere. Every measurement
//!   answers with outcome 0 everywhere on the north region and outcome 1
//!   everywhere on the south region, so preparations may share those regions:
//!   all states of the open northern hemisphere put positive weight on the
//!   north region, making their supports pairwise overlap.
//! - **`general-cap`** - the `d`-dimensional generalization with a single
//!   region around a preferred state: every direction with
//!   `|<lambda|0>|^2 > (d-1)/d` contributes the slab `x < z(lambda)`, where
//!   `z` is the worst-case probability floor of the anchor-favoured outcome.
//! - **`basis-cap`** - one such region around each element of a preferred
//!   basis, with measurement outcomes relabelled per ontic direction so each
//!   region forces the outcome aligned with its own basis element.
//!
//! The last three models are epistemic modifications: they reproduce the
//! Born rule exactly while giving some pairs of distinct pure states
//! overlapping supports, so those preparations are *compatible with a single
//! state of reality*.
//!
//! The [`verify`] module certifies all of this numerically: exact
//! response-mass accounting, chi-squared goodness of fit of sampled outcome
//! frequencies against the Born rule, region response-constancy sweeps, and
//! Monte Carlo estimation of support overlaps.
//!
//! Randomness is explicit everywhere: operations take either an `Rng` or a
//! `u64` seed, and the seeded verification drivers produce byte-identical
//! reports for a given seed regardless of worker-thread count.

pub mod bell;
pub mod epistemic;
pub mod model;
pub mod ontology;
pub mod qstate;
pub mod verify;

mod error;

pub use error::{Error, Result};
pub use model::Model;
pub use qstate::{ACCUMULATED_TOL, ALGEBRAIC_TOL};
