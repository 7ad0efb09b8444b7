//! Population learning for symmetric zero-sum games.
//!
//! A population of policies is described by an interaction graph: row `i`
//! is the opponent distribution that policy `i` trains against. Graphs are
//! either fixed (self-play, cycles, fictitious play) or produced from the
//! current payoff matrix by a meta-graph solver such as [`graphs::PsroNash`].
//! Training alternates match-making, approximate best-response updates and
//! payoff estimation; [`eval`] measures the resulting populations.

pub mod error;
pub mod exec;
pub mod games;
pub mod graphs;
pub mod learning;
pub mod eval;
pub mod policy;
pub mod serialize;
pub mod solvers;

pub use error::{Error, Result};
pub use exec::Executor;
pub use games::{EpisodeResult, MarkovGame, MatrixGame};
pub use graphs::{InteractionGraph, MetaGraphSolver, MetaStrategy, PsroNash};
pub use policy::{MixedStrategy, TabularPolicy};

/// Dense real matrix used for payoffs and interaction graphs.
pub type Matrix = nalgebra::DMatrix<f64>;
/// Seeded generator used everywhere randomness is consumed.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Derives an independent stream seed from a base seed and a path of indices.
///
/// Each mixing round is the splitmix64 finalizer, so nearby inputs map to
/// unrelated outputs.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    let mut h = base ^ 0x9e37_79b9_7f4a_7c15;
    for &p in path {
        h = splitmix(h ^ splitmix(p.wrapping_add(0x632b_e59b_d9b4_e019)));
    }
    splitmix(h)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seeded generator for the stream identified by `(base, path)`.
pub fn rng_for(base: u64, path: &[u64]) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(derive_seed(base, path))
}
