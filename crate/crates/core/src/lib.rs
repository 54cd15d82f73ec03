//! Price-of-anarchy certification for generalized weighted congestion games.
//!
//! The worst-case approximate price of anarchy of a class of games is the
//! optimum of a linear program over latency coefficients on a representative
//! model. This crate builds those programs and their duals, solves them with
//! an exact or floating-point simplex, extracts worst-case games, and checks
//! everything against brute-force oracles on small games.

pub mod error;
pub mod formulations;
pub mod game;
pub mod io;
pub mod lp;
pub mod oracle;
pub mod random;
pub mod representative;
pub mod scalar;
pub mod smoothness;

pub use error::{Error, Result};
pub use scalar::{Number, Rational, Scalar, Tolerances};

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
