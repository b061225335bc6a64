//! Multiband prolate spheroidal analysis on finite grids.
//!
//! The crate builds the covariance of samples of a process whose spectrum
//! is flat on a union of frequency boxes or parallelograms, computes its
//! spectrum, and compares the exact eigen-tensor dictionary with the cheap
//! per-band dictionary of modulated Slepian outer products.
//!
//! ```
//! use mdprolate::bandspec::CubicBandUnion;
//! use mdprolate::prolate::{cluster_counts, multiband_kernel_1d};
//!
//! let bands = CubicBandUnion::intervals(&[(-0.1, 0.05), (0.2, 0.05)]).unwrap();
//! let kernel = multiband_kernel_1d(128, &bands).unwrap();
//! let eigs = kernel.eigenvalues().unwrap();
//! let counts = cluster_counts(&eigs, 0.05);
//! assert!(counts.near_one > 20 && counts.middle < 10);
//! ```

pub mod bandspec;
pub mod dictionary;
pub mod error;
pub mod export;
pub mod linalg;
pub mod mdoperator;
pub mod parallelepiped;
pub mod prolate;

pub use error::{Error, Result};

/// Caps the worker threads used by parallel loops and by the dense
/// factorizations. Returns an error if the global pool was already built
/// with a different size.
pub fn set_thread_limit(threads: usize) -> Result<()> {
    if threads == 0 {
        return Err(Error::InvalidArgument("thread limit must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .or_else(|e| {
            if rayon::current_num_threads() == threads {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("cannot resize thread pool: {e}")))
            }
        })?;
    faer::set_global_parallelism(if threads == 1 {
        faer::Par::Seq
    } else {
        faer::Par::rayon(threads)
    });
    Ok(())
}

// The guide's snippets run as doctests so the book cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bands.md")]
    mod bands {}
    #[doc = include_str!("../../../book/src/prolate.md")]
    mod prolate {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/parallelograms.md")]
    mod parallelograms {}
    #[doc = include_str!("../../../book/src/dictionaries.md")]
    mod dictionaries {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
