//! Quadric surface intersection (QSI) key exchange.
//!
//! Secret keys are quadric surfaces hidden inside a non-standard Veronese
//! embedding of P³; public keys are hyperplanes containing the embedded
//! quadrics. Both parties recover the genus-1 intersection curve of the two
//! quadrics as a bidegree-(2,2) component of a pulled-back hyperplane and
//! agree on its j-invariant.
//!
//! Module map:
//!
//! * [`ff`]: prime field arithmetic for a runtime modulus.
//! * [`linalg`]: dense matrices, powers, inverses, left nullspaces.
//! * [`forms`]: monomial indexing, bihomogeneous forms, pullbacks.
//! * [`embeddings`]: GLEmb, σ-embeddings, automorphisms of Veronese varieties.
//! * [`factor`]: univariate and bihomogeneous factorization.
//! * [`jinv`]: branch quartic and j-invariant of (2,2) curves.
//! * [`protocol`]: key generation, responder/initiator flows, TTP variant.
//! * [`analysis`]: quadric equations of the hidden variety and brute force.
//! * [`codec`]: canonical text serialization of every protocol object.

pub mod analysis;
pub mod codec;
pub mod embeddings;
pub mod error;
pub mod factor;
pub mod ff;
pub mod forms;
pub mod jinv;
pub mod linalg;
pub mod numth;
pub mod protocol;
pub mod rng;
pub mod toy;

pub use error::{Error, Result};
pub use ff::{FieldElement, PrimeField};
pub use forms::BiForm;
pub use linalg::MatrixFq;
pub use rng::Stream;
