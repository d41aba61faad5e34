//! Certify, falsify and construct phase retrieval and norm retrieval for
//! finite real frames and families of subspaces.
//!
//! Every decision runs either in exact rational arithmetic or in `f64`
//! with explicit tolerances, and returns a [`Certificate`] whose witness can
//! be re-checked independently.

pub mod catalog;
pub mod certificate;
pub mod cli;
pub mod error;
pub mod falsifier;
pub mod frame;
pub mod io;
pub mod linalg;
pub mod naimark;
pub mod random;
pub mod replay;
pub mod scalar;
pub mod spark;
pub mod subspace;
pub mod transforms;

pub use certificate::{Certificate, Method, Verdict, Witness, WitnessPair};
pub use error::{Error, Result};
pub use frame::{Frame, FrameReport};
pub use linalg::{ArithmeticMode, Field, Mat, Rational, Tolerance};
pub use scalar::Scalar;
pub use subspace::{Subspace, SubspaceFamily};
