//! Chart-level computations on first- and second-order jets.
//!
//! Maps are written in a small smooth-expression language ([`expr`]), their
//! value, Jacobian and Hessian at a point are computed exactly with
//! truncated Taylor arithmetic ([`taylor`]), and jets are read off at the
//! origin ([`jet`]). On top of that sit the vector-bundle structures on J¹M,
//! J¹E and J¹(J¹M) ([`bundle`]), the canonical maps between jet spaces
//! ([`canon`]), and a randomized checker for the laws they satisfy
//! ([`props`]).
//!
//! ```
//! use jetcalc::{canon, jet, SmoothMap};
//!
//! let phi = SmoothMap::parse_split("u1*w1; u1 + w1^2", 1, 2).unwrap();
//! let v = jet::doublejet_of(&phi).unwrap();
//! assert_eq!(v.y_vel, vec![vec![0.0], vec![1.0]]);
//! assert_eq!(canon::ell(&v).x_vel, vec![vec![0.0], vec![1.0]]);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod bundle;
pub mod canon;
pub mod error;
pub mod expr;
pub mod jet;
pub mod props;
pub mod taylor;

pub use error::{DomainError, Error, ParseError, Result};
pub use expr::SmoothMap;
pub use jet::{AnyJet, Coordinates, DoubleJet, Jet1, Jet2, VBJet};
