//! Exact-arithmetic toolkit for union-closed set families, their 0/1
//! characteristic matrices, the corresponding finite lattices, and the
//! family of minimum-membership conjectures on them (Frankl's conjecture
//! and its power-weighted and pairwise-intersection strengthenings).
//!
//! Everything is integer- or rational-exact: inequalities are compared in
//! cross-multiplied big-integer form and no floating point is used
//! anywhere.
//!
//! ```
//! use frankl_core::SetFamily;
//! use frankl_core::conjectures::{check_frankl, minimal_r, FranklVariant, DEFAULT_R_MAX};
//!
//! let family = SetFamily::parse_fam("elements: a b c\n-\na\nb\na b\na b c\n")?;
//! let report = check_frankl(&family, FranklVariant::MaxUnion)?;
//! assert!(report.holds()); // 2 * 3 >= 5
//!
//! let outcome = minimal_r(&family, DEFAULT_R_MAX)?;
//! assert_eq!(outcome.r, Some(1)); // r = 0 fails: 14 < 15; r = 1 holds: 38 >= 35
//! # Ok::<(), frankl_core::Error>(())
//! ```

pub mod conjectures;
pub mod enumeration;
pub mod error;
pub mod family;
pub mod lattice;
pub mod matrix;

pub use error::{Error, Result};
pub use family::{ElementStats, ReducedDiagnostic, SetFamily};
pub use matrix::{BitMatrix, IntMatrix};
