//! Exact even lattices, finite quadratic forms and genus symbols, root systems,
//! Niemeier lattices, and a verifier for transcribed degeneration tables of K3 surfaces.
//!
//! ```
//! use k3lat::roots::{ade_lattice, Family};
//! use k3lat::qforms::{jordan_normal_form, FiniteQuadraticForm};
//!
//! let a1 = ade_lattice(Family::A, 1).unwrap();
//! let q = FiniteQuadraticForm::from_lattice(&a1).unwrap();
//! assert_eq!(jordan_normal_form(&q).to_string(), "2_7^+1");
//! ```

pub mod degen;
pub mod error;
pub mod exact_linalg;
pub mod lattice;
pub mod niemeier;
pub mod qforms;
pub mod roots;

pub use error::{Error, Result};
pub use exact_linalg::IntMatrix;
pub use lattice::{Lattice, Sublattice};
pub use qforms::{FiniteQuadraticForm, GenusSymbol};
pub use roots::RootSystemType;

/// Directory holding the shipped table transcriptions, glue codes and the j map.
pub fn default_data_dir() -> std::path::PathBuf {
    std::path::PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
}
