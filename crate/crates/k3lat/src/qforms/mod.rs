//! Finite quadratic forms, Jordan decomposition and genus symbols.

pub mod canonical;
pub mod fqf;
pub mod jordan;
pub mod oracle;
pub mod symbol;

pub use canonical::{canonical, canonical_key, symbols_equivalent, CanonicalKey};
pub use fqf::{fqf_direct_sum, fqf_from_lattice, fqf_negate, FiniteQuadraticForm};
pub use jordan::{jordan_constituents, jordan_normal_form};
pub use oracle::{brute_force_isomorphic, DEFAULT_BOUND};
pub use symbol::{parse_symbol, symbol_to_string, valid_oddity, Constituent, GenusSymbol, TwoType};

/// Signature mod 8 of any even lattice whose discriminant form has symbol `s`.
pub fn signature_mod8(s: &GenusSymbol) -> u8 {
    s.signature_mod8()
}

/// Canonical symbol of the discriminant form of an even lattice.
pub fn lattice_symbol(l: &crate::Lattice) -> crate::Result<GenusSymbol> {
    Ok(jordan_normal_form(&FiniteQuadraticForm::from_lattice(l)?))
}
