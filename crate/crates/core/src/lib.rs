//! Constant-term representability of linearly recurrent and hypergeometric
//! sequences.
//!
//! The crate decides whether a C-finite sequence is a (linear combination of)
//! constant terms `ct[P(x)^n Q(x)]` of Laurent polynomial powers, builds and
//! certifies explicit witnesses, and runs the prime congruence sweeps that
//! falsify representability.

pub mod cfinite;
pub mod congruence;
pub mod ctkit;
pub mod exactnum;
pub mod hypergeom;
pub mod laurent;
pub mod linalg;
pub mod parse;
pub mod upoly;
