//! Certified transfinite chains.
//!
//! - [`ordinal`]: notations below epsilon-zero in Cantor normal form.
//! - [`almost_inclusion`]: lazily evaluated subsets of `w`, certificates for
//!   almost-strict inclusion, interval splitting, the tree of nodes `x_s`, and
//!   embeddings of ordinals into certified intervals.
//! - [`baire_chain`]: characteristic functions of initial segments of a chain,
//!   evaluated with certificate-backed justifications.
//! - [`cont_chain`]: chains of continuous functions on finite metric spaces
//!   realizing a given total order, in exact rational arithmetic.

pub mod almost_inclusion;
pub mod baire_chain;
pub mod cont_chain;
pub mod ordinal;
