//! Subsets of `w` under almost-strict inclusion: `x ⊂* y` iff `x \ y` is
//! finite and `y \ x` is infinite.
//!
//! The relation is never decided. Every `⊂*` fact is produced together with an
//! [`OrderCertificate`] and checked to a finite depth.

pub mod cert;
pub mod embed;
pub mod family;
pub mod pairing;
mod parse;
pub mod set;
pub mod split;
pub mod tree;

pub use cert::{
    base_cert, base_chain, compose_certs, verify_certificate, CertError, CertFailure, OrderCertificate, Surplus,
    DEFAULT_VERIFY_DEPTH,
};
pub use embed::{embed_ordinal, Embedding, Placement};
pub use family::{ChainError, ChainFamily, ExplicitFamily};
pub use parse::split_pair;
pub use set::{Budget, Expr, LazySet, Nat, SetError, DEFAULT_DEPTH_CAP, DEFAULT_SEARCH_BUDGET};
pub use split::{split_interval, SplitCache, SplitInterval};
pub use tree::{tree_node, Tree, TreeAddress};
