use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use super::cert::{compose_certs, CertError, OrderCertificate};
use super::set::{LazySet, SetError};
use crate::ordinal::OrdinalError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("tree address must be nonempty")]
    EmptyAddress,
    #[error("index {0} is not in the family")]
    UnknownIndex(String),
    #[error("indices {0} and {1} are not strictly increasing")]
    NotIncreasing(String, String),
    #[error("consecutive certificates do not chain at position {0}")]
    Broken(usize),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

/// A family of sets indexed by a linear order, with a certificate for every
/// increasing pair of indices.
pub trait ChainFamily {
    type Index: Clone + Ord + Eq + Hash + fmt::Display;

    fn has_index(&self, i: &Self::Index) -> bool;

    fn member(&self, i: &Self::Index) -> Result<LazySet, ChainError>;

    /// Certificate for `member(i) ⊂* member(j)`, requiring `i < j`.
    fn certificate(&self, i: &Self::Index, j: &Self::Index) -> Result<OrderCertificate, ChainError>;
}

/// A finite chain given by consecutive certificates, e.g. a saved snapshot.
#[derive(Debug, Clone)]
pub struct ExplicitFamily {
    links: Vec<OrderCertificate>,
}

impl ExplicitFamily {
    /// `links[k]` certifies member `k` below member `k + 1`.
    pub fn from_links(links: Vec<OrderCertificate>) -> Result<Self, ChainError> {
        for (k, w) in links.windows(2).enumerate() {
            if w[0].upper() != w[1].lower() {
                return Err(ChainError::Broken(k + 1));
            }
        }
        Ok(ExplicitFamily { links })
    }

    pub fn len(&self) -> usize {
        if self.links.is_empty() {
            0
        } else {
            self.links.len() + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn links(&self) -> &[OrderCertificate] {
        &self.links
    }

    /// Replaces one link without re-checking it; for fault injection.
    pub fn replace_link(&mut self, k: usize, cert: OrderCertificate) {
        self.links[k] = cert;
    }
}

impl ChainFamily for ExplicitFamily {
    type Index = usize;

    fn has_index(&self, i: &usize) -> bool {
        *i < self.len()
    }

    fn member(&self, i: &usize) -> Result<LazySet, ChainError> {
        if !self.has_index(i) {
            return Err(ChainError::UnknownIndex(i.to_string()));
        }
        Ok(if *i < self.links.len() {
            self.links[*i].lower().clone()
        } else {
            self.links[*i - 1].upper().clone()
        })
    }

    fn certificate(&self, i: &usize, j: &usize) -> Result<OrderCertificate, ChainError> {
        for k in [i, j] {
            if !self.has_index(k) {
                return Err(ChainError::UnknownIndex(k.to_string()));
            }
        }
        if i >= j {
            return Err(ChainError::NotIncreasing(i.to_string(), j.to_string()));
        }
        let mut acc = self.links[*i].clone();
        for link in &self.links[i + 1..*j] {
            acc = compose_certs(&acc, link)?;
        }
        Ok(acc)
    }
}
