//! The tree `x_s` indexed by nonempty finite sequences of naturals.
//!
//! `x_(n)` is the base chain member `rows(n)`; `x_(s,0) = x_s`; and for `a > 0`
//! `x_(s,a)` is the `a`-th member of the split of the interval
//! `(x_s, x_(s+))`, where `s+` increments the last entry of `s`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::cert::{base_cert, base_chain, OrderCertificate};
use super::family::ChainError;
use super::split::{SplitCache, SplitInterval};
use super::set::{LazySet, DEFAULT_DEPTH_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeAddress(Vec<u64>);

impl TreeAddress {
    pub fn new(entries: Vec<u64>) -> Result<Self, ChainError> {
        if entries.is_empty() {
            return Err(ChainError::EmptyAddress);
        }
        Ok(TreeAddress(entries))
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> u64 {
        *self.0.last().expect("nonempty")
    }

    /// `s` with its last entry removed, if that leaves something.
    pub fn parent(&self) -> Option<TreeAddress> {
        (self.0.len() > 1).then(|| TreeAddress(self.0[..self.0.len() - 1].to_vec()))
    }

    pub fn child(&self, a: u64) -> TreeAddress {
        let mut v = self.0.clone();
        v.push(a);
        TreeAddress(v)
    }

    /// `s+`.
    pub fn successor(&self) -> TreeAddress {
        let mut v = self.0.clone();
        *v.last_mut().expect("nonempty") += 1;
        TreeAddress(v)
    }
}

impl fmt::Display for TreeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for TreeAddress {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        if trimmed.trim().is_empty() {
            return Err(ChainError::EmptyAddress);
        }
        let entries = trimmed
            .split(',')
            .map(|p| p.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ChainError::UnknownIndex(s.to_string()))?;
        TreeAddress::new(entries)
    }
}

#[derive(Debug)]
pub struct Tree {
    splits: SplitCache,
}

impl Tree {
    pub fn new(depth_cap: usize) -> Self {
        Tree {
            splits: SplitCache::new(depth_cap),
        }
    }

    fn split_below(&self, s: &TreeAddress) -> Result<Arc<SplitInterval>, ChainError> {
        Ok(self.splits.get(&self.interval(s)?))
    }

    /// `x_s`.
    pub fn node(&self, s: &TreeAddress) -> Result<LazySet, ChainError> {
        match s.parent() {
            None => Ok(base_chain(s.last())),
            Some(t) if s.last() == 0 => self.node(&t),
            Some(t) => Ok(self.split_below(&t)?.member(s.last())?),
        }
    }

    /// Certificate for `x_s ⊂* x_(s+)`.
    pub fn interval(&self, s: &TreeAddress) -> Result<OrderCertificate, ChainError> {
        match s.parent() {
            None => Ok(base_cert(s.last(), s.last() + 1)),
            Some(t) => {
                let sp = self.split_below(&t)?;
                let a = s.last();
                Ok(if a == 0 { sp.lower_cert(1)? } else { sp.link(a, a + 1)? })
            }
        }
    }

    /// Certificates for `x_s ⊂* x_(s,a) ⊂* x_(s,b) ⊂* x_(s+)` with `0 < a < b`.
    pub fn four_way(&self, s: &TreeAddress, a: u64, b: u64) -> Result<[OrderCertificate; 3], ChainError> {
        if a == 0 || a >= b {
            return Err(ChainError::NotIncreasing(a.to_string(), b.to_string()));
        }
        let sp = self.split_below(s)?;
        Ok([sp.lower_cert(a)?, sp.link(a, b)?, sp.upper_cert(b)?])
    }
}

impl Default for Tree {
    fn default() -> Self {
        Tree::new(DEFAULT_DEPTH_CAP)
    }
}

/// `x_s` computed in a fresh tree.
pub fn tree_node(s: &TreeAddress) -> Result<LazySet, ChainError> {
    Tree::default().node(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::almost_inclusion::cert::verify_certificate;

    fn addr(v: &[u64]) -> TreeAddress {
        TreeAddress::new(v.to_vec()).unwrap()
    }

    #[test]
    fn extension_by_zero_is_identity() {
        let tree = Tree::default();
        assert_eq!(tree.node(&addr(&[3, 0])).unwrap(), tree.node(&addr(&[3])).unwrap());
        assert_eq!(tree.node(&addr(&[1, 2, 0, 0])).unwrap(), tree.node(&addr(&[1, 2])).unwrap());
    }

    #[test]
    fn nodes_sit_inside_their_interval() {
        let tree = Tree::default();
        let s = addr(&[1]);
        let [lo, mid, hi] = tree.four_way(&s, 2, 3).unwrap();
        assert_eq!(lo.lower(), &tree.node(&s).unwrap());
        assert_eq!(lo.upper(), &tree.node(&addr(&[1, 2])).unwrap());
        assert_eq!(mid.upper(), &tree.node(&addr(&[1, 3])).unwrap());
        assert_eq!(hi.upper(), &tree.node(&addr(&[2])).unwrap());
        for c in [&lo, &mid, &hi] {
            assert_eq!(verify_certificate(c, 32), Ok(()));
        }
    }

    #[test]
    fn interval_endpoints_match_nodes() {
        let tree = Tree::default();
        for v in [vec![0], vec![2, 0], vec![2, 3], vec![0, 1, 4], vec![1, 0, 2]] {
            let s = addr(&v);
            let c = tree.interval(&s).unwrap();
            assert_eq!(c.lower(), &tree.node(&s).unwrap(), "{s}");
            assert_eq!(c.upper(), &tree.node(&s.successor()).unwrap(), "{s}");
            assert_eq!(verify_certificate(&c, 32), Ok(()), "{s}");
        }
    }

    #[test]
    fn regression_snapshot_of_node_0_1() {
        let x = tree_node(&addr(&[0, 1])).unwrap();
        let first: Vec<u64> = x.first(5).unwrap().into_iter().map(|n| u64::try_from(n).unwrap()).collect();
        // row 0 surplus indices 0, 2, 4, ... of the evens
        assert_eq!(first, vec![0, 4, 8, 12, 16]);
        assert_eq!(x.to_string(), "piece(piece(ap(1,0),0),0)");
    }

    #[test]
    fn addresses_parse() {
        assert_eq!("1,2,3".parse::<TreeAddress>().unwrap(), addr(&[1, 2, 3]));
        assert_eq!("(4)".parse::<TreeAddress>().unwrap(), addr(&[4]));
        assert_eq!("".parse::<TreeAddress>().unwrap_err(), ChainError::EmptyAddress);
        assert_eq!(TreeAddress::new(vec![]).unwrap_err(), ChainError::EmptyAddress);
        assert_eq!(addr(&[1, 2]).successor(), addr(&[1, 3]));
    }
}
