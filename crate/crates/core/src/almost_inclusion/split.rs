//! Splitting a certified interval `x ⊂* y` into an `w`-chain
//! `x ⊂* z1 ⊂* z2 ⊂* ... ⊂* y`.
//!
//! The surplus `S ⊆ y \ x` of the interval is sliced into pieces `P_k` by
//! enumeration index, so each piece is infinite whenever `S` is. Then
//! `z0 = x ∩ y` and `z(k+1) = z(k) ∪ P_k`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::Zero;

use super::cert::{verify_certificate, CertError, OrderCertificate, DEFAULT_VERIFY_DEPTH};
use super::set::{LazySet, Nat, SetError, DEFAULT_DEPTH_CAP};

#[derive(Debug)]
pub struct SplitInterval {
    interval: OrderCertificate,
    source: LazySet,
    chain: Mutex<Vec<LazySet>>,
    depth_cap: usize,
}

/// Checks `c` at the default depth, then splits it.
pub fn split_interval(c: &OrderCertificate) -> Result<SplitInterval, CertError> {
    verify_certificate(c, DEFAULT_VERIFY_DEPTH).map_err(CertError::Invalid)?;
    Ok(SplitInterval::trusted(c, DEFAULT_DEPTH_CAP))
}

impl SplitInterval {
    /// Splits without re-verifying `c`; for certificates produced internally.
    pub fn trusted(c: &OrderCertificate, depth_cap: usize) -> Self {
        let bottom = LazySet::inter(c.lower(), c.upper());
        SplitInterval {
            interval: c.clone(),
            source: c.surplus_set(),
            chain: Mutex::new(vec![bottom]),
            depth_cap,
        }
    }

    pub fn interval(&self) -> &OrderCertificate {
        &self.interval
    }

    /// `P_k`, the `k`-th slice of the surplus.
    pub fn piece(&self, k: u64) -> LazySet {
        LazySet::piece(&self.source, k)
    }

    /// `z_k`.
    pub fn member(&self, k: u64) -> Result<LazySet, SetError> {
        let mut chain = self.chain.lock().expect("split cache poisoned");
        while chain.len() as u64 <= k {
            let i = chain.len() as u64 - 1;
            let next = LazySet::union(&chain[i as usize], &self.piece(i));
            next.check_depth(self.depth_cap)?;
            chain.push(next);
        }
        Ok(chain[k as usize].clone())
    }

    /// `x ⊂* z_k` for `k >= 1`; exceptions as in the interval, surplus `P_0`.
    pub fn lower_cert(&self, k: u64) -> Result<OrderCertificate, SetError> {
        assert!(k >= 1, "x ⊂* z_0 does not hold");
        Ok(OrderCertificate::new(
            self.interval.lower().clone(),
            self.member(k)?,
            self.interval.exception_bound().clone(),
            self.piece(0),
        ))
    }

    /// `z_i ⊂* z_k` for `i < k`; literal inclusion, surplus `P_i`.
    pub fn link(&self, i: u64, k: u64) -> Result<OrderCertificate, SetError> {
        assert!(i < k, "link needs i < k");
        Ok(OrderCertificate::new(self.member(i)?, self.member(k)?, Nat::zero(), self.piece(i)))
    }

    /// `z_k ⊂* y`; literal inclusion, surplus `P_k`.
    pub fn upper_cert(&self, k: u64) -> Result<OrderCertificate, SetError> {
        Ok(OrderCertificate::new(
            self.member(k)?,
            self.interval.upper().clone(),
            Nat::zero(),
            self.piece(k),
        ))
    }

    /// `(z_k, cert)` where the certificate links the previous chain element
    /// (`x` when `k == 1`) to `z_k`.
    pub fn step(&self, k: u64) -> Result<(LazySet, OrderCertificate), SetError> {
        assert!(k >= 1, "steps start at 1");
        let cert = if k == 1 {
            self.lower_cert(1)?
        } else {
            self.link(k - 1, k)?
        };
        Ok((self.member(k)?, cert))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct IntervalKey {
    lower: LazySet,
    upper: LazySet,
    bound: Nat,
    surplus: LazySet,
}

/// Memo of splits keyed by the interval's expressions.
#[derive(Debug)]
pub struct SplitCache {
    splits: Mutex<HashMap<IntervalKey, Arc<SplitInterval>>>,
    depth_cap: usize,
}

impl SplitCache {
    pub fn new(depth_cap: usize) -> Self {
        SplitCache {
            splits: Mutex::new(HashMap::new()),
            depth_cap,
        }
    }

    pub fn depth_cap(&self) -> usize {
        self.depth_cap
    }

    pub fn get(&self, c: &OrderCertificate) -> Arc<SplitInterval> {
        let key = IntervalKey {
            lower: c.lower().clone(),
            upper: c.upper().clone(),
            bound: c.exception_bound().clone(),
            surplus: c.surplus_set(),
        };
        let mut splits = self.splits.lock().expect("split cache poisoned");
        splits
            .entry(key)
            .or_insert_with(|| Arc::new(SplitInterval::trusted(c, self.depth_cap)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.splits.lock().expect("split cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for SplitCache {
    fn default() -> Self {
        SplitCache::new(DEFAULT_DEPTH_CAP)
    }
}
