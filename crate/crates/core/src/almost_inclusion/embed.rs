//! Embedding an ordinal notation into a certified interval `(x, y)`.
//!
//! Recursion on the bound `xi`:
//! - successor `eta + 1`: split once, send `eta` to `z1` and embed `eta` into
//!   `(x, z1)`;
//! - limit: with fundamental sequence `eta_k`, send the segment
//!   `[eta_(k-1), eta_k)` (with `eta_(-1) = 0`) into `(z_k, z_(k+1))`, where
//!   `z_0` is replaced by `x` for the first segment.
//!
//! Elements and certificates are materialized only for queried indices.

use std::collections::HashMap;
use std::sync::Mutex;

use super::cert::{compose_certs, verify_certificate, CertError, OrderCertificate, DEFAULT_VERIFY_DEPTH};
use super::family::{ChainError, ChainFamily};
use super::set::{LazySet, DEFAULT_DEPTH_CAP};
use super::split::{SplitCache, SplitInterval};
use crate::ordinal::{Kind, Ordinal};

/// Where an index lands: its set and certificates tying it to the interval's
/// endpoints.
#[derive(Debug, Clone)]
pub struct Placement {
    pub set: LazySet,
    /// `x ⊂* set`.
    pub from_bottom: OrderCertificate,
    /// `set ⊂* y`.
    pub to_top: OrderCertificate,
}

#[derive(Debug)]
pub struct Embedding {
    bound: Ordinal,
    interval: OrderCertificate,
    splits: SplitCache,
    placements: Mutex<HashMap<Ordinal, Placement>>,
}

/// Checks the interval certificate, then sets up a lazy embedding of every
/// notation below `bound`.
pub fn embed_ordinal(bound: &Ordinal, interval: &OrderCertificate) -> Result<Embedding, ChainError> {
    verify_certificate(interval, DEFAULT_VERIFY_DEPTH).map_err(CertError::Invalid)?;
    Ok(Embedding::trusted(bound.clone(), interval.clone(), DEFAULT_DEPTH_CAP))
}

struct Segment {
    interval: OrderCertificate,
    offset: Ordinal,
    length: Ordinal,
    index: u64,
}

fn segment_of(sp: &SplitInterval, bound: &Ordinal, alpha: &Ordinal) -> Result<Segment, ChainError> {
    let fs = bound.fundamental_sequence()?;
    let index = fs
        .first_above(alpha)
        .ok_or_else(|| ChainError::UnknownIndex(alpha.to_string()))?;
    let offset = if index == 0 { Ordinal::zero() } else { fs.at(index - 1) };
    let length = offset.left_subtract(&fs.at(index))?;
    let interval = if index == 0 {
        sp.lower_cert(1)?
    } else {
        sp.link(index, index + 1)?
    };
    Ok(Segment {
        interval,
        offset,
        length,
        index,
    })
}

fn chain(first: Option<OrderCertificate>, second: OrderCertificate) -> Result<OrderCertificate, ChainError> {
    match first {
        None => Ok(second),
        Some(first) => Ok(compose_certs(&first, &second)?),
    }
}

impl Embedding {
    /// Embedding over an interval certificate that is trusted as given.
    pub fn trusted(bound: Ordinal, interval: OrderCertificate, depth_cap: usize) -> Self {
        Embedding {
            bound,
            interval,
            splits: SplitCache::new(depth_cap),
            placements: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_depth_cap(bound: &Ordinal, interval: &OrderCertificate, depth_cap: usize) -> Result<Self, ChainError> {
        verify_certificate(interval, DEFAULT_VERIFY_DEPTH).map_err(CertError::Invalid)?;
        Ok(Embedding::trusted(bound.clone(), interval.clone(), depth_cap))
    }

    pub fn bound(&self) -> &Ordinal {
        &self.bound
    }

    pub fn interval(&self) -> &OrderCertificate {
        &self.interval
    }

    fn check(&self, alpha: &Ordinal) -> Result<(), ChainError> {
        if alpha < &self.bound {
            Ok(())
        } else {
            Err(ChainError::UnknownIndex(alpha.to_string()))
        }
    }

    pub fn placement(&self, alpha: &Ordinal) -> Result<Placement, ChainError> {
        self.check(alpha)?;
        if let Some(p) = self.placements.lock().expect("placement cache poisoned").get(alpha) {
            return Ok(p.clone());
        }
        let p = self.place(&self.bound, &self.interval, alpha)?;
        self.placements
            .lock()
            .expect("placement cache poisoned")
            .insert(alpha.clone(), p.clone());
        Ok(p)
    }

    pub fn element(&self, alpha: &Ordinal) -> Result<LazySet, ChainError> {
        Ok(self.placement(alpha)?.set)
    }

    /// Certificate for `e(alpha) ⊂* e(beta)`.
    pub fn relate(&self, alpha: &Ordinal, beta: &Ordinal) -> Result<OrderCertificate, ChainError> {
        self.check(alpha)?;
        self.check(beta)?;
        if alpha >= beta {
            return Err(ChainError::NotIncreasing(alpha.to_string(), beta.to_string()));
        }
        let mut bound = self.bound.clone();
        let mut interval = self.interval.clone();
        let (mut alpha, mut beta) = (alpha.clone(), beta.clone());
        loop {
            let sp = self.splits.get(&interval);
            match bound.classify() {
                Kind::Zero => unreachable!("indices lie below the bound"),
                Kind::Successor(eta) => {
                    let inner = sp.lower_cert(1)?;
                    if beta == eta {
                        return Ok(self.place(&eta, &inner, &alpha)?.to_top);
                    }
                    bound = eta;
                    interval = inner;
                }
                Kind::Limit => {
                    let a = segment_of(&sp, &bound, &alpha)?;
                    let b = segment_of(&sp, &bound, &beta)?;
                    let alpha_rel = a.offset.left_subtract(&alpha)?;
                    let beta_rel = b.offset.left_subtract(&beta)?;
                    if a.index == b.index {
                        bound = a.length;
                        interval = a.interval;
                        alpha = alpha_rel;
                        beta = beta_rel;
                        continue;
                    }
                    let up = self.place(&a.length, &a.interval, &alpha_rel)?.to_top;
                    let down = self.place(&b.length, &b.interval, &beta_rel)?.from_bottom;
                    let up = if a.index + 1 < b.index {
                        compose_certs(&up, &sp.link(a.index + 1, b.index)?)?
                    } else {
                        up
                    };
                    return Ok(compose_certs(&up, &down)?);
                }
            }
        }
    }

    /// Descends from `(bound, interval)` to `alpha`, carrying the certificates
    /// from the root bottom and to the root top.
    fn place(&self, bound: &Ordinal, interval: &OrderCertificate, alpha: &Ordinal) -> Result<Placement, ChainError> {
        let mut bound = bound.clone();
        let mut interval = interval.clone();
        let mut alpha = alpha.clone();
        let mut below: Option<OrderCertificate> = None;
        let mut above: Vec<OrderCertificate> = Vec::new();
        loop {
            let sp = self.splits.get(&interval);
            match bound.classify() {
                Kind::Zero => unreachable!("indices lie below the bound"),
                Kind::Successor(eta) => {
                    if alpha == eta {
                        let from_bottom = chain(below, sp.lower_cert(1)?)?;
                        above.push(sp.upper_cert(1)?);
                        return Ok(Placement {
                            set: sp.member(1)?,
                            from_bottom,
                            to_top: compose_all(above)?,
                        });
                    }
                    above.push(sp.upper_cert(1)?);
                    interval = sp.lower_cert(1)?;
                    bound = eta;
                }
                Kind::Limit => {
                    let seg = segment_of(&sp, &bound, &alpha)?;
                    if seg.index > 0 {
                        below = Some(chain(below, sp.lower_cert(seg.index)?)?);
                    }
                    above.push(sp.upper_cert(seg.index + 1)?);
                    alpha = seg.offset.left_subtract(&alpha)?;
                    bound = seg.length;
                    interval = seg.interval;
                }
            }
        }
    }
}

/// Composes `stack` from the innermost (last) certificate outwards.
fn compose_all(mut stack: Vec<OrderCertificate>) -> Result<OrderCertificate, ChainError> {
    let mut acc = stack.pop().expect("at least one certificate");
    while let Some(outer) = stack.pop() {
        acc = compose_certs(&acc, &outer)?;
    }
    Ok(acc)
}

impl ChainFamily for Embedding {
    type Index = Ordinal;

    fn has_index(&self, i: &Ordinal) -> bool {
        i < &self.bound
    }

    fn member(&self, i: &Ordinal) -> Result<LazySet, ChainError> {
        self.element(i)
    }

    fn certificate(&self, i: &Ordinal, j: &Ordinal) -> Result<OrderCertificate, ChainError> {
        self.relate(i, j)
    }
}
