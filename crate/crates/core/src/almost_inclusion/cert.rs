//! Certificates for `lower ⊂* upper`.
//!
//! A certificate carries an exception bound `m` (every element of
//! `lower \ upper` is below `m`) and a surplus: an enumeration of distinct
//! elements of `upper \ lower`. Neither half can be decided for arbitrary
//! sets, so certificates are built alongside the sets they relate and checked
//! to a finite depth by [`verify_certificate`].

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use super::set::{Budget, LazySet, Nat, SetError, DEFAULT_DEPTH_CAP};

/// Depth used when an operation checks a certificate it was handed.
pub const DEFAULT_VERIFY_DEPTH: usize = 32;

type SurplusFn = Arc<dyn Fn(u64) -> Option<Nat> + Send + Sync>;

#[derive(Clone)]
pub enum Surplus {
    /// Elements of the set in increasing order.
    Set(LazySet),
    /// Arbitrary enumerator; used for externally supplied witnesses.
    Enumerator(SurplusFn),
}

impl fmt::Debug for Surplus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Surplus::Set(s) => f.debug_tuple("Set").field(s).finish(),
            Surplus::Enumerator(_) => f.write_str("Enumerator(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrderCertificate {
    lower: LazySet,
    upper: LazySet,
    exception_bound: Nat,
    surplus: Surplus,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertFailure {
    #[error("element {0}")]
    Exception(Nat),
    #[error("surplus {index} repeats element {element}")]
    Repeated { index: usize, element: Nat },
    #[error("surplus {index} element {element} not in upper")]
    NotInUpper { index: usize, element: Nat },
    #[error("surplus {index} element {element} in lower")]
    InLower { index: usize, element: Nat },
    #[error("surplus exhausted after {0} elements")]
    Exhausted(usize),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("inconclusive: {0}")]
    Inconclusive(SetError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("middle sets differ: {left} vs {right}")]
    MiddleMismatch { left: String, right: String },
    #[error("invalid certificate: {0}")]
    Invalid(CertFailure),
    #[error(transparent)]
    Set(#[from] SetError),
}

impl OrderCertificate {
    pub fn new(lower: LazySet, upper: LazySet, exception_bound: Nat, surplus: LazySet) -> Self {
        OrderCertificate {
            lower,
            upper,
            exception_bound,
            surplus: Surplus::Set(surplus),
        }
    }

    /// Certificate whose surplus is `upper \ lower` itself; this is what the
    /// serialized form reconstructs.
    pub fn from_bounds(lower: LazySet, upper: LazySet, exception_bound: Nat) -> Self {
        let surplus = LazySet::diff(&upper, &lower);
        Self::new(lower, upper, exception_bound, surplus)
    }

    pub fn with_enumerator(
        lower: LazySet,
        upper: LazySet,
        exception_bound: Nat,
        surplus: impl Fn(u64) -> Option<Nat> + Send + Sync + 'static,
    ) -> Self {
        OrderCertificate {
            lower,
            upper,
            exception_bound,
            surplus: Surplus::Enumerator(Arc::new(surplus)),
        }
    }

    pub fn lower(&self) -> &LazySet {
        &self.lower
    }

    pub fn upper(&self) -> &LazySet {
        &self.upper
    }

    pub fn exception_bound(&self) -> &Nat {
        &self.exception_bound
    }

    pub fn surplus(&self) -> &Surplus {
        &self.surplus
    }

    /// The surplus as a set expression. An opaque enumerator falls back to
    /// `upper \ lower`.
    pub fn surplus_set(&self) -> LazySet {
        match &self.surplus {
            Surplus::Set(s) => s.clone(),
            Surplus::Enumerator(_) => LazySet::diff(&self.upper, &self.lower),
        }
    }

    /// First `k` surplus elements in enumeration order.
    pub fn surplus_elements(&self, k: usize, budget: &mut Budget) -> Result<Vec<Nat>, SetError> {
        match &self.surplus {
            Surplus::Set(s) => s.first_in(k, budget),
            Surplus::Enumerator(f) => Ok((0..k as u64).map_while(|i| f(i)).collect()),
        }
    }

    /// Parses the `cert{m=.., lower=.., upper=..}` form with an explicit depth
    /// cap on both sets.
    pub fn parse_with_cap(src: &str, cap: usize) -> Result<Self, SetError> {
        super::parse::parse_cert(src, cap)
    }

    /// Exception bound `m` found by scanning `lower` below `probe`. Used to
    /// certify user-supplied intervals; the bound is only as good as the probe.
    pub fn probe_bounds(lower: LazySet, upper: LazySet, probe: u64) -> Result<Self, SetError> {
        let mut budget = Budget::default();
        let mut m = Nat::zero();
        let mut cursor = Nat::zero();
        let limit = Nat::from(probe);
        while let Some(x) = lower.next_at_least_in(&cursor, &mut budget)? {
            if x >= limit {
                break;
            }
            if !upper.contains_in(&x, &mut budget)? {
                m = &x + 1u32;
            }
            cursor = x + 1u32;
        }
        Ok(Self::from_bounds(lower, upper, m))
    }
}

impl fmt::Display for OrderCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cert{{m={}, lower={}, upper={}}}",
            self.exception_bound, self.lower, self.upper
        )
    }
}

impl FromStr for OrderCertificate {
    type Err = SetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        super::parse::parse_cert(s, DEFAULT_DEPTH_CAP)
    }
}

/// `x ⊂* y` and `y ⊂* z` give `x ⊂* z`: exceptions stay below the larger
/// bound, and surplus elements of the second certificate at or above the first
/// bound lie outside `x`.
pub fn compose_certs(first: &OrderCertificate, second: &OrderCertificate) -> Result<OrderCertificate, CertError> {
    if first.upper != second.lower {
        return Err(CertError::MiddleMismatch {
            left: first.upper.to_string(),
            right: second.lower.to_string(),
        });
    }
    let m1 = &first.exception_bound;
    let surplus = if m1.is_zero() {
        second.surplus_set()
    } else {
        LazySet::inter(&second.surplus_set(), &LazySet::ray(m1.clone()))
    };
    Ok(OrderCertificate::new(
        first.lower.clone(),
        second.upper.clone(),
        m1.max(&second.exception_bound).clone(),
        surplus,
    ))
}

/// Checks the first `depth` elements of `lower` at or above the exception
/// bound against `upper`, then draws `depth` surplus elements.
pub fn verify_certificate(c: &OrderCertificate, depth: usize) -> Result<(), CertFailure> {
    verify_with_budget(c, depth, &mut Budget::default())
}

pub fn verify_with_budget(c: &OrderCertificate, depth: usize, budget: &mut Budget) -> Result<(), CertFailure> {
    if depth == 0 {
        return Err(CertFailure::ZeroDepth);
    }
    let inconclusive = CertFailure::Inconclusive;
    // elements below m are permitted exceptions; probe the next `depth` from m on
    let mut cursor = c.exception_bound.clone();
    for _ in 0..depth {
        let Some(x) = c.lower.next_at_least_in(&cursor, budget).map_err(inconclusive)? else {
            break;
        };
        if !c.upper.contains_in(&x, budget).map_err(inconclusive)? {
            return Err(CertFailure::Exception(x));
        }
        cursor = x + 1u32;
    }
    let drawn = c.surplus_elements(depth, budget).map_err(inconclusive)?;
    let mut seen = HashSet::with_capacity(drawn.len());
    for (index, element) in drawn.iter().enumerate() {
        if !seen.insert(element) {
            return Err(CertFailure::Repeated {
                index,
                element: element.clone(),
            });
        }
        if !c.upper.contains_in(element, budget).map_err(inconclusive)? {
            return Err(CertFailure::NotInUpper {
                index,
                element: element.clone(),
            });
        }
        if c.lower.contains_in(element, budget).map_err(inconclusive)? {
            return Err(CertFailure::InLower {
                index,
                element: element.clone(),
            });
        }
    }
    if drawn.len() < depth {
        return Err(CertFailure::Exhausted(drawn.len()));
    }
    Ok(())
}

/// `rows(n)`, the `n`-th member of the base chain; `base_chain(0)` is empty.
pub fn base_chain(n: u64) -> LazySet {
    LazySet::rows(n)
}

/// `rows(n) ⊂* rows(m)` for `n < m`: no exceptions, surplus is row `n`.
pub fn base_cert(n: u64, m: u64) -> OrderCertificate {
    assert!(n < m, "base_cert needs n < m");
    OrderCertificate::new(
        base_chain(n),
        base_chain(m),
        Nat::zero(),
        LazySet::piece(&LazySet::naturals(), n),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(src: &str) -> LazySet {
        src.parse().unwrap()
    }

    fn small(v: Vec<Nat>) -> Vec<u64> {
        v.into_iter().map(|x| u64::try_from(x).unwrap()).collect()
    }

    #[test]
    fn base_chain_members() {
        assert_eq!(base_chain(0), LazySet::empty());
        assert_eq!(small(base_chain(1).first(5).unwrap()), vec![0, 2, 4, 6, 8]);
        let c = base_cert(1, 2);
        let drawn = c.surplus_elements(3, &mut Budget::default()).unwrap();
        assert_eq!(small(drawn), vec![1, 5, 9]);
        assert_eq!(verify_certificate(&c, 16), Ok(()));
    }

    #[test]
    fn composition_of_base_certs() {
        let c = compose_certs(&base_cert(0, 1), &base_cert(1, 2)).unwrap();
        assert_eq!(c.lower(), &base_chain(0));
        assert_eq!(c.upper(), &base_chain(2));
        assert_eq!(verify_certificate(&c, 32), Ok(()));
    }

    #[test]
    fn composed_bound_is_the_max() {
        // 3 is an exception below m1 = 4
        let lower = LazySet::union(&s("ap(4,0)"), &LazySet::range(3u32, 4u32));
        let c1 = OrderCertificate::new(lower, s("ap(2,0)"), Nat::from(4u32), s("ap(4,2)"));
        let c2 = OrderCertificate::new(s("ap(2,0)"), s("ap(1,0)"), Nat::zero(), s("ap(2,1)"));
        assert_eq!(verify_certificate(&c1, 32), Ok(()));
        let c = compose_certs(&c1, &c2).unwrap();
        assert_eq!(c.exception_bound(), &Nat::from(4u32));
        let drawn = small(c.surplus_elements(3, &mut Budget::default()).unwrap());
        assert_eq!(drawn, vec![5, 7, 9]);
        assert_eq!(verify_certificate(&c, 32), Ok(()));
    }

    #[test]
    fn composed_surplus_is_odd_numbers() {
        let c1 = OrderCertificate::from_bounds(s("ap(4,0)"), s("ap(2,0)"), Nat::zero());
        let c2 = OrderCertificate::new(s("ap(2,0)"), s("ap(1,0)"), Nat::zero(), s("ap(2,1)"));
        let c = compose_certs(&c1, &c2).unwrap();
        let drawn = small(c.surplus_elements(10, &mut Budget::default()).unwrap());
        assert_eq!(drawn, (0..10).map(|k| 2 * k + 1).collect::<Vec<_>>());
        for x in &drawn {
            assert!(!s("ap(4,0)").contains_u64(*x).unwrap());
        }
        assert_eq!(verify_certificate(&c, 32), Ok(()));
    }

    #[test]
    fn mismatched_middle_is_rejected() {
        let err = compose_certs(&base_cert(0, 1), &base_cert(2, 3)).unwrap_err();
        assert!(matches!(err, CertError::MiddleMismatch { .. }));
    }

    #[test]
    fn exception_bound_violation_is_pinpointed() {
        // 0 lies in lower \ upper but m = 0
        let c = OrderCertificate::new(s("ap(2,0)"), s("ap(2,2)"), Nat::zero(), s("ap(2,1)"));
        assert_eq!(verify_certificate(&c, 8), Err(CertFailure::Exception(Nat::zero())));
        let ok = OrderCertificate::new(s("ap(2,0)"), s("union(ap(2,2),ap(2,1))"), Nat::from(1u32), s("ap(2,1)"));
        assert_eq!(verify_certificate(&ok, 8), Ok(()));
    }

    #[test]
    fn repeated_surplus_fails_distinctness() {
        let c = OrderCertificate::with_enumerator(s("empty"), s("rows(1)"), Nat::zero(), |k| {
            Some(Nat::from(2 * (k / 2)))
        });
        assert!(matches!(
            verify_certificate(&c, 4),
            Err(CertFailure::Repeated { index: 1, .. })
        ));
    }

    #[test]
    fn finite_surplus_is_exhausted() {
        let c = OrderCertificate::from_bounds(s("ap(1,3)"), s("ap(1,0)"), Nat::zero());
        assert_eq!(verify_certificate(&c, 4), Err(CertFailure::Exhausted(3)));
        assert_eq!(verify_certificate(&c, 0), Err(CertFailure::ZeroDepth));
    }

    #[test]
    fn probe_bounds_finds_largest_exception() {
        let c = OrderCertificate::probe_bounds(s("union(ap(4,0),ap(1000,1))"), s("ap(2,0)"), 10_000).unwrap();
        assert_eq!(c.exception_bound(), &Nat::from(9002u32));
    }
}
