//! Characteristic functions `f_x` of `{y : y ⊂* x}` on a certified chain.
//!
//! `f_x` is only ever evaluated at members of the host family, and every value
//! comes with the certificate that justifies it. An index the family cannot
//! relate to the pivot is an error, never a silent `0`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::almost_inclusion::{
    verify_certificate, Budget, CertFailure, ChainError, ChainFamily, LazySet, Nat, OrderCertificate, SetError,
    DEFAULT_VERIFY_DEPTH,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaireError {
    #[error("index {0} is not in the family")]
    UnknownIndex(String),
    #[error("undecidable here: {0}")]
    Undecidable(String),
    #[error("invalid evidence: {0}")]
    InvalidEvidence(String),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Why `f_x(y)` has the value it has.
#[derive(Debug, Clone)]
pub enum Justification {
    /// `y ⊂* x`, so the value is 1.
    Below(OrderCertificate),
    /// `y` is the pivot itself; `⊂*` is irreflexive.
    Pivot,
    /// `x ⊂* y`, so the value is 0.
    Above(OrderCertificate),
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: u8,
    pub justification: Justification,
}

pub struct BaireFunction<'a, F: ChainFamily> {
    family: &'a F,
    pivot: F::Index,
    pivot_set: LazySet,
    depth: usize,
    memo: Mutex<HashMap<F::Index, Result<Evaluation, BaireError>>>,
}

/// `f_x` for the family member at `x`, checking certificates at the default
/// depth.
pub fn make_baire_function<'a, F: ChainFamily>(family: &'a F, x: &F::Index) -> Result<BaireFunction<'a, F>, BaireError> {
    BaireFunction::with_depth(family, x, DEFAULT_VERIFY_DEPTH)
}

impl<'a, F: ChainFamily> BaireFunction<'a, F> {
    pub fn with_depth(family: &'a F, x: &F::Index, depth: usize) -> Result<Self, BaireError> {
        let pivot_set = family.member(x).map_err(|e| match e {
            ChainError::UnknownIndex(i) => BaireError::UnknownIndex(i),
            other => BaireError::Undecidable(other.to_string()),
        })?;
        Ok(BaireFunction {
            family,
            pivot: x.clone(),
            pivot_set,
            depth,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn pivot(&self) -> &F::Index {
        &self.pivot
    }

    pub fn pivot_set(&self) -> &LazySet {
        &self.pivot_set
    }

    /// `f_x(y)` with its justification. Certificates are checked once per
    /// point and the outcome memoized.
    pub fn eval(&self, y: &F::Index) -> Result<Evaluation, BaireError> {
        if let Some(hit) = self.memo.lock().expect("eval memo poisoned").get(y) {
            return hit.clone();
        }
        let out = self.eval_uncached(y);
        self.memo
            .lock()
            .expect("eval memo poisoned")
            .insert(y.clone(), out.clone());
        out
    }

    pub fn value(&self, y: &F::Index) -> Result<u8, BaireError> {
        Ok(self.eval(y)?.value)
    }

    fn eval_uncached(&self, y: &F::Index) -> Result<Evaluation, BaireError> {
        if !self.family.has_index(y) {
            return Err(BaireError::UnknownIndex(y.to_string()));
        }
        if *y == self.pivot {
            return Ok(Evaluation {
                value: 0,
                justification: Justification::Pivot,
            });
        }
        let below = *y < self.pivot;
        let (lo, hi) = if below { (y, &self.pivot) } else { (&self.pivot, y) };
        let cert = self
            .family
            .certificate(lo, hi)
            .map_err(|e| BaireError::Undecidable(format!("no certificate for {lo} < {hi}: {e}")))?;
        verify_certificate(&cert, self.depth)
            .map_err(|e| BaireError::Undecidable(format!("certificate for {lo} < {hi} fails: {e}")))?;
        Ok(if below {
            Evaluation {
                value: 1,
                justification: Justification::Below(cert),
            }
        } else {
            Evaluation {
                value: 0,
                justification: Justification::Above(cert),
            }
        })
    }
}

/// Evidence that `y ⊆* x`.
#[derive(Debug, Clone)]
pub enum Evidence {
    /// A certificate for `y ⊂* x`.
    Certificate(OrderCertificate),
    /// Every element of `y` from this bound on lies in `x`.
    Bounded(Nat),
    /// `y` and `x` are the same expression.
    Identical,
}

/// The least `m` with `y(n) <= x(n)` for all `n >= m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FSigmaWitness {
    pub m: Nat,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessFailure {
    #[error("element {0} of y is beyond the witness but not in x")]
    Exception(Nat),
    #[error("witness {0} is not minimal")]
    NotMinimal(Nat),
    #[error(transparent)]
    Set(#[from] SetError),
}

impl FSigmaWitness {
    /// Checks both clauses: no element of `y \ x` in `[m, probe)`, and `m - 1`
    /// is an element of `y \ x` unless `m = 0`.
    pub fn check(&self, x: &LazySet, y: &LazySet, probe: &Nat) -> Result<(), WitnessFailure> {
        let mut budget = Budget::default();
        let mut cursor = self.m.clone();
        while &cursor < probe {
            let Some(n) = y.next_at_least_in(&cursor, &mut budget)? else {
                break;
            };
            if &n >= probe {
                break;
            }
            if !x.contains_in(&n, &mut budget)? {
                return Err(WitnessFailure::Exception(n));
            }
            cursor = n + 1u32;
        }
        if !self.m.is_zero() {
            let last = &self.m - 1u32;
            if !(y.contains_in(&last, &mut budget)? && !x.contains_in(&last, &mut budget)?) {
                return Err(WitnessFailure::NotMinimal(self.m.clone()));
            }
        }
        Ok(())
    }
}

/// Finds the least `m` below the evidence's exception bound by scanning
/// indicators downward.
pub fn fsigma_witness(x: &LazySet, y: &LazySet, evidence: &Evidence) -> Result<FSigmaWitness, BaireError> {
    let bound = match evidence {
        Evidence::Identical => {
            if x != y {
                return Err(BaireError::InvalidEvidence("sets are not identical".into()));
            }
            Nat::zero()
        }
        Evidence::Certificate(c) => {
            if c.lower() != y || c.upper() != x {
                return Err(BaireError::InvalidEvidence("certificate is about other sets".into()));
            }
            verify_certificate(c, DEFAULT_VERIFY_DEPTH).map_err(|e| BaireError::InvalidEvidence(e.to_string()))?;
            c.exception_bound().clone()
        }
        Evidence::Bounded(m0) => {
            let probe = OrderCertificate::new(y.clone(), x.clone(), m0.clone(), x.clone());
            if let Err(e) = exceptions_only(&probe) {
                return Err(BaireError::InvalidEvidence(e.to_string()));
            }
            m0.clone()
        }
    };
    let mut budget = Budget::default();
    let mut m = bound;
    while !m.is_zero() {
        let n = &m - Nat::one();
        if y.contains_in(&n, &mut budget)? && !x.contains_in(&n, &mut budget)? {
            break;
        }
        m = n;
    }
    Ok(FSigmaWitness { m })
}

/// The exception clause of a certificate, probed at the default depth.
fn exceptions_only(c: &OrderCertificate) -> Result<(), CertFailure> {
    let mut budget = Budget::default();
    let mut cursor = c.exception_bound().clone();
    for _ in 0..DEFAULT_VERIFY_DEPTH {
        let next = c
            .lower()
            .next_at_least_in(&cursor, &mut budget)
            .map_err(CertFailure::Inconclusive)?;
        let Some(n) = next else { break };
        if !c.upper().contains_in(&n, &mut budget).map_err(CertFailure::Inconclusive)? {
            return Err(CertFailure::Exception(n));
        }
        cursor = n + 1u32;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairOutcome {
    pub lower: String,
    pub upper: String,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainReport {
    pub pairs: Vec<PairOutcome>,
}

impl ChainReport {
    pub fn checked(&self) -> usize {
        self.pairs.len()
    }

    pub fn failed(&self) -> usize {
        self.pairs.iter().filter(|p| p.failure.is_some()).count()
    }

    pub fn ok(&self) -> bool {
        self.failed() == 0
    }
}

impl fmt::Display for ChainReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.pairs {
            match &p.failure {
                None => writeln!(f, "PAIR {} {} OK", p.lower, p.upper)?,
                Some(why) => writeln!(f, "PAIR {} {} FAIL {}", p.lower, p.upper, why)?,
            }
        }
        write!(f, "CHECKED {} FAILED {}", self.checked(), self.failed())
    }
}

/// Checks `f_i <= f_j` at every index occurring in `pairs`, and the strict
/// witness `f_i(x_i) = 0 < 1 = f_j(x_i)`, for each pair `(i, j)`.
pub fn verify_chain_monotone<F: ChainFamily>(family: &F, pairs: &[(F::Index, F::Index)], depth: usize) -> ChainReport {
    let points: BTreeSet<F::Index> = pairs.iter().flat_map(|(i, j)| [i.clone(), j.clone()]).collect();
    let points: Vec<F::Index> = points.into_iter().collect();
    verify_chain_monotone_on(family, pairs, &points, depth)
}

/// As [`verify_chain_monotone`], comparing at an explicit list of points.
pub fn verify_chain_monotone_on<F: ChainFamily>(
    family: &F,
    pairs: &[(F::Index, F::Index)],
    points: &[F::Index],
    depth: usize,
) -> ChainReport {
    let mut functions: HashMap<F::Index, Result<BaireFunction<'_, F>, BaireError>> = HashMap::new();
    let mut report = ChainReport::default();
    for (i, j) in pairs {
        for k in [i, j] {
            functions
                .entry(k.clone())
                .or_insert_with(|| BaireFunction::with_depth(family, k, depth));
        }
        let failure = check_pair(&functions[i], &functions[j], i, j, points).err();
        report.pairs.push(PairOutcome {
            lower: i.to_string(),
            upper: j.to_string(),
            failure,
        });
    }
    report
}

fn check_pair<F: ChainFamily>(
    fi: &Result<BaireFunction<'_, F>, BaireError>,
    fj: &Result<BaireFunction<'_, F>, BaireError>,
    i: &F::Index,
    j: &F::Index,
    points: &[F::Index],
) -> Result<(), String> {
    if i >= j {
        return Err("not strictly comparable".into());
    }
    let fi = fi.as_ref().map_err(|e| e.to_string())?;
    let fj = fj.as_ref().map_err(|e| e.to_string())?;
    let at = |f: &BaireFunction<'_, F>, p: &F::Index| f.value(p).map_err(|e| format!("f_{}({p}): {e}", f.pivot()));
    for p in points {
        let (a, b) = (at(fi, p)?, at(fj, p)?);
        if a > b {
            return Err(format!("f_{i}({p}) = {a} > {b} = f_{j}({p})"));
        }
    }
    let (a, b) = (at(fi, i)?, at(fj, i)?);
    if (a, b) != (0, 1) {
        return Err(format!("no strict witness: f_{i}({i}) = {a}, f_{j}({i}) = {b}"));
    }
    Ok(())
}
