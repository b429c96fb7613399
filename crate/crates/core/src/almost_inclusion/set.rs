//! Decidable subsets of `w` given by closed expressions.
//!
//! Every query runs against a [`Budget`] of search steps. Rows, progressions
//! and pieces of such sets answer rank and `nth` queries in closed form; the
//! boolean combinators fall back to leapfrog search, which is where the budget
//! is spent.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use super::pairing::{pair, row_count_below, row_of, rows_count_below, rows_nth};

pub type Nat = BigUint;

/// Default number of search steps allowed per top-level query.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1 << 22;

/// Default cap on expression nesting depth.
pub const DEFAULT_DEPTH_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("search budget of {0} steps exhausted")]
    BudgetExhausted(u64),
    #[error("expression depth {depth} exceeds cap {cap}")]
    DepthExceeded { depth: usize, cap: usize },
    #[error("arithmetic progression step must be at least 1")]
    ZeroStep,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Clone)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    fn charge(&mut self) -> Result<(), SetError> {
        self.used += 1;
        if self.used > self.limit {
            Err(SetError::BudgetExhausted(self.limit))
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_SEARCH_BUDGET)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Empty,
    /// Union of rows `0..k` of the pairing.
    Rows(u64),
    /// `{step * n + offset : n in w}`.
    Ap { step: Nat, offset: Nat },
    Union(LazySet, LazySet),
    Inter(LazySet, LazySet),
    Diff(LazySet, LazySet),
    /// Elements of the parent whose enumeration index lies in the given row.
    Piece(LazySet, u64),
}

#[derive(Debug)]
struct Node {
    expr: Expr,
    hash: u64,
    depth: usize,
    indexed: bool,
    /// Enumerated prefix of a non-indexed set, grown on demand.
    prefix: Mutex<Prefix>,
}

#[derive(Debug, Default)]
struct Prefix {
    elems: Vec<Nat>,
    complete: bool,
}

/// A hash-consed handle to a set expression. Cloning is cheap; equality and
/// hashing are structural.
#[derive(Clone)]
pub struct LazySet(Arc<Node>);

impl LazySet {
    /// Wraps an expression as written, with no simplification.
    pub fn from_expr(expr: Expr) -> Self {
        let mut h = DefaultHasher::new();
        let (depth, indexed) = match &expr {
            Expr::Empty => {
                0u8.hash(&mut h);
                (1, true)
            }
            Expr::Rows(k) => {
                1u8.hash(&mut h);
                k.hash(&mut h);
                (1, true)
            }
            Expr::Ap { step, offset } => {
                2u8.hash(&mut h);
                step.hash(&mut h);
                offset.hash(&mut h);
                (1, true)
            }
            Expr::Union(a, b) | Expr::Inter(a, b) | Expr::Diff(a, b) => {
                let tag = match &expr {
                    Expr::Union(..) => 3u8,
                    Expr::Inter(..) => 4,
                    _ => 5,
                };
                tag.hash(&mut h);
                a.0.hash.hash(&mut h);
                b.0.hash.hash(&mut h);
                let indexed = matches!(&expr, Expr::Inter(..)) && ray_split(a, b).is_some();
                (1 + a.depth().max(b.depth()), indexed)
            }
            Expr::Piece(p, i) => {
                6u8.hash(&mut h);
                p.0.hash.hash(&mut h);
                i.hash(&mut h);
                (1 + p.depth(), p.0.indexed)
            }
        };
        LazySet(Arc::new(Node {
            expr,
            hash: h.finish(),
            depth,
            indexed,
            prefix: Mutex::new(Prefix::default()),
        }))
    }

    pub fn empty() -> Self {
        Self::from_expr(Expr::Empty)
    }

    pub fn naturals() -> Self {
        Self::from_expr(Expr::Ap {
            step: Nat::one(),
            offset: Nat::zero(),
        })
    }

    /// Rows `0..k` of the pairing; `rows(0)` is the empty expression.
    pub fn rows(k: u64) -> Self {
        if k == 0 {
            Self::empty()
        } else {
            Self::from_expr(Expr::Rows(k))
        }
    }

    pub fn ap(step: impl Into<Nat>, offset: impl Into<Nat>) -> Result<Self, SetError> {
        let step = step.into();
        if step.is_zero() {
            return Err(SetError::ZeroStep);
        }
        Ok(Self::from_expr(Expr::Ap {
            step,
            offset: offset.into(),
        }))
    }

    /// `{n : n >= m}`.
    pub fn ray(m: impl Into<Nat>) -> Self {
        Self::from_expr(Expr::Ap {
            step: Nat::one(),
            offset: m.into(),
        })
    }

    /// Finite interval `{lo, ..., hi - 1}` as `diff(ap(1,lo), ap(1,hi))`.
    pub fn range(lo: impl Into<Nat>, hi: impl Into<Nat>) -> Self {
        Self::from_expr(Expr::Diff(Self::ray(lo), Self::ray(hi)))
    }

    pub fn union(a: &LazySet, b: &LazySet) -> Self {
        if b.syntactic_subset(a) {
            return a.clone();
        }
        if a.syntactic_subset(b) {
            return b.clone();
        }
        Self::from_expr(Expr::Union(a.clone(), b.clone()))
    }

    /// Intersection; collapses to one side when containment is syntactic.
    pub fn inter(a: &LazySet, b: &LazySet) -> Self {
        if a.syntactic_subset(b) {
            return a.clone();
        }
        if b.syntactic_subset(a) {
            return b.clone();
        }
        Self::from_expr(Expr::Inter(a.clone(), b.clone()))
    }

    pub fn diff(a: &LazySet, b: &LazySet) -> Self {
        if matches!(a.expr(), Expr::Empty) {
            return a.clone();
        }
        Self::from_expr(Expr::Diff(a.clone(), b.clone()))
    }

    pub fn piece(parent: &LazySet, row: u64) -> Self {
        if matches!(parent.expr(), Expr::Empty) {
            return parent.clone();
        }
        Self::from_expr(Expr::Piece(parent.clone(), row))
    }

    pub fn expr(&self) -> &Expr {
        &self.0.expr
    }

    pub fn depth(&self) -> usize {
        self.0.depth
    }

    /// True when rank and `nth` are answered without search.
    pub fn is_indexed(&self) -> bool {
        self.0.indexed
    }

    pub fn check_depth(&self, cap: usize) -> Result<(), SetError> {
        if self.depth() > cap {
            Err(SetError::DepthExceeded {
                depth: self.depth(),
                cap,
            })
        } else {
            Ok(())
        }
    }

    pub fn ptr_eq(&self, other: &LazySet) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Sound, incomplete containment test on the expressions themselves.
    pub fn syntactic_subset(&self, other: &LazySet) -> bool {
        let mut fuel = 256u32;
        subset_rec(self, other, &mut fuel)
    }

    pub fn contains_in(&self, n: &Nat, budget: &mut Budget) -> Result<bool, SetError> {
        Ok(match self.expr() {
            Expr::Empty => false,
            Expr::Rows(k) => row_of(n) < *k,
            Expr::Ap { step, offset } => n >= offset && ((n - offset) % step).is_zero(),
            Expr::Union(a, b) => a.contains_in(n, budget)? || b.contains_in(n, budget)?,
            Expr::Inter(a, b) => a.contains_in(n, budget)? && b.contains_in(n, budget)?,
            Expr::Diff(a, b) => a.contains_in(n, budget)? && !b.contains_in(n, budget)?,
            Expr::Piece(p, i) => p.contains_in(n, budget)? && row_of(&p.rank_in(n, budget)?) == *i,
        })
    }

    /// Number of elements strictly below `n`.
    pub fn rank_in(&self, n: &Nat, budget: &mut Budget) -> Result<Nat, SetError> {
        match self.expr() {
            Expr::Empty => Ok(Nat::zero()),
            Expr::Rows(k) => Ok(rows_count_below(*k, n)),
            Expr::Ap { step, offset } => Ok(if n <= offset {
                Nat::zero()
            } else {
                (n - offset).div_ceil(step)
            }),
            Expr::Piece(p, i) => Ok(row_count_below(*i, &p.rank_in(n, budget)?)),
            Expr::Inter(a, b) if self.is_indexed() => {
                let (base, m) = ray_split(a, b).expect("indexed intersection");
                let cut = if n < m { n } else { m };
                Ok(base.rank_in(n, budget)? - base.rank_in(cut, budget)?)
            }
            _ => {
                let mut prefix = self.0.prefix.lock().expect("prefix cache poisoned");
                while !prefix.complete && prefix.elems.last().is_none_or(|x| x < n) {
                    self.extend(&mut prefix, budget)?;
                }
                Ok(Nat::from(prefix.elems.partition_point(|x| x < n)))
            }
        }
    }

    /// The `k`-th smallest element, if the set has more than `k` elements.
    pub fn nth_in(&self, k: &Nat, budget: &mut Budget) -> Result<Option<Nat>, SetError> {
        match self.expr() {
            Expr::Empty => Ok(None),
            Expr::Rows(0) => Ok(None),
            Expr::Rows(r) => Ok(Some(rows_nth(*r, k))),
            Expr::Ap { step, offset } => Ok(Some(step * k + offset)),
            Expr::Piece(p, i) if p.is_indexed() => p.nth_in(&pair(*i, k), budget),
            Expr::Inter(a, b) if self.is_indexed() => {
                let (base, m) = ray_split(a, b).expect("indexed intersection");
                let start = base.rank_in(m, budget)?;
                base.nth_in(&(start + k), budget)
            }
            _ => {
                let mut prefix = self.0.prefix.lock().expect("prefix cache poisoned");
                loop {
                    if Nat::from(prefix.elems.len()) > *k {
                        let k = usize::try_from(k).expect("index fits after enumeration");
                        return Ok(Some(prefix.elems[k].clone()));
                    }
                    if prefix.complete {
                        return Ok(None);
                    }
                    self.extend(&mut prefix, budget)?;
                }
            }
        }
    }

    /// Appends the next element to a non-indexed set's prefix.
    fn extend(&self, prefix: &mut Prefix, budget: &mut Budget) -> Result<(), SetError> {
        budget.charge()?;
        let cursor = prefix.elems.last().map_or_else(Nat::zero, |x| x + 1u32);
        match self.next_at_least_in(&cursor, budget)? {
            Some(x) => prefix.elems.push(x),
            None => prefix.complete = true,
        }
        Ok(())
    }

    /// Least element `>= n`.
    pub fn next_at_least_in(&self, n: &Nat, budget: &mut Budget) -> Result<Option<Nat>, SetError> {
        match self.expr() {
            Expr::Empty => Ok(None),
            Expr::Rows(_) | Expr::Ap { .. } => {
                let r = self.rank_in(n, budget)?;
                self.nth_in(&r, budget)
            }
            Expr::Piece(p, i) => {
                let r = p.rank_in(n, budget)?;
                // least t >= r with t in row i is <i, ceil((r+1)/2^i) div 2>
                let q = (r + 1u32).div_ceil(&(Nat::one() << *i as usize));
                let t = pair(*i, &(q >> 1usize));
                p.nth_in(&t, budget)
            }
            Expr::Inter(..) if self.is_indexed() => {
                let r = self.rank_in(n, budget)?;
                self.nth_in(&r, budget)
            }
            Expr::Union(a, b) => {
                let x = a.next_at_least_in(n, budget)?;
                let y = b.next_at_least_in(n, budget)?;
                Ok(min_opt(x, y))
            }
            Expr::Inter(a, b) => {
                let mut cursor = n.clone();
                loop {
                    budget.charge()?;
                    let Some(x) = a.next_at_least_in(&cursor, budget)? else {
                        return Ok(None);
                    };
                    let Some(y) = b.next_at_least_in(&x, budget)? else {
                        return Ok(None);
                    };
                    if x == y {
                        return Ok(Some(x));
                    }
                    cursor = y;
                }
            }
            Expr::Diff(a, b) => {
                let mut cursor = n.clone();
                loop {
                    budget.charge()?;
                    let Some(x) = a.next_at_least_in(&cursor, budget)? else {
                        return Ok(None);
                    };
                    if !b.contains_in(&x, budget)? {
                        return Ok(Some(x));
                    }
                    match b.next_absent_in(&x, budget)? {
                        Some(gap) => cursor = gap,
                        None => return Ok(None),
                    }
                }
            }
        }
    }

    /// Least number `>= n` outside the set, or `None` if the set contains
    /// every number from `n` on.
    pub fn next_absent_in(&self, n: &Nat, budget: &mut Budget) -> Result<Option<Nat>, SetError> {
        budget.charge()?;
        match self.expr() {
            Expr::Empty => Ok(Some(n.clone())),
            Expr::Rows(k) => {
                // least x >= n with 2^k dividing x + 1
                let unit = Nat::one() << *k as usize;
                Ok(Some((n + 1u32).div_ceil(&unit) * unit - 1u32))
            }
            Expr::Ap { step, offset } => {
                if n < offset {
                    Ok(Some(n.clone()))
                } else if step.is_one() {
                    Ok(None)
                } else if ((n - offset) % step).is_zero() {
                    Ok(Some(n + 1u32))
                } else {
                    Ok(Some(n.clone()))
                }
            }
            Expr::Union(a, b) => {
                let mut cursor = n.clone();
                loop {
                    budget.charge()?;
                    let Some(x) = a.next_absent_in(&cursor, budget)? else {
                        return Ok(None);
                    };
                    let Some(y) = b.next_absent_in(&x, budget)? else {
                        return Ok(None);
                    };
                    if x == y {
                        return Ok(Some(x));
                    }
                    cursor = y;
                }
            }
            Expr::Inter(a, b) => Ok(min_opt(a.next_absent_in(n, budget)?, b.next_absent_in(n, budget)?)),
            Expr::Diff(a, b) => Ok(min_opt(a.next_absent_in(n, budget)?, b.next_at_least_in(n, budget)?)),
            Expr::Piece(p, i) => {
                let outside = p.next_absent_in(n, budget)?;
                // of two consecutive enumeration indices at most one is in row i
                let r = p.rank_in(n, budget)?;
                let t = if row_of(&r) == *i { r + 1u32 } else { r };
                Ok(min_opt(outside, p.nth_in(&t, budget)?))
            }
        }
    }

    pub fn contains(&self, n: &Nat) -> Result<bool, SetError> {
        self.contains_in(n, &mut Budget::default())
    }

    pub fn contains_u64(&self, n: u64) -> Result<bool, SetError> {
        self.contains(&Nat::from(n))
    }

    pub fn nth(&self, k: u64) -> Result<Option<Nat>, SetError> {
        self.nth_in(&Nat::from(k), &mut Budget::default())
    }

    pub fn rank(&self, n: &Nat) -> Result<Nat, SetError> {
        self.rank_in(n, &mut Budget::default())
    }

    /// Up to `k` smallest elements in increasing order.
    pub fn first_in(&self, k: usize, budget: &mut Budget) -> Result<Vec<Nat>, SetError> {
        if self.is_indexed() {
            let mut out = Vec::with_capacity(k);
            for i in 0..k {
                match self.nth_in(&Nat::from(i), budget)? {
                    Some(x) => out.push(x),
                    None => break,
                }
            }
            return Ok(out);
        }
        let mut out = Vec::with_capacity(k);
        let mut cursor = Nat::zero();
        while out.len() < k {
            let Some(x) = self.next_at_least_in(&cursor, budget)? else {
                break;
            };
            cursor = &x + 1u32;
            out.push(x);
        }
        Ok(out)
    }

    pub fn first(&self, k: usize) -> Result<Vec<Nat>, SetError> {
        self.first_in(k, &mut Budget::default())
    }

    /// Parses with an explicit depth cap.
    pub fn parse_with_cap(src: &str, cap: usize) -> Result<Self, SetError> {
        super::parse::parse_set(src, cap)
    }
}

/// Recognizes `inter(A, ap(1,m))` (either order) with `A` indexed.
fn min_opt(x: Option<Nat>, y: Option<Nat>) -> Option<Nat> {
    match (x, y) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

fn ray_split<'a>(a: &'a LazySet, b: &'a LazySet) -> Option<(&'a LazySet, &'a Nat)> {
    let as_ray = |s: &'a LazySet| match s.expr() {
        Expr::Ap { step, offset } if step.is_one() => Some(offset),
        _ => None,
    };
    if let Some(m) = as_ray(b) {
        if a.is_indexed() {
            return Some((a, m));
        }
    }
    if let Some(m) = as_ray(a) {
        if b.is_indexed() {
            return Some((b, m));
        }
    }
    None
}

fn subset_rec(a: &LazySet, b: &LazySet, fuel: &mut u32) -> bool {
    if *fuel == 0 {
        return false;
    }
    *fuel -= 1;
    if a == b {
        return true;
    }
    match (a.expr(), b.expr()) {
        (Expr::Empty, _) => return true,
        (_, Expr::Ap { step, offset }) if step.is_one() && offset.is_zero() => return true,
        (Expr::Rows(i), Expr::Rows(j)) => return i <= j,
        (
            Expr::Ap { step: s1, offset: o1 },
            Expr::Ap { step: s2, offset: o2 },
        ) => return (s1 % s2).is_zero() && o1 >= o2 && ((o1 - o2) % s2).is_zero(),
        _ => {}
    }
    let left = match a.expr() {
        Expr::Piece(p, _) => subset_rec(p, b, fuel),
        Expr::Diff(p, _) => subset_rec(p, b, fuel),
        Expr::Inter(x, y) => subset_rec(x, b, fuel) || subset_rec(y, b, fuel),
        Expr::Union(x, y) => subset_rec(x, b, fuel) && subset_rec(y, b, fuel),
        _ => false,
    };
    if left {
        return true;
    }
    match b.expr() {
        Expr::Union(x, y) => subset_rec(a, x, fuel) || subset_rec(a, y, fuel),
        Expr::Inter(x, y) => subset_rec(a, x, fuel) && subset_rec(a, y, fuel),
        _ => false,
    }
}

impl PartialEq for LazySet {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other)
            || (self.0.hash == other.0.hash
                && self.0.depth == other.0.depth
                && self.0.expr == other.0.expr)
    }
}

impl Eq for LazySet {}

impl Hash for LazySet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash.hash(state);
    }
}

impl fmt::Debug for LazySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LazySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr() {
            Expr::Empty => f.write_str("empty"),
            Expr::Rows(k) => write!(f, "rows({k})"),
            Expr::Ap { step, offset } => write!(f, "ap({step},{offset})"),
            Expr::Union(a, b) => write!(f, "union({a},{b})"),
            Expr::Inter(a, b) => write!(f, "inter({a},{b})"),
            Expr::Diff(a, b) => write!(f, "diff({a},{b})"),
            Expr::Piece(p, i) => write!(f, "piece({p},{i})"),
        }
    }
}

impl FromStr for LazySet {
    type Err = SetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        super::parse::parse_set(s, DEFAULT_DEPTH_CAP)
    }
}
