//! Ordinal notations below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `w^(e1)*c1 + ... + w^(ek)*ck` with strictly
//! decreasing exponents (themselves notations) and positive coefficients. The
//! representation is canonical, so structural equality is ordinal equality.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("cannot subtract: {left} is greater than {right}")]
    NotBelow { left: Ordinal, right: Ordinal },
    #[error("{0} is not a limit notation")]
    NotLimit(Ordinal),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("non-canonical notation: {0}")]
    NonCanonical(String),
}

/// One summand `w^exponent * coefficient`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: Ordinal,
    pub coefficient: BigUint,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Vec<Term>,
}

/// Result of [`Ordinal::classify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kind {
    Zero,
    Successor(Ordinal),
    Limit,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::nat(1u32)
    }

    pub fn nat(n: impl Into<BigUint>) -> Self {
        let n = n.into();
        if n.is_zero() {
            return Self::zero();
        }
        Ordinal {
            terms: vec![Term {
                exponent: Ordinal::zero(),
                coefficient: n,
            }],
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Ordinal::one())
    }

    /// `w^e`.
    pub fn omega_pow(e: Ordinal) -> Self {
        Self::monomial(e, BigUint::one())
    }

    /// `w^e * c`; zero when `c == 0`.
    pub fn monomial(e: Ordinal, c: impl Into<BigUint>) -> Self {
        let c = c.into();
        if c.is_zero() {
            return Self::zero();
        }
        Ordinal {
            terms: vec![Term {
                exponent: e,
                coefficient: c,
            }],
        }
    }

    /// Builds a notation from terms, rejecting non-canonical input.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self, OrdinalError> {
        for t in &terms {
            if t.coefficient.is_zero() {
                return Err(OrdinalError::NonCanonical("zero coefficient".into()));
            }
        }
        for w in terms.windows(2) {
            if w[0].exponent <= w[1].exponent {
                return Err(OrdinalError::NonCanonical(format!(
                    "exponent {} does not decrease to {}",
                    w[0].exponent, w[1].exponent
                )));
            }
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Natural-number value when the notation is finite.
    pub fn as_nat(&self) -> Option<&BigUint> {
        match self.terms.as_slice() {
            [] => None,
            [t] if t.exponent.is_zero() => Some(&t.coefficient),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.is_zero() || self.as_nat().is_some()
    }

    /// Exponent nesting depth; 0 for naturals.
    pub fn height(&self) -> usize {
        self.terms
            .iter()
            .map(|t| {
                if t.exponent.is_zero() {
                    0
                } else {
                    1 + t.exponent.height()
                }
            })
            .max()
            .unwrap_or(0)
    }

    pub fn compare(&self, other: &Ordinal) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a
                .exponent
                .compare(&b.exponent)
                .then_with(|| a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }

    /// Ordinal sum `self + rhs`.
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some(lead) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exponent > lead.exponent)
            .cloned()
            .collect();
        let mut rest = rhs.terms.iter();
        let mut head = rest.next().cloned().expect("nonempty");
        if let Some(same) = self.terms.iter().find(|t| t.exponent == lead.exponent) {
            head.coefficient += &same.coefficient;
        }
        terms.push(head);
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    /// The unique `d` with `self + d == target`.
    pub fn left_subtract(&self, target: &Ordinal) -> Result<Ordinal, OrdinalError> {
        if self > target {
            return Err(OrdinalError::NotBelow {
                left: self.clone(),
                right: target.clone(),
            });
        }
        for (i, (a, b)) in self.terms.iter().zip(&target.terms).enumerate() {
            if a == b {
                continue;
            }
            let mut terms = Vec::with_capacity(target.terms.len() - i);
            if a.exponent == b.exponent {
                // a <= b forces a smaller coefficient here
                terms.push(Term {
                    exponent: b.exponent.clone(),
                    coefficient: &b.coefficient - &a.coefficient,
                });
            } else {
                terms.push(b.clone());
            }
            terms.extend(target.terms[i + 1..].iter().cloned());
            return Ok(Ordinal { terms });
        }
        Ok(Ordinal {
            terms: target.terms[self.terms.len()..].to_vec(),
        })
    }

    pub fn classify(&self) -> Kind {
        match self.terms.last() {
            None => Kind::Zero,
            Some(t) if t.exponent.is_zero() => {
                let mut terms = self.terms.clone();
                let last = terms.last_mut().expect("nonempty");
                last.coefficient -= 1u32;
                if last.coefficient.is_zero() {
                    terms.pop();
                }
                Kind::Successor(Ordinal { terms })
            }
            Some(_) => Kind::Limit,
        }
    }

    pub fn successor(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    pub fn fundamental_sequence(&self) -> Result<FundamentalSequence, OrdinalError> {
        match self.classify() {
            Kind::Limit => Ok(FundamentalSequence {
                source: self.clone(),
            }),
            _ => Err(OrdinalError::NotLimit(self.clone())),
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

/// Wainer-style fundamental sequence of a limit notation.
///
/// For `a = g + w^e*c` with `c > 1` the sequence is taken for the last copy of
/// `w^e` on top of `g + w^e*(c-1)`. For `w^(e'+1)` it is `w^e' * (k+1)` and for
/// `w^l` with `l` a limit it is `w^(l[k])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalSequence {
    source: Ordinal,
}

impl FundamentalSequence {
    pub fn source(&self) -> &Ordinal {
        &self.source
    }

    pub fn at(&self, k: u64) -> Ordinal {
        let mut terms = self.source.terms.clone();
        let last = terms.pop().expect("limit notation is nonzero");
        if last.coefficient > BigUint::one() {
            terms.push(Term {
                exponent: last.exponent.clone(),
                coefficient: &last.coefficient - 1u32,
            });
        }
        let base = Ordinal { terms };
        let tail = match last.exponent.classify() {
            Kind::Successor(pred) => Ordinal::monomial(pred, k + 1),
            Kind::Limit => {
                let inner = FundamentalSequence {
                    source: last.exponent.clone(),
                };
                Ordinal::omega_pow(inner.at(k))
            }
            Kind::Zero => unreachable!("limit notation ends in a positive exponent"),
        };
        base.add(&tail)
    }

    /// Least `k` with `b < self.at(k)`; exists for every `b < source`.
    pub fn first_above(&self, b: &Ordinal) -> Option<u64> {
        if b >= &self.source {
            return None;
        }
        (0u64..).find(|&k| &self.at(k) > b)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            let one = t.coefficient.is_one();
            match t.exponent.as_nat() {
                _ if t.exponent.is_zero() => write!(f, "{}", t.coefficient)?,
                Some(e) if e.is_one() => f.write_str("w")?,
                _ => write!(f, "w^({})", t.exponent)?,
            }
            if !t.exponent.is_zero() && !one {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: Vec<u8> = s.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        let mut p = Parser {
            src: &compact,
            pos: 0,
        };
        let ord = p.ord()?;
        if p.pos != compact.len() {
            return Err(p.err("trailing input"));
        }
        Ok(ord)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> OrdinalError {
        OrdinalError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, lit: &[u8]) -> bool {
        if self.src[self.pos..].starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<BigUint, OrdinalError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a natural number"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digits parse"))
    }

    fn ord(&mut self) -> Result<Ordinal, OrdinalError> {
        if self.peek() == Some(b'0') && !matches!(self.src.get(self.pos + 1), Some(b'0'..=b'9')) {
            self.pos += 1;
            return Ok(Ordinal::zero());
        }
        let mut terms = vec![self.term()?];
        while self.eat(b"+") {
            terms.push(self.term()?);
        }
        Ordinal::from_terms(terms)
    }

    fn term(&mut self) -> Result<Term, OrdinalError> {
        if self.eat(b"w") {
            let exponent = if self.eat(b"^(") {
                let e = self.ord()?;
                if !self.eat(b")") {
                    return Err(self.err("expected ')'"));
                }
                e
            } else {
                Ordinal::one()
            };
            let coefficient = if self.eat(b"*") {
                self.nat()?
            } else {
                BigUint::one()
            };
            Ok(Term {
                exponent,
                coefficient,
            })
        } else {
            let n = self.nat()?;
            Ok(Term {
                exponent: Ordinal::zero(),
                coefficient: n,
            })
        }
    }
}

/// Samples a notation strictly below `bound` by a random descent through
/// predecessors and fundamental sequences. `branch` caps the fundamental
/// sequence index chosen at each limit step.
pub fn sample_below<R: Rng + ?Sized>(bound: &Ordinal, branch: u64, rng: &mut R) -> Option<Ordinal> {
    let mut current = bound.clone();
    loop {
        let next = match current.classify() {
            Kind::Zero => return None,
            Kind::Successor(p) => p,
            Kind::Limit => {
                let k = rng.gen_range(0..branch.max(1));
                current.fundamental_sequence().expect("limit").at(k)
            }
        };
        if next.is_zero() || rng.gen_bool(0.35) {
            return Some(next);
        }
        current = next;
    }
}

/// Random notation below epsilon-zero with bounded nesting and width.
pub fn random_notation<R: Rng + ?Sized>(rng: &mut R, height: usize, width: usize, max_coeff: u64) -> Ordinal {
    let n_terms = rng.gen_range(0..=width);
    let mut exps: Vec<Ordinal> = (0..n_terms)
        .map(|_| {
            if height == 0 || rng.gen_bool(0.3) {
                Ordinal::nat(rng.gen_range(0..=3u64))
            } else {
                random_notation(rng, height - 1, width, max_coeff)
            }
        })
        .collect();
    exps.sort_by(|a, b| b.cmp(a));
    exps.dedup();
    let terms = exps
        .into_iter()
        .map(|exponent| Term {
            exponent,
            coefficient: BigUint::from(rng.gen_range(1..=max_coeff.max(1))),
        })
        .collect();
    Ordinal::from_terms(terms).expect("sorted distinct exponents")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    /// Term-list comparison written independently of `compare`: flattens a
    /// notation into a nested tuple-like string key ordered the same way.
    fn oracle_cmp(a: &Ordinal, b: &Ordinal) -> Ordering {
        let (ta, tb) = (a.terms(), b.terms());
        let n = ta.len().min(tb.len());
        for i in 0..n {
            let e = oracle_cmp(&ta[i].exponent, &tb[i].exponent);
            if e != Ordering::Equal {
                return e;
            }
            if ta[i].coefficient != tb[i].coefficient {
                return ta[i].coefficient.cmp(&tb[i].coefficient);
            }
        }
        ta.len().cmp(&tb.len())
    }

    /// Order type of a concatenation of two finite-exponent well-orders,
    /// computed on surrogate well-orders: an ordinal below w^w is a multiset
    /// of blocks (exponent, copies); concatenating A then B keeps only the
    /// blocks of A that survive B's leading block.
    fn oracle_add_small(a: &[(u32, u32)], b: &[(u32, u32)]) -> Vec<(u32, u32)> {
        // expand into a list of single w^e blocks in order, then absorb
        let mut blocks: Vec<u32> = Vec::new();
        for &(e, c) in a.iter().chain(b) {
            for _ in 0..c {
                // a block w^e absorbs every preceding smaller block
                while blocks.last().is_some_and(|&p| p < e) {
                    blocks.pop();
                }
                blocks.push(e);
            }
        }
        let mut out: Vec<(u32, u32)> = Vec::new();
        for e in blocks {
            match out.last_mut() {
                Some((pe, c)) if *pe == e => *c += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    fn from_blocks(blocks: &[(u32, u32)]) -> Ordinal {
        Ordinal::from_terms(
            blocks
                .iter()
                .map(|&(e, c)| Term {
                    exponent: Ordinal::nat(e),
                    coefficient: BigUint::from(c),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(o("w").compare(&o("3")), Ordering::Greater);
        assert_eq!(o("0").compare(&o("0")), Ordering::Equal);
        let a = o("w^(2)*2 + w");
        let b = o("w^(2)*2 + 5");
        assert_eq!(oracle_cmp(&a, &b), Ordering::Greater);
        assert_eq!(a.compare(&b), Ordering::Greater);
    }

    #[test]
    fn add_examples() {
        assert_eq!(o("1").add(&o("w")), o("w"));
        assert_eq!(o("w").add(&o("1")), o("w+1"));
        let expected = from_blocks(&oracle_add_small(&[(2, 1), (1, 3)], &[(1, 2), (0, 4)]));
        assert_eq!(expected, o("w^(2)+w*5+4"));
        assert_eq!(o("w^(2)+w*3").add(&o("w*2+4")), expected);
    }

    #[test]
    fn left_subtract_examples() {
        assert_eq!(o("w").left_subtract(&o("w*2")).unwrap(), o("w"));
        let x = o("w^(w)*2+3");
        assert!(x.left_subtract(&x).unwrap().is_zero());
        let d = o("w*3+1").left_subtract(&o("w^(4)")).unwrap();
        assert_eq!(d, o("w^(4)"));
        assert_eq!(o("w*3+1").add(&d), o("w^(4)"));
        assert!(matches!(
            o("w+1").left_subtract(&o("w")),
            Err(OrdinalError::NotBelow { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(o("0").classify(), Kind::Zero);
        assert_eq!(o("w+4").classify(), Kind::Successor(o("w+3")));
        assert_eq!(o("w^(w)").classify(), Kind::Limit);
        assert_eq!(o("1").classify(), Kind::Successor(o("0")));
    }

    #[test]
    fn fundamental_sequence_examples() {
        let fs = o("w").fundamental_sequence().unwrap();
        for k in 0..10 {
            assert_eq!(fs.at(k), Ordinal::nat(k + 1));
        }
        let w2 = o("w^(2)");
        let fs = w2.fundamental_sequence().unwrap();
        for k in 0..10 {
            let g = fs.at(k);
            assert_eq!(g, Ordinal::monomial(Ordinal::one(), k + 1));
            assert!(g < w2);
        }
        let ww = o("w^(w)");
        let fs = ww.fundamental_sequence().unwrap();
        for k in 0..10 {
            let g = fs.at(k);
            assert_eq!(g, Ordinal::omega_pow(Ordinal::nat(k + 1)));
            assert!(g < ww);
        }
        // coefficient peeling
        let fs = o("w*3").fundamental_sequence().unwrap();
        assert_eq!(fs.at(0), o("w*2+1"));
        assert!(matches!(
            o("w+1").fundamental_sequence(),
            Err(OrdinalError::NotLimit(_))
        ));
        assert!(o("0").fundamental_sequence().is_err());
    }

    #[test]
    fn first_above_finds_segment() {
        let fs = o("w^(w)").fundamental_sequence().unwrap();
        assert_eq!(fs.first_above(&o("w^(3)*2+1")), Some(3));
        assert_eq!(fs.first_above(&o("w^(w)")), None);
    }

    #[test]
    fn parse_and_display() {
        let x = o("w^(w)*2 + w*3 + 5");
        assert_eq!(x.to_string(), "w^(w)*2+w*3+5");
        assert_eq!(o(" w ^ ( 2 ) ").to_string(), "w^(2)");
        assert_eq!(o("w^(1)"), o("w"));
        assert_eq!(o("0").to_string(), "0");
        assert_eq!(o("123456789012345678901234567890").to_string(), "123456789012345678901234567890");
        for bad in ["", "w+w^(2)", "w*0", "3+w", "1+1", "w^(w", "w^()", "x", "0+1", "w**2", "00"] {
            assert!(bad.parse::<Ordinal>().is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn sample_below_stays_below() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let bound = o("w^(2)+w*3+5");
        for _ in 0..500 {
            let a = sample_below(&bound, 4, &mut rng).unwrap();
            assert!(a < bound);
        }
        assert!(sample_below(&Ordinal::zero(), 4, &mut rng).is_none());
    }
}
