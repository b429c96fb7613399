use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::ContError;

/// A metric axiom broken by a distance table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricViolation {
    Symmetry(usize, usize),
    /// Zero off the diagonal, or nonzero on it.
    Identity(usize, usize),
    Negative(usize, usize),
    /// `d(i,k) > d(i,j) + d(j,k)`.
    Triangle(usize, usize, usize),
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricViolation::Symmetry(i, j) => write!(f, "symmetry {i} {j}"),
            MetricViolation::Identity(i, j) => write!(f, "identity {i} {j}"),
            MetricViolation::Negative(i, j) => write!(f, "negative {i} {j}"),
            MetricViolation::Triangle(i, j, k) => write!(f, "triangle {i} {j} {k}"),
        }
    }
}

/// A finite metric space with a dense set `D` listed in its order `≺`.
///
/// Points are `0..len`. For a finite space only `D = X` is dense, but `D` may
/// be any subset; functions are still evaluated at every point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSpaceDesc {
    dist: Vec<Vec<BigRational>>,
    order: Vec<usize>,
    rank: Vec<Option<usize>>,
}

impl MetricSpaceDesc {
    /// `order` lists `D` from `≺`-least to greatest.
    pub fn new(dist: Vec<Vec<BigRational>>, order: Vec<usize>) -> Result<Self, ContError> {
        let n = dist.len();
        if dist.iter().any(|row| row.len() != n) {
            return Err(ContError::Parse {
                line: 0,
                msg: "distance table is not square".into(),
            });
        }
        let mut rank = vec![None; n];
        for (r, &p) in order.iter().enumerate() {
            if p >= n {
                return Err(ContError::UnknownPoint(p));
            }
            if rank[p].replace(r).is_some() {
                return Err(ContError::Parse {
                    line: 0,
                    msg: format!("point {p} listed twice in the order"),
                });
            }
        }
        Ok(MetricSpaceDesc { dist, order, rank })
    }

    /// Points on the rational line with `|a - b|` as the metric.
    pub fn from_points_on_line(xs: &[BigRational], order: Vec<usize>) -> Result<Self, ContError> {
        let dist = xs
            .iter()
            .map(|a| xs.iter().map(|b| (a - b).abs()).collect())
            .collect();
        MetricSpaceDesc::new(dist, order)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> &BigRational {
        &self.dist[i][j]
    }

    /// `D` in `≺`-order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `D` in enumeration order, i.e. by point index.
    pub fn dense_enumeration(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.rank[p].is_some()).collect()
    }

    pub fn in_dense(&self, p: usize) -> bool {
        self.rank.get(p).is_some_and(Option::is_some)
    }

    /// Position of `p` in `≺`, if `p ∈ D`.
    pub fn rank(&self, p: usize) -> Option<usize> {
        self.rank.get(p).copied().flatten()
    }

    /// `d ≺ e`.
    pub fn precedes(&self, d: usize, e: usize) -> bool {
        matches!((self.rank(d), self.rank(e)), (Some(a), Some(b)) if a < b)
    }

    /// Every violated axiom, in a fixed order: symmetry, identity, sign, then
    /// the triangle inequality.
    pub fn violations(&self) -> Vec<MetricViolation> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.dist[i][j] != self.dist[j][i] {
                    out.push(MetricViolation::Symmetry(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let d = &self.dist[i][j];
                if (i == j) != d.is_zero() {
                    out.push(MetricViolation::Identity(i, j));
                }
                if d.is_negative() {
                    out.push(MetricViolation::Negative(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.dist[i][k] > &self.dist[i][j] + &self.dist[j][k] {
                        out.push(MetricViolation::Triangle(i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Fails with the first violated axiom.
    pub fn validate(&self) -> Result<(), ContError> {
        match self.violations().into_iter().next() {
            Some(v) => Err(ContError::Metric(v)),
            None => Ok(()),
        }
    }

    /// Least positive distance between two points of `D`.
    pub fn min_dense_gap(&self) -> Option<BigRational> {
        let d = self.dense_enumeration();
        let mut best: Option<BigRational> = None;
        for (a, &i) in d.iter().enumerate() {
            for &j in &d[a + 1..] {
                let x = &self.dist[i][j];
                if x.is_positive() && best.as_ref().is_none_or(|b| x < b) {
                    best = Some(x.clone());
                }
            }
        }
        best
    }
}

/// `p/q`, with the denominator always written.
pub fn fmt_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for MetricSpaceDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "points {}", self.len())?;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                writeln!(f, "dist {i} {j} {}", fmt_ratio(&self.dist[i][j]))?;
            }
        }
        let order: Vec<String> = self.order.iter().map(usize::to_string).collect();
        write!(f, "order {}", order.join(" "))
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> ContError {
    ContError::Parse { line, msg: msg.into() }
}

fn parse_index(tok: Option<&str>, line: usize, n: usize) -> Result<usize, ContError> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing point index"))?;
    let i: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad point index {tok:?}")))?;
    if i >= n {
        return Err(parse_err(line, format!("point {i} out of range")));
    }
    Ok(i)
}

fn parse_ratio(tok: &str, line: usize) -> Result<BigRational, ContError> {
    let (p, q) = match tok.split_once('/') {
        Some((p, q)) => (p, q),
        None => (tok, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| parse_err(line, format!("bad rational {tok:?}")))?;
    let q: BigInt = q.parse().map_err(|_| parse_err(line, format!("bad rational {tok:?}")))?;
    if q.is_zero() {
        return Err(parse_err(line, "zero denominator"));
    }
    Ok(BigRational::new(p, q))
}

/// Reads the line format
///
/// ```text
/// points 3
/// dist 0 1 1/2
/// dist 0 2 1/1
/// dist 1 2 1/2
/// order 2 0 1
/// ```
///
/// `#` starts a comment. Each unordered pair needs a distance; giving both
/// directions is allowed and is how asymmetric tables are expressed. The
/// metric axioms are not checked here.
impl FromStr for MetricSpaceDesc {
    type Err = ContError;

    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let mut n: Option<usize> = None;
        let mut table: Vec<Vec<Option<BigRational>>> = Vec::new();
        let mut order: Option<Vec<usize>> = None;
        for (ln, raw) in src.lines().enumerate() {
            let ln = ln + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let mut toks = text.split_whitespace();
            match toks.next() {
                Some("points") => {
                    if n.is_some() {
                        return Err(parse_err(ln, "duplicate points header"));
                    }
                    let k: usize = toks
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| parse_err(ln, "points needs a count"))?;
                    n = Some(k);
                    table = vec![vec![None; k]; k];
                    for (i, row) in table.iter_mut().enumerate() {
                        row[i] = Some(BigRational::zero());
                    }
                }
                Some("dist") => {
                    let k = n.ok_or_else(|| parse_err(ln, "dist before points header"))?;
                    let i = parse_index(toks.next(), ln, k)?;
                    let j = parse_index(toks.next(), ln, k)?;
                    let v = parse_ratio(toks.next().ok_or_else(|| parse_err(ln, "dist needs a value"))?, ln)?;
                    table[i][j] = Some(v);
                }
                Some("order") => {
                    let k = n.ok_or_else(|| parse_err(ln, "order before points header"))?;
                    if order.is_some() {
                        return Err(parse_err(ln, "duplicate order line"));
                    }
                    let list = toks
                        .by_ref()
                        .map(|t| parse_index(Some(t), ln, k))
                        .collect::<Result<Vec<_>, _>>()?;
                    order = Some(list);
                    continue;
                }
                Some(other) => return Err(parse_err(ln, format!("unknown directive {other:?}"))),
                None => unreachable!("blank lines are skipped"),
            }
            if toks.next().is_some() {
                return Err(parse_err(ln, "trailing tokens"));
            }
        }
        let n = n.ok_or_else(|| parse_err(0, "missing points header"))?;
        let order = order.ok_or_else(|| parse_err(0, "missing order line"))?;
        let mut dist = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                dist[i][j] = match (&table[i][j], &table[j][i]) {
                    (Some(v), _) | (None, Some(v)) => v.clone(),
                    (None, None) => return Err(ContError::MissingDistance(i.min(j), i.max(j))),
                };
            }
        }
        MetricSpaceDesc::new(dist, order)
    }
}
