use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::nets::{active_center_in, build_nets_unchecked, bump, pow2, radius, separation, SeparatedNets};
use super::space::{fmt_ratio, MetricSpaceDesc};
use super::ContError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Closed-form sum of the whole series.
    Exact,
    /// Partial sum over levels `< N`, with tail bound `2^(1-N)`.
    Truncated(u32),
}

/// A value of `f_d` at a point, with a bound on the omitted tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContValue {
    pub value: BigRational,
    pub tail: BigRational,
}

/// Which center is active at a point on each level, and its bump there.
#[derive(Debug, Clone)]
struct Profile {
    levels: Vec<Option<(usize, BigRational)>>,
    /// Exact value of the tail past `levels` for `d` above this point.
    tail_above: BigRational,
}

/// The family `{f_d : d ∈ D}`, with every exact value on the space
/// precomputed.
#[derive(Debug, Clone)]
pub struct ContChain {
    ms: MetricSpaceDesc,
    nets: SeparatedNets,
    stable: u32,
    profiles: Vec<Profile>,
    /// `table[r][x]` is `f_d(x)` for the `d` of rank `r`.
    table: Vec<Vec<BigRational>>,
}

/// Least `n` with `2^(2-n) <= gap`: from there on every net is all of `D`.
fn stable_level(gap: Option<&BigRational>) -> u32 {
    let Some(gap) = gap else { return 0 };
    let mut n = 0;
    while &separation(n) > gap {
        n += 1;
    }
    n
}

/// Least `n >= from` with `2^-n <= gap`.
fn quiet_level(gap: &BigRational, from: u32) -> u32 {
    let mut n = from;
    while &radius(n) > gap {
        n += 1;
    }
    n
}

pub fn build_chain(ms: &MetricSpaceDesc) -> Result<ContChain, ContError> {
    ms.validate()?;
    let dense = ms.dense_enumeration();
    let stable = stable_level(ms.min_dense_gap().as_ref());
    // points outside D go quiet once the radius drops below their distance to D
    let horizon = (0..ms.len())
        .filter(|&x| !ms.in_dense(x))
        .filter_map(|x| dense.iter().map(|&c| ms.dist(x, c)).min().map(|g| quiet_level(g, stable)))
        .max()
        .unwrap_or(stable)
        .max(stable);
    let nets = build_nets_unchecked(ms, horizon);
    let mut profiles = Vec::with_capacity(ms.len());
    for x in 0..ms.len() {
        let top = if ms.in_dense(x) {
            stable
        } else {
            dense
                .iter()
                .map(|&c| ms.dist(x, c))
                .min()
                .map_or(0, |g| quiet_level(g, stable))
        };
        let mut levels = Vec::with_capacity(top as usize);
        for n in 0..top {
            let net = nets.level(n).expect("nets reach every point's horizon");
            levels.push(active_center_in(ms, net, n, x)?.map(|c| (c, bump(ms, n, c, x))));
        }
        let tail_above = if ms.in_dense(x) {
            pow2(1 - i64::from(stable))
        } else {
            BigRational::zero()
        };
        profiles.push(Profile { levels, tail_above });
    }
    let mut chain = ContChain {
        ms: ms.clone(),
        nets,
        stable,
        profiles,
        table: Vec::new(),
    };
    chain.table = ms
        .order()
        .iter()
        .map(|&d| (0..ms.len()).map(|x| chain.exact(d, x)).collect())
        .collect();
    Ok(chain)
}

impl ContChain {
    pub fn space(&self) -> &MetricSpaceDesc {
        &self.ms
    }

    pub fn nets(&self) -> &SeparatedNets {
        &self.nets
    }

    /// First level from which `D_n = D`.
    pub fn stable_level(&self) -> u32 {
        self.stable
    }

    fn exact(&self, d: usize, x: usize) -> BigRational {
        let p = &self.profiles[x];
        let mut sum = BigRational::zero();
        for (c, v) in p.levels.iter().flatten() {
            if self.ms.precedes(*c, d) {
                sum += v;
            }
        }
        if self.ms.precedes(x, d) {
            sum += &p.tail_above;
        }
        sum
    }

    /// `D_n`, including levels past the built ones, where it is all of `D`.
    fn net(&self, n: u32) -> Vec<usize> {
        match self.nets.level(n) {
            Some(l) => l.to_vec(),
            None => self.ms.dense_enumeration(),
        }
    }

    pub fn eval(&self, d: usize, x: usize, mode: EvalMode) -> Result<ContValue, ContError> {
        let r = self.ms.rank(d).ok_or(ContError::NotDense(d))?;
        if x >= self.ms.len() {
            return Err(ContError::UnknownPoint(x));
        }
        match mode {
            EvalMode::Exact => Ok(ContValue {
                value: self.table[r][x].clone(),
                tail: BigRational::zero(),
            }),
            EvalMode::Truncated(n) => {
                let mut value = BigRational::zero();
                for k in 0..n {
                    if let Some(c) = active_center_in(&self.ms, &self.net(k), k, x)? {
                        if self.ms.precedes(c, d) {
                            value += bump(&self.ms, k, c, x);
                        }
                    }
                }
                Ok(ContValue {
                    value,
                    tail: pow2(1 - i64::from(n)),
                })
            }
        }
    }

    /// Exact values of the functions in `≺`-order: `values()[r][x]`.
    pub fn values(&self) -> &[Vec<BigRational>] {
        &self.table
    }

    /// Checks every pair `d ≺ e`: `f_d <= f_e` at all points, `f_d(d) < f_e(d)`,
    /// and all values lie in `[0, 2]`.
    pub fn check_all(&self) -> PairCheck {
        let order = self.ms.order();
        let two = pow2(1);
        let mut check = PairCheck::default();
        for (r, &d) in order.iter().enumerate() {
            if let Some(x) = (0..self.ms.len()).find(|&x| self.table[r][x].is_negative() || self.table[r][x] > two) {
                check.failures.push(format!("FAIL range {d} at {x}"));
            }
            for (s, &e) in order.iter().enumerate().skip(r + 1) {
                check.pairs += 1;
                let (fd, fe) = (&self.table[r], &self.table[s]);
                if let Some(x) = (0..self.ms.len()).find(|&x| fd[x] > fe[x]) {
                    check.failures.push(format!("FAIL pair {d} {e} at {x}"));
                } else if fd[d] >= fe[d] {
                    check.failures.push(format!("FAIL strict {d} {e}"));
                }
            }
        }
        check
    }

    /// Witness points for consecutive functions in `≺`-order, sampled from `D`.
    pub fn witnesses(&self) -> Result<Witnesses, ContError> {
        witness_points(&self.table, &self.ms.dense_enumeration())
    }
}

/// Result of [`ContChain::check_all`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairCheck {
    pub pairs: usize,
    pub failures: Vec<String>,
}

impl PairCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for PairCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.failures {
            writeln!(f, "{line}")?;
        }
        write!(f, "CHECKED {} FAILED {}", self.pairs, self.failures.len())
    }
}

pub fn eval_f(chain: &ContChain, d: usize, x: usize, mode: EvalMode) -> Result<ContValue, ContError> {
    chain.eval(d, x, mode)
}

/// `f <d> at <x> = <p>/<q> (+/- <tail>)`.
pub fn format_eval(d: usize, x: usize, v: &ContValue) -> String {
    let tail = if v.tail.is_zero() { "0".to_string() } else { fmt_ratio(&v.tail) };
    format!("f {d} at {x} = {} (+/- {tail})", fmt_ratio(&v.value))
}

/// `d_α` for each consecutive pair, and the fibers `E_d = {α : d_α = d}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witnesses {
    pub points: Vec<usize>,
    pub fibers: BTreeMap<usize, Vec<usize>>,
}

/// For a chain given by its values (`values[α][p]`), picks for every `α` the
/// first sample point `p` with `f_α(p) < f_(α+1)(p)`.
pub fn witness_points(values: &[Vec<BigRational>], sample: &[usize]) -> Result<Witnesses, ContError> {
    let mut points = Vec::new();
    let mut missing = Vec::new();
    for (a, w) in values.windows(2).enumerate() {
        match sample.iter().find(|&&p| w[0][p] < w[1][p]) {
            Some(&p) => points.push(p),
            None => missing.push(a),
        }
    }
    if !missing.is_empty() {
        return Err(ContError::NoWitness(missing));
    }
    let mut fibers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (a, &p) in points.iter().enumerate() {
        fibers.entry(p).or_default().push(a);
    }
    Ok(Witnesses { points, fibers })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn two_points() -> ContChain {
        build_chain(&MetricSpaceDesc::from_points_on_line(&[q(0, 1), q(1, 1)], vec![0, 1]).unwrap()).unwrap()
    }

    #[test]
    fn two_point_values() {
        let c = two_points();
        let (a, b) = (0, 1);
        for x in [a, b] {
            assert_eq!(c.eval(a, x, EvalMode::Exact).unwrap().value, q(0, 1));
        }
        assert_eq!(c.eval(b, a, EvalMode::Exact).unwrap().value, q(2, 1));
        assert_eq!(c.eval(b, b, EvalMode::Exact).unwrap().value, q(0, 1));
        assert_eq!(
            format_eval(b, a, &c.eval(b, a, EvalMode::Exact).unwrap()),
            "f 1 at 0 = 2/1 (+/- 0)"
        );
    }

    #[test]
    fn truncation_is_within_its_bound() {
        let c = two_points();
        for n in 0..12 {
            let t = c.eval(1, 0, EvalMode::Truncated(n)).unwrap();
            let gap = q(2, 1) - &t.value;
            assert!(gap >= q(0, 1) && gap <= t.tail, "N = {n}");
        }
        assert_eq!(
            format_eval(1, 0, &c.eval(1, 0, EvalMode::Truncated(3)).unwrap()),
            "f 1 at 0 = 7/4 (+/- 1/4)"
        );
    }

    #[test]
    fn points_outside_the_dense_set() {
        // D = {0, 1}; point 2 sits at 1/3 from 0
        let ms = MetricSpaceDesc::from_points_on_line(&[q(0, 1), q(1, 1), q(1, 3)], vec![0, 1]).unwrap();
        let c = build_chain(&ms).unwrap();
        // f_1(2) = sum over n of (2^-n - 1/3) while positive: 2/3 + 1/6
        assert_eq!(c.eval(1, 2, EvalMode::Exact).unwrap().value, q(5, 6));
        assert_eq!(c.eval(1, 2, EvalMode::Truncated(20)).unwrap().value, q(5, 6));
        assert!(matches!(c.eval(2, 0, EvalMode::Exact), Err(ContError::NotDense(2))));
    }

    #[test]
    fn singleton_chain() {
        let ms = MetricSpaceDesc::from_points_on_line(&[q(3, 1)], vec![0]).unwrap();
        let c = build_chain(&ms).unwrap();
        assert_eq!(c.check_all().to_string(), "CHECKED 0 FAILED 0");
        assert_eq!(c.witnesses().unwrap().points, Vec::<usize>::new());
    }

    #[test]
    fn permuted_order_on_twenty_points() {
        let xs: Vec<BigRational> = (0..20).map(|k| q(k * k % 41, 7)).collect();
        let order: Vec<usize> = (0..20).map(|k| (k * 7) % 20).collect();
        let ms = MetricSpaceDesc::from_points_on_line(&xs, order.clone()).unwrap();
        let c = build_chain(&ms).unwrap();
        let check = c.check_all();
        assert_eq!(check.to_string(), "CHECKED 190 FAILED 0");
        let w = c.witnesses().unwrap();
        assert_eq!(w.points.len(), 19);
        // f_α(d_α) < f_(α+1)(d_α) is realized at d_α = the α-th point itself
        assert_eq!(w.points, order[..19].to_vec());
    }

    #[test]
    fn constant_chain_has_no_witness() {
        let row = vec![q(1, 2), q(1, 1)];
        assert_eq!(
            witness_points(&[row.clone(), row], &[0, 1]).unwrap_err(),
            ContError::NoWitness(vec![0])
        );
    }

    #[test]
    fn fibers_group_indices() {
        let v = vec![vec![q(0, 1), q(0, 1)], vec![q(1, 1), q(0, 1)], vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(1, 1)]];
        let w = witness_points(&v, &[0, 1]).unwrap();
        assert_eq!(w.points, vec![0, 1, 0]);
        assert_eq!(w.fibers[&0], vec![0, 2]);
        assert_eq!(w.fibers[&1], vec![1]);
    }
}
