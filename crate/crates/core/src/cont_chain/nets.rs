use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::space::MetricSpaceDesc;
use super::ContError;

/// `2^e` for possibly negative `e`.
pub fn pow2(e: i64) -> BigRational {
    let m = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        BigRational::from_integer(m)
    } else {
        BigRational::new(BigInt::one(), m)
    }
}

/// Bump radius at level `n`, `2^-n`.
pub fn radius(n: u32) -> BigRational {
    pow2(-i64::from(n))
}

/// Net separation at level `n`, `2^(2-n)`.
pub fn separation(n: u32) -> BigRational {
    pow2(2 - i64::from(n))
}

/// `D_n` for `n < levels`: each a maximal `2^(2-n)`-separated subset of `D`,
/// chosen greedily in enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatedNets {
    levels: Vec<Vec<usize>>,
}

pub fn build_nets(ms: &MetricSpaceDesc, levels: u32) -> Result<SeparatedNets, ContError> {
    ms.validate()?;
    Ok(build_nets_unchecked(ms, levels))
}

pub(crate) fn build_nets_unchecked(ms: &MetricSpaceDesc, levels: u32) -> SeparatedNets {
    let d = ms.dense_enumeration();
    let levels = (0..levels)
        .map(|n| {
            let sep = separation(n);
            let mut net: Vec<usize> = Vec::new();
            for &p in &d {
                if net.iter().all(|&c| ms.dist(p, c) >= &sep) {
                    net.push(p);
                }
            }
            net
        })
        .collect();
    SeparatedNets { levels }
}

impl SeparatedNets {
    pub fn levels(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn level(&self, n: u32) -> Option<&[usize]> {
        self.levels.get(n as usize).map(Vec::as_slice)
    }

    pub fn contains(&self, n: u32, p: usize) -> bool {
        self.level(n).is_some_and(|l| l.contains(&p))
    }

    /// Checks separation and maximality at every built level; returns the
    /// first failing level.
    pub fn check(&self, ms: &MetricSpaceDesc) -> Result<(), u32> {
        let d = ms.dense_enumeration();
        for n in 0..self.levels() {
            let sep = separation(n);
            let net = self.level(n).expect("built level");
            for (a, &c) in net.iter().enumerate() {
                if net[a + 1..].iter().any(|&e| ms.dist(c, e) < &sep) {
                    return Err(n);
                }
            }
            if d.iter().any(|&p| net.iter().all(|&c| ms.dist(p, c) >= &sep) && !net.contains(&p)) {
                return Err(n);
            }
        }
        Ok(())
    }

    /// The only center of `D_n` within `2^-n` of `x`, if any.
    pub fn active_center(&self, ms: &MetricSpaceDesc, n: u32, x: usize) -> Result<Option<usize>, ContError> {
        let net = self.level(n).ok_or(ContError::LevelNotBuilt(n))?;
        active_center_in(ms, net, n, x)
    }
}

pub(crate) fn active_center_in(
    ms: &MetricSpaceDesc,
    net: &[usize],
    n: u32,
    x: usize,
) -> Result<Option<usize>, ContError> {
    let r = radius(n);
    let mut found = None;
    for &c in net {
        if ms.dist(x, c) < &r {
            if let Some(first) = found {
                return Err(ContError::Locality {
                    level: n,
                    point: x,
                    centers: (first, c),
                });
            }
            found = Some(c);
        }
    }
    Ok(found)
}

/// `max(0, 2^-n - dist(x, c))`, for `c ∈ D_n`.
pub fn phi(nets: &SeparatedNets, ms: &MetricSpaceDesc, n: u32, c: usize, x: usize) -> Result<BigRational, ContError> {
    if !nets.contains(n, c) {
        return Err(ContError::NotInNet { level: n, point: c });
    }
    Ok(bump(ms, n, c, x))
}

pub(crate) fn bump(ms: &MetricSpaceDesc, n: u32, c: usize, x: usize) -> BigRational {
    let v = radius(n) - ms.dist(x, c);
    if v > BigRational::zero() {
        v
    } else {
        BigRational::zero()
    }
}

/// `ψ^n_d(x)`: the bump of the unique active center `c` when `c ≺ d`, else 0.
pub fn psi(nets: &SeparatedNets, ms: &MetricSpaceDesc, n: u32, d: usize, x: usize) -> Result<BigRational, ContError> {
    Ok(match nets.active_center(ms, n, x)? {
        Some(c) if ms.precedes(c, d) => bump(ms, n, c, x),
        _ => BigRational::zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn two_points() -> MetricSpaceDesc {
        MetricSpaceDesc::from_points_on_line(&[q(0, 1), q(1, 1)], vec![0, 1]).unwrap()
    }

    #[test]
    fn two_point_nets() {
        let ms = two_points();
        let nets = build_nets(&ms, 4).unwrap();
        assert_eq!(nets.level(0).unwrap(), &[0]);
        assert_eq!(nets.level(1).unwrap(), &[0]);
        assert_eq!(nets.level(2).unwrap(), &[0, 1]);
        assert_eq!(nets.level(3).unwrap(), &[0, 1]);
        assert_eq!(nets.check(&ms), Ok(()));
    }

    #[test]
    fn singleton_net_is_constant() {
        let ms = MetricSpaceDesc::from_points_on_line(&[q(5, 1)], vec![0]).unwrap();
        let nets = build_nets(&ms, 6).unwrap();
        assert!((0..6).all(|n| nets.level(n).unwrap() == [0]));
    }

    #[test]
    fn bump_values() {
        let ms = MetricSpaceDesc::from_points_on_line(&[q(0, 1), q(1, 8), q(5, 1)], vec![0, 1, 2]).unwrap();
        let nets = build_nets(&ms, 3).unwrap();
        assert_eq!(phi(&nets, &ms, 0, 0, 0).unwrap(), q(1, 1));
        assert_eq!(phi(&nets, &ms, 2, 0, 1).unwrap(), q(1, 8));
        assert_eq!(phi(&nets, &ms, 0, 0, 2).unwrap(), q(0, 1));
        assert!(matches!(phi(&nets, &ms, 0, 1, 0), Err(ContError::NotInNet { .. })));
    }

    #[test]
    fn psi_is_strict_at_net_points() {
        let ms = two_points();
        let nets = build_nets(&ms, 4).unwrap();
        for n in 2..4 {
            assert_eq!(psi(&nets, &ms, n, 0, 0).unwrap(), q(0, 1));
            assert_eq!(psi(&nets, &ms, n, 1, 0).unwrap(), radius(n));
        }
        // no center within 1 of a point 10 away
        let far = MetricSpaceDesc::from_points_on_line(&[q(0, 1), q(10, 1)], vec![0]).unwrap();
        let nets = build_nets(&far, 1).unwrap();
        assert_eq!(psi(&nets, &far, 0, 0, 1).unwrap(), q(0, 1));
    }

    #[test]
    fn two_centers_in_range_are_reported() {
        // a hand-made net that is not separated
        let ms = two_points();
        let bad = SeparatedNets { levels: vec![vec![0, 1]] };
        let mid = MetricSpaceDesc::from_points_on_line(&[q(0, 1), q(1, 1), q(1, 2)], vec![0, 1]).unwrap();
        assert!(matches!(
            bad.active_center(&mid, 0, 2),
            Err(ContError::Locality { level: 0, point: 2, centers: (0, 1) })
        ));
        assert_eq!(bad.check(&ms), Err(0));
    }
}
