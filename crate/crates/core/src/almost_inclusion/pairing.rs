//! The pairing bijection `<i,j> = 2^i (2j+1) - 1` between `w x w` and `w`.
//!
//! Row `i` is `{<i,j> : j in w}`; rows partition `w`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub fn pair(row: u64, col: &BigUint) -> BigUint {
    let odd: BigUint = (col << 1usize) + 1u32;
    (odd << to_shift(row)) - 1u32
}

fn to_shift(row: u64) -> usize {
    usize::try_from(row).expect("row index fits in usize")
}

pub fn unpair(n: &BigUint) -> (u64, BigUint) {
    let v = n + 1u32;
    let row = v.trailing_zeros().expect("n + 1 is positive");
    let col = (v >> row as usize) >> 1usize;
    (row, col)
}

/// Row of `n` under the pairing, i.e. the 2-adic valuation of `n + 1`.
pub fn row_of(n: &BigUint) -> u64 {
    (n + 1u32).trailing_zeros().expect("n + 1 is positive")
}

/// Number of `t < r` lying in row `i`.
pub fn row_count_below(row: u64, r: &BigUint) -> BigUint {
    let s = to_shift(row);
    (r >> s) - (r >> (s + 1))
}

/// Number of `t < r` lying in rows `0..k`.
pub fn rows_count_below(k: u64, r: &BigUint) -> BigUint {
    if k == 0 {
        return BigUint::zero();
    }
    r - (r >> to_shift(k))
}

/// The `idx`-th element (0-based, increasing) of rows `0..k`, for `k >= 1`.
pub fn rows_nth(k: u64, idx: &BigUint) -> BigUint {
    debug_assert!(k >= 1);
    // among v = t + 1, exactly the v not divisible by 2^k are members
    let block = (BigUint::one() << to_shift(k)) - 1u32;
    let q = idx / &block;
    let r = idx % &block;
    let v = (q << to_shift(k)) + r + 1u32;
    v - 1u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_matches_formula() {
        assert_eq!(pair(0, &BigUint::from(0u32)), BigUint::from(0u32));
        assert_eq!(pair(0, &BigUint::from(3u32)), BigUint::from(6u32));
        assert_eq!(pair(1, &BigUint::from(2u32)), BigUint::from(9u32));
        assert_eq!(pair(3, &BigUint::from(1u32)), BigUint::from(23u32));
    }

    #[test]
    fn bijection_on_initial_segment() {
        let bound = 1u32 << 14;
        let mut seen = vec![false; bound as usize + 1];
        for n in 0..=bound {
            let n = BigUint::from(n);
            let (i, j) = unpair(&n);
            assert_eq!(pair(i, &j), n);
            assert_eq!(row_of(&n), i);
        }
        // every (i, j) with value in range is hit exactly once
        for i in 0..16u64 {
            for j in 0..=bound {
                let v = pair(i, &BigUint::from(j));
                if v > BigUint::from(bound) {
                    break;
                }
                let idx: usize = v.try_into().unwrap();
                assert!(!seen[idx], "collision at {idx}");
                seen[idx] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn counts_agree_with_scan() {
        for k in 0..5u64 {
            let mut members = 0u32;
            let mut row_members = 0u32;
            for t in 0..300u32 {
                let r = BigUint::from(t);
                assert_eq!(rows_count_below(k, &r), BigUint::from(members));
                assert_eq!(row_count_below(k, &r), BigUint::from(row_members));
                if k > 0 && row_of(&r) < k {
                    assert_eq!(rows_nth(k, &BigUint::from(members)), r);
                    members += 1;
                }
                if row_of(&r) == k {
                    row_members += 1;
                }
            }
        }
    }
}
