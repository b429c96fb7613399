//! Text forms of set expressions and certificates.
//!
//! ```text
//! set  := "empty" | "rows(" nat ")" | "ap(" nat "," nat ")"
//!       | "union(" set "," set ")" | "inter(" set "," set ")"
//!       | "diff(" set "," set ")" | "piece(" set "," nat ")"
//! cert := "cert{m=" nat "," "lower=" set "," "upper=" set "}"
//! ```
//!
//! Whitespace is ignored. Expressions are kept exactly as written.

use num_bigint::BigUint;

use super::cert::OrderCertificate;
use super::set::{Expr, LazySet, SetError};

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    cap: usize,
}

impl<'a> Cursor<'a> {
    fn new(compact: &'a [u8], cap: usize) -> Self {
        Cursor {
            src: compact,
            pos: 0,
            cap,
        }
    }

    fn err(&self, msg: impl Into<String>) -> SetError {
        SetError::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.src[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), SetError> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{lit}'")))
        }
    }

    fn nat(&mut self) -> Result<BigUint, SetError> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a natural number"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit string"))
    }

    fn small(&mut self) -> Result<u64, SetError> {
        let n = self.nat()?;
        u64::try_from(n).map_err(|_| self.err("index does not fit in 64 bits"))
    }

    fn set(&mut self, depth: usize) -> Result<LazySet, SetError> {
        if depth > self.cap {
            return Err(SetError::DepthExceeded {
                depth,
                cap: self.cap,
            });
        }
        if self.eat("empty") {
            return Ok(LazySet::from_expr(Expr::Empty));
        }
        if self.eat("rows(") {
            let k = self.small()?;
            self.expect(")")?;
            return Ok(LazySet::from_expr(Expr::Rows(k)));
        }
        if self.eat("ap(") {
            let step = self.nat()?;
            self.expect(",")?;
            let offset = self.nat()?;
            self.expect(")")?;
            return LazySet::ap(step, offset);
        }
        if self.eat("piece(") {
            let parent = self.set(depth + 1)?;
            self.expect(",")?;
            let row = self.small()?;
            self.expect(")")?;
            return Ok(LazySet::from_expr(Expr::Piece(parent, row)));
        }
        for (kw, tag) in [("union(", 0), ("inter(", 1), ("diff(", 2)] {
            if self.eat(kw) {
                let a = self.set(depth + 1)?;
                self.expect(",")?;
                let b = self.set(depth + 1)?;
                self.expect(")")?;
                let expr = match tag {
                    0 => Expr::Union(a, b),
                    1 => Expr::Inter(a, b),
                    _ => Expr::Diff(a, b),
                };
                return Ok(LazySet::from_expr(expr));
            }
        }
        Err(self.err("expected a set expression"))
    }

    fn finish(&self) -> Result<(), SetError> {
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(self.err("trailing input"))
        }
    }
}

fn compact(src: &str) -> Vec<u8> {
    src.bytes().filter(|b| !b.is_ascii_whitespace()).collect()
}

pub(crate) fn parse_set(src: &str, cap: usize) -> Result<LazySet, SetError> {
    let bytes = compact(src);
    let mut c = Cursor::new(&bytes, cap);
    let set = c.set(1)?;
    c.finish()?;
    Ok(set)
}

pub(crate) fn parse_cert(src: &str, cap: usize) -> Result<OrderCertificate, SetError> {
    let bytes = compact(src);
    let mut c = Cursor::new(&bytes, cap);
    c.expect("cert{m=")?;
    let m = c.nat()?;
    c.expect(",lower=")?;
    let lower = c.set(1)?;
    c.expect(",upper=")?;
    let upper = c.set(1)?;
    c.expect("}")?;
    c.finish()?;
    Ok(OrderCertificate::from_bounds(lower, upper, m))
}

/// Splits `a,b` at the top-level comma (outside parentheses).
pub fn split_pair(src: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in src.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((&src[..i], &src[i + 1..])),
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_constructor_parses() {
        for src in [
            "empty",
            "rows(4)",
            "ap(3,1)",
            "union(rows(1),ap(4,3))",
            "inter(rows(2),empty)",
            "diff(ap(1,0),ap(1,5))",
            "piece(rows(1),7)",
        ] {
            let set = parse_set(src, 100).unwrap();
            assert_eq!(set.to_string(), src);
        }
        assert_eq!(
            parse_set(" union( rows(1) ,\n ap(4, 3) ) ", 100).unwrap().to_string(),
            "union(rows(1),ap(4,3))"
        );
    }

    #[test]
    fn malformed_sets_are_rejected() {
        for src in ["", "rows()", "ap(0,1)", "union(rows(1))", "piece(rows(1),x)", "rows(1))", "set"] {
            assert!(parse_set(src, 100).is_err(), "{src:?}");
        }
    }

    #[test]
    fn depth_cap_applies_while_parsing() {
        let mut src = "empty".to_string();
        for _ in 0..50 {
            src = format!("piece({src},0)");
        }
        assert!(parse_set(&src, 60).is_ok());
        assert!(matches!(
            parse_set(&src, 20),
            Err(SetError::DepthExceeded { cap: 20, .. })
        ));
    }

    #[test]
    fn cert_roundtrip() {
        let src = "cert{m=4, lower=ap(4,0), upper=ap(2,0)}";
        let c = parse_cert(src, 100).unwrap();
        assert_eq!(c.to_string(), src);
        assert!(parse_cert("cert{m=4,lower=ap(4,0)}", 100).is_err());
    }

    #[test]
    fn top_level_split() {
        assert_eq!(split_pair("empty,rows(1)"), Some(("empty", "rows(1)")));
        assert_eq!(split_pair("ap(4,0),ap(2,0)"), Some(("ap(4,0)", "ap(2,0)")));
        assert_eq!(split_pair("ap(4,0)"), None);
    }
}
