//! Text formats: truth-table files, bit-string hex, and `p/q` rationals.
//!
//! A truth-table file is two lines:
//!
//! ```text
//! n=2
//! 1
//! ```
//!
//! The second line packs the stored bits `b(0) b(1) ... b(2^n - 1)` into
//! `ceil(2^n / 4)` hex digits, most-significant bit first within each digit,
//! padding the final digit with zero bits.

use num_bigint::BigInt;

use crate::boolfn::{BooleanFunction, Sign, MAX_FUNCTION_ARITY};
use crate::error::{Error, Result};
use crate::Rational;

/// Packs a bit sequence into hex, MSB first within each digit.
pub fn bits_to_hex(bits: impl IntoIterator<Item = bool>) -> String {
    let mut out = String::new();
    let mut digit = 0u8;
    let mut filled = 0;
    for b in bits {
        digit = (digit << 1) | u8::from(b);
        filled += 1;
        if filled == 4 {
            out.push(char::from_digit(u32::from(digit), 16).expect("nibble"));
            digit = 0;
            filled = 0;
        }
    }
    if filled > 0 {
        digit <<= 4 - filled;
        out.push(char::from_digit(u32::from(digit), 16).expect("nibble"));
    }
    out
}

/// Hex digits of a truth table, without the header line.
pub fn table_hex(f: &BooleanFunction) -> String {
    bits_to_hex((0..f.len()).map(|x| f.bit(x)))
}

/// Serializes `f` in the truth-table file format.
pub fn write_truth_table(f: &BooleanFunction) -> String {
    format!("n={}\n{}\n", f.arity(), table_hex(f))
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses the truth-table file format.
pub fn read_truth_table(text: &str) -> Result<BooleanFunction> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "missing header line `n=<k>`"))?
        .trim_end();
    let k = header
        .strip_prefix("n=")
        .ok_or_else(|| parse_err(1, 1, "expected `n=<k>`"))?;
    let n: usize = k
        .parse()
        .map_err(|_| parse_err(1, 3, format!("invalid arity {k:?}")))?;
    if n > MAX_FUNCTION_ARITY {
        return Err(parse_err(
            1,
            3,
            format!("arity {n} exceeds the maximum {MAX_FUNCTION_ARITY}"),
        ));
    }
    let hex = lines
        .next()
        .ok_or_else(|| parse_err(2, 1, "missing hex table line"))?
        .trim_end();
    if let Some((i, extra)) = lines.enumerate().find(|(_, l)| !l.trim().is_empty()) {
        return Err(parse_err(3 + i, 1, format!("unexpected content {extra:?}")));
    }
    parse_table_hex(n, hex, 2)
}

/// Parses the hex table line for arity `n`; `line` is used in error positions.
pub fn parse_table_hex(n: usize, hex: &str, line: usize) -> Result<BooleanFunction> {
    let len = 1usize << n;
    let digits = len.div_ceil(4);
    let found = hex.chars().count();
    if found != digits {
        return Err(parse_err(
            line,
            found.min(digits) + 1,
            format!("expected {digits} hex digits for n={n}, found {found}"),
        ));
    }
    let mut f = BooleanFunction::constant(n, Sign::Plus)?;
    for (col, ch) in hex.chars().enumerate() {
        let d = ch
            .to_digit(16)
            .ok_or_else(|| parse_err(line, col + 1, format!("invalid hex digit {ch:?}")))?;
        for k in 0..4 {
            let x = col * 4 + k;
            let bit = (d >> (3 - k)) & 1 == 1;
            if x < len {
                f.set(x, Sign::from_bit(bit));
            } else if bit {
                return Err(parse_err(line, col + 1, "nonzero padding bit"));
            }
        }
    }
    Ok(f)
}

/// Parses `p/q` or `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidParameter(format!("expected a rational p/q, got {s:?}"));
    let (p, q) = match s.trim().split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{generate, FunctionFamily};
    use proptest::prelude::*;

    #[test]
    fn and2_file() {
        let and2 = BooleanFunction::from_signs(2, &[1, 1, 1, -1]).unwrap();
        assert_eq!(write_truth_table(&and2), "n=2\n1\n");
        let chi = generate(&FunctionFamily::Parity(1), 3, 0).unwrap();
        // bits 0,1,0,1,0,1,0,1
        assert_eq!(write_truth_table(&chi), "n=3\n55\n");
        let one_var = generate(&FunctionFamily::Parity(1), 1, 0).unwrap();
        assert_eq!(write_truth_table(&one_var), "n=1\n4\n");
    }

    #[test]
    fn parse_errors_have_positions() {
        let cases = [
            ("m=2\n1\n", 1, 1),
            ("n=x\n1\n", 1, 3),
            ("n=2\n", 2, 1),
            ("n=2\n12\n", 2, 2),
            ("n=3\n5g\n", 2, 2),
            ("n=1\n5\n", 2, 1),
            ("n=2\n1\nextra\n", 3, 1),
        ];
        for (text, line, column) in cases {
            match read_truth_table(text) {
                Err(Error::Parse {
                    line: l, column: c, ..
                }) => assert_eq!((l, c), (line, column), "{text:?}"),
                other => panic!("{text:?}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/4").unwrap(), Rational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("2").unwrap(), Rational::from_integer(2.into()));
        assert!(parse_rational("0.25").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    proptest! {
        #[test]
        fn truth_table_roundtrip(n in 0usize..9, seed: u64) {
            let f = generate(&FunctionFamily::UniformRandom, n, seed).unwrap();
            prop_assert_eq!(read_truth_table(&write_truth_table(&f)).unwrap(), f);
        }
    }
}
