//! Fixed inputs shared by the benchmarks.

use fusible_core::{parse_rational, Rational};

/// Table rows cheap enough to time repeatedly.
pub const ERICKSON_ROWS: u32 = 4;

/// Enumeration depth for the level benchmark.
pub const LEVEL_DEPTH: u32 = 10;

pub fn q(s: &str) -> Rational {
    parse_rational(s).expect("benchmark constant")
}

/// Operand pairs with mixed denominators, all within fusing distance.
pub fn operand_pairs() -> Vec<(Rational, Rational)> {
    (1..64)
        .map(|i| {
            let a = Rational::frac(i, 64);
            let b = &a + &Rational::frac(2 * i + 1, 1 << 12);
            (a, b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use fusible_core::fuse;

    #[test]
    fn pairs_fuse() {
        for (a, b) in operand_pairs() {
            fuse(&a, &b).unwrap();
        }
    }
}
