//! Census of kneading words of a given length: a divisor-sum count and an
//! explicit enumeration, kept as independent cross-checks of each other.
//!
//! Words of length n are counted by
//!
//! ```text
//! |K_n| = (1/2n) * sum over odd square-free divisors d of n of mobius(d) * 2^(n/d)
//! ```
//!
//! and enumerated by filtering all `{L,R}^(n-1) C` candidates for
//! shift-maximality. `enumerate_kneading` runs both and refuses to return a
//! census where they disagree.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::words::{Symbol, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("n = {n} outside supported range {range}")]
    OutOfRange { n: u32, range: &'static str },
    #[error("mobius is defined for d >= 1, got {d}")]
    BadMobiusArg { d: u64 },
    #[error("census mismatch at n = {n}: formula {formula}, enumeration {enumerated}")]
    CountMismatch { n: u32, formula: u64, enumerated: u64 },
}

/// Word census at one length, with both counts retained.
#[derive(Debug, Clone, Serialize)]
pub struct KneadingCensus {
    pub n: u32,
    pub count_formula: u64,
    pub count_enumerated: u64,
    pub words: Vec<Word>,
}

/// Moebius function via trial factorization.
pub fn mobius(d: u64) -> Result<i64, CensusError> {
    if d == 0 {
        return Err(CensusError::BadMobiusArg { d });
    }
    let mut rest = d;
    let mut prime_factors = 0u32;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            rest /= p;
            if rest % p == 0 {
                return Ok(0); // square factor
            }
            prime_factors += 1;
        }
        p += 1;
    }
    if rest > 1 {
        prime_factors += 1;
    }
    Ok(if prime_factors % 2 == 0 { 1 } else { -1 })
}

/// Number of kneading words of length n, by the divisor sum. Exact in
/// integer arithmetic for n <= 62.
pub fn count_kneading(n: u32) -> Result<u64, CensusError> {
    if n < 1 || n > 62 {
        return Err(CensusError::OutOfRange { n, range: "1..=62" });
    }
    let mut total: i128 = 0;
    for d in 1..=u64::from(n) {
        if u64::from(n) % d != 0 || d % 2 == 0 {
            continue;
        }
        let mu = mobius(d)?;
        if mu == 0 {
            continue;
        }
        total += i128::from(mu) * (1i128 << (u64::from(n) / d));
    }
    let denom = 2 * i128::from(n);
    debug_assert_eq!(total % denom, 0, "divisor sum must be divisible by 2n");
    Ok((total / denom) as u64)
}

/// All kneading words of length n in parity-lexicographic order, verified
/// against the divisor-sum count.
pub fn enumerate_kneading(n: u32) -> Result<KneadingCensus, CensusError> {
    if n < 1 || n > 20 {
        return Err(CensusError::OutOfRange { n, range: "1..=20" });
    }
    let formula = count_kneading(n)?;
    let stem_len = (n - 1) as usize;
    let mut words = Vec::new();
    for mask in 0u32..(1u32 << stem_len) {
        let mut symbols = Vec::with_capacity(n as usize);
        for bit in (0..stem_len).rev() {
            symbols.push(if mask >> bit & 1 == 1 { Symbol::R } else { Symbol::L });
        }
        symbols.push(Symbol::C);
        let word = Word::new(symbols).expect("candidate has C only at the end");
        if word.is_shift_maximal() {
            words.push(word);
        }
    }
    words.sort_by(|a, b| {
        a.compare_parity_lex(b)
            .expect("equal-length C-terminated words are always comparable")
    });
    let enumerated = words.len() as u64;
    if enumerated != formula {
        return Err(CensusError::CountMismatch { n, formula, enumerated });
    }
    Ok(KneadingCensus { n, count_formula: formula, count_enumerated: enumerated, words })
}

impl KneadingCensus {
    /// True when the explicit list is strictly increasing in parity-lex order.
    pub fn strictly_sorted(&self) -> bool {
        self.words
            .windows(2)
            .all(|p| matches!(p[0].compare_parity_lex(&p[1]), Ok(Ordering::Less)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_small_values() {
        let expect = [
            (1, 1),
            (2, -1),
            (3, -1),
            (4, 0),
            (5, -1),
            (6, 1),
            (9, 0),
            (10, 1),
            (30, -1),
        ];
        for (d, m) in expect {
            assert_eq!(mobius(d).unwrap(), m, "mobius({d})");
        }
        assert!(mobius(0).is_err());
    }

    #[test]
    fn counts_match_known_sequence() {
        let expect = [1u64, 1, 1, 2, 3, 5, 9, 16];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(count_kneading(i as u32 + 1).unwrap(), e, "n = {}", i + 1);
        }
        assert_eq!(count_kneading(12).unwrap(), 170);
        assert!(count_kneading(0).is_err());
        assert!(count_kneading(63).is_err());
    }

    #[test]
    fn enumeration_agrees_with_formula() {
        for n in 1..=10 {
            let census = enumerate_kneading(n).unwrap();
            assert_eq!(census.count_enumerated, census.count_formula, "n = {n}");
            assert!(census.strictly_sorted(), "n = {n}");
        }
    }

    #[test]
    fn length_four_census() {
        let census = enumerate_kneading(4).unwrap();
        let words: Vec<String> = census.words.iter().map(|w| w.to_string()).collect();
        assert_eq!(words, ["RLRC", "RLLC"]);
    }

    #[test]
    fn length_one_census_is_the_bare_turning_point() {
        let census = enumerate_kneading(1).unwrap();
        let words: Vec<String> = census.words.iter().map(|w| w.to_string()).collect();
        assert_eq!(words, ["C"]);
    }

    #[test]
    fn words_start_with_r_beyond_length_one() {
        for n in 2..=9 {
            for word in &enumerate_kneading(n).unwrap().words {
                assert_eq!(word.symbols()[0], Symbol::R, "{word}");
            }
        }
    }
}
