//! Symbolic words over {L, C, R} and the parity-lexicographic order.
//!
//! A point's address is `L` left of the turning point, `R` right of it, `C`
//! on it. Orbits that hit the turning point stop there, so `C` can only be
//! the final symbol of a word. Comparison uses the signed lexicographic
//! order: the base order L < C < R at the first differing index, reversed
//! when an odd number of `R`s precedes that index.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("empty word")]
    Empty,
    #[error("symbol {found:?} at index {index} (expected one of L, C, R)")]
    BadSymbol { found: char, index: usize },
    #[error("interior C at index {index}; C may only be the final symbol")]
    InteriorC { index: usize },
    #[error("one word is a strict prefix of the other; order undefined")]
    PrefixIncomparable,
    #[error("shift {k} out of range for word of length {len}")]
    ShiftOutOfRange { k: usize, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    L,
    C,
    R,
}

impl Symbol {
    pub fn from_char(ch: char) -> Option<Symbol> {
        match ch {
            'L' => Some(Symbol::L),
            'C' => Some(Symbol::C),
            'R' => Some(Symbol::R),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Symbol::L => 'L',
            Symbol::C => 'C',
            Symbol::R => 'R',
        }
    }
}

/// Nonempty word over {L, C, R}; `C` occurs only as the final symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Result<Word, WordError> {
        if symbols.is_empty() {
            return Err(WordError::Empty);
        }
        for (i, &s) in symbols[..symbols.len() - 1].iter().enumerate() {
            if s == Symbol::C {
                return Err(WordError::InteriorC { index: i });
            }
        }
        Ok(Word(symbols))
    }

    pub fn parse(text: &str) -> Result<Word, WordError> {
        let mut symbols = Vec::with_capacity(text.len());
        for (i, ch) in text.chars().enumerate() {
            symbols.push(Symbol::from_char(ch).ok_or(WordError::BadSymbol { found: ch, index: i })?);
        }
        Word::new(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the nonempty invariant is enforced at construction
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn ends_with_c(&self) -> bool {
        *self.0.last().expect("word is nonempty") == Symbol::C
    }

    /// L/R body of a `C`-terminated word (empty for the word "C").
    pub fn stem(&self) -> &[Symbol] {
        if self.ends_with_c() {
            &self.0[..self.0.len() - 1]
        } else {
            &self.0
        }
    }

    /// Drops the first `k` symbols. `shift(0)` is the identity.
    pub fn shift(&self, k: usize) -> Result<Word, WordError> {
        if k >= self.0.len() {
            return Err(WordError::ShiftOutOfRange { k, len: self.0.len() });
        }
        Ok(Word(self.0[k..].to_vec()))
    }

    /// Parity-lexicographic comparison. Errs only when one argument is a
    /// strict prefix of the other, which cannot happen between
    /// `C`-terminated words.
    pub fn compare_parity_lex(&self, other: &Word) -> Result<Ordering, WordError> {
        parity_lex_cmp(&self.0, &other.0)
    }

    /// A word is shift-maximal when every proper shift compares strictly
    /// below it. Valid kneading words are exactly the shift-maximal
    /// `C`-terminated words.
    pub fn is_shift_maximal(&self) -> bool {
        self.nonmaximal_shift().is_none()
    }

    /// Smallest `k >= 1` whose shift fails to compare strictly below the
    /// word, if any. A prefix-incomparable shift counts as a failure.
    pub fn nonmaximal_shift(&self) -> Option<usize> {
        (1..self.0.len())
            .find(|&k| !matches!(parity_lex_cmp(&self.0[k..], &self.0), Ok(Ordering::Less)))
    }
}

/// Comparison on raw symbol slices; `Word` methods delegate here so shift
/// comparisons need not allocate.
pub(crate) fn parity_lex_cmp(a: &[Symbol], b: &[Symbol]) -> Result<Ordering, WordError> {
    let mut odd_rs = false;
    for (&x, &y) in a.iter().zip(b.iter()) {
        if x != y {
            let base = x.cmp(&y);
            return Ok(if odd_rs { base.reverse() } else { base });
        }
        if x == Symbol::R {
            odd_rs = !odd_rs;
        }
    }
    if a.len() == b.len() {
        Ok(Ordering::Equal)
    } else {
        Err(WordError::PrefixIncomparable)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            write!(f, "{}", s.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Word, WordError> {
        Word::parse(s)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn cmp(a: &str, b: &str) -> Ordering {
        w(a).compare_parity_lex(&w(b)).unwrap()
    }

    #[test]
    fn parse_round_trips() {
        for s in ["C", "RC", "RLC", "RLLC", "RLRL", "L", "RRRRC"] {
            assert_eq!(w(s).to_string(), s);
        }
    }

    #[test]
    fn parse_rejects_invalid() {
        assert_eq!(Word::parse(""), Err(WordError::Empty));
        assert_eq!(Word::parse("RCX"), Err(WordError::BadSymbol { found: 'X', index: 2 }));
        assert_eq!(Word::parse("RCL"), Err(WordError::InteriorC { index: 1 }));
        assert_eq!(Word::parse("CC"), Err(WordError::InteriorC { index: 0 }));
    }

    #[test]
    fn base_order_at_even_parity() {
        assert_eq!(cmp("LC", "C"), Ordering::Less);
        assert_eq!(cmp("C", "RC"), Ordering::Less);
        assert_eq!(cmp("RC", "RC"), Ordering::Equal);
    }

    #[test]
    fn odd_parity_reverses() {
        // One R precedes the first difference in each pair.
        assert_eq!(cmp("RC", "RLC"), Ordering::Less);
        assert_eq!(cmp("RLC", "RLLC"), Ordering::Less);
        assert_eq!(cmp("RLRC", "RLLC"), Ordering::Less);
        assert_eq!(cmp("RLRC", "RLC"), Ordering::Less);
    }

    #[test]
    fn superstable_chain_is_ordered() {
        let chain = ["C", "RC", "RLRC", "RLC", "RLLC"];
        for pair in chain.windows(2) {
            assert_eq!(cmp(pair[0], pair[1]), Ordering::Less, "{} vs {}", pair[0], pair[1]);
        }
    }

    #[test]
    fn strict_prefix_is_incomparable() {
        assert_eq!(
            w("RL").compare_parity_lex(&w("RLL")),
            Err(WordError::PrefixIncomparable)
        );
        // C-termination always forces a difference before the prefix runs
        // out. Here the odd-R prefix "RL" reverses C > L at index 2.
        assert_eq!(cmp("RLC", "RLLL"), Ordering::Less);
        assert_eq!(cmp("RLLL", "RLC"), Ordering::Greater);
    }

    #[test]
    fn shift_drops_leading_symbols() {
        assert_eq!(w("RLLC").shift(1).unwrap(), w("LLC"));
        assert_eq!(w("RLLC").shift(3).unwrap(), w("C"));
        assert_eq!(w("RLLC").shift(0).unwrap(), w("RLLC"));
        assert_eq!(
            w("RLLC").shift(4),
            Err(WordError::ShiftOutOfRange { k: 4, len: 4 })
        );
    }

    #[test]
    fn shift_maximality() {
        for s in ["C", "RC", "RLC", "RLLC", "RLRC", "RLRRC"] {
            assert!(w(s).is_shift_maximal(), "{s} should be maximal");
        }
        for s in ["LC", "RRC", "RRLC", "RLRLC"] {
            assert!(!w(s).is_shift_maximal(), "{s} should not be maximal");
        }
        // The shift RLC of RRLC compares above the whole word.
        assert_eq!(w("RRLC").nonmaximal_shift(), Some(1));
    }
}
