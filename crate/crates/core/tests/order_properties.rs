//! Order-theoretic guarantees of the symbolic layer, checked exhaustively
//! at small lengths and by property testing beyond that.

use std::cmp::Ordering;

use kneading::{Symbol, Word, WordError};
use proptest::prelude::*;

/// Every C-terminated word of length at most `max_len`.
fn all_kneading_shaped(max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for n in 1..=max_len {
        for mask in 0u32..(1 << (n - 1)) {
            let mut symbols = Vec::with_capacity(n);
            for i in 0..n - 1 {
                symbols.push(if mask >> i & 1 == 1 { Symbol::R } else { Symbol::L });
            }
            symbols.push(Symbol::C);
            out.push(Word::new(symbols).unwrap());
        }
    }
    out
}

#[test]
fn comparison_is_total_and_antisymmetric_on_small_words() {
    let words = all_kneading_shaped(8);
    assert_eq!(words.len(), 255);
    for a in &words {
        for b in &words {
            let ab = a.compare_parity_lex(b).expect("C-terminated words always compare");
            let ba = b.compare_parity_lex(a).unwrap();
            assert_eq!(ab, ba.reverse(), "{a} vs {b}");
            assert_eq!(ab == Ordering::Equal, a == b, "{a} vs {b}");
        }
    }
}

#[test]
fn comparison_is_transitive_on_small_words() {
    let words = all_kneading_shaped(6);
    for a in &words {
        for b in &words {
            if a.compare_parity_lex(b).unwrap() != Ordering::Less {
                continue;
            }
            for c in &words {
                if b.compare_parity_lex(c).unwrap() == Ordering::Less {
                    assert_eq!(
                        a.compare_parity_lex(c).unwrap(),
                        Ordering::Less,
                        "{a} < {b} < {c}"
                    );
                }
            }
        }
    }
}

#[test]
fn maximality_matches_bruteforce_shift_scan() {
    for word in all_kneading_shaped(9) {
        let brute = (1..word.len()).all(|k| {
            word.shift(k).unwrap().compare_parity_lex(&word) == Ok(Ordering::Less)
        });
        assert_eq!(word.is_shift_maximal(), brute, "{word}");
        if let Some(k) = word.nonmaximal_shift() {
            assert!(
                word.shift(k).unwrap().compare_parity_lex(&word) != Ok(Ordering::Less),
                "{word}: reported witness {k} actually compares below"
            );
        }
    }
}

/// Strategy for arbitrary valid words: an L/R body with an optional C end.
fn word_strategy(max_len: usize) -> impl Strategy<Value = Word> {
    (1..=max_len, any::<u64>(), any::<bool>()).prop_map(|(n, mask, end_c)| {
        let mut symbols: Vec<Symbol> = (0..n - 1)
            .map(|i| if mask >> (i % 64) & 1 == 1 { Symbol::R } else { Symbol::L })
            .collect();
        symbols.push(if end_c {
            Symbol::C
        } else if mask >> 63 & 1 == 1 {
            Symbol::R
        } else {
            Symbol::L
        });
        Word::new(symbols).unwrap()
    })
}

proptest! {
    #[test]
    fn display_parse_round_trip(word in word_strategy(16)) {
        let text = word.to_string();
        prop_assert_eq!(Word::parse(&text).unwrap(), word);
    }

    #[test]
    fn comparison_antisymmetry_generalizes(a in word_strategy(16), b in word_strategy(16)) {
        match (a.compare_parity_lex(&b), b.compare_parity_lex(&a)) {
            (Ok(ab), Ok(ba)) => prop_assert_eq!(ab, ba.reverse()),
            (Err(WordError::PrefixIncomparable), e) => {
                prop_assert_eq!(e, Err(WordError::PrefixIncomparable));
                // Incomparability only arises when one strictly prefixes
                // the other with no C to break the tie.
                let (short, long) = if a.len() < b.len() { (&a, &b) } else { (&b, &a) };
                prop_assert!(short.len() < long.len());
                prop_assert_eq!(short.symbols(), &long.symbols()[..short.len()]);
            }
            (other, _) => prop_assert!(false, "unexpected comparison result {:?}", other),
        }
    }

    #[test]
    fn equality_means_identical_symbols(a in word_strategy(12), b in word_strategy(12)) {
        if a.compare_parity_lex(&b) == Ok(Ordering::Equal) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn shifts_are_suffixes(word in word_strategy(12), k in 0usize..12) {
        if k < word.len() {
            let shifted = word.shift(k).unwrap();
            prop_assert_eq!(shifted.len(), word.len() - k);
            prop_assert_eq!(shifted.symbols(), &word.symbols()[k..]);
        } else {
            let out_of_range = matches!(word.shift(k), Err(WordError::ShiftOutOfRange { .. }));
            prop_assert!(out_of_range);
        }
    }

    #[test]
    fn sort_by_comparator_is_stablely_ordered(mut words in proptest::collection::vec(word_strategy(8), 2..30)) {
        // Restrict to C-terminated words so all pairs compare.
        words.retain(|w| w.ends_with_c());
        if words.len() >= 2 {
            words.sort_by(|a, b| a.compare_parity_lex(b).unwrap());
            for pair in words.windows(2) {
                prop_assert_ne!(
                    pair[0].compare_parity_lex(&pair[1]).unwrap(),
                    Ordering::Greater
                );
            }
        }
    }
}
