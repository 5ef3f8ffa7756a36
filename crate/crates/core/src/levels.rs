//! Level functions: inverse branches of mu * f composed along a C-free word
//! and evaluated at the turning point.
//!
//! Writing B(s) for the branch-s preimage under the map at parameter mu, the
//! level function of the word w = w1..wn is B(w1)(B(w2)(...B(wn)(c)...)).
//! Applying the map k times peels k outer branches off, so the forward orbit
//! of a level value walks through the level values of the word's suffixes.
//! The parameter where the level value equals mu itself is the superstable
//! parameter of the kneading word wC: there the orbit of c returns to c in
//! exactly |w| + 1 steps.
//!
//! Feasibility of the composition depends on mu. Every intermediate target
//! must stay at or below the peak value mu, and the targets are exactly the
//! suffix level values, so the solver brackets from suffix superstable
//! parameters rather than prefix ones. `domain_lower_bound` keeps the
//! coarser prefix recursion because its output is a guaranteed-feasible
//! threshold, which is what callers probing g from above need.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::family::{Branch, FamilyError, UnimodalFamily, DEFAULT_TOL_C};
use crate::words::{Symbol, Word, WordError};

/// Final bisection bracket width for superstable solves.
const BRACKET_TOL: f64 = 1e-13;
/// Acceptance threshold on |g(mu) - mu| at the reported parameter.
const FIXED_POINT_TOL: f64 = 1e-12;
/// Acceptance threshold on the forward-orbit return |f^n(c) - c|.
const ORBIT_TOL: f64 = 1e-8;
/// Grid resolution for the positive-side fallback scan.
const SIGN_SCAN_POINTS: usize = 8192;
/// Bracket width below which the kneading-sandwich bisection gives up.
const IVT_COLLAPSE: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevelError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("level functions take C-free words, found C at index {index}")]
    InteriorC { index: usize },
    #[error("cannot shift {k} symbols of a {len}-symbol word")]
    BadShift { k: usize, len: usize },
    #[error("\"{word}\" is not a kneading word: {reason}")]
    NotKneading { word: String, reason: String },
    #[error("solve failed for \"{word}\": {reason}")]
    SolveFailure { word: String, reason: String },
    #[error("orbit of c fails to close for \"{word}\" at mu = {mu_star}: residual {residual}")]
    OrbitResidual { word: String, mu_star: f64, residual: f64 },
    #[error("interval endpoints do not bracket \"{word}\": {reason}")]
    IvtPrecondition { word: String, reason: String },
}

/// A superstable parameter together with the evidence for it.
#[derive(Debug, Clone, Serialize)]
pub struct SuperstableRecord {
    pub word: Word,
    pub mu_star: f64,
    /// Forward check |f^n(c) - c| at mu_star, n the word length.
    pub residual: f64,
    /// Width of the final bisection bracket.
    pub bracket_width: f64,
}

/// Composition of inverse branches along a fixed C-free word, as a function
/// of the parameter.
#[derive(Debug, Clone)]
pub struct LevelFunction {
    family: UnimodalFamily,
    stem: Vec<Symbol>,
}

impl LevelFunction {
    /// The empty word is allowed and evaluates to c.
    pub fn new(family: &UnimodalFamily, stem: &[Symbol]) -> Result<LevelFunction, LevelError> {
        if let Some(index) = stem.iter().position(|&s| s == Symbol::C) {
            return Err(LevelError::InteriorC { index });
        }
        Ok(LevelFunction { family: family.clone(), stem: stem.to_vec() })
    }

    /// Parses "RLR" style text; "" gives the empty composition.
    pub fn parse(family: &UnimodalFamily, text: &str) -> Result<LevelFunction, LevelError> {
        let mut stem = Vec::with_capacity(text.len());
        for (index, ch) in text.chars().enumerate() {
            match Symbol::from_char(ch) {
                Some(Symbol::C) => return Err(LevelError::InteriorC { index }),
                Some(s) => stem.push(s),
                None => {
                    return Err(LevelError::Word(WordError::BadSymbol { found: ch, index }))
                }
            }
        }
        Ok(LevelFunction { family: family.clone(), stem })
    }

    /// Stem of a kneading word wC, dropping the final C.
    pub fn from_kneading_word(
        family: &UnimodalFamily,
        word: &Word,
    ) -> Result<LevelFunction, LevelError> {
        if !word.ends_with_c() {
            return Err(LevelError::NotKneading {
                word: word.to_string(),
                reason: "missing terminal C".into(),
            });
        }
        LevelFunction::new(family, word.stem())
    }

    pub fn stem(&self) -> &[Symbol] {
        &self.stem
    }

    pub fn family(&self) -> &UnimodalFamily {
        &self.family
    }

    /// The level value g_w(mu). Branches apply right to left, so the last
    /// symbol acts on c first.
    pub fn eval(&self, mu: f64) -> Result<f64, LevelError> {
        self.eval_from(mu, self.family.c())
    }

    /// Two-variable form: the composition applied to an arbitrary starting
    /// target instead of c.
    pub fn eval_from(&self, mu: f64, target: f64) -> Result<f64, LevelError> {
        let mut y = target;
        for &s in self.stem.iter().rev() {
            let branch = match s {
                Symbol::L => Branch::Left,
                Symbol::R => Branch::Right,
                Symbol::C => unreachable!("stem is C-free by construction"),
            };
            y = self.family.inverse_branch(mu, branch, y)?;
        }
        Ok(y)
    }

    /// Residual of the shift identity f^k(g_w(mu)) = g_{s^k w}(mu). With
    /// k = |w| the right side is the empty composition, c itself.
    pub fn shift_residual(&self, mu: f64, k: usize) -> Result<f64, LevelError> {
        if k > self.stem.len() {
            return Err(LevelError::BadShift { k, len: self.stem.len() });
        }
        let forward = self.family.iterate(mu, self.eval(mu)?, k)?;
        let tail = LevelFunction { family: self.family.clone(), stem: self.stem[k..].to_vec() };
        Ok((forward - tail.eval(mu)?).abs())
    }

    /// A parameter threshold above which `eval` is guaranteed to succeed:
    /// the superstable parameter of the one-symbol-shorter prefix when that
    /// prefix completes to a kneading word, else the feasibility boundary
    /// located by bisection. Conservative by design; the solver uses the
    /// sharper suffix-based floor internally.
    pub fn domain_lower_bound(&self) -> Result<f64, LevelError> {
        if self.stem.is_empty() {
            return Err(LevelError::Word(WordError::Empty));
        }
        if self.stem.len() == 1 {
            return Ok(self.family.c());
        }
        let prefix = &self.stem[..self.stem.len() - 1];
        let prefix_word = complete_with_c(prefix);
        if prefix_word.is_shift_maximal() {
            return Ok(solve_superstable(&self.family, &prefix_word)?.mu_star);
        }
        // Prefix is not a kneading word, so no superstable parameter exists
        // for it. Feasibility of the composition is monotone in mu (each
        // constraint set is an up-interval), so bisect the boundary.
        let c = self.family.c();
        let feasible = |mu: f64| self.eval(mu).is_ok();
        if !feasible(1.0) {
            return Err(LevelError::SolveFailure {
                word: format!("{}", DisplayStem(&self.stem)),
                reason: "composition infeasible even at mu = 1".into(),
            });
        }
        if feasible(c + 1e-12) {
            return Ok(c);
        }
        let (mut lo, mut hi) = (c, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

struct DisplayStem<'a>(&'a [Symbol]);

impl std::fmt::Display for DisplayStem<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &s in self.0 {
            write!(f, "{}", s.to_char())?;
        }
        Ok(())
    }
}

fn complete_with_c(stem: &[Symbol]) -> Word {
    let mut symbols = stem.to_vec();
    symbols.push(Symbol::C);
    Word::new(symbols).expect("a C-free stem plus terminal C is a valid word")
}

/// Signed distance of the level value from the fixed-point line, or None
/// where the composition is infeasible. Infeasible parameters lie below the
/// root, so the solver treats None as the positive side.
fn fixed_point_gap(level: &LevelFunction, mu: f64) -> Result<Option<f64>, LevelError> {
    match level.eval(mu) {
        Ok(g) => Ok(Some(g - mu)),
        Err(LevelError::Family(FamilyError::DomainViolation { .. })) => Ok(None),
        Err(other) => Err(other),
    }
}

fn validate_kneading_word(word: &Word) -> Result<(), LevelError> {
    if !word.ends_with_c() {
        return Err(LevelError::NotKneading {
            word: word.to_string(),
            reason: "missing terminal C".into(),
        });
    }
    if let Some(k) = word.nonmaximal_shift() {
        return Err(LevelError::NotKneading {
            word: word.to_string(),
            reason: format!("not shift-maximal: shift by {k} does not compare below the word"),
        });
    }
    Ok(())
}

/// Superstable parameters of the proper suffixes that constrain where the
/// full composition is feasible. Only suffixes that themselves complete to
/// kneading words contribute; the others are dominated by these.
fn suffix_floor(
    family: &UnimodalFamily,
    stem: &[Symbol],
    memo: &mut HashMap<String, f64>,
) -> Result<f64, LevelError> {
    let mut floor = family.c();
    for j in 1..stem.len() {
        let suffix_word = complete_with_c(&stem[j..]);
        if !suffix_word.is_shift_maximal() {
            continue;
        }
        let mu = match memo.get(&suffix_word.to_string()) {
            Some(&mu) => mu,
            None => solve_memoized(family, &suffix_word, memo)?.mu_star,
        };
        floor = floor.max(mu);
    }
    Ok(floor)
}

/// Locates the unique parameter where the level value of the word's stem
/// equals the parameter itself. See the module docs for why the bracket
/// floor comes from suffixes.
pub fn solve_superstable(
    family: &UnimodalFamily,
    word: &Word,
) -> Result<SuperstableRecord, LevelError> {
    let mut memo = HashMap::new();
    solve_memoized(family, word, &mut memo)
}

fn solve_memoized(
    family: &UnimodalFamily,
    word: &Word,
    memo: &mut HashMap<String, f64>,
) -> Result<SuperstableRecord, LevelError> {
    validate_kneading_word(word)?;
    let stem = word.stem();
    if stem.is_empty() {
        // f_mu(c) = mu, so the orbit closes in one step exactly at mu = c.
        memo.insert(word.to_string(), family.c());
        return Ok(SuperstableRecord {
            word: word.clone(),
            mu_star: family.c(),
            residual: 0.0,
            bracket_width: 0.0,
        });
    }
    let level = LevelFunction::new(family, stem)?;
    let floor = suffix_floor(family, stem, memo)?;
    let record = solve_bracketed(&level, word, floor)?;
    memo.insert(word.to_string(), record.mu_star);
    Ok(record)
}

fn solve_bracketed(
    level: &LevelFunction,
    word: &Word,
    floor: f64,
) -> Result<SuperstableRecord, LevelError> {
    let fail = |reason: String| LevelError::SolveFailure { word: word.to_string(), reason };

    // At the floor itself the gap can vanish identically (the binding
    // suffix feeds the peak target through c), so probe strictly above it.
    let mut lo = f64::NAN;
    for exp in (2..=9).rev() {
        let probe = floor + 10f64.powi(-exp);
        if probe >= 1.0 {
            continue;
        }
        if let Some(gap) = fixed_point_gap(level, probe)? {
            if gap > 1e-10 {
                lo = probe;
                break;
            }
        }
    }
    if lo.is_nan() {
        // No rung of the ladder gave a positive gap; scan the whole range.
        let mut found = None;
        for i in 1..SIGN_SCAN_POINTS {
            let mu = floor + (1.0 - floor) * i as f64 / SIGN_SCAN_POINTS as f64;
            if let Some(gap) = fixed_point_gap(level, mu)? {
                if gap > 1e-10 {
                    found = Some(mu);
                    break;
                }
            }
        }
        lo = found.ok_or_else(|| {
            fail("no parameter with level value above the fixed-point line".into())
        })?;
    }
    let mut hi = 1.0;
    match fixed_point_gap(level, hi)? {
        Some(gap) if gap < 0.0 => {}
        Some(gap) => return Err(fail(format!("gap at mu = 1 is {gap}, expected negative"))),
        None => return Err(fail("composition infeasible at mu = 1".into())),
    }

    while hi - lo > BRACKET_TOL {
        let mid = 0.5 * (lo + hi);
        match fixed_point_gap(level, mid)? {
            None => lo = mid,
            Some(gap) if gap > 0.0 => lo = mid,
            Some(_) => hi = mid,
        }
    }

    // Polish: keep bisecting toward machine precision until the gap itself
    // is small, tracking the best feasible point seen.
    let mut best = (f64::NAN, f64::INFINITY);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        match fixed_point_gap(level, mid)? {
            None => lo = mid,
            Some(gap) => {
                if gap.abs() < best.1 {
                    best = (mid, gap.abs());
                }
                if gap > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        if best.1 <= FIXED_POINT_TOL || hi - lo < f64::EPSILON {
            break;
        }
    }
    let (mu_star, gap) = best;
    if !mu_star.is_finite() || gap > FIXED_POINT_TOL {
        return Err(fail(format!("fixed-point gap stalled at {gap}")));
    }
    if floor > level.family().c() && mu_star - floor < DEFAULT_TOL_C {
        return Err(fail(format!(
            "root within {DEFAULT_TOL_C:e} of the feasibility boundary {floor}"
        )));
    }

    let residual = (level.family().iterate(mu_star, level.family().c(), word.len())?
        - level.family().c())
    .abs();
    if residual >= ORBIT_TOL {
        return Err(LevelError::OrbitResidual { word: word.to_string(), mu_star, residual });
    }
    Ok(SuperstableRecord { word: word.clone(), mu_star, residual, bracket_width: hi - lo })
}

/// Solves every kneading word of length 1..=n_max and returns the records
/// sorted by parameter. Suffix solves are shared through the memo, so the
/// table costs little more than its longest generation.
pub fn superstable_table(
    family: &UnimodalFamily,
    n_max: u32,
) -> Result<Vec<SuperstableRecord>, LevelError> {
    let mut memo = HashMap::new();
    let mut records = Vec::new();
    for n in 1..=n_max {
        let census = crate::census::enumerate_kneading(n).map_err(|e| {
            LevelError::SolveFailure { word: format!("length {n}"), reason: e.to_string() }
        })?;
        for word in &census.words {
            records.push(solve_memoized(family, word, &mut memo)?);
        }
    }
    records.sort_by(|a, b| a.mu_star.total_cmp(&b.mu_star));
    Ok(records)
}

/// First adjacent pair (by parameter order) whose words are not strictly
/// increasing in the symbolic order, if any. None means the numeric and
/// symbolic orders agree.
pub fn table_order_violation(records: &[SuperstableRecord]) -> Option<(usize, usize)> {
    records.windows(2).enumerate().find_map(|(i, pair)| {
        match pair[0].word.compare_parity_lex(&pair[1].word) {
            Ok(std::cmp::Ordering::Less) => None,
            _ => Some((i, i + 1)),
        }
    })
}

/// Constructive intermediate-value search: given parameters whose kneading
/// words sandwich the target word strictly, bisects the parameter interval
/// until the kneading word at the midpoint equals the target. The itinerary
/// depth is raised to the word length so sandwich comparisons always
/// resolve.
pub fn realize_ivt(
    family: &UnimodalFamily,
    word: &Word,
    mu1: f64,
    mu2: f64,
    depth: usize,
) -> Result<f64, LevelError> {
    validate_kneading_word(word)?;
    let precondition = |reason: String| LevelError::IvtPrecondition {
        word: word.to_string(),
        reason,
    };
    if !(mu1 > 0.0 && mu2 <= 1.0 && mu1 < mu2) {
        return Err(precondition(format!("need 0 < mu1 < mu2 <= 1, got {mu1}, {mu2}")));
    }
    let depth = depth.max(word.len());
    let knead = |mu: f64| family.kneading_sequence(mu, depth, DEFAULT_TOL_C);
    let k1 = knead(mu1)?;
    let k2 = knead(mu2)?;
    use std::cmp::Ordering::Less;
    if k1.compare_parity_lex(word) != Ok(Less) {
        return Err(precondition(format!("kneading word {k1} at mu1 = {mu1} is not below the target")));
    }
    if word.compare_parity_lex(&k2) != Ok(Less) {
        return Err(precondition(format!("kneading word {k2} at mu2 = {mu2} is not above the target")));
    }
    let (mut lo, mut hi) = (mu1, mu2);
    while hi - lo > IVT_COLLAPSE {
        let mid = 0.5 * (lo + hi);
        let k = knead(mid)?;
        match k.compare_parity_lex(word) {
            Ok(std::cmp::Ordering::Equal) => return Ok(mid),
            Ok(Less) => lo = mid,
            Ok(std::cmp::Ordering::Greater) => hi = mid,
            Err(_) => {
                return Err(LevelError::SolveFailure {
                    word: word.to_string(),
                    reason: format!("midpoint kneading word {k} too short to compare"),
                })
            }
        }
    }
    Err(LevelError::SolveFailure {
        word: word.to_string(),
        reason: format!("bracket collapsed to {} without matching the target", hi - lo),
    })
}
