//! Unimodal map families on [0, 1] with a scaled parameter.
//!
//! A family is a single shape map f with f(0) = f(1) = 0, a unique maximum
//! f(c) = 1, and the parameter acts by scaling: the dynamics at parameter mu
//! is x -> mu * f(x). The turning-point image is then mu itself, which keeps
//! parameter and critical orbit on the same axis.
//!
//! Derivatives up to third order are part of the family definition so the
//! Schwarzian derivative is available exactly rather than by differencing.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::words::{Symbol, Word};

/// Tolerance for the endpoint and peak identities checked at construction.
pub const VALIDATION_TOL: f64 = 1e-12;
/// Default half-width of the band around c that an orbit point must enter
/// for its symbol to be C.
pub const DEFAULT_TOL_C: f64 = 1e-9;
/// Interior sample count per branch for the monotonicity validation.
const VALIDATION_SAMPLES: usize = 257;
/// Bisection settings for families without closed-form branch inverses.
const INVERSE_BISECT_TOL: f64 = 1e-15;
const INVERSE_BISECT_MAX_ITER: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("family validation failed: {reason}")]
    Validation { reason: String },
    #[error("{name} = {value} outside {expected}")]
    OutOfRange { name: &'static str, value: f64, expected: &'static str },
    #[error("no preimage: target {y} exceeds peak value {mu}")]
    DomainViolation { y: f64, mu: f64 },
    #[error("Schwarzian undefined where f' vanishes (x = {x})")]
    SingularPoint { x: f64 },
    #[error("{name} = {value} invalid: {reason}")]
    BadParameter { name: &'static str, value: f64, reason: &'static str },
}

/// Monotone half of the map: Left is [0, c], Right is [c, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Left,
    Right,
}

impl Branch {
    pub fn parse(text: &str) -> Option<Branch> {
        match text {
            "L" | "l" | "left" | "Left" => Some(Branch::Left),
            "R" | "r" | "right" | "Right" => Some(Branch::Right),
            _ => None,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Left => write!(f, "L"),
            Branch::Right => write!(f, "R"),
        }
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Shape map plus derivatives; see the module docs for the normalization.
#[derive(Clone)]
pub struct UnimodalFamily {
    name: String,
    c: f64,
    value: ScalarFn,
    d1: ScalarFn,
    d2: ScalarFn,
    d3: ScalarFn,
    // Closed-form branch inverses of the shape map, taking the normalized
    // height t = y / mu in [0, 1]. Bisection fallback when absent.
    inverse_left: Option<ScalarFn>,
    inverse_right: Option<ScalarFn>,
}

impl fmt::Debug for UnimodalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnimodalFamily")
            .field("name", &self.name)
            .field("c", &self.c)
            .field("closed_form_inverses", &self.inverse_left.is_some())
            .finish()
    }
}

impl UnimodalFamily {
    pub fn new(
        name: impl Into<String>,
        c: f64,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d3: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<UnimodalFamily, FamilyError> {
        let family = UnimodalFamily {
            name: name.into(),
            c,
            value: Arc::new(value),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
            d3: Arc::new(d3),
            inverse_left: None,
            inverse_right: None,
        };
        family.validate()?;
        Ok(family)
    }

    /// Attaches closed-form branch inverses (arguments take t = y / mu).
    /// They are spot-checked against the shape map before acceptance.
    pub fn with_branch_inverses(
        mut self,
        left: impl Fn(f64) -> f64 + Send + Sync + 'static,
        right: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<UnimodalFamily, FamilyError> {
        self.inverse_left = Some(Arc::new(left));
        self.inverse_right = Some(Arc::new(right));
        for i in 0..=64 {
            let t = i as f64 / 64.0;
            for (branch, inv) in [
                (Branch::Left, self.inverse_left.as_ref().unwrap()),
                (Branch::Right, self.inverse_right.as_ref().unwrap()),
            ] {
                let x = inv(t);
                let (lo, hi) = self.branch_interval(branch);
                if !(lo - 1e-12..=hi + 1e-12).contains(&x) {
                    return Err(FamilyError::Validation {
                        reason: format!("inverse {branch} maps t = {t} to {x}, outside its branch"),
                    });
                }
                let round_trip = (self.value)(x);
                if (round_trip - t).abs() > 1e-9 {
                    return Err(FamilyError::Validation {
                        reason: format!(
                            "inverse {branch} fails round trip at t = {t}: f(x) = {round_trip}"
                        ),
                    });
                }
            }
        }
        Ok(self)
    }

    /// Quadratic shape map 4x(1-x).
    pub fn logistic() -> UnimodalFamily {
        UnimodalFamily::new(
            "logistic",
            0.5,
            |x| 4.0 * x * (1.0 - x),
            |x| 4.0 - 8.0 * x,
            |_| -8.0,
            |_| 0.0,
        )
        .and_then(|f| {
            f.with_branch_inverses(
                |t| (1.0 - (1.0 - t).sqrt()) / 2.0,
                |t| (1.0 + (1.0 - t).sqrt()) / 2.0,
            )
        })
        .expect("the logistic family satisfies the normalization")
    }

    /// Sine shape map sin(pi x).
    pub fn sine() -> UnimodalFamily {
        use std::f64::consts::PI;
        UnimodalFamily::new(
            "sine",
            0.5,
            |x| (PI * x).sin(),
            |x| PI * (PI * x).cos(),
            |x| -PI * PI * (PI * x).sin(),
            |x| -PI * PI * PI * (PI * x).cos(),
        )
        .and_then(|f| {
            f.with_branch_inverses(|t| t.asin() / PI, |t| 1.0 - t.asin() / PI)
        })
        .expect("the sine family satisfies the normalization")
    }

    /// Built-in families addressable from the command line.
    pub fn by_name(name: &str) -> Option<UnimodalFamily> {
        match name {
            "logistic" => Some(UnimodalFamily::logistic()),
            "sine" => Some(UnimodalFamily::sine()),
            _ => None,
        }
    }

    pub const BUILTIN_NAMES: [&'static str; 2] = ["logistic", "sine"];

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn has_closed_form_inverses(&self) -> bool {
        self.inverse_left.is_some()
    }

    fn validate(&self) -> Result<(), FamilyError> {
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(FamilyError::Validation {
                reason: format!("turning point c = {} not in (0, 1)", self.c),
            });
        }
        let f = |x: f64| (self.value)(x);
        for (what, x, target) in [("f(0)", 0.0, 0.0), ("f(1)", 1.0, 0.0), ("f(c)", self.c, 1.0)] {
            let got = f(x);
            if (got - target).abs() > VALIDATION_TOL {
                return Err(FamilyError::Validation {
                    reason: format!("{what} = {got}, expected {target} within {VALIDATION_TOL:e}"),
                });
            }
        }
        for (branch, increasing) in [(Branch::Left, true), (Branch::Right, false)] {
            let (lo, hi) = self.branch_interval(branch);
            let mut prev = f(lo);
            for i in 1..=VALIDATION_SAMPLES {
                let x = lo + (hi - lo) * i as f64 / VALIDATION_SAMPLES as f64;
                let cur = f(x);
                let ok = if increasing { cur > prev } else { cur < prev };
                if !ok {
                    return Err(FamilyError::Validation {
                        reason: format!(
                            "f not strictly {} near x = {x}",
                            if increasing { "increasing on [0, c]" } else { "decreasing on [c, 1]" }
                        ),
                    });
                }
                prev = cur;
            }
        }
        for i in 0..=VALIDATION_SAMPLES {
            let x = i as f64 / VALIDATION_SAMPLES as f64;
            for (what, deriv) in [("f'", &self.d1), ("f''", &self.d2), ("f'''", &self.d3)] {
                let v = deriv(x);
                if !v.is_finite() {
                    return Err(FamilyError::Validation {
                        reason: format!("{what}({x}) = {v} is not finite"),
                    });
                }
            }
        }
        Ok(())
    }

    fn branch_interval(&self, branch: Branch) -> (f64, f64) {
        match branch {
            Branch::Left => (0.0, self.c),
            Branch::Right => (self.c, 1.0),
        }
    }

    fn check_mu(mu: f64) -> Result<(), FamilyError> {
        if !(mu > 0.0 && mu <= 1.0) || mu.is_nan() {
            return Err(FamilyError::OutOfRange { name: "mu", value: mu, expected: "(0, 1]" });
        }
        Ok(())
    }

    /// One application of the parametrized map: mu * f(x).
    pub fn eval(&self, mu: f64, x: f64) -> Result<f64, FamilyError> {
        Self::check_mu(mu)?;
        if !(0.0..=1.0).contains(&x) {
            return Err(FamilyError::OutOfRange { name: "x", value: x, expected: "[0, 1]" });
        }
        Ok(mu * (self.value)(x))
    }

    /// n-fold application. `iterate(mu, x, 0)` is x itself.
    pub fn iterate(&self, mu: f64, x: f64, n: usize) -> Result<f64, FamilyError> {
        let mut y = x;
        if n == 0 {
            Self::check_mu(mu)?;
            if !(0.0..=1.0).contains(&x) {
                return Err(FamilyError::OutOfRange { name: "x", value: x, expected: "[0, 1]" });
            }
        }
        for _ in 0..n {
            y = self.eval(mu, y)?;
        }
        Ok(y)
    }

    /// Preimage of y on one monotone branch. The target must not exceed the
    /// peak value mu; the boundary y = mu maps to c on either branch.
    pub fn inverse_branch(&self, mu: f64, branch: Branch, y: f64) -> Result<f64, FamilyError> {
        Self::check_mu(mu)?;
        if !(y >= 0.0) {
            return Err(FamilyError::OutOfRange { name: "y", value: y, expected: "[0, mu]" });
        }
        if y > mu {
            return Err(FamilyError::DomainViolation { y, mu });
        }
        let t = y / mu; // in [0, 1] because 0 <= y <= mu
        let closed = match branch {
            Branch::Left => &self.inverse_left,
            Branch::Right => &self.inverse_right,
        };
        if let Some(inv) = closed {
            return Ok(inv(t));
        }
        // Monotone bisection on the branch for families without closed
        // forms. The shape map is strictly monotone on the branch, so the
        // sign of f(mid) - t steers directly.
        let (mut lo, mut hi) = self.branch_interval(branch);
        let increasing = matches!(branch, Branch::Left);
        for _ in 0..INVERSE_BISECT_MAX_ITER {
            if hi - lo <= INVERSE_BISECT_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let v = (self.value)(mid);
            let go_right = if increasing { v < t } else { v > t };
            if go_right {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Address of the first `depth` orbit points of x. The word ends with C
    /// as soon as an orbit point lands within tol_c of the turning point, so
    /// the result may be shorter than `depth`.
    pub fn itinerary(&self, mu: f64, x: f64, depth: usize, tol_c: f64) -> Result<Word, FamilyError> {
        Self::check_mu(mu)?;
        if depth == 0 {
            return Err(FamilyError::BadParameter {
                name: "depth",
                value: 0.0,
                reason: "itineraries need at least one symbol",
            });
        }
        if !(tol_c > 0.0) {
            return Err(FamilyError::BadParameter {
                name: "tol_c",
                value: tol_c,
                reason: "the C band must have positive width",
            });
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(FamilyError::OutOfRange { name: "x", value: x, expected: "[0, 1]" });
        }
        let mut symbols = Vec::with_capacity(depth);
        let mut y = x;
        for _ in 0..depth {
            if (y - self.c).abs() < tol_c {
                symbols.push(Symbol::C);
                break;
            }
            symbols.push(if y < self.c { Symbol::L } else { Symbol::R });
            y = self.eval(mu, y)?;
        }
        Ok(Word::new(symbols).expect("C is pushed only as the final symbol"))
    }

    /// Itinerary of the turning-point image mu: the kneading word at mu,
    /// truncated at `depth` symbols.
    pub fn kneading_sequence(&self, mu: f64, depth: usize, tol_c: f64) -> Result<Word, FamilyError> {
        self.itinerary(mu, mu, depth, tol_c)
    }

    /// Schwarzian derivative of the parametrized map. The scale factor mu
    /// cancels in both ratios, so this depends on the shape alone.
    pub fn schwarzian(&self, x: f64) -> Result<f64, FamilyError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(FamilyError::OutOfRange { name: "x", value: x, expected: "[0, 1]" });
        }
        let d1 = (self.d1)(x);
        if d1 == 0.0 {
            return Err(FamilyError::SingularPoint { x });
        }
        let d2 = (self.d2)(x);
        let d3 = (self.d3)(x);
        Ok(d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1))
    }

    /// Schwarzian derivative of one branch inverse at height y, from the
    /// inverse-function rule: S(inv)(y) = -S(map)(x) / (map'(x))^2 at the
    /// preimage x.
    pub fn schwarzian_inverse_branch(
        &self,
        mu: f64,
        branch: Branch,
        y: f64,
    ) -> Result<f64, FamilyError> {
        let x = self.inverse_branch(mu, branch, y)?;
        let s = self.schwarzian(x)?;
        let map_d1 = mu * (self.d1)(x);
        Ok(-s / (map_d1 * map_d1))
    }

    /// Samples the three properties that make the family's parameter sweep
    /// orderly: a unique interior fixed point per parameter, negative
    /// Schwarzian of the shape map (a sufficient condition for at most one
    /// attracting orbit), and positive Schwarzian of the branch inverses.
    pub fn check_class_c(&self, mu_grid: &[f64], x_grid: &[f64]) -> Result<ClassCReport, FamilyError> {
        if mu_grid.is_empty() || x_grid.is_empty() {
            return Err(FamilyError::BadParameter {
                name: "grid",
                value: 0.0,
                reason: "sample grids must be nonempty",
            });
        }
        for &mu in mu_grid {
            Self::check_mu(mu)?;
        }
        for &x in x_grid {
            if !(x > 0.0 && x <= 1.0) {
                return Err(FamilyError::OutOfRange {
                    name: "x_grid value",
                    value: x,
                    expected: "(0, 1]",
                });
            }
        }
        let mut report = ClassCReport {
            family: self.name.clone(),
            mu_samples: mu_grid.to_vec(),
            unique_fixed_point: true,
            negative_schwarzian: true,
            positive_inverse_schwarzian: true,
            witnesses: Vec::new(),
        };

        // Property 1: mu f(x) - x changes sign exactly once on the sampled
        // interior. Zero samples count as crossings; a zero flanked by equal
        // signs is a tangency and counts as one more fixed point.
        for &mu in mu_grid {
            let mut signs = Vec::with_capacity(x_grid.len());
            for &x in x_grid {
                if x >= 1.0 {
                    continue; // endpoints are always fixed; only the interior counts
                }
                let g = self.eval(mu, x)? - x;
                signs.push((x, if g > 0.0 { 1i8 } else if g < 0.0 { -1 } else { 0 }));
            }
            let mut crossings = 0usize;
            let mut witness_x = 0.0;
            let nonzero: Vec<(f64, i8)> = signs.iter().copied().filter(|&(_, s)| s != 0).collect();
            for pair in nonzero.windows(2) {
                if pair[0].1 != pair[1].1 {
                    crossings += 1;
                    witness_x = pair[1].0;
                }
            }
            for (i, &(x, s)) in signs.iter().enumerate() {
                if s == 0 {
                    let left = signs[..i].iter().rev().find(|&&(_, s)| s != 0).map(|&(_, s)| s);
                    let right = signs[i + 1..].iter().find(|&&(_, s)| s != 0).map(|&(_, s)| s);
                    if left == right || left.is_none() || right.is_none() {
                        crossings += 1; // tangency or boundary touch
                        witness_x = x;
                    }
                }
            }
            if crossings != 1 {
                report.unique_fixed_point = false;
                report.witnesses.push(ClassCWitness {
                    property: 1,
                    mu,
                    point: witness_x,
                    value: crossings as f64,
                });
            }
        }

        // Property 2 (sufficient condition): S(f) < 0 away from c.
        for &x in x_grid {
            if x == self.c || (self.d1)(x) == 0.0 {
                continue;
            }
            let s = self.schwarzian(x)?;
            if !(s < 0.0) {
                report.negative_schwarzian = false;
                report.witnesses.push(ClassCWitness { property: 2, mu: f64::NAN, point: x, value: s });
            }
        }

        // Property 3: S of both branch inverses > 0 over (mu, y) samples,
        // with y = t * mu staying below the peak.
        for &mu in mu_grid {
            for &t in x_grid {
                if t >= 1.0 {
                    continue;
                }
                let y = t * mu;
                for branch in [Branch::Left, Branch::Right] {
                    let s = self.schwarzian_inverse_branch(mu, branch, y)?;
                    if !(s > 0.0) {
                        report.positive_inverse_schwarzian = false;
                        report.witnesses.push(ClassCWitness { property: 3, mu, point: y, value: s });
                    }
                }
            }
        }
        Ok(report)
    }
}

/// Outcome of `check_class_c`; witnesses carry the violating samples.
#[derive(Debug, Clone, Serialize)]
pub struct ClassCReport {
    pub family: String,
    pub mu_samples: Vec<f64>,
    pub unique_fixed_point: bool,
    pub negative_schwarzian: bool,
    pub positive_inverse_schwarzian: bool,
    pub witnesses: Vec<ClassCWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassCWitness {
    /// 1 = fixed point count, 2 = shape Schwarzian, 3 = inverse Schwarzian.
    pub property: u8,
    pub mu: f64,
    pub point: f64,
    pub value: f64,
}

impl ClassCReport {
    pub fn passed(&self) -> bool {
        self.unique_fixed_point && self.negative_schwarzian && self.positive_inverse_schwarzian
    }
}

/// Evenly spaced interior samples of (0, 1), avoiding both endpoints and
/// (for even counts) the midpoint. Convenient default x grid for
/// `check_class_c`.
pub fn interior_grid(count: usize) -> Vec<f64> {
    (0..count).map(|i| (i as f64 + 0.5) / count as f64).collect()
}

/// Evenly spaced closed-interval samples, endpoints included.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (count - 1) as f64
            }
        })
        .collect()
}
