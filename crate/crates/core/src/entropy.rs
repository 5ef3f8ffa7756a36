//! Lap-count entropy and parameter sweeps.
//!
//! The turning points of the n-th iterate are the preimages of c of order
//! below n, so lap(f^n) is one plus the size of the accumulated preimage
//! tree. The exponential growth rate of the lap numbers is the topological
//! entropy; the estimator reads it off the last few lap ratios.
//!
//! Preimage values are deduplicated bitwise across the whole tree and only
//! novel points are expanded. Revisited points contribute nothing new to
//! the union, and cutting them keeps periodic-orbit regimes (where the tree
//! ends in long thin chains) from costing exponential work.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::family::{Branch, FamilyError, UnimodalFamily, DEFAULT_TOL_C};
use crate::words::Word;

/// Targets this close above the peak value count as the boundary case with
/// the single preimage c.
const PEAK_CLAMP: f64 = 1e-12;
/// Estimates below this are reported as exactly zero.
const ZERO_CLAMP: f64 = 1e-4;
/// Lap ratios averaged for the estimate.
const TAIL_RATIOS: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("{name} = {value} invalid: {reason}")]
    BadParameter { name: &'static str, value: usize, reason: &'static str },
    #[error("node cap hit at depth {reached} of {requested} (lap counts retained)")]
    CapExceeded { reached: usize, requested: usize, laps: Vec<u64> },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntropyOptions {
    /// Deepest iterate order to count laps for. Deep defaults cost little:
    /// regimes with slow lap growth have tiny trees, and fast-growing trees
    /// hit the node cap long before the depth limit.
    pub max_depth: usize,
    /// Upper bound on stored preimage points.
    pub node_cap: usize,
}

impl Default for EntropyOptions {
    fn default() -> EntropyOptions {
        EntropyOptions { max_depth: 3000, node_cap: 2_000_000 }
    }
}

/// Lap counts of f^1..f^N and the growth-rate estimate built from them.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub family: String,
    pub mu: f64,
    pub lap_counts: Vec<u64>,
    /// Mean log lap ratio over the last few levels, in nats.
    pub h_estimate: f64,
    pub depth_reached: usize,
    pub cap_hit: bool,
}

/// Accumulated preimage tree of c. `laps[k]` is the lap count of f^(k+1).
struct PreimageTree {
    laps: Vec<u64>,
    cap_hit: bool,
}

fn grow_preimage_tree(
    family: &UnimodalFamily,
    mu: f64,
    max_depth: usize,
    node_cap: usize,
) -> Result<PreimageTree, EntropyError> {
    use std::collections::HashSet;
    let c = family.c();
    // Validate mu once up front; the branch evaluations below stay in range.
    family.eval(mu, c)?;
    let mut seen: HashSet<u64> = HashSet::new();
    seen.insert(c.to_bits());
    let mut frontier = vec![c];
    let mut laps = vec![2u64];
    let mut cap_hit = false;
    for _ in 1..max_depth {
        if frontier.is_empty() {
            // The tree went extinct: every lap count from here on repeats.
            let last = *laps.last().expect("laps starts nonempty");
            laps.resize(max_depth, last);
            break;
        }
        let mut next = Vec::new();
        for &y in &frontier {
            if y > mu + PEAK_CLAMP {
                continue; // above the peak: no preimage
            }
            let targets = if y >= mu {
                [Some(c), None] // boundary: both branches collapse onto c
            } else {
                [
                    Some(family.inverse_branch(mu, Branch::Left, y)?),
                    Some(family.inverse_branch(mu, Branch::Right, y)?),
                ]
            };
            for x in targets.into_iter().flatten() {
                if x <= 0.0 || x >= 1.0 {
                    continue; // endpoint preimages are not turning points
                }
                if seen.insert(x.to_bits()) {
                    next.push(x);
                }
            }
        }
        frontier = next;
        laps.push(1 + seen.len() as u64);
        if seen.len() > node_cap {
            cap_hit = true;
            break;
        }
    }
    Ok(PreimageTree { laps, cap_hit })
}

/// Lap count of the n-th iterate. The cap error still carries the counts
/// for every level completed before the cap.
pub fn lap_count(
    family: &UnimodalFamily,
    mu: f64,
    n: usize,
    node_cap: usize,
) -> Result<u64, EntropyError> {
    if n < 1 {
        return Err(EntropyError::BadParameter {
            name: "n",
            value: n,
            reason: "lap counts start at the first iterate",
        });
    }
    if node_cap < 1 {
        return Err(EntropyError::BadParameter {
            name: "node_cap",
            value: node_cap,
            reason: "need room for at least one node",
        });
    }
    let tree = grow_preimage_tree(family, mu, n, node_cap)?;
    if tree.laps.len() >= n {
        Ok(tree.laps[n - 1])
    } else {
        Err(EntropyError::CapExceeded { reached: tree.laps.len(), requested: n, laps: tree.laps })
    }
}

/// Entropy estimate from lap growth. Hitting the node cap is not an error;
/// the estimate then reads the deepest completed levels.
pub fn entropy_estimate(
    family: &UnimodalFamily,
    mu: f64,
    opts: EntropyOptions,
) -> Result<EntropyReport, EntropyError> {
    if opts.max_depth < TAIL_RATIOS {
        return Err(EntropyError::BadParameter {
            name: "max_depth",
            value: opts.max_depth,
            reason: "too shallow for the tail-ratio average",
        });
    }
    let tree = grow_preimage_tree(family, mu, opts.max_depth, opts.node_cap)?;
    let laps = &tree.laps;
    let tail = TAIL_RATIOS.min(laps.len() - 1);
    let h_raw = if tail == 0 {
        0.0
    } else {
        // Mean of the last `tail` log ratios telescopes to a difference.
        let last = laps[laps.len() - 1] as f64;
        let base = laps[laps.len() - 1 - tail] as f64;
        (last.ln() - base.ln()) / tail as f64
    };
    let h_estimate = if h_raw < ZERO_CLAMP { 0.0 } else { h_raw };
    Ok(EntropyReport {
        family: family.name().to_string(),
        mu,
        depth_reached: laps.len(),
        cap_hit: tree.cap_hit,
        lap_counts: tree.laps,
        h_estimate,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOptions {
    pub mu_min: f64,
    pub mu_max: f64,
    pub grid_points: usize,
    /// Itinerary depth for the kneading word at each grid point.
    pub depth: usize,
    pub tol_c: f64,
    /// Adjacent entropy decreases beyond this are recorded as violations;
    /// smaller decreases only feed max_entropy_drop.
    pub entropy_tolerance: f64,
    pub entropy: EntropyOptions,
    /// Entropy estimation can be switched off for kneading-only sweeps.
    pub compute_entropy: bool,
}

impl Default for SweepOptions {
    fn default() -> SweepOptions {
        SweepOptions {
            mu_min: 0.5,
            mu_max: 1.0,
            grid_points: 1000,
            depth: 25,
            tol_c: DEFAULT_TOL_C,
            entropy_tolerance: 5e-3,
            entropy: EntropyOptions::default(),
            compute_entropy: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub mu: f64,
    pub word: Word,
    pub entropy: Option<f64>,
    pub lap_depth: Option<usize>,
}

/// One adjacent-pair monotonicity breach.
#[derive(Debug, Clone, Serialize)]
pub struct SweepViolation {
    /// "kneading" or "entropy".
    pub kind: &'static str,
    pub index_left: usize,
    pub index_right: usize,
    pub mu_left: f64,
    pub mu_right: f64,
    /// Size of the entropy drop; zero for kneading violations.
    pub delta: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub family: String,
    pub options: SweepOptions,
    pub points: Vec<SweepPoint>,
    pub kneading_violations: Vec<SweepViolation>,
    pub entropy_violations: Vec<SweepViolation>,
    /// Largest adjacent entropy decrease seen, tolerance or not.
    pub max_entropy_drop: f64,
}

impl SweepReport {
    pub fn clean(&self) -> bool {
        self.kneading_violations.is_empty() && self.entropy_violations.is_empty()
    }
}

/// Kneading word and entropy across a parameter grid, with adjacent-pair
/// monotonicity checks. Grid points are processed in parallel; the report
/// is assembled in grid order, so output is independent of scheduling.
pub fn sweep(family: &UnimodalFamily, opts: &SweepOptions) -> Result<SweepReport, EntropyError> {
    if opts.grid_points < 2 {
        return Err(EntropyError::BadParameter {
            name: "grid_points",
            value: opts.grid_points,
            reason: "monotonicity needs at least two grid points",
        });
    }
    if !(opts.mu_min > 0.0 && opts.mu_min < opts.mu_max && opts.mu_max <= 1.0) {
        return Err(EntropyError::Family(FamilyError::OutOfRange {
            name: "mu range",
            value: opts.mu_min,
            expected: "0 < mu_min < mu_max <= 1",
        }));
    }
    let grid = crate::family::linspace(opts.mu_min, opts.mu_max, opts.grid_points);
    let points: Result<Vec<SweepPoint>, EntropyError> = grid
        .par_iter()
        .map(|&mu| {
            let word = family.kneading_sequence(mu, opts.depth, opts.tol_c)?;
            let (entropy, lap_depth) = if opts.compute_entropy {
                let report = entropy_estimate(family, mu, opts.entropy)?;
                (Some(report.h_estimate), Some(report.depth_reached))
            } else {
                (None, None)
            };
            Ok(SweepPoint { mu, word, entropy, lap_depth })
        })
        .collect();
    let points = points?;

    let mut kneading_violations = Vec::new();
    let mut entropy_violations = Vec::new();
    let mut max_entropy_drop = 0.0f64;
    for (i, pair) in points.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        // Truncations that agree on their overlap cannot be ordered and
        // count as equal, which monotonicity permits.
        if a.word.compare_parity_lex(&b.word) == Ok(std::cmp::Ordering::Greater) {
            kneading_violations.push(SweepViolation {
                kind: "kneading",
                index_left: i,
                index_right: i + 1,
                mu_left: a.mu,
                mu_right: b.mu,
                delta: 0.0,
                detail: format!("{} > {}", a.word, b.word),
            });
        }
        if let (Some(ha), Some(hb)) = (a.entropy, b.entropy) {
            let drop = ha - hb;
            max_entropy_drop = max_entropy_drop.max(drop);
            if drop > opts.entropy_tolerance {
                entropy_violations.push(SweepViolation {
                    kind: "entropy",
                    index_left: i,
                    index_right: i + 1,
                    mu_left: a.mu,
                    mu_right: b.mu,
                    delta: drop,
                    detail: format!("h {ha} -> {hb}"),
                });
            }
        }
    }
    Ok(SweepReport {
        family: family.name().to_string(),
        options: opts.clone(),
        points,
        kneading_violations,
        entropy_violations,
        max_entropy_drop,
    })
}
