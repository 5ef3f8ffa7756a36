//! Symbolic dynamics of unimodal interval maps.
//!
//! The crate works with maps x -> mu * f(x) on [0, 1], where f rises to a
//! single peak of height 1 and the parameter mu in (0, 1] scales it. The
//! orbit of the turning point c, read off as a word over {L, C, R}, is the
//! kneading sequence; finite kneading words ending in C mark parameters
//! whose critical orbit is periodic.
//!
//! Modules:
//! - [`words`]: symbol words and the parity-lexicographic order.
//! - [`census`]: enumeration and Moebius-formula counting of kneading words.
//! - [`family`]: the map abstraction, branch inverses, Schwarzian checks.
//! - [`levels`]: inverse-branch level functions and the superstable solver.
//! - [`entropy`]: lap-count entropy and monotonicity sweeps.

pub mod census;
pub mod entropy;
pub mod family;
pub mod levels;
pub mod words;

pub use census::{count_kneading, enumerate_kneading, mobius, CensusError, KneadingCensus};
pub use entropy::{
    entropy_estimate, lap_count, sweep, EntropyError, EntropyOptions, EntropyReport, SweepOptions,
    SweepPoint, SweepReport, SweepViolation,
};
pub use family::{
    interior_grid, linspace, Branch, ClassCReport, ClassCWitness, FamilyError, UnimodalFamily,
    DEFAULT_TOL_C,
};
pub use levels::{
    realize_ivt, solve_superstable, superstable_table, table_order_violation, LevelError,
    LevelFunction, SuperstableRecord,
};
pub use words::{Symbol, Word, WordError};
