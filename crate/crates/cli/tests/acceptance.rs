//! Acceptance gate: ten end-to-end criteria covering the counting formula,
//! solver ground truth, orbit residuals, order agreement, shift
//! compatibility, Schwarzian signs, kneading and entropy monotonicity,
//! interval realization, and CLI determinism. Each test prints one PASS
//! line with its measured numbers (visible under --nocapture); tolerances
//! and runtime budgets are asserted.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

use kneading::{
    count_kneading, entropy_estimate, enumerate_kneading, interior_grid, linspace, realize_ivt,
    solve_superstable, superstable_table, sweep, table_order_violation, Branch, EntropyOptions,
    LevelFunction, SweepOptions, Symbol, UnimodalFamily, Word,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn families() -> [UnimodalFamily; 2] {
    [UnimodalFamily::logistic(), UnimodalFamily::sine()]
}

/// Plain scalar bisection, independent of the library's solver internals.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "oracle bracket must straddle the root");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn criterion_01_count_formula_matches_enumeration() {
    let t0 = Instant::now();
    let known_prefix: [u64; 8] = [1, 1, 1, 2, 3, 5, 9, 16];
    for n in 1..=14u32 {
        let census = enumerate_kneading(n).unwrap();
        let formula = count_kneading(n).unwrap();
        assert_eq!(census.words.len() as u64, formula, "n = {n}");
        assert_eq!(census.count_enumerated, formula, "n = {n}");
        if (n as usize) <= known_prefix.len() {
            assert_eq!(formula, known_prefix[n as usize - 1], "n = {n}");
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "took {dt:.2?}");
    println!("criterion 01 PASS: formula equals enumeration for n = 1..=14 ({dt:.2?})");
}

#[test]
fn criterion_02_solver_ground_truth() {
    let t0 = Instant::now();
    let fam = UnimodalFamily::logistic();

    let trivial = solve_superstable(&fam, &Word::parse("C").unwrap()).unwrap();
    assert_eq!(trivial.mu_star, 0.5);

    let golden = (1.0 + 5.0f64.sqrt()) / 4.0;
    let rc = solve_superstable(&fam, &Word::parse("RC").unwrap()).unwrap();
    assert!((rc.mu_star - golden).abs() < 1e-10, "RC: {}", rc.mu_star);

    let oracle = bisect(|mu| fam.iterate(mu, fam.c(), 3).unwrap() - fam.c(), 0.9, 1.0);
    let rlc = solve_superstable(&fam, &Word::parse("RLC").unwrap()).unwrap();
    assert!(
        (rlc.mu_star - oracle).abs() < 1e-8,
        "RLC: {} vs oracle {oracle}",
        rlc.mu_star
    );

    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "took {dt:.2?}");
    println!(
        "criterion 02 PASS: C = 0.5, RC - golden = {:.1e}, RLC - oracle = {:.1e} ({dt:.2?})",
        rc.mu_star - golden,
        rlc.mu_star - oracle
    );
}

#[test]
fn criterion_03_orbit_residuals_close_under_1e8() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for fam in families() {
        let table = superstable_table(&fam, 10).unwrap();
        assert_eq!(table.len(), 117, "census sizes for n = 1..=10");
        for rec in &table {
            let hit = fam.iterate(rec.mu_star, fam.c(), rec.word.len()).unwrap();
            let residual = (hit - fam.c()).abs();
            assert!(
                residual < 1e-8,
                "{} {}: residual {residual:.2e}",
                fam.name(),
                rec.word
            );
            worst = worst.max(residual);
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "took {dt:.2?}");
    println!("criterion 03 PASS: 234 records, worst residual {worst:.2e} ({dt:.2?})");
}

#[test]
fn criterion_04_parameter_order_equals_symbolic_order() {
    let t0 = Instant::now();
    for fam in families() {
        let table = superstable_table(&fam, 10).unwrap();
        assert!(
            table_order_violation(&table).is_none(),
            "{}: adjacent inversion",
            fam.name()
        );
        let by_mu: Vec<String> = table.iter().map(|r| r.word.to_string()).collect();
        let mut by_word: Vec<&Word> = table.iter().map(|r| &r.word).collect();
        by_word.sort_by(|a, b| a.compare_parity_lex(b).unwrap());
        let symbolic: Vec<String> = by_word.iter().map(|w| w.to_string()).collect();
        assert_eq!(by_mu, symbolic, "{}: full resort differs", fam.name());
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 120.0, "took {dt:.2?}");
    println!("criterion 04 PASS: mu order equals parity-lex order at n_max = 10 ({dt:.2?})");
}

#[test]
fn criterion_05_shift_compatibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51f7_c0de);
    let mut worst = 0.0f64;
    for fam in families() {
        let mut accepted = 0u32;
        let mut attempts = 0u32;
        while accepted < 100 {
            attempts += 1;
            assert!(attempts < 100_000, "{}: sampling starved", fam.name());
            let len = rng.random_range(1..=8usize);
            let stem: Vec<Symbol> = (0..len)
                .map(|_| if rng.random::<bool>() { Symbol::R } else { Symbol::L })
                .collect();
            let level = LevelFunction::new(&fam, &stem).unwrap();
            let mu = rng.random_range(0.55..1.0);
            let k = rng.random_range(0..=len);
            // Words with tight domains reject small mu; those draws are skipped.
            let residual = match level.shift_residual(mu, k) {
                Ok(r) => r,
                Err(_) => continue,
            };
            assert!(
                residual < 1e-9,
                "{}: stem {stem:?}, mu {mu}, k {k}: residual {residual:.2e}",
                fam.name()
            );
            worst = worst.max(residual);
            accepted += 1;
        }
    }
    println!("criterion 05 PASS: 200 shift residuals below 1e-9, worst {worst:.2e}");
}

fn fd_schwarzian_once(f: &impl Fn(f64) -> Option<f64>, x: f64, h: f64) -> Option<f64> {
    let fm2 = f(x - 2.0 * h)?;
    let fm1 = f(x - h)?;
    let f0 = f(x)?;
    let fp1 = f(x + h)?;
    let fp2 = f(x + 2.0 * h)?;
    let d1 = (fp1 - fm1) / (2.0 * h);
    let d2 = (fp1 - 2.0 * f0 + fm1) / (h * h);
    let d3 = (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h * h * h);
    if d1.abs() < 1e-12 {
        return None;
    }
    Some(d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1))
}

fn fd_schwarzian(f: impl Fn(f64) -> Option<f64>, x: f64, h: f64) -> Option<f64> {
    let coarse = fd_schwarzian_once(&f, x, h)?;
    let fine = fd_schwarzian_once(&f, x, h / 2.0)?;
    Some((4.0 * fine - coarse) / 3.0)
}

#[test]
fn criterion_06_schwarzian_signs() {
    let t0 = Instant::now();
    for fam in families() {
        // Shape Schwarzian is parameter-free, so the (mu, y) sample reduces
        // to its x projection for the forward map.
        for x in interior_grid(100) {
            let s = fam.schwarzian(x).unwrap();
            assert!(s < 0.0, "{} S({x}) = {s}", fam.name());
        }
        for mu in linspace(0.05, 1.0, 100) {
            for t in interior_grid(100) {
                let y = t * mu;
                for branch in [Branch::Left, Branch::Right] {
                    let s = fam.schwarzian_inverse_branch(mu, branch, y).unwrap();
                    assert!(
                        s > 0.0,
                        "{} S_inv({mu}, {branch:?}, {y}) = {s}",
                        fam.name()
                    );
                }
            }
        }
    }

    // Composed inverse branches along admissible stems up to length 8,
    // checked by finite differences of the composition itself.
    let mut sampled = 0u32;
    for fam in families() {
        for n in 2..=9u32 {
            for word in &enumerate_kneading(n).unwrap().words {
                let level = LevelFunction::new(&fam, word.stem()).unwrap();
                for mu in [0.95, 1.0] {
                    for i in 1..=9u32 {
                        let y = 0.06 * i as f64;
                        let phi = |target: f64| level.eval_from(mu, target).ok();
                        if let Some(s) = fd_schwarzian(phi, y, 2e-3) {
                            assert!(
                                s > 0.0,
                                "{} stem {} at mu {mu}, y {y}: S = {s}",
                                fam.name(),
                                word
                            );
                            sampled += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(sampled > 1000, "only {sampled} composed points were defined");
    let dt = t0.elapsed();
    println!(
        "criterion 06 PASS: map Schwarzian negative, inverse positive on 100x100, \
         {sampled} composed points positive ({dt:.2?})"
    );
}

#[test]
fn criterion_07_kneading_monotone_on_sweep_grid() {
    let t0 = Instant::now();
    for fam in families() {
        let opts = SweepOptions { compute_entropy: false, ..SweepOptions::default() };
        let report = sweep(&fam, &opts).unwrap();
        assert_eq!(report.points.len(), 1000);
        assert!(
            report.kneading_violations.is_empty(),
            "{}: {:?}",
            fam.name(),
            report.kneading_violations[0]
        );
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "took {dt:.2?}");
    println!("criterion 07 PASS: zero kneading decreases on 1000-point grids ({dt:.2?})");
}

#[test]
fn criterion_08_entropy_values_and_monotonicity() {
    let t0 = Instant::now();
    let fam = UnimodalFamily::logistic();
    let opts = EntropyOptions::default();

    let full = entropy_estimate(&fam, 1.0, opts).unwrap();
    let ln2_gap = (full.h_estimate - std::f64::consts::LN_2).abs();
    assert!(ln2_gap < 1e-3, "h(1.0) = {}", full.h_estimate);

    let low = entropy_estimate(&fam, 0.7, opts).unwrap();
    assert!(low.h_estimate < 1e-3, "h(0.7) = {}", low.h_estimate);

    let rlc = solve_superstable(&fam, &Word::parse("RLC").unwrap()).unwrap();
    let golden_entropy = ((1.0 + 5.0f64.sqrt()) / 2.0).ln();
    let h_rlc = entropy_estimate(&fam, rlc.mu_star, opts).unwrap();
    let rlc_gap = (h_rlc.h_estimate - golden_entropy).abs();
    assert!(rlc_gap < 2e-2, "h(mu*(RLC)) = {}", h_rlc.h_estimate);

    let mut worst_drop = 0.0f64;
    for fam in families() {
        let report = sweep(&fam, &SweepOptions::default()).unwrap();
        assert!(
            report.entropy_violations.is_empty(),
            "{}: {:?}",
            fam.name(),
            report.entropy_violations[0]
        );
        worst_drop = worst_drop.max(report.max_entropy_drop);
    }

    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 300.0, "took {dt:.2?}");
    println!(
        "criterion 08 PASS: h(1) - ln 2 = {ln2_gap:.1e}, h(0.7) = {:.1e}, \
         h(mu*(RLC)) gap {rlc_gap:.1e}, worst grid drop {worst_drop:.1e} ({dt:.2?})",
        low.h_estimate
    );
}

#[test]
fn criterion_09_interval_realization() {
    let t0 = Instant::now();
    let fam = UnimodalFamily::logistic();
    let rlc = Word::parse("RLC").unwrap();
    let direct = solve_superstable(&fam, &rlc).unwrap().mu_star;
    let realized = realize_ivt(&fam, &rlc, 0.81, 1.0, 25).unwrap();
    assert!(
        (realized - direct).abs() < 1e-6,
        "RLC realized {realized} vs solved {direct}"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0x1f7a_11ce);
    for fam in families() {
        let table = superstable_table(&fam, 6).unwrap();
        // "C" sits at the bottom of the table, so every longer word has a
        // superstable neighbor below it to serve as the left endpoint.
        let pool: Vec<usize> = (0..table.len()).filter(|&i| table[i].word.len() >= 2).collect();
        let mut chosen = std::collections::BTreeSet::new();
        while chosen.len() < 10 {
            chosen.insert(pool[rng.random_range(0..pool.len())]);
        }
        for &i in &chosen {
            let rec = &table[i];
            let mu1 = table[i - 1].mu_star;
            let mu2 = if i + 1 < table.len() { table[i + 1].mu_star } else { 1.0 };
            let found = realize_ivt(&fam, &rec.word, mu1, mu2, 25).unwrap();
            assert!(
                (found - rec.mu_star).abs() < 1e-6,
                "{} {}: realized {found} vs solved {}",
                fam.name(),
                rec.word,
                rec.mu_star
            );
        }
    }
    let dt = t0.elapsed();
    println!("criterion 09 PASS: RLC and 20 random words realized within 1e-6 ({dt:.2?})");
}

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_kneading"))
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

#[test]
fn criterion_10_cli_determinism() {
    let t0 = Instant::now();
    let commands: &[&[&str]] = &[
        &["enumerate", "--n", "14"],
        &["count", "--n", "14"],
        &["solve", "--family", "logistic", "--word", "RLC"],
        &["solve", "--family", "sine", "--word", "RLLC", "--format", "json"],
        &["table", "--family", "logistic", "--n-max", "8"],
        &["table", "--family", "sine", "--n-max", "6", "--format", "json"],
        &["sweep", "--family", "logistic", "--grid", "300", "--depth", "25"],
        &[
            "sweep", "--family", "sine", "--grid", "60", "--depth", "20", "--entropy",
            "--tree-depth", "400", "--node-cap", "100000",
        ],
        &["entropy", "--family", "logistic", "--mu", "0.97"],
        &["entropy", "--family", "sine", "--mu", "0.9", "--format", "json"],
        &["check", "--family", "logistic", "--mu-points", "20", "--x-points", "60"],
        &["check", "--family", "sine", "--mu-points", "20", "--x-points", "60"],
        &["ivt", "--family", "logistic", "--word", "RLC", "--mu1", "0.81", "--mu2", "1.0"],
    ];
    for args in commands {
        let first = run_cli(args);
        let second = run_cli(args);
        assert_eq!(first.status.code(), Some(0), "{args:?}: {:?}", first.status);
        assert_eq!(second.status.code(), Some(0), "{args:?}");
        assert!(!first.stdout.is_empty(), "{args:?} produced no output");
        assert_eq!(first.stdout, second.stdout, "{args:?} differs between runs");
        assert_eq!(first.stderr, second.stderr, "{args:?} stderr differs");
    }
    let dt = t0.elapsed();
    println!(
        "criterion 10 PASS: {} commands byte-identical across two runs ({dt:.2?})",
        commands.len()
    );
}
