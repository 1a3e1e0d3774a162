//! Randomized census of periodic orbits over systems with uniform entries.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canonical::{check_premises, FocusSide};
use crate::error::FlpError;
use crate::periodic::{coexistence, ConfigTag, CoexistenceReport};
use crate::system::{AffineField, FilippovSystem, Stability};

pub const DEFAULT_SEED: u64 = 20_240_611;
pub const DEFAULT_SYSTEMS: usize = 10_000;
/// Entries are drawn uniformly from `[-ENTRY_RANGE, ENTRY_RANGE]`.
pub const ENTRY_RANGE: f64 = 3.0;

/// Seed from `FLP_SEED` when set and parseable, else `DEFAULT_SEED`.
pub fn seed_from_env() -> u64 {
    std::env::var("FLP_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

fn random_field(rng: &mut ChaCha8Rng) -> AffineField {
    let mut u = || rng.gen_range(-ENTRY_RANGE..=ENTRY_RANGE);
    AffineField::new([[u(), u()], [u(), u()]], [u(), u()])
}

/// `n` nondegenerate systems drawn from `seed`; degenerate draws are skipped.
pub fn random_systems(seed: u64, n: usize) -> Vec<FilippovSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let left = random_field(&mut rng);
        let right = random_field(&mut rng);
        let sys = FilippovSystem::new(left, right);
        if sys.is_nondegenerate() {
            out.push(sys);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepIssue {
    pub index: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub seed: u64,
    pub n_systems: usize,
    /// Systems by number of sliding orbits; the last slot counts more than two.
    pub sliding_histogram: [usize; 4],
    pub configurations: BTreeMap<String, usize>,
    pub coexistence_types: BTreeSet<(usize, usize)>,
    pub other: usize,
    pub violations: Vec<SweepIssue>,
    /// Systems with a sliding orbit that fail the necessary conditions.
    pub necessity_failures: Vec<SweepIssue>,
    pub errors: Vec<SweepIssue>,
}

impl SweepSummary {
    pub fn clean(&self) -> bool {
        self.sliding_histogram[3] == 0
            && self.other == 0
            && self.violations.is_empty()
            && self.necessity_failures.is_empty()
    }
}

/// Focus conditions that must hold whenever a sliding orbit exists.
fn necessity(sys: &FilippovSystem, report: &CoexistenceReport) -> Option<String> {
    if report.n_sliding == 0 {
        return None;
    }
    let Ok(p) = check_premises(sys) else { return Some("premises not computable".into()) };
    if !p.cross_products_distinct {
        return Some("cross products equal".into());
    }
    if p.admissible_focus_side == FocusSide::None {
        return Some("no admissible focus".into());
    }
    let foci = [p.left_focus_stability, p.right_focus_stability];
    let attractive_only = report.sliding().all(|r| r.time_sign > 0);
    let repulsive_only = report.sliding().all(|r| r.time_sign < 0);
    if attractive_only && !foci.contains(&Some(Stability::Unstable)) {
        return Some("attractive sliding orbit without an unstable focus".into());
    }
    if repulsive_only && !foci.contains(&Some(Stability::Stable)) {
        return Some("repulsive sliding orbit without a stable focus".into());
    }
    None
}

enum Outcome {
    Report(CoexistenceReport, Option<String>),
    Violation(String),
    Error(String),
}

fn analyze(sys: &FilippovSystem) -> Outcome {
    match coexistence(sys) {
        Ok(r) => {
            let n = necessity(sys, &r);
            Outcome::Report(r, n)
        }
        Err(FlpError::TheoremViolation(m)) => Outcome::Violation(m),
        Err(e) => Outcome::Error(e.to_string()),
    }
}

/// Analyze `n` random systems from `seed`, spread over the available cores.
/// The summary does not depend on scheduling.
pub fn run_sweep(seed: u64, n: usize) -> SweepSummary {
    let systems = random_systems(seed, n);
    let workers = std::thread::available_parallelism().map_or(1, |k| k.get()).min(16);
    let chunk = systems.len().div_ceil(workers).max(1);
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = systems
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(analyze).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut out = SweepSummary { seed, n_systems: n, ..Default::default() };
    for (index, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Report(r, nec) => {
                out.sliding_histogram[r.n_sliding.min(3)] += 1;
                if r.n_crossing + r.n_sliding > 0 {
                    out.coexistence_types.insert(r.counts());
                }
                if let Some(c) = r.configuration {
                    *out.configurations.entry(format!("{:?}", c.tag)).or_default() += 1;
                    if c.tag == ConfigTag::Other {
                        out.other += 1;
                    }
                }
                if let Some(message) = nec {
                    out.necessity_failures.push(SweepIssue { index, message });
                }
            }
            Outcome::Violation(message) => {
                if message.contains("sliding periodic orbits") {
                    out.sliding_histogram[3] += 1;
                }
                out.violations.push(SweepIssue { index, message });
            }
            Outcome::Error(message) => out.errors.push(SweepIssue { index, message }),
        }
    }
    out
}
