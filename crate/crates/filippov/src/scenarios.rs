//! The worked examples: the two bifurcation families and the seven
//! single-configuration systems, with the constants they depend on.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalParams;
use crate::error::{FlpError, Result};
use crate::flow::first_return;
use crate::periodic::{coexistence, ConfigTag, CoexistenceReport};
use crate::quad;
use crate::system::{AffineField, FilippovSystem, Side};

fn t_star_residual(t: f64) -> f64 {
    t.cos() - t.sin() - (-t).exp()
}

/// Root of `cos t - sin t - e^{-t}` in `(π, 2π)`.
pub fn t_star() -> f64 {
    // the residual is negative just after π and positive at 3π/2
    quad::bisect(t_star_residual, PI + 1e-3, 1.5 * PI)
}

/// `β₀ = -1 / (e^{t*} sin t*)`.
pub fn beta0() -> f64 {
    let t = t_star();
    -1.0 / (t.exp() * t.sin())
}

/// Canonical right field with `x' = 2αx + y`, `y' = -(1+α²)x + β`.
fn right(alpha: f64, beta: f64) -> AffineField {
    AffineField::new([[2.0 * alpha, 1.0], [-1.0 - alpha * alpha, 0.0]], [0.0, beta])
}

/// Left field `[[2, 1], [-2, 0]]`, offset `(1, ρ)`; right field canonical with `β = 1`.
pub fn example1(alpha: f64, rho: f64) -> FilippovSystem {
    FilippovSystem::new(AffineField::new([[2.0, 1.0], [-2.0, 0.0]], [1.0, rho]), right(alpha, 1.0))
}

/// `ρ` tied to `γ1` in the second family.
pub fn example2_rho(gamma1: f64) -> f64 {
    (4.0 + gamma1 * gamma1) * ((2.0 * PI).exp() - 1.0) / 8.0
}

/// Left field `[[γ1, 1], [-1-γ1²/4, 0]]`, offset `(η, ρ(γ1))`; right field canonical with `α = β = 1`.
pub fn example2(gamma1: f64, eta: f64) -> FilippovSystem {
    let g2 = -1.0 - 0.25 * gamma1 * gamma1;
    FilippovSystem::new(AffineField::new([[gamma1, 1.0], [g2, 0.0]], [eta, example2_rho(gamma1)]), right(1.0, 1.0))
}

/// `α` of example (6).
pub const EXAMPLE6_ALPHA: f64 = 0.01;
/// `α` of example (7).
pub const EXAMPLE7_ALPHA: f64 = 0.05;
/// Offset of example (7) above `ρ_c(α)`.
pub const EXAMPLE7_EPS: f64 = 1e-3;
/// `α` of example (1).
pub const EXAMPLE1_ALPHA: f64 = 0.1;
/// Offset of examples (3) and (4) above `-β₀`.
pub const RHO_OFFSET: f64 = 1e-3;

/// Canonical parameters of the numbered examples (1) through (7).
pub fn numbered_example(k: usize) -> Result<CanonicalParams> {
    let b0 = beta0();
    Ok(match k {
        1 => CanonicalParams::new(EXAMPLE1_ALPHA, 1.0, 0, 1.0, 1.0, 1.0, 1.0, 1.0),
        2 => CanonicalParams::new(1.0, 1.5 * b0, 1, 1.0, 0.0, 0.0, -1.0, 0.0),
        3 => CanonicalParams::new(1.0, b0, 1, 1.0, -b0 + RHO_OFFSET, 2.0, -2.0, 0.0),
        4 => CanonicalParams::new(1.0, 0.99 * b0, 1, 1.0, -b0 + RHO_OFFSET, 2.0, -2.0, 0.0),
        5 => CanonicalParams::new(1.0, 1.0, -1, 1.0, 1.0, -2.0, 2.0, 0.0),
        6 => {
            let a = EXAMPLE6_ALPHA;
            CanonicalParams::new(a, 1.0, 1, 1.0, -1.0, 2.0 * a, -1.0 - a * a, 0.0)
        }
        7 => {
            let a = EXAMPLE7_ALPHA;
            CanonicalParams::new(a, 1.0, 1, 1.0, solve_rho_c(a)? + EXAMPLE7_EPS, 2.0, -2.0, 0.0)
        }
        _ => return Err(FlpError::OutOfRange(k as f64)),
    })
}

/// Configuration each numbered example is expected to show.
pub fn expected_tag(k: usize) -> ConfigTag {
    match k {
        1 => ConfigTag::F1A_a,
        2 => ConfigTag::F1A_b,
        3 => ConfigTag::F1A_c,
        4 => ConfigTag::F1A_d,
        5 => ConfigTag::F2A_a,
        6 => ConfigTag::F2A_b,
        7 => ConfigTag::F2A_c,
        _ => ConfigTag::Other,
    }
}

/// Ordinate `y₂ > 0` whose right orbit lands on `T_L = (0, -1)`.
pub fn example1_y2(alpha: f64) -> Result<f64> {
    let back = right(alpha, 1.0).negated();
    Ok(first_return(&back, [0.0, -1.0], Side::Right)?.z[1])
}

/// `K` with `y₃(ρ) = -1 + Kρ`, where `(0, y₃)` is the return of the left orbit from `T_L`.
pub fn example1_k() -> Result<f64> {
    let left = example1(1.0, -1.0).left;
    let y3 = first_return(&left, [0.0, -1.0], Side::Left)?.z[1];
    Ok(-1.0 - y3)
}

/// `ρ_c(α)`: the left orbit from `T_L` returns to `y₂(α)`.
pub fn solve_rho_c(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(FlpError::OutOfRange(alpha));
    }
    Ok((example1_y2(alpha)? + 1.0) / example1_k()?)
}

pub fn scenario_example1(alpha: f64, rho: f64) -> Result<CoexistenceReport> {
    coexistence(&example1(alpha, rho))
}

/// Return of the orbit that leaves the right tangency `(0, 0)`: first through
/// the right half-plane, then through the left one. Negative values land in
/// the sliding interval below the tangency.
pub fn example2_offset(gamma1: f64, eta: f64) -> Result<f64> {
    let sys = example2(gamma1, eta);
    let y1 = first_return(&sys.right, [0.0, 0.0], Side::Right)?.z[1];
    Ok(first_return(&sys.left, [0.0, y1], Side::Left)?.z[1])
}

/// `η_c(γ1)`: the orbit from the right tangency returns to it, found by
/// bisection of `example2_offset` over `[lo, hi]`.
pub fn solve_eta_c_in(gamma1: f64, lo: f64, hi: f64) -> Result<f64> {
    let f = |eta: f64| example2_offset(gamma1, eta).unwrap_or(f64::NAN);
    let (fa, fb) = (f(lo), f(hi));
    if !(fa * fb < 0.0) {
        return Err(FlpError::WindowNotFound(format!("eta_c not bracketed in [{lo}, {hi}]")));
    }
    Ok(quad::bisect(f, lo, hi))
}

pub fn solve_eta_c(gamma1: f64) -> Result<f64> {
    solve_eta_c_in(gamma1, 1.0, 36.0)
}

pub fn scenario_example2(gamma1: f64, eta: f64) -> Result<CoexistenceReport> {
    coexistence(&example2(gamma1, eta))
}

/// Reports on both sides of a critical parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub critical: f64,
    pub eps: f64,
    pub at: CoexistenceReport,
    pub above: CoexistenceReport,
    pub below: CoexistenceReport,
}

/// Candidate window sizes, shrinking geometrically from `1e-1` to `1e-6`.
pub fn window_sizes() -> Vec<f64> {
    (0..=20).map(|k| 10f64.powf(-1.0 - k as f64 / 4.0)).collect()
}

fn search_window<F, P>(critical: f64, label: &str, report: F, ok: P) -> Result<Window>
where
    F: Fn(f64) -> Result<CoexistenceReport>,
    P: Fn(&CoexistenceReport, &CoexistenceReport) -> bool,
{
    let at = report(critical)?;
    for eps in window_sizes() {
        let (Ok(above), Ok(below)) = (report(critical + eps), report(critical - eps)) else { continue };
        if ok(&above, &below) {
            return Ok(Window { critical, eps, at, above, below });
        }
    }
    Err(FlpError::WindowNotFound(label.to_string()))
}

/// Window around `ρ_c(α)` with one crossing and two sliding orbits above
/// and two crossing and one sliding orbit below.
pub fn example1_window(alpha: f64) -> Result<Window> {
    let rho_c = solve_rho_c(alpha)?;
    search_window(
        rho_c,
        "rho window",
        |rho| scenario_example1(alpha, rho),
        |above, below| {
            above.counts() == (1, 2)
                && above.tag() == Some(ConfigTag::F2A_c)
                && below.counts() == (2, 1)
                && below.tag() == Some(ConfigTag::F1A_a)
        },
    )
}

/// Window around `η_c(γ1)` with two crossing orbits and an `F1A_b` sliding
/// orbit above and three crossing orbits below.
pub fn example2_window(gamma1: f64) -> Result<Window> {
    let eta_c = solve_eta_c(gamma1)?;
    search_window(
        eta_c,
        "eta window",
        |eta| scenario_example2(gamma1, eta),
        |above, below| {
            above.counts() == (2, 1) && above.tag() == Some(ConfigTag::F1A_b) && below.counts() == (3, 0)
        },
    )
}
