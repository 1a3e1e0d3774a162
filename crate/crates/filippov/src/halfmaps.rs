//! Closed-form Poincaré half-maps of the canonical system with `γ1 = γ3`.
//!
//! The right map sends `(0, y)`, `y >= 0`, to its first return `(0, P_R(y))`
//! with `P_R(y) <= 0`; the inverse left map sends `(0, y)`, `y >= y_η`, to the
//! point `(0, P_L⁻¹(y))`, `P_L⁻¹(y) <= -η`, whose left orbit lands on `(0, y)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalParams;
use crate::error::{FlpError, Result};
use crate::quad;

/// `φ±(t) = 1 - e^{±γ3 t}(cos νt ∓ (γ3/ν) sin νt)`; `sign` is `+1.0` or `-1.0`.
pub fn phi(sign: f64, t: f64, gamma3: f64, nu: f64) -> f64 {
    1.0 - (sign * gamma3 * t).exp() * ((nu * t).cos() - sign * gamma3 / nu * (nu * t).sin())
}

/// `ψ±(t) = 1 - e^{±α t}(cos t ∓ α sin t)`; `sign` is `+1.0` or `-1.0`.
pub fn psi(sign: f64, t: f64, alpha: f64) -> f64 {
    1.0 - (sign * alpha * t).exp() * (t.cos() - sign * alpha * t.sin())
}

// ψ± written in s = t - π so that values near t = π keep full precision.
fn psi_s(sign: f64, s: f64, a: f64) -> f64 {
    1.0 + (sign * a * (s + PI)).exp() * (s.cos() - sign * a * s.sin())
}

/// Root of `ψ₊` in `(π, 2π]`, as an offset from `π`.
fn tangency_return_offset(a: f64) -> f64 {
    quad::bisect(|s| psi_s(1.0, s, a), 0.0, PI)
}

/// Violated clause of the half-map condition, if any.
pub fn addcond_violation(p: &CanonicalParams) -> Option<String> {
    let checks: [(bool, &str); 9] = [
        (p.m == -1, "m = -1"),
        (p.alpha > 0.0, "alpha > 0"),
        (p.beta > 0.0, "beta > 0"),
        (p.eta > 0.0, "eta > 0"),
        (p.rho - p.gamma3 * p.eta < 0.0, "rho - gamma3*eta < 0"),
        (p.delta == 1, "delta = 1"),
        (p.gamma1 == p.gamma3, "gamma1 = gamma3"),
        (p.tau() > 0.0, "tau > 0"),
        (p.tau() * p.tau() < 4.0 * p.Delta(), "tau^2 < 4 Delta"),
    ];
    checks.iter().find(|(ok, _)| !ok).map(|(_, what)| what.to_string())
}

pub fn satisfies_addcond(p: &CanonicalParams) -> bool {
    addcond_violation(p).is_none()
}

/// `(t̂⁻, t̂⁺)`: roots of `φ₊` in `(π/ν, 2π/ν]` and of `ψ₊` in `(π, 2π]`.
pub fn solve_t_hats(p: &CanonicalParams) -> Result<(f64, f64)> {
    if let Some(v) = addcond_violation(p) {
        return Err(FlpError::ConditionViolated(v));
    }
    let nu = p.nu();
    let t_minus = (PI + tangency_return_offset(p.gamma3 / nu)) / nu;
    let t_plus = PI + tangency_return_offset(p.alpha);
    Ok((t_minus, t_plus))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivatives {
    #[serde(rename = "dPR")]
    pub d_pr: f64,
    #[serde(rename = "dPLinv")]
    pub d_plinv: f64,
    #[serde(rename = "d2PR")]
    pub d2_pr: f64,
    #[serde(rename = "d2PLinv")]
    pub d2_plinv: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DZero {
    pub y: f64,
    pub d_prime: f64,
    pub residual: f64,
}

impl DZero {
    /// Sign of `D'` at the zero; positive means an unstable crossing cycle.
    pub fn d_prime_sign(&self) -> i8 {
        if self.d_prime > 0.0 {
            1
        } else if self.d_prime < 0.0 {
            -1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfMapContext {
    pub params: CanonicalParams,
    pub nu: f64,
    pub t_hat_minus: f64,
    pub t_hat_plus: f64,
    pub y_eta: f64,
    pub y_star: f64,
}

impl HalfMapContext {
    pub fn new(params: &CanonicalParams) -> Result<Self> {
        let (t_hat_minus, t_hat_plus) = solve_t_hats(params)?;
        let nu = params.nu();
        let mut ctx = HalfMapContext { params: *params, nu, t_hat_minus, t_hat_plus, y_eta: 0.0, y_star: 0.0 };
        let y_eta = ctx.left_at(t_hat_minus * nu - PI).0;
        ctx.y_eta = y_eta;
        ctx.y_star = y_eta.max(0.0);
        Ok(ctx)
    }

    fn right_coef(&self) -> f64 {
        let a = self.params.alpha;
        self.params.beta / (1.0 + a * a)
    }

    fn left_coef(&self) -> f64 {
        let p = &self.params;
        self.nu * (p.rho - p.gamma3 * p.eta) / p.Delta()
    }

    /// `(y, P_R(y))` at `t⁺ = π + s`.
    fn right_at(&self, s: f64) -> (f64, f64) {
        let a = self.params.alpha;
        let t = PI + s;
        let k = self.right_coef();
        let y = k * (-a * t).exp() * psi_s(1.0, s, a) / s.sin();
        let p = -k * (a * t).exp() * psi_s(-1.0, s, a) / s.sin();
        (y, p)
    }

    /// `(y, P_L⁻¹(y))` at `ν t⁻ = π + s`.
    fn left_at(&self, s: f64) -> (f64, f64) {
        let g = self.params.gamma3 / self.nu;
        let t = (PI + s) / self.nu;
        let c = self.left_coef();
        let eta = self.params.eta;
        let e = self.params.gamma3 * t;
        // φ± in the scaled variable
        let phi_m = 1.0 + (-g * (s + PI)).exp() * (s.cos() + g * s.sin());
        let phi_p = 1.0 + (g * (s + PI)).exp() * (s.cos() - g * s.sin());
        let y = -eta - c * phi_m / s.sin() * e.exp();
        let p = -eta + c * phi_p / s.sin() * (-e).exp();
        (y, p)
    }

    pub fn right_map_param(&self, t_plus: f64) -> Result<(f64, f64)> {
        if !(t_plus > PI && t_plus <= self.t_hat_plus) {
            return Err(FlpError::OutOfRange(t_plus));
        }
        if t_plus == self.t_hat_plus {
            return Ok((0.0, self.right_at(t_plus - PI).1));
        }
        Ok(self.right_at(t_plus - PI))
    }

    pub fn left_map_param(&self, t_minus: f64) -> Result<(f64, f64)> {
        if !(t_minus > PI / self.nu && t_minus <= self.t_hat_minus) {
            return Err(FlpError::OutOfRange(t_minus));
        }
        if t_minus == self.t_hat_minus {
            return Ok((self.y_eta, -self.params.eta));
        }
        Ok(self.left_at(t_minus * self.nu - PI))
    }

    fn invert<F: Fn(f64) -> f64>(y_of: F, s_max: f64, y: f64) -> f64 {
        let mut lo = 1e-3 * s_max;
        while y_of(lo) < y && lo > 1e-300 {
            lo *= 0.5;
        }
        quad::bisect(|s| y_of(s) - y, lo, s_max)
    }

    /// Return time `t⁺` of the right orbit from `(0, y)`.
    pub fn right_time(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0 && y.is_finite()) {
            return Err(FlpError::DomainError(y));
        }
        if y == 0.0 {
            return Ok(self.t_hat_plus);
        }
        let s = Self::invert(|s| self.right_at(s).0, self.t_hat_plus - PI, y);
        Ok(PI + s)
    }

    /// Flight time `t⁻` of the left orbit that lands on `(0, y)`.
    pub fn left_time(&self, y: f64) -> Result<f64> {
        if !(y >= self.y_eta && y.is_finite()) {
            return Err(FlpError::DomainError(y));
        }
        if y == self.y_eta {
            return Ok(self.t_hat_minus);
        }
        let s = Self::invert(|s| self.left_at(s).0, self.t_hat_minus * self.nu - PI, y);
        Ok((PI + s) / self.nu)
    }

    #[allow(non_snake_case)]
    pub fn P_R(&self, y: f64) -> Result<f64> {
        let t = self.right_time(y)?;
        Ok(self.right_at(t - PI).1)
    }

    #[allow(non_snake_case)]
    pub fn P_L_inv(&self, y: f64) -> Result<f64> {
        if y == self.y_eta {
            return Ok(-self.params.eta);
        }
        let t = self.left_time(y)?;
        Ok(self.left_at(t * self.nu - PI).1)
    }

    pub fn derivatives(&self, y: f64) -> Result<Derivatives> {
        if !(y > self.y_star) {
            return Err(FlpError::DomainError(y));
        }
        let p = &self.params;
        let (a, g, eta) = (p.alpha, p.gamma3, p.eta);
        let tp = self.right_time(y)?;
        let tm = self.left_time(y)?;
        let pr = self.right_at(tp - PI).1;
        let pl = self.left_at(tm * self.nu - PI).1;
        let d_pr = y / pr * (2.0 * a * tp).exp();
        let d2_pr = 2.0 * p.beta * p.beta / (1.0 + a * a) * ((a * tp).sinh() - a * tp.sin()) / pr.powi(3)
            * (3.0 * a * tp).exp();
        let d_plinv = (y + eta) / (pl + eta) * (-2.0 * g * tm).exp();
        let r = p.rho - g * eta;
        let d2_plinv = -2.0 * r * r / p.Delta() * ((g * tm).sinh() - g / self.nu * (self.nu * tm).sin())
            / (pl + eta).powi(3)
            * (-3.0 * g * tm).exp();
        Ok(Derivatives { d_pr, d_plinv, d2_pr, d2_plinv })
    }

    pub fn displacement(&self, y: f64) -> Result<f64> {
        if !(y >= self.y_star) {
            return Err(FlpError::DomainError(y));
        }
        Ok(self.P_L_inv(y)? - self.P_R(y)?)
    }

    pub fn displacement_prime(&self, y: f64) -> Result<f64> {
        let d = self.derivatives(y)?;
        Ok(d.d_plinv - d.d_pr)
    }

    fn d_at(&self, y: f64) -> f64 {
        self.displacement(y).unwrap_or(f64::NAN)
    }

    fn dp_at(&self, y: f64) -> f64 {
        self.displacement_prime(y).unwrap_or(f64::NEG_INFINITY)
    }

    fn zero_in(&self, lo: f64, hi: f64) -> DZero {
        let y = quad::bisect(|y| self.d_at(y), lo, hi);
        self.zero_record(y)
    }

    fn zero_record(&self, y: f64) -> DZero {
        let d_prime = if y > self.y_star { self.dp_at(y) } else { self.dp_at(y + 1e-9 * (1.0 + y)) };
        DZero { y, d_prime, residual: self.d_at(y) }
    }

    /// All zeros of `D` on `[y*, ∞)`, ascending. `D` is convex, so there are at most two.
    #[allow(non_snake_case)]
    pub fn zeros_of_D(&self) -> Vec<DZero> {
        let ys = self.y_star;
        let mut big = ys + 1.0;
        while big < 1e12 && !(self.dp_at(big) > 0.0 && self.d_at(big) > 0.0) {
            big *= 2.0;
        }
        let d0 = self.d_at(ys);
        let scale = 1.0 + self.P_L_inv(ys).unwrap_or(0.0).abs() + self.P_R(ys).unwrap_or(0.0).abs();
        // minimum of the convex D
        let y_min = if self.dp_at(ys + 1e-12 * (1.0 + ys)) >= 0.0 {
            ys
        } else if self.dp_at(big) <= 0.0 {
            big
        } else {
            quad::bisect(|y| self.dp_at(y), ys, big)
        };
        let d_min = self.d_at(y_min);
        let mut out = Vec::new();
        if d0.abs() <= 1e-9 * scale {
            out.push(self.zero_record(ys));
            if y_min > ys && d_min < 0.0 {
                out.push(self.zero_in(y_min, big));
            }
        } else if d0 < 0.0 {
            out.push(self.zero_in(ys, big));
        } else if d_min < 0.0 {
            out.push(self.zero_in(ys, y_min));
            out.push(self.zero_in(y_min, big));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example6(alpha: f64) -> CanonicalParams {
        // sheared: γ1 = γ3 = α, γ2 = -1, ρ = -1 + α
        CanonicalParams::new(alpha, 1.0, 1, 1.0, -1.0 + alpha, alpha, -1.0, alpha)
    }

    #[test]
    fn psi_plus_at_pi() {
        let a = 0.3;
        assert!((psi(1.0, PI, a) - (1.0 + (a * PI).exp())).abs() < 1e-14);
    }

    #[test]
    fn t_hat_plus_for_unit_alpha() {
        let p = CanonicalParams::new(1.0, 1.0, 1, 1.0, -1.0, 1.0, -2.0, 1.0);
        let (tm, tp) = solve_t_hats(&p).unwrap();
        assert!((tp - 3.940_733_135_692_915).abs() < 1e-12);
        assert!(psi(1.0, tp, 1.0).abs() < 1e-12);
        assert!(phi(1.0, tm, 1.0, 2f64.sqrt()).abs() < 1e-12);
        assert!(tm > PI / 2f64.sqrt() && tm <= 2.0 * PI / 2f64.sqrt());
    }

    #[test]
    fn t_hat_plus_tends_to_two_pi() {
        let mut last = 0.0;
        for a in [1.0, 0.1, 0.01, 1e-3, 1e-4] {
            let (_, tp) = solve_t_hats(&example6(a)).unwrap();
            assert!(tp > last && tp < 2.0 * PI);
            last = tp;
        }
        assert!(last > 6.2);
    }

    #[test]
    fn violations_are_reported() {
        let mut p = example6(0.5);
        p.gamma1 = 0.0;
        assert_eq!(solve_t_hats(&p).unwrap_err(), FlpError::ConditionViolated("gamma1 = gamma3".into()));
    }

    #[test]
    fn endpoints_of_parametric_maps() {
        let ctx = HalfMapContext::new(&example6(1.0)).unwrap();
        let (y, pr) = ctx.right_map_param(ctx.t_hat_plus).unwrap();
        assert_eq!(y, 0.0);
        let t = ctx.t_hat_plus;
        assert!((pr - (t.exp() * t.sin())).abs() < 1e-12 * pr.abs());
        let (y, pl) = ctx.left_map_param(ctx.t_hat_minus).unwrap();
        assert_eq!((y, pl), (ctx.y_eta, -1.0));
        assert!(ctx.right_map_param(PI).is_err());
    }

    #[test]
    fn inversion_round_trip() {
        let ctx = HalfMapContext::new(&example6(0.5)).unwrap();
        for y in [1e-6, 0.3, 2.0, 50.0, 1e5] {
            let t = ctx.right_time(y).unwrap();
            let (y2, _) = ctx.right_map_param(t).unwrap();
            assert!((y2 - y).abs() < 1e-10 * (1.0 + y));
        }
    }

    #[test]
    fn example6_has_one_unstable_zero() {
        let ctx = HalfMapContext::new(&example6(0.02)).unwrap();
        assert!(ctx.displacement(ctx.y_star).unwrap() < 0.0);
        let z = ctx.zeros_of_D();
        assert_eq!(z.len(), 1, "{z:?}");
        assert!(z[0].residual.abs() < 1e-10);
        assert_eq!(z[0].d_prime_sign(), 1);
    }
}
