//! Reduction to the eight-parameter canonical form and the left-plane shear.

use serde::{Deserialize, Serialize};

use crate::error::{FlpError, Result};
use crate::linalg::{Affine2, IDENTITY};
use crate::system::{
    equilibrium_info, AffineField, EquilibriumKind, FilippovSystem, Placement, Side, Stability,
};
use crate::transform::{SideMap, Step, StepKind, TransformRecord};

/// Parameters of the canonical system
///
/// ```text
/// x > 0:  x' = 2α x + y,          y' = (m - α²) x + β
/// x < 0:  x' = γ1 x + δ y + η,    y' = γ2 x + γ3 y + ρ
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: i8,
    pub eta: f64,
    pub rho: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub m: i8,
}

impl CanonicalParams {
    /// Parameters with `m = -1`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(alpha: f64, beta: f64, delta: i8, eta: f64, rho: f64, gamma1: f64, gamma2: f64, gamma3: f64) -> Self {
        CanonicalParams { alpha, beta, delta, eta, rho, gamma1, gamma2, gamma3, m: -1 }
    }

    pub fn tau(&self) -> f64 {
        self.gamma1 + self.gamma3
    }

    #[allow(non_snake_case)]
    pub fn Delta(&self) -> f64 {
        self.gamma1 * self.gamma3 - self.gamma2
    }

    pub fn nu(&self) -> f64 {
        self.gamma2.abs().sqrt()
    }

    pub fn right_field(&self) -> AffineField {
        let a = self.alpha;
        AffineField::new([[2.0 * a, 1.0], [self.m as f64 - a * a, 0.0]], [0.0, self.beta])
    }

    pub fn left_field(&self) -> AffineField {
        AffineField::new(
            [[self.gamma1, self.delta as f64], [self.gamma2, self.gamma3]],
            [self.eta, self.rho],
        )
    }

    pub fn system(&self) -> FilippovSystem {
        FilippovSystem::new(self.left_field(), self.right_field())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FocusSide {
    Left,
    Right,
    Both,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Premises {
    pub cross_products_distinct: bool,
    pub admissible_focus_side: FocusSide,
    /// Stability of the admissible focus on each side, when there is one.
    pub left_focus_stability: Option<Stability>,
    pub right_focus_stability: Option<Stability>,
}

fn admissible_focus(field: &AffineField, side: Side) -> Result<Option<Stability>> {
    let e = equilibrium_info(field, side)?;
    Ok((e.kind == EquilibriumKind::Focus && e.placement == Placement::Admissible).then_some(e.stability))
}

pub fn cross_products_distinct(sys: &FilippovSystem) -> bool {
    let p = sys.right.a[0][1] * sys.left.b[0];
    let q = sys.left.a[0][1] * sys.right.b[0];
    (p - q).abs() > 1e-12 * (1.0 + p.abs() + q.abs())
}

pub fn check_premises(sys: &FilippovSystem) -> Result<Premises> {
    let left = admissible_focus(&sys.left, Side::Left)?;
    let right = admissible_focus(&sys.right, Side::Right)?;
    let side = match (left.is_some(), right.is_some()) {
        (true, true) => FocusSide::Both,
        (true, false) => FocusSide::Left,
        (false, true) => FocusSide::Right,
        (false, false) => FocusSide::None,
    };
    Ok(Premises {
        cross_products_distinct: cross_products_distinct(sys),
        admissible_focus_side: side,
        left_focus_stability: left,
        right_focus_stability: right,
    })
}

/// Intermediate quantities of the reduction, for a system whose right
/// field has `a12 != 0`.
#[derive(Debug, Clone, Copy)]
struct Intermediates {
    a11: f64,
    b: f64,
    c11: f64,
    c21: f64,
    c22: f64,
    d1: f64,
    d2: f64,
    u: f64,
    w: f64,
    m: i8,
    delta: i8,
}

fn intermediates(sys: &FilippovSystem) -> Intermediates {
    let r = &sys.right;
    let l = &sys.left;
    let (p11, p12, p21, p22) = (r.a[0][0], r.a[0][1], r.a[1][0], r.a[1][1]);
    let (q11, q12, q21, q22) = (l.a[0][0], l.a[0][1], l.a[1][0], l.a[1][1]);
    let (b1p, b2p, b1m, b2m) = (r.b[0], r.b[1], l.b[0], l.b[1]);
    let s = p12 * p12;
    let a11 = p11 + p22;
    let a21 = (p12 * p21 - p11 * p22) / s;
    let b = (p12 * b2p - p22 * b1p) / s;
    let c11 = (q11 * p12 + q12 * p22) / p12;
    let c22 = (p12 * q22 - p22 * q12) / p12;
    let d1 = (p12 * b1m - q12 * b1p) / p12;
    let c21 = (p12 * q21 + q22 * p22 - p22 * c11) / s;
    let d2 = (p12 * b2m - p22 * b1m - b1p * c22) / s;
    let u = if q12 == 0.0 { 1.0 } else { 1.0 / (q12 * p12).abs() };
    let disc = a11 * a11 + 4.0 * a21 * s;
    let scale = a11 * a11 + (4.0 * a21 * s).abs();
    let (w, m) = if disc.abs() <= 1e-14 * scale {
        (1.0, 0)
    } else {
        (disc.abs().sqrt() / (2.0 * s), if disc > 0.0 { 1 } else { -1 })
    };
    let delta = sgn(q12 * p12);
    Intermediates { a11, b, c11, c21, c22, d1, d2, u, w, m, delta }
}

fn sgn(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn params_from(sys: &FilippovSystem) -> CanonicalParams {
    let k = intermediates(sys);
    let s = sys.right.a[0][1].powi(2);
    CanonicalParams {
        alpha: k.a11 / (2.0 * k.w * s),
        beta: k.b / (k.w * s),
        delta: k.delta,
        eta: k.u * k.d1,
        rho: k.u * k.d2 / k.w,
        gamma1: k.u * k.c11 / k.w,
        gamma2: k.u * k.c21 / (k.w * k.w),
        gamma3: k.u * k.c22 / k.w,
        m: k.m,
    }
}

fn reduction_steps(sys: &FilippovSystem) -> TransformRecord {
    let k = intermediates(sys);
    let r = &sys.right;
    let (p12, p22, b1p) = (r.a[0][1], r.a[1][1], r.b[0]);
    let mut rec = TransformRecord::identity();
    // old = V new + v
    let v_inv = [[1.0, 0.0], [-p22 / (p12 * p12), 1.0 / p12]];
    let cov = Affine2 { m: v_inv, v: [0.0, b1p / (p12 * p12)] };
    rec.push_step(Step::uniform(StepKind::ChangeOfVariables, SideMap::spatial(cov), false));
    rec.push_step(Step {
        kind: StepKind::TimeRescale,
        left: SideMap::new(Affine2::identity(), 1.0 / k.u),
        right: SideMap::new(Affine2::identity(), p12 * p12),
        swaps_sides: false,
    });
    let scale = Affine2 { m: [[k.w, 0.0], [0.0, 1.0]], v: [0.0, 0.0] };
    rec.push_step(Step::uniform(StepKind::Scale, SideMap::new(scale, k.w), false));
    rec
}

/// Reduce to the canonical form. The returned record maps the input
/// system's orbits onto the canonical system's orbits.
pub fn to_canonical(sys: &FilippovSystem) -> Result<(CanonicalParams, TransformRecord)> {
    if sys.left.is_degenerate() {
        return Err(FlpError::DegenerateField(Side::Left));
    }
    if sys.right.is_degenerate() {
        return Err(FlpError::DegenerateField(Side::Right));
    }
    let premises = check_premises(sys)?;
    if !premises.cross_products_distinct {
        return Err(FlpError::CrossProductsEqual);
    }
    let mut rec = TransformRecord::identity();
    let mut cur = *sys;
    match premises.admissible_focus_side {
        FocusSide::None => return Err(FlpError::NoAdmissibleFocus),
        FocusSide::Left => {
            // rotation by pi: swaps the half-planes and keeps orientation
            let rot = Affine2 { m: [[-1.0, 0.0], [0.0, -1.0]], v: [0.0, 0.0] };
            let step = Step::uniform(StepKind::Mirror, SideMap::spatial(rot), true);
            let mut one = TransformRecord::identity();
            one.push_step(step);
            cur = one.push_system(&cur);
            rec = rec.then(&one);
        }
        _ => {}
    }
    if cur.right.a[0][1] < 0.0 {
        let flip = Affine2 { m: [[1.0, 0.0], [0.0, -1.0]], v: [0.0, 0.0] };
        let mut one = TransformRecord::identity();
        one.push_step(Step::uniform(StepKind::FlipY, SideMap::spatial(flip), false));
        cur = one.push_system(&cur);
        rec = rec.then(&one);
    }
    let params = params_from(&cur);
    let rec = rec.then(&reduction_steps(&cur));
    Ok((params, rec))
}

/// Make `γ1 = γ3` with the shear `y -> y + κ x` on `x <= 0`, `κ = (γ1 - γ3)/2`.
pub fn shear_to_equal_gammas(p: &CanonicalParams) -> Result<(CanonicalParams, TransformRecord)> {
    if p.delta != 1 {
        return Err(FlpError::DeltaNotOne);
    }
    let kappa = 0.5 * (p.gamma1 - p.gamma3);
    let g = 0.5 * (p.gamma1 + p.gamma3);
    let out = CanonicalParams {
        gamma1: g,
        gamma3: g,
        gamma2: p.gamma2 + kappa * kappa,
        rho: p.rho + kappa * p.eta,
        ..*p
    };
    let shear = Affine2 { m: [[1.0, 0.0], [kappa, 1.0]], v: [0.0, 0.0] };
    let mut rec = TransformRecord::identity();
    rec.push_step(Step {
        kind: StepKind::Shear,
        left: SideMap::spatial(shear),
        right: SideMap::spatial(Affine2 { m: IDENTITY, v: [0.0, 0.0] }),
        swaps_sides: false,
    });
    Ok((out, rec))
}

/// Switching-line pattern keyed by `(δ, sign η)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CslPattern {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl CslPattern {
    pub fn letter(self) -> char {
        match self {
            CslPattern::A => 'a',
            CslPattern::B => 'b',
            CslPattern::C => 'c',
            CslPattern::D => 'd',
            CslPattern::E => 'e',
            CslPattern::F => 'f',
        }
    }
}

pub fn classify_csl(p: &CanonicalParams) -> Result<CslPattern> {
    if p.eta == 0.0 {
        return Err(FlpError::EtaZero);
    }
    let up = p.eta > 0.0;
    Ok(match (p.delta, up) {
        (0, false) => CslPattern::A,
        (0, true) => CslPattern::B,
        (-1, false) => CslPattern::C,
        (-1, true) => CslPattern::D,
        (1, false) => CslPattern::E,
        _ => CslPattern::F,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    fn fields_close(a: &AffineField, b: &AffineField, tol: f64) -> bool {
        a.a.iter().flatten().zip(b.a.iter().flatten()).all(|(x, y)| close(*x, *y, tol))
            && a.b.iter().zip(b.b.iter()).all(|(x, y)| close(*x, *y, tol))
    }

    #[test]
    fn canonical_input_is_fixed() {
        let p = CanonicalParams::new(1.0, 1.0, 1, 1.0, 0.0, 0.0, -1.0, 0.0);
        let (q, rec) = to_canonical(&p.system()).unwrap();
        assert_eq!(p, q);
        for z in [[1.0, 2.0], [-3.0, 0.5]] {
            let w = rec.push(&z);
            assert!(close(w[0], z[0], 1e-15) && close(w[1], z[1], 1e-15));
        }
    }

    #[test]
    fn closed_form_matches_pushed_fields() {
        let sys = FilippovSystem::new(
            AffineField::new([[0.3, -1.2], [0.7, 0.4]], [0.5, -0.3]),
            AffineField::new([[0.2, 2.0], [-1.5, 0.6]], [1.0, 0.4]),
        );
        let (p, rec) = to_canonical(&sys).unwrap();
        let pushed = rec.push_system(&sys);
        assert!(fields_close(&pushed.right, &p.right_field(), 1e-12), "{pushed:?} vs {p:?}");
        assert!(fields_close(&pushed.left, &p.left_field(), 1e-12), "{pushed:?} vs {p:?}");
        assert_eq!(p.m, -1);
        assert!(p.alpha > 0.0);
        assert!(!rec.has_reflection());
    }

    #[test]
    fn negative_a12_needs_reflection() {
        let sys = FilippovSystem::new(
            AffineField::new([[0.3, -1.2], [0.7, 0.4]], [0.5, -0.3]),
            AffineField::new([[0.2, -2.0], [1.5, 0.6]], [0.5, -1.0]),
        );
        let (p, rec) = to_canonical(&sys).unwrap();
        let pushed = rec.push_system(&sys);
        assert!(fields_close(&pushed.right, &p.right_field(), 1e-12));
        assert!(fields_close(&pushed.left, &p.left_field(), 1e-12));
        assert!(rec.has_reflection());
    }

    #[test]
    fn left_focus_is_rotated_over() {
        let sys = FilippovSystem::new(
            AffineField::new([[-0.2, 2.0], [-1.5, -0.1]], [1.0, -0.4]),
            AffineField::new([[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0]),
        );
        let pre = check_premises(&sys).unwrap();
        assert_eq!(pre.admissible_focus_side, FocusSide::Left);
        let (p, rec) = to_canonical(&sys).unwrap();
        assert!(rec.mirrored());
        assert!(p.alpha < 0.0);
        let pushed = rec.push_system(&sys);
        assert!(fields_close(&pushed.right, &p.right_field(), 1e-12));
        assert!(fields_close(&pushed.left, &p.left_field(), 1e-12));
    }

    #[test]
    fn premises_of_example1() {
        let sys = FilippovSystem::new(
            AffineField::new([[2.0, 1.0], [-2.0, 0.0]], [1.0, -1.0]),
            AffineField::new([[1.0, 1.0], [-1.25, 0.0]], [0.0, 1.0]),
        );
        let pre = check_premises(&sys).unwrap();
        assert!(pre.cross_products_distinct);
        assert_eq!(pre.admissible_focus_side, FocusSide::Both);
        assert_eq!(pre.left_focus_stability, Some(Stability::Unstable));
        assert_eq!(pre.right_focus_stability, Some(Stability::Unstable));
    }

    #[test]
    fn symmetric_data_has_equal_cross_products() {
        let f = AffineField::new([[0.5, 1.0], [-2.0, 0.0]], [1.0, 1.0]);
        let sys = FilippovSystem::new(f, f);
        assert!(!check_premises(&sys).unwrap().cross_products_distinct);
        assert_eq!(to_canonical(&sys).unwrap_err(), FlpError::CrossProductsEqual);
    }

    #[test]
    fn saddles_have_no_focus() {
        let f = AffineField::new([[1.0, 0.5], [0.5, -1.0]], [1.0, 0.0]);
        let g = AffineField::new([[-1.0, 2.0], [1.0, 1.0]], [0.3, 0.0]);
        let sys = FilippovSystem::new(f, g);
        assert_eq!(check_premises(&sys).unwrap().admissible_focus_side, FocusSide::None);
        assert_eq!(to_canonical(&sys).unwrap_err(), FlpError::NoAdmissibleFocus);
    }

    #[test]
    fn shear_reference_case() {
        let p = CanonicalParams::new(1.0, 1.0, 1, 1.0, -1.0, 2.0, -2.0, 0.0);
        let (q, rec) = shear_to_equal_gammas(&p).unwrap();
        assert_eq!((q.gamma1, q.gamma2, q.gamma3, q.eta, q.rho), (1.0, -1.0, 1.0, 1.0, 0.0));
        assert_eq!((q.tau(), q.Delta()), (p.tau(), p.Delta()));
        let pushed = rec.push_system(&p.system());
        assert!(fields_close(&pushed.left, &q.left_field(), 1e-15));
        assert_eq!(pushed.right, p.right_field());
    }

    #[test]
    fn shear_identity_when_equal() {
        let p = CanonicalParams::new(1.0, 1.0, 1, 1.0, -1.0, 0.5, -2.0, 0.5);
        let (q, _) = shear_to_equal_gammas(&p).unwrap();
        assert_eq!(p, q);
        let bad = CanonicalParams { delta: 0, ..p };
        assert_eq!(shear_to_equal_gammas(&bad).unwrap_err(), FlpError::DeltaNotOne);
    }

    #[test]
    fn csl_keys() {
        let mk = |d: i8, e: f64| CanonicalParams::new(1.0, 1.0, d, e, 0.0, 0.0, -1.0, 0.0);
        assert_eq!(classify_csl(&mk(0, 1.0)).unwrap(), CslPattern::B);
        assert_eq!(classify_csl(&mk(1, 1.0)).unwrap(), CslPattern::F);
        assert_eq!(classify_csl(&mk(-1, -1.0)).unwrap(), CslPattern::C);
        assert_eq!(classify_csl(&mk(1, 0.0)).unwrap_err(), FlpError::EtaZero);
    }
}
