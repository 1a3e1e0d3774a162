//! Domain types, switching-line normalization, region labels, the sliding
//! field, equilibria and tangencies.

use serde::{Deserialize, Serialize};

use crate::error::{FlpError, Result};
use crate::linalg::{self, Affine2, Mat2, Vec2};
use crate::transform::{SideMap, Step, StepKind, TransformRecord};

/// Relative tolerance used to decide that a velocity component vanishes.
pub const VANISH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn of_x(x: f64) -> Option<Side> {
        if x > 0.0 {
            Some(Side::Right)
        } else if x < 0.0 {
            Some(Side::Left)
        } else {
            None
        }
    }
}

/// `z' = A z + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineField {
    pub a: Mat2,
    pub b: Vec2,
}

impl AffineField {
    pub fn new(a: Mat2, b: Vec2) -> Self {
        AffineField { a, b }
    }

    pub fn eval(&self, z: &Vec2) -> Vec2 {
        linalg::add(&linalg::mat_vec(&self.a, z), &self.b)
    }

    pub fn det(&self) -> f64 {
        linalg::det(&self.a)
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.a)
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().flatten().chain(self.b.iter()).all(|x| x.is_finite())
    }

    pub fn is_degenerate(&self) -> bool {
        let n = linalg::mat_norm(&self.a);
        self.det().abs() <= 1e-14 * n * n || n == 0.0
    }

    /// First velocity component on the axis, `a12 y + b1`.
    pub fn normal(&self, y: f64) -> f64 {
        self.a[0][1] * y + self.b[0]
    }

    /// Second velocity component on the axis, `a22 y + b2`.
    pub fn tangential(&self, y: f64) -> f64 {
        self.a[1][1] * y + self.b[1]
    }

    pub fn normal_tol(&self, y: f64) -> f64 {
        VANISH_TOL * (1.0 + (self.a[0][1] * y).abs() + self.b[0].abs())
    }

    pub fn tangential_tol(&self, y: f64) -> f64 {
        VANISH_TOL * (1.0 + (self.a[1][1] * y).abs() + self.b[1].abs())
    }

    pub fn normal_vanishes(&self, y: f64) -> bool {
        self.normal(y).abs() <= self.normal_tol(y)
    }

    pub fn vanishes(&self, y: f64) -> bool {
        self.normal_vanishes(y) && self.tangential(y).abs() <= self.tangential_tol(y)
    }

    pub fn negated(&self) -> AffineField {
        AffineField::new(linalg::scale(&self.a, -1.0), [-self.b[0], -self.b[1]])
    }

    /// Conjugate by the linear involution `diag(sx, sy)`.
    pub fn reflected(&self, sx: f64, sy: f64) -> AffineField {
        let s = [sx, sy];
        let mut a = self.a;
        for (i, row) in a.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x *= s[i] * s[j];
            }
        }
        AffineField::new(a, [sx * self.b[0], sy * self.b[1]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawSystem {
    pub plus: AffineField,
    pub minus: AffineField,
    pub c: Vec2,
    pub d: f64,
}

impl RawSystem {
    pub fn h(&self, z: &Vec2) -> f64 {
        self.c[0] * z[0] + self.c[1] * z[1] + self.d
    }
}

/// Switching line is `x = 0`; `left` governs `x < 0`, `right` governs `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilippovSystem {
    pub left: AffineField,
    pub right: AffineField,
}

impl FilippovSystem {
    pub fn new(left: AffineField, right: AffineField) -> Self {
        FilippovSystem { left, right }
    }

    pub fn field(&self, side: Side) -> &AffineField {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.left.is_degenerate() && !self.right.is_degenerate()
    }

    pub fn time_reversed(&self) -> FilippovSystem {
        FilippovSystem::new(self.left.negated(), self.right.negated())
    }

    /// Image under `(x, y) -> (-x, y)`; the fields trade sides.
    pub fn mirrored(&self) -> FilippovSystem {
        FilippovSystem::new(self.right.reflected(-1.0, 1.0), self.left.reflected(-1.0, 1.0))
    }

    /// Image under `(x, y) -> (x, -y)`.
    pub fn flipped_y(&self) -> FilippovSystem {
        FilippovSystem::new(self.left.reflected(1.0, -1.0), self.right.reflected(1.0, -1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    Crossing,
    AttractiveSliding,
    RepulsiveSliding,
    SingularSliding,
    TangencyLeft,
    TangencyRight,
    TangencyBoth,
    BoundaryEquilibriumLeft,
    BoundaryEquilibriumRight,
}

impl RegionLabel {
    pub fn is_sliding(self) -> bool {
        matches!(self, RegionLabel::AttractiveSliding | RegionLabel::RepulsiveSliding)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquilibriumKind {
    Focus,
    Node,
    Saddle,
    Center,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Placement {
    Admissible,
    Virtual,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumInfo {
    pub side: Side,
    pub location: Vec2,
    pub kind: EquilibriumKind,
    pub stability: Stability,
    pub placement: Placement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Visibility {
    Visible,
    Invisible,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencyInfo {
    pub location: Vec2,
    pub side: Side,
    pub visibility: Visibility,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisInterval {
    /// `-inf` when unbounded below (serialized as null).
    #[serde(deserialize_with = "lo_or_unbounded")]
    pub lo: f64,
    #[serde(deserialize_with = "hi_or_unbounded")]
    pub hi: f64,
    pub label: RegionLabel,
}

fn lo_or_unbounded<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
}

fn hi_or_unbounded<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl AxisInterval {
    pub fn contains(&self, y: f64) -> bool {
        self.lo < y && y < self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaDecomposition {
    pub intervals: Vec<AxisInterval>,
    pub points: Vec<(f64, RegionLabel)>,
}

impl SigmaDecomposition {
    pub fn interval_containing(&self, y: f64) -> Option<&AxisInterval> {
        self.intervals.iter().find(|iv| iv.contains(y))
    }

    /// Interval touching `y` on the side given by the sign of `dir`.
    pub fn adjacent(&self, y: f64, dir: f64) -> Option<&AxisInterval> {
        if let Some(iv) = self.interval_containing(y) {
            return Some(iv);
        }
        if dir > 0.0 {
            self.intervals.iter().find(|iv| iv.lo == y)
        } else {
            self.intervals.iter().find(|iv| iv.hi == y)
        }
    }

    /// Sequence of interval labels from bottom to top.
    pub fn pattern(&self) -> Vec<RegionLabel> {
        self.intervals.iter().map(|iv| iv.label).collect()
    }
}

/// Map `c·z + d = 0` onto `x = 0` by an orientation-preserving isometry.
pub fn normalize_to_y_axis(raw: &RawSystem) -> Result<(FilippovSystem, TransformRecord)> {
    let n = linalg::norm(&raw.c);
    if n == 0.0 || !n.is_finite() {
        return Err(FlpError::ZeroNormal);
    }
    let (n1, n2) = (raw.c[0] / n, raw.c[1] / n);
    let map = Affine2 { m: [[n1, n2], [-n2, n1]], v: [raw.d / n, 0.0] };
    let mut record = TransformRecord::identity();
    record.push_step(Step::uniform(StepKind::Normalize, SideMap::spatial(map), false));
    let source = FilippovSystem::new(raw.minus, raw.plus);
    Ok((record.push_system(&source), record))
}

pub fn classify_point(sys: &FilippovSystem, y: f64) -> RegionLabel {
    if sys.right.vanishes(y) {
        return RegionLabel::BoundaryEquilibriumRight;
    }
    if sys.left.vanishes(y) {
        return RegionLabel::BoundaryEquilibriumLeft;
    }
    let rz = sys.right.normal_vanishes(y);
    let lz = sys.left.normal_vanishes(y);
    if rz && lz {
        return if sys.right.a[0][1] * sys.left.a[0][1] < 0.0 {
            RegionLabel::SingularSliding
        } else {
            RegionLabel::TangencyBoth
        };
    }
    if rz {
        return RegionLabel::TangencyRight;
    }
    if lz {
        return RegionLabel::TangencyLeft;
    }
    let fr = sys.right.normal(y);
    let fl = sys.left.normal(y);
    if fr * fl > 0.0 {
        RegionLabel::Crossing
    } else if fr < 0.0 {
        RegionLabel::AttractiveSliding
    } else {
        RegionLabel::RepulsiveSliding
    }
}

fn normal_root(f: &AffineField) -> Option<f64> {
    let a12 = f.a[0][1];
    if a12 == 0.0 {
        None
    } else {
        Some(-f.b[0] / a12)
    }
}

/// Interior breakpoints of the axis labeling.
pub fn breakpoints(sys: &FilippovSystem) -> Vec<f64> {
    let mut pts: Vec<f64> = [normal_root(&sys.left), normal_root(&sys.right)]
        .into_iter()
        .flatten()
        .filter(|y| y.is_finite())
        .collect();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
    pts
}

pub fn sigma_decomposition(sys: &FilippovSystem) -> SigmaDecomposition {
    let bps = breakpoints(sys);
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend_from_slice(&bps);
    edges.push(f64::INFINITY);
    let mut intervals = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let probe = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo + 1.0 + lo.abs(),
            (false, true) => hi - 1.0 - hi.abs(),
            (false, false) => 0.0,
        };
        intervals.push(AxisInterval { lo, hi, label: classify_point(sys, probe) });
    }
    let points = bps.iter().map(|&y| (y, classify_point(sys, y))).collect();
    SigmaDecomposition { intervals, points }
}

/// `N(y) = fl gr - fr gl` as quadratic coefficients `[c0, c1, c2]`.
fn sliding_numerator(sys: &FilippovSystem) -> [f64; 3] {
    let (p1, q1) = (sys.left.a[0][1], sys.left.b[0]);
    let (p2, q2) = (sys.right.a[1][1], sys.right.b[1]);
    let (p3, q3) = (sys.right.a[0][1], sys.right.b[0]);
    let (p4, q4) = (sys.left.a[1][1], sys.left.b[1]);
    [q1 * q2 - q3 * q4, p1 * q2 + q1 * p2 - p3 * q4 - q3 * p4, p1 * p2 - p3 * p4]
}

/// Common root of both normal components, if any.
pub fn singular_point(sys: &FilippovSystem) -> Option<f64> {
    let yr = normal_root(&sys.right)?;
    let yl = normal_root(&sys.left)?;
    if (yr - yl).abs() <= 1e-12 * (1.0 + yr.abs()) {
        Some(yr)
    } else {
        None
    }
}

fn singular_reduced_field(sys: &FilippovSystem, y: f64) -> f64 {
    let (ar, al) = (sys.right.a[0][1], sys.left.a[0][1]);
    let den = al - ar;
    if den == 0.0 {
        0.0
    } else {
        (al * sys.right.tangential(y) - ar * sys.left.tangential(y)) / den
    }
}

/// Unchecked y-component of the sliding field.
pub fn sliding_field_raw(sys: &FilippovSystem, y: f64) -> f64 {
    if singular_point(sys).is_some() {
        return singular_reduced_field(sys, y);
    }
    let fr = sys.right.normal(y);
    let fl = sys.left.normal(y);
    let den = fl - fr;
    if den == 0.0 {
        return 0.0;
    }
    (fl * sys.right.tangential(y) - fr * sys.left.tangential(y)) / den
}

pub fn sliding_field(sys: &FilippovSystem, y: f64) -> Result<f64> {
    if classify_point(sys, y) == RegionLabel::Crossing {
        return Err(FlpError::NotSlidingRegion(y));
    }
    Ok(sliding_field_raw(sys, y))
}

/// Numerator and denominator of `F^s_y = num / den`, reduced at a singular point.
pub fn sliding_rational(sys: &FilippovSystem) -> ([f64; 3], [f64; 2]) {
    if singular_point(sys).is_some() {
        let (ar, al) = (sys.right.a[0][1], sys.left.a[0][1]);
        let num = [
            al * sys.right.b[1] - ar * sys.left.b[1],
            al * sys.right.a[1][1] - ar * sys.left.a[1][1],
            0.0,
        ];
        return (num, [al - ar, 0.0]);
    }
    let num = sliding_numerator(sys);
    let den = [sys.left.b[0] - sys.right.b[0], sys.left.a[0][1] - sys.right.a[0][1]];
    (num, den)
}

/// Real roots of `c0 + c1 y + c2 y^2`, ascending.
pub fn quadratic_roots(c: [f64; 3]) -> Vec<f64> {
    let [c0, c1, c2] = c;
    let scale = c0.abs().max(c1.abs()).max(c2.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if c2.abs() <= 1e-14 * scale {
        if c1.abs() <= 1e-14 * scale {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (c1 + if c1 >= 0.0 { sq } else { -sq });
    let mut roots = if q == 0.0 { vec![0.0, 0.0] } else { vec![q / c2, c0 / q] };
    roots.sort_by(|a, b| a.total_cmp(b));
    roots
}

pub fn pseudo_equilibria(sys: &FilippovSystem) -> Vec<Vec2> {
    let (num, _) = sliding_rational(sys);
    let dec = sigma_decomposition(sys);
    let mut out: Vec<Vec2> = Vec::new();
    for y in quadratic_roots(num) {
        let inside = dec
            .intervals
            .iter()
            .any(|iv| iv.label.is_sliding() && iv.contains(y));
        let dup = out.iter().any(|p| (p[1] - y).abs() <= 1e-12 * (1.0 + y.abs()));
        if inside && !dup {
            out.push([0.0, y]);
        }
    }
    out
}

pub fn equilibrium_info(field: &AffineField, side: Side) -> Result<EquilibriumInfo> {
    if field.is_degenerate() {
        return Err(FlpError::DegenerateField(side));
    }
    let inv = linalg::inverse(&field.a).ok_or(FlpError::DegenerateField(side))?;
    let p = linalg::mat_vec(&inv, &field.b);
    let location = [-p[0], -p[1]];
    let tr = field.trace();
    let det = field.det();
    let disc = tr * tr - 4.0 * det;
    let scale = linalg::mat_norm(&field.a).powi(2);
    let kind = if det < 0.0 {
        EquilibriumKind::Saddle
    } else if disc.abs() <= 1e-12 * scale {
        EquilibriumKind::Degenerate
    } else if disc < 0.0 {
        if tr.abs() <= 1e-12 * scale.sqrt() {
            EquilibriumKind::Center
        } else {
            EquilibriumKind::Focus
        }
    } else {
        EquilibriumKind::Node
    };
    let stability = if kind == EquilibriumKind::Saddle {
        Stability::Unstable
    } else if kind == EquilibriumKind::Center {
        Stability::Neutral
    } else if tr > 0.0 {
        Stability::Unstable
    } else if tr < 0.0 {
        Stability::Stable
    } else {
        Stability::Neutral
    };
    let xs = location[0] * side.sign();
    let placement = if location[0].abs() <= 1e-12 * (1.0 + linalg::norm(&location)) {
        Placement::Boundary
    } else if xs > 0.0 {
        Placement::Admissible
    } else {
        Placement::Virtual
    };
    Ok(EquilibriumInfo { side, location, kind, stability, placement })
}

/// Second time-derivative of x along the field at `(0, y)` where the normal vanishes.
pub fn normal_acceleration(field: &AffineField, y: f64) -> f64 {
    field.a[0][1] * field.tangential(y)
}

pub fn visibility(field: &AffineField, side: Side, y: f64) -> Visibility {
    let acc = normal_acceleration(field, y);
    let tol = VANISH_TOL * (1.0 + field.a[0][1].abs() * (field.tangential(y).abs() + field.tangential_tol(y)));
    if acc.abs() <= tol {
        Visibility::Degenerate
    } else if acc * side.sign() > 0.0 {
        Visibility::Visible
    } else {
        Visibility::Invisible
    }
}

pub fn tangency_points(sys: &FilippovSystem) -> Vec<TangencyInfo> {
    let mut out = Vec::new();
    for side in [Side::Left, Side::Right] {
        let f = sys.field(side);
        let Some(y) = normal_root(f) else { continue };
        if !y.is_finite() || f.vanishes(y) {
            continue;
        }
        out.push(TangencyInfo { location: [0.0, y], side, visibility: visibility(f, side, y) });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1(alpha: f64, rho: f64) -> FilippovSystem {
        FilippovSystem::new(
            AffineField::new([[2.0, 1.0], [-2.0, 0.0]], [1.0, rho]),
            AffineField::new([[2.0 * alpha, 1.0], [-1.0 - alpha * alpha, 0.0]], [0.0, 1.0]),
        )
    }

    #[test]
    fn example1_labels() {
        let s = example1(0.5, -1.0);
        assert_eq!(classify_point(&s, -0.5), RegionLabel::AttractiveSliding);
        assert_eq!(classify_point(&s, 0.0), RegionLabel::TangencyRight);
        assert_eq!(classify_point(&s, -1.0), RegionLabel::TangencyLeft);
        assert_eq!(classify_point(&s, 1.0), RegionLabel::Crossing);
        assert_eq!(classify_point(&s, -2.0), RegionLabel::Crossing);
    }

    #[test]
    fn example1_sliding_field() {
        let s = example1(0.5, -1.0);
        assert!(sliding_field(&s, -0.5).unwrap().abs() < 1e-15);
        assert!((sliding_field(&s, -0.2).unwrap() - 0.6).abs() < 1e-14);
        assert!(matches!(sliding_field(&s, 1.0), Err(FlpError::NotSlidingRegion(_))));
    }

    #[test]
    fn example1_pseudo_equilibria() {
        let p = pseudo_equilibria(&example1(0.5, -1.0));
        assert_eq!(p.len(), 1);
        assert!((p[0][1] + 0.5).abs() < 1e-14);
        let p = pseudo_equilibria(&example1(0.5, -3.0));
        assert_eq!(p.len(), 1);
        assert!((p[0][1] + 0.25).abs() < 1e-14);
    }

    #[test]
    fn example1_tangencies() {
        let t = tangency_points(&example1(0.5, -1.0));
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].side, Side::Left);
        assert_eq!(t[0].location, [0.0, -1.0]);
        assert_eq!(t[0].visibility, Visibility::Visible);
        assert_eq!(t[1].side, Side::Right);
        assert_eq!(t[1].location, [0.0, 0.0]);
        assert_eq!(t[1].visibility, Visibility::Visible);
    }

    #[test]
    fn equilibria_of_examples() {
        let right = AffineField::new([[2.0, 1.0], [-2.0, 0.0]], [0.0, 1.0]);
        let e = equilibrium_info(&right, Side::Right).unwrap();
        assert!((e.location[0] - 0.5).abs() < 1e-15 && (e.location[1] + 1.0).abs() < 1e-15);
        assert_eq!((e.kind, e.stability, e.placement), (EquilibriumKind::Focus, Stability::Unstable, Placement::Admissible));
        let left = example1(0.5, -1.0).left;
        let e = equilibrium_info(&left, Side::Left).unwrap();
        assert!((e.location[0] + 0.5).abs() < 1e-15 && e.location[1].abs() < 1e-15);
        assert_eq!((e.kind, e.placement), (EquilibriumKind::Focus, Placement::Admissible));
        let rot = AffineField::new([[0.0, 1.0], [-1.0, 0.0]], [0.0, 0.0]);
        let e = equilibrium_info(&rot, Side::Right).unwrap();
        assert_eq!((e.kind, e.stability, e.placement), (EquilibriumKind::Center, Stability::Neutral, Placement::Boundary));
        let z = AffineField::new([[1.0, 2.0], [2.0, 4.0]], [0.0, 0.0]);
        assert!(matches!(equilibrium_info(&z, Side::Left), Err(FlpError::DegenerateField(Side::Left))));
    }

    #[test]
    fn no_tangency_for_constant_normal() {
        let f = AffineField::new([[1.0, 0.0], [0.0, 1.0]], [1.0, 0.0]);
        let s = FilippovSystem::new(f, f);
        assert!(tangency_points(&s).is_empty());
        let dec = sigma_decomposition(&s);
        assert_eq!(dec.pattern(), vec![RegionLabel::Crossing]);
    }

    #[test]
    fn identical_rotations_cross_everywhere() {
        let f = AffineField::new([[0.0, 0.0], [-1.0, 0.0]], [1.0, 0.0]);
        let dec = sigma_decomposition(&FilippovSystem::new(f, f));
        assert_eq!(dec.intervals.len(), 1);
        assert_eq!(dec.intervals[0].label, RegionLabel::Crossing);
    }

    #[test]
    fn normalization_identity_and_rotation() {
        let f = AffineField::new([[1.0, 2.0], [3.0, 4.0]], [5.0, 6.0]);
        let g = AffineField::new([[-1.0, 0.5], [0.0, 2.0]], [1.0, 0.0]);
        let raw = RawSystem { plus: f, minus: g, c: [1.0, 0.0], d: 0.0 };
        let (sys, _) = normalize_to_y_axis(&raw).unwrap();
        assert_eq!(sys.right, f);
        assert_eq!(sys.left, g);
        let raw = RawSystem { plus: f, minus: g, c: [0.0, 1.0], d: 0.0 };
        let (_, rec) = normalize_to_y_axis(&raw).unwrap();
        let img = rec.push(&[3.0, 0.0]);
        assert!(img[0].abs() < 1e-15);
        let raw = RawSystem { plus: f, minus: g, c: [0.0, 0.0], d: 1.0 };
        assert_eq!(normalize_to_y_axis(&raw).unwrap_err(), FlpError::ZeroNormal);
    }

    #[test]
    fn normalization_general_line() {
        let f = AffineField::new([[1.0, 2.0], [3.0, 4.0]], [5.0, 6.0]);
        let raw = RawSystem { plus: f, minus: f, c: [2.0, -1.0], d: 3.0 };
        let (_, rec) = normalize_to_y_axis(&raw).unwrap();
        for x in [-2.0, 0.0, 5.0] {
            let z = [x, 2.0 * x + 3.0];
            assert!(raw.h(&z).abs() < 1e-15);
            assert!(rec.push(&z)[0].abs() < 1e-12);
        }
        assert!(rec.push(&[1.0, 0.0])[0] > 0.0);
    }

    #[test]
    fn singular_point_label_and_limit() {
        let left = AffineField::new([[1.0, -1.0], [0.0, 1.0]], [1.0, 2.0]);
        let right = AffineField::new([[1.0, 2.0], [0.0, -1.0]], [-2.0, 3.0]);
        let s = FilippovSystem::new(left, right);
        assert_eq!(classify_point(&s, 1.0), RegionLabel::SingularSliding);
        let v = sliding_field(&s, 1.0).unwrap();
        let near = sliding_field_raw(&s, 1.0 + 1e-6);
        assert!((v - near).abs() < 1e-5);
    }

    #[test]
    fn quadratic_root_cases() {
        assert_eq!(quadratic_roots([-1.0, 0.0, 1.0]), vec![-1.0, 1.0]);
        assert_eq!(quadratic_roots([2.0, 1.0, 0.0]), vec![-2.0]);
        assert!(quadratic_roots([1.0, 0.0, 1.0]).is_empty());
    }
}
