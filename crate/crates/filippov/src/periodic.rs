//! Enumeration and classification of crossing and sliding periodic orbits.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::canonical::{shear_to_equal_gammas, to_canonical};
use crate::error::{FlpError, Result};
use crate::flow::{first_return, Orbit, OrbitEngine, OrbitSegment, TerminalEvent};
use crate::halfmaps::{satisfies_addcond, DZero, HalfMapContext};
use crate::quad;
use crate::system::{
    classify_point, equilibrium_info, sigma_decomposition, tangency_points, EquilibriumKind, FilippovSystem,
    Placement, RegionLabel, Side, Stability, Visibility,
};
use crate::transform::TransformRecord;

/// Segment budget for orbits launched from tangency points.
pub const LAUNCH_BUDGET: usize = 64;
/// Two orbits are the same when their axis points agree to this relative tolerance.
pub const DEDUP_TOL: f64 = 1e-7;
/// Largest accepted `|R(y) - y|` (relative) for a numerically located crossing cycle.
pub const CROSSING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitKind {
    Standard,
    Crossing,
    Sliding,
}

/// One entry of the ordered axis signature of a closed orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AxisMark {
    Cross { y: f64 },
    Touch { y: f64, side: Side },
    Slide { from: f64, to: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Token {
    #[serde(rename = "S↑")]
    SlideUp,
    #[serde(rename = "S↓")]
    SlideDown,
    #[serde(rename = "C")]
    Cross,
    #[serde(rename = "T_L")]
    TangL,
    #[serde(rename = "T_R")]
    TangR,
    #[serde(rename = "R")]
    Right,
    #[serde(rename = "L")]
    Left,
}

impl Token {
    pub fn symbol(self) -> &'static str {
        match self {
            Token::SlideUp => "S↑",
            Token::SlideDown => "S↓",
            Token::Cross => "C",
            Token::TangL => "T_L",
            Token::TangR => "T_R",
            Token::Right => "R",
            Token::Left => "L",
        }
    }

    fn mirror_x(self) -> Token {
        match self {
            Token::TangL => Token::TangR,
            Token::TangR => Token::TangL,
            Token::Right => Token::Left,
            Token::Left => Token::Right,
            t => t,
        }
    }

    fn mirror_y(self) -> Token {
        match self {
            Token::SlideUp => Token::SlideDown,
            Token::SlideDown => Token::SlideUp,
            t => t,
        }
    }
}

pub fn word_string(word: &[Token]) -> String {
    word.iter().map(|t| t.symbol()).collect::<Vec<_>>().join(" ")
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConfigTag {
    F1A_a,
    F1A_b,
    F1A_c,
    F1A_d,
    F2A_a,
    F2A_b,
    F2A_c,
    Other,
}

impl ConfigTag {
    pub fn is_pair(self) -> bool {
        matches!(self, ConfigTag::F2A_a | ConfigTag::F2A_b | ConfigTag::F2A_c)
    }
}

/// The symmetry `(x, y, t) -> (sx x, sy y, st t)` that carries an orbit to its pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    pub sx: i8,
    pub sy: i8,
    pub st: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConfigurationLabel {
    pub tag: ConfigTag,
    pub frame: Frame,
}

impl ConfigurationLabel {
    fn other() -> Self {
        ConfigurationLabel { tag: ConfigTag::Other, frame: Frame { sx: 1, sy: 1, st: 1 } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbitRecord {
    pub kind: OrbitKind,
    /// One lap. For `time_sign = -1` the segments belong to the time-reversed
    /// system and durations are positive.
    pub orbit: Orbit,
    pub axis_signature: Vec<AxisMark>,
    pub word: Vec<Token>,
    pub time_sign: i8,
    pub period: f64,
    /// Derivative of the full return map, for crossing orbits.
    pub multiplier: Option<f64>,
    pub hyperbolic: bool,
    pub stability: Option<Stability>,
    /// The orbit touches a tangency point without sliding.
    pub grazing: bool,
    /// Zero of the displacement function this orbit came from, in canonical coordinates.
    pub d_zero: Option<DZero>,
    pub configuration: Option<ConfigurationLabel>,
}

impl PeriodicOrbitRecord {
    /// Axis points visited by the lap, ascending.
    pub fn axis_points(&self) -> Vec<f64> {
        let mut ys: Vec<f64> = self.orbit.segments.iter().map(|s| s.start()[1]).collect();
        ys.sort_by(f64::total_cmp);
        ys
    }

    pub fn same_orbit(&self, other: &PeriodicOrbitRecord) -> bool {
        same_points(&self.axis_points(), &other.axis_points())
    }

    pub fn word_string(&self) -> String {
        word_string(&self.word)
    }
}

fn same_points(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(p, q)| (p - q).abs() <= DEDUP_TOL * (1.0 + p.abs().max(q.abs())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoexistenceReport {
    pub n_crossing: usize,
    pub n_sliding: usize,
    pub n_standard: usize,
    pub configuration: Option<ConfigurationLabel>,
    pub records: Vec<PeriodicOrbitRecord>,
}

impl CoexistenceReport {
    pub fn counts(&self) -> (usize, usize) {
        (self.n_crossing, self.n_sliding)
    }

    pub fn tag(&self) -> Option<ConfigTag> {
        self.configuration.map(|c| c.tag)
    }

    pub fn sliding(&self) -> impl Iterator<Item = &PeriodicOrbitRecord> {
        self.records.iter().filter(|r| r.kind == OrbitKind::Sliding)
    }

    pub fn crossing(&self) -> impl Iterator<Item = &PeriodicOrbitRecord> {
        self.records.iter().filter(|r| r.kind == OrbitKind::Crossing)
    }
}

fn junction_token(sys: &FilippovSystem, y: f64) -> Option<Token> {
    match classify_point(sys, y) {
        RegionLabel::TangencyLeft => Some(Token::TangL),
        RegionLabel::TangencyRight => Some(Token::TangR),
        _ => None,
    }
}

/// Word and axis signature of a lap of `sys`.
pub fn encode_lap(sys: &FilippovSystem, lap: &[OrbitSegment]) -> (Vec<Token>, Vec<AxisMark>) {
    let n = lap.len();
    let mut word = Vec::new();
    let mut sig = Vec::new();
    for i in 0..n {
        let prev = &lap[(i + n - 1) % n];
        let seg = &lap[i];
        let y = seg.start()[1];
        match (prev, seg) {
            (OrbitSegment::Slide { .. }, OrbitSegment::Flow { side, .. }) => {
                word.push(if *side == Side::Right { Token::TangR } else { Token::TangL });
            }
            (OrbitSegment::Flow { .. }, OrbitSegment::Flow { .. }) => match junction_token(sys, y) {
                Some(t) => {
                    word.push(t);
                    let side = if t == Token::TangL { Side::Left } else { Side::Right };
                    sig.push(AxisMark::Touch { y, side });
                }
                None => {
                    word.push(Token::Cross);
                    sig.push(AxisMark::Cross { y });
                }
            },
            (OrbitSegment::Flow { .. }, OrbitSegment::Slide { .. }) => {
                if let Some(t) = junction_token(sys, y) {
                    word.push(t);
                }
            }
            (OrbitSegment::Slide { .. }, OrbitSegment::Slide { .. }) => {}
        }
        match seg {
            OrbitSegment::Flow { side, .. } => word.push(if *side == Side::Right { Token::Right } else { Token::Left }),
            OrbitSegment::Slide { y_start, y_end, .. } => {
                word.push(if y_end > y_start { Token::SlideUp } else { Token::SlideDown });
                sig.push(AxisMark::Slide { from: *y_start, to: *y_end });
            }
        }
    }
    if let Some(k) = word.iter().position(|t| matches!(t, Token::SlideUp | Token::SlideDown)) {
        word.rotate_left(k);
    }
    (word, sig)
}

fn apply_frame(word: &[Token], sx: i8, sy: i8) -> Vec<Token> {
    word.iter()
        .map(|&t| {
            let t = if sx < 0 { t.mirror_x() } else { t };
            if sy < 0 {
                t.mirror_y()
            } else {
                t
            }
        })
        .collect()
}

fn cyclic_eq(a: &[Token], b: &[Token]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|k| (0..a.len()).all(|i| a[(i + k) % a.len()] == b[i]))
}

use Token::{Cross as C, Left as L, Right as R, SlideDown as SD, SlideUp as SU, TangL as TL, TangR as TR};

const F1A_A: &[Token] = &[SU, TR, R];
const F1A_B: &[Token] = &[SU, TR, R, C, L];
const F1A_C: &[Token] = &[SU, TR, R, TL, L];
const F1A_D: &[Token] = &[SU, TR, R, SD, TL, L];
const PAIR_B: &[Token] = &[SD, TL, L];
const PAIR_C: &[Token] = &[SD, TL, L, C, R];

pub const FRAMES: [(i8, i8); 4] = [(1, 1), (-1, 1), (1, -1), (-1, -1)];

/// Pattern of a single sliding orbit word and the spatial frame that matches it.
pub fn match_single(word: &[Token]) -> Option<(ConfigTag, i8, i8)> {
    let patterns = [(ConfigTag::F1A_a, F1A_A), (ConfigTag::F1A_b, F1A_B), (ConfigTag::F1A_c, F1A_C), (ConfigTag::F1A_d, F1A_D)];
    for (sx, sy) in FRAMES {
        let w = apply_frame(word, sx, sy);
        for (tag, p) in patterns {
            if cyclic_eq(&w, p) {
                return Some((tag, sx, sy));
            }
        }
    }
    None
}

fn match_pair(a: &PeriodicOrbitRecord, b: &PeriodicOrbitRecord) -> Option<ConfigurationLabel> {
    for (first, second) in [(a, b), (b, a)] {
        for (sx, sy) in FRAMES {
            let w1 = apply_frame(&first.word, sx, sy);
            if !cyclic_eq(&w1, F1A_A) {
                continue;
            }
            if first.time_sign != second.time_sign {
                // an attractive loop and a repulsive loop of the same shape
                if match_single(&second.word).map(|m| m.0) == Some(ConfigTag::F1A_a) {
                    let st = first.time_sign;
                    return Some(ConfigurationLabel { tag: ConfigTag::F2A_a, frame: Frame { sx, sy, st } });
                }
                continue;
            }
            let w2 = apply_frame(&second.word, sx, sy);
            let frame = Frame { sx, sy, st: first.time_sign };
            if cyclic_eq(&w2, PAIR_B) {
                return Some(ConfigurationLabel { tag: ConfigTag::F2A_b, frame });
            }
            if cyclic_eq(&w2, PAIR_C) {
                return Some(ConfigurationLabel { tag: ConfigTag::F2A_c, frame });
            }
        }
    }
    None
}

/// Configuration of the sliding orbits among `records`.
pub fn classify_configuration(records: &[PeriodicOrbitRecord]) -> ConfigurationLabel {
    let sliding: Vec<&PeriodicOrbitRecord> = records.iter().filter(|r| r.kind == OrbitKind::Sliding).collect();
    match sliding.as_slice() {
        [one] => match match_single(&one.word) {
            Some((tag, sx, sy)) => ConfigurationLabel { tag, frame: Frame { sx, sy, st: one.time_sign } },
            None => ConfigurationLabel::other(),
        },
        [a, b] => match_pair(a, b).unwrap_or_else(ConfigurationLabel::other),
        _ => ConfigurationLabel::other(),
    }
}

fn lap_period(lap: &[OrbitSegment]) -> f64 {
    lap.iter().map(|s| s.duration()).sum()
}

fn touches_tangency(sys: &FilippovSystem, lap: &[OrbitSegment]) -> bool {
    lap.iter().any(|s| junction_token(sys, s.start()[1]).is_some())
}

/// Whether some slide of the lap runs over attractive sliding points.
fn has_attractive_slide(sys: &FilippovSystem, lap: &[OrbitSegment]) -> bool {
    lap.iter().any(|s| match s {
        OrbitSegment::Slide { y_start, y_end, .. } => {
            classify_point(sys, 0.5 * (y_start + y_end)) == RegionLabel::AttractiveSliding
        }
        _ => false,
    })
}

/// Closed laps reached from the tangency points of `sys` and of its time reversal:
/// `(sliding, grazing)` where grazing laps touch a tangency without sliding.
fn launch_cycles(sys: &FilippovSystem) -> Result<(Vec<PeriodicOrbitRecord>, Vec<PeriodicOrbitRecord>)> {
    let mut sliding: Vec<PeriodicOrbitRecord> = Vec::new();
    let mut grazing: Vec<PeriodicOrbitRecord> = Vec::new();
    let reversed = sys.time_reversed();
    for (st, s) in [(1i8, sys), (-1i8, &reversed)] {
        let engine = OrbitEngine::new(s);
        for t in tangency_points(s) {
            if t.visibility == Visibility::Degenerate {
                continue;
            }
            let orbit = engine.orbit(t.location, LAUNCH_BUDGET)?;
            let Some(lap) = orbit.lap() else { continue };
            if lap.is_empty() {
                continue;
            }
            let is_sliding = lap.iter().any(|x| x.is_slide());
            if is_sliding && !has_attractive_slide(s, lap) {
                continue;
            }
            if !is_sliding && !touches_tangency(s, lap) {
                continue;
            }
            let (word, axis_signature) = encode_lap(s, lap);
            let period = lap_period(lap);
            let rec = PeriodicOrbitRecord {
                kind: if is_sliding { OrbitKind::Sliding } else { OrbitKind::Crossing },
                orbit: Orbit { segments: lap.to_vec(), terminal: TerminalEvent::Closed { period, cycle_start: 0 } },
                axis_signature,
                word,
                time_sign: st,
                period,
                multiplier: None,
                hyperbolic: false,
                stability: None,
                grazing: !is_sliding,
                d_zero: None,
                configuration: None,
            };
            let bucket = if is_sliding { &mut sliding } else { &mut grazing };
            if !bucket.iter().any(|r| r.same_orbit(&rec)) {
                bucket.push(rec);
            }
        }
    }
    Ok((sliding, grazing))
}

/// Sliding periodic orbits, found by launching from every tangency point
/// forward and in reversed time.
pub fn find_sliding_orbits(sys: &FilippovSystem) -> Result<Vec<PeriodicOrbitRecord>> {
    Ok(launch_cycles(sys)?.0)
}

/// Return map of a crossing point: `(y1, y2, t1, t2)` through both half-planes,
/// or `None` if the orbit leaves the crossing set.
fn crossing_return(sys: &FilippovSystem, y: f64) -> Option<(f64, f64, f64, f64)> {
    if classify_point(sys, y) != RegionLabel::Crossing {
        return None;
    }
    let first = if sys.right.normal(y) > 0.0 { Side::Right } else { Side::Left };
    let h1 = first_return(sys.field(first), [0.0, y], first).ok()?;
    let y1 = h1.z[1];
    if classify_point(sys, y1) != RegionLabel::Crossing || sys.right.normal(y1) * first.sign() > 0.0 {
        return None;
    }
    let second = first.opposite();
    let h2 = first_return(sys.field(second), [0.0, y1], second).ok()?;
    Some((y1, h2.z[1], h1.t, h2.t))
}

fn return_multiplier(sys: &FilippovSystem, y: f64) -> Option<f64> {
    let h = 1e-6 * (1.0 + y.abs());
    let up = crossing_return(sys, y + h)?.1;
    let down = crossing_return(sys, y - h)?.1;
    Some((up - down) / (2.0 * h))
}

fn stability_of(multiplier: Option<f64>) -> Option<Stability> {
    multiplier.map(|m| {
        if m.abs() < 1.0 {
            Stability::Stable
        } else if m.abs() > 1.0 {
            Stability::Unstable
        } else {
            Stability::Neutral
        }
    })
}

fn crossing_record(sys: &FilippovSystem, y: f64, d_zero: Option<DZero>) -> Option<PeriodicOrbitRecord> {
    let (y1, y2, t1, t2) = crossing_return(sys, y)?;
    let first = if sys.right.normal(y) > 0.0 { Side::Right } else { Side::Left };
    let segments = vec![
        OrbitSegment::Flow { side: first, start: [0.0, y], end: [0.0, y1], duration: t1 },
        OrbitSegment::Flow { side: first.opposite(), start: [0.0, y1], end: [0.0, y2], duration: t2 },
    ];
    let period = t1 + t2;
    let (word, axis_signature) = encode_lap(sys, &segments);
    let multiplier = return_multiplier(sys, y);
    Some(PeriodicOrbitRecord {
        kind: OrbitKind::Crossing,
        orbit: Orbit { segments, terminal: TerminalEvent::Closed { period, cycle_start: 0 } },
        axis_signature,
        word,
        time_sign: 1,
        period,
        multiplier,
        hyperbolic: multiplier.is_some_and(|m| (m.abs() - 1.0).abs() > 1e-6),
        stability: stability_of(multiplier),
        grazing: false,
        d_zero,
        configuration: None,
    })
}

/// Crossing cycles as zeros of the displacement function, when the canonical
/// form of `sys` or of its time reversal satisfies the half-map condition.
/// Returns the starting ordinates on the original axis.
pub fn crossing_points_from_halfmaps(sys: &FilippovSystem) -> Option<Vec<(f64, DZero)>> {
    let reversed = sys.time_reversed();
    for s in [sys, &reversed] {
        let Ok((p, rec)) = to_canonical(s) else { continue };
        let (q, shear) = if p.delta == 1 {
            match shear_to_equal_gammas(&p) {
                Ok(v) => v,
                Err(_) => continue,
            }
        } else {
            (p, TransformRecord::identity())
        };
        if !satisfies_addcond(&q) {
            continue;
        }
        let Ok(ctx) = HalfMapContext::new(&q) else { continue };
        let full = rec.then(&shear);
        let out = ctx
            .zeros_of_D()
            .into_iter()
            .filter(|z| z.y > ctx.y_star + 1e-9 * (1.0 + ctx.y_star.abs()))
            .map(|z| (full.pullback(&[0.0, z.y])[1], z))
            .collect();
        return Some(out);
    }
    None
}

/// Offsets used to sample the return map away from an interval endpoint.
fn offsets() -> Vec<f64> {
    let mut g: Vec<f64> = (0..=18 * 24).map(|k| 1e-9 * 10f64.powf(k as f64 / 24.0)).collect();
    g.extend((1..=400).map(|k| 0.05 * k as f64));
    g.sort_by(f64::total_cmp);
    g
}

fn displacement(sys: &FilippovSystem, y: f64) -> f64 {
    crossing_return(sys, y).map_or(f64::NAN, |r| r.1 - y)
}

/// Boundary between defined and undefined samples, refined by bisection.
fn domain_edge(sys: &FilippovSystem, defined: f64, undefined: f64) -> f64 {
    let (mut a, mut b) = (defined, undefined);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if displacement(sys, m).is_nan() {
            b = m;
        } else {
            a = m;
        }
    }
    a
}

/// Ordinates of crossing cycles found by scanning the return map on the
/// rightward crossing intervals.
pub fn crossing_points_numeric(sys: &FilippovSystem) -> Vec<f64> {
    let dec = sigma_decomposition(sys);
    let g = offsets();
    let mut ys: Vec<f64> = Vec::new();
    for iv in dec.intervals.iter().filter(|iv| iv.label == RegionLabel::Crossing) {
        let probe = if iv.lo.is_finite() && iv.hi.is_finite() {
            0.5 * (iv.lo + iv.hi)
        } else if iv.lo.is_finite() {
            iv.lo + 1.0
        } else if iv.hi.is_finite() {
            iv.hi - 1.0
        } else {
            0.0
        };
        if sys.right.normal(probe) <= 0.0 {
            continue;
        }
        let inside = |y: f64| iv.lo < y && y < iv.hi;
        if iv.lo.is_finite() {
            ys.extend(g.iter().map(|d| iv.lo + d * (1.0 + iv.lo.abs())).filter(|&y| inside(y)));
        }
        if iv.hi.is_finite() {
            ys.extend(g.iter().map(|d| iv.hi - d * (1.0 + iv.hi.abs())).filter(|&y| inside(y)));
        }
        if !iv.lo.is_finite() && !iv.hi.is_finite() {
            ys.push(0.0);
            ys.extend(g.iter().flat_map(|&d| [d, -d]));
        }
    }
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let mut samples: Vec<(f64, f64)> = ys.iter().map(|&y| (y, displacement(sys, y))).collect();
    // refine next to the edges of the defined region
    let mut extra = Vec::new();
    for w in samples.windows(2) {
        let ((y0, d0), (y1, d1)) = (w[0], w[1]);
        if d0.is_nan() == d1.is_nan() {
            continue;
        }
        let (def, undef) = if d0.is_nan() { (y1, y0) } else { (y0, y1) };
        let edge = domain_edge(sys, def, undef);
        let dir = (def - undef).signum();
        let span = (def - edge).abs();
        for k in 0..=12 * 8 {
            let off = 1e-13 * (1.0 + edge.abs()) * 10f64.powf(k as f64 / 8.0);
            if off >= span {
                break;
            }
            let y = edge + dir * off;
            extra.push((y, displacement(sys, y)));
        }
        extra.push((edge, displacement(sys, edge)));
    }
    samples.extend(extra);
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    samples.dedup_by(|a, b| a.0 == b.0);

    let accept = |y: f64| {
        let d = displacement(sys, y);
        d.abs() <= CROSSING_TOL * (1.0 + y.abs())
    };
    let mut found: Vec<f64> = Vec::new();
    let push = |y: f64, found: &mut Vec<f64>| {
        if !found.iter().any(|&f| (f - y).abs() <= DEDUP_TOL * (1.0 + y.abs())) {
            found.push(y);
        }
    };
    for w in samples.windows(2) {
        let ((y0, d0), (y1, d1)) = (w[0], w[1]);
        if d0.is_nan() || d1.is_nan() {
            continue;
        }
        if d0 == 0.0 {
            push(y0, &mut found);
            continue;
        }
        if d0 * d1 < 0.0 {
            let y = quad::bisect(|y| displacement(sys, y), y0, y1);
            if accept(y) {
                push(y, &mut found);
            }
        }
    }
    // double zeros: local minima of |d| without a sign change
    for w in samples.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        if a.1.is_nan() || b.1.is_nan() || c.1.is_nan() {
            continue;
        }
        if b.1.abs() < a.1.abs() && b.1.abs() < c.1.abs() && a.1 * c.1 > 0.0 && b.1 * a.1 > 0.0 {
            let y = quad::golden_min(|y| displacement(sys, y).abs(), a.0, c.0, 200);
            if accept(y) {
                push(y, &mut found);
            }
        }
    }
    found.sort_by(f64::total_cmp);
    found
}

fn standard_records(sys: &FilippovSystem) -> Vec<PeriodicOrbitRecord> {
    let mut out = Vec::new();
    for side in [Side::Left, Side::Right] {
        let f = sys.field(side);
        let Ok(e) = equilibrium_info(f, side) else { continue };
        if e.kind != EquilibriumKind::Center || e.placement != Placement::Admissible {
            continue;
        }
        let period = 2.0 * PI / f.det().sqrt();
        out.push(PeriodicOrbitRecord {
            kind: OrbitKind::Standard,
            orbit: Orbit { segments: Vec::new(), terminal: TerminalEvent::Closed { period, cycle_start: 0 } },
            axis_signature: Vec::new(),
            word: Vec::new(),
            time_sign: 1,
            period,
            multiplier: Some(1.0),
            hyperbolic: false,
            stability: Some(Stability::Neutral),
            grazing: false,
            d_zero: None,
            configuration: None,
        });
    }
    out
}

fn grazing_with_multiplier(sys: &FilippovSystem, mut rec: PeriodicOrbitRecord) -> PeriodicOrbitRecord {
    let y = rec.orbit.segments.iter().map(|s| s.start()[1]).find(|&y| classify_point(sys, y) == RegionLabel::Crossing);
    let m = y.and_then(|y| return_multiplier(sys, y));
    let m = if rec.time_sign < 0 { m.map(|v| 1.0 / v) } else { m };
    rec.multiplier = m;
    rec.hyperbolic = m.is_some_and(|v| (v.abs() - 1.0).abs() > 1e-6);
    rec.stability = stability_of(m);
    rec
}

fn crossing_from(sys: &FilippovSystem, grazing: Vec<PeriodicOrbitRecord>) -> Vec<PeriodicOrbitRecord> {
    let mut out: Vec<PeriodicOrbitRecord> = Vec::new();
    match crossing_points_from_halfmaps(sys) {
        Some(points) => {
            for (y, z) in points {
                if let Some(r) = crossing_record(sys, y, Some(z)) {
                    out.push(r);
                }
            }
        }
        None => {
            for y in crossing_points_numeric(sys) {
                if let Some(r) = crossing_record(sys, y, None) {
                    if !out.iter().any(|o| o.same_orbit(&r)) {
                        out.push(r);
                    }
                }
            }
        }
    }
    for g in grazing {
        if !out.iter().any(|o| o.same_orbit(&g)) {
            out.push(grazing_with_multiplier(sys, g));
        }
    }
    out.sort_by(|a, b| a.axis_points()[0].total_cmp(&b.axis_points()[0]));
    out
}

/// Crossing periodic orbits, including orbits that graze a tangency point.
pub fn find_crossing_orbits(sys: &FilippovSystem) -> Result<Vec<PeriodicOrbitRecord>> {
    let (_, grazing) = launch_cycles(sys)?;
    Ok(crossing_from(sys, grazing))
}

fn violation(msg: String) -> FlpError {
    FlpError::TheoremViolation(msg)
}

/// Check the coexistence exclusions for a classified configuration.
fn check_exclusions(label: &ConfigurationLabel, crossing: &[&PeriodicOrbitRecord]) -> Result<()> {
    match label.tag {
        ConfigTag::F2A_a => {
            if !crossing.is_empty() {
                return Err(violation(format!("F2A_a with {} crossing orbits", crossing.len())));
            }
        }
        ConfigTag::F2A_b | ConfigTag::F2A_c | ConfigTag::F1A_c | ConfigTag::F1A_d => {
            if crossing.len() != 1 {
                return Err(violation(format!("{:?} with {} crossing orbits", label.tag, crossing.len())));
            }
            let want = if label.frame.st > 0 { Stability::Unstable } else { Stability::Stable };
            if crossing[0].stability != Some(want) {
                return Err(violation(format!(
                    "{:?}: crossing orbit is {:?}, expected {:?}",
                    label.tag, crossing[0].stability, want
                )));
            }
        }
        _ => {}
    }
    Ok(())
}

/// All periodic orbits of `sys`, with the sliding configuration and the
/// coexistence exclusions checked.
pub fn coexistence(sys: &FilippovSystem) -> Result<CoexistenceReport> {
    let (mut sliding, grazing) = launch_cycles(sys)?;
    let crossing = crossing_from(sys, grazing);
    if sliding.len() > 2 {
        return Err(violation(format!("{} sliding periodic orbits", sliding.len())));
    }
    let configuration = (!sliding.is_empty()).then(|| classify_configuration(&sliding));
    if let Some(label) = &configuration {
        let counted: Vec<&PeriodicOrbitRecord> = crossing.iter().collect();
        check_exclusions(label, &counted)?;
        if sliding.len() == 1 {
            sliding[0].configuration = Some(*label);
        } else {
            for r in sliding.iter_mut() {
                r.configuration = Some(*label);
            }
        }
    }
    let standard = standard_records(sys);
    let (n_crossing, n_sliding, n_standard) = (crossing.len(), sliding.len(), standard.len());
    let mut records = sliding;
    records.extend(crossing);
    records.extend(standard);
    Ok(CoexistenceReport { n_crossing, n_sliding, n_standard, configuration, records })
}
