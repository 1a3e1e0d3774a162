//! Exact affine flows, event-located returns to the switching line, and
//! Filippov orbits built from flow and sliding segments.

use serde::{Deserialize, Serialize};

use crate::error::{FlpError, Result};
use crate::linalg::{self, mat_vec, Mat2, Vec2};
use crate::quad;
use crate::system::{
    self, classify_point, equilibrium_info, sigma_decomposition, AffineField, EquilibriumKind,
    FilippovSystem, Placement, RegionLabel, SigmaDecomposition, Side, Stability, Visibility,
};

/// Landings this close to a tangency point are moved onto it.
pub const SNAP_TOL: f64 = 1e-10;
/// Closure tolerance for orbits that return through crossing points.
pub const CLOSURE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
enum Mode {
    /// `z(t) = z* + e^{At}(z0 - z*)`.
    Shifted { zstar: Vec2, d: Vec2, bd: Vec2 },
    /// `z(t) = e^{At} z0 + (∫ e^{As} ds) b`, for nearly singular `A`.
    Integral,
}

/// Closed-form solution of `z' = A z + b` from a fixed initial point.
#[derive(Debug, Clone, Copy)]
pub struct Propagator {
    field: AffineField,
    z0: Vec2,
    mu: f64,
    q: f64,
    bm: Mat2,
    mode: Mode,
}

impl Propagator {
    pub fn new(field: &AffineField, z0: Vec2) -> Self {
        let mu = 0.5 * field.trace();
        let q = field.det() - mu * mu;
        let bm = [[field.a[0][0] - mu, field.a[0][1]], [field.a[1][0], field.a[1][1] - mu]];
        let n = linalg::mat_norm(&field.a);
        let mode = match linalg::inverse(&field.a) {
            Some(inv) if field.det().abs() > 1e-13 * n * n => {
                let p = mat_vec(&inv, &field.b);
                let zstar = [-p[0], -p[1]];
                if linalg::norm(&zstar) <= 1e7 * (1.0 + linalg::norm(&z0)) {
                    let d = linalg::sub(&z0, &zstar);
                    Mode::Shifted { zstar, d, bd: mat_vec(&bm, &d) }
                } else {
                    Mode::Integral
                }
            }
            _ => Mode::Integral,
        };
        Propagator { field: *field, z0, mu, q, bm, mode }
    }

    fn cs(&self, t: f64) -> (f64, f64) {
        if self.q > 0.0 {
            let w = self.q.sqrt();
            ((w * t).cos(), (w * t).sin() / w)
        } else if self.q < 0.0 {
            let k = (-self.q).sqrt();
            ((k * t).cosh(), (k * t).sinh() / k)
        } else {
            (1.0, t)
        }
    }

    fn exp_apply(&self, t: f64, v: &Vec2) -> Vec2 {
        let (c, s) = self.cs(t);
        let e = (self.mu * t).exp();
        let bv = mat_vec(&self.bm, v);
        [e * (c * v[0] + s * bv[0]), e * (c * v[1] + s * bv[1])]
    }

    fn integral_weights(&self, t: f64) -> (f64, f64) {
        let rate = self.mu.abs() + self.q.abs().sqrt();
        let panels = (4.0 + rate * t.abs()).min(4000.0) as usize;
        let i0 = quad::integrate_fixed(|s| (self.mu * s).exp() * self.cs(s).0, 0.0, t, panels);
        let i1 = quad::integrate_fixed(|s| (self.mu * s).exp() * self.cs(s).1, 0.0, t, panels);
        (i0, i1)
    }

    pub fn at(&self, t: f64) -> Vec2 {
        match self.mode {
            Mode::Shifted { zstar, d, .. } => linalg::add(&zstar, &self.exp_apply(t, &d)),
            Mode::Integral => {
                let h = self.exp_apply(t, &self.z0);
                let (i0, i1) = self.integral_weights(t);
                let bb = mat_vec(&self.bm, &self.field.b);
                [h[0] + i0 * self.field.b[0] + i1 * bb[0], h[1] + i0 * self.field.b[1] + i1 * bb[1]]
            }
        }
    }

    fn x(&self, t: f64) -> f64 {
        match self.mode {
            Mode::Shifted { zstar, d, bd } => {
                let (c, s) = self.cs(t);
                zstar[0] + (self.mu * t).exp() * (c * d[0] + s * bd[0])
            }
            Mode::Integral => self.at(t)[0],
        }
    }

    fn xdot(&self, t: f64) -> f64 {
        self.field.eval(&self.at(t))[0]
    }
}

/// Exact solution of `z' = A z + b` at time `t`.
pub fn linear_flow(field: &AffineField, z0: Vec2, t: f64) -> Vec2 {
    if t == 0.0 {
        return z0;
    }
    Propagator::new(field, z0).at(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub t: f64,
    pub z: Vec2,
    /// Touches the axis at an extremum of x instead of crossing it.
    pub grazing: bool,
}

fn departure_check(field: &AffineField, z0: &Vec2, side: Side) -> Result<()> {
    let s = side.sign();
    if z0[0] != 0.0 {
        return if z0[0] * s > 0.0 { Ok(()) } else { Err(FlpError::WrongSide(side)) };
    }
    let y = z0[1];
    if field.normal_vanishes(y) {
        if field.vanishes(y) {
            return Err(FlpError::NoReturn);
        }
        return match system::visibility(field, side, y) {
            Visibility::Visible => Ok(()),
            Visibility::Invisible => Err(FlpError::WrongSide(side)),
            Visibility::Degenerate => Err(FlpError::DegenerateTangency(y)),
        };
    }
    if field.normal(y) * s > 0.0 {
        Ok(())
    } else {
        Err(FlpError::WrongSide(side))
    }
}

/// Smallest `t > 0` at which the orbit of `field` from `z0` meets `x = 0`,
/// staying in the open `side` half-plane before that.
pub fn first_return(field: &AffineField, z0: Vec2, side: Side) -> Result<Hit> {
    departure_check(field, &z0, side)?;
    let p = Propagator::new(field, z0);
    let hit = match p.mode {
        Mode::Shifted { zstar, d, bd } => shifted_return(&p, side.sign(), zstar[0], d[0], bd[0], z0[0] == 0.0)?,
        Mode::Integral => sampled_return(&p, side.sign())?,
    };
    let mut z = p.at(hit.0);
    z[0] = 0.0;
    Ok(Hit { t: hit.0, z, grazing: hit.1 })
}

/// `first_return` as `(t_hit, z_hit)`.
pub fn first_return_to_axis(field: &AffineField, z0: Vec2, side: Side) -> Result<(f64, Vec2)> {
    first_return(field, z0, side).map(|h| (h.t, h.z))
}

fn shifted_return(p: &Propagator, s: f64, xs: f64, d1: f64, e1: f64, on_axis: bool) -> Result<(f64, bool)> {
    let mu = p.mu;
    let pp = mu * d1 + e1;
    let qq = mu * e1 - p.q * d1;
    let x = |t: f64| p.x(t);
    let gtol = |t: f64, amp: f64| 1e-11 * (xs.abs() + amp * (mu * t).exp()) + 1e-300;
    let root = |a: f64, b: f64| quad::bisect(|t| x(t) * s, a, b);

    if p.q > 0.0 {
        let w = p.q.sqrt();
        let period = std::f64::consts::PI / w;
        let amp = d1.hypot(e1 / w);
        let phi = (qq / w).atan2(pp);
        let t_min = 1e-9 * period;
        // extremum times t_k = (phi + pi/2 + k pi) / w
        let base = (phi + std::f64::consts::FRAC_PI_2) / w;
        let mut k = (-(base / period)).floor() as i64;
        while base + k as f64 * period <= t_min {
            k += 1;
        }
        let mut a = 0.0;
        let mut first = on_axis;
        for _ in 0..200_000 {
            let b = base + k as f64 * period;
            let xb = x(b);
            if !xb.is_finite() {
                return Err(FlpError::NoReturn);
            }
            if first {
                first = false;
                if xb * s <= 0.0 {
                    return Err(FlpError::NoReturn);
                }
            } else if xb.abs() <= gtol(b, amp) {
                return Ok((b, true));
            } else if xb * s < 0.0 {
                return Ok((root(a, b), false));
            }
            let env = amp * (mu * b).exp();
            let trapped = xs * s > 0.0 && env < xs.abs() * (1.0 - 1e-12);
            if trapped && mu <= 0.0 {
                return Err(FlpError::NoReturn);
            }
            a = b;
            k += 1;
            if trapped && mu > 0.0 && amp > 0.0 {
                let t_skip = (xs.abs() / amp).ln() / mu;
                if t_skip - b > 4.0 * period {
                    let target = ((t_skip - 2.0 * period - base) / period).floor() as i64;
                    if target > k {
                        k = target;
                        a = base + (k - 1) as f64 * period;
                    }
                }
            }
        }
        return Err(FlpError::NoReturn);
    }

    // at most one extremum
    let t_ext = if p.q < 0.0 {
        let kap = (-p.q).sqrt();
        if qq != 0.0 {
            let z = -pp * kap / qq;
            if z.abs() < 1.0 {
                Some(z.atanh() / kap)
            } else {
                None
            }
        } else {
            None
        }
    } else if qq != 0.0 {
        Some(-pp / qq)
    } else {
        None
    };
    let rate = mu.abs() + p.q.abs().sqrt() + 1e-300;
    let mut a = 0.0;
    if let Some(te) = t_ext.filter(|&t| t > 1e-12 / rate && t.is_finite()) {
        let xb = x(te);
        if on_axis {
            if xb * s <= 0.0 {
                return Err(FlpError::NoReturn);
            }
        } else if xb.abs() <= gtol(te, d1.abs() + e1.abs() / rate) {
            return Ok((te, true));
        } else if xb * s < 0.0 {
            return Ok((root(0.0, te), false));
        }
        a = te;
    }
    let mut h = if a > 0.0 { a } else { 1.0 / rate.min(1e300) };
    let mut prev = x(a);
    for _ in 0..2000 {
        let b = a + h;
        let xb = x(b);
        if !xb.is_finite() {
            return Err(FlpError::NoReturn);
        }
        if xb * s <= 0.0 {
            let lo = if h > 1.0 / rate { a + 0.5 * h } else { a };
            let lo = if x(lo) * s > 0.0 { lo } else { a };
            return Ok((root(lo, b), false));
        }
        if xb.abs() >= prev.abs() || (xb - prev).abs() <= 1e-15 * xb.abs() {
            return Err(FlpError::NoReturn);
        }
        prev = xb;
        h *= 2.0;
    }
    Err(FlpError::NoReturn)
}

fn sampled_return(p: &Propagator, s: f64) -> Result<(f64, bool)> {
    let n = linalg::mat_norm(&p.field.a) + linalg::norm(&p.field.b);
    let mut t_prev = 0.0;
    let mut x_prev = p.x(0.0);
    let mut v_prev = p.xdot(0.0);
    let mut t = 1e-6 / (1.0 + n);
    let t_max = 1e7 / (1.0 + n);
    let scale = 1.0 + linalg::norm(&p.z0);
    while t < t_max {
        let xt = p.x(t);
        let vt = p.xdot(t);
        if !xt.is_finite() {
            return Err(FlpError::NoReturn);
        }
        if t_prev > 0.0 || x_prev != 0.0 {
            if xt * s <= 0.0 {
                return Ok((quad::bisect(|u| p.x(u) * s, t_prev, t), false));
            }
            if v_prev * vt < 0.0 && v_prev * s < 0.0 {
                let te = quad::bisect(|u| p.xdot(u), t_prev, t);
                let xe = p.x(te);
                if xe.abs() <= 1e-11 * scale {
                    return Ok((te, true));
                }
                if xe * s < 0.0 {
                    return Ok((quad::bisect(|u| p.x(u) * s, t_prev, te), false));
                }
            }
        }
        t_prev = t;
        x_prev = xt;
        v_prev = vt;
        t *= 1.1;
    }
    Err(FlpError::NoReturn)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OrbitSegment {
    Flow { side: Side, start: Vec2, end: Vec2, duration: f64 },
    /// `duration` is infinite when the slide approaches a pseudo-equilibrium.
    Slide { y_start: f64, y_end: f64, duration: f64 },
}

impl OrbitSegment {
    pub fn duration(&self) -> f64 {
        match self {
            OrbitSegment::Flow { duration, .. } | OrbitSegment::Slide { duration, .. } => *duration,
        }
    }

    pub fn start(&self) -> Vec2 {
        match self {
            OrbitSegment::Flow { start, .. } => *start,
            OrbitSegment::Slide { y_start, .. } => [0.0, *y_start],
        }
    }

    pub fn end(&self) -> Vec2 {
        match self {
            OrbitSegment::Flow { end, .. } => *end,
            OrbitSegment::Slide { y_end, .. } => [0.0, *y_end],
        }
    }

    pub fn is_slide(&self) -> bool {
        matches!(self, OrbitSegment::Slide { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TerminalEvent {
    /// Segments from `cycle_start` on form one lap.
    Closed { period: f64, cycle_start: usize },
    PseudoEquilibrium(Vec2),
    Equilibrium(Vec2),
    BudgetExhausted,
    Escape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub segments: Vec<OrbitSegment>,
    pub terminal: TerminalEvent,
}

impl Orbit {
    /// Segments of the closing lap, if closed.
    pub fn lap(&self) -> Option<&[OrbitSegment]> {
        match self.terminal {
            TerminalEvent::Closed { cycle_start, .. } => Some(&self.segments[cycle_start..]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Arrival {
    Initial,
    Sliding,
    From(Side),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Action {
    Leave(Side),
    Slide(f64),
    Rest,
}

#[derive(Debug, Clone, Copy)]
struct Departure {
    y: f64,
    action: Action,
    exact: bool,
    segment: usize,
}

fn same_action(a: Action, b: Action) -> bool {
    match (a, b) {
        (Action::Leave(x), Action::Leave(y)) => x == y,
        (Action::Slide(x), Action::Slide(y)) => x.signum() == y.signum(),
        _ => false,
    }
}

/// Precomputed axis data for orbit construction.
pub struct OrbitEngine<'a> {
    sys: &'a FilippovSystem,
    dec: SigmaDecomposition,
    special: Vec<f64>,
    pseudo: Vec<f64>,
    num: [f64; 3],
    den: [f64; 2],
}

impl<'a> OrbitEngine<'a> {
    pub fn new(sys: &'a FilippovSystem) -> Self {
        let dec = sigma_decomposition(sys);
        let special = system::breakpoints(sys);
        let pseudo = system::pseudo_equilibria(sys).iter().map(|p| p[1]).collect();
        let (num, den) = system::sliding_rational(sys);
        OrbitEngine { sys, dec, special, pseudo, num, den }
    }

    pub fn system(&self) -> &FilippovSystem {
        self.sys
    }

    /// Move a landing point onto a breakpoint when within `SNAP_TOL`.
    pub fn snap(&self, y: f64) -> f64 {
        for &b in &self.special {
            if (y - b).abs() <= SNAP_TOL * (1.0 + b.abs()) {
                return b;
            }
        }
        y
    }

    fn is_special(&self, y: f64) -> bool {
        self.special.iter().any(|&b| b == y)
    }

    fn slide_speed(&self, y: f64) -> f64 {
        let n = self.num[0] + self.num[1] * y + self.num[2] * y * y;
        let d = self.den[0] + self.den[1] * y;
        if d == 0.0 {
            0.0
        } else {
            n / d
        }
    }

    fn slide_tol(&self, y: f64) -> f64 {
        let f = self.sys;
        1e-10 * (1.0 + f.left.tangential(y).abs() + f.right.tangential(y).abs())
    }

    fn can_leave(&self, side: Side, y: f64) -> bool {
        let f = self.sys.field(side);
        if f.normal_vanishes(y) {
            !f.vanishes(y) && system::visibility(f, side, y) == Visibility::Visible
        } else {
            f.normal(y) * side.sign() > 0.0
        }
    }

    fn probe_step(&self, y: f64, dir: f64) -> f64 {
        let mut h = 1e-7 * (1.0 + y.abs());
        for &b in &self.special {
            let dist = (b - y) * dir;
            if dist > 0.0 {
                h = h.min(0.5 * dist);
            }
        }
        y + dir * h
    }

    fn decide(&self, y: f64, arrival: Arrival) -> Result<Action> {
        let label = classify_point(self.sys, y);
        let v = self.slide_speed(y);
        let still = v.abs() <= self.slide_tol(y);
        match label {
            RegionLabel::Crossing => {
                let side = if self.sys.right.normal(y) > 0.0 { Side::Right } else { Side::Left };
                Ok(Action::Leave(side))
            }
            RegionLabel::AttractiveSliding => Ok(if still { Action::Rest } else { Action::Slide(v.signum()) }),
            RegionLabel::RepulsiveSliding => match arrival {
                Arrival::From(side) if self.can_leave(side, y) => Ok(Action::Leave(side)),
                _ => Ok(if still { Action::Rest } else { Action::Slide(v.signum()) }),
            },
            RegionLabel::BoundaryEquilibriumLeft | RegionLabel::BoundaryEquilibriumRight => Ok(Action::Rest),
            _ => {
                if still {
                    return Ok(Action::Rest);
                }
                let dir = v.signum();
                let ahead = classify_point(self.sys, self.probe_step(y, dir));
                let slides = matches!(arrival, Arrival::Initial | Arrival::Sliding);
                if ahead == RegionLabel::AttractiveSliding || (ahead == RegionLabel::RepulsiveSliding && slides) {
                    return Ok(Action::Slide(dir));
                }
                let preferred = match (ahead, arrival) {
                    (RegionLabel::Crossing, _) => {
                        if self.sys.right.normal(self.probe_step(y, dir)) > 0.0 {
                            Side::Right
                        } else {
                            Side::Left
                        }
                    }
                    (_, Arrival::From(side)) => side,
                    _ => Side::Right,
                };
                if self.can_leave(preferred, y) {
                    Ok(Action::Leave(preferred))
                } else if self.can_leave(preferred.opposite(), y) {
                    Ok(Action::Leave(preferred.opposite()))
                } else {
                    Err(FlpError::DegenerateTangency(y))
                }
            }
        }
    }

    fn sliding_interval(&self, y: f64, dir: f64) -> Option<(f64, f64)> {
        let probe = self.probe_step(y, dir);
        self.dec
            .intervals
            .iter()
            .find(|iv| iv.label.is_sliding() && iv.contains(probe))
            .map(|iv| (iv.lo, iv.hi))
    }

    /// Time to slide from `y0` to `y1` without meeting a pseudo-equilibrium.
    pub fn slide_time(&self, y0: f64, y1: f64) -> f64 {
        quad::integrate(|y| 1.0 / self.slide_speed(y), y0, y1)
    }

    fn slide(&self, y0: f64, dir: f64) -> (OrbitSegment, Option<TerminalEvent>, f64) {
        let Some((lo, hi)) = self.sliding_interval(y0, dir) else {
            let seg = OrbitSegment::Slide { y_start: y0, y_end: y0, duration: 0.0 };
            return (seg, Some(TerminalEvent::PseudoEquilibrium([0.0, y0])), y0);
        };
        let end = if dir > 0.0 { hi } else { lo };
        let target = self
            .pseudo
            .iter()
            .copied()
            .filter(|&p| (p - y0) * dir > 0.0 && (end - p) * dir > 0.0)
            .min_by(|a, b| ((a - y0) * dir).total_cmp(&((b - y0) * dir)));
        if let Some(p) = target {
            let seg = OrbitSegment::Slide { y_start: y0, y_end: p, duration: f64::INFINITY };
            return (seg, Some(TerminalEvent::PseudoEquilibrium([0.0, p])), p);
        }
        if !end.is_finite() {
            let seg = OrbitSegment::Slide { y_start: y0, y_end: end, duration: f64::INFINITY };
            return (seg, Some(TerminalEvent::Escape), end);
        }
        if self.slide_speed(end).abs() <= self.slide_tol(end) {
            let seg = OrbitSegment::Slide { y_start: y0, y_end: end, duration: f64::INFINITY };
            return (seg, Some(TerminalEvent::PseudoEquilibrium([0.0, end])), end);
        }
        let seg = OrbitSegment::Slide { y_start: y0, y_end: end, duration: self.slide_time(y0, end) };
        (seg, None, end)
    }

    fn no_return_terminal(&self, side: Side) -> TerminalEvent {
        match equilibrium_info(self.sys.field(side), side) {
            Ok(e) if e.placement == Placement::Admissible
                && e.stability == Stability::Stable
                && e.kind != EquilibriumKind::Saddle =>
            {
                TerminalEvent::Equilibrium(e.location)
            }
            _ => TerminalEvent::Escape,
        }
    }

    /// Forward Filippov orbit from `z0`, at most `budget` segments.
    pub fn orbit(&self, z0: Vec2, budget: usize) -> Result<Orbit> {
        let mut segments: Vec<OrbitSegment> = Vec::new();
        let mut departures: Vec<Departure> = Vec::new();
        let mut pending: Option<(usize, usize)> = None;
        let mut pos = z0;
        let mut arrival = Arrival::Initial;
        if pos[0] == 0.0 {
            pos[1] = self.snap(pos[1]);
        }
        loop {
            if pos[0] != 0.0 {
                if segments.len() >= budget {
                    return Ok(Orbit { segments, terminal: TerminalEvent::BudgetExhausted });
                }
                let side = if pos[0] > 0.0 { Side::Right } else { Side::Left };
                match first_return(self.sys.field(side), pos, side) {
                    Ok(hit) => {
                        let y = self.snap(hit.z[1]);
                        segments.push(OrbitSegment::Flow { side, start: pos, end: [0.0, y], duration: hit.t });
                        pos = [0.0, y];
                        arrival = Arrival::From(side);
                    }
                    Err(FlpError::NoReturn) => {
                        return Ok(Orbit { segments, terminal: self.no_return_terminal(side) });
                    }
                    Err(e) => return Err(e),
                }
                continue;
            }
            let y = pos[1];
            let action = self.decide(y, arrival)?;
            if let Action::Rest = action {
                let label = classify_point(self.sys, y);
                let terminal = match label {
                    RegionLabel::BoundaryEquilibriumLeft | RegionLabel::BoundaryEquilibriumRight => {
                        TerminalEvent::Equilibrium(pos)
                    }
                    _ => TerminalEvent::PseudoEquilibrium(pos),
                };
                return Ok(Orbit { segments, terminal });
            }
            let exact = self.is_special(y);
            let here = Departure { y, action, exact, segment: segments.len() };
            if let Some(closed) = self.check_closure(&departures, &here, &mut pending) {
                segments.truncate(closed.1);
                let period = segments[closed.0..].iter().map(|s| s.duration()).sum();
                return Ok(Orbit { segments, terminal: TerminalEvent::Closed { period, cycle_start: closed.0 } });
            }
            departures.push(here);
            if segments.len() >= budget {
                return Ok(Orbit { segments, terminal: TerminalEvent::BudgetExhausted });
            }
            match action {
                Action::Leave(side) => match first_return(self.sys.field(side), pos, side) {
                    Ok(hit) => {
                        let y1 = self.snap(hit.z[1]);
                        segments.push(OrbitSegment::Flow { side, start: pos, end: [0.0, y1], duration: hit.t });
                        pos = [0.0, y1];
                        arrival = Arrival::From(side);
                    }
                    Err(FlpError::NoReturn) => {
                        return Ok(Orbit { segments, terminal: self.no_return_terminal(side) });
                    }
                    Err(e) => return Err(e),
                },
                Action::Slide(dir) => {
                    let (seg, terminal, y1) = self.slide(y, dir);
                    segments.push(seg);
                    if let Some(t) = terminal {
                        return Ok(Orbit { segments, terminal: t });
                    }
                    pos = [0.0, y1];
                    arrival = Arrival::Sliding;
                }
                Action::Rest => unreachable!(),
            }
        }
    }

    /// Returns `(cycle_start_segment, cycle_end_segment)` once a lap is confirmed.
    fn check_closure(
        &self,
        departures: &[Departure],
        here: &Departure,
        pending: &mut Option<(usize, usize)>,
    ) -> Option<(usize, usize)> {
        let idx = departures.len();
        if let Some((j, i)) = *pending {
            let k = j + (idx - i);
            let prev = &departures[k];
            let ok = same_action(prev.action, here.action)
                && (prev.y - here.y).abs() < CLOSURE_TOL * (1.0 + here.y.abs());
            if ok {
                if k + 1 == i {
                    // the whole second lap matched
                    return Some((departures[j].segment, departures[i].segment));
                }
                return None;
            }
            *pending = None;
        }
        for (j, prev) in departures.iter().enumerate() {
            if !same_action(prev.action, here.action) {
                continue;
            }
            if here.exact && prev.exact {
                if prev.y == here.y {
                    return Some((prev.segment, here.segment));
                }
                continue;
            }
            if (prev.y - here.y).abs() < CLOSURE_TOL * (1.0 + here.y.abs()) {
                if j + 1 == idx {
                    // one-departure lap: confirm on the next visit
                    *pending = Some((j, idx));
                    return None;
                }
                *pending = Some((j, idx));
                return None;
            }
        }
        None
    }
}

pub fn filippov_orbit(sys: &FilippovSystem, z0: Vec2, budget: usize) -> Result<Orbit> {
    OrbitEngine::new(sys).orbit(z0, budget)
}

/// Orbit of the time-reversed system; segment durations are reported as positive.
pub fn backward_orbit(sys: &FilippovSystem, z0: Vec2, budget: usize) -> Result<Orbit> {
    filippov_orbit(&sys.time_reversed(), z0, budget)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub kind: &'static str,
}

/// Dense samples along each segment; slide positions come from inverting t(y).
pub fn sample_orbit(sys: &FilippovSystem, orbit: &Orbit, per_segment: usize, time_sign: f64) -> Vec<OrbitSample> {
    let engine = OrbitEngine::new(sys);
    let n = per_segment.max(2);
    let mut out = Vec::new();
    let mut t0 = 0.0;
    for seg in &orbit.segments {
        match *seg {
            OrbitSegment::Flow { side, start, duration, .. } => {
                let kind = if side == Side::Right { "flow_right" } else { "flow_left" };
                let p = Propagator::new(sys.field(side), start);
                for k in 0..n {
                    let t = duration * k as f64 / (n - 1) as f64;
                    let mut z = p.at(t);
                    if k == n - 1 {
                        z[0] = 0.0;
                    }
                    out.push(OrbitSample { t: time_sign * (t0 + t), x: z[0], y: z[1], kind });
                }
                t0 += duration;
            }
            OrbitSegment::Slide { y_start, y_end, duration } => {
                if !duration.is_finite() {
                    // geometric approach towards the limit point
                    for k in 0..n {
                        let frac = 1.0 - 0.5f64.powi(k as i32);
                        let y = if y_end.is_finite() {
                            y_start + (y_end - y_start) * frac
                        } else {
                            y_start + (y_end.signum()) * (2f64.powi(k as i32) - 1.0)
                        };
                        let t = engine.slide_time(y_start, y);
                        out.push(OrbitSample { t: time_sign * (t0 + t), x: 0.0, y, kind: "slide" });
                    }
                    break;
                }
                for k in 0..n {
                    let target = duration * k as f64 / (n - 1) as f64;
                    let y = if k == 0 {
                        y_start
                    } else if k == n - 1 {
                        y_end
                    } else {
                        quad::bisect(|y| engine.slide_time(y_start, y) - target, y_start, y_end)
                    };
                    out.push(OrbitSample { t: time_sign * (t0 + target), x: 0.0, y, kind: "slide" });
                }
                t0 += duration;
            }
        }
    }
    if orbit.segments.is_empty() {
        if let TerminalEvent::PseudoEquilibrium(p) | TerminalEvent::Equilibrium(p) = orbit.terminal {
            out.push(OrbitSample { t: 0.0, x: p[0], y: p[1], kind: "rest" });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn example1(alpha: f64, rho: f64) -> FilippovSystem {
        FilippovSystem::new(
            AffineField::new([[2.0, 1.0], [-2.0, 0.0]], [1.0, rho]),
            AffineField::new([[2.0 * alpha, 1.0], [-1.0 - alpha * alpha, 0.0]], [0.0, 1.0]),
        )
    }

    #[test]
    fn flow_at_zero_is_identity() {
        let f = AffineField::new([[0.3, -2.0], [1.0, 0.1]], [0.5, -1.0]);
        assert_eq!(linear_flow(&f, [1.0, 2.0], 0.0), [1.0, 2.0]);
    }

    #[test]
    fn center_returns_after_full_turn() {
        let f = AffineField::new([[0.0, 1.0], [-1.0, 0.0]], [0.0, 1.0]);
        let hit = first_return(&f, [0.0, 0.0], Side::Right).unwrap();
        assert!((hit.t - 2.0 * PI).abs() < 1e-9, "t = {}", hit.t);
        assert!(hit.z[1].abs() < 1e-9);
    }

    #[test]
    fn canonical_right_return_from_tangency() {
        let f = example1(1.0, -1.0).right;
        let hit = first_return(&f, [0.0, 0.0], Side::Right).unwrap();
        let t = hit.t;
        assert!((1.0 - t.exp() * (t.cos() - t.sin())).abs() < 1e-10);
        assert!((hit.z[1] - t.exp() * t.sin()).abs() < 1e-9);
        assert!((t - 3.940_733_135_692_915).abs() < 1e-9);
    }

    #[test]
    fn expanding_node_never_returns() {
        let f = AffineField::new([[1.0, 0.0], [0.0, 1.0]], [1.0, 0.0]);
        assert_eq!(first_return(&f, [0.0, 0.0], Side::Right).unwrap_err(), FlpError::NoReturn);
    }

    #[test]
    fn wrong_side_is_reported() {
        let f = AffineField::new([[1.0, 0.0], [0.0, 1.0]], [1.0, 0.0]);
        assert_eq!(first_return(&f, [0.0, 0.0], Side::Left).unwrap_err(), FlpError::WrongSide(Side::Left));
    }

    #[test]
    fn start_at_pseudo_equilibrium() {
        let o = filippov_orbit(&example1(0.5, -1.0), [0.0, -0.5], 10).unwrap();
        assert!(o.segments.is_empty());
        assert_eq!(o.terminal, TerminalEvent::PseudoEquilibrium([0.0, -0.5]));
    }

    #[test]
    fn slide_up_then_leave_right() {
        let o = filippov_orbit(&example1(0.5, -1.0), [0.0, -0.2], 2).unwrap();
        match o.segments[0] {
            OrbitSegment::Slide { y_start, y_end, duration } => {
                assert_eq!((y_start, y_end), (-0.2, 0.0));
                // F = 2y + 1 so t = ln(1) - ln(0.6) over 2
                assert!((duration - 0.5 * (1.0f64 / 0.6).ln()).abs() < 1e-13);
            }
            _ => panic!("expected slide"),
        }
        match o.segments[1] {
            OrbitSegment::Flow { side, start, .. } => {
                assert_eq!(side, Side::Right);
                assert_eq!(start, [0.0, 0.0]);
            }
            _ => panic!("expected flow"),
        }
    }

    #[test]
    fn budget_one_gives_one_flow() {
        let o = filippov_orbit(&example1(0.5, -1.0), [3.0, 1.0], 1).unwrap();
        assert_eq!(o.segments.len(), 1);
        assert_eq!(o.terminal, TerminalEvent::BudgetExhausted);
    }

    #[test]
    fn sliding_cycle_closes_exactly() {
        let o = filippov_orbit(&example1(0.01, -1.0), [0.0, 0.0], 50).unwrap();
        assert!(matches!(o.terminal, TerminalEvent::Closed { .. }), "{:?}", o);
        assert!(o.lap().unwrap().iter().any(|s| s.is_slide()));
    }
}
