//! Curves γ in the (t, r) half-plane, the hypersurface profile they induce in a
//! tube, and the homotopy from the straight segment to a bent curve.
//!
//! Orientation: ψ is the angle of the downward tangent (sin ψ, −cos ψ) from the
//! vertical; the arc-length coordinate `arc` runs up from the tip on the t-axis,
//! so r′ = cos ψ, t′ = −sin ψ and r″ = −sin ψ · κ with κ = dψ/d(arc).
//!
//! Positivity of the product model p(p−1) + R_fiber along a bend reduces to
//! |κ| < A/B (A, B below); bends spend a fixed fraction of that budget, so they
//! are positive by construction and the certificate only confirms it.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{CurvatureCertificate, DEFAULT_GRID_POINTS};
use crate::error::{Error, Result};
use crate::path::{product_certificate, MetricPath};
use crate::quad;
use crate::radial::{hermite_eval, Jet, RadialProfile};
use crate::smooth::{step7, step7_integral};

/// fraction of the curvature budget a bend may use
pub const BUDGET_FRACTION: f64 = 0.8;
/// largest tilt considered by the search
pub const MAX_TILT: f64 = PI / 6.0;
const TILT_GRID: usize = 24;
const BISECTIONS: usize = 10;
// width of the curvature ramps at the ends of a bend, in the bend parameter
const RAMP_EPS: f64 = 0.15;
const BEND_STEPS: usize = 512;
const VERTICAL_FRACTION: f64 = 0.02;
// scaled members of the family traced while searching the tilt
const FAMILY_CHECKS: usize = 32;
// horizontal segment and terminal ramp lengths, in units of the contact radius
const HORIZONTAL_FACTOR: f64 = 4.0;
const RAMP_FACTOR: f64 = 0.5;
// budget is capped (softly) at CAP·ρ̄ / r²: A/B grows like r/ψ near the vertical,
// and an uncapped bend would start with a curvature spike. Second order in r so
// the cap does not bite on small self-similar bends near the tip
const CAP: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Segment {
    Vertical,
    Bend1,
    Tilted,
    Bend2,
    Horizontal,
    Ramp,
    Terminal,
}

impl Segment {
    pub fn name(self) -> &'static str {
        match self {
            Segment::Vertical => "vertical",
            Segment::Bend1 => "bend1",
            Segment::Tilted => "tilted",
            Segment::Bend2 => "bend2",
            Segment::Horizontal => "horizontal",
            Segment::Ramp => "ramp",
            Segment::Terminal => "terminal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveNode {
    pub seg: Segment,
    /// arc length from the tip
    pub arc: f64,
    pub t: f64,
    pub r: f64,
    pub psi: f64,
    /// dψ/d(arc)
    pub kappa: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Bend {
    pub turn: f64,
    pub length: f64,
    /// smallest radius of curvature along the bend
    pub min_radius: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct TerminalArc {
    pub contact_radius: f64,
    pub ramp_len: f64,
    /// total turn of ramp + circle
    pub turn: f64,
}

/// Geometric recipe for a curve; `scale` multiplies every turning angle
/// (scale 1 is the bent curve, scale 0 the straight segment).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveShape {
    pub rho_bar: f64,
    pub tilt: f64,
    pub contact_radius: f64,
    pub vertical_len: f64,
    pub horizontal_len: f64,
    pub ramp_len: f64,
    pub scale: f64,
}

impl CurveShape {
    pub fn standard(rho_bar: f64, tilt: f64, contact_radius: f64) -> Self {
        CurveShape {
            rho_bar,
            tilt,
            contact_radius,
            vertical_len: VERTICAL_FRACTION * rho_bar,
            horizontal_len: HORIZONTAL_FACTOR * contact_radius,
            ramp_len: RAMP_FACTOR * contact_radius,
            scale: 1.0,
        }
    }

    fn scaled(&self, s: f64) -> Self {
        CurveShape { scale: s, ..*self }
    }
}

/// Curvature budget of the product model over one or more ambient tubes.
#[derive(Clone, Debug)]
pub struct Budget {
    ambients: Arc<Vec<RadialProfile>>,
    p: usize,
    q: usize,
    fraction: f64,
    rho: f64,
}

impl Budget {
    pub fn new(ambients: Vec<RadialProfile>, p: usize, q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::Hypothesis(format!("sphere factor S^q needs q >= 2 (got q = {q})")));
        }
        if ambients.is_empty() {
            return Err(Error::InvalidArgument("budget needs at least one ambient profile".into()));
        }
        let rho = ambients.iter().map(|a| a.r_max()).fold(f64::INFINITY, f64::min);
        Ok(Budget { ambients: Arc::new(ambients), p, q, fraction: BUDGET_FRACTION, rho })
    }

    /// A/(B + A·r²/(CAP·ρ̄)), minimised over the ambients, where positivity reads |κ| < A/B:
    ///   A = p(p−1) − 2q f″cos²ψ/F + q(q−1)(1 − f′²cos²ψ)/F²,  B = 2q f′ sin ψ / F,  F = f(r).
    fn allowance(&self, r: f64, psi: f64) -> Result<f64> {
        let (p, q) = (self.p as f64, self.q as f64);
        let (sn, cs) = psi.sin_cos();
        let mut best = f64::INFINITY;
        for amb in self.ambients.iter() {
            let j = amb.eval_clamped(r);
            if !(j.f > 0.0) {
                return Err(Error::NonPositive { r, value: j.f });
            }
            let a = p * (p - 1.0) - 2.0 * q * j.d2 * cs * cs / j.f
                + q * (q - 1.0) * (1.0 - j.d1 * j.d1 * cs * cs) / (j.f * j.f);
            let b = (2.0 * q * j.d1 * sn / j.f).max(0.0);
            if !(a > 0.0) {
                return Err(Error::Construction(format!(
                    "no curvature budget at r = {r}, psi = {psi} (A = {a})"
                )));
            }
            best = best.min(a / (b + a * r * r / (CAP * self.rho)));
        }
        Ok(self.fraction * best)
    }

    pub fn ambients(&self) -> &[RadialProfile] {
        &self.ambients
    }
}

/// Ramp profile of a bend: 0 → 1 over [0, ε], 1, 1 → 0 over [1−ε, 1].
fn ramp(u: f64) -> f64 {
    if u < RAMP_EPS {
        step7(u / RAMP_EPS)
    } else if u > 1.0 - RAMP_EPS {
        step7((1.0 - u) / RAMP_EPS)
    } else {
        1.0
    }
}

fn ramp_integral(u: f64) -> f64 {
    let total = 1.0 - RAMP_EPS;
    if u < RAMP_EPS {
        RAMP_EPS * step7_integral(u / RAMP_EPS)
    } else if u > 1.0 - RAMP_EPS {
        total - RAMP_EPS * step7_integral((1.0 - u) / RAMP_EPS)
    } else {
        0.5 * RAMP_EPS + (u - RAMP_EPS)
    }
}

/// A piece traced in one direction: `up` means toward increasing r along the
/// curve (dr = cos ψ dℓ, dt = −sin ψ dℓ), otherwise downward.
struct Trace {
    up: bool,
    // (ℓ, t, r, ψ, dψ/dℓ in the traversal direction, segment)
    nodes: Vec<(f64, f64, f64, f64, f64, Segment)>,
}

impl Trace {
    fn new(up: bool, t: f64, r: f64, psi: f64, seg: Segment) -> Self {
        Trace { up, nodes: vec![(0.0, t, r, psi, 0.0, seg)] }
    }

    fn end(&self) -> (f64, f64, f64, f64) {
        let n = self.nodes.last().unwrap();
        (n.0, n.1, n.2, n.3)
    }

    fn dir(&self, psi: f64) -> (f64, f64) {
        let (s, c) = psi.sin_cos();
        if self.up {
            (-s, c)
        } else {
            (s, -c)
        }
    }

    fn push(&mut self, node: (f64, f64, f64, f64, f64, Segment)) {
        self.nodes.push(node);
    }

    fn straight(&mut self, len: f64, seg: Segment, knots: &[f64], spacing: f64) {
        if len <= 0.0 {
            return;
        }
        let (l0, t0, r0, psi) = self.end();
        let (dt, dr) = self.dir(psi);
        let mut ls: Vec<f64> = {
            let m = ((len / spacing).ceil() as usize).max(8);
            (1..=m).map(|i| if i == m { len } else { len * i as f64 / m as f64 }).collect()
        };
        // put ambient knots on the segment so the induced profile reproduces them
        if dr.abs() > 1e-12 {
            for &k in knots {
                let l = (k - r0) / dr;
                if l > 1e-12 * len && l < len * (1.0 - 1e-12) {
                    ls.push(l);
                }
            }
            ls.sort_by(f64::total_cmp);
            ls.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * len);
        }
        for l in ls {
            self.push((l0 + l, t0 + dt * l, r0 + dr * l, psi, 0.0, seg));
        }
    }

    /// circular arc of curvature `kappa` (signed, traversal direction) through angle `turn`
    fn arc(&mut self, kappa: f64, turn: f64, seg: Segment, m: usize) {
        if turn == 0.0 {
            return;
        }
        let (l0, t0, r0, psi0) = self.end();
        let len = turn / kappa;
        let sg = if self.up { 1.0 } else { -1.0 };
        for i in 1..=m {
            let l = len * i as f64 / m as f64;
            let psi = psi0 + kappa * l;
            // ∫ −sin ψ = (cos ψ − cos ψ0)/κ, ∫ cos ψ = (sin ψ − sin ψ0)/κ
            let t = t0 + sg * (psi.cos() - psi0.cos()) / kappa;
            let r = r0 + sg * (psi.sin() - psi0.sin()) / kappa;
            self.push((l0 + l, t, r, psi, kappa, seg));
        }
    }

    /// curvature moving from k0 to k1 along a septic step over `len`
    fn ramp(&mut self, len: f64, k0: f64, k1: f64, seg: Segment, m: usize) {
        if len <= 0.0 {
            return;
        }
        let (l0, mut t, mut r, psi0) = self.end();
        let psi_at = |l: f64| psi0 + k0 * l + (k1 - k0) * len * step7_integral(l / len);
        let mut prev = 0.0;
        for i in 1..=m {
            let l = len * i as f64 / m as f64;
            t += quad::integrate(|x| self.dir(psi_at(x)).0, prev, l, 1);
            r += quad::integrate(|x| self.dir(psi_at(x)).1, prev, l, 1);
            let kappa = k0 + (k1 - k0) * step7(l / len);
            self.push((l0 + l, t, r, psi_at(l), kappa, seg));
            prev = l;
        }
    }

    /// budget-limited bend from the current ψ to `psi1`; RK4 in the bend parameter u
    fn bend(&mut self, psi1: f64, seg: Segment, budget: &Budget) -> Result<Bend> {
        let (l0, t0, r0, psi0) = self.end();
        let delta = psi1 - psi0;
        if delta == 0.0 {
            return Ok(Bend::default());
        }
        let g1 = ramp_integral(1.0);
        let psi_of = |u: f64| psi0 + delta * ramp_integral(u) / g1;
        let up = self.up;
        // d(ℓ, t, r)/du
        let rhs = |u: f64, r: f64| -> Result<[f64; 3]> {
            let psi = psi_of(u);
            let dl = delta.abs() / (g1 * budget.allowance(r, psi)?);
            let (s, c) = psi.sin_cos();
            Ok(if up { [dl, -s * dl, c * dl] } else { [dl, s * dl, -c * dl] })
        };
        let h = 1.0 / BEND_STEPS as f64;
        let mut y = [0.0, t0, r0];
        let mut min_radius = f64::INFINITY;
        for i in 0..BEND_STEPS {
            let u = i as f64 * h;
            let k1 = rhs(u, y[2])?;
            let k2 = rhs(u + 0.5 * h, y[2] + 0.5 * h * k1[2])?;
            let k3 = rhs(u + 0.5 * h, y[2] + 0.5 * h * k2[2])?;
            let k4 = rhs(u + h, y[2] + h * k3[2])?;
            for d in 0..3 {
                y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
            }
            if !(y[2] > 0.0) {
                return Err(Error::Construction(format!("bend reaches r = {} <= 0", y[2])));
            }
            let u1 = if i + 1 == BEND_STEPS { 1.0 } else { u + h };
            let psi = if i + 1 == BEND_STEPS { psi1 } else { psi_of(u1) };
            let kappa = delta.signum() * budget.allowance(y[2], psi)? * ramp(u1);
            if kappa != 0.0 {
                min_radius = min_radius.min(1.0 / kappa.abs());
            }
            self.push((l0 + y[0], y[1], y[2], psi, kappa, seg));
        }
        Ok(Bend { turn: delta.abs(), length: y[0], min_radius })
    }
}

/// Bent curve from (0, ρ̄) to the t-axis: vertical, bend, tilted, bend,
/// horizontal, ramp, circular contact.
#[derive(Clone, Debug)]
pub struct GLCurve {
    pub rho_bar: f64,
    pub vertical_len: f64,
    pub bend1: Bend,
    pub tilt_angle: f64,
    pub tilted_len: f64,
    pub bend2: Bend,
    pub horizontal_len: f64,
    pub terminal: TerminalArc,
    shape: Option<CurveShape>,
    budget: Option<Budget>,
    nodes: Vec<CurveNode>,
}

/// Arc-length sample of a curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArcSample {
    pub arc: f64,
    pub t: f64,
    pub r: f64,
    pub dr: f64,
    pub ddr: f64,
}

impl GLCurve {
    /// γ₀: the segment from (0, ρ̄) straight down to the origin.
    pub fn vertical(rho_bar: f64) -> Result<Self> {
        check_rho(rho_bar)?;
        let nodes = vec![
            CurveNode { seg: Segment::Vertical, arc: 0.0, t: 0.0, r: 0.0, psi: 0.0, kappa: 0.0 },
            CurveNode { seg: Segment::Vertical, arc: rho_bar, t: 0.0, r: rho_bar, psi: 0.0, kappa: 0.0 },
        ];
        Ok(GLCurve {
            rho_bar,
            vertical_len: rho_bar,
            bend1: Bend::default(),
            tilt_angle: 0.0,
            tilted_len: 0.0,
            bend2: Bend::default(),
            horizontal_len: 0.0,
            terminal: TerminalArc::default(),
            shape: None,
            budget: None,
            nodes,
        })
    }

    /// Degenerate curve with every segment of length 0: the quarter circle of radius ρ̄.
    pub fn quarter_circle(rho_bar: f64) -> Result<Self> {
        check_rho(rho_bar)?;
        let mut tr = Trace::new(true, rho_bar, 0.0, 0.0, Segment::Terminal);
        tr.arc(1.0 / rho_bar, FRAC_PI_2, Segment::Terminal, 1024);
        let mut nodes: Vec<CurveNode> = tr
            .nodes
            .iter()
            .map(|n| CurveNode { seg: n.5, arc: n.0, t: n.1, r: n.2, psi: n.3, kappa: 1.0 / rho_bar })
            .collect();
        let last = nodes.last_mut().unwrap();
        last.r = rho_bar;
        last.t = 0.0;
        Ok(GLCurve {
            rho_bar,
            vertical_len: 0.0,
            bend1: Bend::default(),
            tilt_angle: 0.0,
            tilted_len: 0.0,
            bend2: Bend::default(),
            horizontal_len: 0.0,
            terminal: TerminalArc { contact_radius: rho_bar, ramp_len: 0.0, turn: FRAC_PI_2 },
            shape: None,
            budget: None,
            nodes,
        })
    }

    /// Traces the curve for `shape` with bends limited by `budget`.
    pub fn trace(shape: &CurveShape, budget: &Budget) -> Result<Self> {
        check_rho(shape.rho_bar)?;
        let s = shape.scale;
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidArgument(format!("shape scale must lie in [0, 1] (got {s})")));
        }
        if s == 0.0 {
            let mut v = Self::vertical(shape.rho_bar)?;
            v.shape = Some(*shape);
            v.budget = Some(budget.clone());
            return Ok(v);
        }
        let c = shape.contact_radius;
        if !(c > 0.0 && c < shape.rho_bar) || !(shape.tilt > 0.0 && shape.tilt < FRAC_PI_2) {
            return Err(Error::InvalidArgument(format!(
                "curve shape needs 0 < contact radius < rho_bar and 0 < tilt < pi/2 (got {c}, {})",
                shape.tilt
            )));
        }
        let rho = shape.rho_bar;
        let knots: Vec<f64> = budget.ambients.iter().flat_map(|a| a.knots().iter().copied()).collect();
        let spacing = rho / 512.0;
        let top_psi = s * FRAC_PI_2;
        let tilt = s * shape.tilt;
        let ramp_len = s * shape.ramp_len;
        let ramp_turn = ramp_len / (2.0 * c);

        // bottom chain, traced up from the tip at the origin
        let mut lo = Trace::new(true, 0.0, 0.0, 0.0, Segment::Terminal);
        let circle_turn = top_psi - ramp_turn;
        let m = ((circle_turn / FRAC_PI_2 * 768.0).ceil() as usize).max(32);
        lo.arc(1.0 / c, circle_turn, Segment::Terminal, m);
        lo.nodes[0].4 = 1.0 / c;
        lo.ramp(ramp_len, 1.0 / c, 0.0, Segment::Ramp, 256);
        // the horizontal run only opens up near the end, or it lifts the lower bend
        lo.straight(s.powi(16) * shape.horizontal_len, Segment::Horizontal, &knots, spacing.min(c / 16.0));
        let bend2 = lo.bend(tilt, Segment::Bend2, budget)?;

        // top chain, traced down from (0, ρ̄)
        let mut hi = Trace::new(false, 0.0, rho, 0.0, Segment::Vertical);
        hi.straight(shape.vertical_len, Segment::Vertical, &knots, spacing);
        let bend1 = hi.bend(tilt, Segment::Bend1, budget)?;

        let (l_hi, t1, r1, _) = hi.end();
        let (l_lo, t2, r2, _) = lo.end();
        if !(r1 > r2) {
            return Err(Error::Construction(format!(
                "bends overlap: upper bend ends at r = {r1}, lower bend at r = {r2}"
            )));
        }
        let tilted_len = (r1 - r2) / tilt.cos();
        let shift = t1 + tilted_len * tilt.sin() - t2;
        hi.straight(tilted_len, Segment::Tilted, &knots, spacing);
        let total = l_lo + l_hi + tilted_len;

        let mut nodes: Vec<CurveNode> = lo
            .nodes
            .iter()
            .map(|n| CurveNode { seg: n.5, arc: n.0, t: n.1 + shift, r: n.2, psi: n.3, kappa: n.4 })
            .collect();
        nodes[0].seg = Segment::Terminal;
        // top chain reversed; the tilted nodes were traced last, so they come first
        for n in hi.nodes.iter().rev().skip(1) {
            nodes.push(CurveNode { seg: n.5, arc: total - n.0, t: n.1, r: n.2, psi: n.3, kappa: -n.4 });
        }
        let last = nodes.last_mut().unwrap();
        last.arc = total;
        last.r = rho;
        last.t = 0.0;
        // the junction between the tilted segment and the lower bend is traced twice
        nodes.dedup_by(|b, a| (b.arc - a.arc).abs() <= 1e-12 * total);
        if nodes.windows(2).any(|w| !(w[1].arc > w[0].arc)) {
            return Err(Error::Construction("non-monotone arc length along the curve".into()));
        }
        Ok(GLCurve {
            rho_bar: rho,
            vertical_len: shape.vertical_len,
            bend1,
            tilt_angle: tilt,
            tilted_len,
            bend2,
            horizontal_len: s.powi(16) * shape.horizontal_len,
            terminal: TerminalArc { contact_radius: c, ramp_len, turn: top_psi },
            shape: Some(*shape),
            budget: Some(budget.clone()),
            nodes,
        })
    }

    pub fn nodes(&self) -> &[CurveNode] {
        &self.nodes
    }

    pub fn length(&self) -> f64 {
        self.nodes.last().unwrap().arc
    }

    pub fn shape(&self) -> Option<&CurveShape> {
        self.shape.as_ref()
    }

    /// r on the horizontal segment (the neck radius of the induced metric)
    pub fn horizontal_height(&self) -> Option<f64> {
        self.nodes.iter().find(|n| n.seg == Segment::Horizontal).map(|n| n.r)
    }

    /// Largest t″(r) over the part of the curve that is a graph over the r-axis
    /// with slope angle at most `psi_max` from the vertical.
    pub fn max_graph_second_derivative(&self, psi_max: f64) -> f64 {
        self.nodes
            .iter()
            .filter(|n| n.psi <= psi_max)
            // t as a function of r: dt/dr = −tan ψ, d²t/dr² = −κ / cos³ψ
            .map(|n| -n.kappa / n.psi.cos().powi(3))
            .fold(0.0, f64::max)
    }

    /// (x, jet) pairs for a coordinate along the arc.
    fn jets(&self, coord: impl Fn(&CurveNode) -> Jet) -> Vec<(f64, Jet)> {
        self.nodes.iter().map(|n| (n.arc, coord(n))).collect()
    }

    /// CSV columns seg,t,r over the stored nodes (tip first).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["seg", "t", "r"])?;
        for n in &self.nodes {
            out.write_record(&[n.seg.name().to_string(), format!("{:?}", n.t), format!("{:?}", n.r)])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn check_rho(rho_bar: f64) -> Result<()> {
    if !(rho_bar.is_finite() && rho_bar > 0.0) {
        return Err(Error::InvalidArgument(format!("rho_bar must be positive (got {rho_bar})")));
    }
    Ok(())
}

fn interp(table: &[(f64, Jet)], x: f64) -> Jet {
    let i = table.partition_point(|e| e.0 <= x).clamp(1, table.len() - 1) - 1;
    let (a, b) = (table[i], table[i + 1]);
    if x == a.0 {
        return a.1;
    }
    hermite_eval(a.0, b.0, a.1, b.1, x)
}

/// `m` samples uniform in arc length from the tip (arc 0) to (0, ρ̄).
pub fn arc_length_param(c: &GLCurve, m: usize) -> Result<Vec<ArcSample>> {
    if m < 64 {
        return Err(Error::InvalidArgument(format!("need at least 64 samples (got {m})")));
    }
    let rs = c.jets(|n| Jet::new(n.r, n.psi.cos(), -n.psi.sin() * n.kappa));
    let ts = c.jets(|n| Jet::new(n.t, -n.psi.sin(), -n.psi.cos() * n.kappa));
    let len = c.length();
    Ok((0..m)
        .map(|i| {
            let arc = if i + 1 == m { len } else { len * i as f64 / (m - 1) as f64 };
            let r = interp(&rs, arc);
            ArcSample { arc, t: interp(&ts, arc).f, r: r.f, dr: r.d1, ddr: r.d2 }
        })
        .collect())
}

/// Warping function of the hypersurface over the curve: arc ↦ f(r(arc)).
pub fn induced_profile(c: &GLCurve, ambient: &RadialProfile) -> Result<RadialProfile> {
    if c.rho_bar > ambient.r_max() * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "curve height {} exceeds the ambient profile domain {}",
            c.rho_bar,
            ambient.r_max()
        )));
    }
    let mut knots = Vec::with_capacity(c.nodes.len());
    let mut f = Vec::with_capacity(c.nodes.len());
    let mut d1 = Vec::with_capacity(c.nodes.len());
    let mut d2 = Vec::with_capacity(c.nodes.len());
    for n in &c.nodes {
        let a = ambient.eval_clamped(n.r.min(ambient.r_max()));
        let (sn, cs) = n.psi.sin_cos();
        let rdd = -sn * n.kappa;
        knots.push(n.arc);
        f.push(a.f);
        d1.push(a.d1 * cs);
        d2.push(a.d2 * cs * cs + a.d1 * rdd);
    }
    RadialProfile::new(knots, f, d1, d2, true)
}

/// Certificate of p(p−1) + R_fiber along the curve, fiber dimension q+1.
pub fn total_model_curvature(
    c: &GLCurve,
    ambient: &RadialProfile,
    p: usize,
    q: usize,
    margin: f64,
) -> Result<CurvatureCertificate> {
    if q < 2 {
        return Err(Error::Hypothesis(format!("sphere factor S^q needs q >= 2 (got q = {q})")));
    }
    if p < 1 {
        return Err(Error::InvalidArgument("base sphere dimension p must be >= 1".into()));
    }
    product_certificate(&induced_profile(c, ambient)?, p, q, DEFAULT_GRID_POINTS, margin)
}

/// Searches the tilt for a curve whose model curvature certifies against every
/// ambient in `ambients` (they share one curve). Returns the curve and the
/// worst of the certificates.
pub fn build_shared_curve(
    ambients: &[RadialProfile],
    p: usize,
    q: usize,
    target_delta: f64,
    margin: f64,
) -> Result<(GLCurve, CurvatureCertificate)> {
    let budget = Budget::new(ambients.to_vec(), p, q)?;
    if p < 1 {
        return Err(Error::InvalidArgument("base sphere dimension p must be >= 1".into()));
    }
    let rho = ambients.iter().map(|a| a.r_max()).fold(f64::INFINITY, f64::min);
    if !(target_delta > 0.0 && target_delta < rho / 4.0) {
        return Err(Error::InvalidArgument(format!(
            "target delta must lie in (0, rho_bar/4) = (0, {}) (got {target_delta})",
            rho / 4.0
        )));
    }
    let attempt = |tilt: f64| -> (Option<GLCurve>, Option<CurvatureCertificate>) {
        let shape = CurveShape::standard(rho, tilt, target_delta);
        let Ok(curve) = GLCurve::trace(&shape, &budget) else {
            return (None, None);
        };
        let mut worst: Option<CurvatureCertificate> = None;
        for amb in ambients {
            match total_model_curvature(&curve, amb, p, q, margin) {
                Ok(c) => {
                    if worst.as_ref().is_none_or(|w| c.r_min < w.r_min) {
                        worst = Some(c);
                    }
                }
                Err(_) => return (None, None),
            }
        }
        (Some(curve), worst)
    };
    let passes = |r: &(Option<GLCurve>, Option<CurvatureCertificate>)| r.1.as_ref().is_some_and(|c| c.pass);

    // coarse grid, then bisection on the upper end of the passing tilts
    let grid: Vec<f64> = (1..=TILT_GRID).map(|k| MAX_TILT * k as f64 / TILT_GRID as f64).collect();
    let results: Vec<_> = grid.par_iter().map(|&th| attempt(th)).collect();
    let Some(k_hi) = results.iter().rposition(passes) else {
        let best = results.into_iter().filter_map(|r| r.1).max_by(|a, b| a.r_min.total_cmp(&b.r_min));
        return Err(Error::ConstructionFailed {
            reason: format!("no tilt in (0, pi/6] gives a certified curve (margin {margin})"),
            best: best.map(Box::new),
        });
    };
    let mut top = grid[k_hi];
    if k_hi + 1 < grid.len() {
        let (mut a, mut b) = (grid[k_hi], grid[k_hi + 1]);
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (a + b);
            if passes(&attempt(mid)) {
                a = mid;
            } else {
                b = mid;
            }
        }
        top = a;
    }
    // centre of the passing tilt interval keeps the tilted segment away from degenerate;
    // the whole scaled family must trace too, or the homotopy back to the straight
    // segment breaks, so fall back outward from the centre until it does
    let k_lo = results.iter().position(passes).unwrap();
    let centre = 0.5 * (grid[k_lo] + top);
    let mut candidates: Vec<f64> = std::iter::once(centre)
        .chain(grid.iter().zip(&results).filter(|(_, r)| passes(r)).map(|(&t, _)| t))
        .collect();
    candidates[1..].sort_by(|a, b| (a - centre).abs().total_cmp(&(b - centre).abs()));
    let family_ok = |tilt: f64| {
        let shape = CurveShape::standard(rho, tilt, target_delta);
        (1..FAMILY_CHECKS)
            .into_par_iter()
            .all(|k| GLCurve::trace(&shape.scaled(k as f64 / FAMILY_CHECKS as f64), &budget).is_ok())
    };
    let mut best = None;
    for tilt in candidates {
        let res = attempt(tilt);
        if passes(&res) {
            if family_ok(tilt) {
                return Ok((res.0.unwrap(), res.1.unwrap()));
            }
            best = best.or(res.1);
        }
    }
    Err(Error::ConstructionFailed {
        reason: "no certified tilt admits a feasible homotopy back to the straight segment".into(),
        best: best.map(Box::new),
    })
}

/// Curve for a single ambient tube of radius ρ̄ = ambient.r_max().
pub fn build_gl_curve(
    ambient: &RadialProfile,
    p: usize,
    q: usize,
    target_delta: f64,
    margin: f64,
) -> Result<(GLCurve, CurvatureCertificate)> {
    if q < 2 {
        return Err(Error::Hypothesis(format!("sphere factor S^q needs q >= 2 (got q = {q})")));
    }
    build_shared_curve(std::slice::from_ref(ambient), p, q, target_delta, margin)
}

/// Path from the straight segment (s = 0, profile = ambient) to `c` (s = 1):
/// curves of the same shape with every turning angle scaled by s, each bend
/// again held under the curvature budget.
pub fn stage1_homotopy(
    c: &GLCurve,
    ambient: &RadialProfile,
    p: usize,
    q: usize,
    steps: usize,
    margin: f64,
) -> Result<MetricPath> {
    if steps < 16 {
        return Err(Error::InvalidArgument(format!("homotopy needs at least 16 steps (got {steps})")));
    }
    let (Some(shape), Some(budget)) = (c.shape, c.budget.as_ref()) else {
        return Err(Error::InvalidArgument("curve was not traced from a shape (degenerate curve)".into()));
    };
    let first = total_model_curvature(c, ambient, p, q, margin)?;
    if !first.pass {
        return Err(Error::HomotopyFailed { stage: "bend".into(), s: 1.0, r_min: first.r_min });
    }
    let rho = c.rho_bar;
    let results: Vec<Result<(f64, RadialProfile, CurvatureCertificate)>> = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 / steps as f64;
            let profile = if k == 0 {
                ambient.restrict(rho)?
            } else if k == steps {
                induced_profile(c, ambient)?
            } else {
                induced_profile(&GLCurve::trace(&shape.scaled(s), budget)?, ambient)?
            };
            let cert = product_certificate(&profile, p, q, DEFAULT_GRID_POINTS, margin)?;
            Ok((s, profile, cert))
        })
        .collect();
    let mut path = MetricPath::new(p, q);
    for r in results {
        let (s, profile, cert) = r?;
        if !cert.pass {
            return Err(Error::HomotopyFailed { stage: "bend".into(), s, r_min: cert.r_min });
        }
        path.push("bend", s, profile, cert);
    }
    Ok(path)
}

/// The intermediate curve γ_s of [`stage1_homotopy`].
pub fn homotopy_curve(c: &GLCurve, s: f64) -> Result<GLCurve> {
    match (c.shape, c.budget.as_ref()) {
        (Some(shape), Some(budget)) => GLCurve::trace(&shape.scaled(s), budget),
        _ => Err(Error::InvalidArgument("curve was not traced from a shape (degenerate curve)".into())),
    }
}

/// Spot checks on a bend homotopy: the largest graph second derivative t″(r)
/// grows with s, and the radius r_s(ℓ) at fixed arc length shrinks with s.
#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub s: Vec<f64>,
    pub max_second_derivative: Vec<f64>,
    pub second_derivative_monotone: bool,
    /// largest increase of r_s(ℓ) between adjacent samples (≤ 0 when monotone)
    pub radius_increase: f64,
    pub radii_monotone: bool,
}

// graph region: the part of the curve with cos ψ > 0
const GRAPH_PSI: f64 = FRAC_PI_2 - 1e-9;
const RADIUS_SAMPLES: usize = 400;
const RADIUS_TOL: f64 = 1e-12;

pub fn homotopy_monotonicity(c: &GLCurve, s_grid: &[f64]) -> Result<MonotonicityReport> {
    let curves: Vec<GLCurve> = s_grid
        .par_iter()
        .map(|&s| if s == 1.0 { Ok(c.clone()) } else { homotopy_curve(c, s) })
        .collect::<Result<_>>()?;
    let maxes: Vec<f64> = curves.iter().map(|k| k.max_graph_second_derivative(GRAPH_PSI)).collect();
    let second_derivative_monotone = maxes.windows(2).all(|w| w[1] >= w[0]);
    let mut radius_increase = f64::NEG_INFINITY;
    for w in curves.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let ra = a.jets(|n| Jet::new(n.r, n.psi.cos(), -n.psi.sin() * n.kappa));
        let rb = b.jets(|n| Jet::new(n.r, n.psi.cos(), -n.psi.sin() * n.kappa));
        let len = a.length().min(b.length());
        for k in 0..=RADIUS_SAMPLES {
            let l = len * k as f64 / RADIUS_SAMPLES as f64;
            radius_increase = radius_increase.max(interp(&rb, l).f - interp(&ra, l).f);
        }
    }
    Ok(MonotonicityReport {
        s: s_grid.to_vec(),
        max_second_derivative: maxes,
        second_derivative_monotone,
        radius_increase,
        radii_monotone: radius_increase <= RADIUS_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::scalar_curvature;
    use crate::radial::finite_diff_check;

    fn flat_budget() -> Budget {
        Budget::new(vec![RadialProfile::flat(1.0).unwrap()], 2, 2).unwrap()
    }

    #[test]
    fn ramp_integral_total() {
        assert!((ramp_integral(1.0) - (1.0 - RAMP_EPS)).abs() < 1e-15);
        let e = RAMP_EPS;
        let q = quad::integrate(ramp, 0.0, e, 4) + quad::integrate(ramp, e, 1.0 - e, 4) + quad::integrate(ramp, 1.0 - e, 1.0, 4);
        assert!((q - ramp_integral(1.0)).abs() < 1e-13);
        let q = quad::integrate(ramp, 0.0, e, 4) + quad::integrate(ramp, e, 0.4, 4);
        assert!((ramp_integral(0.4) - q).abs() < 1e-13);
    }

    #[test]
    fn vertical_curve_is_identity() {
        let c = GLCurve::vertical(1.0).unwrap();
        let s = arc_length_param(&c, 64).unwrap();
        for x in &s {
            assert!((x.r - x.arc).abs() < 1e-15);
            assert_eq!(x.dr, 1.0);
        }
        let amb = RadialProfile::flat(1.0).unwrap();
        let p = induced_profile(&c, &amb).unwrap();
        assert!(p.sup_distance(&amb) < 1e-10);
    }

    #[test]
    fn quarter_circle_gives_hemisphere() {
        let c = GLCurve::quarter_circle(0.2).unwrap();
        let s = arc_length_param(&c, 128).unwrap();
        assert_eq!(s[0].r, 0.0);
        assert_eq!(s[0].dr, 1.0);
        for x in &s {
            assert!((x.r - 0.2 * (x.arc / 0.2).sin()).abs() < 1e-12, "{x:?}");
        }
        let amb = RadialProfile::flat(1.0).unwrap();
        let cert = {
            let prof = induced_profile(&c, &amb).unwrap();
            crate::curvature::offset_certificate(&prof, 4, 0.0, 4, 256, 0.0).unwrap()
        };
        // q = 3 fiber of dimension 4, no base: 4·3/ρ̄²
        assert!((cert.r_min - 300.0).abs() < 1e-6, "{}", cert.r_min);
    }

    #[test]
    fn flat_ambient_profile_is_r() {
        let (c, _) = build_gl_curve(&RadialProfile::flat(1.0).unwrap(), 2, 2, 0.05, 0.0).unwrap();
        let prof = induced_profile(&c, &RadialProfile::flat(1.0).unwrap()).unwrap();
        for s in arc_length_param(&c, 200).unwrap() {
            assert!((prof.eval(s.arc).unwrap().f - s.r).abs() < 1e-12);
        }
    }

    #[test]
    fn model_curvature_examples() {
        let amb = RadialProfile::flat(1.0).unwrap();
        let v = GLCurve::vertical(1.0).unwrap();
        let c = total_model_curvature(&v, &amb, 2, 2, 0.0).unwrap();
        assert!(c.grid.iter().all(|g| (g.value - 2.0).abs() < 1e-12));
        assert!(matches!(total_model_curvature(&v, &amb, 2, 1, 0.0), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn built_curve_shape() {
        let amb = RadialProfile::flat(1.0).unwrap();
        let (c, cert) = build_gl_curve(&amb, 2, 2, 0.05, 0.0).unwrap();
        assert!(cert.pass && cert.r_min > 0.0);
        let h = c.horizontal_height().unwrap();
        assert!((h - 0.05).abs() < 0.005, "{h}");
        assert!(c.tilt_angle > 0.0 && c.tilt_angle <= MAX_TILT);
        assert!(c.tilted_len > 0.0);
        // starts at (0, ρ̄), tip on the axis, r′ = 1 there
        let last = c.nodes().last().unwrap();
        assert_eq!((last.t, last.r), (0.0, 1.0));
        assert_eq!(c.nodes()[0].r, 0.0);
        // bends turn toward the axis (κ < 0 going up), terminal arc the other way
        assert!(c.nodes().iter().filter(|n| n.seg == Segment::Bend2).all(|n| n.kappa <= 0.0));
        assert!(c.nodes().iter().filter(|n| n.seg == Segment::Terminal).all(|n| n.kappa > 0.0));
        // r increases strictly from the tip once past it
        assert!(c.nodes().windows(2).all(|w| w[1].r >= w[0].r));
    }

    #[test]
    fn curve_is_c2_at_junctions() {
        let amb = RadialProfile::flat(1.0).unwrap();
        let (c, _) = build_gl_curve(&amb, 2, 2, 0.05, 0.0).unwrap();
        let n = c.nodes();
        let kmax = n.iter().map(|x| x.kappa.abs()).fold(0.0, f64::max);
        for w in n.windows(3) {
            if w[0].seg != w[1].seg || w[1].seg != w[2].seg {
                // tangent: the turn between nodes is what the curvature predicts
                let ds = w[1].arc - w[0].arc;
                let turn = 0.5 * (w[0].kappa + w[1].kappa) * ds;
                assert!((w[1].psi - w[0].psi - turn).abs() < 1e-6, "{:?} {:?}", w[0], w[1]);
                // curvature: no jump across the junction
                assert!((w[1].kappa - w[0].kappa).abs() < 0.02 * kmax, "{:?} {:?}", w[0], w[1]);
                assert!((w[2].kappa - w[1].kappa).abs() < 0.02 * kmax, "{:?} {:?}", w[1], w[2]);
            }
        }
    }

    #[test]
    fn induced_profile_derivatives_consistent() {
        let amb = RadialProfile::flat(1.0).unwrap();
        let (c, _) = build_gl_curve(&amb, 2, 2, 0.05, 0.0).unwrap();
        let prof = induced_profile(&c, &amb).unwrap();
        let l = prof.r_max();
        for i in 1..2000 {
            let r = 2e-4 + (l - 4e-4) * i as f64 / 2000.0;
            let d = finite_diff_check(&prof, r, 1e-4).unwrap();
            assert!(d < 1e-5, "arc {r}: {d}");
        }
    }

    #[test]
    fn tip_is_round_with_contact_radius() {
        let amb = RadialProfile::flat(1.0).unwrap();
        let (c, _) = build_gl_curve(&amb, 2, 2, 0.05, 0.0).unwrap();
        let prof = induced_profile(&c, &amb).unwrap();
        let r0 = scalar_curvature(&prof, 3, 0.0).unwrap();
        assert!((r0 - 6.0 / 0.0025).abs() < 1e-6 * r0, "{r0}");
    }

    #[test]
    fn search_failure_carries_best_certificate() {
        let amb = RadialProfile::flat(1.0).unwrap();
        match build_gl_curve(&amb, 2, 2, 0.05, 1e9) {
            Err(Error::ConstructionFailed { best: Some(b), .. }) => assert!(!b.pass),
            other => panic!("{other:?}"),
        }
        assert!(build_gl_curve(&amb, 2, 2, 2.0, 0.0).is_err());
    }

    #[test]
    fn homotopy_is_monotone() {
        let amb = RadialProfile::flat(1.0).unwrap();
        let (c, _) = build_gl_curve(&amb, 2, 2, 0.05, 0.0).unwrap();
        let grid: Vec<f64> = (0..=16).map(|k| k as f64 / 16.0).collect();
        let rep = homotopy_monotonicity(&c, &grid).unwrap();
        assert!(rep.second_derivative_monotone, "{:?}", rep.max_second_derivative);
        assert!(rep.radii_monotone, "{}", rep.radius_increase);
        assert_eq!(rep.max_second_derivative[0], 0.0);
    }

    #[test]
    fn scaled_family_is_continuous_at_zero() {
        let shape = CurveShape::standard(1.0, 0.3, 0.05);
        let b = flat_budget();
        let c = GLCurve::trace(&shape.scaled(1e-4), &b).unwrap();
        let amb = RadialProfile::flat(1.0).unwrap();
        let p = induced_profile(&c, &amb).unwrap();
        // nearly the straight segment: r(arc) ≈ arc
        for s in arc_length_param(&c, 64).unwrap() {
            assert!((s.r - s.arc).abs() < 1e-3);
        }
        assert!((p.r_max() - 1.0).abs() < 1e-3);
    }
}
