//! Deformation retract of almost-standard tube profiles onto standard (torpedo) ones.
//!
//! A profile w on (0, ρ_std] is admissible when it is odd-smooth at the origin,
//! w′ ≥ 0 on (0, ρ_std] and w″ ≤ 0 near 0. The first zeros ρ′₀ of w′ and ρ″₀ of w″
//! sort it into four cases; each is moved to a standard profile by a certified path.
//! Certificates use the product model S^p × (D^{q+1}, dr² + w² ds_q²).

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bend::{build_gl_curve, stage1_homotopy};
use crate::config::RunConfig;
use crate::curvature::CurvatureCertificate;
use crate::error::{Error, Result};
use crate::isotopy::{neck_window, standard_target};
use crate::path::{product_certificate, MetricPath};
use crate::radial::{linear_blend, uniform, Jet, RadialProfile};
use crate::torpedo::{is_torpedo_near_origin, torpedo_profile, TorpedoSpec};

const SCAN_POINTS: usize = 4096;
const BISECTIONS: usize = 60;
/// smallest neck radius tried by the bend, relative to ρ₀
const MIN_NECK: f64 = 1e-3;
/// ρ′₀ and ρ″₀ closer than this fraction of their size count as one zero: the
/// thresholds fire at different distances before a high-order contact point
pub const TIE_FRACTION: f64 = 1e-2;
/// w′ may dip this far below zero (interpolation noise) and still count as w′ ≥ 0
const SLOPE_TOL: f64 = 1e-7;
/// relative slack allowed for the torpedo cap δπ/2 to poke past ρ₀
const CAP_SLACK: f64 = 1e-6;
const MAX_HALVINGS: usize = 30;
/// |w′| bound on the window where w″ is lifted
const LIFT_SLOPE: f64 = 0.1;
const LIFT_KNOTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileClassification {
    pub rho_std: f64,
    /// first zero of w′ in (0, ρ_std], if any
    pub rho_p0: Option<f64>,
    /// first zero of w″ after w″ went negative, if any
    pub rho_pp0: Option<f64>,
    pub rho_0: f64,
    pub case_id: u8,
}

/// Locates ρ′₀, ρ″₀ and the case. Zeros are thresholded at `zero_tol` and refined by
/// bisection; ties are decided with a location tolerance of TIE_FRACTION.
pub fn classify(w: &RadialProfile, rho_std: f64, zero_tol: f64) -> Result<ProfileClassification> {
    let r_max = w.r_max();
    if !(rho_std > 0.0 && rho_std <= r_max * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!("rho_std must lie in (0, {r_max}] (got {rho_std})")));
    }
    if !(zero_tol > 0.0 && zero_tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("zero tolerance must be positive (got {zero_tol})")));
    }
    let rho_std = rho_std.min(r_max);
    if w.odd_extension_defect() > 1e-6 * r_max {
        return Err(Error::NotAdmissible("profile does not extend to an odd function at the origin".into()));
    }
    let r0 = w.series_threshold().min(0.5 * rho_std);
    let mut pts: Vec<f64> = uniform(r0, rho_std, SCAN_POINTS);
    pts.extend(w.knots().iter().copied().filter(|&k| k > r0 && k < rho_std));
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let near = 0.05 * rho_std;
    let mut rho_p0 = None;
    let mut rho_pp0 = None;
    let mut seen_negative = false;
    for (i, &r) in pts.iter().enumerate() {
        let j = w.eval_clamped(r);
        if j.d1 < -SLOPE_TOL {
            return Err(Error::NotAdmissible(format!("w' = {:e} < 0 at r = {r} inside (0, rho_std]", j.d1)));
        }
        if r <= near && j.d2 > zero_tol {
            return Err(Error::NotAdmissible(format!("w'' = {:e} > 0 near the origin (r = {r})", j.d2)));
        }
        if rho_p0.is_none() && j.d1 <= zero_tol {
            rho_p0 = Some(refine_zero(w, pts[i.saturating_sub(1)], r, |j| j.d1 <= zero_tol));
        }
        if rho_pp0.is_none() {
            if seen_negative && j.d2 >= -zero_tol {
                rho_pp0 = Some(refine_zero(w, pts[i - 1], r, |j| j.d2 >= -zero_tol));
            }
            seen_negative |= j.d2 < -zero_tol;
        }
    }

    let (case_id, rho_0) = match (rho_p0, rho_pp0) {
        (Some(a), Some(b)) if (a - b).abs() <= zero_tol.max(TIE_FRACTION * a.min(b)) => (1, a.max(b)),
        (Some(a), Some(b)) if a < b => (2, a),
        (Some(a), None) => (2, a),
        (_, Some(b)) => (3, b),
        (None, None) => (4, rho_std),
    };
    Ok(ProfileClassification { rho_std, rho_p0, rho_pp0, rho_0, case_id })
}

// first point in [lo, hi] where `hit` holds, assuming it fails at lo
fn refine_zero(w: &RadialProfile, mut lo: f64, mut hi: f64, hit: impl Fn(Jet) -> bool) -> f64 {
    if hit(w.eval_clamped(lo)) {
        return lo;
    }
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hit(w.eval_clamped(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Shared settings of one retraction run.
#[derive(Clone, Copy, Debug)]
struct Ctx {
    p: usize,
    q: usize,
    steps: usize,
    points: usize,
    margin: f64,
    zero_tol: f64,
    delta: f64,
    width: f64,
}

impl Ctx {
    fn new(w: &RadialProfile, rho0: f64, p: usize, q: usize, cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        if q < 2 {
            return Err(Error::Hypothesis(format!("sphere factor S^q needs q >= 2 (got q = {q})")));
        }
        // curvature scale of the input near the modified region
        let scale = w.eval_clamped(rho0.min(w.r_max())).f;
        Ok(Ctx {
            p,
            q,
            steps: cfg.steps,
            points: cfg.grid_points,
            margin: cfg.margin_for(p + q + 1, Some(scale)),
            zero_tol: cfg.zero_tol,
            delta: cfg.delta,
            width: cfg.smoothing_width,
        })
    }

    fn certify(&self, prof: &RadialProfile) -> Result<CurvatureCertificate> {
        product_certificate(prof, self.p, self.q, self.points, self.margin)
    }

    /// Certifies profile(s) for s on the grid; any failed step fails the stage.
    fn stage(
        &self,
        path: &mut MetricPath,
        stage: &str,
        profile: impl Fn(f64) -> Result<RadialProfile> + Sync,
    ) -> Result<()> {
        let results: Vec<Result<(f64, RadialProfile, CurvatureCertificate)>> = (0..=self.steps)
            .into_par_iter()
            .map(|k| {
                let s = k as f64 / self.steps as f64;
                let prof = profile(s).map_err(|e| match e {
                    Error::NonPositive { .. } | Error::InvalidProfile(_) => {
                        Error::HomotopyFailed { stage: stage.into(), s, r_min: f64::NEG_INFINITY }
                    }
                    e => e,
                })?;
                let cert = self.certify(&prof)?;
                Ok((s, prof, cert))
            })
            .collect();
        for r in results {
            let (s, prof, cert) = r?;
            if !cert.pass {
                return Err(Error::HomotopyFailed { stage: stage.into(), s, r_min: cert.r_min });
            }
            path.push(stage, s, prof, cert);
        }
        Ok(())
    }
}

// a zero sitting (numerically) on the end of the domain is the end
fn snap(w: &RadialProfile, rho0: f64) -> f64 {
    if w.r_max() - rho0 <= 1e-6 * rho0 {
        w.r_max()
    } else {
        rho0
    }
}

fn failed(stage: &str, reason: String) -> Error {
    Error::RetractFailed { stage: stage.into(), reason }
}

/// Case 1 (w′ and w″ vanish together at ρ₀): linear homotopy on (0, ρ₀] to the
/// torpedo f_{w(ρ₀)} with neck end b = ρ₀; the profile is fixed beyond ρ₀.
/// When the cap w(ρ₀)π/2 does not fit in (0, ρ₀] the tube is bent instead.
pub fn retract_case1(w: &RadialProfile, rho0: f64, p: usize, q: usize, cfg: &RunConfig) -> Result<MetricPath> {
    let rho0 = snap(w, rho0);
    let ctx = Ctx::new(w, rho0, p, q, cfg)?;
    let mut path = MetricPath::new(p, q);
    case1_into(&mut path, w, rho0, &ctx)?;
    Ok(path)
}

fn case1_into(path: &mut MetricPath, w: &RadialProfile, rho0: f64, ctx: &Ctx) -> Result<()> {
    let d = w.eval_clamped(rho0).f;
    let cap = d * FRAC_PI_2;
    // detected zeros sit slightly inside a high-order contact point, so a cap that
    // overshoots by no more than the tie tolerance moves ρ₀ out to it
    let rho0 = if rho0 < cap && cap <= (rho0 * (1.0 + TIE_FRACTION)).min(w.r_max()) { cap } else { rho0 };
    if rho0 < cap * (1.0 - CAP_SLACK) {
        return bend_into(path, w, rho0, ctx, "case1-bend");
    }
    let w = w.refine(&[rho0]);
    let torpedo = torpedo_profile(&TorpedoSpec { delta: d, b: rho0.max(cap), smoothing_width: ctx.width })?;
    let target = if torpedo.r_max() > rho0 { torpedo.restrict(rho0)? } else { torpedo };
    let inner = w.restrict(rho0)?;
    ctx.stage(path, "case1", |s| attach_outer(&linear_blend(&inner, &target, s)?, &w, rho0, 1e-6 * d))?;
    check_standard(path, "case1")
}

fn check_standard(path: &MetricPath, stage: &str) -> Result<()> {
    let end = path.last().expect("non-empty path");
    if is_torpedo_near_origin(end, 1e-7 * end.r_max()).is_none() {
        return Err(failed(stage, "endpoint is not of torpedo form near the origin".into()));
    }
    Ok(())
}

/// `inner` on [0, inner.r_max], then w from `at` on, shifted to start at inner.r_max.
/// `at` must be a knot of w (refine first) for the outer part to be w exactly.
fn attach_outer(inner: &RadialProfile, w: &RadialProfile, at: f64, tol: f64) -> Result<RadialProfile> {
    if at >= w.r_max() {
        return Ok(inner.clone());
    }
    let end = inner.r_max();
    let a = inner.eval_clamped(end);
    let b = w.eval_clamped(at);
    let gap = (a.f - b.f).abs().max((a.d1 - b.d1).abs() * at).max((a.d2 - b.d2).abs() * at * at);
    if gap > tol {
        return Err(Error::Construction(format!("inner and outer jets differ by {gap:e} at r = {at}")));
    }
    let shift = end - at;
    let (mut knots, mut f, mut d1, mut d2) =
        (inner.knots().to_vec(), inner.values().to_vec(), inner.d1().to_vec(), inner.d2().to_vec());
    for (i, &k) in w.knots().iter().enumerate() {
        if k > at * (1.0 + 1e-13) {
            knots.push(k + shift);
            f.push(w.values()[i]);
            d1.push(w.d1()[i]);
            d2.push(w.d2()[i]);
        }
    }
    RadialProfile::new(knots, f, d1, d2, inner.origin_smooth())
}

/// w with w″ raised by amount·φ on [c − ε, c] (and mirrored on [c, c + ε] when
/// `two_sided`), φ(x) = 6x² − 20x³ + 15x⁴. φ(1) = 1 and its first two moments
/// vanish, so w and w′ are unchanged at the window ends.
fn lift(w: &RadialProfile, c: f64, eps: f64, amount: f64, two_sided: bool) -> Result<RadialProfile> {
    let right = if two_sided { c + eps } else { c };
    let mut extra = uniform(c - eps, c, LIFT_KNOTS);
    if two_sided {
        extra.extend(uniform(c, right, LIFT_KNOTS));
    }
    let base = w.refine(&extra);
    let knots = base.knots().to_vec();
    let jets: Vec<Jet> = knots
        .iter()
        .map(|&r| {
            let j = base.eval_clamped(r);
            let (x, sign) = if r > c - eps && r <= c {
                ((r - (c - eps)) / eps, 1.0)
            } else if two_sided && r > c && r < right {
                ((right - r) / eps, -1.0)
            } else {
                return j;
            };
            let phi = x * x * (6.0 - 20.0 * x + 15.0 * x * x);
            let phi1 = x.powi(3) * (2.0 - 5.0 * x + 3.0 * x * x);
            let phi2 = 0.5 * x.powi(4) * (1.0 - x).powi(2);
            Jet::new(j.f + amount * eps * eps * phi2, j.d1 + sign * amount * eps * phi1, j.d2 + amount * phi)
        })
        .collect();
    RadialProfile::new(
        knots,
        jets.iter().map(|j| j.f).collect(),
        jets.iter().map(|j| j.d1).collect(),
        jets.iter().map(|j| j.d2).collect(),
        w.origin_smooth(),
    )
}

/// Largest window ε ≤ eps0 (by halving) for which the lift keeps w″ ≤ 0 and
/// |w′| < LIFT_SLOPE on the left half, w′ ≥ 0 where required, and certifies.
#[allow(clippy::too_many_arguments)]
fn choose_window(
    w: &RadialProfile,
    c: f64,
    eps0: f64,
    amount: f64,
    two_sided: bool,
    slope_bound: bool,
    ctx: &Ctx,
    stage: &str,
) -> Result<f64> {
    let mut eps = eps0;
    for _ in 0..MAX_HALVINGS {
        if let Ok(l) = lift(w, c, eps, amount, two_sided) {
            let window = uniform(c - eps, c, 128);
            let ok_shape = window.iter().all(|&r| {
                let j = l.eval_clamped(r);
                j.d2 <= ctx.zero_tol && j.d1 >= -SLOPE_TOL && (!slope_bound || j.d1.abs() < LIFT_SLOPE)
            });
            if ok_shape && ctx.certify(&l).is_ok_and(|cert| cert.pass) {
                return Ok(eps);
            }
        }
        eps *= 0.5;
    }
    Err(failed(stage, format!("no lift window down to {eps:e} keeps w'' <= 0 and positive curvature")))
}

/// Case 2 (w′ vanishes first, w″(ρ₀) < 0): lift w″ to 0 at ρ₀ on a small window,
/// then case 1.
pub fn retract_case2(w: &RadialProfile, rho0: f64, p: usize, q: usize, cfg: &RunConfig) -> Result<MetricPath> {
    let rho0 = snap(w, rho0);
    let ctx = Ctx::new(w, rho0, p, q, cfg)?;
    let amount = (-w.eval_clamped(rho0).d2).max(0.0);
    let room = w.r_max() - rho0;
    let two_sided = room > 0.0;
    let eps0 = if two_sided { (0.25 * rho0).min(room) } else { 0.25 * rho0 };
    let eps = choose_window(w, rho0, eps0, amount, two_sided, true, &ctx, "case2-lift")?;
    let mut path = MetricPath::new(p, q);
    ctx.stage(&mut path, "case2-lift", |s| lift(w, rho0, eps, s * amount, two_sided))?;
    let lifted = path.last().expect("non-empty path").clone();
    case1_into(&mut path, &lifted, rho0, &ctx)?;
    Ok(path)
}

/// Case 3 (w″ vanishes at ρ₀ with w′(ρ₀) > 0): the tube (0, ρ₀] is bent — straight
/// top, shrunken cap, neck — under a certified curve family, then the neck is
/// blended to a torpedo. The part beyond ρ₀ is carried along unchanged (its
/// radial coordinate shifts by the change in tube length).
pub fn retract_case3(w: &RadialProfile, rho0: f64, p: usize, q: usize, cfg: &RunConfig) -> Result<MetricPath> {
    let rho0 = snap(w, rho0);
    let ctx = Ctx::new(w, rho0, p, q, cfg)?;
    let mut path = MetricPath::new(p, q);
    bend_into(&mut path, w, rho0, &ctx, "case3-bend")?;
    Ok(path)
}

fn bend_into(path: &mut MetricPath, w: &RadialProfile, rho0: f64, ctx: &Ctx, stage: &str) -> Result<()> {
    let w = w.refine(&[rho0]);
    let inner = w.restrict(rho0)?;
    let tol = 1e-8 * w.eval_clamped(rho0).f;
    // neck radius: small against the tube. The unit base sphere makes the upper
    // bend costly on thin tubes, so the neck shrinks until the curve fits.
    let mut delta = ctx.delta.min(rho0 / 8.0);
    let curve = loop {
        match build_gl_curve(&inner, ctx.p, ctx.q, delta, ctx.margin) {
            Ok((c, _)) => break c,
            Err(Error::ConstructionFailed { .. }) if delta > MIN_NECK * rho0 => delta *= 0.5,
            Err(e) => return Err(e),
        }
    };
    let bend = stage1_homotopy(&curve, &inner, ctx.p, ctx.q, ctx.steps, ctx.margin).map_err(|e| match e {
        Error::HomotopyFailed { s, r_min, .. } => Error::HomotopyFailed { stage: stage.into(), s, r_min },
        e => e,
    })?;
    let profiles: Vec<RadialProfile> = bend.steps.into_iter().map(|st| st.profile).collect();
    ctx.stage(path, stage, |s| {
        let k = (s * ctx.steps as f64).round() as usize;
        attach_outer(&profiles[k], &w, rho0, tol)
    })?;

    let fiber = profiles.last().expect("non-empty path");
    let (a, b) = neck_window(&curve).ok_or_else(|| failed(stage, "curve has no neck".into()))?;
    let neck = fiber.eval_clamped(0.5 * (a + b)).f;
    let spec = TorpedoSpec { delta: neck, b: a + 0.25 * (b - a), smoothing_width: ctx.width };
    let target = standard_target(fiber, &spec, 0.5 * (b - a))?;
    ctx.stage(path, "case1", |s| attach_outer(&linear_blend(fiber, &target, s)?, &w, rho0, tol))?;
    check_standard(path, stage)
}

/// Case 4 (w′ > 0 and w″ < 0 on all of (0, ρ_std]): lift w″ to 0 at ρ_std − ε,
/// then case 3 there.
pub fn retract_case4(w: &RadialProfile, rho_std: f64, p: usize, q: usize, cfg: &RunConfig) -> Result<MetricPath> {
    let rho_std = rho_std.min(w.r_max());
    let ctx = Ctx::new(w, rho_std, p, q, cfg)?;
    let mut eps = rho_std / 8.0;
    let mut path = MetricPath::new(p, q);
    for _ in 0..MAX_HALVINGS {
        let c = rho_std - eps;
        let amount = (-w.eval_clamped(c).d2).max(0.0);
        if let Ok(e) = choose_window(w, c, eps, amount, true, false, &ctx, "case4-lift") {
            if e == eps {
                ctx.stage(&mut path, "case4-lift", |s| lift(w, c, eps, s * amount, true))?;
                let lifted = path.last().expect("non-empty path").clone();
                bend_into(&mut path, &lifted, c, &ctx, "case3-bend")?;
                return Ok(path);
            }
        }
        eps *= 0.5;
    }
    Err(failed("case4-lift", "no lift window inside (0, rho_std] certifies".into()))
}

/// Certified path from w to a standard profile. Standard inputs give the constant path.
pub fn deformation_retract(w: &RadialProfile, rho_std: f64, p: usize, q: usize, cfg: &RunConfig) -> Result<MetricPath> {
    cfg.validate()?;
    if let Some((_, rho)) = is_torpedo_near_origin(w, cfg.recognition_tol) {
        let ctx = Ctx::new(w, rho, p, q, cfg)?;
        let cert = ctx.certify(w)?;
        if !cert.pass {
            return Err(Error::HomotopyFailed { stage: "input".into(), s: 0.0, r_min: cert.r_min });
        }
        let mut path = MetricPath::new(p, q);
        for k in 0..=cfg.steps {
            path.push("standard", k as f64 / cfg.steps as f64, w.clone(), cert.clone());
        }
        return Ok(path);
    }
    let c = classify(w, rho_std, cfg.zero_tol)?;
    let ctx = Ctx::new(w, c.rho_0, p, q, cfg)?;
    let input = ctx.certify(w)?;
    if !input.pass {
        return Err(Error::NotAdmissible(format!("input has R_min = {} in the product model", input.r_min)));
    }
    match c.case_id {
        1 => retract_case1(w, c.rho_0, p, q, cfg),
        2 => retract_case2(w, c.rho_0, p, q, cfg),
        3 => retract_case3(w, c.rho_0, p, q, cfg),
        _ => retract_case4(w, c.rho_std, p, q, cfg),
    }
}

/// Odd polynomial Σ c·r^m (m odd) used as −w″ on [0, L]; w is linear beyond L.
#[derive(Clone, Debug)]
struct Concavity {
    terms: Vec<(i32, f64)>,
    end: f64,
}

impl Concavity {
    /// C·r(L² − r²)^k + η·C·r, scaled so ∫₀^L = total
    fn new(l: f64, k: i32, eta: f64, total: f64) -> Self {
        let mut terms = Vec::new();
        let mut binom = 1.0;
        for j in 0..=k {
            terms.push((2 * j + 1, binom * (-1f64).powi(j) * l.powi(2 * (k - j))));
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        terms.push((1, eta * l.powi(2 * k)));
        let mut c = Concavity { terms, end: l };
        let scale = total / c.primitive(l);
        for t in &mut c.terms {
            t.1 *= scale;
        }
        c
    }

    fn primitive(&self, r: f64) -> f64 {
        self.terms.iter().map(|&(m, c)| c * r.powi(m + 1) / (m + 1) as f64).sum()
    }

    fn jet(&self, r: f64) -> Jet {
        let x = r.min(self.end);
        let g: f64 = self.terms.iter().map(|&(m, c)| c * x.powi(m)).sum();
        let g1 = self.primitive(x);
        let g2: f64 = self.terms.iter().map(|&(m, c)| c * x.powi(m + 2) / ((m + 1) * (m + 2)) as f64).sum();
        let (f, d1) = (x - g2, 1.0 - g1);
        if r <= self.end {
            Jet::new(f, d1, -g)
        } else {
            Jet::new(f + d1 * (r - x), d1, 0.0)
        }
    }
}

/// One random admissible sample: the profile, its ρ_std and the case it was drawn for.
#[derive(Clone, Debug)]
pub struct AdmissibleSample {
    pub profile: RadialProfile,
    pub rho_std: f64,
    pub case_id: u8,
}

/// `count` admissible profiles from a seeded generator, cycling through the four
/// cases. All are psc in the product model with p ≥ 2.
pub fn random_admissible(seed: u64, count: usize) -> Result<Vec<AdmissibleSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let case_id = (i % 4) as u8 + 1;
        let l: f64 = rng.gen_range(0.5..2.0);
        let k = rng.gen_range(1..=2);
        let (g, r_max, rho_std) = match case_id {
            // w′ and w″ reach 0 together at L, then a plateau
            1 => {
                let r_max = l * rng.gen_range(1.1..2.0);
                (Concavity::new(l, k, 0.0, 1.0), r_max, rng.gen_range(l..r_max))
            }
            // w′ reaches 0 at L with w″(L) < 0; the tube ends there
            2 => (Concavity::new(l, k, rng.gen_range(0.05..0.5), 1.0), l, l),
            // w″ reaches 0 at L with w′(L) > 0, then a line
            3 => {
                let r_max = l * rng.gen_range(1.2..2.0);
                let total = rng.gen_range(0.2..0.9);
                (Concavity::new(l, k, 0.0, total), r_max, rng.gen_range(1.05 * l..r_max))
            }
            // strictly concave and increasing on the whole tube
            _ => {
                let total = rng.gen_range(0.2..0.9);
                (Concavity::new(l, k, rng.gen_range(0.05..0.5), total), l, l)
            }
        };
        let knots = uniform(0.0, r_max, 256);
        let mut knots = knots;
        if g.end < r_max {
            knots.push(g.end);
            knots.sort_by(f64::total_cmp);
            knots.dedup();
        }
        let profile = RadialProfile::from_fn(knots, |r| g.jet(r), true)?;
        out.push(AdmissibleSample { profile, rho_std, case_id });
    }
    Ok(out)
}
