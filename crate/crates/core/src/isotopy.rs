//! Second stage of the isotopy (linear homotopies on fibre and base), the composed
//! isotopy from an arbitrary psc tube profile to a standard one, and its family form.
//!
//! The model is the product S^p(ρ_base) × (D^{q+1}, dr² + f(r)² ds_q²). The third
//! homotopy of the classical argument (flattening the horizontal distribution) is a
//! no-op here: the product model has no horizontal distribution to flatten.

use rayon::prelude::*;
use serde::Serialize;

use crate::bend::{build_shared_curve, stage1_homotopy, GLCurve, Segment};
use crate::config::RunConfig;
use crate::curvature::{offset_certificate, CurvatureCertificate, DEFAULT_GRID_POINTS};
use crate::error::{Error, Result};
use crate::path::{product_certificate, MetricPath};
use crate::radial::{linear_blend, RadialProfile};
use crate::torpedo::{is_torpedo_near_origin, torpedo_profile, TorpedoSpec};

#[derive(Clone, Debug)]
pub struct SubmersionModel {
    pub p: usize,
    pub q: usize,
    pub base_radius: f64,
    pub fiber: RadialProfile,
}

impl SubmersionModel {
    pub fn new(p: usize, q: usize, base_radius: f64, fiber: RadialProfile) -> Result<Self> {
        if q < 2 {
            return Err(Error::Hypothesis(format!("sphere factor S^q needs q >= 2 (got q = {q})")));
        }
        if !(base_radius > 0.0 && base_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("base radius must be positive (got {base_radius})")));
        }
        Ok(SubmersionModel { p, q, base_radius, fiber })
    }

    pub fn dimension(&self) -> usize {
        self.p + self.q + 1
    }

    /// p(p−1)/ρ²: round S^p of radius ρ (0 for p ≤ 1)
    pub fn base_curvature(&self) -> f64 {
        sphere_curvature(self.p, self.base_radius)
    }

    pub fn certificate(&self, points: usize, margin: f64) -> Result<CurvatureCertificate> {
        offset_certificate(&self.fiber, self.q + 1, self.base_curvature(), self.dimension(), points, margin)
    }
}

fn sphere_curvature(p: usize, radius: f64) -> f64 {
    (p * p.saturating_sub(1)) as f64 / (radius * radius)
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < 16 {
        return Err(Error::InvalidArgument(format!("homotopy needs at least 16 steps (got {steps})")));
    }
    Ok(())
}

/// Torpedo f_δ on [0, spec.b], then blended into `fiber` over [b, b + blend_len]
/// (C² cutoff) and equal to `fiber` beyond. When b reaches the end of the fiber's
/// domain the target is the torpedo itself on that domain.
pub fn standard_target(fiber: &RadialProfile, spec: &TorpedoSpec, blend_len: f64) -> Result<RadialProfile> {
    let end = fiber.r_max();
    let cap = spec.delta * std::f64::consts::FRAC_PI_2;
    if end < cap * (1.0 - 1e-12) {
        return Err(Error::Hypothesis(format!(
            "fiber domain {end} is shorter than the torpedo cap delta*pi/2 = {cap}"
        )));
    }
    let whole = TorpedoSpec { b: end.max(cap), ..*spec };
    if spec.b + blend_len >= end * (1.0 - 1e-12) {
        return torpedo_profile(&whole);
    }
    if !(blend_len > 0.0) || spec.b < cap * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "splice window [{}, {}] must start past the cap at {cap}",
            spec.b,
            spec.b + blend_len
        )));
    }
    RadialProfile::splice(&torpedo_profile(&whole)?, fiber, spec.b, spec.b + blend_len)
}

/// Linear homotopy of fibre profiles from `model.fiber` to `target`, base fixed.
pub fn fiber_homotopy_to(
    model: &SubmersionModel,
    target: &RadialProfile,
    steps: usize,
    margin: f64,
    points: usize,
) -> Result<MetricPath> {
    check_steps(steps)?;
    let base = model.base_curvature();
    let n = model.dimension();
    let constant = model.fiber.sup_distance(target) == 0.0 && model.fiber.knots() == target.knots();
    let results: Vec<Result<(f64, RadialProfile, CurvatureCertificate)>> = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 / steps as f64;
            let prof = if constant { model.fiber.clone() } else { linear_blend(&model.fiber, target, s)? };
            // a blend that loses positivity of f is a failed step, not bad input
            let cert = offset_certificate(&prof, model.q + 1, base, n, points, margin).map_err(|e| match e {
                Error::InvalidProfile(_) | Error::NonPositive { .. } => {
                    Error::HomotopyFailed { stage: "fiber".into(), s, r_min: f64::NEG_INFINITY }
                }
                e => e,
            })?;
            Ok((s, prof, cert))
        })
        .collect();
    let mut path = MetricPath::new(model.p, model.q);
    for r in results {
        let (s, prof, cert) = r?;
        if !cert.pass {
            return Err(Error::HomotopyFailed { stage: "fiber".into(), s, r_min: cert.r_min });
        }
        path.push("fiber", s, prof, cert);
    }
    Ok(path)
}

/// Linear homotopy on fibres to the torpedo of `target` (spliced into the fibre
/// past target.b when the fibre is longer).
pub fn fiber_homotopy(model: &SubmersionModel, target: &TorpedoSpec, steps: usize, margin: f64) -> Result<MetricPath> {
    let rest = model.fiber.r_max() - target.b;
    let t = standard_target(&model.fiber, target, rest.min(2.0 * target.delta).max(0.0))?;
    fiber_homotopy_to(model, &t, steps, margin, DEFAULT_GRID_POINTS)
}

/// Linear path of the base radius; the fibre is fixed.
pub fn base_homotopy_with(
    model: &SubmersionModel,
    target_radius: f64,
    steps: usize,
    margin: f64,
    points: usize,
) -> Result<MetricPath> {
    check_steps(steps)?;
    if !(target_radius > 0.0 && target_radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("target radius must be positive (got {target_radius})")));
    }
    // R_fiber does not move: evaluate once and shift by the base term per step
    let fiber_cert = offset_certificate(&model.fiber, model.q + 1, 0.0, model.dimension(), points, margin)?;
    let mut path = MetricPath::new(model.p, model.q);
    for k in 0..=steps {
        let s = k as f64 / steps as f64;
        let radius = if k == steps { target_radius } else { (1.0 - s) * model.base_radius + s * target_radius };
        let off = sphere_curvature(model.p, radius);
        let mut cert = fiber_cert.clone();
        for g in &mut cert.grid {
            g.value += off;
        }
        cert.r_min += off;
        cert.pass = cert.r_min > margin;
        if !cert.pass {
            return Err(Error::HomotopyFailed { stage: "base".into(), s, r_min: cert.r_min });
        }
        path.push("base", s, model.fiber.clone(), cert);
    }
    Ok(path)
}

pub fn base_homotopy(model: &SubmersionModel, target_radius: f64, steps: usize) -> Result<MetricPath> {
    base_homotopy_with(model, target_radius, steps, 0.0, DEFAULT_GRID_POINTS)
}

/// Arc-length window [start, end] of the horizontal run of a traced curve.
pub fn neck_window(c: &GLCurve) -> Option<(f64, f64)> {
    let arcs: Vec<f64> = c.nodes().iter().filter(|n| n.seg == Segment::Horizontal).map(|n| n.arc).collect();
    Some((*arcs.first()?, *arcs.last()?))
}

/// (δ, ρ) when `p` already has torpedo form of radius `delta` near the origin.
fn standard_with(p: &RadialProfile, delta: f64, tol: f64) -> Option<(f64, f64)> {
    is_torpedo_near_origin(p, tol).filter(|(d, _)| (d - delta).abs() <= 1e-6 * delta)
}

/// Isotopy from `ambient` to a standard profile, optionally through a curve
/// shared with other family members.
fn isotopy_through(
    ambient: &RadialProfile,
    p: usize,
    q: usize,
    cfg: &RunConfig,
    curve: Option<&GLCurve>,
) -> Result<MetricPath> {
    let n = p + q + 1;
    let margin = cfg.margin_for(n, Some(cfg.delta));
    let input = product_certificate(ambient, p, q, cfg.grid_points, margin)?;
    if !input.pass {
        return Err(Error::HomotopyFailed { stage: "input".into(), s: 0.0, r_min: input.r_min });
    }
    let spec = TorpedoSpec { delta: cfg.delta, b: 0.0, smoothing_width: cfg.smoothing_width };
    let mut path = MetricPath::new(p, q);

    // Stage 1: bend the tube, or stand still when the ambient is already standard
    let (fiber, target) = if standard_with(ambient, cfg.delta, cfg.recognition_tol).is_some() {
        for k in 0..=cfg.steps {
            path.push("bend", k as f64 / cfg.steps as f64, ambient.clone(), input.clone());
        }
        (ambient.clone(), ambient.clone())
    } else {
        {
            let owned;
            let c = match curve {
                Some(c) => c,
                None => {
                    owned = build_shared_curve(std::slice::from_ref(ambient), p, q, cfg.delta, margin)?.0;
                    &owned
                }
            };
            let bend = stage1_homotopy(c, ambient, p, q, cfg.steps, margin)?;
            let fiber = bend.last().expect("non-empty path").clone();
            path.extend(bend);
            let (a, b) = neck_window(c)
                .ok_or_else(|| Error::Construction("curve has no horizontal run to splice into".into()))?;
            let w = b - a;
            let spec = TorpedoSpec { b: a + 0.25 * w, ..spec };
            let target = standard_target(&fiber, &spec, 0.5 * w)?;
            (fiber, target)
        }
    };

    // Stage 2: fibres to the torpedo, then the base to the configured radius
    let model = SubmersionModel::new(p, q, 1.0, fiber)?;
    path.extend(fiber_homotopy_to(&model, &target, cfg.steps, margin, cfg.grid_points)?);
    let model = SubmersionModel::new(p, q, 1.0, target)?;
    path.extend(base_homotopy_with(&model, cfg.base_radius, cfg.steps, margin, cfg.grid_points)?);

    let end = path.last().expect("non-empty path");
    if standard_with(end, cfg.delta, cfg.recognition_tol).is_none() {
        return Err(Error::Construction(format!(
            "isotopy endpoint is not a torpedo of radius {} near the origin",
            cfg.delta
        )));
    }
    Ok(path)
}

/// Bend (Stage 1), fibre and base homotopies (Stage 2) from `ambient` to a profile
/// of torpedo form with radius cfg.delta near the origin. Every step is certified.
pub fn gromov_lawson_isotopy(ambient: &RadialProfile, p: usize, q: usize, cfg: &RunConfig) -> Result<MetricPath> {
    cfg.validate()?;
    isotopy_through(ambient, p, q, cfg, None)
}

/// Sup-norm distances between adjacent family members, before and after.
#[derive(Clone, Debug, Serialize)]
pub struct AdjacentDistance {
    pub index: usize,
    pub input_distance: f64,
    pub path_distance: f64,
    /// path_distance / input_distance (infinite when inputs coincide but paths do not)
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct FamilyIsotopy {
    pub paths: Vec<MetricPath>,
    pub distances: Vec<AdjacentDistance>,
    /// measured constant L: the largest ratio over adjacent pairs with distinct inputs
    pub lipschitz: f64,
}

/// Largest sup-distance between corresponding steps of two paths.
pub fn path_distance(a: &MetricPath, b: &MetricPath) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.steps
        .iter()
        .zip(&b.steps)
        .map(|(x, y)| x.profile.sup_distance(&y.profile))
        .fold(0.0, f64::max)
}

/// One isotopy per member with a single shared configuration: one curve (built
/// against every non-standard member at once), one δ, one set of grids.
pub fn family_isotopy(family: &[RadialProfile], p: usize, q: usize, cfg: &RunConfig) -> Result<FamilyIsotopy> {
    cfg.validate()?;
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    let margin = cfg.margin_for(p + q + 1, Some(cfg.delta));
    let bent: Vec<RadialProfile> = family
        .iter()
        .filter(|m| standard_with(m, cfg.delta, cfg.recognition_tol).is_none())
        .cloned()
        .collect();
    let curve = if bent.is_empty() {
        None
    } else {
        Some(build_shared_curve(&bent, p, q, cfg.delta, margin)?.0)
    };
    let paths: Vec<MetricPath> = family
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            isotopy_through(m, p, q, cfg, curve.as_ref())
                .map_err(|e| Error::FamilyFailed { index: i, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;
    let distances: Vec<AdjacentDistance> = (1..family.len())
        .map(|i| {
            let input_distance = family[i - 1].sup_distance(&family[i]);
            let path_distance = path_distance(&paths[i - 1], &paths[i]);
            let ratio = if input_distance > 0.0 {
                path_distance / input_distance
            } else if path_distance == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            AdjacentDistance { index: i, input_distance, path_distance, ratio }
        })
        .collect();
    let lipschitz = distances.iter().map(|d| d.ratio).fold(0.0, f64::max);
    Ok(FamilyIsotopy { paths, distances, lipschitz })
}
