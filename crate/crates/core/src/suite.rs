//! The property suite behind `warpfield verify`: one check per invariant family,
//! each returning a pass flag and a one-line measurement.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bend::{build_gl_curve, homotopy_monotonicity, induced_profile, stage1_homotopy};
use crate::config::RunConfig;
use crate::curvature::{curvature_certificate, default_margin, scalar_curvature, DEFAULT_GRID_POINTS};
use crate::error::Result;
use crate::isotopy::{family_isotopy, gromov_lawson_isotopy, standard_target};
use crate::path::product_certificate;
use crate::radial::{finite_diff_check, linear_blend, uniform, Jet, RadialProfile};
use crate::retract::{classify, deformation_retract, random_admissible};
use crate::surgery::{handle_curvature_certificate, random_descriptors, surgery_j, surgery_j_inv, Side};
use crate::torpedo::{base_function_f1, is_torpedo_near_origin, torpedo_min_curvature, torpedo_profile, TorpedoSpec};

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {}. {:<28} {} ({:.1}s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

fn run(id: u8, name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckOutcome {
    let t = Instant::now();
    let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckOutcome { id, name: name.into(), pass, detail, seconds: t.elapsed().as_secs_f64() }
}

pub const NAMES: [&str; 8] = [
    "curvature oracles",
    "torpedo family",
    "bending homotopy",
    "isotopy to standard form",
    "deformation retract",
    "surgery descriptors",
    "compact family",
    "numerical hygiene",
];

/// Every check, in order.
pub fn run_all(cfg: &RunConfig) -> Vec<CheckOutcome> {
    (1..=8).map(|id| run_check(id, cfg)).collect()
}

pub fn run_check(id: u8, cfg: &RunConfig) -> CheckOutcome {
    let name = NAMES[(id as usize).clamp(1, 8) - 1];
    match id {
        1 => run(id, name, curvature_oracles),
        2 => run(id, name, torpedo_family),
        3 => run(id, name, || bending_homotopy(cfg)),
        4 => run(id, name, || isotopy_to_standard(cfg)),
        5 => run(id, name, || retract_suite(cfg)),
        6 => run(id, name, || surgery_suite(cfg)),
        7 => run(id, name, || compact_family(cfg)),
        _ => run(8, NAMES[7], || hygiene(cfg)),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// R = 0 for f = r, n(n−1)/δ² for δ sin(r/δ), (n−1)(n−2)/δ² for f ≡ δ.
fn curvature_oracles() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in 3..=6usize {
        let m = (n - 1) as f64;
        for delta in [0.05, 0.1, 0.5] {
            let flat = RadialProfile::flat(1.0)?;
            for &r in &crate::curvature::certificate_grid(1.0, DEFAULT_GRID_POINTS) {
                // no scale of its own: compare against the sphere value at this δ
                worst = worst.max(scalar_curvature(&flat, n, r)?.abs() / (m * (m + 1.0) / (delta * delta)));
            }
            let hemi = RadialProfile::hemisphere(delta)?;
            let want = m * (m + 1.0) / (delta * delta);
            for g in curvature_certificate(&hemi, n, DEFAULT_GRID_POINTS, 0.0)?.grid {
                worst = worst.max(rel(g.value, want));
            }
            // the torpedo past its cap is exactly the constant δ
            let neck = torpedo_profile(&TorpedoSpec::new(delta, 3.0 * delta))?;
            let want = m * (m - 1.0) / (delta * delta);
            for g in curvature_certificate(&neck, n, DEFAULT_GRID_POINTS, 0.0)?.grid {
                if g.r >= delta * FRAC_PI_2 * (1.0 + 1e-9) {
                    worst = worst.max(rel(g.value, want));
                }
            }
        }
    }
    Ok((worst <= 1e-9, format!("max relative error {worst:.2e} (tol 1e-9)")))
}

/// f₁ conditions on-grid; δ²·min R invariant in δ; min R ≥ 100 at δ = 0.1, n = 3.
fn torpedo_family() -> Result<(bool, String)> {
    let f1 = base_function_f1(crate::torpedo::DEFAULT_WIDTH)?;
    let top = FRAC_PI_2 - 1e-3;
    let grid = uniform(0.0, f1.r_max(), 4096);
    let mut sine_err: f64 = 0.0;
    let mut flat_err: f64 = 0.0;
    let mut concave = true;
    for &t in &grid {
        let j = f1.eval(t)?;
        if t <= FRAC_PI_2 - crate::torpedo::DEFAULT_WIDTH {
            sine_err = sine_err.max((j.f - t.sin()).abs());
        }
        if t >= FRAC_PI_2 {
            flat_err = flat_err.max((j.f - 1.0).abs()).max(j.d1.abs()).max(j.d2.abs());
        }
        if t > 0.0 && t <= top && !(j.d2 < 0.0) {
            concave = false;
        }
    }
    let mins: Vec<f64> = [0.05, 0.1, 0.5]
        .iter()
        .map(|&d| torpedo_min_curvature(&TorpedoSpec::new(d, 2.0 * d), 3).map(|r| r * d * d))
        .collect::<Result<_>>()?;
    let spread = mins.iter().map(|&m| rel(m, mins[1])).fold(0.0, f64::max);
    let min01 = mins[1] / 0.01;
    let pass = sine_err < 1e-12 && flat_err < 1e-12 && concave && spread < 1e-6 && min01 >= 100.0;
    Ok((
        pass,
        format!(
            "sin err {sine_err:.1e}, plateau err {flat_err:.1e}, concave {concave}, delta^2 minR spread {spread:.1e}, minR(0.1) {min01:.1}"
        ),
    ))
}

fn flat_margin(cfg: &RunConfig) -> f64 {
    cfg.margin_for(5, Some(cfg.delta))
}

/// flat ambient, p = q = 2, δ = 0.05, ρ̄ = 1: certified path, exact endpoints, monotone.
fn bending_homotopy(cfg: &RunConfig) -> Result<(bool, String)> {
    let amb = RadialProfile::flat(1.0)?;
    let margin = flat_margin(cfg);
    let (curve, _) = build_gl_curve(&amb, 2, 2, 0.05, margin)?;
    let path = stage1_homotopy(&curve, &amb, 2, 2, cfg.steps, margin)?;
    let start = path.first().expect("path").sup_distance(&amb);
    let end = path.last().expect("path").sup_distance(&induced_profile(&curve, &amb)?);
    let mono = homotopy_monotonicity(&curve, &path.s_grid())?;
    let (_, worst) = path.worst().expect("path");
    let pass = path.len() == cfg.steps + 1
        && path.all_pass()
        && start < 1e-10
        && end < 1e-10
        && mono.second_derivative_monotone
        && mono.radii_monotone;
    Ok((
        pass,
        format!(
            "{} steps, worst R_min {worst:.4}, |g0 - ambient| {start:.1e}, |g1 - induced| {end:.1e}, monotone {}/{}",
            path.len() - 1,
            mono.second_derivative_monotone,
            mono.radii_monotone
        ),
    ))
}

fn isotopy_to_standard(cfg: &RunConfig) -> Result<(bool, String)> {
    let amb = RadialProfile::flat(1.0)?;
    let path = gromov_lawson_isotopy(&amb, 2, 2, cfg)?;
    let end = path.last().expect("path").clone();
    let std = is_torpedo_near_origin(&end, cfg.recognition_tol);
    let delta_ok = std.is_some_and(|(d, _)| rel(d, cfg.delta) < 1e-6);
    let again = gromov_lawson_isotopy(&end, 2, 2, cfg)?;
    let fiber = again.stage("fiber");
    let constant = !fiber.is_empty() && fiber.iter().all(|st| st.profile.sup_distance(&fiber[0].profile) == 0.0);
    let pass = path.all_pass() && again.all_pass() && delta_ok && constant;
    Ok((
        pass,
        format!(
            "{} steps certified {}, endpoint delta {:?}, rerun second stage constant {constant}",
            path.len(),
            path.all_pass(),
            std.map(|(d, _)| d)
        ),
    ))
}

/// Smooth bump a(1 − u²)⁴, u = (r − c)/h, with its jet.
fn bump_jet(r: f64, c: f64, h: f64, a: f64) -> Jet {
    let u = (r - c) / h;
    if u.abs() >= 1.0 {
        return Jet::new(0.0, 0.0, 0.0);
    }
    let v = 1.0 - u * u;
    Jet::new(a * v.powi(4), a * -8.0 * u * v.powi(3) / h, a * (48.0 * u * u * v * v - 8.0 * v.powi(3)) / (h * h))
}

fn perturbed(base: &RadialProfile, c: f64, h: f64, a: f64) -> Result<RadialProfile> {
    let knots = crate::radial::merge_knots(base.knots(), &uniform(c - h, c + h, 64), base.r_max());
    RadialProfile::from_fn(
        knots,
        |r| {
            let (j, b) = (base.eval_clamped(r), bump_jet(r, c, h, a));
            Jet::new(j.f + b.f, j.d1 + b.d1, j.d2 + b.d2)
        },
        base.origin_smooth(),
    )
}

/// Sweep configuration for the seeded random retracts: 16 steps on 512-point grids.
pub fn sweep_config(cfg: &RunConfig) -> RunConfig {
    RunConfig { steps: 16, grid_points: 512, ..cfg.clone() }
}

fn retract_suite(cfg: &RunConfig) -> Result<(bool, String)> {
    let mut notes = Vec::new();
    let mut pass = true;
    let mut check = |ok: bool, note: String| {
        pass &= ok;
        notes.push(note);
    };
    let tor = torpedo_profile(&TorpedoSpec::new(0.2, 1.0))?;
    let t_path = deformation_retract(&tor, 1.0, 2, 2, cfg)?;
    check(t_path.steps.iter().all(|st| st.profile.sup_distance(&tor) == 0.0), "torpedo constant".into());

    let cubic = {
        // w″ = −C r(L² − r²) up to L = 0.6, then a line
        let (l, c) = (0.6, 0.5 / (0.6f64.powi(4) / 4.0));
        let jet = move |r: f64| {
            let x = r.min(l);
            let f = x - c * (l * l * x.powi(3) / 6.0 - x.powi(5) / 20.0);
            let d1 = 1.0 - c * (l * l * x * x / 2.0 - x.powi(4) / 4.0);
            if r <= l {
                Jet::new(f, d1, -c * (l * l * x - x.powi(3)))
            } else {
                Jet::new(f + d1 * (r - l), d1, 0.0)
            }
        };
        let mut k = uniform(0.0, 1.0, 200);
        k.push(l);
        k.sort_by(f64::total_cmp);
        k.dedup();
        RadialProfile::from_fn(k, jet, true)?
    };
    let examples = [
        ("hemisphere", RadialProfile::hemisphere(0.5)?, 0.5 * FRAC_PI_2, 2u8),
        ("cubic", cubic, 1.0, 3),
        ("linear", RadialProfile::flat(1.0)?, 1.0, 4),
        ("sine", RadialProfile::sine(1.0, 1.0)?, 1.0, 4),
    ];
    let mut worst_idem: f64 = 0.0;
    for (name, w, rho_std, case) in &examples {
        let c = classify(w, *rho_std, cfg.zero_tol)?;
        let path = deformation_retract(w, *rho_std, 2, 2, cfg)?;
        let end = path.last().expect("path");
        let again = deformation_retract(end, end.r_max(), 2, 2, cfg)?;
        let idem = again.steps.iter().map(|st| st.profile.sup_distance(end)).fold(0.0, f64::max);
        worst_idem = worst_idem.max(idem);
        check(
            c.case_id == *case && path.all_pass() && is_torpedo_near_origin(end, cfg.recognition_tol).is_some(),
            format!("{name}: case {}", c.case_id),
        );
    }
    check(worst_idem < 1e-8, format!("idempotence {worst_idem:.1e}"));

    // continuity at a standard point: a 1e−4 bump on the torpedo cap
    let bumped = perturbed(&tor, 0.05 * std::f64::consts::PI, 0.05, 1e-4)?;
    let b_path = deformation_retract(&bumped, 1.0, 2, 2, cfg)?;
    let drift = b_path.last().expect("path").sup_distance(&tor);
    check(b_path.all_pass() && drift < 1e-2, format!("perturbed torpedo drift {drift:.1e}"));

    let sweep = sweep_config(cfg);
    let samples = random_admissible(cfg.seed, 500)?;
    let failures: Vec<String> = samples
        .par_iter()
        .enumerate()
        .filter_map(|(i, smp)| {
            let ok = classify(&smp.profile, smp.rho_std, cfg.zero_tol).is_ok_and(|c| c.case_id == smp.case_id)
                && deformation_retract(&smp.profile, smp.rho_std, 2, 2, &sweep).is_ok_and(|p| p.all_pass());
            (!ok).then(|| format!("#{i}"))
        })
        .collect();
    check(failures.is_empty(), format!("random 500: {} failed {:?}", failures.len(), failures));
    Ok((pass, notes.join(", ")))
}

fn surgery_suite(cfg: &RunConfig) -> Result<(bool, String)> {
    let descs = random_descriptors(cfg.seed, 1000);
    let mut bad = 0;
    for d in &descs {
        let ok = match d.side {
            Side::X => surgery_j(d).and_then(|y| surgery_j_inv(&y)).is_ok_and(|x| &x == d),
            Side::Y => surgery_j_inv(d).and_then(|x| surgery_j(&x)).is_ok_and(|y| &y == d),
        };
        bad += usize::from(!ok);
    }
    let mut worst = f64::INFINITY;
    let mut all = true;
    for p in 2..=4usize {
        for q in 2..=4usize {
            for delta in [0.05, 0.1] {
                let c = handle_curvature_certificate(p, q, delta, delta, default_margin(p + q + 1, Some(delta)))?;
                all &= c.pass;
                worst = worst.min(c.r_min);
            }
        }
    }
    Ok((
        bad == 0 && all,
        format!("{} descriptors, {bad} round-trip mismatches; handles certified {all}, min R {worst:.1}", descs.len()),
    ))
}

/// Five flat ambients perturbed by bumps of height ≤ 1e−3 through one shared curve.
pub fn flat_family() -> Result<Vec<RadialProfile>> {
    let flat = RadialProfile::flat(1.0)?;
    (0..5).map(|k| perturbed(&flat, 0.5, 0.2, 2.5e-4 * k as f64)).collect()
}

fn compact_family(cfg: &RunConfig) -> Result<(bool, String)> {
    let fam = flat_family()?;
    let out = family_isotopy(&fam, 2, 2, cfg)?;
    let standard = out
        .paths
        .iter()
        .all(|p| p.all_pass() && is_torpedo_near_origin(p.last().expect("path"), cfg.recognition_tol).is_some());
    let finite = out.distances.iter().all(|d| d.path_distance.is_finite());
    let dists: Vec<String> = out.distances.iter().map(|d| format!("{:.2e}", d.path_distance)).collect();
    Ok((
        standard && finite,
        format!("endpoints standard {standard}, adjacent path distances [{}], L = {:.3}", dists.join(", "), out.lipschitz),
    ))
}

fn fd_worst(p: &RadialProfile) -> Result<f64> {
    let h = 1e-5 * p.r_max();
    let mut worst: f64 = 0.0;
    for &r in &uniform(2.0 * h, p.r_max() - 2.0 * h, 97) {
        worst = worst.max(finite_diff_check(p, r, h)?);
    }
    Ok(worst)
}

fn hygiene(cfg: &RunConfig) -> Result<(bool, String)> {
    let margin = flat_margin(cfg);
    let flat = RadialProfile::flat(1.0)?;
    let (curve, _) = build_gl_curve(&flat, 2, 2, 0.05, margin)?;
    let induced = induced_profile(&curve, &flat)?;
    let tor = torpedo_profile(&TorpedoSpec::new(0.1, 0.5))?;
    let hemi = RadialProfile::hemisphere(0.2)?;
    let spliced = standard_target(&induced, &TorpedoSpec::new(0.05, 0.09), 0.02)?;
    let retracted = deformation_retract(&hemi, hemi.r_max(), 2, 2, cfg)?.last().expect("path").clone();
    let sample = random_admissible(cfg.seed, 4)?;
    let constructors: Vec<(&str, RadialProfile)> = vec![
        ("flat", flat.clone()),
        ("sine", RadialProfile::sine(0.3, 0.6)?),
        ("hemisphere", hemi.clone()),
        ("f1", base_function_f1(cfg.smoothing_width)?),
        ("torpedo", tor.clone()),
        ("induced", induced.clone()),
        ("splice", spliced),
        ("blend", linear_blend(&hemi, &torpedo_profile(&TorpedoSpec::infinitesimal(0.2))?, 0.5)?),
        ("retract", retracted.clone()),
        ("admissible", sample[2].profile.clone()),
    ];
    let mut fd_max: f64 = 0.0;
    let mut fd_name = "";
    for (name, p) in &constructors {
        let e = fd_worst(p)?;
        if e > fd_max {
            fd_max = e;
            fd_name = name;
        }
    }

    // every reported R_min, re-certified on twice the grid
    let pairs = [
        (curvature_certificate(&tor, 3, 2048, 0.0)?.r_min, curvature_certificate(&tor, 3, 4096, 0.0)?.r_min),
        (product_certificate(&induced, 2, 2, 2048, 0.0)?.r_min, product_certificate(&induced, 2, 2, 4096, 0.0)?.r_min),
        (product_certificate(&retracted, 2, 2, 2048, 0.0)?.r_min, product_certificate(&retracted, 2, 2, 4096, 0.0)?.r_min),
        (handle_curvature_certificate(2, 2, 0.1, 0.1, 0.0)?.r_min, {
            let t = torpedo_profile(&TorpedoSpec::infinitesimal(0.1))?;
            crate::curvature::offset_certificate(&t, 3, 200.0, 5, 4096, 0.0)?.r_min
        }),
    ];
    let grid_change = pairs.iter().map(|&(a, b)| rel(b, a)).fold(0.0, f64::max);
    Ok((
        fd_max < 1e-5 && grid_change < 1e-2,
        format!("finite differences max {fd_max:.1e} ({fd_name}); grid doubling changes R_min by {:.2e}", grid_change),
    ))
}
