//! Torpedo functions: f₁ = sin near 0, ≡ 1 past π/2, strictly concave in between;
//! f_δ(t) = δ f₁(t/δ) on [0, b].

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::curvature::{self, DEFAULT_GRID_POINTS};
use crate::error::{Error, Result};
use crate::quad;
use crate::radial::{merge_knots, uniform, Jet, RadialProfile};

pub const DEFAULT_WIDTH: f64 = PI / 8.0;
/// sup-norm tolerance used when recognising torpedo form
pub const DEFAULT_RECOGNITION_TOL: f64 = 1e-7;

const CAP_KNOTS: usize = 256;
const WINDOW_KNOTS: usize = 1024;
const NECK_SPACING: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorpedoSpec {
    pub delta: f64,
    pub b: f64,
    pub smoothing_width: f64,
}

impl TorpedoSpec {
    pub fn new(delta: f64, b: f64) -> Self {
        TorpedoSpec { delta, b, smoothing_width: DEFAULT_WIDTH }
    }

    /// b = δπ/2: cap only, product near the boundary only infinitesimally
    pub fn infinitesimal(delta: f64) -> Self {
        Self::new(delta, delta * FRAC_PI_2)
    }

    pub fn is_infinitesimal(&self) -> bool {
        self.b <= self.delta * FRAC_PI_2 * (1.0 + 1e-12)
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::InvalidArgument(format!("delta must be positive (got {})", self.delta)));
        }
        check_width(self.smoothing_width)?;
        let cap = self.delta * FRAC_PI_2;
        if !(self.b >= cap * (1.0 - 1e-12)) || !self.b.is_finite() {
            return Err(Error::Domain { r: self.b, r_max: cap });
        }
        Ok(())
    }
}

fn check_width(w: f64) -> Result<()> {
    if !(w > 0.0 && w <= PI / 4.0) {
        return Err(Error::InvalidArgument(format!("smoothing width must be in (0, pi/4] (got {w})")));
    }
    Ok(())
}

/// Shape of m⁗ in window coordinates x ∈ [0,1], as coefficients of x(1−x)·P_k(2x−1).
/// Minimax design (smallest sup |m⁗| keeping m > 0) for the default width;
/// the boundary and moment conditions are re-imposed exactly in `Window::solve`.
const SHAPE: [f64; 18] = [
    10722.0, 230358.0, 53611.0, 537502.0, 96499.0, 828014.0, -3997.0, 415860.0, 60178.0, 268649.0, 74181.0,
    178819.0, 81280.0, 133965.0, 99311.0, 126253.0, 103284.0, 92283.0,
];
const NB: usize = SHAPE.len();

fn legendre_all(y: f64) -> [f64; NB] {
    let mut p = [0.0; NB];
    p[0] = 1.0;
    p[1] = y;
    for k in 2..NB {
        let kf = k as f64;
        p[k] = ((2.0 * kf - 1.0) * y * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
    }
    p
}

fn basis(k: usize, s: f64) -> f64 {
    s * (1.0 - s) * legendre_all(2.0 * s - 1.0)[k]
}

/// f₁″ = −sin(t)·m(t) on the window [a, π/2]. m − 1 vanishes to 4th order at
/// x = 0, m to 4th order at x = 1, and m − 1 is orthogonal to sin and (t − a)·sin,
/// which is what f₁′(π/2) = 0 and f₁(π/2) = 1 require.
#[derive(Clone, Debug)]
struct Window {
    a: f64,
    w: f64,
    c: [f64; NB],
}

impl Window {
    #[allow(clippy::needless_range_loop)]
    fn solve(width: f64) -> Result<Self> {
        check_width(width)?;
        let a = FRAC_PI_2 - width;
        // row i: linear functional i applied to each basis element
        let mut rows = vec![[0.0; NB]; 6];
        for k in 0..NB {
            for p in 0..4 {
                let q = 3 - p;
                let fact = [1.0, 1.0, 2.0, 6.0][q];
                rows[p][k] = quad::integrate(|s| (1.0 - s).powi(q as i32) / fact * basis(k, s), 0.0, 1.0, 1);
            }
            let mk = |x: f64| quad::integrate(|s| (x - s).powi(3) / 6.0 * basis(k, s), 0.0, x, 1);
            rows[4][k] = quad::integrate(|x| (a + width * x).sin() * mk(x), 0.0, 1.0, 32);
            rows[5][k] = quad::integrate(|x| x * (a + width * x).sin() * mk(x), 0.0, 1.0, 32);
        }
        let target = [-1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let mut c = SHAPE;
        // minimum-norm correction onto the constraint set, refined once
        for _ in 0..2 {
            let mut res = [0.0; 6];
            for i in 0..6 {
                res[i] = target[i] - rows[i].iter().zip(&c).map(|(r, c)| r * c).sum::<f64>();
            }
            let mut g = [[0.0; 6]; 6];
            for i in 0..6 {
                for j in 0..6 {
                    g[i][j] = rows[i].iter().zip(&rows[j]).map(|(x, y)| x * y).sum();
                }
            }
            let y = solve6(g, res).ok_or_else(|| Error::Construction("torpedo window constraints singular".into()))?;
            for k in 0..NB {
                c[k] += (0..6).map(|i| rows[i][k] * y[i]).sum::<f64>();
            }
        }
        let win = Window { a, w: width, c };
        // m > 0 inside the window
        for i in 1..4096 {
            let x = i as f64 / 4096.0;
            if !(win.m_x(x) > 0.0) {
                return Err(Error::Construction(format!(
                    "torpedo window width {width}: transition loses concavity at x = {x}"
                )));
            }
        }
        Ok(win)
    }

    fn m4(&self, s: f64) -> f64 {
        let p = legendre_all(2.0 * s - 1.0);
        s * (1.0 - s) * p.iter().zip(&self.c).map(|(p, c)| p * c).sum::<f64>()
    }

    // Taylor with integral remainder from whichever end is nearer
    fn m_x(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else if x >= 1.0 {
            0.0
        } else if x <= 0.5 {
            1.0 + quad::integrate(|s| (x - s).powi(3) / 6.0 * self.m4(s), 0.0, x, 1)
        } else {
            quad::integrate(|s| (s - x).powi(3) / 6.0 * self.m4(s), x, 1.0, 1)
        }
    }

    fn m(&self, t: f64) -> f64 {
        self.m_x((t - self.a) / self.w)
    }

    fn dd(&self, t: f64) -> f64 {
        -t.sin() * self.m(t)
    }
}

/// Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve6(mut a: [[f64; 6]; 6], mut b: [f64; 6]) -> Option<[f64; 6]> {
    for col in 0..6 {
        let piv = (col..6).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..6 {
            let f = a[row][col] / a[col][col];
            for k in col..6 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 6];
    for i in (0..6).rev() {
        let s: f64 = (i + 1..6).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

type Knots = (Vec<f64>, Vec<Jet>);

/// f₁ sampled at knots on [0, t_end] (t_end ≥ π/2).
fn f1_knots(width: f64, t_end: f64) -> Result<(Vec<f64>, Vec<Jet>)> {
    check_width(width)?;
    // the cap + window part only depends on the width; building it is the expensive bit
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Knots>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let hit = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&width.to_bits()).cloned();
    let base = match hit {
        Some(b) => b,
        None => {
            let b = Arc::new(cap_and_window(width)?);
            cache.lock().unwrap_or_else(|e| e.into_inner()).insert(width.to_bits(), b.clone());
            b
        }
    };
    let (mut knots, mut jets) = (*base).clone();
    if t_end > FRAC_PI_2 * (1.0 + 1e-12) {
        let m = ((t_end - FRAC_PI_2) / NECK_SPACING).ceil().max(1.0) as usize;
        for t in uniform(FRAC_PI_2, t_end, m).into_iter().skip(1) {
            knots.push(t);
            jets.push(Jet::new(1.0, 0.0, 0.0));
        }
    }
    Ok((knots, jets))
}

fn cap_and_window(width: f64) -> Result<(Vec<f64>, Vec<Jet>)> {
    let win = Window::solve(width)?;
    let mut knots = uniform(0.0, win.a, CAP_KNOTS);
    let mut jets: Vec<Jet> = knots
        .iter()
        .map(|&t| {
            let (s, c) = t.sin_cos();
            Jet::new(s, c, -s)
        })
        .collect();
    // integrate back from π/2, where the jet is exactly (1, 0, 0)
    let window = uniform(win.a, FRAC_PI_2, WINDOW_KNOTS);
    let mut back = vec![Jet::new(1.0, 0.0, 0.0)];
    let mut cur = back[0];
    for pair in window.windows(2).rev() {
        let (t0, t1) = (pair[0], pair[1]);
        let h = t1 - t0;
        let dslope = quad::integrate(|u| win.dd(u), t0, t1, 2);
        // f(t0) = f(t1) − f′(t1)·h + ∫ (u − t0) f″(u) du
        let dval = quad::integrate(|u| (u - t0) * win.dd(u), t0, t1, 2);
        cur = Jet::new(cur.f - cur.d1 * h + dval, cur.d1 - dslope, win.dd(t0));
        back.push(cur);
    }
    let start = *jets.last().unwrap();
    let miss = (cur.f - start.f).abs().max((cur.d1 - start.d1).abs());
    if miss > 1e-12 {
        return Err(Error::Construction(format!("f1 window does not meet the sine cap (defect {miss:e})")));
    }
    back.pop();
    back.reverse();
    knots.extend(window.iter().skip(1));
    jets.extend(back);
    if let Some(i) = jets.iter().enumerate().skip(1).find(|(_, j)| j.d2 >= 0.0 && j.d1 > 0.0).map(|(i, _)| i) {
        if knots[i] < FRAC_PI_2 {
            return Err(Error::Construction(format!("f1'' >= 0 at t = {}", knots[i])));
        }
    }
    Ok((knots, jets))
}

/// f₁ on [0, π]: sin on [0, π/2 − width], ≡ 1 on [π/2, π].
pub fn base_function_f1(smoothing_width: f64) -> Result<RadialProfile> {
    let (k, j) = f1_knots(smoothing_width, PI)?;
    build(k, j, 1.0, PI)
}

fn build(knots: Vec<f64>, jets: Vec<Jet>, delta: f64, b: f64) -> Result<RadialProfile> {
    let n = knots.len();
    let mut r: Vec<f64> = knots.iter().map(|t| delta * t).collect();
    r[n - 1] = b;
    RadialProfile::new(
        r,
        jets.iter().map(|j| delta * j.f).collect(),
        jets.iter().map(|j| j.d1).collect(),
        jets.iter().map(|j| j.d2 / delta).collect(),
        true,
    )
}

/// f_δ(r) = δ f₁(r/δ) on [0, b].
pub fn torpedo_profile(spec: &TorpedoSpec) -> Result<RadialProfile> {
    spec.validate()?;
    let t_end = (spec.b / spec.delta).max(FRAC_PI_2);
    let (k, j) = f1_knots(spec.smoothing_width, t_end)?;
    build(k, j, spec.delta, spec.b.max(spec.delta * FRAC_PI_2))
}

/// Minimum of scalar curvature over the default grid, polished by golden-section
/// search around the grid minimiser.
pub fn torpedo_min_curvature(spec: &TorpedoSpec, n: usize) -> Result<f64> {
    let p = torpedo_profile(spec)?;
    let cert = curvature::curvature_certificate(&p, n, DEFAULT_GRID_POINTS, 0.0)?;
    let g = &cert.grid;
    let i = g.iter().position(|x| x.r == cert.r_min_location).unwrap_or(0);
    let lo = g[i.saturating_sub(1)].r;
    let hi = g[(i + 1).min(g.len() - 1)].r;
    let f = |r: f64| curvature::scalar_curvature(&p, n, r);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(cert.r_min.min(fc).min(fd))
}

/// Largest ρ and the δ for which `p` agrees with a torpedo f_δ on (0, ρ] to
/// sup-norm `tol`. Requires the agreement to cover the whole cap (ρ ≥ δπ/2).
pub fn is_torpedo_near_origin(p: &RadialProfile, tol: f64) -> Option<(f64, f64)> {
    // R(0) of the 3-dimensional model is 6/δ² on a round cap
    let r0 = curvature::scalar_curvature(p, 3, 0.0).ok()?;
    if !(r0 > 0.0) {
        return None;
    }
    let delta = (6.0 / r0).sqrt();
    let cap = delta * FRAC_PI_2;
    let r_max = p.r_max();
    if r_max < cap * (1.0 - 1e-9) {
        return None;
    }
    let t = torpedo_profile(&TorpedoSpec::new(delta, r_max.max(cap))).ok()?;
    let gap = |r: f64| (p.eval_clamped(r).f - t.eval_clamped(r).f).abs();
    let pts = merge_knots(p.knots(), &uniform(0.0, r_max, 4096), r_max);
    let mut good = 0.0;
    let mut bad = None;
    for &r in &pts {
        if gap(r) <= tol {
            good = r;
        } else {
            bad = Some(r);
            break;
        }
    }
    let rho = match bad {
        None => r_max,
        Some(mut hi) => {
            let mut lo = good;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if gap(mid) <= tol {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    };
    if rho < cap * (1.0 - 1e-9) {
        return None;
    }
    Some((delta, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::scalar_curvature;
    use crate::radial::finite_diff_check;

    #[test]
    fn f1_conditions() {
        let f1 = base_function_f1(DEFAULT_WIDTH).unwrap();
        assert!((f1.eval(0.1).unwrap().f - 0.1f64.sin()).abs() < 1e-15);
        assert_eq!(f1.eval(2.0).unwrap(), Jet::new(1.0, 0.0, 0.0));
        let top = FRAC_PI_2 - 1e-3;
        let worst = (1..4000)
            .map(|i| f1.eval(top * i as f64 / 4000.0).unwrap().d2)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(worst < 0.0);
    }

    #[test]
    fn window_solves_for_allowed_widths() {
        for w in [0.2, DEFAULT_WIDTH, PI / 4.0] {
            let win = Window::solve(w).unwrap();
            assert_eq!(win.m(win.a), 1.0);
            assert!(win.m(FRAC_PI_2 - 1e-3 * w) < 1e-9);
            // left and right Taylor forms agree in the middle
            let l = 1.0 + quad::integrate(|s| (0.5 - s).powi(3) / 6.0 * win.m4(s), 0.0, 0.5, 1);
            assert!((l - win.m_x(0.5 + 1e-15)).abs() < 1e-9);
        }
        assert!(Window::solve(0.0).is_err());
        assert!(Window::solve(1.0).is_err());
    }

    #[test]
    fn examples() {
        let p = torpedo_profile(&TorpedoSpec::new(0.5, 1.5)).unwrap();
        assert_eq!(p.eval(1.2).unwrap().f, 0.5);
        let q = torpedo_profile(&TorpedoSpec::infinitesimal(0.5)).unwrap();
        let j = q.eval(q.r_max()).unwrap();
        assert_eq!((j.f, j.d1), (0.5, 0.0));
        let c = torpedo_profile(&TorpedoSpec::new(1.0, 3.0)).unwrap();
        assert!((c.eval(0.2).unwrap().f - 0.2f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn short_domain_rejected() {
        let e = torpedo_profile(&TorpedoSpec::new(1.0, 1.0));
        assert!(matches!(e, Err(Error::Domain { .. })));
    }

    #[test]
    fn min_curvature_bounds_and_scaling() {
        let a = torpedo_min_curvature(&TorpedoSpec::new(0.1, 0.5), 3).unwrap();
        assert!(a >= 100.0);
        let b = torpedo_min_curvature(&TorpedoSpec::new(0.05, 0.25), 3).unwrap();
        assert!(b >= 4.0 * a * (1.0 - 1e-9));
        let c = torpedo_min_curvature(&TorpedoSpec::new(0.1, 0.5), 5).unwrap();
        assert!(c > a);
    }

    #[test]
    fn neck_curvature() {
        let p = torpedo_profile(&TorpedoSpec::new(0.2, 1.0)).unwrap();
        let r = scalar_curvature(&p, 5, 0.8).unwrap();
        assert!((r - 300.0).abs() < 1e-9);
    }

    #[test]
    fn derivatives_consistent() {
        let p = torpedo_profile(&TorpedoSpec::new(0.05, 0.3)).unwrap();
        for i in 1..2000 {
            let r = 2e-4 + (0.3 - 4e-4) * i as f64 / 2000.0;
            let d = finite_diff_check(&p, r, 1e-4).unwrap();
            assert!(d < 1e-5, "r = {r}: {d}");
        }
    }

    #[test]
    fn recognises_itself_and_rejects_flat() {
        let p = torpedo_profile(&TorpedoSpec::new(0.3, 1.0)).unwrap();
        let (d, rho) = is_torpedo_near_origin(&p, DEFAULT_RECOGNITION_TOL).unwrap();
        assert!((d - 0.3).abs() < 1e-8);
        assert_eq!(rho, 1.0);
        assert!(is_torpedo_near_origin(&RadialProfile::flat(1.0).unwrap(), 1e-7).is_none());
        // a bare sine cap never reaches the neck
        assert!(is_torpedo_near_origin(&RadialProfile::hemisphere(0.3).unwrap(), 1e-7).is_none());
    }
}
