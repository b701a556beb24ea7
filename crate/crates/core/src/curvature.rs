//! Scalar curvature of dr² + f(r)² ds²_{n−1}:
//!   R = −2(n−1) f″/f + (n−1)(n−2)(1 − f′²)/f²
//! with a Taylor model of the odd extension near r = 0, where both terms are 0/0.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{Jet, RadialProfile};

pub const DEFAULT_GRID_POINTS: usize = 2048;

/// Raw quotient form; `f` must be positive.
pub fn curvature_from_jet(n: usize, j: Jet) -> f64 {
    let m = (n - 1) as f64;
    -2.0 * m * j.d2 / j.f + m * (m - 1.0) * (1.0 - j.d1 * j.d1) / (j.f * j.f)
}

/// Odd model f ≈ r + a3 r³ + a5 r⁵ matching f′ and f″ of the profile at r_s.
#[derive(Clone, Copy, Debug)]
struct OddModel {
    a3: f64,
    a5: f64,
}

impl OddModel {
    fn fit(p: &RadialProfile) -> Self {
        let rs = p.series_threshold();
        let j = p.eval_clamped(rs);
        let e = j.d1 - 1.0;
        let a3 = (20.0 * e - 5.0 * rs * j.d2) / (30.0 * rs * rs);
        let a5 = (3.0 * rs * j.d2 - 6.0 * e) / (30.0 * rs.powi(4));
        OddModel { a3, a5 }
    }

    /// Warped-product curvature on the model, written without cancellation.
    fn curvature(&self, n: usize, r: f64) -> f64 {
        let m = (n - 1) as f64;
        let r2 = r * r;
        let f_r = 1.0 + self.a3 * r2 + self.a5 * r2 * r2; // f/r
        let dd_r = 6.0 * self.a3 + 20.0 * self.a5 * r2; // f″/r
        let e_r2 = 3.0 * self.a3 + 5.0 * self.a5 * r2; // (f′−1)/r²
        let d1 = 1.0 + e_r2 * r2;
        -2.0 * m * dd_r / f_r - m * (m - 1.0) * e_r2 * (d1 + 1.0) / (f_r * f_r)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("dimension n must be >= 3 (got {n})")));
    }
    Ok(())
}

/// R(r) for the profile viewed as an n-dimensional warped product.
pub fn scalar_curvature(p: &RadialProfile, n: usize, r: f64) -> Result<f64> {
    check_dim(n)?;
    p.eval(r)?;
    let model = OddModel::fit(p);
    point_curvature(p, n, r, &model)
}

fn point_curvature(p: &RadialProfile, n: usize, r: f64, model: &OddModel) -> Result<f64> {
    if r < p.series_threshold() {
        return Ok(model.curvature(n, r));
    }
    let j = p.eval_clamped(r);
    if !(j.f > 0.0) {
        return Err(Error::NonPositive { r, value: j.f });
    }
    Ok(curvature_from_jet(n, j))
}

/// Grid: half the points geometric on [1e−6·r_max, r_max/8], half uniform on (r_max/8, r_max].
pub fn certificate_grid(r_max: f64, points: usize) -> Vec<f64> {
    let points = points.max(8);
    let half = points / 2;
    let lo = 1e-6 * r_max;
    let mid = r_max / 8.0;
    let ratio = (mid / lo).ln();
    let mut g: Vec<f64> = (0..half)
        .map(|i| lo * (ratio * i as f64 / (half - 1) as f64).exp())
        .collect();
    g[half - 1] = mid;
    let rest = points - half;
    g.extend((1..=rest).map(|i| if i == rest { r_max } else { mid + (r_max - mid) * i as f64 / rest as f64 }));
    g
}

/// 1e−6 · max(1, (n−1)(n−2)/δ²) when δ is known, else 1e−6.
pub fn default_margin(n: usize, delta: Option<f64>) -> f64 {
    let scale = delta.map_or(1.0, |d| ((n - 1) * (n - 2)) as f64 / (d * d));
    1e-6 * scale.max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub r: f64,
    #[serde(rename = "R")]
    pub value: f64,
}

/// Grid evaluation of scalar curvature. `dimension` is the dimension of the
/// whole model (fiber dimension plus base when `offset` ≠ 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureCertificate {
    pub dimension: usize,
    pub margin: f64,
    pub r_min_location: f64,
    #[serde(rename = "R_min")]
    pub r_min: f64,
    pub pass: bool,
    pub grid: Vec<GridPoint>,
}

impl CurvatureCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Certificate of R over `points` grid radii; pass ⇔ R_min > margin.
pub fn curvature_certificate(p: &RadialProfile, n: usize, points: usize, margin: f64) -> Result<CurvatureCertificate> {
    offset_certificate(p, n, 0.0, n, points, margin)
}

/// Certificate of `offset + R_fiber(r)` where R_fiber uses fiber dimension `n_fiber`.
/// This is the product model ds²(base) + dr² + f² ds²: the base adds a constant.
pub fn offset_certificate(
    p: &RadialProfile,
    n_fiber: usize,
    offset: f64,
    dimension: usize,
    points: usize,
    margin: f64,
) -> Result<CurvatureCertificate> {
    check_dim(n_fiber)?;
    if !(margin >= 0.0) {
        return Err(Error::InvalidArgument(format!("margin must be >= 0 (got {margin})")));
    }
    let grid = certificate_grid(p.r_max(), points);
    let model = OddModel::fit(p);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&r| point_curvature(p, n_fiber, r, &model).map(|v| v + offset))
        .collect::<Result<_>>()?;
    let (imin, &vmin) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    Ok(CurvatureCertificate {
        dimension,
        margin,
        r_min_location: grid[imin],
        r_min: vmin,
        pass: vmin > margin,
        grid: grid.into_iter().zip(values).map(|(r, value)| GridPoint { r, value }).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_is_zero() {
        let p = RadialProfile::flat(1.0).unwrap();
        for &r in &[0.0, 1e-5, 0.3, 1.0] {
            assert_eq!(scalar_curvature(&p, 4, r).unwrap(), 0.0);
        }
    }

    #[test]
    fn sphere_value() {
        let p = RadialProfile::hemisphere(0.5).unwrap();
        let r = scalar_curvature(&p, 3, 0.3).unwrap();
        assert!((r - 24.0).abs() < 24.0 * 1e-9, "{r}");
        // series region and the origin itself
        assert!((scalar_curvature(&p, 3, 0.0).unwrap() - 24.0).abs() < 1e-8);
        assert!((scalar_curvature(&p, 3, 1e-5).unwrap() - 24.0).abs() < 1e-8);
    }

    #[test]
    fn series_agrees_with_quotient_at_threshold() {
        let p = RadialProfile::sine(0.2, 0.5).unwrap();
        let rs = p.series_threshold();
        let model = OddModel::fit(&p);
        let s = model.curvature(5, rs);
        let q = curvature_from_jet(5, p.eval(rs).unwrap());
        assert!(((s - q) / q).abs() < 1e-6);
    }

    #[test]
    fn grid_shape() {
        let g = certificate_grid(2.0, 2048);
        assert_eq!(g.len(), 2048);
        assert_eq!(g[1023], 0.25);
        assert_eq!(*g.last().unwrap(), 2.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn certificate_examples() {
        let flat = RadialProfile::flat(1.0).unwrap();
        assert!(!curvature_certificate(&flat, 3, 256, 0.0).unwrap().pass);
        let hemi = RadialProfile::hemisphere(0.1).unwrap();
        let c = curvature_certificate(&hemi, 3, 512, 100.0).unwrap();
        assert!(c.pass);
        assert!((c.r_min - 600.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_low_dimension_and_negative_margin() {
        let p = RadialProfile::flat(1.0).unwrap();
        assert!(scalar_curvature(&p, 2, 0.5).is_err());
        assert!(curvature_certificate(&p, 3, 64, -1.0).is_err());
    }

    #[test]
    fn json_field_names() {
        let hemi = RadialProfile::hemisphere(0.1).unwrap();
        let c = curvature_certificate(&hemi, 3, 16, 0.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        for k in ["dimension", "margin", "r_min_location", "R_min", "pass", "grid"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert!(v["grid"][0].get("R").is_some());
    }

    #[test]
    fn margin_policy() {
        assert_eq!(default_margin(3, None), 1e-6);
        assert!((default_margin(3, Some(0.1)) - 2e-4).abs() < 1e-18);
    }
}
