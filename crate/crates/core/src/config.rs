//! Run configuration shared by the CLI, the verify suite and the isotopy drivers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curvature::{default_margin, DEFAULT_GRID_POINTS};
use crate::error::{Error, Result};
use crate::torpedo::DEFAULT_WIDTH;

/// `margin: null` (the default) picks the scale-aware margin
/// 1e−6·max(1, (n−1)(n−2)/δ²); a number fixes it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid_points: usize,
    pub steps: usize,
    pub margin: Option<f64>,
    pub zero_tol: f64,
    pub seed: u64,
    /// torpedo/neck radius targeted by the isotopy
    pub delta: f64,
    pub smoothing_width: f64,
    /// radius of the round S^p factor at the end of the isotopy
    pub base_radius: f64,
    pub recognition_tol: f64,
    pub out_dir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid_points: DEFAULT_GRID_POINTS,
            steps: 64,
            margin: None,
            zero_tol: 1e-9,
            seed: 42,
            delta: 0.05,
            smoothing_width: DEFAULT_WIDTH,
            base_radius: 1.0,
            recognition_tol: 1e-7,
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Usage(format!("config: {what}")));
        if self.grid_points < 16 {
            return bad("grid_points must be >= 16");
        }
        if self.steps < 16 {
            return bad("steps must be >= 16");
        }
        if let Some(m) = self.margin {
            if !(m >= 0.0 && m.is_finite()) {
                return bad("margin must be a finite number >= 0");
            }
        }
        for (name, v) in [
            ("zero_tol", self.zero_tol),
            ("delta", self.delta),
            ("base_radius", self.base_radius),
            ("recognition_tol", self.recognition_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(&format!("{name} must be positive"));
            }
        }
        if !(self.smoothing_width > 0.0 && self.smoothing_width <= std::f64::consts::FRAC_PI_4) {
            return bad("smoothing_width must lie in (0, pi/4]");
        }
        Ok(())
    }

    /// Margin for an n-dimensional model whose curvature scale is set by `delta`.
    pub fn margin_for(&self, n: usize, delta: Option<f64>) -> f64 {
        self.margin.unwrap_or_else(|| default_margin(n, delta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn partial_override() {
        let c = RunConfig::from_json(r#"{"steps": 32, "margin": 0.5}"#).unwrap();
        assert_eq!(c.steps, 32);
        assert_eq!(c.margin_for(5, Some(0.1)), 0.5);
        assert_eq!(c.grid_points, DEFAULT_GRID_POINTS);
    }

    #[test]
    fn auto_margin_scales_with_delta() {
        let c = RunConfig::default();
        assert!((c.margin_for(3, Some(0.1)) - 2e-4).abs() < 1e-15);
        assert_eq!(c.margin_for(3, None), 1e-6);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(RunConfig::from_json(r#"{"steps": 3}"#), Err(Error::Usage(_))));
        assert!(matches!(RunConfig::from_json(r#"{"delta": -1}"#), Err(Error::Usage(_))));
        assert!(matches!(RunConfig::from_json(r#"{"bogus": 1}"#), Err(Error::Parse(_))));
    }
}
