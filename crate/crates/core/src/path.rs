//! One-parameter families of profiles with a certificate per step.

use std::io::Write;

use serde::Serialize;

use crate::curvature::{offset_certificate, CurvatureCertificate};
use crate::error::{Error, Result};
use crate::radial::RadialProfile;

#[derive(Clone, Debug)]
pub struct PathStep {
    /// which construction produced the step ("bend", "fiber", "base", "retract", ...)
    pub stage: String,
    pub s: f64,
    pub profile: RadialProfile,
    pub certificate: CurvatureCertificate,
}

/// Profiles g_s over an s-grid, each certified as the fiber of the product
/// model S^p × (D^{q+1}, dr² + f² ds²).
#[derive(Clone, Debug)]
pub struct MetricPath {
    pub p: usize,
    pub q: usize,
    pub steps: Vec<PathStep>,
}

/// Compact per-step record for JSON output.
#[derive(Clone, Debug, Serialize)]
pub struct StepSummary {
    pub stage: String,
    pub s: f64,
    pub r_max: f64,
    pub r_min_location: f64,
    #[serde(rename = "R_min")]
    pub r_min: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PathSummary {
    pub p: usize,
    pub q: usize,
    pub dimension: usize,
    pub margin: f64,
    pub steps: usize,
    #[serde(rename = "R_min")]
    pub r_min: f64,
    pub r_min_s: f64,
    pub pass: bool,
    pub per_step: Vec<StepSummary>,
}

/// p(p−1): scalar curvature of the unit round S^p.
pub fn base_curvature(p: usize) -> f64 {
    (p * p.saturating_sub(1)) as f64
}

/// Certificate for one fiber profile inside the product model.
pub fn product_certificate(
    profile: &RadialProfile,
    p: usize,
    q: usize,
    points: usize,
    margin: f64,
) -> Result<CurvatureCertificate> {
    if q < 2 {
        return Err(Error::Hypothesis(format!("sphere factor S^q needs q >= 2 (got q = {q})")));
    }
    offset_certificate(profile, q + 1, base_curvature(p), p + q + 1, points, margin)
}

impl MetricPath {
    pub fn new(p: usize, q: usize) -> Self {
        MetricPath { p, q, steps: Vec::new() }
    }

    pub fn push(&mut self, stage: &str, s: f64, profile: RadialProfile, certificate: CurvatureCertificate) {
        self.steps.push(PathStep { stage: stage.to_string(), s, profile, certificate });
    }

    /// Appends another path; its steps keep their own stage labels.
    pub fn extend(&mut self, other: MetricPath) {
        self.steps.extend(other.steps);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn s_grid(&self) -> Vec<f64> {
        self.steps.iter().map(|st| st.s).collect()
    }

    pub fn first(&self) -> Option<&RadialProfile> {
        self.steps.first().map(|st| &st.profile)
    }

    pub fn last(&self) -> Option<&RadialProfile> {
        self.steps.last().map(|st| &st.profile)
    }

    pub fn stage(&self, name: &str) -> Vec<&PathStep> {
        self.steps.iter().filter(|st| st.stage == name).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.steps.iter().all(|st| st.certificate.pass)
    }

    /// (s, R_min) of the worst step.
    pub fn worst(&self) -> Option<(f64, f64)> {
        self.steps
            .iter()
            .map(|st| (st.s, st.certificate.r_min))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn summary(&self) -> PathSummary {
        let (r_min_s, r_min) = self.worst().unwrap_or((0.0, f64::NAN));
        PathSummary {
            p: self.p,
            q: self.q,
            dimension: self.p + self.q + 1,
            margin: self.steps.first().map_or(0.0, |st| st.certificate.margin),
            steps: self.steps.len(),
            r_min,
            r_min_s,
            pass: self.all_pass(),
            per_step: self
                .steps
                .iter()
                .map(|st| StepSummary {
                    stage: st.stage.clone(),
                    s: st.s,
                    r_max: st.profile.r_max(),
                    r_min_location: st.certificate.r_min_location,
                    r_min: st.certificate.r_min,
                    pass: st.certificate.pass,
                })
                .collect(),
        }
    }

    /// CSV with columns s,arc,f,R — one row per certificate grid point per step.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["s", "arc", "f", "R"])?;
        for st in &self.steps {
            for gp in &st.certificate.grid {
                let f = st.profile.eval(gp.r)?.f;
                out.write_record(&[
                    format!("{:?}", st.s),
                    format!("{:?}", gp.r),
                    format!("{f:?}"),
                    format!("{:?}", gp.value),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}
