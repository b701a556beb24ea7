//! Surgery correspondence on descriptors of metrics standard near a surgery sphere,
//! and the curvature certificate of the attached handle.
//!
//! X-side: standard near S^p ⊂ X, ds_p² + g_tor^{q+1}(δ) on N(ρ). Surgery replaces
//! N(ρ) by the handle D^{p+1} × S^q carrying g_tor^{p+1}(δ_h) + δ² ds_q², which is
//! standard near S^q ⊂ Y — an X-side record for Y with the roles of p and q swapped.
//! The exterior g|_{X∖N(ρ)} is opaque and carried over untouched.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{offset_certificate, CurvatureCertificate, DEFAULT_GRID_POINTS};
use crate::error::{Error, Result};
use crate::torpedo::{torpedo_profile, TorpedoSpec};

/// relative slack on ρ = δπ/2 (the smallest standard radius)
const RHO_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
}

/// Opaque exterior metric: an identifier plus collar data, never inspected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exterior {
    pub tag: String,
    #[serde(default)]
    pub collar_profile_csv: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StdMetricDescriptor {
    pub side: Side,
    /// dimension of the surgery sphere on this side
    pub p: usize,
    /// S^q is the boundary sphere of the normal disk D^{q+1}
    pub q: usize,
    pub rho_bar: f64,
    /// smallest radius on which the tube metric is torpedo (= δπ/2: infinitesimal product)
    pub rho: f64,
    pub delta: f64,
    pub exterior: Exterior,
}

impl StdMetricDescriptor {
    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::Hypothesis(format!("normal sphere S^q needs q >= 2 (got q = {})", self.q)));
        }
        for (name, v) in [("rho_bar", self.rho_bar), ("rho", self.rho), ("delta", self.delta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("descriptor {name} must be positive (got {v})")));
            }
        }
        if self.rho > self.rho_bar {
            return Err(Error::InvalidArgument(format!(
                "rho = {} exceeds the tube radius rho_bar = {}",
                self.rho, self.rho_bar
            )));
        }
        let cap = self.delta * FRAC_PI_2;
        if (self.rho - cap).abs() > RHO_TOL * cap {
            return Err(Error::InvalidArgument(format!(
                "rho = {} is not the smallest standard radius delta*pi/2 = {cap}",
                self.rho
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: StdMetricDescriptor = serde_json::from_str(text)?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }
}

// the handle swaps sphere and disk: S^p × D^{q+1} out, D^{p+1} × S^q in
fn swap(d: &StdMetricDescriptor, side: Side) -> StdMetricDescriptor {
    StdMetricDescriptor { side, p: d.q, q: d.p, exterior: d.exterior.clone(), ..*d }
}

fn check(d: &StdMetricDescriptor, side: Side) -> Result<()> {
    if d.side != side {
        return Err(Error::Usage(format!("expected a {side:?}-side descriptor, got {:?}", d.side)));
    }
    d.validate()?;
    if d.p < 2 {
        return Err(Error::Hypothesis(format!(
            "surgery sphere S^p needs p >= 2 for the surgery to be reversible (got p = {})",
            d.p
        )));
    }
    Ok(())
}

/// j: X-side → Y-side. The torpedo tube N(ρ) is removed and g_tor^{p+1} + δ² ds_q²
/// attached (smallest torpedo, δ_h = δ, so ρ on Y is again δπ/2).
pub fn surgery_j(d: &StdMetricDescriptor) -> Result<StdMetricDescriptor> {
    check(d, Side::X)?;
    Ok(swap(d, Side::Y))
}

/// Inverse of [`surgery_j`]: the complementary surgery on the attached S^q.
pub fn surgery_j_inv(d: &StdMetricDescriptor) -> Result<StdMetricDescriptor> {
    check(d, Side::Y)?;
    Ok(swap(d, Side::X))
}

/// Certifies R = R_tor^{p+1}(δ_h) + q(q−1)/δ² over the handle D^{p+1} × S^q(δ).
pub fn handle_curvature_certificate(
    p: usize,
    q: usize,
    delta: f64,
    delta_h: f64,
    margin: f64,
) -> Result<CurvatureCertificate> {
    if q < 2 {
        return Err(Error::Hypothesis(format!("handle sphere S^q needs q >= 2 (got q = {q})")));
    }
    if p < 1 {
        return Err(Error::InvalidArgument("handle disk D^{p+1} needs p >= 1".into()));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive (got {delta})")));
    }
    let tor = torpedo_profile(&TorpedoSpec::infinitesimal(delta_h))?;
    let sphere = (q * (q - 1)) as f64 / (delta * delta);
    offset_certificate(&tor, p + 1, sphere, p + q + 1, DEFAULT_GRID_POINTS, margin)
}

/// Random valid descriptors of either side (p, q ∈ 2..=6).
pub fn random_descriptors(seed: u64, count: usize) -> Vec<StdMetricDescriptor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let delta: f64 = rng.gen_range(0.01..0.5);
            let rho = delta * FRAC_PI_2;
            StdMetricDescriptor {
                side: if rng.gen_bool(0.5) { Side::X } else { Side::Y },
                p: rng.gen_range(2..=6),
                q: rng.gen_range(2..=6),
                rho_bar: rho * rng.gen_range(1.0..4.0),
                rho,
                delta,
                exterior: Exterior {
                    tag: format!("ext-{i}-{:016x}", rng.gen::<u64>()),
                    collar_profile_csv: format!("collar_{i}.csv"),
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> StdMetricDescriptor {
        StdMetricDescriptor {
            side: Side::X,
            p: 2,
            q: 3,
            rho_bar: 0.5,
            rho: 0.1 * FRAC_PI_2,
            delta: 0.1,
            exterior: Exterior { tag: "E".into(), collar_profile_csv: "collar.csv".into() },
        }
    }

    #[test]
    fn forward_swaps_roles_and_keeps_exterior() {
        let y = surgery_j(&example()).unwrap();
        assert_eq!(y.side, Side::Y);
        assert_eq!((y.p, y.q), (3, 2));
        assert_eq!(y.delta, 0.1);
        assert_eq!(y.exterior, example().exterior);
        assert_eq!(surgery_j_inv(&y).unwrap(), example());
    }

    #[test]
    fn side_and_dimension_guards() {
        let y = surgery_j(&example()).unwrap();
        assert!(matches!(surgery_j(&y), Err(Error::Usage(_))));
        assert!(matches!(surgery_j_inv(&example()), Err(Error::Usage(_))));
        let low = StdMetricDescriptor { p: 1, ..example() };
        assert!(matches!(surgery_j(&low), Err(Error::Hypothesis(_))));
        let bad = StdMetricDescriptor { rho: 0.3, ..example() };
        assert!(matches!(surgery_j(&bad), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn json_round_trip() {
        let d = example();
        assert_eq!(StdMetricDescriptor::from_json(&d.to_json()).unwrap(), d);
        assert!(matches!(StdMetricDescriptor::from_json("{\"side\": \"Z\"}"), Err(Error::Parse(_))));
    }

    #[test]
    fn random_descriptors_are_bijective() {
        for d in random_descriptors(3, 200) {
            let back = match d.side {
                Side::X => surgery_j_inv(&surgery_j(&d).unwrap()).unwrap(),
                Side::Y => surgery_j(&surgery_j_inv(&d).unwrap()).unwrap(),
            };
            assert_eq!(back, d);
        }
    }

    #[test]
    fn handle_bound_and_scaling() {
        // sphere term q(q−1)/δ² = 200; the torpedo factor adds ≥ 0
        let c = handle_curvature_certificate(2, 2, 0.1, 0.1, 0.0).unwrap();
        assert!(c.pass && c.r_min >= 200.0 * (1.0 - 1e-12), "{}", c.r_min);
        // halving δ (sphere only; keep δ_h) quadruples the sphere contribution
        let half = handle_curvature_certificate(2, 2, 0.05, 0.1, 0.0).unwrap();
        let tor = handle_curvature_certificate(2, 2, 1e6, 0.1, 0.0).unwrap().r_min;
        assert!(((half.r_min - tor) / (c.r_min - tor) - 4.0).abs() < 1e-9);
        assert!(!handle_curvature_certificate(2, 2, 0.1, 0.1, 1e9).unwrap().pass);
    }
}
