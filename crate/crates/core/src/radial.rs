//! Warping profiles f(r) for metrics dr² + f(r)² ds², stored as (f, f′, f″) at knots
//! and interpolated by quintic Hermite pieces (C² across knots).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smooth;

/// Value and first two derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(f: f64, d1: f64, d2: f64) -> Self {
        Jet { f, d1, d2 }
    }

    pub fn lerp(a: Jet, b: Jet, s: f64) -> Jet {
        Jet {
            f: (1.0 - s) * a.f + s * b.f,
            d1: (1.0 - s) * a.d1 + s * b.d1,
            d2: (1.0 - s) * a.d2 + s * b.d2,
        }
    }
}

const ORIGIN_JET: Jet = Jet::new(0.0, 1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    knots: Vec<f64>,
    values: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    origin_smooth: bool,
}

impl RadialProfile {
    /// Validates the profile invariants: knots start at 0 and increase strictly,
    /// f(0) = 0, f′(0) = 1, f > 0 at every knot past the origin.
    pub fn new(
        knots: Vec<f64>,
        values: Vec<f64>,
        d1: Vec<f64>,
        d2: Vec<f64>,
        origin_smooth: bool,
    ) -> Result<Self> {
        let n = knots.len();
        if n < 2 || values.len() != n || d1.len() != n || d2.len() != n {
            return Err(Error::InvalidProfile(format!(
                "need >= 2 knots with matching data (got {n} knots)"
            )));
        }
        if knots[0] != 0.0 {
            return Err(Error::InvalidProfile(format!("first knot is {} (must be 0)", knots[0])));
        }
        for i in 0..n {
            if !(knots[i].is_finite() && values[i].is_finite() && d1[i].is_finite() && d2[i].is_finite()) {
                return Err(Error::InvalidProfile(format!("non-finite data at knot {i}")));
            }
            if i > 0 && knots[i] <= knots[i - 1] {
                return Err(Error::InvalidProfile(format!("knots not increasing at index {i}")));
            }
        }
        let scale = knots[n - 1];
        if values[0].abs() > 1e-12 * scale.max(1.0) || (d1[0] - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProfile(format!(
                "origin jet must be f(0)=0, f'(0)=1 (got {}, {})",
                values[0], d1[0]
            )));
        }
        let mut values = values;
        let mut d1 = d1;
        values[0] = 0.0;
        d1[0] = 1.0;
        if let Some(i) = (1..n).find(|&i| values[i] <= 0.0) {
            return Err(Error::NonPositive { r: knots[i], value: values[i] });
        }
        if origin_smooth && d2[0].abs() > 1e-6 * (1.0 / scale).max(1.0) {
            return Err(Error::InvalidProfile(format!(
                "origin_smooth set but f''(0) = {}",
                d2[0]
            )));
        }
        Ok(RadialProfile { knots, values, d1, d2, origin_smooth })
    }

    /// Samples a closed-form jet at the given knots.
    pub fn from_fn(knots: Vec<f64>, jet: impl Fn(f64) -> Jet, origin_smooth: bool) -> Result<Self> {
        let mut v = Vec::with_capacity(knots.len());
        let mut a = Vec::with_capacity(knots.len());
        let mut b = Vec::with_capacity(knots.len());
        for &r in &knots {
            let j = jet(r);
            v.push(j.f);
            a.push(j.d1);
            b.push(j.d2);
        }
        Self::new(knots, v, a, b, origin_smooth)
    }

    /// f(r) = r on [0, r_max].
    pub fn flat(r_max: f64) -> Result<Self> {
        check_len(r_max, "r_max")?;
        Self::from_fn(vec![0.0, r_max], |r| Jet::new(r, 1.0, 0.0), true)
    }

    /// f(r) = δ sin(r/δ) on [0, r_max], r_max < δπ.
    pub fn sine(delta: f64, r_max: f64) -> Result<Self> {
        check_len(delta, "delta")?;
        check_len(r_max, "r_max")?;
        if r_max >= delta * std::f64::consts::PI {
            return Err(Error::InvalidArgument(format!(
                "sine profile needs r_max < delta*pi (r_max = {r_max}, delta = {delta})"
            )));
        }
        let m = ((r_max / (delta / 256.0)).ceil() as usize).max(16);
        Self::from_fn(
            uniform(0.0, r_max, m),
            |r| {
                let (s, c) = (r / delta).sin_cos();
                Jet::new(delta * s, c, -s / delta)
            },
            true,
        )
    }

    /// Round hemisphere cap δ sin(r/δ) on [0, δπ/2].
    pub fn hemisphere(delta: f64) -> Result<Self> {
        check_len(delta, "delta")?;
        let mut p = Self::sine(delta, delta * std::f64::consts::FRAC_PI_2)?;
        // exact top of the cap
        let last = p.knots.len() - 1;
        p.values[last] = delta;
        p.d1[last] = 0.0;
        p.d2[last] = -1.0 / delta;
        Ok(p)
    }

    pub fn r_max(&self) -> f64 {
        *self.knots.last().unwrap()
    }
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn d1(&self) -> &[f64] {
        &self.d1
    }
    pub fn d2(&self) -> &[f64] {
        &self.d2
    }
    pub fn origin_smooth(&self) -> bool {
        self.origin_smooth
    }
    pub fn len(&self) -> usize {
        self.knots.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn knot_jet(&self, i: usize) -> Jet {
        Jet::new(self.values[i], self.d1[i], self.d2[i])
    }

    /// Radius below which curvature is taken from the odd Taylor model.
    pub fn series_threshold(&self) -> f64 {
        1e-3 * self.r_max()
    }

    /// (f, f′, f″) from the interpolant; exactly (0, 1, 0) at the origin.
    pub fn eval(&self, r: f64) -> Result<Jet> {
        let r_max = self.r_max();
        if !(r >= 0.0 && r <= r_max * (1.0 + 1e-12)) {
            return Err(Error::Domain { r, r_max });
        }
        Ok(self.eval_clamped(r.min(r_max)))
    }

    pub(crate) fn eval_clamped(&self, r: f64) -> Jet {
        if r <= 0.0 {
            return ORIGIN_JET;
        }
        let n = self.knots.len();
        let i = self.knots.partition_point(|&k| k <= r).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        if r == x0 {
            return self.knot_jet(i);
        }
        if r == x1 {
            return self.knot_jet(i + 1);
        }
        hermite_eval(x0, x1, self.knot_jet(i), self.knot_jet(i + 1), r)
    }

    /// Largest |p(u) + p(−u)| of the first Hermite piece continued to negative
    /// radii, over u ∈ (0, min(first segment, 1e−2 r_max)]: zero for an odd extension.
    pub fn odd_extension_defect(&self) -> f64 {
        let h = self.knots[1];
        let c = hermite_coeffs(h, self.knot_jet(0), self.knot_jet(1));
        let top = (h.min(1e-2 * self.r_max())) / h;
        (1..=64)
            .map(|k| {
                let u = top * k as f64 / 64.0;
                // even part of the polynomial, doubled
                (2.0 * (c[0] + c[2] * u * u + c[4] * u.powi(4))).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Same function on a finer knot set (exact: quintics are reproduced).
    pub fn refine(&self, extra: &[f64]) -> RadialProfile {
        let knots = merge_knots(&self.knots, extra, self.r_max());
        self.resample(knots)
    }

    fn resample(&self, knots: Vec<f64>) -> RadialProfile {
        let jets: Vec<Jet> = knots.iter().map(|&r| self.eval_clamped(r)).collect();
        RadialProfile {
            values: jets.iter().map(|j| j.f).collect(),
            d1: jets.iter().map(|j| j.d1).collect(),
            d2: jets.iter().map(|j| j.d2).collect(),
            knots,
            origin_smooth: self.origin_smooth,
        }
    }

    /// Restriction to [0, r_end].
    pub fn restrict(&self, r_end: f64) -> Result<RadialProfile> {
        if !(r_end > 0.0 && r_end <= self.r_max()) {
            return Err(Error::Domain { r: r_end, r_max: self.r_max() });
        }
        let mut knots: Vec<f64> = self.knots.iter().copied().filter(|&k| k < r_end).collect();
        if r_end - knots.last().unwrap() <= 1e-14 * self.r_max() && knots.len() > 1 {
            knots.pop();
        }
        knots.push(r_end);
        Ok(self.resample(knots))
    }

    /// Uses `self` on [0, at] and `other` on [at, other.r_max]. The caller is
    /// responsible for the jets agreeing at `at` (checked to `tol`).
    pub fn concat(&self, other: &RadialProfile, at: f64, tol: f64) -> Result<RadialProfile> {
        if at > self.r_max() * (1.0 + 1e-12) || at >= other.r_max() || at <= 0.0 {
            return Err(Error::InvalidArgument(format!("concat point {at} outside both domains")));
        }
        let a = self.eval_clamped(at);
        let b = other.eval_clamped(at);
        let gap = (a.f - b.f).abs().max((a.d1 - b.d1).abs() * at).max((a.d2 - b.d2).abs() * at * at);
        if gap > tol {
            return Err(Error::InvalidArgument(format!("jets differ by {gap:e} at concat point {at}")));
        }
        let left = self.restrict(at.min(self.r_max()))?;
        let mut knots = left.knots;
        let mut values = left.values;
        let mut d1 = left.d1;
        let mut d2 = left.d2;
        for (i, &k) in other.knots.iter().enumerate() {
            if k > at * (1.0 + 1e-14) {
                knots.push(k);
                values.push(other.values[i]);
                d1.push(other.d1[i]);
                d2.push(other.d2[i]);
            }
        }
        RadialProfile::new(knots, values, d1, d2, self.origin_smooth)
    }

    /// φ·inner + (1−φ)·outer, φ ≡ 1 on [0,a], ≡ 0 on [b, ·) (C² window).
    /// Result lives on outer's domain; inner must cover [0, b].
    pub fn splice(inner: &RadialProfile, outer: &RadialProfile, a: f64, b: f64) -> Result<RadialProfile> {
        if !(0.0 < a && a < b && b <= inner.r_max() * (1.0 + 1e-12) && b <= outer.r_max()) {
            return Err(Error::InvalidArgument(format!(
                "splice window [{a}, {b}] must lie inside both domains"
            )));
        }
        let mut extra: Vec<f64> = inner.knots.iter().copied().filter(|&k| k <= b).collect();
        extra.extend(uniform(a, b, 64));
        let knots = merge_knots(&outer.knots, &extra, outer.r_max());
        let jets: Vec<Jet> = knots
            .iter()
            .map(|&r| {
                if r <= a {
                    inner.eval_clamped(r)
                } else if r >= b {
                    outer.eval_clamped(r)
                } else {
                    let (phi, dphi, ddphi) = smooth::cutoff(r, a, b);
                    let i = inner.eval_clamped(r);
                    let o = outer.eval_clamped(r);
                    Jet::new(
                        phi * i.f + (1.0 - phi) * o.f,
                        dphi * (i.f - o.f) + phi * i.d1 + (1.0 - phi) * o.d1,
                        ddphi * (i.f - o.f) + 2.0 * dphi * (i.d1 - o.d1) + phi * i.d2 + (1.0 - phi) * o.d2,
                    )
                }
            })
            .collect();
        RadialProfile::new(
            knots,
            jets.iter().map(|j| j.f).collect(),
            jets.iter().map(|j| j.d1).collect(),
            jets.iter().map(|j| j.d2).collect(),
            inner.origin_smooth,
        )
    }

    /// sup |f − g| over both knot sets and segment midpoints of the common domain.
    pub fn sup_distance(&self, other: &RadialProfile) -> f64 {
        let end = self.r_max().min(other.r_max());
        let knots = merge_knots(&self.knots, &other.knots, end);
        let mut worst: f64 = 0.0;
        for w in knots.windows(2) {
            for r in [w[0], 0.5 * (w[0] + w[1]), w[1]] {
                let d = (self.eval_clamped(r).f - other.eval_clamped(r).f).abs();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["r", "f", "d1", "d2"])?;
        for i in 0..self.knots.len() {
            wr.write_record(&[
                fmt(self.knots[i]),
                fmt(self.values[i]),
                fmt(self.d1[i]),
                fmt(self.d2[i]),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<RadialProfile> {
        let mut rd = csv::Reader::from_reader(r);
        let header = rd.headers()?.clone();
        if header.iter().map(str::trim).collect::<Vec<_>>() != ["r", "f", "d1", "d2"] {
            return Err(Error::Parse(format!("profile CSV header must be r,f,d1,d2 (got {header:?})")));
        }
        let (mut k, mut v, mut a, mut b) = (vec![], vec![], vec![], vec![]);
        for (line, rec) in rd.records().enumerate() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Parse(format!("row {}: missing column {i}", line + 2)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))
            };
            k.push(num(0)?);
            v.push(num(1)?);
            a.push(num(2)?);
            b.push(num(3)?);
        }
        let smooth = b.first().is_some_and(|d: &f64| d.abs() <= 1e-12);
        RadialProfile::new(k, v, a, b, smooth)
    }
}

/// Quintic Hermite coefficients in u = (x − x0)/h.
fn hermite_coeffs(h: f64, a: Jet, b: Jet) -> [f64; 6] {
    let c0 = a.f;
    let c1 = h * a.d1;
    let c2 = 0.5 * h * h * a.d2;
    let big_a = b.f - c0 - c1 - c2;
    let big_b = h * b.d1 - c1 - 2.0 * c2;
    let big_c = h * h * b.d2 - 2.0 * c2;
    [
        c0,
        c1,
        c2,
        10.0 * big_a - 4.0 * big_b + 0.5 * big_c,
        -15.0 * big_a + 7.0 * big_b - big_c,
        6.0 * big_a - 3.0 * big_b + 0.5 * big_c,
    ]
}

fn fmt(x: f64) -> String {
    // shortest round-trip representation
    format!("{x:?}")
}

fn check_len(x: f64, name: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite (got {x})")))
    }
}

/// Quintic Hermite piece through jets j0 at x0 and j1 at x1, evaluated at x.
pub(crate) fn hermite_eval(x0: f64, x1: f64, j0: Jet, j1: Jet, x: f64) -> Jet {
    let h = x1 - x0;
    let u = (x - x0) / h;
    let c = hermite_coeffs(h, j0, j1);
    let p = c[0] + u * (c[1] + u * (c[2] + u * (c[3] + u * (c[4] + u * c[5]))));
    let dp = c[1] + u * (2.0 * c[2] + u * (3.0 * c[3] + u * (4.0 * c[4] + u * 5.0 * c[5])));
    let ddp = 2.0 * c[2] + u * (6.0 * c[3] + u * (12.0 * c[4] + u * 20.0 * c[5]));
    Jet::new(p, dp / h, ddp / (h * h))
}

/// m+1 equally spaced points on [a, b], endpoints exact.
pub fn uniform(a: f64, b: f64, m: usize) -> Vec<f64> {
    let m = m.max(1);
    (0..=m)
        .map(|i| if i == m { b } else { a + (b - a) * i as f64 / m as f64 })
        .collect()
}

/// Sorted union of two knot sets, clipped to [0, end]; near-duplicates
/// (closer than 1e−13·end) are merged, keeping the first set's value.
pub fn merge_knots(a: &[f64], b: &[f64], end: f64) -> Vec<f64> {
    let mut all: Vec<(f64, u8)> = a
        .iter()
        .map(|&x| (x, 0u8))
        .chain(b.iter().map(|&x| (x, 1u8)))
        .filter(|&(x, _)| (0.0..=end).contains(&x))
        .collect();
    all.push((0.0, 0));
    all.push((end, 0));
    all.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let tol = 1e-13 * end;
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for (x, _) in all {
        match out.last() {
            Some(&l) if x - l <= tol => {}
            _ => out.push(x),
        }
    }
    // keep the exact endpoint
    if let Some(l) = out.last_mut() {
        if (end - *l).abs() <= tol {
            *l = end;
        }
    }
    out
}

/// Pointwise (1−s)·p0 + s·p1 on the union knot set. Exact at s ∈ {0, 1}.
pub fn linear_blend(p0: &RadialProfile, p1: &RadialProfile, s: f64) -> Result<RadialProfile> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("blend parameter {s} outside [0,1]")));
    }
    let (a, b) = (p0.r_max(), p1.r_max());
    if (a - b).abs() > 1e-12 * a.max(b) {
        return Err(Error::InvalidArgument(format!("blend needs a common domain ({a} vs {b})")));
    }
    if s == 0.0 {
        return Ok(p0.clone());
    }
    if s == 1.0 {
        return Ok(p1.clone());
    }
    let knots = merge_knots(&p0.knots, &p1.knots, a);
    let (mut v, mut d1, mut d2) = (vec![], vec![], vec![]);
    for &r in &knots {
        let j = Jet::lerp(p0.eval_clamped(r), p1.eval_clamped(r), s);
        v.push(j.f);
        d1.push(j.d1);
        d2.push(j.d2);
    }
    RadialProfile::new(knots, v, d1, d2, p0.origin_smooth && p1.origin_smooth)
}

/// Largest discrepancy between centred differences and the stored derivatives:
/// FD(f) vs f′ and FD(f′) vs f″. Five-point stencil when r ± 2h fits, else three-point.
pub fn finite_diff_check(p: &RadialProfile, r: f64, h: f64) -> Result<f64> {
    let r_max = p.r_max();
    if !(h > 0.0) || r - h < 0.0 || r + h > r_max {
        return Err(Error::Domain { r, r_max });
    }
    let e = |x: f64| p.eval_clamped(x);
    let c = e(r);
    let (df, dd1) = if r - 2.0 * h >= 0.0 && r + 2.0 * h <= r_max {
        let (m2, m1, p1, p2) = (e(r - 2.0 * h), e(r - h), e(r + h), e(r + 2.0 * h));
        (
            (m2.f - 8.0 * m1.f + 8.0 * p1.f - p2.f) / (12.0 * h),
            (m2.d1 - 8.0 * m1.d1 + 8.0 * p1.d1 - p2.d1) / (12.0 * h),
        )
    } else {
        let (m1, p1) = (e(r - h), e(r + h));
        ((p1.f - m1.f) / (2.0 * h), (p1.d1 - m1.d1) / (2.0 * h))
    };
    Ok((df - c.d1).abs().max((dd1 - c.d2).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn flat_eval() {
        let p = RadialProfile::flat(1.0).unwrap();
        assert_eq!(p.eval(0.5).unwrap(), Jet::new(0.5, 1.0, 0.0));
        assert_eq!(p.eval(0.0).unwrap(), Jet::new(0.0, 1.0, 0.0));
        assert!(matches!(p.eval(1.5), Err(Error::Domain { .. })));
        assert!(matches!(p.eval(-0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn hemisphere_top() {
        let p = RadialProfile::hemisphere(1.0).unwrap();
        let j = p.eval(FRAC_PI_2).unwrap();
        assert_eq!(j, Jet::new(1.0, 0.0, -1.0));
        // interior, against the closed form
        let j = p.eval(0.7).unwrap();
        assert!((j.f - 0.7f64.sin()).abs() < 1e-13);
        assert!((j.d1 - 0.7f64.cos()).abs() < 1e-11);
        assert!((j.d2 + 0.7f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_origin_and_nonpositive() {
        let e = RadialProfile::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![0.5, 1.0], vec![0.0, 0.0], true);
        assert!(matches!(e, Err(Error::InvalidProfile(_))));
        let e = RadialProfile::new(vec![0.0, 1.0], vec![0.0, -1.0], vec![1.0, 1.0], vec![0.0, 0.0], true);
        assert!(matches!(e, Err(Error::NonPositive { .. })));
        let e = RadialProfile::new(vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![0.0, 0.0], true);
        assert!(e.is_err());
    }

    #[test]
    fn sine_needs_positive_domain() {
        assert!(RadialProfile::sine(0.1, 0.4).is_err());
    }

    #[test]
    fn blend_example_point() {
        let a = RadialProfile::flat(PI / 2.0).unwrap();
        let b = RadialProfile::sine(1.0, PI / 2.0).unwrap();
        let m = linear_blend(&a, &b, 0.5).unwrap();
        let j = m.eval(PI / 2.0).unwrap();
        assert!((j.f - (PI / 2.0 + 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn blend_endpoints_are_identities() {
        let a = RadialProfile::flat(1.0).unwrap();
        let b = RadialProfile::sine(1.0, 1.0).unwrap();
        assert_eq!(linear_blend(&a, &b, 0.0).unwrap(), a);
        assert_eq!(linear_blend(&a, &b, 1.0).unwrap(), b);
        assert!(linear_blend(&b, &b, 0.3).unwrap().sup_distance(&b) < 1e-15);
    }

    #[test]
    fn blend_rejects_mismatched_domain() {
        let a = RadialProfile::flat(1.0).unwrap();
        let b = RadialProfile::flat(2.0).unwrap();
        assert!(linear_blend(&a, &b, 0.5).is_err());
    }

    #[test]
    fn finite_differences() {
        let flat = RadialProfile::flat(1.0).unwrap();
        assert!(finite_diff_check(&flat, 0.5, 1e-4).unwrap() < 1e-8);
        let hemi = RadialProfile::hemisphere(1.0).unwrap();
        assert!(finite_diff_check(&hemi, 0.7, 1e-4).unwrap() < 1e-6);
        // near the boundary only the 3-point stencil fits
        assert!(finite_diff_check(&hemi, 1.5e-4, 1e-4).unwrap() < 1e-6);
    }

    #[test]
    fn corrupted_derivative_is_detected() {
        let p = RadialProfile::hemisphere(1.0).unwrap();
        let i = p.len() / 2;
        let mut d1 = p.d1().to_vec();
        d1[i] += 1e-3;
        let bad = RadialProfile::new(p.knots().to_vec(), p.values().to_vec(), d1, p.d2().to_vec(), true).unwrap();
        // the damage is a jump in f'''' at the knot, which a symmetric stencil
        // centred exactly on it cancels; sample half a step beside it
        let d = finite_diff_check(&bad, p.knots()[i] + 0.5e-4, 1e-4).unwrap();
        assert!(d > 1e-5, "{d}");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let p = RadialProfile::hemisphere(0.3).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"r,f,d1,d2\n"));
        let q = RadialProfile::read_csv(&buf[..]).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn csv_rejects_bad_header() {
        assert!(matches!(RadialProfile::read_csv(&b"x,y\n0,0\n"[..]), Err(Error::Parse(_))));
    }

    #[test]
    fn restrict_and_concat() {
        let p = RadialProfile::hemisphere(1.0).unwrap();
        let r = p.restrict(1.0).unwrap();
        assert_eq!(r.r_max(), 1.0);
        assert!((r.eval(0.9).unwrap().f - p.eval(0.9).unwrap().f).abs() < 1e-15);
        let back = r.concat(&p, 1.0, 1e-12).unwrap();
        assert!(back.sup_distance(&p) < 1e-15);
    }

    #[test]
    fn splice_is_identity_for_equal_parts() {
        let p = RadialProfile::hemisphere(1.0).unwrap();
        let s = RadialProfile::splice(&p, &p, 0.4, 0.8).unwrap();
        assert!(s.sup_distance(&p) < 1e-14);
    }

    #[test]
    fn odd_extension_of_sine() {
        let p = RadialProfile::sine(0.5, 1.0).unwrap();
        assert!(p.odd_extension_defect() < 1e-12);
    }

    #[test]
    fn merge_deduplicates() {
        let m = merge_knots(&[0.0, 0.5, 1.0], &[0.5 + 1e-16, 0.25, 2.0], 1.0);
        assert_eq!(m, vec![0.0, 0.25, 0.5, 1.0]);
    }

    proptest! {
        #[test]
        fn blend_is_pointwise_linear(s in 0.0f64..1.0, r in 0.0f64..1.2) {
            let a = RadialProfile::flat(1.2).unwrap();
            let b = RadialProfile::sine(0.6, 1.2).unwrap();
            let m = linear_blend(&a, &b, s).unwrap();
            let want = Jet::lerp(a.eval(r).unwrap(), b.eval(r).unwrap(), s);
            let got = m.eval(r).unwrap();
            prop_assert!((got.f - want.f).abs() < 1e-12);
            prop_assert!((got.d1 - want.d1).abs() < 1e-10);
            prop_assert!((got.d2 - want.d2).abs() < 1e-7);
        }

        #[test]
        fn interpolant_is_c2_across_knots(delta in 0.2f64..2.0) {
            let p = RadialProfile::sine(delta, delta * 1.5).unwrap();
            let i = p.len() / 3;
            let k = p.knots()[i];
            let eps = 1e-9 * p.r_max();
            let (l, r) = (p.eval(k - eps).unwrap(), p.eval(k + eps).unwrap());
            prop_assert!((l.d2 - r.d2).abs() < 1e-5 / delta);
        }
    }
}
