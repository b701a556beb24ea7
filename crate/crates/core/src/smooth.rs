//! Smooth step/bump helpers shared by the constructions.

/// C² quintic step on [0,1]: value, first and second derivative; clamped outside.
pub fn step5(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let x2 = x * x;
    let x3 = x2 * x;
    (
        x3 * (10.0 - 15.0 * x + 6.0 * x2),
        30.0 * x2 * (1.0 - x) * (1.0 - x),
        60.0 * x * (1.0 - x) * (1.0 - 2.0 * x),
    )
}

/// C³ septic step on [0,1] (vanishes to 4th order at both ends).
pub fn step7(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let x4 = x.powi(4);
    x4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)))
}

/// ∫_0^x step5, for x in [0,1] (1/2 at x = 1)
pub fn step5_integral(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let x4 = x.powi(4);
    x4 * (2.5 - 3.0 * x + x * x)
}

/// ∫_0^x step7, for x in [0,1] (1/2 at x = 1)
pub fn step7_integral(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x.powi(5) * (7.0 + x * (-14.0 + x * (10.0 - 2.5 * x)))
}

/// window value going 1 → 0 across [a, b] (C²), with its r-derivatives.
pub fn cutoff(r: f64, a: f64, b: f64) -> (f64, f64, f64) {
    let w = b - a;
    let (s, ds, dds) = step5((r - a) / w);
    (1.0 - s, -ds / w, -dds / (w * w))
}

/// Polynomial bump (1 − u²)⁴, u = (x − c)/h: unit height, C³ at the support edge.
pub fn bump(x: f64, c: f64, h: f64) -> f64 {
    let u = (x - c) / h;
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - u * u).powi(4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step5_endpoints_are_flat() {
        assert_eq!(step5(0.0), (0.0, 0.0, 0.0));
        assert_eq!(step5(1.0), (1.0, 0.0, 0.0));
        let (v, _, _) = step5(0.5);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn step5_derivatives_match_differences() {
        let h = 1e-6;
        for &x in &[0.1, 0.37, 0.8] {
            let (_, d, dd) = step5(x);
            let fd = (step5(x + h).0 - step5(x - h).0) / (2.0 * h);
            let fdd = (step5(x + h).1 - step5(x - h).1) / (2.0 * h);
            assert!((d - fd).abs() < 1e-8);
            assert!((dd - fdd).abs() < 1e-6);
        }
    }

    #[test]
    fn step5_integral_matches_quadrature() {
        let q = crate::quad::integrate(|x| step5(x).0, 0.0, 0.7, 1);
        assert!((q - step5_integral(0.7)).abs() < 1e-14);
        assert!((step5_integral(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn step7_shape() {
        assert_eq!(step7(0.0), 0.0);
        assert_eq!(step7(1.0), 1.0);
        assert!((step7(0.5) - 0.5).abs() < 1e-15);
        assert!((1.0 - step7(0.99) - 35.0 * 1e-8).abs() < 1e-8);
    }

    #[test]
    fn step7_integral_matches_quadrature() {
        for &x in &[0.0, 0.3, 0.7, 1.0] {
            let q = crate::quad::integrate(step7, 0.0, x, 4);
            assert!((step7_integral(x) - q).abs() < 1e-14, "{x}");
        }
        assert_eq!(step7_integral(1.0), 0.5);
    }

    #[test]
    fn bump_peaks_at_centre() {
        assert_eq!(bump(0.3, 0.3, 0.1), 1.0);
        assert_eq!(bump(0.45, 0.3, 0.1), 0.0);
    }
}
