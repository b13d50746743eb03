//! Closed-form and semi-analytic interaction integrals of the kernel
//! `|x - y|^{-(n + 2s)}`: strip integrals, box–strip and box–box energies,
//! interval energies and fractional perimeters of rectangles and balls.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::domain::AxisBox;
use crate::error::{Error, Result};
use crate::order::FracOrder;
use crate::quad::{integrate, integrate_pieces, Tolerance};
use crate::tent;

/// Relative tolerance of the adaptive quadratures behind every energy.
pub const KERNEL_RTOL: f64 = 1e-10;

/// How an [`EnergyValue`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    AdaptiveQuadrature,
    MonteCarlo,
}

/// A nonnegative energy with provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyValue {
    pub value: f64,
    pub method: Method,
    /// Standard error; zero unless `method` is `MonteCarlo`.
    pub stderr: f64,
    /// Bound on any neglected far-field tail.
    pub truncation_bound: f64,
}

impl EnergyValue {
    pub fn closed_form(value: f64) -> Self {
        Self::exact(value, Method::ClosedForm)
    }

    pub fn quadrature(value: f64) -> Self {
        Self::exact(value, Method::AdaptiveQuadrature)
    }

    fn exact(value: f64, method: Method) -> Self {
        // clamp roundoff below zero; energies are nonnegative
        EnergyValue { value: value.max(0.0), method, stderr: 0.0, truncation_bound: 0.0 }
    }

    pub fn monte_carlo(value: f64, stderr: f64) -> Self {
        EnergyValue { value, method: Method::MonteCarlo, stderr, truncation_bound: 0.0 }
    }
}

pub(crate) fn tol() -> Tolerance {
    Tolerance::rel(KERNEL_RTOL).with_abs(1e-300)
}

/// `C(s) = (1 / 2s) ∫_{-π/2}^{π/2} cos^{2s} θ dθ`.
pub fn angular_constant(s: FracOrder) -> f64 {
    let p = 2.0 * s.value();
    let half = integrate(|t: f64| t.cos().max(0.0).powf(p), 0.0, 0.5 * PI, Tolerance::rel(1e-13))
        .expect("cos^p is bounded and smooth inside (0, π/2)")
        .value;
    2.0 * half / p
}

/// `∫_{|a|}^{|b|} ∫_R |y|^{-(2+2s)} dy₂ dy₁ = C(s) (|a|^{-2s} - |b|^{-2s})`; `b` may be infinite.
pub fn vertical_strip_integral(a: f64, b: f64, s: FracOrder) -> Result<EnergyValue> {
    let (a, b) = (a.abs(), b.abs());
    if a == 0.0 {
        return Err(Error::SingularArgument("strip integral needs |a| > 0".into()));
    }
    if a > b {
        return Err(Error::InvalidArgument(format!("need |a| <= |b|, got {a} > {b}")));
    }
    if a == b {
        return Ok(EnergyValue::closed_form(0.0));
    }
    let p = 2.0 * s.value();
    Ok(EnergyValue::closed_form(angular_constant(s) * (a.powf(-p) - b.powf(-p))))
}

/// Interaction of the box `(0, M) × (0, N)` with the strip `(-q₂, -q₁) × R`:
/// `C(s) N [(q₁+M)^{1-2s} - q₁^{1-2s} - (q₂+M)^{1-2s} + q₂^{1-2s}] / (1-2s)`.
///
/// The `1/(1-2s)` comes from integrating `(q + x₁)^{-2s}` over `x₁`; it is
/// what the defining double integral evaluates to.
pub fn box_strip_energy(q1: f64, q2: f64, m: f64, n: f64, s: FracOrder) -> Result<EnergyValue> {
    s.require_sub("the box–strip closed form")?;
    if !(q1 >= 0.0 && q1 <= q2) {
        return Err(Error::InvalidArgument(format!("need 0 <= q1 <= q2, got q1 = {q1}, q2 = {q2}")));
    }
    if !(m > 0.0 && n > 0.0) {
        return Err(Error::InvalidArgument("box sides must be positive".into()));
    }
    if q1 == q2 {
        return Ok(EnergyValue::closed_form(0.0));
    }
    let e = 1.0 - 2.0 * s.value();
    let bracket = (q1 + m).powf(e) - q1.powf(e) - (q2 + m).powf(e) + q2.powf(e);
    Ok(EnergyValue::closed_form(angular_constant(s) * n * bracket / e))
}

/// Second antiderivative of `|t|^{-(1+2s)}` up to sign, normalized so that
/// `E((a,b),(c,d)) = φ(c-a) - φ(c-b) - φ(d-a) + φ(d-b)`.
pub(crate) fn phi(t: f64, s: f64) -> f64 {
    if s == 0.5 {
        t.ln()
    } else {
        t.powf(1.0 - 2.0 * s) / (2.0 * s * (1.0 - 2.0 * s))
    }
}

/// `∫_{I₁} ∫_{I₂} |x - y|^{-(1+2s)}` for disjoint intervals, in either order.
pub fn interval_interval_energy(i1: (f64, f64), i2: (f64, f64), s: FracOrder) -> Result<EnergyValue> {
    let ((a, b), (c, d)) = if i1.0 <= i2.0 { (i1, i2) } else { (i2, i1) };
    if !(a <= b && c <= d) {
        return Err(Error::InvalidArgument("interval endpoints out of order".into()));
    }
    if a == b || c == d {
        return Ok(EnergyValue::closed_form(0.0));
    }
    if b > c {
        return Err(Error::InvalidArgument(format!("intervals ({a}, {b}) and ({c}, {d}) overlap")));
    }
    let sv = s.value();
    if b == c && sv >= 0.5 {
        return Err(Error::Divergent(format!("touching intervals have infinite interaction for s = {sv} >= 1/2")));
    }
    if a.is_infinite() && d.is_infinite() {
        return Err(Error::Divergent("two unbounded intervals".into()));
    }
    let term = |t: f64| if t == 0.0 { 0.0 } else { phi(t, sv) };
    // pairs of terms with an infinite endpoint cancel in the limit
    let mut v = -term(c - b);
    if a.is_finite() {
        v += term(c - a);
    }
    if d.is_finite() {
        v += term(d - b);
    }
    if a.is_finite() && d.is_finite() {
        v -= term(d - a);
    }
    Ok(EnergyValue::closed_form(v))
}

/// `∫_{(0,L)} ∫_{R∖(0,L)} |t - t'|^{-(1+2s)} = L^{1-2s} / (s (1-2s))`.
pub fn interval_complement_energy(len: f64, s: FracOrder) -> Result<EnergyValue> {
    if s.value() >= 0.5 {
        return Err(Error::Divergent(format!("an interval has infinite 1D perimeter for s = {} >= 1/2", s.value())));
    }
    if !(len > 0.0) {
        return Err(Error::InvalidArgument(format!("interval length must be positive, got {len}")));
    }
    let sv = s.value();
    if len.is_infinite() {
        return Err(Error::Divergent("unbounded interval".into()));
    }
    Ok(EnergyValue::closed_form(len.powf(1.0 - 2.0 * sv) / (sv * (1.0 - 2.0 * sv))))
}

fn axes(b: &AxisBox) -> [(f64, f64); 2] {
    [(b.lo(0), b.hi(0)), (b.lo(1), b.hi(1))]
}

/// `∬_{A×B} |x - y|^{-(n+2s)}` for boxes with disjoint interiors.
///
/// 2D boxes go through the tent reduction; 1D boxes use the closed form.
/// On every axis at least one of the two boxes must be bounded.
pub fn box_box_energy(a: &AxisBox, b: &AxisBox, s: FracOrder) -> Result<EnergyValue> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidArgument("boxes of different dimension".into()));
    }
    if a.overlaps(b) {
        return Err(Error::InvalidArgument("boxes have overlapping interiors".into()));
    }
    if a.dim() == 1 {
        return interval_interval_energy((a.lo(0), a.hi(0)), (b.lo(0), b.hi(0)), s);
    }
    let v = tent::box_pair_integral(axes(a), axes(b), s.value(), tol())?;
    Ok(EnergyValue::quadrature(v))
}

/// `Per_s(R) = ∬_{R × Rᶜ} |x - y|^{-(2+2s)}` for a `w × h` rectangle.
pub fn rect_perimeter_s(w: f64, h: f64, s: FracOrder) -> Result<EnergyValue> {
    if s.value() >= 0.5 {
        return Err(Error::Divergent(format!("rectangle indicators leave H^s for s = {} >= 1/2", s.value())));
    }
    if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
        return Err(Error::InvalidArgument("rectangle sides must be positive and finite".into()));
    }
    Ok(EnergyValue::quadrature(tent::rectangle_perimeter(w, h, s.value(), tol())?))
}

/// Fractional perimeter of a finite box of either dimension.
pub fn box_perimeter_s(b: &AxisBox, s: FracOrder) -> Result<EnergyValue> {
    if !b.is_finite() {
        return Err(Error::Divergent("unbounded box has infinite perimeter".into()));
    }
    if b.dim() == 1 {
        interval_complement_energy(b.width(0), s)
    } else {
        rect_perimeter_s(b.width(0), b.width(1), s)
    }
}

/// `P_s(B_1) = ∬_{B₁ × B₁ᶜ} |x - y|^{-(2+2s)}` in the plane.
pub fn ball_perimeter_s(s: FracOrder) -> Result<EnergyValue> {
    ball_perimeter_radius(1.0, s)
}

/// Fractional perimeter of the disc of radius `r`, integrated directly
/// (not by scaling). Polar form in the offset `z`:
/// `2π ∫_0^{2r} (π r² - lens(ρ)) ρ^{-1-2s} dρ + π r² · 2π (2r)^{-2s} / 2s`.
pub fn ball_perimeter_radius(r: f64, s: FracOrder) -> Result<EnergyValue> {
    if s.value() >= 0.5 {
        return Err(Error::Divergent(format!("ball perimeter diverges for s = {} >= 1/2", s.value())));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let sv = s.value();
    let area = PI * r * r;
    // area - lens(ρ) - 2rρ = r² g(ρ / 2r) with g(q) = 2 asin q + 2q√(1-q²) - 4q
    let g = |q: f64| {
        if q < 0.05 {
            let q2 = q * q;
            -q * q2 * (2.0 / 3.0 + q2 * (0.1 + q2 * (1.0 / 28.0 + q2 * (5.0 / 288.0 + q2 * 7.0 / 704.0))))
        } else {
            2.0 * q.asin() + 2.0 * q * (1.0 - q * q).max(0.0).sqrt() - 4.0 * q
        }
    };
    let smooth = |rho: f64| {
        if rho == 0.0 {
            return 0.0;
        }
        r * r * g((rho / (2.0 * r)).min(1.0)) * rho.powf(-1.0 - 2.0 * sv)
    };
    let two_r = 2.0 * r;
    let inner = integrate_pieces(smooth, &[0.0, r, two_r], tol())?.value;
    let linear = 2.0 * r * two_r.powf(1.0 - 2.0 * sv) / (1.0 - 2.0 * sv);
    let tail = area * two_r.powf(-2.0 * sv) / (2.0 * sv);
    Ok(EnergyValue::quadrature(2.0 * PI * (inner + linear + tail)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s(v: f64) -> FracOrder {
        FracOrder::new(v).unwrap()
    }

    #[test]
    fn angular_constant_at_half_is_two() {
        assert_relative_eq!(angular_constant(s(0.5)), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn strip_integral_examples() {
        assert_eq!(vertical_strip_integral(1.0, 1.0, s(0.3)).unwrap().value, 0.0);
        assert_relative_eq!(vertical_strip_integral(1.0, 2.0, s(0.5)).unwrap().value, 1.0, max_relative = 1e-12);
        assert_relative_eq!(
            vertical_strip_integral(1.0, f64::INFINITY, s(0.25)).unwrap().value,
            angular_constant(s(0.25)),
            max_relative = 1e-14
        );
        assert!(matches!(vertical_strip_integral(0.0, 1.0, s(0.25)), Err(Error::SingularArgument(_))));
    }

    #[test]
    fn box_strip_examples() {
        let c = angular_constant(s(0.25));
        assert_eq!(box_strip_energy(1.0, 1.0, 1.0, 1.0, s(0.25)).unwrap().value, 0.0);
        let v = box_strip_energy(1.0, 2.0, 1.0, 1.0, s(0.25)).unwrap().value;
        let bracket = 2.0 * 2f64.sqrt() - 1.0 - 3f64.sqrt();
        assert!((c * bracket - 0.46190).abs() < 5e-5);
        assert_relative_eq!(v, c * bracket / 0.5, max_relative = 1e-14);
        let v0 = box_strip_energy(0.0, 1.0, 1.0, 2.0, s(0.25)).unwrap().value;
        assert!((2.0 * c * (2.0 - 2f64.sqrt()) - 5.6153).abs() < 5e-4);
        assert_relative_eq!(v0, 2.0 * c * (2.0 - 2f64.sqrt()) / 0.5, max_relative = 1e-14);
        assert!(matches!(box_strip_energy(1.0, 2.0, 1.0, 1.0, s(0.5)), Err(Error::OutOfRegime(_))));
    }

    #[test]
    fn box_strip_matches_tall_box_energy() {
        let strip = AxisBox::new_2d((-2.0, -1.0), (-1e3, 1e3 + 1.0)).unwrap();
        let unit = AxisBox::new_2d((0.0, 1.0), (0.0, 1.0)).unwrap();
        let e = box_box_energy(&unit, &strip, s(0.25)).unwrap().value;
        let v = box_strip_energy(1.0, 2.0, 1.0, 1.0, s(0.25)).unwrap().value;
        assert!((e - v).abs() < 1e-3, "{e} vs {v}");
    }

    #[test]
    fn interval_examples() {
        assert_eq!(interval_interval_energy((0.0, 0.0), (2.0, 3.0), s(0.25)).unwrap().value, 0.0);
        let v = interval_interval_energy((0.0, 1.0), (2.0, 3.0), s(0.25)).unwrap().value;
        assert!((v - 0.385506).abs() < 1e-6, "{v}");
        let w = interval_interval_energy((0.0, 1.0), (2.0, 3.0), s(0.75)).unwrap().value;
        assert!((w - 0.217515).abs() < 1e-6, "{w}");
        // order of arguments is irrelevant
        let w2 = interval_interval_energy((2.0, 3.0), (0.0, 1.0), s(0.75)).unwrap().value;
        assert_eq!(w, w2);
        assert!(matches!(interval_interval_energy((0.0, 2.0), (1.0, 3.0), s(0.25)), Err(Error::InvalidArgument(_))));
        assert!(matches!(interval_interval_energy((0.0, 1.0), (1.0, 3.0), s(0.5)), Err(Error::Divergent(_))));
    }

    #[test]
    fn interval_log_branch_is_continuous() {
        let mid = interval_interval_energy((0.0, 1.0), (1.5, 4.0), s(0.5)).unwrap().value;
        let lo = interval_interval_energy((0.0, 1.0), (1.5, 4.0), s(0.5 - 1e-7)).unwrap().value;
        let hi = interval_interval_energy((0.0, 1.0), (1.5, 4.0), s(0.5 + 1e-7)).unwrap().value;
        assert_relative_eq!(mid, lo, max_relative = 1e-5);
        assert_relative_eq!(mid, hi, max_relative = 1e-5);
    }

    #[test]
    fn interval_complement_examples() {
        assert_relative_eq!(interval_complement_energy(1.0, s(0.25)).unwrap().value, 8.0, max_relative = 1e-14);
        assert_relative_eq!(interval_complement_energy(4.0, s(0.25)).unwrap().value, 16.0, max_relative = 1e-14);
        assert_relative_eq!(interval_complement_energy(1.0, s(0.1)).unwrap().value, 12.5, max_relative = 1e-14);
        assert!(interval_complement_energy(1.0, s(0.5)).is_err());
    }

    #[test]
    fn box_box_far_field() {
        let a = AxisBox::new_2d((-0.5, 0.5), (-0.5, 0.5)).unwrap();
        let b = AxisBox::new_2d((99.5, 100.5), (-0.5, 0.5)).unwrap();
        let e = box_box_energy(&a, &b, s(0.25)).unwrap().value;
        assert_relative_eq!(e, 100f64.powf(-2.5), max_relative = 0.05);
        let e2 = box_box_energy(&b, &a, s(0.25)).unwrap().value;
        assert_relative_eq!(e, e2, max_relative = 1e-12);
    }

    #[test]
    fn box_box_rejects_overlap() {
        let a = AxisBox::new_2d((0.0, 2.0), (0.0, 1.0)).unwrap();
        let b = AxisBox::new_2d((1.0, 3.0), (0.0, 1.0)).unwrap();
        assert!(matches!(box_box_energy(&a, &b, s(0.25)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rect_perimeter_scaling() {
        let p1 = rect_perimeter_s(1.0, 1.0, s(0.25)).unwrap().value;
        let p2 = rect_perimeter_s(2.0, 2.0, s(0.25)).unwrap().value;
        assert_relative_eq!(p2, 2f64.powf(1.5) * p1, max_relative = 1e-6);
        assert!(matches!(rect_perimeter_s(1.0, 1.0, s(0.5)), Err(Error::Divergent(_))));
    }

    #[test]
    fn rect_perimeter_lateral_rate() {
        let c = angular_constant(s(0.25));
        let h = 256.0;
        let p = rect_perimeter_s(1.0, h, s(0.25)).unwrap().value;
        let rate = 2.0 * c / 0.5;
        assert!((rate - 19.1702).abs() < 1e-3);
        assert_relative_eq!(p / h, rate, max_relative = 0.02);
    }

    #[test]
    fn ball_scaling_and_blowup() {
        let p1 = ball_perimeter_s(s(0.25)).unwrap().value;
        let p3 = ball_perimeter_radius(3.0, s(0.25)).unwrap().value;
        assert_relative_eq!(p3, 3f64.powf(1.5) * p1, max_relative = 1e-6);
        let vals: Vec<f64> =
            [0.40, 0.45, 0.49].iter().map(|&v| (1.0 - 2.0 * v) * ball_perimeter_s(s(v)).unwrap().value).collect();
        for w in vals.windows(2) {
            let r = w[1] / w[0];
            assert!((0.5..=2.0).contains(&r), "{vals:?}");
        }
    }
}
