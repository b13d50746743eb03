//! Sufficient conditions for a positive Poincaré constant (complement
//! density, uniform one-dimensional slices) and upper bounds from large
//! inscribed balls.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants;
use crate::domain::{AxisBox, BoxUnionDomain, IntervalUnion};
use crate::error::{Error, Result};
use crate::kernels::ball_perimeter_s;
use crate::order::FracOrder;
use crate::quad::GaussRule;
use crate::radius::{extended_inscribed_radius, inscribed_radius};

const DENSITY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Smallest complement mass seen in a ball of radius `radius`.
    Density {
        radius: f64,
        c_min: f64,
        center: [f64; 2],
    },
    /// Longest component of an interval union.
    Interval {
        max_length: f64,
        interval: (f64, f64),
    },
    /// Longest slice component over all sampled lines.
    Lines {
        arc_length: f64,
        directions: usize,
        max_length: f64,
        direction: [f64; 2],
        base: [f64; 2],
    },
    /// A sampled line whose slice has an unbounded component.
    UnboundedSlice {
        direction: [f64; 2],
        base: [f64; 2],
        component: (f64, f64),
    },
    Ball {
        radius: f64,
        center: [f64; 2],
        error_bound: f64,
        extended: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Lower bound on `P²` for the sufficient checks, upper bound for the
    /// necessary ones.
    pub bound: Option<f64>,
}

/// Area of `{|p - c| < r} ∩ b` (length in 1D).
pub fn ball_box_measure(c: [f64; 2], r: f64, b: &AxisBox) -> f64 {
    if b.dim() == 1 {
        let lo = b.lo(0).max(c[0] - r);
        let hi = b.hi(0).min(c[0] + r);
        return (hi - lo).max(0.0);
    }
    let x0 = (b.lo(0) - c[0]).max(-r);
    let x1 = (b.hi(0) - c[0]).min(r);
    if x0 >= x1 {
        return 0.0;
    }
    let (y0, y1) = (b.lo(1) - c[1], b.hi(1) - c[1]);
    // x = r sin θ; the chord clipped to [y0, y1] is smooth between breaks
    let mut th = vec![(x0 / r).clamp(-1.0, 1.0).asin(), (x1 / r).clamp(-1.0, 1.0).asin()];
    for y in [y0, y1] {
        if y.abs() < r {
            let x = (r * r - y * y).sqrt();
            for xb in [-x, x] {
                if xb > x0 && xb < x1 {
                    th.push((xb / r).asin());
                }
            }
        }
    }
    th.sort_by(f64::total_cmp);
    let rule = GaussRule::new(16);
    th.windows(2)
        .map(|w| {
            rule.integrate(
                |t| {
                    let h = r * t.cos();
                    let len = (y1.min(h) - y0.max(-h)).max(0.0);
                    len * h
                },
                w[0],
                w[1],
            )
        })
        .sum()
}

/// `|Ω ∩ B(c, r)|`, exact up to quadrature roundoff.
pub fn domain_ball_measure(domain: &BoxUnionDomain, c: [f64; 2], r: f64) -> f64 {
    domain.boxes().iter().map(|b| ball_box_measure(c, r, b)).sum()
}

fn ball_measure(dim: usize, r: f64) -> f64 {
    if dim == 1 {
        2.0 * r
    } else {
        std::f64::consts::PI * r * r
    }
}

/// Minimum of `|Ωᶜ ∩ B(x, R)|` over a `grid × grid` lattice of centers in `Ω ∩ window`.
pub fn check_complement_density(
    domain: &BoxUnionDomain,
    radius: f64,
    window: &AxisBox,
    grid: usize,
    s: FracOrder,
) -> Result<ConditionReport> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if !window.is_finite() || window.dim() != domain.dim() {
        return Err(Error::InvalidArgument("window must be finite and match the domain dimension".into()));
    }
    if grid == 0 {
        return Err(Error::InvalidArgument("grid must be positive".into()));
    }
    let dim = domain.dim();
    let ny = if dim == 2 { grid } else { 1 };
    let centers: Vec<[f64; 2]> = (0..grid)
        .flat_map(|i| (0..ny).map(move |j| (i, j)))
        .map(|(i, j)| {
            let x = window.lo(0) + (i as f64 + 0.5) * window.width(0) / grid as f64;
            let y = if dim == 2 { window.lo(1) + (j as f64 + 0.5) * window.width(1) / grid as f64 } else { 0.0 };
            [x, y]
        })
        .filter(|&p| domain.contains_point(p))
        .collect();
    if centers.is_empty() {
        return Err(Error::Domain("no lattice center of the window lies in the domain".into()));
    }
    let full = ball_measure(dim, radius);
    let (c_min, center) =
        centers.par_iter().map(|&p| ((full - domain_ball_measure(domain, p, radius)).max(0.0), p)).reduce(
            || (f64::INFINITY, [f64::INFINITY; 2]),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && (b.1[0], b.1[1]) < (a.1[0], a.1[1])) { b } else { a },
        );
    let witness = Some(Witness::Density { radius, c_min, center });
    if c_min > DENSITY_RTOL * full {
        Ok(ConditionReport {
            verdict: Verdict::Holds,
            witness,
            bound: Some(c_min / radius.powf(s.kernel_exponent(dim))),
        })
    } else {
        Ok(ConditionReport { verdict: Verdict::Inconclusive, witness, bound: None })
    }
}

/// One-dimensional lower bound `p1_unit · M^{-2s}` with `M` the longest component.
pub fn interval_union_lower_bound(u: &IntervalUnion, s: FracOrder, p1_unit: f64) -> Result<ConditionReport> {
    s.require_super("the interval-union lower bound")?;
    if !(p1_unit > 0.0) {
        return Err(Error::InvalidArgument(format!("p1_unit must be positive, got {p1_unit}")));
    }
    if u.is_empty() {
        return Err(Error::InvalidArgument("empty interval union".into()));
    }
    if let Some(&iv) = u.intervals().iter().find(|(a, b)| !(a.is_finite() && b.is_finite())) {
        return Ok(ConditionReport {
            verdict: Verdict::Fails,
            witness: Some(Witness::Interval { max_length: f64::INFINITY, interval: iv }),
            bound: None,
        });
    }
    let iv = longest(u);
    let m = iv.1 - iv.0;
    Ok(ConditionReport {
        verdict: Verdict::Holds,
        witness: Some(Witness::Interval { max_length: m, interval: iv }),
        bound: Some(p1_unit * m.powf(-2.0 * s.value())),
    })
}

fn longest(u: &IntervalUnion) -> (f64, f64) {
    u.intervals().iter().copied().fold((0.0, 0.0), |best, iv| if iv.1 - iv.0 > best.1 - best.0 { iv } else { best })
}

/// Unit directions with quadrature weights approximating an arc of the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    pub directions: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub arc_length: f64,
}

impl DirectionSet {
    pub fn new(directions: Vec<[f64; 2]>, weights: Vec<f64>, arc_length: f64) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidArgument("empty direction set".into()));
        }
        if directions.len() != weights.len() {
            return Err(Error::InvalidArgument("one weight per direction".into()));
        }
        for d in &directions {
            let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
            if (n - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("direction {d:?} is not a unit vector")));
            }
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || !(arc_length >= 0.0) {
            return Err(Error::InvalidArgument("weights and arc length must be nonnegative".into()));
        }
        Ok(DirectionSet { directions, weights, arc_length })
    }

    /// `count` equally spaced angles on `[a, b]` with trapezoid weights.
    pub fn arc(a: f64, b: f64, count: usize) -> Result<Self> {
        if count == 0 || !(a <= b) || !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad arc [{a}, {b}] with {count} samples")));
        }
        if count == 1 {
            return DirectionSet::new(vec![[a.cos(), a.sin()]], vec![b - a], b - a);
        }
        let h = (b - a) / (count - 1) as f64;
        let angles: Vec<f64> = (0..count).map(|i| a + h * i as f64).collect();
        let weights = (0..count).map(|i| if i == 0 || i == count - 1 { 0.5 * h } else { h }).collect();
        DirectionSet::new(angles.iter().map(|t| [t.cos(), t.sin()]).collect(), weights, b - a)
    }

    pub fn rotated90(&self) -> DirectionSet {
        DirectionSet {
            directions: self.directions.iter().map(|d| [-d[1], d[0]]).collect(),
            weights: self.weights.clone(),
            arc_length: self.arc_length,
        }
    }
}

enum LineScan {
    Bounded { max_length: f64, direction: [f64; 2], base: [f64; 2] },
    Unbounded { direction: [f64; 2], base: [f64; 2], component: (f64, f64) },
    Empty,
}

fn scan_direction(domain: &BoxUnionDomain, d: [f64; 2], window: &AxisBox, samples: usize) -> Result<LineScan> {
    let nu = [-d[1], d[0]];
    let corners = [
        [window.lo(0), window.lo(1)],
        [window.hi(0), window.lo(1)],
        [window.lo(0), window.hi(1)],
        [window.hi(0), window.hi(1)],
    ];
    let proj: Vec<f64> = corners.iter().map(|c| c[0] * nu[0] + c[1] * nu[1]).collect();
    let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut best = LineScan::Empty;
    let mut best_len = f64::NEG_INFINITY;
    for i in 0..samples {
        let p = lo + (i as f64 + 0.5) * (hi - lo) / samples as f64;
        let base = [p * nu[0], p * nu[1]];
        let slice = domain.slice(base, d)?;
        if let Some(&component) = slice.intervals().iter().find(|(a, b)| !(a.is_finite() && b.is_finite())) {
            return Ok(LineScan::Unbounded { direction: d, base, component });
        }
        let m = slice.max_length();
        if !slice.is_empty() && m > best_len {
            best_len = m;
            best = LineScan::Bounded { max_length: m, direction: d, base };
        }
    }
    Ok(best)
}

/// Uniform one-dimensional slices along an arc of directions; needs `s > 1/2`.
pub fn check_ls(
    domain: &BoxUnionDomain,
    directions: &DirectionSet,
    s: FracOrder,
    line_samples: usize,
    window: &AxisBox,
) -> Result<ConditionReport> {
    s.require_super("the uniform slice condition")?;
    if directions.directions.is_empty() {
        return Err(Error::InvalidArgument("empty direction set".into()));
    }
    if line_samples == 0 || !window.is_finite() || domain.dim() != 2 || window.dim() != 2 {
        return Err(Error::InvalidArgument("need a 2D domain, a finite 2D window and line samples".into()));
    }
    let p1 = constants::p1_unit(s)?;
    let scans = directions
        .directions
        .par_iter()
        .map(|&d| scan_direction(domain, d, window, line_samples))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(f64, [f64; 2], [f64; 2])> = None;
    for scan in scans {
        match scan {
            LineScan::Unbounded { direction, base, component } => {
                return Ok(ConditionReport {
                    verdict: Verdict::Fails,
                    witness: Some(Witness::UnboundedSlice { direction, base, component }),
                    bound: None,
                });
            }
            LineScan::Bounded { max_length, direction, base } => {
                if best.map_or(true, |b| max_length > b.0) {
                    best = Some((max_length, direction, base));
                }
            }
            LineScan::Empty => {}
        }
    }
    let (m, direction, base) = best.ok_or_else(|| Error::Domain("no sampled line meets the domain".into()))?;
    Ok(ConditionReport {
        verdict: Verdict::Holds,
        witness: Some(Witness::Lines {
            arc_length: directions.arc_length,
            directions: directions.directions.len(),
            max_length: m,
            direction,
            base,
        }),
        bound: Some(0.5 * directions.arc_length * p1 * m.powf(-2.0 * s.value())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallMode {
    PlainBall,
    ExtendedBall,
}

/// Upper bound on `P²` for a domain containing a ball of radius `r`.
pub fn necessary_bound_formula(mode: BallMode, s: FracOrder, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let decay = r.powf(-2.0 * s.value());
    match mode {
        BallMode::PlainBall => Ok(constants::lambda_ref(s)? * decay),
        BallMode::ExtendedBall => {
            s.require_sub("the extended ball bound")?;
            Ok(2.0 * ball_perimeter_s(s)?.value / std::f64::consts::PI * decay)
        }
    }
}

/// Largest (extended) inscribed ball of `Ω ∩ window`, turned into an upper bound.
pub fn necessary_upper_bound(
    domain: &BoxUnionDomain,
    mode: BallMode,
    window: &AxisBox,
    s: FracOrder,
    resolution: usize,
) -> Result<ConditionReport> {
    if mode == BallMode::ExtendedBall {
        s.require_sub("the extended ball bound")?;
    }
    if domain.dim() != 2 {
        return Err(Error::InvalidArgument("ball bounds are implemented for 2D domains".into()));
    }
    if !window.is_finite() || window.dim() != 2 {
        return Err(Error::InvalidArgument("window must be a finite 2D box".into()));
    }
    let whole = match mode {
        BallMode::PlainBall => domain.contains_box(window),
        BallMode::ExtendedBall => domain.covers_box(window),
    };
    let (radius, center, error_bound) = if whole {
        (0.5 * window.width(0).min(window.width(1)), window.center(), 0.0)
    } else {
        // balls must stay inside the window
        let clipped: Vec<AxisBox> = domain.source().iter().filter_map(|b| b.intersection(window)).collect();
        if clipped.is_empty() {
            return Err(Error::Domain("domain does not meet the window".into()));
        }
        let clipped = BoxUnionDomain::new(2, clipped)?;
        let r = match mode {
            BallMode::PlainBall => inscribed_radius(&clipped, window, resolution)?,
            BallMode::ExtendedBall => extended_inscribed_radius(&clipped, window, resolution)?,
        };
        (r.radius, r.center, r.error_bound)
    };
    if !(radius > 0.0) {
        return Ok(ConditionReport { verdict: Verdict::Inconclusive, witness: None, bound: None });
    }
    Ok(ConditionReport {
        verdict: Verdict::Holds,
        witness: Some(Witness::Ball { radius, center, error_bound, extended: mode == BallMode::ExtendedBall }),
        bound: Some(necessary_bound_formula(mode, s, radius)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const INF: f64 = f64::INFINITY;

    fn s(v: f64) -> FracOrder {
        FracOrder::new(v).unwrap()
    }

    fn dom(boxes: Vec<AxisBox>) -> BoxUnionDomain {
        BoxUnionDomain::new(2, boxes).unwrap()
    }

    #[test]
    fn ball_box_measure_cases() {
        let pi = std::f64::consts::PI;
        let all = AxisBox::full_space(2);
        assert_relative_eq!(ball_box_measure([0.0, 0.0], 2.0, &all), 4.0 * pi, max_relative = 1e-14);
        let half = AxisBox::new_2d((0.0, INF), (-INF, INF)).unwrap();
        assert_relative_eq!(ball_box_measure([0.0, 0.0], 1.0, &half), 0.5 * pi, max_relative = 1e-14);
        let quad = AxisBox::new_2d((0.0, INF), (0.0, INF)).unwrap();
        assert_relative_eq!(ball_box_measure([0.0, 0.0], 1.0, &quad), 0.25 * pi, max_relative = 1e-14);
        let inner = AxisBox::new_2d((-0.5, 0.5), (-0.5, 0.5)).unwrap();
        assert_relative_eq!(ball_box_measure([0.0, 0.0], 1.0, &inner), 1.0, max_relative = 1e-14);
        // disc segment beyond x = 0.5: r²acos(d/r) - d√(r²-d²)
        let seg = AxisBox::new_2d((0.5, INF), (-INF, INF)).unwrap();
        let want = (0.5f64).acos() - 0.5 * 0.75f64.sqrt();
        assert_relative_eq!(ball_box_measure([0.0, 0.0], 1.0, &seg), want, max_relative = 1e-13);
    }

    #[test]
    fn half_plane_deep_interior_inconclusive() {
        let d = dom(vec![AxisBox::new_2d((0.0, INF), (-INF, INF)).unwrap()]);
        let w = AxisBox::new_2d((9.0, 11.0), (-1.0, 1.0)).unwrap();
        let r = check_complement_density(&d, 1.0, &w, 8, s(0.25)).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.bound.is_none());
    }

    #[test]
    fn strip_density_holds() {
        let d = dom(vec![AxisBox::new_2d((0.0, 1.0), (-INF, INF)).unwrap()]);
        let w = AxisBox::new_2d((0.0, 1.0), (-2.0, 2.0)).unwrap();
        let r = check_complement_density(&d, 2.0, &w, 16, s(0.25)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let Some(Witness::Density { c_min, .. }) = r.witness else { panic!() };
        assert!(c_min >= 4.0 * std::f64::consts::PI - 4.0 - 1e-9);
        assert_relative_eq!(r.bound.unwrap(), c_min / 2f64.powf(2.5), max_relative = 1e-14);
    }

    #[test]
    fn density_window_outside_domain() {
        let d = dom(vec![AxisBox::new_2d((0.0, 1.0), (0.0, 1.0)).unwrap()]);
        let w = AxisBox::new_2d((5.0, 6.0), (5.0, 6.0)).unwrap();
        assert!(matches!(check_complement_density(&d, 1.0, &w, 4, s(0.25)), Err(Error::Domain(_))));
    }

    #[test]
    fn interval_bounds() {
        let u = IntervalUnion::new(vec![(0.0, 1.0), (3.0, 3.5)]).unwrap();
        let r = interval_union_lower_bound(&u, s(0.75), 2.0).unwrap();
        assert_eq!(r.bound, Some(2.0));
        let u = IntervalUnion::new(vec![(0.0, 2.0)]).unwrap();
        let r = interval_union_lower_bound(&u, s(0.75), 2.0).unwrap();
        assert_relative_eq!(r.bound.unwrap(), 2.0 * 2f64.powf(-1.5), max_relative = 1e-15);
        let u = IntervalUnion::new(vec![(-1.0, -0.5), (0.0, INF)]).unwrap();
        assert_eq!(interval_union_lower_bound(&u, s(0.75), 2.0).unwrap().verdict, Verdict::Fails);
        assert!(matches!(interval_union_lower_bound(&u, s(0.5), 2.0), Err(Error::OutOfRegime(_))));
    }

    #[test]
    fn arc_weights() {
        let d = DirectionSet::arc(0.0, 1.0, 5).unwrap();
        assert_relative_eq!(d.weights.iter().sum::<f64>(), 1.0, max_relative = 1e-15);
        assert_eq!(d.arc_length, 1.0);
        assert!(DirectionSet::new(vec![], vec![], 0.0).is_err());
    }

    #[test]
    fn ls_full_space_fails() {
        let d = dom(vec![AxisBox::full_space(2)]);
        let w = AxisBox::new_2d((-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let r = check_ls(&d, &DirectionSet::arc(0.0, 0.3, 4).unwrap(), s(0.75), 8, &w).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(matches!(r.witness, Some(Witness::UnboundedSlice { .. })));
    }

    #[test]
    fn ls_parallel_strips() {
        let d = dom((0..4)
            .map(|j| AxisBox::new_2d((3.0 * j as f64, 3.0 * j as f64 + 1.0), (-INF, INF)).unwrap())
            .collect());
        let w = AxisBox::new_2d((-1.0, 12.0), (-5.0, 5.0)).unwrap();
        let dirs = DirectionSet::new(vec![[1.0, 0.0]], vec![1.0], 1.0).unwrap();
        let r = check_ls(&d, &dirs, s(0.75), 16, &w).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let p1 = constants::p1_unit(s(0.75)).unwrap();
        assert_relative_eq!(r.bound.unwrap(), 0.5 * p1, max_relative = 1e-14);
        assert!(matches!(check_ls(&d, &dirs, s(0.25), 16, &w), Err(Error::OutOfRegime(_))));
    }

    #[test]
    fn necessary_square() {
        let d = dom(vec![AxisBox::new_2d((0.0, 1.0), (0.0, 1.0)).unwrap()]);
        let w = AxisBox::new_2d((0.0, 1.0), (0.0, 1.0)).unwrap();
        let r = necessary_upper_bound(&d, BallMode::PlainBall, &w, s(0.25), 32).unwrap();
        let want = constants::lambda_ref(s(0.25)).unwrap() * 0.5f64.powf(-0.5);
        assert_relative_eq!(r.bound.unwrap(), want, max_relative = 1e-14);
        assert!(matches!(
            necessary_upper_bound(&d, BallMode::ExtendedBall, &w, s(0.75), 32),
            Err(Error::OutOfRegime(_))
        ));
    }

    #[test]
    fn necessary_formula_scaling() {
        for mode in [BallMode::PlainBall, BallMode::ExtendedBall] {
            let a = necessary_bound_formula(mode, s(0.25), 3.0).unwrap();
            let b = necessary_bound_formula(mode, s(0.25), 6.0).unwrap();
            assert_relative_eq!(b / a, 2f64.powf(-0.5), max_relative = 1e-14);
        }
    }
}
