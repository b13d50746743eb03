//! Inscribed-ball radii of box unions over a finite search window.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{AxisBox, BoxUnionDomain};
use crate::error::{Error, Result};

const REFINE_ROUNDS: usize = 3;
const REFINE_FACTOR: usize = 4;

/// Largest inscribed radius found, its center and a one-sided error bound:
/// the true supremum over the window lies in `[radius, radius + error_bound]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub radius: f64,
    pub center: [f64; 2],
    pub error_bound: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Complement {
    /// Every point outside the open union, slits included.
    Plain,
    /// Only the positive-measure part: complement of the interior of the closure.
    Extended,
}

/// `sup dist(x, complement)` over `x` in the domain and in `window`.
pub fn inscribed_radius(domain: &BoxUnionDomain, window: &AxisBox, resolution: usize) -> Result<RadiusEstimate> {
    search(domain, window, resolution, Complement::Plain)
}

/// As [`inscribed_radius`], ignoring measure-zero parts of the complement.
pub fn extended_inscribed_radius(
    domain: &BoxUnionDomain,
    window: &AxisBox,
    resolution: usize,
) -> Result<RadiusEstimate> {
    search(domain, window, resolution, Complement::Extended)
}

struct DistanceField {
    dim: usize,
    elements: Vec<[[f64; 2]; 2]>,
    grid: crate::domain::CoverGrid,
}

impl DistanceField {
    fn value(&self, p: [f64; 2]) -> f64 {
        if !self.grid.contains(p) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for e in &self.elements {
            let mut d2 = 0.0;
            for k in 0..self.dim {
                let d = (e[0][k] - p[k]).max(p[k] - e[1][k]).max(0.0);
                d2 += d * d;
            }
            best = best.min(d2);
        }
        best.sqrt()
    }
}

fn better(a: (f64, [f64; 2]), b: (f64, [f64; 2])) -> (f64, [f64; 2]) {
    // larger value wins; ties go to the lexicographically smallest center
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if (a.1[0], a.1[1]) <= (b.1[0], b.1[1]) {
                a
            } else {
                b
            }
        }
    }
}

fn scan(field: &DistanceField, centers: Vec<[f64; 2]>) -> (f64, [f64; 2]) {
    centers.into_par_iter().map(|c| (field.value(c), c)).reduce(|| (f64::NEG_INFINITY, [f64::INFINITY; 2]), better)
}

fn lattice(lo: [f64; 2], step: f64, counts: [usize; 2], dim: usize) -> Vec<[f64; 2]> {
    let ny = if dim == 1 { 1 } else { counts[1] };
    let mut out = Vec::with_capacity(counts[0] * ny);
    for i in 0..counts[0] {
        for j in 0..ny {
            let y = if dim == 1 { 0.0 } else { lo[1] + step * j as f64 };
            out.push([lo[0] + step * i as f64, y]);
        }
    }
    out
}

fn search(domain: &BoxUnionDomain, window: &AxisBox, resolution: usize, mode: Complement) -> Result<RadiusEstimate> {
    let dim = domain.dim();
    if !window.is_finite() {
        return Err(Error::InvalidArgument("search window must be finite".into()));
    }
    if resolution < 8 {
        return Err(Error::InvalidArgument(format!("resolution must be >= 8, got {resolution}")));
    }
    if !domain.boxes().iter().any(|b| b.overlaps(window)) {
        return Err(Error::Domain("domain does not meet the search window".into()));
    }

    if let [single] = domain.source() {
        // A lone box: the answer is half its smallest side.
        let r = (0..dim).map(|k| 0.5 * single.width(k)).fold(f64::INFINITY, f64::min);
        let mut center = [0.0; 2];
        for (k, c) in center.iter_mut().enumerate().take(dim) {
            let (lo, hi) = (single.lo(k), single.hi(k));
            *c = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                _ => 0.5 * (window.lo(k).max(lo) + window.hi(k).min(hi)),
            };
        }
        if r.is_finite() {
            return Ok(RadiusEstimate { radius: r, center, error_bound: 0.0, exact: true });
        }
    }

    let grid = domain.cover();
    let elements = match mode {
        Complement::Plain => grid.uncovered_elements(dim),
        Complement::Extended => grid
            .uncovered_cells(dim)
            .iter()
            .map(|b| [[b.lo(0), b.lo(1)], [b.hi(0), b.hi(1)]])
            .filter(|e| dim == 2 || (e[0][1] == f64::NEG_INFINITY && e[1][1] == f64::INFINITY))
            .collect(),
    };
    let field = DistanceField { dim, elements, grid };

    let extent = (0..dim).map(|k| window.width(k)).fold(0.0, f64::max);
    let step = extent / resolution as f64;
    let counts = [
        (window.width(0) / step).round().max(1.0) as usize,
        if dim == 2 { (window.width(1) / step).round().max(1.0) as usize } else { 1 },
    ];
    let lo = [window.lo(0) + 0.5 * step, if dim == 2 { window.lo(1) + 0.5 * step } else { 0.0 }];
    let mut best = scan(&field, lattice(lo, step, counts, dim));
    if best.0.is_infinite() {
        return Err(Error::Domain("domain is the whole space inside the window".into()));
    }

    let mut h = step;
    for _ in 0..REFINE_ROUNDS {
        let fine = h / REFINE_FACTOR as f64;
        let n = 2 * REFINE_FACTOR + 1;
        let start = [best.1[0] - h, if dim == 2 { best.1[1] - h } else { 0.0 }];
        let centers: Vec<[f64; 2]> = lattice(start, fine, [n, n], dim)
            .into_iter()
            .filter(|c| (0..dim).all(|k| c[k] >= window.lo(k) && c[k] <= window.hi(k)))
            .collect();
        best = better(best, scan(&field, centers));
        h = fine;
    }

    let half_diag = 0.5 * step * (dim as f64).sqrt();
    Ok(RadiusEstimate { radius: best.0, center: best.1, error_bound: half_diag, exact: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn window(a: f64, b: f64) -> AxisBox {
        AxisBox::new_2d((a, b), (a, b)).unwrap()
    }

    #[test]
    fn strip_half_width() {
        let d = BoxUnionDomain::new(2, vec![AxisBox::new_2d((0.0, 1.0), (-INF, INF)).unwrap()]).unwrap();
        let r = inscribed_radius(&d, &window(-1.0, 2.0), 32).unwrap();
        assert_eq!(r.radius, 0.5);
    }

    #[test]
    fn unit_square() {
        let d = BoxUnionDomain::new(2, vec![AxisBox::new_2d((0.0, 1.0), (0.0, 1.0)).unwrap()]).unwrap();
        assert_eq!(inscribed_radius(&d, &window(-1.0, 2.0), 16).unwrap().radius, 0.5);
        assert_eq!(extended_inscribed_radius(&d, &window(-1.0, 2.0), 16).unwrap().radius, 0.5);
    }

    #[test]
    fn cross_of_strips() {
        let d = BoxUnionDomain::new(
            2,
            vec![
                AxisBox::new_2d((-0.5, 0.5), (-INF, INF)).unwrap(),
                AxisBox::new_2d((-INF, INF), (-0.5, 0.5)).unwrap(),
            ],
        )
        .unwrap();
        let r = inscribed_radius(&d, &window(-2.0, 2.0), 64).unwrap();
        let target = std::f64::consts::FRAC_1_SQRT_2;
        assert!(r.radius <= target + 1e-12);
        assert!(target - r.radius <= r.error_bound, "{r:?}");
        assert!(target - r.radius < 1e-3, "refinement should land close: {r:?}");
    }

    #[test]
    fn abutting_strips_plain_vs_extended() {
        let d = BoxUnionDomain::new(
            2,
            vec![AxisBox::new_2d((0.0, 1.0), (-INF, INF)).unwrap(), AxisBox::new_2d((1.0, 2.0), (-INF, INF)).unwrap()],
        )
        .unwrap();
        let w = window(-1.0, 3.0);
        let plain = inscribed_radius(&d, &w, 64).unwrap();
        let ext = extended_inscribed_radius(&d, &w, 64).unwrap();
        assert!((plain.radius - 0.5).abs() <= plain.error_bound.max(1e-9), "{plain:?}");
        assert!((ext.radius - 1.0).abs() <= 1e-3, "{ext:?}");
    }

    #[test]
    fn empty_window_is_domain_error() {
        let d = BoxUnionDomain::new(2, vec![AxisBox::new_2d((0.0, 1.0), (0.0, 1.0)).unwrap()]).unwrap();
        assert!(matches!(inscribed_radius(&d, &window(5.0, 6.0), 16), Err(Error::Domain(_))));
        assert!(inscribed_radius(&d, &window(-1.0, 2.0), 4).is_err());
    }
}
