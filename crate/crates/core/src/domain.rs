//! Axis-aligned boxes, finite box unions and one-dimensional interval unions.
//!
//! Boxes are open. A box union keeps the boxes exactly as given (`source`)
//! so that measure-zero slits between abutting boxes stay part of the
//! complement, and a normalized list of pairwise disjoint boxes used for
//! every measure-based computation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An open axis-aligned box in one or two dimensions.
///
/// One-dimensional boxes carry an unbounded second axis internally so that
/// the same coverage machinery serves both dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
}

impl AxisBox {
    pub fn new_1d(lo: f64, hi: f64) -> Result<Self> {
        Self::build(1, [lo, f64::NEG_INFINITY], [hi, f64::INFINITY])
    }

    pub fn new_2d(x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        Self::build(2, [x.0, y.0], [x.1, y.1])
    }

    /// The whole of `R^dim`.
    pub fn full_space(dim: usize) -> Self {
        AxisBox { dim, lo: [f64::NEG_INFINITY; 2], hi: [f64::INFINITY; 2] }
    }

    fn build(dim: usize, lo: [f64; 2], hi: [f64; 2]) -> Result<Self> {
        for k in 0..2 {
            if lo[k].is_nan() || hi[k].is_nan() || !(lo[k] < hi[k]) {
                return Err(Error::InvalidArgument(format!(
                    "box axis {k} needs lower < upper, got ({}, {})",
                    lo[k], hi[k]
                )));
            }
            if lo[k] == f64::INFINITY || hi[k] == f64::NEG_INFINITY {
                return Err(Error::InvalidArgument("box bound on the wrong side of infinity".into()));
            }
        }
        Ok(AxisBox { dim, lo, hi })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }
    #[inline]
    pub fn lo(&self, axis: usize) -> f64 {
        self.lo[axis]
    }
    #[inline]
    pub fn hi(&self, axis: usize) -> f64 {
        self.hi[axis]
    }
    #[inline]
    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn is_finite(&self) -> bool {
        (0..self.dim).all(|k| self.lo[k].is_finite() && self.hi[k].is_finite())
    }

    pub fn is_full_space(&self) -> bool {
        (0..self.dim).all(|k| self.lo[k] == f64::NEG_INFINITY && self.hi[k] == f64::INFINITY)
    }

    /// Lebesgue measure (length in 1D, area in 2D); may be infinite.
    pub fn measure(&self) -> f64 {
        (0..self.dim).map(|k| self.width(k)).product()
    }

    pub fn center(&self) -> [f64; 2] {
        [0.5 * (self.lo[0] + self.hi[0]), 0.5 * (self.lo[1] + self.hi[1])]
    }

    pub fn contains_point(&self, p: [f64; 2]) -> bool {
        (0..self.dim).all(|k| self.lo[k] < p[k] && p[k] < self.hi[k])
    }

    /// Closed containment of `other` in this box (both open, so equality of
    /// bounds is allowed).
    pub fn contains_box(&self, other: &AxisBox) -> bool {
        (0..self.dim).all(|k| self.lo[k] <= other.lo[k] && other.hi[k] <= self.hi[k])
    }

    /// True when the interiors intersect in a set of positive measure.
    pub fn overlaps(&self, other: &AxisBox) -> bool {
        (0..self.dim).all(|k| self.lo[k].max(other.lo[k]) < self.hi[k].min(other.hi[k]))
    }

    pub fn intersection(&self, other: &AxisBox) -> Option<AxisBox> {
        if !self.overlaps(other) {
            return None;
        }
        let mut lo = self.lo;
        let mut hi = self.hi;
        for k in 0..2 {
            lo[k] = lo[k].max(other.lo[k]);
            hi[k] = hi[k].min(other.hi[k]);
        }
        Some(AxisBox { dim: self.dim, lo, hi })
    }

    /// Euclidean distance from `p` to the closed box.
    pub fn distance_to(&self, p: [f64; 2]) -> f64 {
        let mut d2 = 0.0;
        for k in 0..self.dim {
            let d = (self.lo[k] - p[k]).max(p[k] - self.hi[k]).max(0.0);
            d2 += d * d;
        }
        d2.sqrt()
    }

    /// Distance between two closed boxes.
    pub fn gap_to(&self, other: &AxisBox) -> f64 {
        let mut d2 = 0.0;
        for k in 0..self.dim {
            let d = (self.lo[k] - other.hi[k]).max(other.lo[k] - self.hi[k]).max(0.0);
            d2 += d * d;
        }
        d2.sqrt()
    }

    pub fn translated(&self, v: [f64; 2]) -> AxisBox {
        let mut b = *self;
        for k in 0..self.dim {
            b.lo[k] += v[k];
            b.hi[k] += v[k];
        }
        b
    }

    /// Dilation about the origin by `t > 0`.
    pub fn scaled(&self, t: f64) -> AxisBox {
        let mut b = *self;
        for k in 0..self.dim {
            b.lo[k] *= t;
            b.hi[k] *= t;
        }
        b
    }

    /// Rotation by +90 degrees: `(x, y) -> (-y, x)`. 2D only.
    pub fn rotated90(&self) -> AxisBox {
        debug_assert_eq!(self.dim, 2);
        AxisBox { dim: 2, lo: [-self.hi[1], self.lo[0]], hi: [-self.lo[1], self.hi[0]] }
    }

    /// Parameter interval `{t : p + t d in box}`, empty as `None`.
    pub fn clip_line(&self, p: [f64; 2], d: [f64; 2]) -> Option<(f64, f64)> {
        let mut t0 = f64::NEG_INFINITY;
        let mut t1 = f64::INFINITY;
        for k in 0..self.dim {
            if d[k] == 0.0 {
                if !(self.lo[k] < p[k] && p[k] < self.hi[k]) {
                    return None;
                }
            } else {
                let a = (self.lo[k] - p[k]) / d[k];
                let b = (self.hi[k] - p[k]) / d[k];
                let (a, b) = if a < b { (a, b) } else { (b, a) };
                t0 = t0.max(a);
                t1 = t1.min(b);
            }
        }
        (t0 < t1).then_some((t0, t1))
    }
}

/// Sorted, pairwise disjoint open intervals on the real line.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    /// Build from arbitrary open intervals; overlapping ones are merged,
    /// touching ones (sharing only an endpoint) are kept apart.
    pub fn from_open(mut raw: Vec<(f64, f64)>) -> Self {
        raw.retain(|(a, b)| a < b);
        raw.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match out.last_mut() {
                Some(last) if a < last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        IntervalUnion { intervals: out }
    }

    /// Validating constructor for already sorted disjoint input.
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !(a < b) {
                return Err(Error::InvalidArgument(format!("interval {i}: need a < b, got ({a}, {b})")));
            }
            if i > 0 && intervals[i - 1].1 > a {
                return Err(Error::InvalidArgument(format!("intervals {} and {i} overlap", i - 1)));
            }
        }
        Ok(IntervalUnion { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    /// The same set up to measure zero, with touching intervals joined.
    pub fn merged_touching(&self) -> IntervalUnion {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.intervals.len());
        for &(a, b) in &self.intervals {
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        IntervalUnion { intervals: out }
    }

    pub fn max_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).fold(0.0, f64::max)
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals.iter().all(|(a, b)| a.is_finite() && b.is_finite())
    }

    pub fn shifted(&self, t: f64) -> IntervalUnion {
        IntervalUnion { intervals: self.intervals.iter().map(|(a, b)| (a + t, b + t)).collect() }
    }
}

/// Recipe metadata for domains built by a generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Generator {
    /// Truncated strip domain with shrinking gaps joined by a horizontal strip.
    Counterexample {
        beta: f64,
        k_max: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        offsets: Vec<f64>,
    },
    /// `count` vertical strips of `width` separated by `gap`, starting at x = 0.
    StripFamily { width: f64, gap: f64, count: usize },
}

/// A finite union of open boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxUnionDomain {
    dim: usize,
    source: Vec<AxisBox>,
    boxes: Vec<AxisBox>,
    generator: Option<Generator>,
}

impl BoxUnionDomain {
    pub fn new(dim: usize, source: Vec<AxisBox>) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidArgument(format!("dimension must be 1 or 2, got {dim}")));
        }
        if let Some(b) = source.iter().find(|b| b.dim != dim) {
            return Err(Error::InvalidArgument(format!("box of dimension {} in a {dim}-dimensional domain", b.dim)));
        }
        let boxes = normalize(&source);
        Ok(BoxUnionDomain { dim, source, boxes, generator: None })
    }

    pub fn with_generator(mut self, g: Generator) -> Self {
        self.generator = Some(g);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Boxes as supplied; their union is the exact point set.
    pub fn source(&self) -> &[AxisBox] {
        &self.source
    }

    /// Normalized pairwise disjoint boxes (equal to the union up to measure zero).
    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.boxes.iter().map(AxisBox::measure).sum()
    }

    pub fn is_bounded(&self) -> bool {
        self.boxes.iter().all(AxisBox::is_finite)
    }

    pub fn contains_point(&self, p: [f64; 2]) -> bool {
        self.source.iter().any(|b| b.contains_point(p))
    }

    /// Some single source box contains `b`.
    pub fn contains_box(&self, b: &AxisBox) -> bool {
        self.source.iter().any(|s| s.contains_box(b))
    }

    /// `b` is covered by the domain up to a null set.
    pub fn covers_box(&self, b: &AxisBox) -> bool {
        if !b.is_finite() {
            return self.boxes.iter().any(|s| s.contains_box(b));
        }
        let covered: f64 = self.boxes.iter().filter_map(|s| s.intersection(b)).map(|i| i.measure()).sum();
        covered >= b.measure() * (1.0 - 1e-12)
    }

    pub fn bounding_box(&self) -> Option<AxisBox> {
        let first = self.boxes.first()?;
        let mut lo = first.lo;
        let mut hi = first.hi;
        for b in &self.boxes[1..] {
            for k in 0..2 {
                lo[k] = lo[k].min(b.lo[k]);
                hi[k] = hi[k].max(b.hi[k]);
            }
        }
        Some(AxisBox { dim: self.dim, lo, hi })
    }

    pub fn translated(&self, v: [f64; 2]) -> BoxUnionDomain {
        self.map_boxes(|b| b.translated(v))
    }

    pub fn scaled(&self, t: f64) -> BoxUnionDomain {
        self.map_boxes(|b| b.scaled(t))
    }

    pub fn rotated90(&self) -> BoxUnionDomain {
        self.map_boxes(|b| b.rotated90())
    }

    fn map_boxes(&self, f: impl Fn(&AxisBox) -> AxisBox) -> BoxUnionDomain {
        let source: Vec<AxisBox> = self.source.iter().map(&f).collect();
        BoxUnionDomain { dim: self.dim, boxes: normalize(&source), source, generator: None }
    }

    /// `{t : base + t * direction in domain}` as an exact interval union.
    pub fn slice(&self, base: [f64; 2], direction: [f64; 2]) -> Result<IntervalUnion> {
        let d = if self.dim == 1 { [direction[0], 0.0] } else { direction };
        let norm = (d[0] * d[0] + d[1] * d[1]).sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero direction vector".into()));
        }
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("direction must be a unit vector, |d| = {norm}")));
        }
        let raw = self.source.iter().filter_map(|b| b.clip_line(base, d)).collect();
        Ok(IntervalUnion::from_open(raw))
    }

    pub(crate) fn cover(&self) -> CoverGrid {
        CoverGrid::new(&self.source)
    }
}

fn sorted_coords(boxes: &[AxisBox], axis: usize) -> Vec<f64> {
    let mut c: Vec<f64> = boxes.iter().flat_map(|b| [b.lo[axis], b.hi[axis]]).collect();
    c.push(f64::NEG_INFINITY);
    c.push(f64::INFINITY);
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

/// Split boxes on the coordinate grid of all their edges, then merge covered
/// cells into maximal x-runs per row and stack identical runs of adjacent
/// rows. Output sorted by (lower x, lower y).
fn normalize(source: &[AxisBox]) -> Vec<AxisBox> {
    if source.is_empty() {
        return Vec::new();
    }
    let dim = source[0].dim;
    let grid = CoverGrid::new(source);
    let nx = grid.xs.len() - 1;
    let ny = grid.ys.len() - 1;
    let mut open: Vec<AxisBox> = Vec::new();
    let mut done: Vec<AxisBox> = Vec::new();
    for j in 0..ny {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut i = 0;
        while i < nx {
            if grid.cell(i, j) {
                let start = i;
                while i < nx && grid.cell(i, j) {
                    i += 1;
                }
                runs.push((start, i));
            } else {
                i += 1;
            }
        }
        let (y0, y1) = (grid.ys[j], grid.ys[j + 1]);
        let mut next_open = Vec::with_capacity(runs.len());
        for (a, b) in runs {
            let (x0, x1) = (grid.xs[a], grid.xs[b]);
            if let Some(pos) = open.iter().position(|o| o.lo[0] == x0 && o.hi[0] == x1 && o.hi[1] == y0) {
                let mut o = open.swap_remove(pos);
                o.hi[1] = y1;
                next_open.push(o);
            } else {
                next_open.push(AxisBox { dim, lo: [x0, y0], hi: [x1, y1] });
            }
        }
        done.append(&mut open);
        open = next_open;
    }
    done.append(&mut open);
    done.sort_by(|p, q| p.lo[0].total_cmp(&q.lo[0]).then(p.lo[1].total_cmp(&q.lo[1])));
    done
}

/// Coverage of the coordinate grid spanned by a set of open boxes: every
/// open cell, open edge segment and vertex is tagged as inside the union or
/// not. The grid always reaches +-infinity, so it tiles the whole plane.
#[derive(Debug, Clone)]
pub(crate) struct CoverGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    cells: Vec<bool>,
    // vertical edge x = xs[i], y in (ys[j], ys[j+1])
    vedges: Vec<bool>,
    // horizontal edge y = ys[j], x in (xs[i], xs[i+1])
    hedges: Vec<bool>,
    verts: Vec<bool>,
}

impl CoverGrid {
    pub fn new(source: &[AxisBox]) -> Self {
        let xs = sorted_coords(source, 0);
        let ys = sorted_coords(source, 1);
        let nx = xs.len() - 1;
        let ny = ys.len() - 1;
        let mut g = CoverGrid {
            cells: vec![false; nx * ny],
            vedges: vec![false; (nx + 1) * ny],
            hedges: vec![false; nx * (ny + 1)],
            verts: vec![false; (nx + 1) * (ny + 1)],
            xs,
            ys,
        };
        for b in source {
            let i0 = g.xs.partition_point(|&x| x < b.lo[0]);
            let i1 = g.xs.partition_point(|&x| x < b.hi[0]);
            let j0 = g.ys.partition_point(|&y| y < b.lo[1]);
            let j1 = g.ys.partition_point(|&y| y < b.hi[1]);
            // cells i0..i1, vertices/edges strictly inside at indices i0+1..i1
            for j in j0..j1 {
                for i in i0..i1 {
                    g.cells[j * nx + i] = true;
                }
                for i in (i0 + 1)..i1 {
                    g.vedges[j * (nx + 1) + i] = true;
                }
            }
            for j in (j0 + 1)..j1 {
                for i in i0..i1 {
                    g.hedges[j * nx + i] = true;
                }
                for i in (i0 + 1)..i1 {
                    g.verts[j * (nx + 1) + i] = true;
                }
            }
        }
        g
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.xs.len() - 1
    }
    #[inline]
    pub fn ny(&self) -> usize {
        self.ys.len() - 1
    }
    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> bool {
        self.cells[j * self.nx() + i]
    }

    pub fn cell_box(&self, i: usize, j: usize, dim: usize) -> AxisBox {
        AxisBox { dim, lo: [self.xs[i], self.ys[j]], hi: [self.xs[i + 1], self.ys[j + 1]] }
    }

    /// Exact membership of a point in the open union.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let locate = |cs: &[f64], v: f64| -> (usize, bool) {
            let k = cs.partition_point(|&c| c < v);
            if k < cs.len() && cs[k] == v {
                (k, true)
            } else {
                (k - 1, false)
            }
        };
        let (i, on_x) = locate(&self.xs, p[0]);
        let (j, on_y) = locate(&self.ys, p[1]);
        let nx = self.nx();
        match (on_x, on_y) {
            (false, false) => self.cells[j * nx + i],
            (true, false) => self.vedges[j * (nx + 1) + i],
            (false, true) => self.hedges[j * nx + i],
            (true, true) => self.verts[j * (nx + 1) + i],
        }
    }

    /// Uncovered closed cells (the complement of the interior of the closure).
    pub fn uncovered_cells(&self, dim: usize) -> Vec<AxisBox> {
        let mut out = Vec::new();
        for j in 0..self.ny() {
            for i in 0..self.nx() {
                if !self.cell(i, j) {
                    out.push(self.cell_box(i, j, dim));
                }
            }
        }
        out
    }

    /// Every uncovered grid element as a closed (possibly degenerate) box.
    pub fn uncovered_elements(&self, dim: usize) -> Vec<[[f64; 2]; 2]> {
        let nx = self.nx();
        let ny = self.ny();
        let mut out: Vec<[[f64; 2]; 2]> = self.uncovered_cells(dim).iter().map(|b| [b.lo, b.hi]).collect();
        // Finite-coordinate edges only; the sentinels at infinity hold none.
        for j in 0..ny {
            for i in 1..nx {
                if !self.vedges[j * (nx + 1) + i] {
                    out.push([[self.xs[i], self.ys[j]], [self.xs[i], self.ys[j + 1]]]);
                }
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                if !self.hedges[j * nx + i] {
                    out.push([[self.xs[i], self.ys[j]], [self.xs[i + 1], self.ys[j]]]);
                }
            }
            for i in 1..nx {
                if !self.verts[j * (nx + 1) + i] {
                    out.push([[self.xs[i], self.ys[j]], [self.xs[i], self.ys[j]]]);
                }
            }
        }
        if dim == 1 {
            // A 1D domain ignores the auxiliary axis entirely.
            out.retain(|e| e[0][1] == f64::NEG_INFINITY && e[1][1] == f64::INFINITY);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn strip(a: f64, b: f64) -> AxisBox {
        AxisBox::new_2d((a, b), (-INF, INF)).unwrap()
    }

    #[test]
    fn box_validation() {
        assert!(AxisBox::new_2d((1.0, 0.0), (0.0, 1.0)).is_err());
        assert!(AxisBox::new_2d((0.0, 0.0), (0.0, 1.0)).is_err());
        assert!(AxisBox::new_1d(INF, INF).is_err());
        assert!(AxisBox::full_space(2).is_full_space());
    }

    #[test]
    fn slice_examples() {
        let d = BoxUnionDomain::new(2, vec![strip(0.0, 1.0)]).unwrap();
        let up = d.slice([0.5, 0.0], [0.0, 1.0]).unwrap();
        assert_eq!(up.intervals(), &[(-INF, INF)]);
        let across = d.slice([0.0, 0.0], [1.0, 0.0]).unwrap();
        assert_eq!(across.intervals(), &[(0.0, 1.0)]);
        let two = BoxUnionDomain::new(2, vec![strip(0.0, 1.0), strip(2.0, 3.0)]).unwrap();
        let s = two.slice([0.0, 0.0], [1.0, 0.0]).unwrap();
        assert_eq!(s.intervals(), &[(0.0, 1.0), (2.0, 3.0)]);
    }

    #[test]
    fn slice_rejects_bad_direction() {
        let d = BoxUnionDomain::new(2, vec![strip(0.0, 1.0)]).unwrap();
        assert!(matches!(d.slice([0.0, 0.0], [0.0, 0.0]), Err(Error::InvalidArgument(_))));
        assert!(d.slice([0.0, 0.0], [1.0, 1.0]).is_err());
    }

    #[test]
    fn touching_slices_stay_apart() {
        let d = BoxUnionDomain::new(2, vec![strip(0.0, 1.0), strip(1.0, 2.0)]).unwrap();
        let s = d.slice([0.0, 0.0], [1.0, 0.0]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.merged_touching().intervals(), &[(0.0, 2.0)]);
    }

    #[test]
    fn normalization_splits_overlaps() {
        let a = AxisBox::new_2d((0.0, 2.0), (0.0, 1.0)).unwrap();
        let b = AxisBox::new_2d((1.0, 3.0), (0.0, 2.0)).unwrap();
        let d = BoxUnionDomain::new(2, vec![a, b]).unwrap();
        let bx = d.boxes();
        for (i, p) in bx.iter().enumerate() {
            for q in &bx[i + 1..] {
                assert!(!p.overlaps(q));
            }
        }
        assert!((d.measure() - 5.0).abs() < 1e-15);
        let again = BoxUnionDomain::new(2, bx.to_vec()).unwrap();
        assert_eq!(again.boxes(), bx);
    }

    #[test]
    fn cover_grid_sees_slits() {
        let d = BoxUnionDomain::new(2, vec![strip(0.0, 1.0), strip(1.0, 2.0)]).unwrap();
        let g = d.cover();
        assert!(g.contains([0.5, 3.0]));
        assert!(!g.contains([1.0, 3.0]));
        assert!(!g.contains([2.5, 0.0]));
        // one slit edge plus the two outer half-planes' worth of cells/edges
        assert!(g.uncovered_elements(2).iter().any(|e| e[0][0] == 1.0 && e[1][0] == 1.0));
    }

    #[test]
    fn rotation_and_translation() {
        let b = AxisBox::new_2d((0.0, 2.0), (1.0, 4.0)).unwrap();
        let r = b.rotated90();
        assert_eq!((r.lo(0), r.hi(0), r.lo(1), r.hi(1)), (-4.0, -1.0, 0.0, 2.0));
        let t = b.translated([1.0, -1.0]);
        assert_eq!((t.lo(0), t.lo(1)), (1.0, 0.0));
    }
}
