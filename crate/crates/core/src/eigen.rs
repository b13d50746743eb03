//! Galerkin discretization of the fractional Dirichlet eigenproblem:
//! piecewise constants on rectangles (2D, `s < 1/2`), hats on intervals
//! (1D, all `s`), dense and subspace generalized eigensolvers, Richardson
//! ladders and the thin-rectangle asymptotics experiment.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{AxisBox, BoxUnionDomain, IntervalUnion};
use crate::error::{Error, Result};
use crate::kernels::{
    angular_constant, box_box_energy, interval_complement_energy, interval_interval_energy, rect_perimeter_s,
};
use crate::order::FracOrder;
use crate::quad::GaussRule;

/// Largest problem handed to the dense eigensolver.
pub const DENSE_LIMIT: usize = 4096;
/// Cell budget per domain in the asymptotics experiment.
pub const CELL_BUDGET: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElementOrder {
    P0,
    P1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormMode {
    /// Double integral over the whole space.
    Full,
    /// Double integral over the domain only.
    Regional,
}

/// Tensor grid on a finite bounding box. For P1 the first count is the
/// number of elements per interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub counts: [usize; 2],
    pub bbox: AxisBox,
    pub order: ElementOrder,
}

impl GridSpec {
    pub fn p0(bbox: AxisBox, counts: [usize; 2]) -> Result<Self> {
        let g = GridSpec { counts, bbox, order: ElementOrder::P0 };
        g.validate()?;
        Ok(g)
    }

    pub fn p1(bbox: AxisBox, elements: usize) -> Result<Self> {
        let g = GridSpec { counts: [elements, 1], bbox, order: ElementOrder::P1 };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !self.bbox.is_finite() {
            return Err(Error::InvalidArgument("grid bounding box must be finite".into()));
        }
        let axes = if self.order == ElementOrder::P1 { 1 } else { self.bbox.dim() };
        if self.counts[..axes].iter().any(|&c| c < 4) {
            return Err(Error::InvalidArgument(format!("cell counts must be >= 4, got {:?}", &self.counts[..axes])));
        }
        Ok(())
    }

    pub fn cell_size(&self) -> [f64; 2] {
        let mut h = [1.0, 1.0];
        for (k, hk) in h.iter_mut().enumerate().take(self.bbox.dim()) {
            *hk = self.bbox.width(k) / self.counts[k] as f64;
        }
        h
    }

    /// Grid cells covered by `domain`, row-major in `(j, i)`.
    pub fn active_cells(&self, domain: &BoxUnionDomain) -> Vec<AxisBox> {
        active_index(&self.bbox, self.counts, domain).into_iter().map(|(_, b)| b).collect()
    }
}

fn grid_cell(bbox: &AxisBox, counts: [usize; 2], i: usize, j: usize) -> AxisBox {
    let edge = |k: usize, m: usize| bbox.lo(k) + bbox.width(k) * m as f64 / counts[k] as f64;
    if bbox.dim() == 1 {
        AxisBox::new_1d(edge(0, i), edge(0, i + 1)).expect("nonempty grid cell")
    } else {
        AxisBox::new_2d((edge(0, i), edge(0, i + 1)), (edge(1, j), edge(1, j + 1))).expect("nonempty grid cell")
    }
}

pub(crate) fn active_index(bbox: &AxisBox, counts: [usize; 2], domain: &BoxUnionDomain) -> Vec<([usize; 2], AxisBox)> {
    let ny = if bbox.dim() == 1 { 1 } else { counts[1] };
    let mut out = Vec::new();
    for j in 0..ny {
        for i in 0..counts[0] {
            let c = grid_cell(bbox, counts, i, j);
            if domain.covers_box(&c) {
                out.push(([i, j], c));
            }
        }
    }
    out
}

/// Mass matrix: diagonal for P0, banded for P1.
#[derive(Debug, Clone, PartialEq)]
pub enum Mass {
    Diagonal(DVector<f64>),
    Dense(DMatrix<f64>),
}

impl Mass {
    pub fn len(&self) -> usize {
        match self {
            Mass::Diagonal(d) => d.len(),
            Mass::Dense(m) => m.nrows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Mass::Diagonal(d) => DMatrix::from_diagonal(d),
            Mass::Dense(m) => m.clone(),
        }
    }
}

/// Assembled stiffness and mass with the metadata of the discretization.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub stiffness: DMatrix<f64>,
    pub mass: Mass,
    pub grid: GridSpec,
    pub mode: FormMode,
    /// Active P0 cells (empty for P1).
    pub cells: Vec<AxisBox>,
    /// P1 node coordinates (empty for P0).
    pub nodes: Vec<f64>,
}

/// Piecewise-constant form on the grid cells covered by `domain`.
///
/// Full mode: `A_pq = -2E(p, q)`, `A_pp = 2 Per_s(p)`. Regional mode keeps
/// the off-diagonal and replaces the diagonal by `2 Σ_{q≠p} E(p, q)`.
/// Cell–cell energies come from a table indexed by the integer offset.
pub fn assemble_p0_2d(domain: &BoxUnionDomain, grid: &GridSpec, s: FracOrder, mode: FormMode) -> Result<Assembly> {
    s.require_sub("piecewise-constant elements")?;
    if grid.order != ElementOrder::P0 || grid.bbox.dim() != 2 || domain.dim() != 2 {
        return Err(Error::InvalidArgument("assemble_p0_2d needs a 2D P0 grid and domain".into()));
    }
    assemble_p0_cells(domain, grid, s, mode)
}

/// Piecewise-constant form on a 1D grid, the 1D analogue of [`assemble_p0_2d`].
pub fn assemble_p0_1d(domain: &IntervalUnion, grid: &GridSpec, s: FracOrder, mode: FormMode) -> Result<Assembly> {
    s.require_sub("piecewise-constant elements")?;
    if grid.order != ElementOrder::P0 || grid.bbox.dim() != 1 {
        return Err(Error::InvalidArgument("assemble_p0_1d needs a 1D P0 grid".into()));
    }
    let boxes = domain.intervals().iter().map(|&(a, b)| AxisBox::new_1d(a, b)).collect::<Result<Vec<_>>>()?;
    let dom = BoxUnionDomain::new(1, boxes)?;
    assemble_p0_cells(&dom, grid, s, mode)
}

pub(crate) fn assemble_p0_cells(
    domain: &BoxUnionDomain,
    grid: &GridSpec,
    s: FracOrder,
    mode: FormMode,
) -> Result<Assembly> {
    let act = active_index(&grid.bbox, grid.counts, domain);
    if act.is_empty() {
        return Err(Error::Domain("no grid cell lies inside the domain".into()));
    }
    let dim = grid.bbox.dim();
    let h = grid.cell_size();
    let (mut imin, mut imax, mut jmin, mut jmax) = (usize::MAX, 0, usize::MAX, 0);
    for (ij, _) in &act {
        imin = imin.min(ij[0]);
        imax = imax.max(ij[0]);
        jmin = jmin.min(ij[1]);
        jmax = jmax.max(ij[1]);
    }
    let (wi, wj) = (imax - imin + 1, jmax - jmin + 1);
    let offsets: Vec<(usize, usize)> = (0..wj).flat_map(|dj| (0..wi).map(move |di| (di, dj))).collect();
    let values: Vec<f64> = offsets
        .par_iter()
        .map(|&(di, dj)| -> Result<f64> {
            if di == 0 && dj == 0 {
                return Ok(0.0);
            }
            if dim == 1 {
                return Ok(interval_interval_energy((0.0, h[0]), (di as f64 * h[0], (di + 1) as f64 * h[0]), s)?.value);
            }
            let a = AxisBox::new_2d((0.0, h[0]), (0.0, h[1]))?;
            let b = a.translated([di as f64 * h[0], dj as f64 * h[1]]);
            Ok(box_box_energy(&a, &b, s)?.value)
        })
        .collect::<Result<Vec<_>>>()?;
    let table = |di: usize, dj: usize| values[dj * wi + di];
    let n = act.len();
    let mut a = DMatrix::zeros(n, n);
    for p in 0..n {
        for q in p + 1..n {
            let (ip, iq) = (act[p].0, act[q].0);
            let e = table(ip[0].abs_diff(iq[0]), ip[1].abs_diff(iq[1]));
            a[(p, q)] = -2.0 * e;
            a[(q, p)] = -2.0 * e;
        }
    }
    match mode {
        FormMode::Full => {
            let per = if dim == 1 {
                interval_complement_energy(h[0], s)?.value
            } else {
                rect_perimeter_s(h[0], h[1], s)?.value
            };
            for p in 0..n {
                a[(p, p)] = 2.0 * per;
            }
        }
        FormMode::Regional => {
            for p in 0..n {
                let off: f64 = a.row(p).iter().sum();
                a[(p, p)] = -off;
            }
        }
    }
    let cell_mass = if dim == 1 { h[0] } else { h[0] * h[1] };
    Ok(Assembly {
        stiffness: a,
        mass: Mass::Diagonal(DVector::from_element(n, cell_mass)),
        grid: grid.clone(),
        mode,
        cells: act.into_iter().map(|(_, b)| b).collect(),
        nodes: Vec::new(),
    })
}

/// Kernel `G` with `G'' = |t|^{-1-2s}` in the distributional sense, up to
/// the factor in `[u]² = ∬ u' u' G`, and its second antiderivative `H`.
fn p1_kernels(s: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let g = move |t: f64| {
        let t = t.abs();
        if s == 0.5 {
            -2.0 * t.ln()
        } else {
            -t.powf(1.0 - 2.0 * s) / (s * (1.0 - 2.0 * s))
        }
    };
    let hh = move |t: f64| {
        let t = t.abs();
        if t == 0.0 {
            return 0.0;
        }
        if s == 0.5 {
            -(t * t * t.ln() - 1.5 * t * t)
        } else {
            -t.powf(3.0 - 2.0 * s) / (s * (1.0 - 2.0 * s) * (2.0 - 2.0 * s) * (3.0 - 2.0 * s))
        }
    };
    (g, hh)
}

#[derive(Debug, Clone, Copy)]
struct Hat {
    l: f64,
    c: f64,
    r: f64,
}

impl Hat {
    fn value(&self, x: f64) -> f64 {
        if x <= self.l || x >= self.r {
            0.0
        } else if x <= self.c {
            (x - self.l) / (self.c - self.l)
        } else {
            (self.r - x) / (self.r - self.c)
        }
    }

    fn elements(&self) -> [((f64, f64), f64); 2] {
        [((self.l, self.c), 1.0 / (self.c - self.l)), ((self.c, self.r), -1.0 / (self.r - self.c))]
    }
}

/// Hat-function form on a union of finite intervals, `grid.counts[0]`
/// uniform elements per interval. Full mode couples all hats through the
/// exact kernel antiderivatives; Regional mode subtracts the interaction of
/// `u²` with the complement.
pub fn assemble_p1_1d(domain: &IntervalUnion, grid: &GridSpec, s: FracOrder, mode: FormMode) -> Result<Assembly> {
    if grid.order != ElementOrder::P1 {
        return Err(Error::InvalidArgument("assemble_p1_1d needs a P1 grid".into()));
    }
    if domain.is_empty() || !domain.is_bounded() {
        return Err(Error::InvalidArgument("P1 assembly needs finite intervals".into()));
    }
    let ne = grid.counts[0];
    let sv = s.value();
    let mut hats = Vec::new();
    let mut span = Vec::new();
    for (k, &(a, b)) in domain.intervals().iter().enumerate() {
        let h = (b - a) / ne as f64;
        for i in 1..ne {
            let node = |m: usize| a + (b - a) * m as f64 / ne as f64;
            hats.push(Hat { l: node(i - 1), c: node(i), r: node(i + 1) });
            span.push((k, h));
        }
    }
    let n = hats.len();
    let (_, hh) = p1_kernels(sv);
    let pair = |e: (f64, f64), f: (f64, f64)| hh(e.1 - f.0) - hh(e.0 - f.0) - hh(e.1 - f.1) + hh(e.0 - f.1);
    let rule = GaussRule::new(8);
    let kexp = -1.0 - 2.0 * sv;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let hi = hats[i];
            (i..n)
                .map(|j| {
                    let hj = hats[j];
                    let gap = (hj.l - hi.r).max(hi.l - hj.r);
                    let width = span[i].1.max(span[j].1);
                    if gap >= 3.0 * width {
                        // disjoint supports: -2 ∬ φ_i(x) φ_j(y) |x-y|^{-1-2s}
                        let mut acc = 0.0;
                        for (ei, _) in hi.elements() {
                            for (x, wx) in rule.mapped(ei.0, ei.1) {
                                let vx = hi.value(x);
                                for (ej, _) in hj.elements() {
                                    for (y, wy) in rule.mapped(ej.0, ej.1) {
                                        acc += wx * wy * vx * hj.value(y) * (x - y).abs().powf(kexp);
                                    }
                                }
                            }
                        }
                        -2.0 * acc
                    } else {
                        let mut acc = 0.0;
                        for (ei, di) in hi.elements() {
                            for (ej, dj) in hj.elements() {
                                acc += di * dj * pair(ei, ej);
                            }
                        }
                        acc
                    }
                })
                .collect()
        })
        .collect();
    let mut a = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            a[(i, i + off)] = v;
            a[(i + off, i)] = v;
        }
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = 2.0 * span[i].1 / 3.0;
        if i + 1 < n && span[i + 1].0 == span[i].0 {
            m[(i, i + 1)] = span[i].1 / 6.0;
            m[(i + 1, i)] = span[i].1 / 6.0;
        }
    }
    if mode == FormMode::Regional {
        let ext = exterior_mass(domain, &hats, sv);
        a -= ext * 2.0;
    }
    Ok(Assembly {
        stiffness: a,
        mass: Mass::Dense(m),
        grid: grid.clone(),
        mode,
        cells: Vec::new(),
        nodes: hats.iter().map(|h| h.c).collect(),
    })
}

/// `∫_Ω φ_i φ_j w` with `w(x) = ∫_{Ωᶜ} |x-y|^{-1-2s} dy`, a sum of
/// `±|x - e|^{-2s} / 2s` over complement endpoints `e`.
fn exterior_mass(domain: &IntervalUnion, hats: &[Hat], s: f64) -> DMatrix<f64> {
    let p = 2.0 * s;
    let iv = domain.intervals();
    let mut comps = vec![(f64::NEG_INFINITY, iv[0].0)];
    comps.extend(iv.windows(2).filter(|w| w[1].0 > w[0].1).map(|w| (w[0].1, w[1].0)));
    comps.push((iv[iv.len() - 1].1, f64::INFINITY));
    let ends: Vec<f64> = comps.iter().flat_map(|&(a, b)| [a, b]).filter(|x| x.is_finite()).collect();
    let w = move |x: f64| -> f64 {
        let mut v = 0.0;
        for &(alpha, beta) in &comps {
            let (near, far) = if x <= alpha { (alpha - x, beta - x) } else { (x - beta, x - alpha) };
            v += near.powf(-p) - if far.is_finite() { far.powf(-p) } else { 0.0 };
        }
        v / p
    };
    let rule = GaussRule::new(12);
    let n = hats.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..(i + 2).min(n) {
            let (hi, hj) = (hats[i], hats[j]);
            let mut acc = 0.0;
            for (e, _) in hi.elements() {
                if !(e.0 >= hj.l - 1e-15 && e.1 <= hj.r + 1e-15) || e.1 - e.0 <= 0.0 {
                    continue;
                }
                let touch = ends.iter().find(|&&x| x == e.0 || x == e.1).copied();
                match touch {
                    Some(x0) => {
                        // the endpoint singularity is integrated exactly, the rest by Gauss
                        let len = e.1 - e.0;
                        let far = if x0 == e.0 { e.1 } else { e.0 };
                        let (a0, a1) = (hi.value(x0), hi.value(far));
                        let (b0, b1) = (hj.value(x0), hj.value(far));
                        let (da, db) = ((a1 - a0) / len, (b1 - b0) / len);
                        let coef = [a0 * b0, a0 * db + b0 * da, da * db];
                        let mut sing = 0.0;
                        for (k, &c) in coef.iter().enumerate() {
                            if c != 0.0 {
                                let q = k as f64 + 1.0 - p;
                                sing += c * len.powf(q) / q;
                            }
                        }
                        let rest = rule.integrate(
                            |x| hi.value(x) * hj.value(x) * (w(x) - (x - x0).abs().powf(-p) / p),
                            e.0,
                            e.1,
                        );
                        acc += sing / p + rest;
                    }
                    None => {
                        acc += rule.integrate(|x| hi.value(x) * hj.value(x) * w(x), e.0, e.1);
                    }
                }
            }
            m[(i, j)] = acc;
            m[(j, i)] = acc;
        }
    }
    m
}

/// Ascending eigenvalues with mass-orthonormal eigenvectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Option<DMatrix<f64>>,
    pub grid: GridSpec,
    pub form_mode: FormMode,
    pub extrapolated: Option<Vec<f64>>,
}

/// Smallest `count` eigenvalues of an assembled problem.
pub fn solve_eigs(asm: &Assembly, count: usize) -> Result<EigResult> {
    let (vals, vecs) = generalized_eigs(&asm.stiffness, &asm.mass, count)?;
    Ok(EigResult {
        eigenvalues: vals,
        eigenvectors: Some(vecs),
        grid: asm.grid.clone(),
        form_mode: asm.mode,
        extrapolated: None,
    })
}

/// Smallest `count` eigenpairs of `A v = λ M v`: Cholesky reduction, then a
/// dense symmetric solve up to [`DENSE_LIMIT`] unknowns and subspace
/// inverse iteration above.
pub fn generalized_eigs(a: &DMatrix<f64>, mass: &Mass, count: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if a.ncols() != n || mass.len() != n {
        return Err(Error::InvalidArgument("stiffness and mass shapes differ".into()));
    }
    if count == 0 || count > n {
        return Err(Error::InvalidArgument(format!("need 1 <= count <= {n}, got {count}")));
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in i + 1..n {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::InvalidArgument(format!("stiffness is not symmetric at ({i}, {j})")));
            }
        }
    }
    // C = L⁻¹ A L⁻ᵀ
    let (c, back): (DMatrix<f64>, Box<dyn Fn(DMatrix<f64>) -> DMatrix<f64>>) = match mass {
        Mass::Diagonal(d) => {
            if d.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::InvalidArgument("mass must be positive".into()));
            }
            let r: DVector<f64> = d.map(|x| 1.0 / x.sqrt());
            let c = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * r[i] * r[j]);
            (c, Box::new(move |y: DMatrix<f64>| DMatrix::from_fn(y.nrows(), y.ncols(), |i, j| y[(i, j)] * r[i])))
        }
        Mass::Dense(m) => {
            let chol = m.clone().cholesky().ok_or_else(|| Error::Eigen("mass is not positive definite".into()))?;
            let l = chol.l();
            let li = l
                .clone()
                .solve_lower_triangular(&DMatrix::identity(n, n))
                .ok_or_else(|| Error::Eigen("singular mass factor".into()))?;
            let c = &li * a * li.transpose();
            let lt = l.transpose();
            (c, Box::new(move |y: DMatrix<f64>| lt.solve_upper_triangular(&y).expect("factor is nonsingular")))
        }
    };
    let c = (&c + c.transpose()) * 0.5;
    let (vals, y) = if n <= DENSE_LIMIT { dense_smallest(c, count) } else { subspace_smallest(&c, count)? };
    Ok((vals, back(y)))
}

fn dense_smallest(c: DMatrix<f64>, count: usize) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(c);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let vals = idx[..count].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(eig.eigenvectors.nrows(), count, |r, k| eig.eigenvectors[(r, idx[k])]);
    (vals, vecs)
}

fn subspace_smallest(c: &DMatrix<f64>, count: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = c.nrows();
    let chol = c.clone().cholesky().ok_or_else(|| Error::Eigen("operator is not positive definite".into()))?;
    let b = (2 * count + 8).min(n);
    // deterministic start: smooth columns
    let mut x = DMatrix::from_fn(n, b, |i, j| (((i + 1) * (j + 1)) as f64 * 0.618_033_988_75).fract() - 0.5);
    let mut prev = vec![f64::INFINITY; count];
    for _ in 0..5000 {
        x = chol.solve(&x);
        x = x.qr().q();
        let small = x.transpose() * c * &x;
        let small = (&small + small.transpose()) * 0.5;
        let (vals, z) = dense_smallest(small, b);
        x = &x * z;
        let done = vals[..count].iter().zip(&prev).all(|(v, p)| (v - p).abs() <= 1e-13 * v.abs());
        prev.copy_from_slice(&vals[..count]);
        if done {
            let vecs = x.columns(0, count).into_owned();
            return Ok((prev, vecs));
        }
    }
    Err(Error::Eigen("subspace iteration did not converge".into()))
}

/// Refinement ladder result with Richardson extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareEstimate {
    pub ladder: Vec<usize>,
    pub values: Vec<f64>,
    pub rate: Option<f64>,
    pub extrapolated: Option<f64>,
    pub error_estimate: Option<f64>,
    /// Ladder values did not decrease monotonically; no extrapolation was made.
    pub inconclusive: bool,
}

/// Richardson extrapolation of the last three ladder values, assuming each
/// step halves the mesh size.
pub fn richardson(ladder: Vec<usize>, values: Vec<f64>) -> PoincareEstimate {
    let monotone = values.windows(2).all(|w| w[1] <= w[0]);
    let mut est = PoincareEstimate {
        ladder,
        values,
        rate: None,
        extrapolated: None,
        error_estimate: None,
        inconclusive: !monotone,
    };
    let n = est.values.len();
    if !monotone || n < 3 {
        return est;
    }
    let (l1, l2, l3) = (est.values[n - 3], est.values[n - 2], est.values[n - 1]);
    let (d1, d2) = (l1 - l2, l2 - l3);
    if !(d1 > 0.0 && d2 > 0.0) || d2 >= d1 {
        est.inconclusive = d2 > 0.0 && d2 >= d1;
        if !est.inconclusive {
            est.extrapolated = Some(l3);
            est.error_estimate = Some(0.0);
        }
        return est;
    }
    let p = (d1 / d2).log2();
    let lim = l3 - d2 / (2f64.powf(p) - 1.0);
    est.rate = Some(p);
    est.extrapolated = Some(lim);
    est.error_estimate = Some((l3 - lim).abs());
    est
}

/// Problem whose first eigenvalue estimates a Poincaré constant.
#[derive(Debug, Clone, Copy)]
pub enum PoincareProblem<'a> {
    /// Hats on finite intervals; ladder entries are elements per interval.
    Intervals(&'a IntervalUnion, FormMode),
    /// Cells on `bbox`; ladder entries multiply `base` counts.
    Boxes { domain: &'a BoxUnionDomain, bbox: &'a AxisBox, base: [usize; 2], mode: FormMode },
}

/// First eigenvalue across a refinement ladder plus Richardson extrapolation.
pub fn poincare_constant(problem: PoincareProblem<'_>, s: FracOrder, ladder: &[usize]) -> Result<PoincareEstimate> {
    if ladder.is_empty() {
        return Err(Error::InvalidArgument("empty refinement ladder".into()));
    }
    let values = ladder
        .iter()
        .map(|&m| -> Result<f64> {
            let asm = match problem {
                PoincareProblem::Intervals(u, mode) => {
                    let (lo, hi) = (u.intervals()[0].0, u.intervals()[u.len() - 1].1);
                    assemble_p1_1d(u, &GridSpec::p1(AxisBox::new_1d(lo, hi)?, m)?, s, mode)?
                }
                PoincareProblem::Boxes { domain, bbox, base, mode } => {
                    let grid = GridSpec::p0(*bbox, [base[0] * m, base[1] * m])?;
                    assemble_p0_2d(domain, &grid, s, mode)?
                }
            };
            Ok(solve_eigs(&asm, 1)?.eigenvalues[0])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(richardson(ladder.to_vec(), values))
}

/// One row of the asymptotics table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsRow {
    pub ell: f64,
    pub k: usize,
    pub lambda: f64,
    pub p2_omega: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsTable {
    pub s: FracOrder,
    pub omega: (f64, f64),
    pub cells_per_unit: usize,
    pub rows: Vec<AsymptoticsRow>,
    /// Log-log least-squares slope of `gap` against `ell`, one per `k`.
    pub fitted_exponent: Vec<f64>,
    /// `(ell, λ₂ - λ₁)` when `k >= 2`.
    pub spectral_gap: Vec<(f64, f64)>,
}

/// Least-squares slope of `log y` against `log x`; NaN if any `y <= 0`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    if x.len() < 2 || y.iter().any(|&v| !(v > 0.0)) {
        return f64::NAN;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// The first eigenvalue of `ω` (1D, P0, mesh width `1 / cells_per_unit`)
/// scaled to the 2D kernel: a function constant along `x₁` has 2D energy
/// per unit length `2s C(s)` times its 1D energy.
pub fn cylinder_reference(s: FracOrder, omega: (f64, f64), cells_per_unit: usize) -> Result<f64> {
    let ny = cells(omega.1 - omega.0, cells_per_unit)?;
    let grid = GridSpec::p0(AxisBox::new_1d(omega.0, omega.1)?, [ny, 1])?;
    let asm = assemble_p0_1d(&IntervalUnion::new(vec![omega])?, &grid, s, FormMode::Full)?;
    let l1 = solve_eigs(&asm, 1)?.eigenvalues[0];
    Ok(2.0 * s.value() * angular_constant(s) * l1)
}

fn cells(len: f64, per_unit: usize) -> Result<usize> {
    let c = len * per_unit as f64;
    let r = c.round();
    if (c - r).abs() > 1e-9 || r < 1.0 {
        return Err(Error::InvalidArgument(format!("length {len} is not a multiple of the mesh width 1/{per_unit}")));
    }
    Ok(r as usize)
}

/// Eigenvalues of `(-ℓ, ℓ) × ω` against the cylinder reference at a fixed
/// mesh width across all `ℓ`.
pub fn asymptotics_experiment(
    s: FracOrder,
    omega: (f64, f64),
    ells: &[f64],
    k: usize,
    cells_per_unit: usize,
) -> Result<AsymptoticsTable> {
    s.require_sub("the 2D asymptotics experiment")?;
    if !(omega.0 < omega.1 && omega.0.is_finite() && omega.1.is_finite()) {
        return Err(Error::InvalidArgument("omega must be a bounded interval".into()));
    }
    if ells.is_empty() || ells.windows(2).any(|w| w[1] <= w[0]) || ells[0] <= 0.0 {
        return Err(Error::InvalidArgument("ells must be positive and ascending".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let ny = cells(omega.1 - omega.0, cells_per_unit)?;
    for &l in ells {
        let nx = cells(2.0 * l, cells_per_unit)?;
        if nx * ny > CELL_BUDGET {
            return Err(Error::InvalidArgument(format!("ell = {l} needs {} cells, budget is {CELL_BUDGET}", nx * ny)));
        }
    }
    let p2 = cylinder_reference(s, omega, cells_per_unit)?;
    let mut rows = Vec::new();
    let mut spectral_gap = Vec::new();
    for &l in ells {
        let nx = cells(2.0 * l, cells_per_unit)?;
        let bbox = AxisBox::new_2d((-l, l), omega)?;
        let dom = BoxUnionDomain::new(2, vec![bbox])?;
        let grid = GridSpec::p0(bbox, [nx, ny])?;
        let asm = assemble_p0_2d(&dom, &grid, s, FormMode::Full)?;
        let eig = solve_eigs(&asm, k)?;
        for (i, &lam) in eig.eigenvalues.iter().enumerate() {
            rows.push(AsymptoticsRow { ell: l, k: i + 1, lambda: lam, p2_omega: p2, gap: lam - p2 });
        }
        if k >= 2 {
            spectral_gap.push((l, eig.eigenvalues[1] - eig.eigenvalues[0]));
        }
    }
    let fitted_exponent = (1..=k)
        .map(|kk| {
            let (x, y): (Vec<f64>, Vec<f64>) = rows.iter().filter(|r| r.k == kk).map(|r| (r.ell, r.gap)).unzip();
            loglog_slope(&x, &y)
        })
        .collect();
    Ok(AsymptoticsTable { s, omega, cells_per_unit, rows, fitted_exponent, spectral_gap })
}
