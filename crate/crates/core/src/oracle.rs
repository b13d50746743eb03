//! Brute-force evaluators used to validate closed forms and semi-analytic
//! energies: stratified Monte Carlo and nested adaptive quadrature.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{AxisBox, BoxUnionDomain};
use crate::eigen::active_index;
use crate::error::{Error, Result};
use crate::kernels::{box_box_energy, EnergyValue};
use crate::order::FracOrder;
use crate::quad::{integrate, integrate_to_infinity, Tolerance};

/// Monte Carlo configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Requested strata per axis; reduced so every stratum gets two samples.
    pub stratification: u32,
}

impl McConfig {
    pub const MIN_SAMPLES: u64 = 1000;

    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        McConfig { samples, seed, stratification: 8 }.validated()
    }

    pub fn with_stratification(mut self, strata: u32) -> Result<Self> {
        self.stratification = strata;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.samples < Self::MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "need at least {} samples, got {}",
                Self::MIN_SAMPLES,
                self.samples
            )));
        }
        if self.stratification == 0 {
            return Err(Error::InvalidArgument("stratification must be positive".into()));
        }
        Ok(self)
    }
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { samples: 1 << 18, seed: 0, stratification: 8 }
    }
}

/// Mean and standard error of `f` over the unit cube `[0,1)^dim`, by
/// stratified sampling. Each stratum draws from its own ChaCha stream, so
/// the result does not depend on how strata are scheduled.
pub fn stratified_mean<F>(dim: usize, cfg: &McConfig, f: F) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut per_axis = cfg.stratification.max(1) as u64;
    while per_axis > 1 && per_axis.pow(dim as u32) * 2 > cfg.samples {
        per_axis -= 1;
    }
    let strata = per_axis.pow(dim as u32);
    let base = cfg.samples / strata;
    let extra = cfg.samples % strata;
    let width = 1.0 / per_axis as f64;
    let stats: Vec<(f64, f64)> = (0..strata)
        .into_par_iter()
        .map(|h| {
            let n = base + u64::from(h < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(h);
            let mut corner = vec![0.0; dim];
            let mut rest = h;
            for c in corner.iter_mut() {
                *c = (rest % per_axis) as f64 * width;
                rest /= per_axis;
            }
            let mut u = vec![0.0; dim];
            // Welford accumulation
            let (mut mean, mut m2) = (0.0, 0.0);
            for i in 0..n {
                for (k, x) in u.iter_mut().enumerate() {
                    *x = corner[k] + width * rng.gen::<f64>();
                }
                let v = f(&u);
                let d = v - mean;
                mean += d / (i + 1) as f64;
                m2 += d * (v - mean);
            }
            let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
            (mean, var / n as f64)
        })
        .collect();
    let w = 1.0 / strata as f64;
    let mean = stats.iter().map(|s| s.0).sum::<f64>() * w;
    let var = stats.iter().map(|s| s.1).sum::<f64>() * w * w;
    (mean, var.sqrt())
}

fn check_finite(b: &AxisBox) -> Result<()> {
    if b.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("Monte Carlo needs finite boxes".into()))
    }
}

/// `∬_{A×B} |x - y|^{-(n+2s)}` by stratified uniform sampling.
pub fn mc_energy(a: &AxisBox, b: &AxisBox, s: FracOrder, cfg: &McConfig) -> Result<EnergyValue> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidArgument("boxes of different dimension".into()));
    }
    check_finite(a)?;
    check_finite(b)?;
    if a.overlaps(b) {
        return Err(Error::InvalidArgument("boxes have overlapping interiors".into()));
    }
    let n = a.dim();
    let p = s.kernel_exponent(n);
    let vol = a.measure() * b.measure();
    let (mean, se) = stratified_mean(2 * n, cfg, |u| {
        let mut r2 = 0.0;
        for k in 0..n {
            let x = a.lo(k) + a.width(k) * u[k];
            let y = b.lo(k) + b.width(k) * u[n + k];
            r2 += (x - y) * (x - y);
        }
        r2.powf(-0.5 * p)
    });
    Ok(EnergyValue::monte_carlo(vol * mean, vol * se))
}

// 6u⁵ - 15u⁴ + 10u³ and its derivative: concentrates samples near both ends
fn smootherstep(u: f64) -> (f64, f64) {
    let v = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
    let dv = 30.0 * u * u * (1.0 - u) * (1.0 - u);
    (v, dv)
}

/// Exit distance from `x` along direction `(c, sn)` in the box `(0,w)×(0,h)`.
fn exit_distance(x: f64, y: f64, c: f64, sn: f64, w: f64, h: f64) -> f64 {
    let tx = if c > 0.0 {
        (w - x) / c
    } else if c < 0.0 {
        -x / c
    } else {
        f64::INFINITY
    };
    let ty = if sn > 0.0 {
        (h - y) / sn
    } else if sn < 0.0 {
        -y / sn
    } else {
        f64::INFINITY
    };
    tx.min(ty)
}

/// Monte Carlo fractional perimeter of the `w × h` rectangle. Following the
/// ray from an interior point, the complement contributes `ρ^{-2s}/2s`
/// where `ρ` is the exit distance; interior points are drawn through a
/// smootherstep map to tame the boundary singularity.
pub fn mc_rect_perimeter(w: f64, h: f64, s: FracOrder, cfg: &McConfig) -> Result<EnergyValue> {
    s.require_sub("the rectangle perimeter")?;
    let p = 2.0 * s.value();
    let (mean, se) = stratified_mean(3, cfg, |u| {
        let (vx, jx) = smootherstep(u[0]);
        let (vy, jy) = smootherstep(u[1]);
        let theta = 2.0 * PI * u[2];
        let rho = exit_distance(w * vx, h * vy, theta.cos(), theta.sin(), w, h);
        if !(rho > 0.0) {
            return 0.0;
        }
        jx * jy * rho.powf(-p)
    });
    let scale = w * h * 2.0 * PI / p;
    Ok(EnergyValue::monte_carlo(scale * mean, scale * se))
}

/// Monte Carlo fractional perimeter of the unit disc. The radius is drawn
/// as `1 - u⁴` so the density peaks at the boundary.
pub fn mc_ball_perimeter(s: FracOrder, cfg: &McConfig) -> Result<EnergyValue> {
    s.require_sub("the ball perimeter")?;
    let p = 2.0 * s.value();
    let (mean, se) = stratified_mean(2, cfg, |u| {
        let d = u[0].powi(4);
        let r = 1.0 - d;
        let jac = 4.0 * u[0].powi(3) * r;
        let theta = 2.0 * PI * u[1];
        let sn = theta.sin();
        let rho = -r * theta.cos() + (1.0 - r * r * sn * sn).max(0.0).sqrt();
        if !(rho > 0.0) {
            return 0.0;
        }
        jac * rho.powf(-p)
    });
    let scale = 4.0 * PI * PI / p;
    Ok(EnergyValue::monte_carlo(scale * mean, scale * se))
}

/// Monte Carlo value of `∫_{|a|}^{|b|} ∫_R |y|^{-(2+2s)} dy₂ dy₁` using the
/// substitution `y₂ = y₁ tan φ`; `b` may be infinite.
pub fn mc_vertical_strip(a: f64, b: f64, s: FracOrder, cfg: &McConfig) -> Result<EnergyValue> {
    let (a, b) = (a.abs(), b.abs());
    if !(a > 0.0 && a <= b) {
        return Err(Error::InvalidArgument("need 0 < |a| <= |b|".into()));
    }
    let sv = s.value();
    let p = 2.0 * sv;
    let (mean, se) = stratified_mean(2, cfg, |u| {
        let phi = PI * (u[1] - 0.5);
        let ang = PI * phi.cos().powf(p);
        if b.is_infinite() {
            // y₁ = a (1-u)^{-1/2s} makes the radial weight constant
            ang * a.powf(-p) / p
        } else {
            let y1 = a + (b - a) * u[0];
            ang * (b - a) * y1.powf(-1.0 - p)
        }
    });
    Ok(EnergyValue::monte_carlo(mean, se))
}

/// Monte Carlo value of the box `(0,M)×(0,N)` against the strip
/// `(-q₂,-q₁)×R`: `x₂` integrates out to `N`, and the vertical offset is
/// sampled by the substitution `y₂ - x₂ = (x₁ - y₁) tan φ`.
pub fn mc_box_strip(q1: f64, q2: f64, m: f64, n: f64, s: FracOrder, cfg: &McConfig) -> Result<EnergyValue> {
    if !(q1 >= 0.0 && q1 < q2 && m > 0.0 && n > 0.0) {
        return Err(Error::InvalidArgument("need 0 <= q1 < q2 and M, N > 0".into()));
    }
    let p = 2.0 * s.value();
    let (mean, se) = stratified_mean(3, cfg, |u| {
        let x1 = m * u[0];
        let y1 = q1 + (q2 - q1) * u[1];
        let phi = PI * (u[2] - 0.5);
        PI * phi.cos().powf(p) * (x1 + y1).powf(-1.0 - p)
    });
    let scale = n * m * (q2 - q1);
    Ok(EnergyValue::monte_carlo(scale * mean, scale * se))
}

/// Nested adaptive quadrature of the defining double integral of the strip
/// integral in Cartesian coordinates.
pub fn quad_vertical_strip(a: f64, b: f64, s: FracOrder, rtol: f64) -> Result<EnergyValue> {
    let (a, b) = (a.abs(), b.abs());
    if !(a > 0.0 && a <= b) {
        return Err(Error::InvalidArgument("need 0 < |a| <= |b|".into()));
    }
    let e = 1.0 + s.value();
    let inner_tol = Tolerance::rel(rtol * 1e-2);
    let outer = |y1: f64| -> f64 {
        // split the vertical line at |y₂| = y₁ so the peak sits on a break
        let f = |y2: f64| 2.0 * (y1 * y1 + y2 * y2).powf(-e);
        let near = integrate(f, 0.0, y1, inner_tol).map(|r| r.value).unwrap_or(f64::NAN);
        let far = integrate_to_infinity(f, y1, inner_tol).map(|r| r.value).unwrap_or(f64::NAN);
        near + far
    };
    let tol = Tolerance::rel(rtol);
    let v =
        if b.is_infinite() { integrate_to_infinity(outer, a, tol)?.value } else { integrate(outer, a, b, tol)?.value };
    if !v.is_finite() {
        return Err(Error::NonConvergence { panels: 0, estimate: v, error: f64::INFINITY });
    }
    Ok(EnergyValue::quadrature(v))
}

/// Quadrature value of the box–strip configuration: the strip is truncated
/// to vertical extent `N·10³` beyond the box on both sides and the remaining
/// tail is added in its leading far-field form. The neglected correction is
/// reported as `truncation_bound`.
pub fn quad_box_strip(q1: f64, q2: f64, m: f64, n: f64, s: FracOrder) -> Result<EnergyValue> {
    if !(q1 >= 0.0 && q1 < q2 && m > 0.0 && n > 0.0) {
        return Err(Error::InvalidArgument("need 0 <= q1 < q2 and M, N > 0".into()));
    }
    let t = n * 1e3;
    let bx = AxisBox::new_2d((0.0, m), (0.0, n))?;
    let strip = AxisBox::new_2d((-q2, -q1), (-t, n + t))?;
    let core = box_box_energy(&bx, &strip, s)?.value;
    // beyond height t the offset is essentially vertical: 2 · M N (q₂-q₁) ∫_t^∞ r^{-2-2s}
    let p = 1.0 + 2.0 * s.value();
    let vol = m * n * (q2 - q1);
    let tail = 2.0 * vol * t.powf(-p) / p;
    // relative error of the far-field form is O(((M + q₂ + N) / t)²)
    let spread = (m + q2 + n) / t;
    let mut ev = EnergyValue::quadrature(core + tail);
    ev.truncation_bound = tail * 4.0 * spread * spread + tail * 1e-12;
    Ok(ev)
}

/// A random instance of one of the two closed-form kernel configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "snake_case")]
pub enum KernelCase {
    VerticalStrip { a: f64, b: f64 },
    BoxStrip { q1: f64, q2: f64, m: f64, n: f64 },
}

/// Closed form against both oracles for one case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCheck {
    pub case: KernelCase,
    pub closed_form: EnergyValue,
    pub quadrature: EnergyValue,
    pub monte_carlo: EnergyValue,
    pub quad_rel_err: f64,
    /// `|closed - mc| / stderr`.
    pub mc_z: f64,
    pub pass: bool,
}

/// `count` cases of each configuration, parameters drawn from `seed`.
/// Strip offsets stay away from zero so the Monte Carlo variance is finite.
pub fn random_kernel_cases(count: usize, seed: u64) -> Vec<KernelCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * count);
    for _ in 0..count {
        let a = rng.gen_range(0.2..3.0);
        let b = a + rng.gen_range(0.1..3.0);
        out.push(KernelCase::VerticalStrip { a, b });
    }
    for _ in 0..count {
        let q1 = rng.gen_range(0.2..2.0);
        let q2 = q1 + rng.gen_range(0.1..2.0);
        let m = rng.gen_range(0.2..3.0);
        let n = rng.gen_range(0.2..3.0);
        out.push(KernelCase::BoxStrip { q1, q2, m, n });
    }
    out
}

pub fn verify_kernel_case(
    case: KernelCase,
    s: FracOrder,
    cfg: &McConfig,
    quad_rtol: f64,
    z_max: f64,
) -> Result<KernelCheck> {
    let (closed, quad, mc) = match case {
        KernelCase::VerticalStrip { a, b } => (
            crate::kernels::vertical_strip_integral(a, b, s)?,
            quad_vertical_strip(a, b, s, 1e-3 * quad_rtol)?,
            mc_vertical_strip(a, b, s, cfg)?,
        ),
        KernelCase::BoxStrip { q1, q2, m, n } => (
            crate::kernels::box_strip_energy(q1, q2, m, n, s)?,
            quad_box_strip(q1, q2, m, n, s)?,
            mc_box_strip(q1, q2, m, n, s, cfg)?,
        ),
    };
    let quad_rel_err = (closed.value - quad.value).abs() / closed.value.abs().max(f64::MIN_POSITIVE);
    let mc_z = (closed.value - mc.value).abs() / mc.stderr.max(f64::MIN_POSITIVE);
    Ok(KernelCheck {
        case,
        closed_form: closed,
        quadrature: quad,
        monte_carlo: mc,
        quad_rel_err,
        mc_z,
        pass: quad_rel_err <= quad_rtol && mc_z <= z_max,
    })
}

/// Complement of a finite 2D box as eight boxes (four of them unbounded in
/// one axis only, four corner quadrants).
pub fn complement_boxes(b: &AxisBox) -> Result<Vec<AxisBox>> {
    if b.dim() != 2 || !b.is_finite() {
        return Err(Error::InvalidArgument("need a finite 2D box".into()));
    }
    let xs = [(f64::NEG_INFINITY, b.lo(0)), (b.lo(0), b.hi(0)), (b.hi(0), f64::INFINITY)];
    let ys = [(f64::NEG_INFINITY, b.lo(1)), (b.lo(1), b.hi(1)), (b.hi(1), f64::INFINITY)];
    let mut out = Vec::with_capacity(8);
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            if i == 1 && j == 1 {
                continue;
            }
            out.push(AxisBox::new_2d(x, y)?);
        }
    }
    Ok(out)
}

/// Indicator-basis Gagliardo form on the grid cells of `domain`, assembled
/// pair by pair with `box_box_energy`. The diagonal is the cell's energy
/// against the eight boxes tiling its complement.
pub fn grid_form_oracle(domain: &BoxUnionDomain, s: FracOrder, cells: usize) -> Result<DMatrix<f64>> {
    if cells > 16 {
        return Err(Error::InvalidArgument(format!("oracle grids are capped at 16 cells per axis, got {cells}")));
    }
    let bbox = domain
        .bounding_box()
        .filter(|b| b.is_finite())
        .ok_or_else(|| Error::Domain("oracle needs a bounded domain".into()))?;
    if cells == 0 || domain.dim() != 2 {
        return Err(Error::InvalidArgument("oracle grids need a 2D domain and at least one cell".into()));
    }
    // same cell order as the eigensolver, without its minimum grid size
    let boxes: Vec<AxisBox> = active_index(&bbox, [cells, cells], domain).into_iter().map(|(_, b)| b).collect();
    let n = boxes.len();
    let mut a = DMatrix::zeros(n, n);
    for p in 0..n {
        let mut diag = 0.0;
        for c in complement_boxes(&boxes[p])? {
            diag += box_box_energy(&boxes[p], &c, s)?.value;
        }
        a[(p, p)] = 2.0 * diag;
        for q in p + 1..n {
            let e = box_box_energy(&boxes[p], &boxes[q], s)?.value;
            a[(p, q)] = -2.0 * e;
            a[(q, p)] = -2.0 * e;
        }
    }
    Ok(a)
}
