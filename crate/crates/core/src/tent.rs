//! Tent-correlation reduction of box–box interaction integrals.
//!
//! For boxes `A`, `B`,
//!
//! ```text
//! ∫_A ∫_B |x - y|^{-p} dy dx = ∫ Λ(z) |z|^{-p} dz,   Λ(z) = Π_k |A_k ∩ (B_k - z_k)|,
//! ```
//!
//! and each per-axis factor is a piecewise linear "tent". The offset plane is
//! cut at the tent breakpoints and at zero, every cell is reflected into the
//! first quadrant, and the bilinear weight is integrated in polar
//! coordinates: the radial integral is closed form, the angular one adaptive.

use crate::error::{Error, Result};
use crate::quad::{integrate_pieces, GaussRule, Tolerance};

/// One linear piece `c0 + c1 t` of a tent on `[lo, hi]` with `lo >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub c0: f64,
    pub c1: f64,
}

fn overlap(a: (f64, f64), b: (f64, f64), t: f64) -> f64 {
    (a.1.min(b.1 - t) - a.0.max(b.0 - t)).max(0.0)
}

fn slope_at(a: (f64, f64), b: (f64, f64), t: f64) -> f64 {
    if overlap(a, b, t) <= 0.0 {
        return 0.0;
    }
    let upper = if b.1 - t < a.1 { -1.0 } else { 0.0 };
    let lower = if b.0 - t > a.0 { -1.0 } else { 0.0 };
    upper - lower
}

fn interior_point(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        (false, true) => hi - 1.0,
        (false, false) => 0.0,
    }
}

/// Tent `t -> |a ∩ (b - t)|` folded onto `t >= 0`: pieces on the negative
/// half-line are reflected (`t -> -t`), so the result may hold overlapping
/// pieces whose contributions add.
pub(crate) fn folded_tent(a: (f64, f64), b: (f64, f64)) -> Result<Vec<Piece>> {
    let a_inf = !(a.0.is_finite() && a.1.is_finite());
    let b_inf = !(b.0.is_finite() && b.1.is_finite());
    if a_inf && b_inf {
        return Err(Error::InvalidArgument("tent of two unbounded intervals is infinite".into()));
    }
    let mut cuts = vec![b.0 - a.1, b.0 - a.0, b.1 - a.1, b.1 - a.0, 0.0];
    cuts.retain(|c| !c.is_nan());
    cuts.push(f64::NEG_INFINITY);
    cuts.push(f64::INFINITY);
    cuts.sort_by(f64::total_cmp);
    // breakpoints that differ only by roundoff would leave sliver pieces
    cuts.dedup_by(|b, a| {
        *b == *a || (b.is_finite() && a.is_finite() && (*b - *a).abs() <= 1e-13 * a.abs().max(b.abs()))
    });
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (p, q) = (w[0], w[1]);
        if !(p < q) {
            continue;
        }
        let m = interior_point(p, q);
        let slope = slope_at(a, b, m);
        let vm = overlap(a, b, m);
        if vm == 0.0 && slope == 0.0 {
            continue;
        }
        if (p.is_infinite() || q.is_infinite()) && slope != 0.0 {
            return Err(Error::InvalidArgument("unbounded tent piece with nonzero slope".into()));
        }
        // anchor the constant at the endpoint closest to zero for exactness
        let (anchor, v_anchor) = if p >= 0.0 {
            (p, if p.is_finite() { overlap(a, b, p) } else { vm })
        } else {
            (q, if q.is_finite() { overlap(a, b, q) } else { vm })
        };
        let c0 = if anchor.is_finite() { v_anchor - slope * anchor } else { vm };
        if p >= 0.0 {
            out.push(Piece { lo: p, hi: q, c0, c1: slope });
        } else {
            out.push(Piece { lo: -q, hi: -p, c0, c1: -slope });
        }
    }
    Ok(out)
}

/// Bilinear weight `c00 + c10 x + c01 y + c11 x y` on a first-quadrant cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cell {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub c: [f64; 4],
}

/// `∫_{r_in}^{r_out} r^{e-1} dr` with the logarithmic branch at `e = 0`.
#[inline]
fn radial(e: f64, r_in: f64, r_out: f64) -> f64 {
    if r_out <= r_in {
        return 0.0;
    }
    if e == 0.0 {
        return (r_out / r_in).ln();
    }
    if r_in > 0.0 && r_out.is_finite() {
        // r_in^e * expm1(e ln(r_out/r_in)) / e, stable when r_out ≈ r_in
        return r_in.powf(e) * (e * (r_out / r_in).ln()).exp_m1() / e;
    }
    (r_out.powf(e) - r_in.powf(e)) / e
}

/// `∫_cell w(z) |z|^{-(2 + 2s)} dz` for a cell in the closed first quadrant.
pub(crate) fn cell_integral(cell: &Cell, s: f64, tol: Tolerance) -> Result<f64> {
    let (x0, x1) = cell.x;
    let (y0, y1) = cell.y;
    debug_assert!(x0 >= 0.0 && y0 >= 0.0);
    if !(x0 < x1 && y0 < y1) || cell.c.iter().all(|&c| c == 0.0) {
        return Ok(0.0);
    }
    // monomial degrees: 1, x, y, xy -> k = 0, 1, 1, 2; radial exponent e = k - 2s
    let deg = [0.0, 1.0, 1.0, 2.0];
    let at_origin = x0 == 0.0 && y0 == 0.0;
    let unbounded_rays = x1.is_infinite() && y1.is_infinite();
    for (k, &c) in cell.c.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let e = deg[k] - 2.0 * s;
        if at_origin && e <= 0.0 {
            return Err(Error::Divergent(format!(
                "singular contact: weight of degree {} against |z|^(-2-2s) at s = {s}",
                deg[k]
            )));
        }
        if unbounded_rays && e >= 0.0 {
            return Err(Error::Divergent("weight does not decay at infinity".into()));
        }
    }

    let theta_lo = y0.atan2(x1);
    let theta_hi = y1.atan2(x0);
    let mut breaks = vec![theta_lo, theta_hi, y0.atan2(x0), y1.atan2(x1)];
    breaks.retain(|t| *t >= theta_lo && *t <= theta_hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let c = cell.c;
    let terms = |theta: f64| -> [f64; 3] {
        let (sn, cs) = theta.sin_cos();
        let r_in = (if x0 > 0.0 { x0 / cs } else { 0.0 }).max(if y0 > 0.0 { y0 / sn } else { 0.0 });
        let r_out = (x1 / cs).min(y1 / sn);
        let mut v = [0.0; 3];
        if !(r_out > r_in) {
            return v;
        }
        if c[0] != 0.0 {
            v[0] = c[0] * radial(-2.0 * s, r_in, r_out);
        }
        if c[1] != 0.0 || c[2] != 0.0 {
            v[1] = (c[1] * cs + c[2] * sn) * radial(1.0 - 2.0 * s, r_in, r_out);
        }
        if c[3] != 0.0 {
            v[2] = c[3] * cs * sn * radial(2.0 - 2.0 * s, r_in, r_out);
        }
        v
    };
    // the monomials can cancel; roundoff then sets a floor relative to their magnitudes
    let rule = GaussRule::new(16);
    let scale: f64 =
        breaks.windows(2).map(|w| rule.integrate(|t| terms(t).iter().map(|v| v.abs()).sum(), w[0], w[1])).sum();
    let tol = tol.with_abs(tol.abs.max(1e-14 * scale));
    Ok(integrate_pieces(|t| terms(t).iter().sum(), &breaks, tol)?.value)
}

/// `∫_A ∫_B |x - y|^{-(2 + 2s)}` for 2D boxes given as per-axis intervals.
/// At most one of the two intervals on each axis may be unbounded.
pub(crate) fn box_pair_integral(a: [(f64, f64); 2], b: [(f64, f64); 2], s: f64, tol: Tolerance) -> Result<f64> {
    let tx = folded_tent(a[0], b[0])?;
    let ty = folded_tent(a[1], b[1])?;
    let mut parts = Vec::with_capacity(tx.len() * ty.len());
    for px in &tx {
        for py in &ty {
            let cell = Cell {
                x: (px.lo, px.hi),
                y: (py.lo, py.hi),
                c: [px.c0 * py.c0, px.c1 * py.c0, px.c0 * py.c1, px.c1 * py.c1],
            };
            parts.push(cell_integral(&cell, s, tol)?);
        }
    }
    Ok(crate::quad::pairwise_sum(&parts))
}

/// Fractional perimeter of a `w × h` rectangle: `∫ (|R| - Λ_RR(z)) |z|^{-(2+2s)} dz`
/// over four symmetric quadrants.
pub(crate) fn rectangle_perimeter(w: f64, h: f64, s: f64, tol: Tolerance) -> Result<f64> {
    let inf = f64::INFINITY;
    let area = w * h;
    let cells = [
        // inside the offset box, |R| - (w - x)(h - y) = h x + w y - x y
        Cell { x: (0.0, w), y: (0.0, h), c: [0.0, h, w, -1.0] },
        Cell { x: (w, inf), y: (0.0, h), c: [area, 0.0, 0.0, 0.0] },
        Cell { x: (0.0, w), y: (h, inf), c: [area, 0.0, 0.0, 0.0] },
        Cell { x: (w, inf), y: (h, inf), c: [area, 0.0, 0.0, 0.0] },
    ];
    let mut total = 0.0;
    for cell in &cells {
        total += cell_integral(cell, s, tol)?;
    }
    Ok(4.0 * total)
}
