//! Gagliardo seminorms and Rayleigh quotients of indicator functions of
//! box unions, and the directional (line-by-line) decomposition.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{AxisBox, BoxUnionDomain, IntervalUnion};
use crate::error::{Error, Result};
use crate::kernels::{
    box_box_energy, box_perimeter_s, interval_complement_energy, interval_interval_energy, EnergyValue,
};
use crate::order::FracOrder;

/// Indicator of a bounded box union.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorFunction {
    support: BoxUnionDomain,
}

impl IndicatorFunction {
    pub fn new(support: BoxUnionDomain) -> Result<Self> {
        if !support.is_bounded() {
            return Err(Error::InvalidArgument("indicator support must be bounded".into()));
        }
        if !(support.measure() > 0.0) {
            return Err(Error::InvalidArgument("indicator support must have positive measure".into()));
        }
        Ok(IndicatorFunction { support })
    }

    pub fn from_boxes(dim: usize, boxes: Vec<AxisBox>) -> Result<Self> {
        Self::new(BoxUnionDomain::new(dim, boxes)?)
    }

    pub fn support(&self) -> &BoxUnionDomain {
        &self.support
    }

    pub fn area(&self) -> f64 {
        self.support.measure()
    }

    pub fn translated(&self, v: [f64; 2]) -> Self {
        IndicatorFunction { support: self.support.translated(v) }
    }

    pub fn scaled(&self, t: f64) -> Self {
        IndicatorFunction { support: self.support.scaled(t) }
    }

    pub fn rotated90(&self) -> Self {
        IndicatorFunction { support: self.support.rotated90() }
    }
}

/// One cross term `E(B_i, B_j)`, `i < j`, over normalized support boxes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossTerm {
    pub i: usize,
    pub j: usize,
    pub energy: EnergyValue,
}

/// `[1_U]² = 2 Σ_j (Per_s(B_j) - Σ_{i≠j} E(B_j, B_i))` term by term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormBreakdown {
    pub perimeter_terms: Vec<EnergyValue>,
    pub cross_terms: Vec<CrossTerm>,
    pub total: EnergyValue,
    pub area: f64,
    pub quotient: f64,
}

pub fn seminorm_breakdown(f: &IndicatorFunction, s: FracOrder) -> Result<SeminormBreakdown> {
    if s.value() >= 0.5 {
        return Err(Error::Divergent(format!("indicators are not in H^s for s = {} >= 1/2", s.value())));
    }
    let boxes = f.support.boxes();
    let perimeter_terms = boxes.par_iter().map(|b| box_perimeter_s(b, s)).collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..boxes.len()).flat_map(|i| (i + 1..boxes.len()).map(move |j| (i, j))).collect();
    let cross_terms = pairs
        .par_iter()
        .map(|&(i, j)| Ok(CrossTerm { i, j, energy: box_box_energy(&boxes[i], &boxes[j], s)? }))
        .collect::<Result<Vec<_>>>()?;
    let per: f64 = perimeter_terms.iter().map(|e| e.value).sum();
    let cross: f64 = cross_terms.iter().map(|c| c.energy.value).sum();
    let total = EnergyValue::quadrature(2.0 * (per - 2.0 * cross));
    let area = f.area();
    Ok(SeminormBreakdown { perimeter_terms, cross_terms, quotient: total.value / area, total, area })
}

/// Gagliardo seminorm `[1_U]²` of an indicator, `s < 1/2`.
pub fn indicator_seminorm(f: &IndicatorFunction, s: FracOrder) -> Result<EnergyValue> {
    Ok(seminorm_breakdown(f, s)?.total)
}

/// `[1_U]² / |U|`.
pub fn rayleigh_quotient(f: &IndicatorFunction, s: FracOrder) -> Result<f64> {
    Ok(seminorm_breakdown(f, s)?.quotient)
}

/// 1D seminorm of the indicator of an interval union, intervals that
/// touch being merged first.
pub fn interval_union_seminorm(u: &IntervalUnion, s: FracOrder) -> Result<f64> {
    let m = u.merged_touching();
    let iv = m.intervals();
    let mut per = 0.0;
    for &(a, b) in iv {
        per += interval_complement_energy(b - a, s)?.value;
    }
    let mut cross = 0.0;
    for i in 0..iv.len() {
        for j in i + 1..iv.len() {
            cross += interval_interval_energy(iv[i], iv[j], s)?.value;
        }
    }
    Ok(2.0 * (per - 2.0 * cross))
}

/// `½ ∫_{S¹} ∫_{lines ⟂ ω} [1_U restricted to the line]²` with the
/// trapezoid rule over `angles` equispaced directions and the midpoint
/// rule across parallel lines `line_spacing` apart.
pub fn loss_sloane_energy(
    f: &IndicatorFunction,
    s: FracOrder,
    angles: usize,
    line_spacing: f64,
) -> Result<EnergyValue> {
    if s.value() >= 0.5 {
        return Err(Error::Divergent(format!("indicators are not in H^s for s = {} >= 1/2", s.value())));
    }
    if f.support.dim() != 2 {
        return Err(Error::InvalidArgument("the line decomposition needs a 2D support".into()));
    }
    if angles == 0 || !(line_spacing > 0.0) {
        return Err(Error::InvalidArgument("need angles > 0 and line_spacing > 0".into()));
    }
    let bb = f.support.bounding_box().expect("bounded nonempty support");
    let corners = [
        [bb.lo(0) - line_spacing, bb.lo(1) - line_spacing],
        [bb.hi(0) + line_spacing, bb.lo(1) - line_spacing],
        [bb.lo(0) - line_spacing, bb.hi(1) + line_spacing],
        [bb.hi(0) + line_spacing, bb.hi(1) + line_spacing],
    ];
    // opposite directions give the same lines, so only [0, π) is swept when angles is even
    let (count, mult) = if angles % 2 == 0 { (angles / 2, 2.0) } else { (angles, 1.0) };
    let dtheta = 2.0 * PI / angles as f64;
    let per_angle = (0..count)
        .into_par_iter()
        .map(|m| -> Result<f64> {
            let theta = m as f64 * dtheta;
            let dir = [theta.cos(), theta.sin()];
            let nu = [-dir[1], dir[0]];
            let proj: Vec<f64> = corners.iter().map(|c| c[0] * nu[0] + c[1] * nu[1]).collect();
            let lo = proj.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lines = ((hi - lo) / line_spacing).ceil().max(1.0) as usize;
            let dr = (hi - lo) / lines as f64;
            let mut acc = 0.0;
            for i in 0..lines {
                let r = lo + (i as f64 + 0.5) * dr;
                let cut = f.support.slice([r * nu[0], r * nu[1]], normalize(dir))?;
                if !cut.is_empty() {
                    acc += interval_union_seminorm(&cut, s)?;
                }
            }
            Ok(acc * dr)
        })
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = per_angle.iter().sum();
    Ok(EnergyValue::quadrature(0.5 * mult * dtheta * total))
}

fn normalize(d: [f64; 2]) -> [f64; 2] {
    let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
    [d[0] / n, d[1] / n]
}
