//! Strip-family domain with shrinking gaps, its indicator test functions
//! and their Rayleigh quotients, against the analytic upper-bound shape.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{AxisBox, BoxUnionDomain, Generator};
use crate::error::{Error, Result};
use crate::order::FracOrder;
use crate::seminorm::{seminorm_breakdown, IndicatorFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CexParams {
    pub s: FracOrder,
    pub beta: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub k_list: Vec<usize>,
}

impl CexParams {
    pub fn new(s: FracOrder, beta: f64, a: f64, k_list: Vec<usize>) -> Result<Self> {
        s.require_sub("the counterexample construction")?;
        let sv = s.value();
        if !(beta * (1.0 - 2.0 * sv) > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "need beta (1 - 2s) > 1 for summable gaps, got beta = {beta}, s = {sv}"
            )));
        }
        if !(2.0 * sv * a > 1.0) {
            return Err(Error::InvalidArgument(format!("need 2 s A > 1, got A = {a}, s = {sv}")));
        }
        if k_list.is_empty() || k_list[0] == 0 || k_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("k_list must be nonempty, positive and strictly ascending".into()));
        }
        Ok(CexParams { s, beta, a, k_list })
    }

    /// Gap `s_j = j^{-beta}`, `s_0 = 0`.
    pub fn gap(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            (j as f64).powf(-self.beta)
        }
    }

    /// Left edge `a_k` of strip `C_k`.
    pub fn strip_offset(&self, k: i64) -> f64 {
        if k >= 0 {
            k as f64 + (0..=k as usize).map(|j| self.gap(j)).sum::<f64>()
        } else {
            k as f64 - (0..(-k) as usize).map(|j| self.gap(j)).sum::<f64>()
        }
    }

    /// `k₀ = ⌈k^A⌉`, snapping to the nearest integer within 1e-9.
    pub fn height(&self, k: usize) -> usize {
        let v = (k as f64).powf(self.a);
        let r = v.round();
        if (v - r).abs() <= 1e-9 * r.max(1.0) {
            r as usize
        } else {
            v.ceil() as usize
        }
    }
}

/// The integer `P₀` with `1/(P₀+1) < 2s <= 1/P₀`.
pub fn p_zero_index(s: FracOrder) -> Result<usize> {
    s.require_sub("P0")?;
    let x = 1.0 / (2.0 * s.value());
    let r = x.round();
    let p = if (x - r).abs() <= 1e-9 * r { r } else { x.floor() };
    Ok(p as usize)
}

/// Strips `C_{-k_max} … C_{k_max}` and the horizontal strip `R × (-2, -1)`.
pub fn build_domain(params: &CexParams, k_max: usize) -> Result<BoxUnionDomain> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be >= 1".into()));
    }
    let k = k_max as i64;
    let offsets: Vec<f64> = (-k..=k).map(|j| params.strip_offset(j)).collect();
    let mut boxes: Vec<AxisBox> = offsets
        .iter()
        .map(|&a| AxisBox::new_2d((a, a + 1.0), (f64::NEG_INFINITY, f64::INFINITY)))
        .collect::<Result<_>>()?;
    boxes.push(AxisBox::new_2d((f64::NEG_INFINITY, f64::INFINITY), (-2.0, -1.0))?);
    Ok(BoxUnionDomain::new(2, boxes)?.with_generator(Generator::Counterexample { beta: params.beta, k_max, offsets }))
}

/// Support of `ψ_{k,k₀}`: `(a_j, a_j + 1) × (0, k₀)` for `j = 0..=k`.
pub fn test_function(params: &CexParams, k: usize) -> Result<IndicatorFunction> {
    let k0 = params.height(k) as f64;
    let boxes = (0..=k as i64)
        .map(|j| {
            let a = params.strip_offset(j);
            AxisBox::new_2d((a, a + 1.0), (0.0, k0))
        })
        .collect::<Result<Vec<_>>>()?;
    IndicatorFunction::from_boxes(2, boxes)
}

/// Bracketed analytic upper bound shape
/// `k^{1-2s(P₀+1)} + k k₀^{-2s} + k^{-1} Σ s_m^{1-2s} + k^{-1} Σ s_{⌊m/2⌋}^{1-2s}`.
pub fn step4_upper_bound(params: &CexParams, k: usize) -> Result<f64> {
    let sv = params.s.value();
    let p0 = p_zero_index(params.s)? as f64;
    let kf = k as f64;
    let k0 = params.height(k) as f64;
    let e = 1.0 - 2.0 * sv;
    let t1 = kf.powf(1.0 - 2.0 * sv * (p0 + 1.0));
    let t2 = kf * k0.powf(-2.0 * sv);
    let t3: f64 = (0..=k).map(|m| params.gap(m).powf(e)).sum::<f64>() / kf;
    let t4: f64 = (0..=k).map(|m| params.gap(m / 2).powf(e)).sum::<f64>() / kf;
    Ok(t1 + t2 + t3 + t4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientRow {
    pub k: usize,
    pub k0: usize,
    pub seminorm: f64,
    pub area: f64,
    pub quotient: f64,
    pub step4_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientTable {
    pub params: CexParams,
    pub kernel_rtol: f64,
    pub rows: Vec<QuotientRow>,
}

/// Exact Rayleigh quotients of `ψ_{k,⌈k^A⌉}` for every `k` in the list.
pub fn quotient_sequence(params: &CexParams) -> Result<QuotientTable> {
    if let Some(&k) = params.k_list.iter().find(|&&k| k > 128) {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the desk budget of 128")));
    }
    let rows = params
        .k_list
        .par_iter()
        .map(|&k| -> Result<QuotientRow> {
            let f = test_function(params, k)?;
            let b = seminorm_breakdown(&f, params.s)?;
            let k0 = params.height(k);
            let area = ((k + 1) * k0) as f64;
            Ok(QuotientRow {
                k,
                k0,
                seminorm: b.total.value,
                area,
                quotient: b.total.value / area,
                step4_bound: step4_upper_bound(params, k)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuotientTable { params: params.clone(), kernel_rtol: crate::kernels::KERNEL_RTOL, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s(v: f64) -> FracOrder {
        FracOrder::new(v).unwrap()
    }

    fn reference() -> CexParams {
        CexParams::new(s(0.25), 3.0, 3.0, vec![8, 16]).unwrap()
    }

    #[test]
    fn p_zero_examples() {
        assert_eq!(p_zero_index(s(0.25)).unwrap(), 2);
        assert_eq!(p_zero_index(s(0.4)).unwrap(), 1);
        assert_eq!(p_zero_index(s(0.05)).unwrap(), 10);
        for &v in &[0.01, 0.07, 0.13, 0.2, 0.3, 0.45, 0.49] {
            let p = p_zero_index(s(v)).unwrap() as f64;
            assert!(1.0 / (p + 1.0) < 2.0 * v && 2.0 * v <= 1.0 / p, "{v}");
        }
    }

    #[test]
    fn offsets_and_gaps() {
        let p = reference();
        assert_eq!(p.strip_offset(0), 0.0);
        assert_eq!(p.strip_offset(1), 2.0);
        assert_relative_eq!(p.strip_offset(2), 3.125, max_relative = 1e-15);
        assert!((p.strip_offset(3) - 4.162037).abs() < 1e-6);
        assert_eq!(p.strip_offset(-1), -1.0);
        // mirror symmetry about x₁ = 0
        for k in 0..10 {
            assert_relative_eq!(p.strip_offset(-k - 1) + 1.0, -p.strip_offset(k), max_relative = 1e-14);
        }
        let d = build_domain(&p, 6).unwrap();
        assert_eq!(d.source().len(), 14);
        let strips = &d.source()[..13];
        let mut prev_gap = f64::INFINITY;
        for w in strips[6..].windows(2) {
            assert_eq!(w[0].width(0), 1.0);
            let gap = w[1].lo(0) - w[0].hi(0);
            assert!(gap < prev_gap && gap > 0.0);
            prev_gap = gap;
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(CexParams::new(s(0.6), 3.0, 3.0, vec![8]).is_err());
        assert!(CexParams::new(s(0.25), 1.5, 3.0, vec![8]).is_err());
        assert!(CexParams::new(s(0.25), 3.0, 1.5, vec![8]).is_err());
        assert!(CexParams::new(s(0.25), 3.0, 3.0, vec![]).is_err());
        assert!(CexParams::new(s(0.25), 3.0, 3.0, vec![16, 8]).is_err());
    }

    #[test]
    fn step4_terms() {
        let p = reference();
        assert_eq!(p.height(16), 4096);
        let sv = 0.25;
        let t1 = 16f64.powf(1.0 - 2.0 * sv * 3.0);
        assert_relative_eq!(t1, 0.25, max_relative = 1e-15);
        assert_relative_eq!(16.0 * 4096f64.powf(-0.5), 0.25, max_relative = 1e-15);
        let b = step4_upper_bound(&p, 16).unwrap();
        assert!(b > 0.5);
        let later: Vec<f64> = (32..40).map(|k| step4_upper_bound(&p, k).unwrap()).collect();
        assert!(later.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn support_is_admissible() {
        let p = reference();
        let d = build_domain(&p, 16).unwrap();
        let f = test_function(&p, 16).unwrap();
        assert!(f.support().source().iter().all(|b| d.contains_box(b)));
        assert_eq!(f.area(), 17.0 * 4096.0);
    }
}
