//! Stored reference constants: the bump quotient `λ_ref(s)` on the unit disc
//! and the regional constant `p1_unit(s)` of the unit interval.
//!
//! A table of values ships in `data/constants.json`; values for orders not in
//! the table are computed on first use and cached for the process lifetime.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::domain::IntervalUnion;
use crate::eigen::{poincare_constant, FormMode, PoincareProblem};
use crate::error::Result;
use crate::order::FracOrder;
use crate::quad::{integrate, GaussRule, Tolerance};

pub const TABLE_VERSION: u32 = 1;
pub const P1_LADDER: [usize; 3] = [64, 128, 256];

const SHIPPED: &str = include_str!("../data/constants.json");
const QUAD_RTOL: f64 = 1e-9;
const GAUSS_POINTS: usize = 48;
const SMALL_SHIFT: f64 = 1e-4;

pub const LAMBDA_REF_RECIPE: &str = "U(x) = exp(-1/(1-|x|^2)) on the unit disc; \
[U]^2 = 2*pi*(int_0^2 r^(-1-2s) G(r) dr + 2*|U|^2 * 2^(-2s)/(2s)), \
G(r) = int (U(x+r e1) - U(x))^2 dx by 48-point Gauss-Legendre in x and in theta (y = sin theta), \
outer integral adaptive Gauss-Kronrod (rtol 1e-9) after r = t^(1/(2-2s)), \
with G(r)/r^2 replaced by int (d1 U)^2 for r < 1e-4; lambda_ref = [U]^2 / |U|^2";

pub const P1_UNIT_RECIPE: &str = "first eigenvalue of the regional P1 hat discretization of (0,1) \
on 64, 128, 256 elements, Richardson-extrapolated (finest value if the ladder is inconclusive)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsEntry {
    pub s: f64,
    pub lambda_ref: f64,
    /// Present for `s > 1/2` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1_unit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecipeTolerances {
    pub quad_rtol: f64,
    pub gauss_points: usize,
    pub small_shift: f64,
    pub p1_ladder: Vec<usize>,
}

impl RecipeTolerances {
    pub fn current() -> Self {
        RecipeTolerances {
            quad_rtol: QUAD_RTOL,
            gauss_points: GAUSS_POINTS,
            small_shift: SMALL_SHIFT,
            p1_ladder: P1_LADDER.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub schema_version: u32,
    pub lambda_ref_recipe: String,
    pub p1_unit_recipe: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<RecipeTolerances>,
    /// SHA-256 of the recipes and tolerances, filled in by the generator frontend.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe_hash: Option<String>,
    pub entries: Vec<ConstantsEntry>,
}

impl ConstantsTable {
    pub fn shipped() -> &'static ConstantsTable {
        static T: OnceLock<ConstantsTable> = OnceLock::new();
        T.get_or_init(|| serde_json::from_str(SHIPPED).expect("shipped constants table is valid JSON"))
    }

    pub fn lookup(&self, s: FracOrder) -> Option<&ConstantsEntry> {
        self.entries.iter().find(|e| e.s == s.value())
    }
}

/// Recompute the table for the given orders.
pub fn generate_table(orders: &[FracOrder]) -> Result<ConstantsTable> {
    let entries = orders
        .iter()
        .map(|&s| -> Result<ConstantsEntry> {
            Ok(ConstantsEntry {
                s: s.value(),
                lambda_ref: compute_lambda_ref(s)?,
                p1_unit: if s.value() > 0.5 { Some(compute_p1_unit(s)?) } else { None },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantsTable {
        schema_version: TABLE_VERSION,
        lambda_ref_recipe: LAMBDA_REF_RECIPE.into(),
        p1_unit_recipe: P1_UNIT_RECIPE.into(),
        tolerances: Some(RecipeTolerances::current()),
        recipe_hash: None,
        entries,
    })
}

fn cached(key: (u8, u64), f: impl FnOnce() -> Result<f64>) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(u8, u64), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(*v);
    }
    let v = f()?;
    cache.lock().unwrap().insert(key, v);
    Ok(v)
}

/// Rayleigh quotient of the reference bump on the unit disc.
pub fn lambda_ref(s: FracOrder) -> Result<f64> {
    if let Some(e) = ConstantsTable::shipped().lookup(s) {
        return Ok(e.lambda_ref);
    }
    cached((0, s.value().to_bits()), || compute_lambda_ref(s))
}

/// `P¹_{1,s}((0,1))` from the regional eigensolve; needs `s > 1/2`.
pub fn p1_unit(s: FracOrder) -> Result<f64> {
    s.require_super("the regional interval constant")?;
    if let Some(v) = ConstantsTable::shipped().lookup(s).and_then(|e| e.p1_unit) {
        return Ok(v);
    }
    cached((1, s.value().to_bits()), || compute_p1_unit(s))
}

pub fn compute_p1_unit(s: FracOrder) -> Result<f64> {
    s.require_super("the regional interval constant")?;
    let unit = IntervalUnion::new(vec![(0.0, 1.0)])?;
    let est = poincare_constant(PoincareProblem::Intervals(&unit, FormMode::Regional), s, &P1_LADDER)?;
    Ok(est.extrapolated.unwrap_or(*est.values.last().expect("nonempty ladder")))
}

fn bump(x: f64, y: f64) -> f64 {
    let q = 1.0 - x * x - y * y;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

/// `∫ (U(x + r e₁) - U(x))² dx` by tensor Gauss-Legendre; the bump is
/// smooth so fixed rules converge spectrally.
fn shift_energy(r: f64, rule: &GaussRule) -> f64 {
    // y = sin θ keeps the chord half-width cos θ smooth up to the pole
    let half = std::f64::consts::FRAC_PI_2;
    2.0 * rule.integrate(
        |th| {
            let (y, w) = (th.sin(), th.cos());
            let mut br = [-w - r, -w, w - r, w];
            br.sort_by(f64::total_cmp);
            let row: f64 = br
                .windows(2)
                .filter(|p| p[1] > p[0])
                .map(|p| {
                    rule.integrate(
                        |x| {
                            let d = bump(x + r, y) - bump(x, y);
                            d * d
                        },
                        p[0],
                        p[1],
                    )
                })
                .sum();
            row * w
        },
        0.0,
        half,
    )
}

pub fn compute_lambda_ref(s: FracOrder) -> Result<f64> {
    let sv = s.value();
    let norm2 = 2.0
        * std::f64::consts::PI
        * integrate(
            |r| {
                let u = bump(r, 0.0);
                u * u * r
            },
            0.0,
            1.0,
            Tolerance::rel(QUAD_RTOL),
        )?
        .value;
    // r = t^α with α = 1/(2-2s) turns r^{-1-2s} G(r) dr into α G(r)/r² dt
    let alpha = 1.0 / (2.0 - 2.0 * sv);
    let t_max = 2f64.powf(1.0 / alpha);
    let rule = GaussRule::new(GAUSS_POINTS);
    // G(r)/r² -> ∫ (∂₁U)² as r -> 0; below SMALL_SHIFT the difference quotient is roundoff
    let grad2 = std::f64::consts::PI
        * integrate(
            |p| {
                let q = 1.0 - p * p;
                let du = 2.0 * p / (q * q) * bump(p, 0.0);
                du * du * p
            },
            0.0,
            1.0,
            Tolerance::rel(QUAD_RTOL),
        )?
        .value;
    let near = integrate(
        |t| {
            let r = t.powf(alpha);
            if r < SMALL_SHIFT {
                return alpha * grad2;
            }
            alpha * shift_energy(r, &rule) / (r * r)
        },
        0.0,
        t_max,
        Tolerance::rel(QUAD_RTOL),
    )?
    .value;
    let far = 2.0 * norm2 * 2f64.powf(-2.0 * sv) / (2.0 * sv);
    let seminorm = 2.0 * std::f64::consts::PI * (near + far);
    Ok(seminorm / norm2)
}
