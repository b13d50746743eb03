//! JSON domain files: `{"dim", "s", "boxes": [{"x": [lo, hi], "y": [lo, hi]}], "generator"}`
//! with infinite bounds written as the strings `"-inf"` / `"inf"`.

use serde::{Deserialize, Serialize};

use crate::counterexample::{build_domain, CexParams};
use crate::domain::{AxisBox, BoxUnionDomain, Generator};
use crate::error::{Error, Result};
use crate::order::FracOrder;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Bound {
    Num(f64),
    Tag(InfTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum InfTag {
    #[serde(rename = "-inf")]
    NegInf,
    #[serde(rename = "inf", alias = "+inf")]
    PosInf,
}

impl Bound {
    fn value(self) -> f64 {
        match self {
            Bound::Num(v) => v,
            Bound::Tag(InfTag::NegInf) => f64::NEG_INFINITY,
            Bound::Tag(InfTag::PosInf) => f64::INFINITY,
        }
    }

    fn from_value(v: f64) -> Bound {
        if v == f64::INFINITY {
            Bound::Tag(InfTag::PosInf)
        } else if v == f64::NEG_INFINITY {
            Bound::Tag(InfTag::NegInf)
        } else {
            Bound::Num(v)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxSpec {
    x: [Bound; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<[Bound; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainFile {
    #[serde(default = "default_version")]
    schema_version: u32,
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(default)]
    boxes: Vec<BoxSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<Generator>,
}

pub const SCHEMA_VERSION: u32 = 1;

fn default_version() -> u32 {
    SCHEMA_VERSION
}

/// A parsed domain file.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub domain: BoxUnionDomain,
    pub s: Option<FracOrder>,
}

fn expand(dim: usize, g: &Generator) -> Result<BoxUnionDomain> {
    match *g {
        Generator::Counterexample { beta, k_max, .. } => {
            if dim != 2 {
                return Err(Error::Parse("the counterexample generator is two-dimensional".into()));
            }
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(Error::Parse(format!("generator beta must be positive, got {beta}")));
            }
            // only the gap sequence matters for the geometry
            let p = CexParams { s: FracOrder::new(0.25)?, beta, a: 0.0, k_list: Vec::new() };
            build_domain(&p, k_max)
        }
        Generator::StripFamily { width, gap, count } => {
            if !(width > 0.0 && gap >= 0.0 && count > 0) {
                return Err(Error::Parse("strip_family needs width > 0, gap >= 0, count > 0".into()));
            }
            let boxes = (0..count)
                .map(|j| {
                    let a = j as f64 * (width + gap);
                    if dim == 1 {
                        AxisBox::new_1d(a, a + width)
                    } else {
                        AxisBox::new_2d((a, a + width), (f64::NEG_INFINITY, f64::INFINITY))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(BoxUnionDomain::new(dim, boxes)?.with_generator(g.clone()))
        }
    }
}

pub fn parse_domain(json: &str) -> Result<DomainSpec> {
    let file: DomainFile = serde_json::from_str(json)?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported domain schema version {}", file.schema_version)));
    }
    let s = file.s.map(FracOrder::new).transpose()?;
    if file.boxes.is_empty() {
        let g = file
            .generator
            .as_ref()
            .ok_or_else(|| Error::Parse("domain file has neither boxes nor a generator".into()))?;
        return Ok(DomainSpec { domain: expand(file.dim, g)?, s });
    }
    let boxes = file
        .boxes
        .iter()
        .enumerate()
        .map(|(i, b)| -> Result<AxisBox> {
            let x = (b.x[0].value(), b.x[1].value());
            match (file.dim, b.y) {
                (1, None) => AxisBox::new_1d(x.0, x.1),
                (2, Some(y)) => AxisBox::new_2d(x, (y[0].value(), y[1].value())),
                (1, Some(_)) => Err(Error::Parse(format!("box {i}: 1D boxes take no y range"))),
                (2, None) => Err(Error::Parse(format!("box {i}: missing y range"))),
                (d, _) => Err(Error::Parse(format!("dim must be 1 or 2, got {d}"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut domain = BoxUnionDomain::new(file.dim, boxes)?;
    if let Some(g) = file.generator {
        domain = domain.with_generator(g);
    }
    Ok(DomainSpec { domain, s })
}

pub fn read_domain(path: &std::path::Path) -> Result<DomainSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_domain(&text)
}

/// Source boxes and generator metadata as pretty JSON.
pub fn domain_to_json(domain: &BoxUnionDomain, s: Option<FracOrder>) -> String {
    let boxes = domain
        .source()
        .iter()
        .map(|b| BoxSpec {
            x: [Bound::from_value(b.lo(0)), Bound::from_value(b.hi(0))],
            y: (domain.dim() == 2).then(|| [Bound::from_value(b.lo(1)), Bound::from_value(b.hi(1))]),
        })
        .collect();
    let file = DomainFile {
        schema_version: SCHEMA_VERSION,
        dim: domain.dim(),
        s: s.map(FracOrder::value),
        boxes,
        generator: domain.generator().cloned(),
    };
    serde_json::to_string_pretty(&file).expect("domain files serialize") + "\n"
}
