use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of `s` relative to the critical exponent 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Sub,
    Critical,
    Super,
}

/// The fractional exponent `s`, restricted to the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s > 0.0 && s < 1.0 {
            Ok(FracOrder(s))
        } else {
            Err(Error::InvalidArgument(format!("fractional order must lie in (0, 1), got {s}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn regime(self) -> Regime {
        if self.0 < 0.5 {
            Regime::Sub
        } else if self.0 == 0.5 {
            Regime::Critical
        } else {
            Regime::Super
        }
    }

    /// `n + 2s`, the exponent of the kernel `|x - y|^{-(n + 2s)}`.
    #[inline]
    pub fn kernel_exponent(self, dim: usize) -> f64 {
        dim as f64 + 2.0 * self.0
    }

    /// Fails unless `s < 1/2`; `what` names the quantity that needs it.
    pub fn require_sub(self, what: &str) -> Result<()> {
        if self.0 < 0.5 {
            Ok(())
        } else {
            Err(Error::OutOfRegime(format!("{what} requires s < 1/2, got s = {}", self.0)))
        }
    }

    pub fn require_super(self, what: &str) -> Result<()> {
        if self.0 > 0.5 {
            Ok(())
        } else {
            Err(Error::OutOfRegime(format!("{what} requires s > 1/2, got s = {}", self.0)))
        }
    }
}

impl TryFrom<f64> for FracOrder {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        FracOrder::new(s)
    }
}

impl From<FracOrder> for f64 {
    fn from(s: FracOrder) -> f64 {
        s.0
    }
}

impl std::fmt::Display for FracOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert_eq!(FracOrder::new(0.25).unwrap().regime(), Regime::Sub);
        assert_eq!(FracOrder::new(0.5).unwrap().regime(), Regime::Critical);
        assert_eq!(FracOrder::new(0.75).unwrap().regime(), Regime::Super);
    }

    #[test]
    fn rejects_closed_endpoints() {
        for s in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(FracOrder::new(s).is_err(), "{s}");
        }
    }

    #[test]
    fn regime_gates() {
        let s = FracOrder::new(0.5).unwrap();
        assert!(matches!(s.require_sub("x"), Err(Error::OutOfRegime(_))));
        assert!(matches!(s.require_super("x"), Err(Error::OutOfRegime(_))));
    }
}
