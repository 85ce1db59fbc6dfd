use std::fmt;

/// A real number extended with explicit infinities.
///
/// Infinite values never enter floating-point arithmetic; callers branch on
/// the variant instead.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Extended {
    NegInf,
    Finite(f64),
    PosInf,
}

impl Extended {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// Panics on an infinite marker. Only for call sites where finiteness is
    /// already established.
    pub fn unwrap_finite(self) -> f64 {
        match self {
            Extended::Finite(v) => v,
            other => panic!("expected a finite value, found {other}"),
        }
    }
}

impl From<f64> for Extended {
    fn from(v: f64) -> Self {
        Extended::Finite(v)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => f.write_str("-inf"),
            Extended::PosInf => f.write_str("inf"),
            Extended::Finite(v) => write!(f, "{v}"),
        }
    }
}
