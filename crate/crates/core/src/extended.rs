//! Reals extended by two signed infinities.
//!
//! Used for one-sided derivative limits (which may blow up at cusps) and for
//! tail limits of functions with unbounded growth.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A finite real, `+inf` or `-inf`. Finite values are never NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    /// Maps IEEE infinities onto the infinite variants. Panics on NaN.
    pub fn from_f64(v: f64) -> Self {
        assert!(!v.is_nan(), "ExtendedReal cannot hold NaN");
        if v == f64::INFINITY {
            ExtendedReal::PosInfinity
        } else if v == f64::NEG_INFINITY {
            ExtendedReal::NegInfinity
        } else {
            ExtendedReal::Finite(v)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInfinity => f64::NEG_INFINITY,
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInfinity => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }

    /// -1, 0 or +1. Infinities have the sign of their direction.
    pub fn signum(self) -> i8 {
        match self {
            ExtendedReal::NegInfinity => -1,
            ExtendedReal::PosInfinity => 1,
            ExtendedReal::Finite(v) if v > 0.0 => 1,
            ExtendedReal::Finite(v) if v < 0.0 => -1,
            ExtendedReal::Finite(_) => 0,
        }
    }

    /// Sum in the extended reals; `None` for `+inf + -inf`.
    pub fn checked_add(self, other: Self) -> Option<Self> {
        use ExtendedReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
            (PosInfinity, NegInfinity) | (NegInfinity, PosInfinity) => None,
            (PosInfinity, _) | (_, PosInfinity) => Some(PosInfinity),
            (NegInfinity, _) | (_, NegInfinity) => Some(NegInfinity),
        }
    }

    /// Product with a finite scalar. `0 * inf` is taken to be 0.
    pub fn scale(self, c: f64) -> Self {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(c * v),
            _ if c == 0.0 => ExtendedReal::Finite(0.0),
            inf if c > 0.0 => inf,
            inf => -inf,
        }
    }

    /// Total order: `-inf < finite < +inf`, finite values compared numerically.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        use ExtendedReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b).expect("finite values are not NaN"),
            (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
            (NegInfinity, _) | (_, PosInfinity) => Ordering::Less,
            (PosInfinity, _) | (_, NegInfinity) => Ordering::Greater,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

impl Neg for ExtendedReal {
    type Output = Self;

    fn neg(self) -> Self {
        match self {
            ExtendedReal::NegInfinity => ExtendedReal::PosInfinity,
            ExtendedReal::Finite(v) => ExtendedReal::Finite(-v),
            ExtendedReal::PosInfinity => ExtendedReal::NegInfinity,
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        ExtendedReal::from_f64(v)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInfinity => f.write_str("-inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInfinity => f.write_str("inf"),
        }
    }
}

// JSON form: finite values as numbers, infinities as the strings "inf" / "-inf".
impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::NegInfinity => serializer.serialize_str("-inf"),
            ExtendedReal::Finite(v) => serializer.serialize_f64(*v),
            ExtendedReal::PosInfinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExtendedVisitor;

        impl Visitor<'_> for ExtendedVisitor {
            type Value = ExtendedReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"+inf\", \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtendedReal, E> {
                if v.is_nan() {
                    return Err(E::custom("NaN is not an extended real"));
                }
                Ok(ExtendedReal::from_f64(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtendedReal, E> {
                match v {
                    "inf" | "+inf" => Ok(ExtendedReal::PosInfinity),
                    "-inf" => Ok(ExtendedReal::NegInfinity),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        deserializer.deserialize_any(ExtendedVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::ExtendedReal::*;
    use super::*;

    #[test]
    fn order_places_infinities_at_the_ends() {
        let mut v = vec![Finite(3.0), PosInfinity, Finite(-2.0), NegInfinity];
        v.sort_by(|a, b| a.total_cmp(b));
        assert_eq!(v, vec![NegInfinity, Finite(-2.0), Finite(3.0), PosInfinity]);
    }

    #[test]
    fn addition_rejects_opposite_infinities() {
        assert_eq!(PosInfinity.checked_add(NegInfinity), None);
        assert_eq!(Finite(1.0).checked_add(NegInfinity), Some(NegInfinity));
        assert_eq!(Finite(1.0).checked_add(Finite(-0.5)), Some(Finite(0.5)));
        assert_eq!(PosInfinity.checked_add(PosInfinity), Some(PosInfinity));
    }

    #[test]
    fn scaling_by_negative_flips_infinity() {
        assert_eq!(PosInfinity.scale(-2.0), NegInfinity);
        assert_eq!(NegInfinity.scale(0.3), NegInfinity);
        assert_eq!(Finite(2.0).scale(-0.5), Finite(-1.0));
    }

    #[test]
    fn json_uses_strings_for_infinities() {
        let s = serde_json::to_string(&vec![PosInfinity, Finite(0.0), NegInfinity]).unwrap();
        assert_eq!(s, r#"["inf",0.0,"-inf"]"#);
        let back: Vec<ExtendedReal> = serde_json::from_str(r#"["inf", 0, -1.5, "-inf"]"#).unwrap();
        assert_eq!(back, vec![PosInfinity, Finite(0.0), Finite(-1.5), NegInfinity]);
        assert!(serde_json::from_str::<ExtendedReal>(r#""nan""#).is_err());
    }
}
