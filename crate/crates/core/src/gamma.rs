//! The augmentation ratio γ = m_G / m_S as an exact nonnegative rational.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Nonnegative rational augmentation ratio, always stored in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gamma(Ratio<u64>);

impl Gamma {
    pub const ZERO: Gamma = Gamma(Ratio::new_raw(0, 1));

    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::invalid("gamma", "zero denominator"));
        }
        Ok(Gamma(Ratio::new(numer, denom)))
    }

    pub fn integer(n: u64) -> Self {
        Gamma(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// `round(γ·m_S)` with ties to even, computed exactly.
    pub fn synthetic_count(&self, m_s: u64) -> u64 {
        let scaled = u128::from(self.numer()) * u128::from(m_s);
        let den = u128::from(self.denom());
        let (q, r) = (scaled / den, scaled % den);
        let rounded = match (2 * r).cmp(&den) {
            Ordering::Less => q,
            Ordering::Greater => q + 1,
            Ordering::Equal => q + (q & 1),
        };
        u64::try_from(rounded).expect("synthetic count overflows u64")
    }
}

impl Default for Gamma {
    fn default() -> Self {
        Gamma::ZERO
    }
}

impl PartialOrd for Gamma {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gamma {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Debug for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gamma({self})")
    }
}

/// Integers print bare; other values print as `numer/denom`.
impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Gamma {
    type Err = Error;

    /// Accepts `"3"`, `"3/2"` or a plain decimal such as `"0.25"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid("gamma", format!("cannot parse `{s}` as a nonnegative rational"));
        if let Some((n, d)) = s.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            return Gamma::new(n, d);
        }
        let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_part) || !all_digits(frac_part) || frac_part.len() > 18 {
            return Err(bad());
        }
        let denom = 10u64.pow(frac_part.len() as u32);
        let int: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad())?
        };
        let numer = int
            .checked_mul(denom)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        Gamma::new(numer, denom)
    }
}

impl Serialize for Gamma {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.denom() == 1 {
            serializer.serialize_u64(self.numer())
        } else {
            serializer.collect_str(self)
        }
    }
}

impl<'de> Deserialize<'de> for Gamma {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;

        impl de::Visitor<'_> for Visitor {
            type Value = Gamma;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative number or a \"p/q\" string")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Gamma, E> {
                Ok(Gamma::integer(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Gamma, E> {
                u64::try_from(v)
                    .map(Gamma::integer)
                    .map_err(|_| E::custom(format!("gamma must be nonnegative, got {v}")))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Gamma, E> {
                if !v.is_finite() || v < 0.0 {
                    return Err(E::custom(format!("gamma must be finite and nonnegative, got {v}")));
                }
                // Shortest round-trip decimal, read back exactly.
                format!("{v}").parse().map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Gamma, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(Visitor)
    }
}
