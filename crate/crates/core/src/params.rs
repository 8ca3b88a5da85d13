//! Parameter vectors for the low-complexity transform family.
//!
//! Each of the eight parameters takes a value in `{0, ±1/2, ±1, ±2}`. Values are
//! stored doubled (`{0, ±1, ±2, ±4}`) so every arithmetic step on them stays in
//! the integers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dyadic scalar from `{0, ±1/2, ±1, ±2}`, held as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Dyadic(i8);

impl Dyadic {
    /// All admissible values in ascending order. Enumeration order follows this.
    pub const ALL: [Dyadic; 7] = [
        Dyadic(-4),
        Dyadic(-2),
        Dyadic(-1),
        Dyadic(0),
        Dyadic(1),
        Dyadic(2),
        Dyadic(4),
    ];

    pub const ZERO: Dyadic = Dyadic(0);
    pub const HALF: Dyadic = Dyadic(1);
    pub const ONE: Dyadic = Dyadic(2);
    pub const TWO: Dyadic = Dyadic(4);

    /// Builds from the doubled integer representation.
    pub fn from_doubled(doubled: i64) -> Result<Self> {
        match doubled {
            -4 | -2 | -1 | 0 | 1 | 2 | 4 => Ok(Dyadic(doubled as i8)),
            _ => Err(Error::InvalidParameter {
                token: format!("{}", doubled as f64 / 2.0),
            }),
        }
    }

    pub fn from_f64(value: f64) -> Result<Self> {
        let doubled = value * 2.0;
        if doubled.fract() != 0.0 || !doubled.is_finite() {
            return Err(Error::InvalidParameter {
                token: value.to_string(),
            });
        }
        Self::from_doubled(doubled as i64)
    }

    #[inline]
    pub fn doubled(self) -> i64 {
        self.0 as i64
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// True for `±1/2` and `±2`, the values that cost one bit-shift.
    #[inline]
    pub fn needs_shift(self) -> bool {
        matches!(self.0.abs(), 1 | 4)
    }

    #[inline]
    pub fn abs(self) -> Dyadic {
        Dyadic(self.0.abs())
    }

    /// Position of this value in [`Dyadic::ALL`].
    pub fn ordinal(self) -> usize {
        Self::ALL.iter().position(|&d| d == self).unwrap()
    }
}

impl TryFrom<f64> for Dyadic {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Dyadic::from_f64(value)
    }
}

impl From<Dyadic> for f64 {
    fn from(d: Dyadic) -> f64 {
        d.value()
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            1 => f.write_str("0.5"),
            -1 => f.write_str("-0.5"),
            d => write!(f, "{}", d / 2),
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let token = s.trim();
        let bad = || Error::InvalidParameter {
            token: token.to_string(),
        };
        let value = match token.split_once('/') {
            Some((num, den)) => {
                let num: f64 = num.trim().parse().map_err(|_| bad())?;
                let den: f64 = den.trim().parse().map_err(|_| bad())?;
                if den == 0.0 {
                    return Err(bad());
                }
                num / den
            }
            None => token.parse::<f64>().map_err(|_| bad())?,
        };
        Dyadic::from_f64(value).map_err(|_| bad())
    }
}

/// The eight parameters `a1..a8` that select one member of the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParamVector(pub [Dyadic; 8]);

/// Number of distinct parameter vectors, `7^8`.
pub const SEARCH_SPACE_SIZE: u32 = 5_764_801;

impl ParamVector {
    pub fn new(values: [Dyadic; 8]) -> Self {
        ParamVector(values)
    }

    pub fn from_f64s(values: [f64; 8]) -> Result<Self> {
        let mut out = [Dyadic::ZERO; 8];
        for (slot, v) in out.iter_mut().zip(values) {
            *slot = Dyadic::from_f64(v)?;
        }
        Ok(ParamVector(out))
    }

    pub fn from_doubled(values: [i64; 8]) -> Result<Self> {
        let mut out = [Dyadic::ZERO; 8];
        for (slot, v) in out.iter_mut().zip(values) {
            *slot = Dyadic::from_doubled(v)?;
        }
        Ok(ParamVector(out))
    }

    /// The `i`-th parameter, 1-based to match the `a1..a8` naming.
    #[inline]
    pub fn a(&self, i: usize) -> Dyadic {
        self.0[i - 1]
    }

    pub fn doubled(&self) -> [i64; 8] {
        self.0.map(Dyadic::doubled)
    }

    pub fn values(&self) -> [f64; 8] {
        self.0.map(Dyadic::value)
    }

    /// Decodes a lexicographic index in `0..7^8`; `a1` is the most significant digit.
    pub fn from_index(mut index: u32) -> Self {
        let mut out = [Dyadic::ZERO; 8];
        for slot in out.iter_mut().rev() {
            *slot = Dyadic::ALL[(index % 7) as usize];
            index /= 7;
        }
        ParamVector(out)
    }

    pub fn index(&self) -> u32 {
        self.0.iter().fold(0, |acc, d| acc * 7 + d.ordinal() as u32)
    }

    pub fn nonnegative_count(&self) -> usize {
        self.0.iter().filter(|d| d.0 >= 0).count()
    }
}

impl fmt::Display for ParamVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for ParamVector {
    type Err = Error;

    /// Parses `"a1,a2,...,a8"`; tokens may be decimals or fractions like `1/2`.
    fn from_str(s: &str) -> Result<Self> {
        let tokens: Vec<&str> = s.split(',').collect();
        if tokens.len() != 8 {
            return Err(Error::ParameterCount(tokens.len()));
        }
        let mut out = [Dyadic::ZERO; 8];
        for (slot, tok) in out.iter_mut().zip(tokens) {
            *slot = tok.parse()?;
        }
        Ok(ParamVector(out))
    }
}

/// The fifteen published optimal 8-point parameter vectors, in table order.
pub const KNOWN_OPTIMA: [[f64; 8]; 15] = [
    [0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0],
    [0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, 0.0, 1.0, 0.5, 1.0, 1.0, 1.0],
    [0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 2.0],
    [0.0, 0.5, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 2.0],
    [0.0, 1.0, 0.0, 1.0, 0.5, 1.0, 1.0, 1.0],
    [0.0, 0.5, 0.0, 1.0, 1.0, 1.0, 1.0, 2.0],
    [0.0, 0.5, 0.0, 1.0, 0.5, 1.0, 1.0, 1.0],
    [1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    [1.0, 0.5, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.5, 0.5, 1.0, 1.0, 0.5, 0.5],
    [1.0, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    [1.0, 0.5, 0.5, 0.5, 1.0, 1.0, 0.5, 0.5],
];

/// [`KNOWN_OPTIMA`] as parameter vectors.
pub fn known_optima() -> Vec<ParamVector> {
    KNOWN_OPTIMA
        .iter()
        .map(|v| ParamVector::from_f64s(*v).expect("table values are dyadic"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_and_fraction_tokens() {
        let a: ParamVector = "0,0.5,0,1,1,1,1,2".parse().unwrap();
        let b: ParamVector = "0, 1/2, 0, 1, 1, 1, 1, 2".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a, known_optima()[8]);
        assert_eq!("0,0,0,1,1,0,0,1".parse::<ParamVector>().unwrap(), known_optima()[0]);
        assert_eq!("-1/2,-2,0,0,0,0,0,0".parse::<ParamVector>().unwrap().a(1), Dyadic(-1));
    }

    #[test]
    fn rejects_values_outside_the_set() {
        match "0,0,0,3,1,0,0,1".parse::<ParamVector>() {
            Err(Error::InvalidParameter { token }) => assert_eq!(token, "3"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            "0.25,0,0,0,0,0,0,0".parse::<ParamVector>(),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            "x,0,0,0,0,0,0,0".parse::<ParamVector>(),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!("0,0,0".parse::<ParamVector>(), Err(Error::ParameterCount(3))));
        assert!(matches!(
            "1/0,0,0,0,0,0,0,0".parse::<ParamVector>(),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn index_round_trip_and_order() {
        assert_eq!(ParamVector::from_index(0).values(), [-2.0; 8]);
        assert_eq!(ParamVector::from_index(SEARCH_SPACE_SIZE - 1).values(), [2.0; 8]);
        for idx in [0, 1, 6, 7, 48, 123_456, SEARCH_SPACE_SIZE - 1] {
            assert_eq!(ParamVector::from_index(idx).index(), idx);
        }
        assert!(ParamVector::from_index(10) < ParamVector::from_index(11));
    }

    #[test]
    fn display_round_trips() {
        for a in known_optima() {
            assert_eq!(a.to_string().parse::<ParamVector>().unwrap(), a);
        }
        assert_eq!(known_optima()[14].to_string(), "1,0.5,0.5,0.5,1,1,0.5,0.5");
    }
}
