use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tuples::Rational;

/// Largest exponent of 2 carried in a denominator.
pub const MAX_LOG2_DEN: u32 = 120;

/// `num / 2^log2_den`, normalized so that `num` is odd or `log2_den = 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDyadic")]
pub struct Dyadic {
    num: i128,
    log2_den: u32,
}

#[derive(Deserialize)]
struct RawDyadic {
    num: i128,
    log2_den: u32,
}

impl TryFrom<RawDyadic> for Dyadic {
    type Error = Error;

    fn try_from(raw: RawDyadic) -> Result<Self> {
        let d = Dyadic::new(raw.num, raw.log2_den)?;
        if d.num != raw.num {
            return Err(Error::Domain(format!(
                "dyadic {}/2^{} is not normalized",
                raw.num, raw.log2_den
            )));
        }
        Ok(d)
    }
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic {
        num: 0,
        log2_den: 0,
    };
    pub const ONE: Dyadic = Dyadic {
        num: 1,
        log2_den: 0,
    };

    pub fn new(mut num: i128, mut log2_den: u32) -> Result<Self> {
        if log2_den > MAX_LOG2_DEN {
            return Err(Error::Domain(format!(
                "denominator 2^{log2_den} exceeds 2^{MAX_LOG2_DEN}"
            )));
        }
        if num == 0 {
            return Ok(Dyadic::ZERO);
        }
        let shift = num.trailing_zeros().min(log2_den);
        num >>= shift;
        log2_den -= shift;
        Ok(Dyadic { num, log2_den })
    }

    /// `num · 2^exp` for any sign of `exp`.
    pub fn scaled(num: i128, exp: i64) -> Result<Self> {
        if exp >= 0 {
            let e = u32::try_from(exp).map_err(|_| overflow())?;
            let shifted = num.checked_mul(
                1i128
                    .checked_shl(e)
                    .filter(|&x| x > 0)
                    .ok_or_else(overflow)?,
            );
            Dyadic::new(shifted.ok_or_else(overflow)?, 0)
        } else {
            let e = u32::try_from(-exp).map_err(|_| overflow())?;
            Dyadic::new(num, e)
        }
    }

    /// `2^exp`.
    pub fn pow2(exp: i64) -> Result<Self> {
        Dyadic::scaled(1, exp)
    }

    pub fn num(self) -> i128 {
        self.num
    }

    pub fn log2_den(self) -> u32 {
        self.log2_den
    }

    fn aligned(self, other: Dyadic) -> Result<(i128, i128, u32)> {
        let e = self.log2_den.max(other.log2_den);
        let lift = |d: Dyadic| {
            d.num
                .checked_mul(1i128 << (e - d.log2_den))
                .ok_or_else(overflow)
        };
        Ok((lift(self)?, lift(other)?, e))
    }

    pub fn add(self, other: Dyadic) -> Result<Dyadic> {
        let (a, b, e) = self.aligned(other)?;
        Dyadic::new(a.checked_add(b).ok_or_else(overflow)?, e)
    }

    pub fn sub(self, other: Dyadic) -> Result<Dyadic> {
        let (a, b, e) = self.aligned(other)?;
        Dyadic::new(a.checked_sub(b).ok_or_else(overflow)?, e)
    }

    pub fn mul(self, other: Dyadic) -> Result<Dyadic> {
        Dyadic::new(
            self.num.checked_mul(other.num).ok_or_else(overflow)?,
            self.log2_den + other.log2_den,
        )
    }

    pub fn one_minus(self) -> Result<Dyadic> {
        Dyadic::ONE.sub(self)
    }

    pub fn in_unit_interval(self) -> bool {
        self.num >= 0 && (self.num as u128) <= (1u128 << self.log2_den)
    }

    pub fn denominator(self) -> BigInt {
        BigInt::from(1) << self.log2_den
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(BigInt::from(self.num), self.denominator()).expect("nonzero denominator")
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / 2f64.powi(self.log2_den as i32)
    }

    /// The terminating decimal expansion `num · 5^E / 10^E`, exact.
    pub fn to_decimal(self) -> String {
        let e = self.log2_den;
        let sign = if self.num < 0 { "-" } else { "" };
        let digits = (BigInt::from(self.num.unsigned_abs()) * BigInt::from(5).pow(e)).to_string();
        if e == 0 {
            return format!("{sign}{digits}");
        }
        let e = e as usize;
        let padded = format!("{digits:0>width$}", width = e + 1);
        let (int, frac) = padded.split_at(padded.len() - e);
        format!("{sign}{int}.{frac}")
    }
}

fn overflow() -> Error {
    Error::Domain("dyadic arithmetic overflow".into())
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.denominator())
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
