//! Exact link costs in micro-units.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use crate::error::Error;

/// Number of micro-units in one input cost unit.
pub const MICROS_PER_UNIT: u64 = 1_000_000;

/// A non-negative link cost stored as an integer number of micro-units
/// (one micro-unit is `1e-6` of the input cost unit).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cost(pub u64);

impl Cost {
    pub const ZERO: Cost = Cost(0);

    pub fn from_micros(micros: u64) -> Self {
        Cost(micros)
    }

    pub fn from_units(units: u64) -> Self {
        Cost(units * MICROS_PER_UNIT)
    }

    /// Rounds a float (e.g. a squared distance) to the nearest micro-unit.
    pub fn from_f64(value: f64) -> Self {
        debug_assert!(value >= 0.0 && value.is_finite());
        Cost((value * MICROS_PER_UNIT as f64).round() as u64)
    }

    pub fn micros(self) -> u64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / MICROS_PER_UNIT as f64
    }

    /// Parses a decimal literal such as `2`, `2.5`, `0.0000004` or `4e-7`,
    /// rounding half-up at the sixth fractional digit.
    pub fn parse_decimal(text: &str) -> Result<Self, Error> {
        let bad = || Error::Format(format!("invalid cost literal `{text}`"));
        let text = text.trim();
        if text.starts_with('-') {
            return Err(Error::NegativeCost(text.to_string()));
        }
        let text = text.strip_prefix('+').unwrap_or(text);
        let (mantissa, exponent) = match text.find(['e', 'E']) {
            Some(pos) => {
                let exp: i32 = text[pos + 1..].parse().map_err(|_| bad())?;
                (&text[..pos], exp)
            }
            None => (text, 0),
        };
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((i, f)) => (i, f),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let mut digits: Vec<u8> = int_part.bytes().chain(frac_part.bytes()).map(|b| b - b'0').collect();
        // Position of the decimal point counted from the left of `digits`.
        let mut point = int_part.len() as i64 + exponent as i64;
        if point < 0 {
            let pad = (-point) as usize;
            let mut padded = vec![0u8; pad];
            padded.extend_from_slice(&digits);
            digits = padded;
            point = 0;
        }
        let keep = point as usize + 6;
        while digits.len() < keep + 1 {
            digits.push(0);
        }
        let mut micros: u64 = 0;
        for &d in &digits[..keep] {
            micros = micros
                .checked_mul(10)
                .and_then(|m| m.checked_add(d as u64))
                .ok_or_else(|| Error::Format(format!("cost `{text}` out of range")))?;
        }
        if digits[keep] >= 5 {
            micros += 1;
        }
        Ok(Cost(micros))
    }

    /// Decimal rendering in input units with at least one fractional digit.
    pub fn to_decimal(self) -> String {
        let int = self.0 / MICROS_PER_UNIT;
        let frac = self.0 % MICROS_PER_UNIT;
        if frac == 0 {
            return format!("{int}.0");
        }
        let frac = format!("{frac:06}");
        format!("{int}.{}", frac.trim_end_matches('0'))
    }

    pub fn to_json(self) -> serde_json::Value {
        serde_json::Value::Number(
            serde_json::Number::from_str(&self.to_decimal()).expect("decimal rendering is a valid JSON number"),
        )
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        self.0 += rhs.0;
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}
