//! Exact decimal values for literal comparison and SUM.

use std::cmp::Ordering;
use std::str::FromStr;

use bigdecimal::BigDecimal;

/// An exactly parsed numeric literal value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Number {
    value: BigDecimal,
    integral_syntax: bool,
}

impl Number {
    /// Accepts `[+-]? (digits ('.' digits?)? | '.' digits) ([eE] [+-]? digits)?`.
    /// `INF` and `NaN` are not numbers here.
    pub fn parse(lexical: &str) -> Option<Self> {
        let s = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], Some(&s[i + 1..])),
            None => (s, None),
        };
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (mantissa, None),
        };
        let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_part) || !frac_part.is_none_or(all_digits) {
            return None;
        }
        if int_part.is_empty() && frac_part.is_none_or(str::is_empty) {
            return None;
        }
        if let Some(exp) = exponent {
            let digits = exp.strip_prefix(['+', '-']).unwrap_or(exp);
            if digits.is_empty() || !all_digits(digits) || digits.len() > 9 {
                return None;
            }
        }
        // BigDecimal rejects "5." and ".5e1" style inputs; normalise them.
        let mut normalised = String::with_capacity(lexical.len() + 2);
        if lexical.starts_with('-') {
            normalised.push('-');
        }
        normalised.push_str(if int_part.is_empty() { "0" } else { int_part });
        if let Some(f) = frac_part.filter(|f| !f.is_empty()) {
            normalised.push('.');
            normalised.push_str(f);
        }
        if let Some(exp) = exponent {
            normalised.push('e');
            normalised.push_str(exp);
        }
        let value = BigDecimal::from_str(&normalised).ok()?;
        Some(Self {
            value,
            integral_syntax: frac_part.is_none() && exponent.is_none(),
        })
    }

    pub fn zero() -> Self {
        Self {
            value: BigDecimal::from(0),
            integral_syntax: true,
        }
    }

    /// True when written without a fractional part or exponent.
    pub fn is_integral_syntax(&self) -> bool {
        self.integral_syntax
    }

    pub fn add(&self, other: &Number) -> Number {
        Number {
            value: &self.value + &other.value,
            integral_syntax: self.integral_syntax && other.integral_syntax,
        }
    }

    /// Plain decimal notation. Integral-syntax values print without a
    /// fraction; everything else prints with at least one fractional digit.
    pub fn to_lexical(&self) -> String {
        let normalized = self.value.normalized();
        let plain = if normalized.fractional_digit_count() < 0 {
            normalized.with_scale(0).to_plain_string()
        } else {
            normalized.to_plain_string()
        };
        if self.integral_syntax || plain.contains('.') {
            plain
        } else {
            format!("{plain}.0")
        }
    }
}

impl PartialOrd for Number {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Number {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}
