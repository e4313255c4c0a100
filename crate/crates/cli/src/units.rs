//! Numeric command-line arguments: plain or scientific notation with an
//! optional SI suffix (`k`, `M`, `G`, `T`). `1.5G`, `1e9` and `1000M` are the
//! same value.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantityError {
    #[error("empty number")]
    Empty,
    #[error("`{0}` is not a number")]
    Malformed(String),
    #[error("`{0}` is not finite")]
    NotFinite(String),
    #[error("`{0}` is not a non-negative whole number")]
    NotACount(String),
}

fn multiplier(suffix: char) -> Option<f64> {
    match suffix {
        'k' | 'K' => Some(1e3),
        'M' => Some(1e6),
        'G' => Some(1e9),
        'T' => Some(1e12),
        _ => None,
    }
}

pub fn parse_quantity(text: &str) -> Result<f64, QuantityError> {
    let text = text.trim();
    let last = text.chars().last().ok_or(QuantityError::Empty)?;
    let (digits, scale) = match multiplier(last) {
        Some(m) => (&text[..text.len() - last.len_utf8()], m),
        None => (text, 1.0),
    };
    if digits.is_empty()
        || digits
            .chars()
            .any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
    {
        return Err(QuantityError::Malformed(text.to_string()));
    }
    let value: f64 = digits
        .parse()
        .map_err(|_| QuantityError::Malformed(text.to_string()))?;
    let value = value * scale;
    if !value.is_finite() {
        return Err(QuantityError::NotFinite(text.to_string()));
    }
    Ok(value)
}

/// Largest integer every `f64` below it represents exactly.
const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0;

pub fn parse_count(text: &str) -> Result<u64, QuantityError> {
    let value = parse_quantity(text)?;
    if value < 0.0 || value.fract() != 0.0 || value > EXACT_LIMIT {
        return Err(QuantityError::NotACount(text.trim().to_string()));
    }
    Ok(value as u64)
}
