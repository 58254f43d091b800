//! Numeric formatting shared by the text and CSV writers.

/// Formats `value` with 17 significant digits, which round-trips any `f64`.
pub fn sig17(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    format!("{value:.16e}")
}

/// Short fixed-width rendering for aligned text tables.
pub fn short(value: f64) -> String {
    if value == 0.0 {
        "0".to_string()
    } else if value.abs() >= 1e-3 && value.abs() < 1e5 {
        format!("{value:.6}")
    } else {
        format!("{value:.4e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig17_round_trips() {
        for v in [1.0 / 3.0, -1.1361894540659276, 2.5417464, 1e-300, 6.02e23] {
            let s = sig17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(sig17(0.0), "0");
    }
}
