//! Number rendering for agent-facing feedback text.
//!
//! Money and quantities are carried unrounded through all score math; only
//! the rendered text rounds. The benchmark environments show two decimals;
//! the allocation and duopoly environments mirror the Python-style formatting
//! their feedback templates were written with.

/// Two decimal places, round half to even: `50.035 -> "50.04"`, `20 -> "20.00"`.
pub fn two_dp(x: f64) -> String {
    format!("{:.2}", x)
}

/// Python `str(float)`-style rendering of an integral-valued float: `2087.0`.
pub fn py_float(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{:.1}", x)
    } else {
        format!("{}", x)
    }
}

/// Python `str(round(x, 2))`: minimal decimals after rounding to 2 places.
///
/// `5.0 -> "5.0"`, `25.875 -> "25.88"`, `6.5 -> "6.5"`.
pub fn py_round2(x: f64) -> String {
    let s = format!("{:.2}", x);
    if let Some(stripped) = s.strip_suffix('0') {
        if stripped.ends_with('.') {
            return format!("{stripped}0");
        }
        return stripped.to_string();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_dp_examples() {
        assert_eq!(two_dp(50.04), "50.04");
        assert_eq!(two_dp(20.0), "20.00");
        assert_eq!(two_dp(4.666666), "4.67");
    }

    #[test]
    fn py_float_examples() {
        assert_eq!(py_float(2087.0), "2087.0");
        assert_eq!(py_float(77.0), "77.0");
    }

    #[test]
    fn py_round2_examples() {
        assert_eq!(py_round2(5.0), "5.0");
        assert_eq!(py_round2(46.0), "46.0");
        assert_eq!(py_round2(25.8812), "25.88");
        assert_eq!(py_round2(33.5), "33.5");
    }
}
