//! Fixed-precision number formatting for CSV and table output.

/// Six significant digits; plain decimal unless the magnitude is below 1e-4
/// or at least 1e15, where scientific notation is used.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new digit (9.999995 -> 10.00000)
    let reparsed: f64 = s.parse().unwrap_or(x);
    if reparsed != 0.0 && (reparsed.abs().log10().floor() as i32) > magnitude && decimals > 0 {
        let decimals = decimals - 1;
        return format!("{x:.decimals$}");
    }
    s
}

/// Two decimal places, as used in presentation tables.
pub fn fixed2(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(6.854301011), "6.85430");
        assert_eq!(sig6(0.027524686), "0.0275247");
        assert_eq!(sig6(85.64194891), "85.6419");
        assert_eq!(sig6(183.05432), "183.054");
        assert_eq!(sig6(9.9999996), "10.0000");
        assert_eq!(sig6(-7.5), "-7.50000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(123456789.0), "123456789");
        assert_eq!(sig6(3.75906e-27), "3.75906e-27");
        assert_eq!(sig6(0.000123456), "0.000123456");
        assert_eq!(sig6(2.5e20), "2.50000e20");
    }

    #[test]
    fn two_decimals() {
        assert_eq!(fixed2(7.9118), "7.91");
        assert_eq!(fixed2(-0.001), "0.00");
    }
}
