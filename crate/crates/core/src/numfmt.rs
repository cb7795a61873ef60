//! Deterministic decimal rendering shared by the text outputs.

/// Formats `x` with `digits` significant digits using '.' as the decimal
/// separator. Magnitudes in `[1e-4, 1e15)` are printed positionally, others in
/// scientific notation. Non-finite values print as `nan`, `inf`, `-inf`.
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "nan".to_owned();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_owned();
    }
    if x == 0.0 {
        return "0".to_owned();
    }
    let mag = x.abs();
    if (1e-4..1e15).contains(&mag) {
        // Round through scientific notation first so the exponent reflects
        // any carry (e.g. 9.9999995 -> 10.000000).
        let sci = format!("{:.*e}", digits - 1, x);
        let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

#[cfg(test)]
mod tests {
    use super::sig;

    #[test]
    fn positional_and_scientific() {
        assert_eq!(sig(0.24043751, 6), "0.240438");
        assert_eq!(sig(1984.0, 6), "1984.00");
        assert_eq!(sig(1e-15, 6), "1.00000e-15");
        assert_eq!(sig(-2.8077, 4), "-2.808");
        assert_eq!(sig(9.9999996, 6), "10.0000");
        assert_eq!(sig(0.0, 6), "0");
        assert_eq!(sig(f64::INFINITY, 6), "inf");
    }

    #[test]
    fn enough_digits_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, 123456.789, 7.25e-9, 0.999_999_999_999] {
            let back: f64 = sig(x, 17).parse().unwrap();
            assert_eq!(back, x);
        }
    }
}
