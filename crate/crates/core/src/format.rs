/// Formats a float with 9 significant digits, trimming trailing zeros.
pub(crate) fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=14).contains(&exp) {
        return format!("{:.8e}", x);
    }
    if exp > 8 {
        let scale = 10f64.powi(exp - 8);
        return format!("{:.0}", (x / scale).round() * scale);
    }
    let decimals = (8 - exp) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".to_string()
        } else {
            t.to_string()
        }
    } else {
        s
    }
}
