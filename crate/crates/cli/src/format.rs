/// Six decimals; `-0.000000` is printed as `0.000000`.
pub fn fixed(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Like [`fixed`], with `inf` and `-inf` literals.
pub fn bits(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v.is_nan() {
        "nan".into()
    } else {
        fixed(v)
    }
}
