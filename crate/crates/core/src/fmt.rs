//! Text formatting shared by the serialization surfaces.

/// Format a float with 17 significant digits, enough to round-trip f64.
pub fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV line from string fields (no quoting; fields must not contain commas).
pub fn csv_line<I: IntoIterator<Item = String>>(fields: I) -> String {
    let mut line = fields.into_iter().collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}
