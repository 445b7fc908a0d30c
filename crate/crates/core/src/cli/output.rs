//! CSV rendering with a fixed float format.

use std::fmt::Write;

/// 17 significant digits in scientific notation.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Quotes a field when it holds a delimiter, quote or line break.
pub fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Rows joined with CRLF line endings, header first.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = String::new();
    let line = |s: &mut String, cells: &mut dyn Iterator<Item = String>| {
        let joined: Vec<String> = cells.collect();
        write!(s, "{}\r\n", joined.join(",")).unwrap();
    };
    line(&mut s, &mut header.iter().map(|h| field(h)));
    for r in rows {
        line(&mut s, &mut r.iter().map(|c| field(c)));
    }
    s
}
