//! Minimal CSV emission: fixed headers, 17 significant digits, empty cells for absent values.

use std::io::{self, Write};

/// `v` in scientific notation with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_row<S: AsRef<str>>(out: &mut dyn Write, cells: &[S]) -> io::Result<()> {
    let mut first = true;
    for cell in cells {
        if !first {
            out.write_all(b",")?;
        }
        out.write_all(cell.as_ref().as_bytes())?;
        first = false;
    }
    out.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for v in [0.0, 1.0, -1.0 / 3.0, 3f64.sqrt(), 1e-300, 6.02e23] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
        assert_eq!(opt(None), "");
    }

    #[test]
    fn rows_are_comma_joined() {
        let mut buf = Vec::new();
        write_row(&mut buf, &["t", "a", ""]).unwrap();
        write_row(&mut buf, &[num(0.5)]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,a,\n5.0000000000000000e-1\n");
    }
}
