//! Deterministic output writers: pretty JSON and gnuplot-ready tables
//! (whitespace-separated columns under a `#` header comment).

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", dir.display()))))
}

/// Serialize as pretty JSON with a trailing newline. Field order is the
/// struct declaration order, so identical data gives identical bytes.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let body = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numerical(format!("json serialization failed: {e}")))?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(body.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

/// Whitespace-separated numeric table with `# name` and `# col ...`
/// header comments.
pub fn write_table(
    path: &Path,
    title: &str,
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# {title}\n"));
    out.push_str(&format!("# {}\n", columns.join(" ")));
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            if v.is_nan() {
                out.push_str("nan");
            } else {
                out.push_str(&format!("{v:.12e}"));
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_format_is_gnuplot_friendly() {
        let dir = std::env::temp_dir().join("spoints_report_test");
        ensure_dir(&dir).unwrap();
        let path = dir.join("t.csv");
        write_table(
            &path,
            "demo",
            &["r", "value"],
            vec![vec![1.0, 2.5], vec![2.0, f64::NAN]],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# demo");
        assert_eq!(lines.next().unwrap(), "# r value");
        assert!(lines.next().unwrap().starts_with("1.000000000000e0 2.5"));
        assert!(lines.next().unwrap().ends_with("nan"));
    }
}
