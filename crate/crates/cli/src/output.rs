use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    /// y, or the prime p for the dyadic sweeps.
    pub x: f64,
    pub value: Complex64,
    pub overlay: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub metadata: Vec<(String, String)>,
    pub has_overlay: bool,
    pub rows: Vec<Row>,
}

impl ExperimentResult {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// 17 significant digits, which round-trips every finite f64.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn header(has_overlay: bool) -> &'static [&'static str] {
    if has_overlay {
        &["x", "value_re", "value_im", "overlay_re", "overlay_im"]
    } else {
        &["x", "value_re", "value_im"]
    }
}

pub fn write_csv<W: Write>(result: &ExperimentResult, mut out: W) -> std::io::Result<()> {
    for (k, v) in &result.metadata {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(result.has_overlay))?;
    for r in &result.rows {
        let mut rec = vec![
            format_float(r.x),
            format_float(r.value.re),
            format_float(r.value.im),
        ];
        if let Some(o) = r.overlay {
            rec.push(format_float(o.re));
            rec.push(format_float(o.im));
        }
        w.write_record(&rec)?;
    }
    w.flush()
}

pub fn to_csv_string(result: &ExperimentResult) -> String {
    let mut buf = Vec::new();
    write_csv(result, &mut buf).expect("writing to memory does not fail");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

/// Writes to `path`, or to standard output when `path` is None.
pub fn emit_csv(result: &ExperimentResult, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let io = |source| CliError::Io {
                path: p.to_path_buf(),
                source,
            };
            let file = std::fs::File::create(p).map_err(io)?;
            let mut buf = std::io::BufWriter::new(file);
            write_csv(result, &mut buf).map_err(io)?;
            buf.flush().map_err(io)
        }
        None => {
            let stdout = std::io::stdout();
            write_csv(result, stdout.lock()).map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

pub fn parse_csv(text: &str) -> Result<ExperimentResult> {
    let bad = |m: String| CliError::Parse(m);
    let mut metadata = Vec::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let body = line.trim_start_matches('#').trim_start();
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| bad(format!("metadata line without '=': {line:?}")))?;
        metadata.push((k.to_string(), v.to_string()));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let head: Vec<String> = rdr
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    let has_overlay = match head.len() {
        5 => true,
        3 => false,
        n => return Err(bad(format!("expected 3 or 5 columns, found {n}"))),
    };
    if head != header(has_overlay) {
        return Err(bad(format!("unexpected header {head:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let f = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|_| bad(format!("bad number {:?}", &rec[i])))
        };
        rows.push(Row {
            x: f(0)?,
            value: Complex64::new(f(1)?, f(2)?),
            overlay: if has_overlay {
                Some(Complex64::new(f(3)?, f(4)?))
            } else {
                None
            },
        });
    }
    Ok(ExperimentResult {
        metadata,
        has_overlay,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.0), "-2.0000000000000000e0");
        for v in [0.1, 1.0 / 3.0, f64::MIN_POSITIVE, 1e300, -0.0] {
            assert_eq!(format_float(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn layout() {
        let r = ExperimentResult {
            metadata: vec![("experiment".into(), "fig1_top".into())],
            has_overlay: false,
            rows: vec![Row {
                x: 0.5,
                value: Complex64::new(1.0, -1.0),
                overlay: None,
            }],
        };
        let s = to_csv_string(&r);
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("# experiment=fig1_top"));
        assert_eq!(lines.next(), Some("x,value_re,value_im"));
        assert_eq!(
            lines.next(),
            Some("5.0000000000000000e-1,1.0000000000000000e0,-1.0000000000000000e0")
        );
        assert_eq!(parse_csv(&s).unwrap(), r);
        assert!(parse_csv("x,y\n1,2\n").is_err());
    }
}
