//! Per-step records as CSV or JSON lines. Floats carry 17 significant digits.

use std::io::{self, Write};

use fracflow_core::flow::StepRecord;

use crate::config::Format;

pub const COLUMNS: [&str; 14] = [
    "step",
    "chi",
    "F",
    "W",
    "mean_R",
    "mean_S",
    "lambda",
    "constraint_residual",
    "mu_mass",
    "g_min_eig",
    "g_max_eig",
    "E",
    "entropy",
    "sigma",
];

fn values(r: &StepRecord) -> [f64; 13] {
    [
        r.chi,
        r.f_functional,
        r.w_functional,
        r.mean_r,
        r.mean_s,
        r.lambda,
        r.constraint_residual,
        r.mu_mass,
        r.g_min_eig,
        r.g_max_eig,
        r.energy,
        r.entropy,
        r.sigma,
    ]
}

/// `{:.16e}`, which round-trips every finite `f64`.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct RecordWriter<W: Write> {
    out: W,
    format: Format,
}

impl<W: Write> RecordWriter<W> {
    /// Writes the CSV header straight away; JSON lines have none.
    pub fn new(mut out: W, format: Format) -> io::Result<Self> {
        if format == Format::Csv {
            writeln!(out, "{}", COLUMNS.join(","))?;
        }
        Ok(Self { out, format })
    }

    pub fn write(&mut self, r: &StepRecord) -> io::Result<()> {
        let vals = values(r);
        match self.format {
            Format::Csv => {
                let mut line = r.step.to_string();
                for v in vals {
                    line.push(',');
                    line.push_str(&float(v));
                }
                writeln!(self.out, "{line}")
            }
            Format::JsonLines => {
                // JSON has no NaN or infinity
                let mut line = format!("{{\"step\":{}", r.step);
                for (key, v) in COLUMNS[1..].iter().zip(vals) {
                    let text = if v.is_finite() { float(v) } else { "null".into() };
                    line.push_str(&format!(",\"{key}\":{text}"));
                }
                line.push('}');
                writeln!(self.out, "{line}")
            }
        }
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> StepRecord {
        StepRecord {
            step: 3,
            chi: 3e-4,
            f_functional: -0.0,
            w_functional: 1.0 / 3.0,
            mean_r: 2.0,
            mean_s: 0.0,
            lambda: 0.0,
            constraint_residual: 1e-300,
            mu_mass: 1.0,
            g_min_eig: 0.5,
            g_max_eig: f64::NAN,
            energy: 1.5,
            entropy: -3.0,
            sigma: 0.0,
            df_dchi: 0.0,
            dw_dchi: 0.0,
            asymmetry: 0.0,
        }
    }

    #[test]
    fn floats_round_trip() {
        for v in [1.0 / 3.0, 1e-300, -2.5e17, std::f64::consts::PI, f64::MIN_POSITIVE] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(float(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn csv_layout() {
        let mut w = RecordWriter::new(Vec::new(), Format::Csv).unwrap();
        w.write(&record()).unwrap();
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], COLUMNS.join(","));
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells.len(), 14);
        assert_eq!(cells[0], "3");
        assert_eq!(cells[3].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(cells[10], "NaN");
    }

    #[test]
    fn json_lines_layout() {
        let mut w = RecordWriter::new(Vec::new(), Format::JsonLines).unwrap();
        w.write(&record()).unwrap();
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with(&format!("{{\"step\":3,\"chi\":{},", float(3e-4))));
        assert!(text.contains("\"g_max_eig\":null,"));
        assert!(text.trim_end().ends_with("\"sigma\":0.0000000000000000e0}"));
    }
}
