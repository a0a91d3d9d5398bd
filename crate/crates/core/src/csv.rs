//! CSV artifacts. Floats are written in scientific notation with 17
//! significant digits, lines end in `\n`, and nothing depends on locale, so
//! identical inputs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::initialization::LogPolyFit;
use crate::integrators::Trajectory;
use crate::oracle::CompareRow;
use crate::reconstruction::{Observables, WaveGrid};
use crate::series::C64;

pub const COEFFICIENTS_HEADER: &str = "t,n,alpha_re,alpha_im";
pub const OBSERVABLES_HEADER: &str = "t,norm2,mean_x,mean_x2,mean_p_re,mean_p_im";
pub const WAVEFUNCTION_HEADER: &str = "x,psi_re,psi_im,prob_density";
pub const CONVERGENCE_HEADER: &str = "dt,error,ratio";
pub const COMPARE_HEADER: &str = "t,l2_distance,d_mean_x,d_norm";
pub const SAMPLES_HEADER: &str = "x,psi_re,psi_im";
pub const FIT_HEADER: &str = "n,alpha_re,alpha_im";

/// `{:.16e}`: one leading digit and sixteen after the point.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn coefficients_csv(traj: &Trajectory) -> String {
    table(
        COEFFICIENTS_HEADER,
        traj.snapshots().iter().flat_map(|s| {
            s.alphas()
                .iter()
                .enumerate()
                .map(move |(n, a)| vec![fmt_f64(s.time()), n.to_string(), fmt_f64(a.re), fmt_f64(a.im)])
        }),
    )
}

pub fn observables_csv(rows: &[(f64, Observables)]) -> String {
    table(
        OBSERVABLES_HEADER,
        rows.iter().map(|(t, o)| {
            vec![
                fmt_f64(*t),
                fmt_f64(o.norm2),
                fmt_f64(o.mean_x),
                fmt_f64(o.mean_x2),
                fmt_f64(o.mean_p.re),
                fmt_f64(o.mean_p.im),
            ]
        }),
    )
}

pub fn wavefunction_csv(grid: &WaveGrid) -> String {
    table(
        WAVEFUNCTION_HEADER,
        grid.xs().zip(grid.values()).map(|(x, v)| {
            vec![fmt_f64(x), fmt_f64(v.re), fmt_f64(v.im), fmt_f64(v.norm_sqr())]
        }),
    )
}

/// `ratio` is empty on the first row.
pub fn convergence_csv(rows: &[(f64, f64, Option<f64>)]) -> String {
    table(
        CONVERGENCE_HEADER,
        rows.iter()
            .map(|(dt, err, ratio)| vec![fmt_f64(*dt), fmt_f64(*err), ratio.map(fmt_f64).unwrap_or_default()]),
    )
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    table(
        COMPARE_HEADER,
        rows.iter().map(|r| {
            vec![fmt_f64(r.t), fmt_f64(r.l2_distance), fmt_f64(r.d_mean_x), fmt_f64(r.d_norm)]
        }),
    )
}

pub fn fit_csv(fit: &LogPolyFit) -> String {
    table(
        FIT_HEADER,
        fit.state
            .alphas()
            .iter()
            .enumerate()
            .map(|(n, a)| vec![n.to_string(), fmt_f64(a.re), fmt_f64(a.im)]),
    )
}

pub fn samples_csv(samples: &[(f64, C64)]) -> String {
    table(
        SAMPLES_HEADER,
        samples.iter().map(|(x, v)| vec![fmt_f64(*x), fmt_f64(v.re), fmt_f64(v.im)]),
    )
}

#[derive(Debug, thiserror::Error)]
pub enum SamplesError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// Parse `x,psi_re,psi_im` rows; blank lines are skipped.
pub fn parse_samples(text: &str) -> Result<Vec<(f64, C64)>, SamplesError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim() == SAMPLES_HEADER => {}
        Some((i, header)) => {
            return Err(SamplesError::Format {
                line: i + 1,
                msg: format!("expected header '{SAMPLES_HEADER}', found '{}'", header.trim()),
            })
        }
        None => {
            return Err(SamplesError::Format {
                line: 1,
                msg: "empty samples file".into(),
            })
        }
    }
    lines
        .map(|(i, l)| {
            let fields: Vec<&str> = l.split(',').map(str::trim).collect();
            let err = |msg: String| SamplesError::Format { line: i + 1, msg };
            if fields.len() != 3 {
                return Err(err(format!("expected 3 fields, found {}", fields.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("'{s}': {e}")));
            Ok((num(fields[0])?, C64::new(num(fields[1])?, num(fields[2])?)))
        })
        .collect()
}

pub fn read_samples(path: &Path) -> Result<Vec<(f64, C64)>, SamplesError> {
    parse_samples(&fs::read_to_string(path)?)
}

pub fn write(path: &Path, contents: &str) -> io::Result<()> {
    fs::write(path, contents.as_bytes())
}

/// A single status line, `key=value` pairs separated by spaces.
pub fn status_line(pairs: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (i, (k, v)) in pairs.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{k}={v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.25), "-2.5000000000000000e-1");
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
    }

    #[test]
    fn convergence_first_ratio_blank() {
        let s = convergence_csv(&[(0.1, 0.5, None), (0.05, 0.25, Some(2.0))]);
        assert_eq!(
            s,
            "dt,error,ratio\n1.0000000000000001e-1,5.0000000000000000e-1,\n\
             5.0000000000000003e-2,2.5000000000000000e-1,2.0000000000000000e0\n"
        );
    }

    #[test]
    fn samples_errors() {
        assert!(matches!(parse_samples("a,b,c\n"), Err(SamplesError::Format { line: 1, .. })));
        assert!(matches!(
            parse_samples("x,psi_re,psi_im\n1,2\n"),
            Err(SamplesError::Format { line: 2, .. })
        ));
        assert!(matches!(
            parse_samples("x,psi_re,psi_im\n1,2,zz\n"),
            Err(SamplesError::Format { line: 2, .. })
        ));
    }

    proptest! {
        #[test]
        fn samples_survive_a_round_trip(rows in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64), 0..20)) {
            let samples: Vec<(f64, C64)> = rows.iter().map(|&(x, r, i)| (x, C64::new(r, i))).collect();
            prop_assert_eq!(parse_samples(&samples_csv(&samples)).unwrap(), samples);
        }
    }
}
