//! Checkpoint CSV output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::experiment::ExperimentResult;

pub const CSV_HEADER: &str = "trial,t,cum_regret,resamples,elapsed_ns";

/// `printf("%.17g")`: 17 significant digits, trailing zeros removed,
/// exponent form outside `1e-4 <= |x| < 1e17`.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        let keep = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(keep);
    }
    s
}

/// Writes the header and one row per checkpoint, trials in ascending order.
pub fn write_csv_to<W: Write>(result: &ExperimentResult, mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for trial in &result.trials {
        for r in &trial.records {
            writeln!(w, "{},{},{},{},{}", r.trial, r.t, format_g17(r.cum_pseudo_regret), r.resamples, r.elapsed_ns)?;
        }
    }
    w.flush()
}

pub fn write_csv(result: &ExperimentResult, path: impl AsRef<Path>) -> io::Result<()> {
    write_csv_to(result, BufWriter::new(File::create(path)?))
}
