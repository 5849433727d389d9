//! Output rendering: the trace CSV (written atomically) and the rate table.
//!
//! CSV contract: header `n,step_residual,fix_residual,kp_n`, one row per
//! step, values rendered with 17 significant digits so a rerun with the
//! same config reproduces the file byte for byte.

use asymreg::certificates::RateCertificate;
use asymreg::IterationTrace;
use num::ToPrimitive;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// Threshold above which an exact integer rate gets a scientific
/// approximation appended.
pub const APPROX_THRESHOLD: f64 = 1e12;

fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Render the trace as CSV, one row per step `n`.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut out = String::with_capacity(trace.step_residuals.len() * 64);
    out.push_str("n,step_residual,fix_residual,kp_n\n");
    for n in 0..trace.step_residuals.len() {
        let _ = writeln!(
            out,
            "{n},{},{},{}",
            f17(trace.step_residuals[n]),
            f17(trace.fix_residuals[n]),
            f17(trace.kp_path[n])
        );
    }
    out
}

/// Write `content` to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, content: &str) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)
}

/// One row per certificate per `k`: exact integer value, with a scientific
/// approximation appended when it exceeds [`APPROX_THRESHOLD`].
pub fn rate_table(
    rates: &[(String, RateCertificate)],
    ks: &[u64],
) -> String {
    let mut out = String::from("rate\ttarget\tk\tvalue\n");
    for (label, cert) in rates {
        for &k in ks {
            let value = match cert.rate.eval_u64(k) {
                Ok(v) => {
                    let approx = v
                        .to_f64()
                        .filter(|&f| f > APPROX_THRESHOLD)
                        .map(|f| format!(" (≈{f:.2e})"))
                        .unwrap_or_default();
                    format!("{v}{approx}")
                }
                Err(e) => format!("inapplicable: {e}"),
            };
            let _ = writeln!(out, "{label}\t{}\t{k}\t{value}", cert.target);
        }
    }
    out
}
