//! Plot-ready CSV tables for regularity reports.

use fracmaster_core::campanato::{BoundaryFit, ExponentEstimate};

use crate::io::Table;

/// Data whose plot columns can be emitted.
pub enum PlotReport<'a> {
    Exponent(&'a ExponentEstimate),
    Boundary(&'a BoundaryFit),
    Empty,
}

pub const EXPONENT_HEADER: [&str; 5] = ["r", "rms", "log_r", "log_rms", "fitted_log_rms"];
pub const BOUNDARY_HEADER: [&str; 4] = ["d", "u", "model_power", "model_xlog"];

pub fn emit_plotdata(report: PlotReport<'_>) -> Vec<u8> {
    match report {
        PlotReport::Exponent(e) => {
            let comment = match (&e.line, e.exponent) {
                (Some(l), _) => format!(
                    "model: log_rms = {} + {} log_r, R2 = {}, class {}",
                    crate::io::fmt_f64(l.intercept),
                    crate::io::fmt_f64(l.slope),
                    crate::io::fmt_f64(l.r_squared),
                    e.class.name()
                ),
                (None, _) => format!("model: none (no positive rms), class {}", e.class.name()),
            };
            let mut t = Table::new(&EXPONENT_HEADER).with_comment(comment);
            for (&r, &rms) in e.radii.iter().zip(&e.rms) {
                let fitted = e.line.map_or(f64::NAN, |l| l.intercept + l.slope * r.ln());
                t.floats(&[r, rms, r.ln(), rms.ln(), fitted]);
            }
            t.into_bytes()
        }
        PlotReport::Boundary(b) => {
            let comment = format!(
                "model_power = {} d^{}; model_xlog = {} d log(1/d) + {} d; preferred {:?}",
                crate::io::fmt_f64(b.power_coefficient),
                crate::io::fmt_f64(b.gamma),
                crate::io::fmt_f64(b.xlog_coefficients[0]),
                crate::io::fmt_f64(b.xlog_coefficients[1]),
                b.preferred
            );
            let mut t = Table::new(&BOUNDARY_HEADER).with_comment(comment);
            for (&d, &u) in b.distances.iter().zip(&b.values) {
                t.floats(&[d, u, b.power_model(d), b.xlog_model(d)]);
            }
            t.into_bytes()
        }
        PlotReport::Empty => Table::new(&EXPONENT_HEADER).into_bytes(),
    }
}
