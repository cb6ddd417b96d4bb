//! Deterministic text and CSV serialization of results.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::lehmer::SearchHit;
use crate::mahler::{Diagnostics, MahlerResult};
use crate::quotient::{ComplexityReport, GrowthSeries};

/// Significant digits used for floating-point output.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(Error::InvalidArgument(format!(
                "unknown format `{s}` (csv|text)"
            ))),
        }
    }
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits; plain decimal
/// unless `|x| < 1e-4`.
pub fn fmt_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i64;
    if magnitude < -4 {
        return format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    }
    let decimals = (SIGNIFICANT_DIGITS as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub const GROWTH_HEADER: &str = "lattice,index,min_vector_length,log_kappa,normalized_rate";

pub fn growth_series(series: &GrowthSeries, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(GROWTH_HEADER);
            out.push('\n');
            for e in &series.entries {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    e.lattice,
                    e.index,
                    fmt_real(e.min_vector_length),
                    fmt_real(e.log_kappa),
                    fmt_real(e.normalized_rate)
                )
                .unwrap();
            }
        }
        Format::Text => {
            for e in &series.entries {
                writeln!(out, "lattice: {}", e.lattice).unwrap();
                writeln!(out, "index: {}", e.index).unwrap();
                writeln!(out, "min_vector_length: {}", fmt_real(e.min_vector_length)).unwrap();
                writeln!(out, "kappa: {}", e.report.kappa).unwrap();
                writeln!(out, "tau: {}", e.report.tau).unwrap();
                writeln!(out, "nullity: {}", e.report.nullity).unwrap();
                writeln!(out, "log_kappa: {}", fmt_real(e.log_kappa)).unwrap();
                writeln!(out, "normalized_rate: {}", fmt_real(e.normalized_rate)).unwrap();
                out.push('\n');
            }
            if let Some(b) = series.bulk_limit_estimate() {
                writeln!(out, "bulk_limit_estimate: {}", fmt_real(b)).unwrap();
            }
            if let Some(s) = series.tail_slope() {
                writeln!(out, "tail_slope: {}", fmt_real(s)).unwrap();
            }
        }
    }
    out
}

fn factor_list(report: &ComplexityReport) -> String {
    report
        .invariant_factors
        .iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn complexity(report: &ComplexityReport, format: Format) -> String {
    match format {
        Format::Csv => format!(
            "kappa,tau,nullity,invariant_factors\n{},{},{},{}\n",
            report.kappa,
            report.tau,
            report.nullity,
            factor_list(report)
        ),
        Format::Text => format!(
            "kappa: {}\ntau: {}\nnullity: {}\ninvariant_factors: {}\n",
            report.kappa,
            report.tau,
            report.nullity,
            factor_list(report)
        ),
    }
}

pub fn mahler(result: &MahlerResult, format: Format) -> String {
    match format {
        Format::Csv => format!(
            "method,log_value,value,error_estimate\n{},{},{},{}\n",
            result.method.name(),
            fmt_real(result.log_value),
            fmt_real(result.value),
            fmt_real(result.error_estimate)
        ),
        Format::Text => {
            let mut out = format!(
                "value: {}\nlog_value: {}\nmethod: {}\nerror_estimate: {}\n",
                fmt_real(result.value),
                fmt_real(result.log_value),
                result.method.name(),
                fmt_real(result.error_estimate)
            );
            match &result.diagnostics {
                Diagnostics::Roots(roots) => {
                    let outside = roots.iter().filter(|(z, _)| z.norm() > 1.0).count();
                    writeln!(out, "distinct_roots: {}", roots.len()).unwrap();
                    writeln!(out, "roots_outside_unit_circle: {outside}").unwrap();
                }
                Diagnostics::Grid {
                    grid_size,
                    coarse_grid_size,
                    samples,
                    dropped,
                } => {
                    writeln!(out, "grid_size: {grid_size}").unwrap();
                    writeln!(out, "coarse_grid_size: {coarse_grid_size}").unwrap();
                    writeln!(out, "samples: {samples}").unwrap();
                    writeln!(out, "dropped_samples: {dropped}").unwrap();
                }
                Diagnostics::Growth {
                    entries,
                    last_index,
                } => {
                    writeln!(out, "series_entries: {entries}").unwrap();
                    writeln!(out, "last_index: {last_index}").unwrap();
                }
                Diagnostics::Exact => {}
            }
            out
        }
    }
}

fn edge_list(hit: &SearchHit) -> String {
    hit.windings
        .iter()
        .map(|(s, w)| format!("{s}:{w}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub const SEARCH_HEADER: &str = "polynomial,edges,mahler_measure,log_mahler_measure,error_estimate";

pub fn search_results(hits: &[SearchHit], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(SEARCH_HEADER);
            out.push('\n');
            for h in hits {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    h.polynomial,
                    edge_list(h),
                    fmt_real(h.mahler.value),
                    fmt_real(h.mahler.log_value),
                    fmt_real(h.mahler.error_estimate)
                )
                .unwrap();
            }
        }
        Format::Text => {
            for (rank, h) in hits.iter().enumerate() {
                writeln!(out, "rank: {}", rank + 1).unwrap();
                writeln!(out, "polynomial: {}", h.polynomial).unwrap();
                writeln!(out, "edges: {}", edge_list(h)).unwrap();
                writeln!(out, "mahler_measure: {}", fmt_real(h.mahler.value)).unwrap();
                writeln!(out, "error_estimate: {}", fmt_real(h.mahler.error_estimate)).unwrap();
                out.push('\n');
            }
        }
    }
    out
}

/// Reads back the `key: value` lines of a text report. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_text(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_once(": ")
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::Parse(format!("expected `key: value`, got `{l}`")))
        })
        .collect()
}
