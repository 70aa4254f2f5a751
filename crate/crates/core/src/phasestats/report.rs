use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phasestats::statistics::{PhaseStatistics, Product};

/// One row of the uncertainty table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    #[serde(flatten)]
    pub stats: PhaseStatistics,
    pub sub_poissonian: bool,
    pub violates_uncertainty: bool,
}

/// Uncertainty table with one row per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    #[serde(rename = "state")]
    pub rows: Vec<ReportRow>,
}

pub fn uncertainty_report(stats: &[PhaseStatistics], labels: &[String]) -> Result<UncertaintyReport> {
    if stats.is_empty() {
        return Err(Error::Empty("uncertainty report needs at least one state".into()));
    }
    if stats.len() != labels.len() {
        return Err(Error::Domain(format!("{} statistics but {} labels", stats.len(), labels.len())));
    }
    let rows = stats
        .iter()
        .zip(labels)
        .map(|(s, l)| ReportRow {
            label: l.clone(),
            stats: *s,
            sub_poissonian: s.sub_poissonian(),
            violates_uncertainty: s.violates_uncertainty(),
        })
        .collect();
    Ok(UncertaintyReport { rows })
}

fn pm(v: f64, e: f64) -> String {
    if e.is_finite() {
        format!("{v:.4} ± {e:.4}")
    } else {
        format!("{v:.4} ± inf")
    }
}

impl UncertaintyReport {
    /// Labels of rows with `Δn·tan Δφ < ½` beyond three standard errors.
    pub fn violations(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| r.violates_uncertainty)
            .map(|r| r.label.as_str())
            .collect()
    }

    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let header = ["state", "mean phase", "Δφ", "n̄", "Δn", "Δn·tanΔφ", "flags"];
        let mut cells: Vec<[String; 7]> = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let s = &r.stats;
            let product = match s.product {
                Product::Finite(p) => pm(p, s.product_error),
                Product::Unbounded => "unbounded".to_string(),
            };
            let mut flags = Vec::new();
            if r.sub_poissonian {
                flags.push("sub-poissonian");
            }
            if r.violates_uncertainty {
                flags.push("VIOLATION");
            }
            if s.degenerate_variance {
                flags.push("variance-clamped");
            }
            cells.push([
                r.label.clone(),
                pm(s.mean_phase, s.mean_phase_error),
                pm(s.phase_uncertainty, s.phase_uncertainty_error),
                pm(s.n_mean, s.n_mean_error),
                pm(s.n_uncertainty, s.n_uncertainty_error),
                product,
                flags.join(","),
            ]);
        }
        let width = |i: usize| {
            cells
                .iter()
                .map(|c| c[i].chars().count())
                .chain(std::iter::once(header[i].chars().count()))
                .max()
                .unwrap_or(0)
        };
        let widths: Vec<usize> = (0..7).map(width).collect();
        let line = |row: &[String]| {
            let padded: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&header.map(String::from));
        for c in &cells {
            out.push_str(&line(c));
        }
        out
    }

    /// One `[[state]]` table per row.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::format("report", e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::format("report", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasestats::statistics::phase_statistics;
    use crate::sampler::estimate::MomentEstimate;
    use num_complex::Complex64;

    fn stats(psi: f64, n1: f64, n2: f64) -> PhaseStatistics {
        phase_statistics(
            &MomentEstimate::exact(1, Complex64::new(psi, 0.0)),
            &MomentEstimate::exact(1, Complex64::new(n1, 0.0)),
            &MomentEstimate::exact(2, Complex64::new(n2, 0.0)),
        )
    }

    #[test]
    fn vacuum_row_is_unbounded() {
        let r = uncertainty_report(&[stats(0.0, 0.0, 0.0)], &["vacuum".into()]).unwrap();
        assert!(r.to_text().contains("unbounded"));
        assert!(r.violations().is_empty());
    }

    #[test]
    fn violation_flagged() {
        let r = uncertainty_report(&[stats(0.99, 4.0, 16.25)], &["bad".into()]).unwrap();
        assert_eq!(r.violations(), vec!["bad"]);
        assert!(r.to_text().contains("VIOLATION"));
    }

    #[test]
    fn toml_round_trip() {
        let r = uncertainty_report(
            &[stats(0.0, 0.0, 0.0), stats(0.96, 4.0, 20.0)],
            &["G".into(), "A".into()],
        )
        .unwrap();
        let text = r.to_toml().unwrap();
        assert!(text.contains("[[state]]"));
        assert_eq!(UncertaintyReport::from_toml(&text).unwrap(), r);
    }

    #[test]
    fn input_validation() {
        assert!(uncertainty_report(&[], &[]).is_err());
        assert!(uncertainty_report(&[stats(0.5, 1.0, 2.0)], &[]).is_err());
    }
}
