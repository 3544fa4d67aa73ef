use std::io::Write;

use serde::Serialize;

use super::config::QChoice;
use crate::error::Result;
use crate::mechanisms::{balancing_weight, optimal_params, MixtureParams, MixtureRule, InterimMode};
use crate::oracle::compute_ratio_report;
use crate::valuation::{AuctionInstance, Limits};

/// Slack between measured minima and the analytic guarantee.
pub const SWEEP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub q: f64,
    /// Worst case of `q (1 - r)/2 + (1 - q) p (1 - p)(1 + p r)` over `r in [0, 1]`.
    pub analytic: f64,
    /// Smallest ratio over every profile of every instance.
    pub measured: f64,
}

impl SweepRow {
    pub fn holds(&self) -> bool {
        self.measured >= self.analytic - SWEEP_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Grid point with the largest analytic guarantee.
    pub best_p: f64,
    pub optimal_p: f64,
}

impl SweepResult {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(SweepRow::holds)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "q", "analytic", "measured", "holds"])?;
        for r in &self.rows {
            w.write_record([
                r.p.to_string(),
                r.q.to_string(),
                r.analytic.to_string(),
                r.measured.to_string(),
                r.holds().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `0.1, 0.2, ..., 0.9`.
pub fn default_grid() -> Vec<f64> {
    (1..10).map(|k| k as f64 / 10.0).collect()
}

pub fn sweep(instances: &[AuctionInstance], grid: &[f64], q: QChoice, limits: &Limits) -> Result<SweepResult> {
    let mut rows = Vec::with_capacity(grid.len());
    for &p in grid {
        let q = match q {
            QChoice::Optimal => balancing_weight(p),
            QChoice::Fixed(q) => q,
        };
        let params = MixtureParams::new(p, q)?;
        let analytic = params.bound(0.0).min(params.bound(1.0));
        let rule = MixtureRule {
            params,
            mode: InterimMode::exact(),
        };
        let mut measured = f64::INFINITY;
        for inst in instances {
            let report = compute_ratio_report(inst, &rule, "sweep", |_, _| 0.0, limits)?;
            measured = measured.min(report.min_ratio);
        }
        rows.push(SweepRow { p, q, analytic, measured });
    }
    let best_p = rows
        .iter()
        .fold(None::<SweepRow>, |best, r| match best {
            Some(b) if b.analytic >= r.analytic => Some(b),
            _ => Some(*r),
        })
        .map_or(f64::NAN, |r| r.p);
    Ok(SweepResult {
        rows,
        best_p,
        optimal_p: optimal_params().params.p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{worked_instance, worked_instance_three};
    use crate::mechanisms::balanced_ratio;

    #[test]
    fn balanced_sweep_peaks_near_optimum() {
        let insts = [worked_instance(), worked_instance_three()];
        let r = sweep(&insts, &default_grid(), QChoice::Optimal, &Limits::default()).unwrap();
        assert!(r.holds());
        assert!((r.best_p - 0.5).abs() < 1e-12);
        for row in &r.rows {
            assert!((row.analytic - balanced_ratio(row.p)).abs() < 1e-12);
        }
        // A finer grid lands next to p*.
        let fine: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
        let r = sweep(&insts[..1], &fine, QChoice::Optimal, &Limits::default()).unwrap();
        assert!((r.best_p - 0.54).abs() < 1e-12);
    }

    #[test]
    fn zero_weight_is_pure_sampling() {
        let r = sweep(&[worked_instance()], &default_grid(), QChoice::Fixed(0.0), &Limits::default()).unwrap();
        for row in &r.rows {
            assert!((row.analytic - row.p * (1.0 - row.p)).abs() < 1e-12);
            assert!(row.holds());
        }
    }

    #[test]
    fn csv_layout() {
        let r = sweep(&[worked_instance()], &[0.5], QChoice::Optimal, &Limits::default()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("p,q,analytic,measured,holds\n0.5,0.2,"));
        assert!(text.trim_end().ends_with("true"));
    }
}
