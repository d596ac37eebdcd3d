//! Report and summary CSVs, confidence intervals and plot scripts.

use std::fmt::Write as _;

use mau_core::metrics::{CostMode, RunReport};
use mau_core::routing::{Protocol, Ttl};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

pub const REPORT_HEADER: &str = "protocol,ttl_s,seed,created,delivered,delivery_prob,transmissions,cost,latency_mean_s";
pub const SUMMARY_HEADER: &str = "protocol,ttl_s,runs,delivery_prob_mean,delivery_prob_ci_halfwidth,\
cost_mean,cost_ci_halfwidth,latency_mean_s_mean,latency_mean_s_ci_halfwidth";

/// Mean and 95% Student-t half-width; the half-width needs two samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub n: usize,
    pub mean: f64,
    pub half_width: Option<f64>,
}

impl Estimate {
    pub fn lo(&self) -> f64 {
        self.mean - self.half_width.unwrap_or(0.0)
    }

    pub fn hi(&self) -> f64 {
        self.mean + self.half_width.unwrap_or(0.0)
    }

    pub fn overlaps(&self, other: &Estimate) -> bool {
        self.lo() <= other.hi() && other.lo() <= self.hi()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("a confidence interval needs at least 2 samples, got {0}")]
pub struct TooFewSamples(pub usize);

pub fn t_quantile(p: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df).expect("df > 0").inverse_cdf(p)
}

/// `(mean, half-width)` of the 95% interval.
pub fn confidence_interval(samples: &[f64]) -> Result<(f64, f64), TooFewSamples> {
    let n = samples.len();
    if n < 2 {
        return Err(TooFewSamples(n));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Ok((mean, 0.0));
    }
    Ok((mean, t_quantile(0.975, (n - 1) as f64) * (var / n as f64).sqrt()))
}

pub fn estimate(samples: &[f64]) -> Option<Estimate> {
    let n = samples.len();
    if n == 0 {
        return None;
    }
    Some(match confidence_interval(samples) {
        Ok((mean, hw)) => Estimate {
            n,
            mean,
            half_width: Some(hw),
        },
        Err(_) => Estimate {
            n,
            mean: samples[0],
            half_width: None,
        },
    })
}

/// Lines written as `#` comments ahead of the CSV header.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Preamble {
    pub scenario: String,
    pub scenario_sha256: String,
    pub cost_mode: CostMode,
    pub warnings: Vec<String>,
}

impl Preamble {
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# scenario {}", self.scenario).unwrap();
        writeln!(out, "# scenario_sha256 {}", self.scenario_sha256).unwrap();
        writeln!(out, "# cost_mode {}", self.cost_mode.label()).unwrap();
        for w in &self.warnings {
            writeln!(out, "# warning: {w}").unwrap();
        }
        out
    }
}

fn opt(v: Option<f64>, digits: usize) -> String {
    match v {
        Some(v) => format!("{v:.digits$}"),
        None => "NA".into(),
    }
}

pub fn report_row(r: &RunReport, mode: CostMode) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.protocol.label(),
        r.ttl.csv_value(),
        r.seed,
        r.created,
        r.delivered,
        opt(r.delivery_probability(), 6),
        r.transmissions,
        opt(r.cost(mode), 6),
        opt(r.latency_mean_ms().map(|ms| ms / 1000.0), 3),
    )
}

pub fn report_csv(preamble: &Preamble, reports: &[RunReport]) -> String {
    let mut out = preamble.render();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&report_row(r, preamble.cost_mode));
        out.push('\n');
    }
    out
}

/// Aggregate of all seeds of one (protocol, TTL) cell. Runs where a metric
/// is undefined do not contribute to that metric.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSummary {
    pub protocol: Protocol,
    pub ttl: Ttl,
    pub runs: usize,
    pub delivery: Option<Estimate>,
    pub cost: Option<Estimate>,
    pub latency_s: Option<Estimate>,
}

/// Groups reports by (protocol, TTL) in order of first appearance.
pub fn summarize(reports: &[RunReport], mode: CostMode) -> Vec<CellSummary> {
    let mut keys: Vec<(Protocol, Ttl)> = Vec::new();
    for r in reports {
        if !keys.contains(&(r.protocol, r.ttl)) {
            keys.push((r.protocol, r.ttl));
        }
    }
    keys.into_iter()
        .map(|(protocol, ttl)| {
            let cell: Vec<&RunReport> = reports.iter().filter(|r| r.protocol == protocol && r.ttl == ttl).collect();
            let metric = |f: &dyn Fn(&RunReport) -> Option<f64>| {
                let xs: Vec<f64> = cell.iter().filter_map(|r| f(r)).collect();
                estimate(&xs)
            };
            CellSummary {
                protocol,
                ttl,
                runs: cell.len(),
                delivery: metric(&|r| r.delivery_probability()),
                cost: metric(&|r| r.cost(mode)),
                latency_s: metric(&|r| r.latency_mean_ms().map(|ms| ms / 1000.0)),
            }
        })
        .collect()
}

fn est(e: Option<Estimate>) -> String {
    match e {
        Some(Estimate {
            mean,
            half_width: Some(hw),
            ..
        }) => format!("{mean:.6},{hw:.6}"),
        Some(e) => format!("{:.6},NA", e.mean),
        None => "NA,NA".into(),
    }
}

pub fn summary_csv(preamble: &Preamble, cells: &[CellSummary]) -> String {
    let mut out = preamble.render();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for c in cells {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            c.protocol.label(),
            c.ttl.csv_value(),
            c.runs,
            est(c.delivery),
            est(c.cost),
            est(c.latency_s)
        )
        .unwrap();
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotMetric {
    Delivery,
    Cost,
    Latency,
}

impl PlotMetric {
    pub const ALL: [PlotMetric; 3] = [PlotMetric::Delivery, PlotMetric::Cost, PlotMetric::Latency];

    pub fn file_stem(self) -> &'static str {
        match self {
            PlotMetric::Delivery => "delivery",
            PlotMetric::Cost => "cost",
            PlotMetric::Latency => "latency",
        }
    }

    fn ylabel(self) -> &'static str {
        match self {
            PlotMetric::Delivery => "delivery probability",
            PlotMetric::Cost => "transmissions per delivered message",
            PlotMetric::Latency => "mean latency of delivered messages (s)",
        }
    }

    fn pick(self, c: &CellSummary) -> Option<Estimate> {
        match self {
            PlotMetric::Delivery => c.delivery,
            PlotMetric::Cost => c.cost,
            PlotMetric::Latency => c.latency_s,
        }
    }
}

fn ttl_x(t: Ttl) -> f64 {
    match t {
        Ttl::Time(ms) => ms as f64 / 3_600_000.0,
        Ttl::Hops(h) => h as f64,
    }
}

/// A gnuplot script with the data inline: one series per protocol, x = TTL
/// in hours, error bars = CI half-width.
pub fn plot_script(metric: PlotMetric, cells: &[CellSummary]) -> String {
    let mut out = String::new();
    writeln!(out, "set terminal pngcairo size 800,600").unwrap();
    writeln!(out, "set output '{}.png'", metric.file_stem()).unwrap();
    writeln!(out, "set xlabel 'TTL (h)'").unwrap();
    writeln!(out, "set ylabel '{}'", metric.ylabel()).unwrap();
    writeln!(out, "set logscale x").unwrap();
    writeln!(out, "set key outside right").unwrap();
    writeln!(out, "set grid").unwrap();
    let mut series = Vec::new();
    for p in Protocol::ALL {
        let mut rows: Vec<(f64, Estimate)> = cells
            .iter()
            .filter(|c| c.protocol == p)
            .filter_map(|c| metric.pick(c).map(|e| (ttl_x(c.ttl), e)))
            .collect();
        if rows.is_empty() {
            continue;
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        writeln!(out, "${} << EOD", p.label()).unwrap();
        for (x, e) in rows {
            writeln!(out, "{x} {:.6} {:.6}", e.mean, e.half_width.unwrap_or(0.0)).unwrap();
        }
        writeln!(out, "EOD").unwrap();
        series.push(p);
    }
    if series.is_empty() {
        writeln!(out, "set xrange [1:1000]").unwrap();
        writeln!(out, "set yrange [0:1]").unwrap();
        writeln!(out, "plot NaN notitle").unwrap();
    } else {
        let parts: Vec<String> = series
            .iter()
            .map(|p| format!("${0} using 1:2:3 with yerrorlines title '{0}'", p.label()))
            .collect();
        writeln!(out, "plot {}", parts.join(", \\\n     ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use mau_core::time::MS_PER_HOUR;

    fn report(p: Protocol, hours: u64, seed: u64, delivered: u64) -> RunReport {
        RunReport {
            protocol: p,
            ttl: Ttl::Time(hours * MS_PER_HOUR),
            seed,
            created: 10,
            delivered,
            transmissions: delivered * 3,
            latencies: vec![2000; delivered as usize],
        }
    }

    #[test]
    fn ci_of_one_to_ten() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        let (mean, hw) = confidence_interval(&xs).unwrap();
        assert_eq!(mean, 5.5);
        assert!((hw - 2.166).abs() < 1e-3, "{hw}");
        assert!((t_quantile(0.975, 9.0) - 2.262).abs() < 1e-3);
    }

    #[test]
    fn ci_scales_with_the_samples() {
        let xs = [0.3, 0.9, 0.4, 0.7];
        let (m, h) = confidence_interval(&xs).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| -3.0 * x).collect();
        let (ms, hs) = confidence_interval(&scaled).unwrap();
        assert!((ms + 3.0 * m).abs() < 1e-12);
        assert!((hs - 3.0 * h).abs() < 1e-12);
    }

    #[test]
    fn degenerate_estimates() {
        assert_eq!(estimate(&[]), None);
        assert_eq!(confidence_interval(&[3.0]), Err(TooFewSamples(1)));
        assert_eq!(estimate(&[3.0]).unwrap().half_width, None);
        assert_eq!(confidence_interval(&[0.4; 5]), Ok((0.4, 0.0)));
    }

    #[test]
    fn rows_and_missing_values() {
        let r = report(Protocol::Epidemic, 1, 7, 5);
        assert_eq!(report_row(&r, CostMode::Include), "epidemic,3600,7,10,5,0.500000,15,3.000000,2.000");
        assert_eq!(report_row(&r, CostMode::Exclude), "epidemic,3600,7,10,5,0.500000,15,2.000000,2.000");
        let none = report(Protocol::Prophet, 1, 7, 0);
        assert!(report_row(&none, CostMode::Include).ends_with(",0,NA,NA"));
    }

    #[test]
    fn preamble_comes_first() {
        let p = Preamble {
            scenario: "x".into(),
            scenario_sha256: "ab".into(),
            cost_mode: CostMode::Include,
            warnings: vec!["w".into()],
        };
        let csv = report_csv(&p, &[]);
        assert_eq!(csv, format!("# scenario x\n# scenario_sha256 ab\n# cost_mode include\n# warning: w\n{REPORT_HEADER}\n"));
    }

    #[test]
    fn summary_groups_cells() {
        let mut rs = Vec::new();
        for p in [Protocol::Epidemic, Protocol::SprayAndWait] {
            for h in [1, 6] {
                for s in 1..=2 {
                    rs.push(report(p, h, s, 5));
                }
            }
        }
        let cells = summarize(&rs, CostMode::Include);
        assert_eq!(cells.len(), 4);
        assert!(cells.iter().all(|c| c.runs == 2 && c.delivery.unwrap().half_width == Some(0.0)));
        let csv = summary_csv(&Preamble::default(), &cells);
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 5);
    }

    #[test]
    fn plot_series_and_points() {
        let mut rs = Vec::new();
        for p in Protocol::ALL {
            for h in [1, 6, 24, 48, 96, 168, 504] {
                rs.push(report(p, h, 1, 4));
            }
        }
        let cells = summarize(&rs, CostMode::Include);
        for m in PlotMetric::ALL {
            let s = plot_script(m, &cells);
            assert_eq!(s.matches("<< EOD").count(), 4);
            let points = s.lines().filter(|l| l.split(' ').count() == 3 && l.parse::<f64>().is_err() && l.chars().next().unwrap().is_ascii_digit()).count();
            assert_eq!(points, 28);
            assert!(s.contains(" 0.000000\n"));
        }
    }

    #[test]
    fn empty_plot_still_has_axes() {
        let s = plot_script(PlotMetric::Latency, &[]);
        assert!(s.contains("set xlabel"));
        assert!(s.contains("plot NaN notitle"));
    }
}
