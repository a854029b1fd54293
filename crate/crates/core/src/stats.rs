//! Synchronization error statistics and the three per-run output files:
//! a summary line, an error distribution and the raw deviation vector.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::Path;

use crate::net::NodeId;
use crate::time::{SimTime, PS_PER_NS};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const SUMMARY_HEADER: &str =
    "scenario,seed,up_mbps,down_mbps,qos,algo,slaves,mean_ns,std_ns,min_ns,max_ns,samples,timeouts";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorSample {
    pub t: SimTime,
    pub slave: NodeId,
    /// Slave software clock minus master software clock, picoseconds.
    pub error_ps: i64,
    /// Slave software clock minus true time, picoseconds.
    pub true_error_ps: i64,
}

/// Per-run sample store. Samples taken before a slave's first completed
/// exchange are warm-up and are excluded from everything it reports.
#[derive(Debug, Default, Clone)]
pub struct StatsCollector {
    samples: Vec<ErrorSample>,
    warmup_end: BTreeMap<NodeId, SimTime>,
    timeouts: u64,
}

impl StatsCollector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_error(&mut self, t: SimTime, slave: NodeId, error_ps: i64, true_error_ps: i64) {
        self.samples.push(ErrorSample {
            t,
            slave,
            error_ps,
            true_error_ps,
        });
    }

    /// Marks the end of warm-up for `slave` on its first completed exchange.
    pub fn exchange_completed(&mut self, slave: NodeId, t: SimTime) {
        self.warmup_end.entry(slave).or_insert(t);
    }

    pub fn add_timeout(&mut self) {
        self.timeouts += 1;
    }

    pub fn timeouts(&self) -> u64 {
        self.timeouts
    }

    pub fn all_samples(&self) -> &[ErrorSample] {
        &self.samples
    }

    pub fn steady_samples(&self) -> impl Iterator<Item = &ErrorSample> + '_ {
        self.samples.iter().filter(move |s| {
            self.warmup_end
                .get(&s.slave)
                .is_some_and(|start| s.t >= *start)
        })
    }

    pub fn summarize(&self, meta: RunMeta) -> SummaryRecord {
        let errors: Vec<i64> = self.steady_samples().map(|s| s.error_ps).collect();
        SummaryRecord::from_errors(meta, &errors, self.timeouts)
    }

    pub fn histogram(&self, bin_width_ps: u64) -> Vec<(f64, f64)> {
        let errors: Vec<i64> = self.steady_samples().map(|s| s.error_ps).collect();
        histogram(&errors, bin_width_ps)
    }
}

/// Labels carried into the summary line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub scenario: String,
    pub seed: u64,
    pub up_mbps: f64,
    pub down_mbps: f64,
    pub qos: String,
    pub algo: String,
    pub slaves: usize,
}

/// Statistics over `|error|`, in nanoseconds. With zero samples the numeric
/// fields are NaN and `samples == 0` flags the record.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRecord {
    pub meta: RunMeta,
    pub mean_ns: f64,
    pub std_ns: f64,
    pub min_ns: f64,
    pub max_ns: f64,
    pub samples: usize,
    pub timeouts: u64,
}

impl SummaryRecord {
    pub fn from_errors(meta: RunMeta, errors_ps: &[i64], timeouts: u64) -> Self {
        let n = errors_ps.len();
        if n == 0 {
            return SummaryRecord {
                meta,
                mean_ns: f64::NAN,
                std_ns: f64::NAN,
                min_ns: f64::NAN,
                max_ns: f64::NAN,
                samples: 0,
                timeouts,
            };
        }
        let abs: Vec<f64> = errors_ps.iter().map(|e| e.unsigned_abs() as f64).collect();
        let mean = abs.iter().sum::<f64>() / n as f64;
        let var = abs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let min = errors_ps.iter().map(|e| e.unsigned_abs()).min().expect("non-empty");
        let max = errors_ps.iter().map(|e| e.unsigned_abs()).max().expect("non-empty");
        let ns = PS_PER_NS as f64;
        SummaryRecord {
            meta,
            mean_ns: mean / ns,
            std_ns: var.sqrt() / ns,
            min_ns: min as f64 / ns,
            max_ns: max as f64 / ns,
            samples: n,
            timeouts,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.samples == 0
    }

    pub fn csv_line(&self) -> String {
        let m = &self.meta;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            m.scenario,
            m.seed,
            m.up_mbps,
            m.down_mbps,
            m.qos,
            m.algo,
            m.slaves,
            fmt_ns(self.mean_ns),
            fmt_ns(self.std_ns),
            fmt_ns(self.min_ns),
            fmt_ns(self.max_ns),
            self.samples,
            self.timeouts
        )
    }
}

fn fmt_ns(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else {
        format!("{v:.3}")
    }
}

/// Probability mass over signed error with half-open bins `[k*w, (k+1)*w)`.
/// Returns `(bin_center_ns, probability)` in ascending bin order.
pub fn histogram(errors_ps: &[i64], bin_width_ps: u64) -> Vec<(f64, f64)> {
    assert!(bin_width_ps > 0, "bin width must be positive");
    let w = bin_width_ps as i64;
    let mut bins: BTreeMap<i64, u64> = BTreeMap::new();
    for e in errors_ps {
        *bins.entry(e.div_euclid(w)).or_default() += 1;
    }
    let n = errors_ps.len() as f64;
    bins.into_iter()
        .map(|(k, c)| {
            let center_ps = k as f64 * w as f64 + w as f64 / 2.0;
            (center_ps / PS_PER_NS as f64, c as f64 / n)
        })
        .collect()
}

/// Everything written for one run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub run_id: String,
    pub summary: SummaryRecord,
    pub pdf: Vec<(f64, f64)>,
    /// `(time_ps, slave name, error_ps, true_error_ps)`.
    pub vector: Vec<(u64, String, i64, i64)>,
    pub true_time_columns: bool,
}

impl RunReport {
    pub fn pdf_csv(&self) -> String {
        let mut out = String::from("bin_center_ns,probability\n");
        for (center, p) in &self.pdf {
            let _ = writeln!(out, "{center:.3},{p:.12}");
        }
        out
    }

    pub fn vector_csv(&self) -> String {
        let mut out = String::with_capacity(self.vector.len() * 32);
        if self.true_time_columns {
            out.push_str("time_ps,slave,error_ps,true_error_ps\n");
        } else {
            out.push_str("time_ps,slave,error_ps\n");
        }
        for (t, slave, e, te) in &self.vector {
            if self.true_time_columns {
                let _ = writeln!(out, "{t},{slave},{e},{te}");
            } else {
                let _ = writeln!(out, "{t},{slave},{e}");
            }
        }
        out
    }

    /// Writes `pdf_<id>.csv` and `vector_<id>.csv`, then appends one line to
    /// `summary.csv`. The summary line is only written if both files succeed.
    pub fn write_outputs(&self, out_dir: &Path) -> io::Result<()> {
        fs::create_dir_all(out_dir)?;
        fs::write(out_dir.join(format!("pdf_{}.csv", self.run_id)), self.pdf_csv())?;
        fs::write(
            out_dir.join(format!("vector_{}.csv", self.run_id)),
            self.vector_csv(),
        )?;
        append_summary(out_dir, &self.summary)
    }
}

pub fn append_summary(out_dir: &Path, summary: &SummaryRecord) -> io::Result<()> {
    let path = out_dir.join(SUMMARY_FILE);
    let mut file = OpenOptions::new().create(true).append(true).open(&path)?;
    let mut chunk = String::new();
    if file.metadata()?.len() == 0 {
        chunk.push_str(SUMMARY_HEADER);
        chunk.push('\n');
    }
    chunk.push_str(&summary.csv_line());
    chunk.push('\n');
    file.write_all(chunk.as_bytes())
}
