//! Benchmark runs over a directory of instances.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::bnb::{solve_instance, MipParams};
use crate::error::Result;
use crate::greedy::solve_greedy;
use crate::instance::{build_cost_matrix, count_instants, ProblemInstance};
use crate::shaking::solve_shaking;
use crate::solution::{greedy_error_pct, validate_tour, BenchRecord, Solution};

pub const CSV_COLUMNS: [&str; 8] = [
    "index",
    "time_shaking_s",
    "time_mip_s",
    "dist_shaking_m",
    "dist_mip_m",
    "dist_greedy_m",
    "greedy_error_pct",
    "n_instants",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverSet {
    pub shaking: bool,
    pub mip: bool,
    pub greedy: bool,
}

impl Default for SolverSet {
    fn default() -> Self {
        Self { shaking: true, mip: true, greedy: true }
    }
}

impl SolverSet {
    /// Parse a comma-separated list such as `mip,greedy`.
    pub fn parse(list: &str) -> Result<Self> {
        let mut set = SolverSet { shaking: false, mip: false, greedy: false };
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name {
                "shaking" | "qma" => set.shaking = true,
                "mip" => set.mip = true,
                "greedy" => set.greedy = true,
                other => return Err(crate::Error::InvalidArgument(format!("unknown solver {other:?}"))),
            }
        }
        Ok(set)
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchOptions {
    pub solvers: SolverSet,
    pub mip_time_limit: Option<Duration>,
}

#[derive(Clone, Debug)]
pub struct BenchTable {
    pub records: Vec<BenchRecord>,
    /// Instance file per record.
    pub files: Vec<PathBuf>,
}

/// Instance files of `dir` (`*.json`), ordered by file name.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

pub fn run_bench(dir: &Path, options: &BenchOptions) -> Result<BenchTable> {
    let files = instance_files(dir)?;
    let mut records = Vec::with_capacity(files.len());
    for (k, file) in files.iter().enumerate() {
        let mut record = BenchRecord { index: (k + 1).to_string(), ..BenchRecord::default() };
        if let Err(e) = bench_one(file, options, &mut record) {
            log::warn!("{}: {e}", file.display());
            record.error = Some(e.to_string());
        }
        records.push(record);
    }
    Ok(BenchTable { records, files })
}

fn bench_one(file: &Path, options: &BenchOptions, record: &mut BenchRecord) -> Result<()> {
    let instance = ProblemInstance::load(file)?;
    let cost = build_cost_matrix(&instance)?;
    let sizes: Vec<usize> = instance.effective_sections().iter().map(Vec::len).collect();
    record.n_instants = u64::try_from(count_instants(&sizes)).ok();

    let check = |sol: &Solution| -> Result<()> { validate_tour(&sol.tour, &instance).into_result() };
    if options.solvers.greedy {
        let sol = solve_greedy(&instance, &cost)?;
        check(&sol)?;
        record.dist_greedy_m = Some(sol.objective);
    }
    if options.solvers.shaking {
        let sol = solve_shaking(&instance, &cost)?;
        check(&sol)?;
        record.time_shaking_s = Some(sol.wall_time);
        record.dist_shaking_m = Some(sol.objective);
    }
    if options.solvers.mip {
        let params = MipParams { time_limit: options.mip_time_limit, ..MipParams::default() };
        let (sol, _) = solve_instance(&instance, &cost, &params)?;
        check(&sol)?;
        record.time_mip_s = Some(sol.wall_time);
        record.dist_mip_m = Some(sol.objective);
    }
    // The shaking optimum stands in when the MIP was not run.
    if let (Some(g), Some(opt)) = (record.dist_greedy_m, record.dist_mip_m.or(record.dist_shaking_m)) {
        record.greedy_error_pct = Some(greedy_error_pct(g, opt)?);
    }
    Ok(())
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation.
fn stdev(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    Some((xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt())
}

impl BenchTable {
    fn column(&self, c: usize) -> Vec<f64> {
        self.records.iter().filter_map(|r| numeric(r, c)).collect()
    }

    pub fn average(&self, c: usize) -> Option<f64> {
        mean(&self.column(c))
    }

    pub fn stdev(&self, c: usize) -> Option<f64> {
        stdev(&self.column(c))
    }

    pub fn has_errors(&self) -> bool {
        self.records.iter().any(|r| r.error.is_some())
    }

    /// Records followed by the Average and STDEV rows, as cell text.
    fn rows(&self, precision: Option<usize>) -> Vec<Vec<String>> {
        let fmt = |v: Option<f64>| match (v, precision) {
            (None, _) => String::new(),
            (Some(x), Some(p)) => format!("{x:.p$}"),
            (Some(x), None) => format!("{x}"),
        };
        let errors = self.has_errors();
        let mut rows = Vec::new();
        for r in &self.records {
            let mut row = vec![r.index.clone()];
            for c in 1..7 {
                row.push(fmt(numeric(r, c)));
            }
            row.push(r.n_instants.map(|v| v.to_string()).unwrap_or_default());
            if errors {
                row.push(r.error.clone().unwrap_or_default());
            }
            rows.push(row);
        }
        for (label, agg) in [("Average", Self::average as fn(&Self, usize) -> Option<f64>), ("STDEV", Self::stdev)] {
            let mut row = vec![label.to_string()];
            for c in 1..8 {
                row.push(fmt(agg(self, c)));
            }
            if errors {
                row.push(String::new());
            }
            rows.push(row);
        }
        rows
    }

    fn header(&self) -> Vec<&'static str> {
        let mut h = CSV_COLUMNS.to_vec();
        if self.has_errors() {
            h.push("error");
        }
        h
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header()).map_err(csv_err)?;
        for row in self.rows(None) {
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Fixed-width table with four decimals.
    pub fn to_text(&self) -> String {
        let header = self.header();
        let rows = self.rows(Some(4));
        let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &rows {
            for (c, cell) in row.iter().enumerate() {
                width[c] = width[c].max(cell.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(c, s)| if c == 0 || c == 8 { format!("{s:<w$}", w = width[c]) } else { format!("{s:>w$}", w = width[c]) })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, &header.iter().map(|s| s.to_string()).collect::<Vec<_>>());
        let rule = "-".repeat(width.iter().sum::<usize>() + 2 * (width.len() - 1));
        let _ = writeln!(out, "{rule}");
        let n = self.records.len();
        for (k, row) in rows.iter().enumerate() {
            if k == n {
                let _ = writeln!(out, "{rule}");
            }
            line(&mut out, row);
        }
        out
    }
}

fn numeric(r: &BenchRecord, c: usize) -> Option<f64> {
    match c {
        1 => r.time_shaking_s,
        2 => r.time_mip_s,
        3 => r.dist_shaking_m,
        4 => r.dist_mip_m,
        5 => r.dist_greedy_m,
        6 => r.greedy_error_pct,
        7 => r.n_instants.map(|v| v as f64),
        _ => None,
    }
}

fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::Io(std::io::Error::other(e))
}
