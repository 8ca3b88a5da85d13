//! Presentation tables rendered from a Pareto front CSV.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use dctapprox::fmt::fixed2;
use dctapprox::jam::build_scaled;
use dctapprox::metrics::{quality, SignalModel};
use dctapprox::params::ParamVector;
use dctapprox::transform::is_feasible;

use crate::error::{CliError, WithPath};

/// One row of a front CSV as written by `search`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontRow {
    pub rank: usize,
    pub a: ParamVector,
    pub epsilon: f64,
    pub mse: f64,
    pub cg: f64,
    pub eta: f64,
    pub adds: u32,
    pub shifts: u32,
    pub rule: String,
}

#[derive(Deserialize)]
struct RawRow {
    rank: usize,
    a1: f64,
    a2: f64,
    a3: f64,
    a4: f64,
    a5: f64,
    a6: f64,
    a7: f64,
    a8: f64,
    epsilon: f64,
    mse: f64,
    cg: f64,
    eta: f64,
    adds: u32,
    shifts: u32,
    rule: String,
}

pub fn read_front<R: Read>(input: R) -> Result<Vec<FrontRow>, CliError> {
    let mut reader = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for (line, record) in reader.deserialize::<RawRow>().enumerate() {
        let r = record.map_err(|e| CliError::usage(format!("front CSV row {}: {e}", line + 1)))?;
        let a = ParamVector::from_f64s([r.a1, r.a2, r.a3, r.a4, r.a5, r.a6, r.a7, r.a8])
            .map_err(|e| CliError::usage(format!("front CSV row {}: {e}", line + 1)))?;
        rows.push(FrontRow {
            rank: r.rank,
            a,
            epsilon: r.epsilon,
            mse: r.mse,
            cg: r.cg,
            eta: r.eta,
            adds: r.adds,
            shifts: r.shifts,
            rule: r.rule,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// File stem, e.g. `table2`.
    pub name: String,
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn markdown(&self) -> String {
        let mut out = format!("### {}\n\n", self.title);
        out.push_str(&format!("| {} |\n", self.header.join(" | ")));
        let rule: Vec<&str> = self.header.iter().map(|_| "---:").collect();
        out.push_str(&format!("|{}|\n", rule.join("|")));
        for row in &self.rows {
            out.push_str(&format!("| {} |\n", row.join(" | ")));
        }
        out
    }

    pub fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::usage(e.to_string());
        w.write_record(&self.header).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

const METRIC_COLS: [&str; 7] = ["j", "epsilon", "mse", "cg", "eta", "adds", "shifts"];

fn parameter_table(rows: &[FrontRow]) -> Table {
    let mut head = vec!["j"];
    head.extend(["a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8"]);
    Table {
        name: "table1".into(),
        title: "Optimal 8-point parameter vectors".into(),
        header: header(&head),
        rows: rows
            .iter()
            .map(|r| {
                let mut cells = vec![r.rank.to_string()];
                cells.extend(r.a.0.iter().map(|d| d.to_string()));
                cells
            })
            .collect(),
    }
}

fn metrics_table(rows: &[FrontRow]) -> Table {
    Table {
        name: "table2".into(),
        title: "8-point approximations".into(),
        header: header(&METRIC_COLS),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.rank.to_string(),
                    fixed2(r.epsilon),
                    fixed2(r.mse),
                    fixed2(r.cg),
                    fixed2(r.eta),
                    r.adds.to_string(),
                    r.shifts.to_string(),
                ]
            })
            .collect(),
    }
}

fn scaled_table(rows: &[FrontRow], size: usize, name: &str, rho: f64) -> Result<Table, CliError> {
    let model = SignalModel::new(rho, size)?;
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        // fronts searched without the feasibility filter can hold seeds that do not scale
        if !is_feasible(&r.a) {
            let mut cells = vec![r.rank.to_string()];
            cells.extend(std::iter::repeat_n("-".to_string(), 6));
            out.push(cells);
            continue;
        }
        let s = build_scaled(&r.a, size)?;
        let q = quality(&s.transform.to_real(), &model)?;
        out.push(vec![
            r.rank.to_string(),
            fixed2(q.epsilon),
            fixed2(q.mse),
            fixed2(q.coding_gain_db),
            fixed2(q.efficiency_pct),
            s.complexity.additions.to_string(),
            s.complexity.shifts.to_string(),
        ]);
    }
    Ok(Table {
        name: name.into(),
        title: format!("{size}-point approximations"),
        header: header(&METRIC_COLS),
        rows: out,
    })
}

/// Parameter table, 8-point metrics, and the 16- and 32-point scaled metrics.
pub fn render_tables(rows: &[FrontRow], rho: f64) -> Result<Vec<Table>, CliError> {
    Ok(vec![
        parameter_table(rows),
        metrics_table(rows),
        scaled_table(rows, 16, "table4", rho)?,
        scaled_table(rows, 32, "table6", rho)?,
    ])
}

/// Renders `front_csv` into `<out_dir>/<table>.md` and `.csv`; returns the files written.
pub fn report_tables(front_csv: &Path, out_dir: &Path, rho: f64) -> Result<Vec<PathBuf>, CliError> {
    let file = fs::File::open(front_csv).at(front_csv)?;
    let rows = read_front(file).map_err(|e| CliError::usage(format!("{}: {e}", front_csv.display())))?;
    let tables = render_tables(&rows, rho)?;
    fs::create_dir_all(out_dir).at(out_dir)?;
    let mut written = Vec::new();
    for t in &tables {
        for (ext, body) in [("md", t.markdown()), ("csv", t.csv()?)] {
            let path = out_dir.join(format!("{}.{ext}", t.name));
            fs::write(&path, body).at(&path)?;
            written.push(path);
        }
    }
    Ok(written)
}
