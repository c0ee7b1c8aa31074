use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::runner::ResultRow;

pub const HEADER: [&str; 9] = [
    "scenario",
    "sweep_value",
    "architecture",
    "radiation_model",
    "trial",
    "objective_bps_hz",
    "group_min_rates",
    "iterations",
    "wall_ms",
];

fn fmt_float(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn write_csv_to<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        let minima: Vec<String> = r.group_min_rates.iter().map(|&v| fmt_float(v)).collect();
        w.write_record([
            r.scenario.clone(),
            fmt_float(r.sweep_value),
            r.architecture.to_string(),
            r.radiation_model
                .map_or_else(|| "none".to_string(), |m| m.to_string()),
            r.trial.to_string(),
            fmt_float(r.objective),
            minima.join(";"),
            r.iterations.to_string(),
            r.wall_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    write_csv_to(rows, File::create(path)?)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Input(format!("line {line}: bad {} field", HEADER[i])))
}

pub fn read_csv_from<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(HEADER) {
        return Err(Error::Input(format!(
            "unexpected header, expected {}",
            HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let radiation = match rec.get(3) {
            Some("none") => None,
            Some(s) => Some(s.parse()?),
            None => {
                return Err(Error::Input(format!(
                    "line {line}: missing radiation_model"
                )))
            }
        };
        let minima = match rec.get(6) {
            Some("") | None => Vec::new(),
            Some(s) => s
                .split(';')
                .map(|v| {
                    v.parse()
                        .map_err(|_| Error::Input(format!("line {line}: bad group rate '{v}'")))
                })
                .collect::<Result<_>>()?,
        };
        rows.push(ResultRow {
            scenario: rec.get(0).unwrap_or_default().to_string(),
            sweep_value: field(&rec, 1, line)?,
            architecture: rec.get(2).unwrap_or_default().parse()?,
            radiation_model: radiation,
            trial: field(&rec, 4, line)?,
            objective: field(&rec, 5, line)?,
            group_min_rates: minima,
            iterations: field(&rec, 7, line)?,
            wall_ms: field(&rec, 8, line)?,
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    read_csv_from(File::open(path)?)
}
