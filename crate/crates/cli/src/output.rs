//! CSV artifacts: `#` metadata lines, one header row, numbers with 17
//! significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use decohere_core::series::format_number;
use decohere_core::{DecoherenceParams, TimeSeries};

use crate::error::{CliError, CliResult};

/// Table whose first column need not be time.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write<W: Write>(&self, mut w: W, metadata: &[String]) -> io::Result<()> {
        for line in metadata {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

pub enum Artifact {
    Series(TimeSeries),
    Table(Table),
}

/// A finished result: metadata plus data.
pub struct Report {
    pub metadata: Vec<String>,
    pub data: Artifact,
}

impl Report {
    pub fn write_to(&self, out: Option<&Path>) -> CliResult<()> {
        let result = match out {
            Some(path) => {
                let file = File::create(path)
                    .map_err(|e| CliError::config(format!("cannot create {}: {e}", path.display())))?;
                let mut w = BufWriter::new(file);
                self.write(&mut w).and_then(|_| w.flush())
            }
            None => {
                let stdout = io::stdout();
                let mut w = BufWriter::new(stdout.lock());
                self.write(&mut w).and_then(|_| w.flush())
            }
        };
        result.map_err(|e| CliError::numeric(format!("writing output failed: {e}")))
    }

    fn write<W: Write>(&self, w: W) -> io::Result<()> {
        match &self.data {
            Artifact::Series(s) => s.write_csv(w, &self.metadata),
            Artifact::Table(t) => t.write(w, &self.metadata),
        }
    }
}

pub fn num(x: f64) -> String {
    format_number(x)
}

/// Standard leading metadata lines.
pub fn header(command: &str, params: Option<&DecoherenceParams>) -> Vec<String> {
    let mut lines = vec![format!("decohere {} {command}", decohere_core::VERSION)];
    if let Some(p) = params {
        lines.push(format!("hbar = {}, tau1 = {}, tau2 = {}", num(p.hbar()), num(p.tau1()), num(p.tau2())));
    }
    lines
}

/// Note for grids whose spacing is not a whole number of cronons; the law is
/// still evaluated at every grid time.
pub fn cronon_note(times: &[f64], params: &DecoherenceParams) -> Option<String> {
    if times.len() < 2 {
        return None;
    }
    let step = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let k = step / params.tau2();
    if (k - k.round()).abs() <= 1e-9 * k.max(1.0) && k.round() >= 1.0 {
        None
    } else {
        Some(format!(
            "note: time step {} is not a multiple of tau2 = {}; values off the cronon grid come from the continuous-time law",
            num(step),
            num(params.tau2())
        ))
    }
}
