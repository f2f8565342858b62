use std::str::FromStr;

use f13_core::numerics::{Grid, Table};
use f13_core::state::{Field, FieldSet};

use crate::config::RawConfig;
use crate::error::CliError;

/// Numeric table rendered as comma-separated text with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Csv {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses a header line followed by numeric rows. Blank lines and `#` lines are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (_, head) = lines.next().ok_or_else(|| CliError::Input("empty table".into()))?;
        let header: Vec<String> = head.split(',').map(|h| h.trim().to_string()).collect();
        let mut csv = Self { header, rows: Vec::new() };
        for (n, line) in lines {
            let row = line
                .split(',')
                .map(|c| f64::from_str(c.trim()))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| CliError::Input(format!("line {}: {e}", n + 1)))?;
            if row.len() != csv.header.len() {
                return Err(CliError::Input(format!(
                    "line {}: {} cells for {} columns",
                    n + 1,
                    row.len(),
                    csv.header.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Input(format!("line {}: non-finite value", n + 1)));
            }
            csv.rows.push(row);
        }
        Ok(csv)
    }
}

/// Uniform grid matching sampled coordinates, or an input error.
pub fn uniform_grid(z: &[f64]) -> Result<Grid, CliError> {
    if z.len() < 5 {
        return Err(CliError::Input(format!("at least 5 grid points required, got {}", z.len())));
    }
    let n = z.len() - 1;
    let grid = Grid::new(z[0], z[n], n).map_err(|e| CliError::Input(e.to_string()))?;
    for (i, v) in z.iter().enumerate() {
        if (v - grid.point(i)).abs() > 1e-6 * grid.h() {
            return Err(CliError::Input(format!("grid is not uniform at row {}", i + 1)));
        }
    }
    Ok(grid)
}

/// Scale factor samples from a `z,F` table.
pub fn scale_table(text: &str) -> Result<Table, CliError> {
    let csv = Csv::parse(text)?;
    let (z, f) = match (csv.column("z"), csv.column("F")) {
        (Some(z), Some(f)) if csv.header.len() == 2 => (z, f),
        _ => return Err(CliError::Input("scale table must have exactly the columns z,F".into())),
    };
    Table::new(z, f).map_err(|e| CliError::Input(e.to_string()))
}

/// Gridded state samples: coordinate, frame scale and the named fields.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTable {
    pub grid: Grid,
    pub scale: Vec<f64>,
    pub values: Vec<FieldSet>,
}

/// Columns `z`, `F` and any subset of field names; missing fields are zero.
pub fn state_table(text: &str) -> Result<StateTable, CliError> {
    let csv = Csv::parse(text)?;
    let z = csv.column("z").ok_or_else(|| CliError::Input("state table lacks a `z` column".into()))?;
    let scale = csv.column("F").ok_or_else(|| CliError::Input("state table lacks an `F` column".into()))?;
    let mut fields = Vec::new();
    for (k, name) in csv.header.iter().enumerate() {
        if name == "z" || name == "F" {
            continue;
        }
        let f = Field::from_str(name).map_err(|e| CliError::Input(e.to_string()))?;
        if f.is_derived() {
            return Err(CliError::Input(format!("column `{name}` is fixed by the trace-free constraint")));
        }
        if fields.iter().any(|(g, _)| *g == f) {
            return Err(CliError::Input(format!("column `{name}` repeated")));
        }
        fields.push((f, k));
    }
    let grid = uniform_grid(&z)?;
    let mut values = Vec::with_capacity(csv.rows.len());
    for row in &csv.rows {
        let mut set = FieldSet::default();
        for &(f, k) in &fields {
            set.set(f, row[k]).map_err(|e| CliError::Input(e.to_string()))?;
        }
        values.push(set);
    }
    Ok(StateTable { grid, scale, values })
}

/// `name = value` lines naming fields, optionally under a `[state]` header.
pub fn state_file(text: &str) -> Result<FieldSet, CliError> {
    let raw = RawConfig::parse(text)?;
    let mut set = FieldSet::default();
    let mut errors = Vec::new();
    for key in raw.keys() {
        let name = key.strip_prefix("state.").unwrap_or(key);
        if name.contains('.') {
            errors.push(format!("{key}: unexpected section"));
            continue;
        }
        let value = raw.get(key).unwrap_or_default();
        match (Field::from_str(name), value.parse::<f64>()) {
            (Ok(f), Ok(v)) => {
                if let Err(e) = set.set(f, v) {
                    errors.push(format!("{key}: {e}"));
                }
            }
            (Err(e), _) => errors.push(format!("{key}: {e}")),
            (_, Err(_)) => errors.push(format!("{key}: `{value}` is not a number")),
        }
    }
    if errors.is_empty() {
        Ok(set)
    } else {
        Err(CliError::Input(errors.join("; ")))
    }
}
