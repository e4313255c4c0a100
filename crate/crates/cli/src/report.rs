//! Rendered command output.
//!
//! A [`Report`] is a list of named sections, each a small table. The same
//! cells back all three formats: tables show the display strings, JSON
//! carries each figure as `{"value", "display"}`, CSV carries raw values.

use std::fmt::Write as _;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Number {
    Float(f64),
    Int(u128),
}

impl Number {
    fn raw(&self) -> String {
        match self {
            Number::Float(v) => serde_json::to_string(v).unwrap_or_else(|_| "null".into()),
            Number::Int(v) => v.to_string(),
        }
    }
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Number::Float(v) => s.serialize_f64(*v),
            Number::Int(v) => s.serialize_u128(*v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Figure { value: Number, display: String },
    Text(String),
    Flag(bool),
}

impl Cell {
    pub fn rate(bps: f64) -> Cell {
        Cell::Figure {
            value: Number::Float(bps),
            display: format_rate(bps),
        }
    }

    pub fn exact_rate(bps: u128) -> Cell {
        Cell::Figure {
            value: Number::Int(bps),
            display: format_rate(bps as f64),
        }
    }

    pub fn count(value: u64, unit: &str) -> Cell {
        let display = if unit.is_empty() {
            group_thousands(u128::from(value))
        } else {
            format!("{} {unit}", group_thousands(u128::from(value)))
        };
        Cell::Figure {
            value: Number::Int(u128::from(value)),
            display,
        }
    }

    pub fn real(value: f64, decimals: usize, unit: &str) -> Cell {
        let display = if unit.is_empty() {
            format!("{value:.decimals$}")
        } else {
            format!("{value:.decimals$} {unit}")
        };
        Cell::Figure {
            value: Number::Float(value),
            display,
        }
    }

    pub fn text(value: impl Into<String>) -> Cell {
        Cell::Text(value.into())
    }

    pub fn display(&self) -> String {
        match self {
            Cell::Figure { display, .. } => display.clone(),
            Cell::Text(t) => t.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Figure { value, .. } => value.raw(),
            Cell::Text(t) => csv_escape(t),
            Cell::Flag(b) => b.to_string(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Figure { value, display } => {
                let mut st = s.serialize_struct("Figure", 2)?;
                st.serialize_field("value", value)?;
                st.serialize_field("display", display)?;
                st.end()
            }
            Cell::Text(t) => s.serialize_str(t),
            Cell::Flag(b) => s.serialize_bool(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Section {
    pub fn new(name: &'static str, columns: Vec<&'static str>) -> Self {
        Section {
            name,
            columns,
            rows: Vec::new(),
        }
    }

    /// One-row section from `(column, cell)` pairs.
    pub fn record(name: &'static str, fields: Vec<(&'static str, Cell)>) -> Self {
        let (columns, row) = fields.into_iter().unzip();
        Section {
            name,
            columns,
            rows: vec![row],
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

struct RowRef<'a> {
    columns: &'a [&'static str],
    cells: &'a [Cell],
}

impl Serialize for RowRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.columns.len()))?;
        for (column, cell) in self.columns.iter().zip(self.cells) {
            map.serialize_entry(column, cell)?;
        }
        map.end()
    }
}

impl Serialize for Section {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<RowRef> = self
            .rows
            .iter()
            .map(|cells| RowRef {
                columns: &self.columns,
                cells,
            })
            .collect();
        let mut st = s.serialize_struct("Section", 2)?;
        st.serialize_field("name", self.name)?;
        st.serialize_field("rows", &rows)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            sections: Vec::new(),
        }
    }

    pub fn with(mut self, section: Section) -> Self {
        self.sections.push(section);
        self
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Table => self.to_table(),
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialises");
        out.push('\n');
        out
    }

    /// Sections are separated by a blank line; each starts with its header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (i, section) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&section.columns.join(","));
            out.push('\n');
            for row in &section.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for (i, section) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "[{}]", section.name);
            if section.rows.len() == 1 {
                let width = section.columns.iter().map(|c| c.len()).max().unwrap_or(0);
                for (column, cell) in section.columns.iter().zip(&section.rows[0]) {
                    let _ = writeln!(out, "  {column:<width$}  {}", cell.display());
                }
                continue;
            }
            let rendered: Vec<Vec<String>> = section
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::display).collect())
                .collect();
            let widths: Vec<usize> = section
                .columns
                .iter()
                .enumerate()
                .map(|(c, name)| {
                    rendered
                        .iter()
                        .map(|r| r[c].chars().count())
                        .max()
                        .unwrap_or(0)
                        .max(name.len())
                })
                .collect();
            let line = |cells: Vec<&str>| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                format!("  {}", padded.join("  ").trim_end())
            };
            let _ = writeln!(out, "{}", line(section.columns.clone()));
            for row in &rendered {
                let _ = writeln!(out, "{}", line(row.iter().map(String::as_str).collect()));
            }
        }
        out
    }
}

/// Bits per second with two decimals in the largest unit not above the value.
pub fn format_rate(bps: f64) -> String {
    let (scale, unit) = if bps.abs() >= 1e9 {
        (1e9, "Gbit/s")
    } else if bps.abs() >= 1e6 {
        (1e6, "Mbit/s")
    } else if bps.abs() >= 1e3 {
        (1e3, "kbit/s")
    } else {
        (1.0, "bit/s")
    };
    format!("{:.2} {unit}", bps / scale)
}

pub fn group_thousands(value: u128) -> String {
    let digits = value.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

/// `12:1`, `2.4:1`.
pub fn format_ratio(ratio: f64) -> String {
    let text = format!("{ratio:.3}");
    let text = text.trim_end_matches('0').trim_end_matches('.');
    format!("{text}:1")
}

fn csv_escape(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_display() {
        assert_eq!(format_rate(57_443_601.0), "57.44 Mbit/s");
        assert_eq!(format_rate(9.84e9), "9.84 Gbit/s");
        assert_eq!(format_rate(288_675.13), "288.68 kbit/s");
        assert_eq!(format_rate(12.0), "12.00 bit/s");
        assert_eq!(format_rate(0.0), "0.00 bit/s");
    }

    #[test]
    fn thousands() {
        assert_eq!(group_thousands(1_488_095), "1,488,095");
        assert_eq!(group_thousands(812), "812");
        assert_eq!(group_thousands(0), "0");
        assert_eq!(group_thousands(100_000), "100,000");
    }

    #[test]
    fn ratios() {
        assert_eq!(format_ratio(12.0), "12:1");
        assert_eq!(format_ratio(2.4), "2.4:1");
        assert_eq!(format_ratio(1.0 / 3.0), "0.333:1");
    }

    fn sample() -> Report {
        let mut groups = Section::new("groups", vec!["node", "ratio"]);
        groups.push(vec![Cell::text("a,1"), Cell::real(2.5, 1, "")]);
        groups.push(vec![Cell::text("b"), Cell::real(12.0, 1, "")]);
        Report::new("demo")
            .with(Section::record(
                "summary",
                vec![
                    ("rate", Cell::rate(1e9)),
                    ("frames", Cell::count(81_274, "f/s")),
                ],
            ))
            .with(groups)
    }

    #[test]
    fn json_layout() {
        let json: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(json["command"], "demo");
        assert_eq!(json["sections"][0]["rows"][0]["rate"]["value"], 1e9);
        assert_eq!(
            json["sections"][0]["rows"][0]["rate"]["display"],
            "1.00 Gbit/s"
        );
        assert_eq!(json["sections"][0]["rows"][0]["frames"]["value"], 81_274);
        assert_eq!(json["sections"][1]["rows"][1]["node"], "b");
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            sample().to_csv(),
            "rate,frames\n1000000000.0,81274\n\nnode,ratio\n\"a,1\",2.5\nb,12.0\n"
        );
    }

    #[test]
    fn table_layout() {
        let table = sample().to_table();
        assert!(table.contains("[summary]\n  rate    1.00 Gbit/s\n  frames  81,274 f/s\n"));
        assert!(table.contains("  node  ratio\n  a,1   2.5\n  b     12.0\n"));
    }
}
