use std::fmt;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Float(v) => Some(v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Floats carry 17 significant digits so a CSV round-trips every bit.
impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) if v.is_finite() => write!(f, "{v:.16e}"),
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Empty => Ok(()),
        }
    }
}

/// Two columns to draw, optionally on logarithmic axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: &'static str,
    pub y: &'static str,
    pub log_x: bool,
    pub log_y: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub plot: Option<PlotSpec>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
            plot: None,
        }
    }

    pub fn with_plot(mut self, x: &'static str, y: &'static str, log_x: bool, log_y: bool) -> Self {
        self.plot = Some(PlotSpec { x, y, log_x, log_y });
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width for table {}",
            self.name
        );
        self.rows.push(row);
    }

    fn index(&self, column: &str) -> usize {
        self.columns
            .iter()
            .position(|c| *c == column)
            .unwrap_or_else(|| panic!("table {} has no column {column}", self.name))
    }

    pub fn cells(&self, column: &str) -> impl Iterator<Item = &Cell> {
        let i = self.index(column);
        self.rows.iter().map(move |r| &r[i])
    }

    /// Numeric entries of a column; empty and text cells are skipped.
    pub fn floats(&self, column: &str) -> Vec<f64> {
        self.cells(column).filter_map(Cell::as_f64).collect()
    }

    /// Largest numeric entry, NaN propagating; NaN for a column with no
    /// numbers, so a verdict on it cannot pass vacuously.
    pub fn max(&self, column: &str) -> f64 {
        let values = self.floats(column);
        if values.is_empty() {
            return f64::NAN;
        }
        values.into_iter().fold(f64::NEG_INFINITY, |m, v| {
            if v.is_nan() || m.is_nan() {
                f64::NAN
            } else {
                m.max(v)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    /// `value ≤ limit`; NaN fails.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value <= limit, format!("{value:.3e} <= {limit:.3e}"))
    }

    /// `value ≥ limit`; NaN fails.
    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value >= limit, format!("{value:.3e} >= {limit:.3e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        let text = Cell::Float(x).to_string();
        assert_eq!(text, "3.0000000000000004e-1");
        assert_eq!(text.parse::<f64>().unwrap(), x);
        assert_eq!(Cell::Empty.to_string(), "");
        assert_eq!(Cell::from(f64::NAN).to_string(), "NaN");
    }

    #[test]
    fn column_access() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec![1.0.into(), Cell::Empty]);
        t.push(vec![3.0.into(), 2.0.into()]);
        assert_eq!(t.floats("b"), vec![2.0]);
        assert_eq!(t.max("a"), 3.0);
        t.push(vec![f64::NAN.into(), 0.0.into()]);
        assert!(t.max("a").is_nan());
        assert!(Table::new("e", &["x"]).max("x").is_nan());
    }
}
