//! CSV and SVG writers. Files are written next to their destination and
//! renamed into place, so readers never see a partial file.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::table::{PlotSpec, Table};

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

pub fn csv_bytes(table: &Table) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(|c| c.to_string()))
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn write_csv(table: &Table, path: &Path) -> io::Result<()> {
    write_atomic(path, &csv_bytes(table))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

fn axis_value(v: f64, log: bool) -> Option<f64> {
    match (log, v.is_finite()) {
        (_, false) => None,
        (true, _) if v <= 0.0 => None,
        (true, _) => Some(v.log10()),
        (false, _) => Some(v),
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

/// Line-and-marker SVG of two columns. Points that cannot be placed (non-
/// numeric, or nonpositive on a log axis) are left out.
pub fn svg_plot(table: &Table, spec: &PlotSpec) -> String {
    let points: Vec<(f64, f64)> = table
        .cells(spec.x)
        .zip(table.cells(spec.y))
        .filter_map(|(x, y)| {
            Some((
                axis_value(x.as_f64()?, spec.log_x)?,
                axis_value(y.as_f64()?, spec.log_y)?,
            ))
        })
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN / 2.0, HEIGHT - MARGIN, MARGIN / 2.0);
    let _ = writeln!(
        svg,
        r#"<polyline points="{x0},{y1} {x0},{y0} {x1},{y0}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        spec.x,
        if spec.log_x { " (log10)" } else { "" }
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        spec.y,
        if spec.log_y { " (log10)" } else { "" }
    );
    if !points.is_empty() {
        let (xa, xb) = range(points.iter().map(|p| p.0));
        let (ya, yb) = range(points.iter().map(|p| p.1));
        let sx = |v: f64| x0 + (v - xa) / (xb - xa) * (x1 - x0);
        let sy = |v: f64| y0 - (v - ya) / (yb - ya) * (y0 - y1);
        for (v, anchor, px, py) in [
            (xa, "start", sx(xa), y0 + 18.0),
            (xb, "end", sx(xb), y0 + 18.0),
        ] {
            let _ = writeln!(
                svg,
                r#"<text x="{px:.1}" y="{py:.1}" text-anchor="{anchor}">{}</text>"#,
                tick_label(v, spec.log_x)
            );
        }
        for (v, py) in [(ya, sy(ya)), (yb, sy(yb) + 10.0)] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{py:.1}" text-anchor="end">{}</text>"#,
                x0 - 4.0,
                tick_label(v, spec.log_y)
            );
        }
        // A drop in x starts a new series (e.g. the next profile center).
        let mut series: Vec<Vec<String>> = vec![Vec::new()];
        for (i, &(x, y)) in points.iter().enumerate() {
            if i > 0 && x < points[i - 1].0 {
                series.push(Vec::new());
            }
            series
                .last_mut()
                .expect("nonempty")
                .push(format!("{:.2},{:.2}", sx(x), sy(y)));
        }
        for path in series {
            let _ = writeln!(
                svg,
                r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
                path.join(" ")
            );
        }
        for &(x, y) in &points {
            let _ = writeln!(
                svg,
                r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#1f77b4"/>"##,
                sx(x),
                sy(y)
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_plot(table: &Table, spec: &PlotSpec, path: &Path) -> io::Result<()> {
    write_atomic(path, svg_plot(table, spec).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_for_empty_tables() {
        let t = Table::new("empty", &["k", "value"]);
        assert_eq!(csv_bytes(&t), b"k,value\n");
    }

    #[test]
    fn plot_skips_unplaceable_points() {
        let mut t = Table::new("t", &["r", "e"]).with_plot("r", "e", true, true);
        t.push(vec![1.0.into(), 2.0.into()]);
        t.push(vec![2.0.into(), 0.0.into()]);
        t.push(vec![4.0.into(), 8.0.into()]);
        let svg = svg_plot(&t, t.plot.as_ref().unwrap());
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        t.push(vec![1.0.into(), 3.0.into()]);
        let svg = svg_plot(&t, t.plot.as_ref().unwrap());
        assert_eq!(svg.matches("<polyline").count(), 3);
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = std::env::temp_dir().join(format!("halfmap-lab-out-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("x.csv");
        let mut t = Table::new("t", &["a"]);
        write_csv(&t, &path).unwrap();
        t.push(vec![1.0.into()]);
        write_csv(&t, &path).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "a\n1.0000000000000000e0\n"
        );
        assert!(!dir.join("x.csv.tmp").exists());
        fs::remove_dir_all(&dir).unwrap();
    }
}
