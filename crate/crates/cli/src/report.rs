//! Report files: `report.json`, `matrix.csv`, `heatmap.svg`, `study.csv`.
//!
//! Output is a pure function of the inputs: no timestamps or host details,
//! rows in a fixed order, floats in shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use extropy::estimation::McStudyRow;
use serde::Serialize;

use crate::error::Result;
use crate::matrix::DivergenceMatrix;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Report<I: Serialize, R: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub inputs: I,
    pub results: R,
}

impl<I: Serialize, R: Serialize> Report<I, R> {
    pub fn new(command: &'static str, inputs: I, results: R) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "extropy",
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            inputs,
            results,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn matrix_csv(m: &DivergenceMatrix) -> String {
    let mut out = String::from("group");
    for l in &m.labels {
        out.push(',');
        out.push_str(&csv_field(l));
    }
    out.push('\n');
    for (label, row) in m.labels.iter().zip(&m.values) {
        out.push_str(&csv_field(label));
        for v in row {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn study_csv(rows: &[McStudyRow]) -> String {
    let mut out = String::from("n,reps,mean_estimate,bias,mse,failed\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n, r.reps, r.mean_estimate, r.bias, r.mse, r.failed
        )
        .unwrap();
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Darkest ramp colour, reached at the matrix maximum.
const DARK: [u8; 3] = [8, 48, 107];
const CELL: usize = 72;

fn ramp(fraction: f64) -> [u8; 3] {
    let f = fraction.clamp(0.0, 1.0);
    DARK.map(|c| (255.0 - f * (255.0 - c as f64)).round() as u8)
}

/// Standalone SVG heatmap with one labelled cell per matrix entry.
pub fn heatmap_svg(m: &DivergenceMatrix, title: &str) -> String {
    let k = m.len();
    let left = 16 + 8 * m.labels.iter().map(|l| l.chars().count()).max().unwrap_or(1);
    let top = 48;
    let bottom = 24 + 7 * m.labels.iter().map(|l| l.chars().count()).max().unwrap_or(1);
    let (width, height) = (left + k * CELL + 16, top + k * CELL + bottom);
    let max = m.max();
    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        "<!-- Colour ramp: linear in value, from white (#ffffff) at 0 to #{:02x}{:02x}{:02x} at the matrix maximum {max}. Cell text is the value. -->",
        DARK[0], DARK[1], DARK[2]
    )
    .unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="28" font-size="15" text-anchor="middle">{}</text>"#,
        width / 2,
        xml_escape(title)
    )
    .unwrap();
    for (i, row) in m.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let f = if max > 0.0 { v / max } else { 0.0 };
            let [r, g, b] = ramp(f);
            let (x, y) = (left + j * CELL, top + i * CELL);
            writeln!(
                s,
                "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"#{r:02x}{g:02x}{b:02x}\" stroke=\"#cccccc\"/>"
            )
            .unwrap();
            let ink = if f > 0.5 { "white" } else { "black" };
            writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="11" text-anchor="middle" fill="{ink}">{v:.4}</text>"#,
                x + CELL / 2,
                y + CELL / 2 + 4
            )
            .unwrap();
        }
    }
    for (i, label) in m.labels.iter().enumerate() {
        let label = xml_escape(label);
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{label}</text>"#,
            left - 6,
            top + i * CELL + CELL / 2 + 4
        )
        .unwrap();
        let (cx, cy) = (left + i * CELL + CELL / 2, top + k * CELL + 12);
        writeln!(
            s,
            r#"<text x="{cx}" y="{cy}" font-size="12" text-anchor="end" transform="rotate(-45 {cx} {cy})">{label}</text>"#
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
