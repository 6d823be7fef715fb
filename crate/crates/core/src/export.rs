//! File formats emitted by the command-line tool: per-run trace CSVs, the
//! report and manifest JSON, long-format surface CSV, mask CSV and PGM images.
//! Floats are written in shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::GradientTrace;
use crate::sensitivity::SurfaceSlice;

/// Header: `epoch,loss`, then `d1_<name>,d2_<name>,d3_<name>` per feature.
pub fn trace_csv(trace: &GradientTrace, names: &[String]) -> String {
    let mut out = String::from("epoch,loss");
    for name in names {
        write!(out, ",d1_{name},d2_{name},d3_{name}").unwrap();
    }
    out.push('\n');
    for e in 0..trace.epochs() {
        write!(out, "{e},{}", trace.loss[e]).unwrap();
        for j in 0..names.len() {
            write!(
                out,
                ",{},{},{}",
                trace.d1[e][j], trace.d2[e][j], trace.d3[e][j]
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parse a trace written by [`trace_csv`]; returns the trace and the feature
/// names recovered from the header.
pub fn parse_trace_csv(
    text: &str,
    run_id: usize,
    seed_used: u64,
) -> Result<(GradientTrace, Vec<String>)> {
    let bad = |m: String| Error::TraceFormat(m);
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad("empty trace".into()))?
        .split(',')
        .collect();
    if header.len() < 2
        || header[0] != "epoch"
        || header[1] != "loss"
        || !(header.len() - 2).is_multiple_of(3)
    {
        return Err(bad("unexpected trace header".into()));
    }
    let mut names = Vec::new();
    for chunk in header[2..].chunks(3) {
        let name = chunk[0]
            .strip_prefix("d1_")
            .ok_or_else(|| bad(format!("expected d1_ column, got {}", chunk[0])))?;
        if chunk[1] != format!("d2_{name}") || chunk[2] != format!("d3_{name}") {
            return Err(bad(format!("columns for `{name}` out of order")));
        }
        names.push(name.to_string());
    }
    let mut trace = GradientTrace {
        run_id,
        seed_used,
        loss: Vec::new(),
        d1: Vec::new(),
        d2: Vec::new(),
        d3: Vec::new(),
    };
    for (row, line) in lines.enumerate() {
        let cells: Vec<f64> = line
            .split(',')
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| bad(format!("row {}: bad number {c:?}", row + 1)))
            })
            .collect::<Result<_>>()?;
        if cells.len() != header.len() {
            return Err(bad(format!(
                "row {}: {} cells, expected {}",
                row + 1,
                cells.len(),
                header.len()
            )));
        }
        trace.loss.push(cells[1]);
        let per: Vec<&[f64]> = cells[2..].chunks(3).collect();
        trace.d1.push(per.iter().map(|c| c[0]).collect());
        trace.d2.push(per.iter().map(|c| c[1]).collect());
        trace.d3.push(per.iter().map(|c| c[2]).collect());
    }
    Ok((trace, names))
}

pub fn surface_csv(slice: &SurfaceSlice) -> String {
    let mut out = String::from("alpha,beta,loss\n");
    for (i, a) in slice.alphas.iter().enumerate() {
        for (j, b) in slice.betas.iter().enumerate() {
            writeln!(out, "{a},{b},{}", slice.losses[i][j]).unwrap();
        }
    }
    out
}

pub fn mask_csv(mask: &[u8]) -> String {
    let mut out = String::from("pixel,mask\n");
    for (p, m) in mask.iter().enumerate() {
        writeln!(out, "{p},{m}").unwrap();
    }
    out
}

/// Plain (P2) greyscale PGM with maxval 255; `pixels` are in [0, 1].
pub fn pgm(pixels: &[f64], width: usize, height: usize) -> String {
    let mut out = format!("P2\n{width} {height}\n255\n");
    for row in pixels.chunks(width) {
        let line: Vec<String> = row
            .iter()
            .map(|p| ((255.0 * p).round().clamp(0.0, 255.0) as u8).to_string())
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_file(dir: &Path, name: &str, contents: &str, listing: &mut Vec<String>) -> Result<()> {
    fs::write(dir.join(name), contents)?;
    listing.push(name.to_string());
    Ok(())
}
