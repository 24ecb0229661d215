//! δ-sweeps rendered as CSV, and the two figure families.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::applications::schroedinger_spectrum;
use crate::bounds::clustered_bound;
use crate::error::{usage, Result};
use crate::exact::{Dimensions, MeasureResult, Method, PsiEvaluator};
use crate::numeric::LogValue;

pub const CSV_HEADER: &str = "delta,value,log10_value,method,bracket_lo_log10,bracket_hi_log10";

/// Grid step for the figure sweeps.
pub const GRID_STEP: f64 = 0.005;

/// `δ = 0.005, 0.010, ..., 0.995`.
pub fn delta_grid() -> Vec<f64> {
    (1..200).map(|i| i as f64 / 200.0).collect()
}

/// `x` with 12 significant digits; `-inf` for negative infinity.
pub fn format_log10(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        return "-inf".to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub result: MeasureResult,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepTable {
    rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a row; `delta` must exceed the previous row's.
    pub fn push(&mut self, delta: f64, result: MeasureResult) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if !(delta > last.delta) {
                return Err(usage(format!(
                    "sweep deltas must increase strictly: {delta} after {}",
                    last.delta
                )));
            }
        }
        self.rows.push(SweepRow { delta, result });
        Ok(())
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let r = &row.result;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                row.delta,
                r.value.render(),
                format_log10(r.value.log10()),
                r.method,
                format_log10(r.bracket_lo.log10()),
                format_log10(r.bracket_hi.log10()),
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// One parsed CSV line, columns kept as emitted.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub delta: f64,
    pub value: String,
    pub log10_value: f64,
    pub method: Method,
    pub bracket_lo_log10: f64,
    pub bracket_hi_log10: f64,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(usage(format!("unexpected CSV header {other:?}"))),
    }
    let num = |s: &str, line: usize| {
        s.parse::<f64>()
            .map_err(|e| usage(format!("line {line}: bad number {s:?}: {e}")))
    };
    lines
        .enumerate()
        .map(|(i, line)| {
            let lineno = i + 2;
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(usage(format!("line {lineno}: expected 6 columns, got {}", cols.len())));
            }
            Ok(CsvRow {
                delta: num(cols[0], lineno)?,
                value: cols[1].to_string(),
                log10_value: num(cols[2], lineno)?,
                method: cols[3].parse()?,
                bracket_lo_log10: num(cols[4], lineno)?,
                bracket_hi_log10: num(cols[5], lineno)?,
            })
        })
        .collect()
}

/// Projection measure for fixed dimensions over `grid`.
pub fn psi_sweep(dims: Dimensions, grid: &[f64]) -> Result<SweepTable> {
    let eval = PsiEvaluator::new(dims)?;
    let mut table = SweepTable::new();
    for &d in grid {
        table.push(d, eval.eval(d)?)?;
    }
    Ok(table)
}

/// Reduced-dimension bound for the `N`-particle coupling matrix over `grid`.
pub fn clustered_sweep(particles: u64, grid: &[f64]) -> Result<SweepTable> {
    let inst = schroedinger_spectrum(particles)?;
    let mut table = SweepTable::new();
    for &d in grid {
        table.push(d, clustered_bound(inst.dims, inst.m0, d)?)?;
    }
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct FigureCurve {
    pub file_name: String,
    pub table: SweepTable,
}

/// `ψ` for `m = 2^k`, `n = 2m`, `k = 1..=16`.
pub fn fig1_curves() -> Result<Vec<FigureCurve>> {
    let grid = delta_grid();
    (1..=16u32)
        .into_par_iter()
        .map(|k| {
            let m = 1u64 << k;
            Ok(FigureCurve {
                file_name: format!("fig1_k{k:02}_m{m}_n{}.csv", 2 * m),
                table: psi_sweep(Dimensions::new(m, 2 * m)?, &grid)?,
            })
        })
        .collect()
}

/// Clustered bound for the coupling matrices with `N = 4..=32`.
pub fn fig2_curves() -> Result<Vec<FigureCurve>> {
    let grid = delta_grid();
    (4..=32u64)
        .into_par_iter()
        .map(|np| {
            Ok(FigureCurve {
                file_name: format!("fig2_N{np:02}.csv"),
                table: clustered_sweep(np, &grid)?,
            })
        })
        .collect()
}

/// Write each curve to `dir/<file_name>`, creating `dir` if needed.
pub fn write_curves(dir: &Path, curves: &[FigureCurve]) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    curves
        .iter()
        .map(|c| {
            let path = dir.join(&c.file_name);
            fs::write(&path, c.table.to_csv())?;
            Ok(path)
        })
        .collect()
}

/// Whether `text` is the 6-digit rendering of `v`.
pub fn rendered_equal(v: LogValue, text: &str) -> bool {
    v.render() == text
}
