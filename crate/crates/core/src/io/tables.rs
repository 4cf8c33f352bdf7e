use std::path::Path;

use super::{csv_error, fmt_f64};
use crate::criterion::{CriterionEntry, CriterionReport};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::flux::ShellInequalityRecord;

fn open(path: &Path, header: &[&str]) -> Result<(String, csv::Reader<std::fs::File>)> {
    let name = path.display().to_string();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(&name, e))?;
    let h = rdr.headers().map_err(|e| csv_error(&name, e))?.clone();
    if h.iter().map(str::trim).ne(header.iter().copied()) {
        return Err(Error::format(&name, 1, format!("expected header {}", header.join(","))));
    }
    Ok((name, rdr))
}

fn rows<F, T>(path: &Path, header: &[&str], mut parse: F) -> Result<Vec<T>>
where
    F: FnMut(&csv::StringRecord, &dyn Fn(&str) -> Error) -> Result<T>,
{
    let (name, mut rdr) = open(path, header)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| csv_error(&name, e))?;
        let bad = |m: &str| Error::format(&name, line, m.to_string());
        if rec.len() != header.len() {
            return Err(bad(&format!("expected {} fields", header.len())));
        }
        out.push(parse(&rec, &bad)?);
    }
    Ok(out)
}

fn num(field: &str, what: &str, bad: &dyn Fn(&str) -> Error) -> Result<f64> {
    field.trim().parse().map_err(|_| bad(&format!("bad {what}")))
}

fn opt_num(field: &str, what: &str, bad: &dyn Fn(&str) -> Error) -> Result<Option<f64>> {
    if field.trim().is_empty() {
        Ok(None)
    } else {
        num(field, what, bad).map(Some)
    }
}

fn writer(path: &Path) -> Result<(String, csv::Writer<std::fs::File>)> {
    let name = path.display().to_string();
    let w = csv::Writer::from_path(path).map_err(|e| csv_error(&name, e))?;
    Ok((name, w))
}

const REPORT: [&str; 5] = ["t0", "p", "lambda_p", "integral", "flag"];

pub fn write_report(path: &Path, report: &CriterionReport) -> Result<()> {
    let (name, mut w) = writer(path)?;
    let err = |e| csv_error(&name, e);
    w.write_record(REPORT).map_err(err)?;
    for e in &report.entries {
        w.write_record([
            fmt_f64(e.t0),
            e.p.to_string(),
            fmt_f64(e.lambda_p),
            fmt_f64(e.integral),
            if e.bad { "bad" } else { "good" }.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<Vec<CriterionEntry>> {
    rows(path, &REPORT, |r, bad| {
        Ok(CriterionEntry {
            t0: num(&r[0], "t0", bad)?,
            p: r[1].trim().parse().map_err(|_| bad("bad scale"))?,
            lambda_p: num(&r[2], "lambda_p", bad)?,
            integral: num(&r[3], "integral", bad)?,
            bad: match r[4].trim() {
                "bad" => true,
                "good" => false,
                _ => return Err(bad("flag must be bad or good")),
            },
        })
    })
}

const PREMEASURE: [&str; 4] = ["d", "p_floor", "intervals", "premeasure"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PremeasureRow {
    pub d: f64,
    pub floor: i32,
    pub intervals: usize,
    pub premeasure: f64,
}

pub fn write_premeasure(path: &Path, rows: &[PremeasureRow]) -> Result<()> {
    let (name, mut w) = writer(path)?;
    let err = |e| csv_error(&name, e);
    w.write_record(PREMEASURE).map_err(err)?;
    for r in rows {
        w.write_record([fmt_f64(r.d), r.floor.to_string(), r.intervals.to_string(), fmt_f64(r.premeasure)])
            .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_premeasure(path: &Path) -> Result<Vec<PremeasureRow>> {
    rows(path, &PREMEASURE, |r, bad| {
        Ok(PremeasureRow {
            d: num(&r[0], "d", bad)?,
            floor: r[1].trim().parse().map_err(|_| bad("bad floor"))?,
            intervals: r[2].trim().parse().map_err(|_| bad("bad interval count"))?,
            premeasure: num(&r[3], "premeasure", bad)?,
        })
    })
}

const SHELL_INEQUALITY: [&str; 10] = [
    "t", "q", "s", "lhs_diff", "lhs_visc", "rhs_low", "rhs_high", "i1", "i2", "i3",
];

pub fn write_shell_inequality(path: &Path, records: &[ShellInequalityRecord]) -> Result<()> {
    let (name, mut w) = writer(path)?;
    let err = |e| csv_error(&name, e);
    w.write_record(SHELL_INEQUALITY).map_err(err)?;
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for r in records {
        w.write_record([
            fmt_f64(r.t),
            r.q.to_string(),
            r.s.to_string(),
            fmt_f64(r.lhs_diff),
            fmt_f64(r.lhs_visc),
            fmt_f64(r.rhs_low),
            fmt_f64(r.rhs_high),
            opt(r.i1),
            opt(r.i2),
            opt(r.i3),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

/// Records as written; the dissipation ratio is not part of the table.
pub fn read_shell_inequality(path: &Path) -> Result<Vec<ShellInequalityRecord>> {
    rows(path, &SHELL_INEQUALITY, |r, bad| {
        Ok(ShellInequalityRecord {
            t: num(&r[0], "t", bad)?,
            q: r[1].trim().parse().map_err(|_| bad("bad shell index"))?,
            s: r[2].parse::<Exponent>().map_err(|_| bad("bad exponent"))?,
            lhs_diff: num(&r[3], "lhs_diff", bad)?,
            lhs_visc: num(&r[4], "lhs_visc", bad)?,
            rhs_low: num(&r[5], "rhs_low", bad)?,
            rhs_high: num(&r[6], "rhs_high", bad)?,
            i1: opt_num(&r[7], "i1", bad)?,
            i2: opt_num(&r[8], "i2", bad)?,
            i3: opt_num(&r[9], "i3", bad)?,
            dissipation_ratio: None,
        })
    })
}
