use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use super::{csv_error, fmt_f64};
use crate::criterion::ShellNormSeries;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::lp::ShellNorms;

const HEADER: [&str; 4] = ["time", "q", "s", "norm"];

/// One row per `(time, q)` for each series, in the order given.
pub fn write_series<W: Write>(w: W, series: &[ShellNormSeries]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let err = |e| csv_error("<series>", e);
    out.write_record(HEADER).map_err(err)?;
    for s in series {
        let label = s.s().to_string();
        for (t, norms) in s.times().iter().zip(s.norms()) {
            for (q, v) in norms.iter() {
                out.write_record([fmt_f64(*t), q.to_string(), label.clone(), fmt_f64(v)])
                    .map_err(err)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn save_series(path: &Path, series: &[ShellNormSeries]) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_series(std::io::BufWriter::new(f), series)
}

struct Group {
    s: Exponent,
    rows: BTreeMap<u64, (f64, BTreeMap<i32, f64>)>,
}

/// Every exponent found in the file, in order of first appearance.
pub fn load_series_all(path: &Path) -> Result<Vec<ShellNormSeries>> {
    let name = path.display().to_string();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(&name, e))?;
    let header = rdr.headers().map_err(|e| csv_error(&name, e))?.clone();
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(Error::format(&name, 1, format!("expected header {}", HEADER.join(","))));
    }
    let mut groups: Vec<(String, Group)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| csv_error(&name, e))?;
        let bad = |m: &str| Error::format(&name, line, m.to_string());
        if rec.len() != 4 {
            return Err(bad("expected 4 fields"));
        }
        let t: f64 = rec[0].trim().parse().map_err(|_| bad("bad time"))?;
        let q: i32 = rec[1].trim().parse().map_err(|_| bad("bad shell index"))?;
        let s: Exponent = rec[2].parse().map_err(|_| bad("bad exponent"))?;
        let v: f64 = rec[3].trim().parse().map_err(|_| bad("bad norm"))?;
        if !t.is_finite() {
            return Err(bad("non-finite time"));
        }
        if !(v.is_finite() && v >= 0.0) {
            return Err(bad("norm must be finite and non-negative"));
        }
        let key = s.to_string();
        let g = match groups.iter().position(|x| x.0 == key) {
            Some(j) => &mut groups[j].1,
            None => {
                groups.push((
                    key,
                    Group {
                        s,
                        rows: BTreeMap::new(),
                    },
                ));
                &mut groups.last_mut().expect("just pushed").1
            }
        };
        // order-preserving key for finite doubles
        let bits = t.to_bits();
        let k = if t.is_sign_negative() { !bits } else { bits | (1 << 63) };
        let row = g.rows.entry(k).or_insert((t, BTreeMap::new()));
        if row.1.insert(q, v).is_some() {
            return Err(bad("duplicate (time, q, s) row"));
        }
    }
    if groups.is_empty() {
        return Err(Error::format(&name, 1, "no data rows"));
    }
    groups
        .into_iter()
        .map(|(_, g)| {
            let q_min = g.rows.values().flat_map(|r| r.1.keys()).copied().min().expect("non-empty");
            let q_max = g.rows.values().flat_map(|r| r.1.keys()).copied().max().expect("non-empty");
            let mut times = Vec::with_capacity(g.rows.len());
            let mut norms = Vec::with_capacity(g.rows.len());
            for (t, row) in g.rows.values() {
                let mut vals = Vec::with_capacity((q_max - q_min + 1) as usize);
                for q in q_min..=q_max {
                    match row.get(&q) {
                        Some(&v) => vals.push(v),
                        None => {
                            return Err(Error::Data(format!(
                                "{name}: shell {q} missing at time {t} for s = {}",
                                g.s
                            )))
                        }
                    }
                }
                times.push(*t);
                norms.push(ShellNorms::new(q_min, vals));
            }
            ShellNormSeries::new(times, norms, g.s, name.clone())
        })
        .collect()
}

/// The series for exponent `s`, or the only series in the file when `s` is `None`.
pub fn load_series(path: &Path, s: Option<&Exponent>) -> Result<ShellNormSeries> {
    let all = load_series_all(path)?;
    match s {
        Some(s) => all
            .into_iter()
            .find(|x| x.s().value() == s.value())
            .ok_or_else(|| Error::Data(format!("{}: no rows with s = {s}", path.display()))),
        None if all.len() == 1 => Ok(all.into_iter().next().expect("one series")),
        None => Err(Error::InvalidArgument(format!(
            "{} holds several exponents; choose one",
            path.display()
        ))),
    }
}
