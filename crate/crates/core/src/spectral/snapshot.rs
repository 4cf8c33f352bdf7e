//! `NSLP1` binary snapshot format.
//!
//! Layout (little-endian): magic `"NSLP1"`, `u8` version (= 1), `u32` n, `f64` time,
//! `f64` nu, then for each of the three components the full `n³` coefficient array in
//! row-major k-order (`k₁` slowest) as interleaved `(re, im)` `f64` pairs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Grid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 5] = b"NSLP1";
pub const VERSION: u8 = 1;

/// A field together with the time it was recorded at.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub field: SpectralField,
}

pub fn write_snapshot<W: Write>(mut w: W, time: f64, field: &SpectralField) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION])?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    w.write_all(&g.nu().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * g.len());
    for c in field.components() {
        buf.clear();
        for z in c {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Snapshot> {
    let mut head = [0u8; 5 + 1 + 4 + 8 + 8];
    r.read_exact(&mut head)
        .map_err(|_| Error::Data("truncated NSLP1 header".into()))?;
    if &head[0..5] != MAGIC {
        return Err(Error::Data("bad magic, expected NSLP1".into()));
    }
    if head[5] != VERSION {
        return Err(Error::Data(format!("unsupported NSLP1 version {}", head[5])));
    }
    let n = u32::from_le_bytes(head[6..10].try_into().unwrap()) as usize;
    let time = f64::from_le_bytes(head[10..18].try_into().unwrap());
    let nu = f64::from_le_bytes(head[18..26].try_into().unwrap());
    let grid = Grid::new(n, nu).map_err(|e| Error::Data(e.to_string()))?;
    let mut comps: [Vec<Complex64>; 3] = Default::default();
    let mut raw = vec![0u8; 16 * grid.len()];
    for comp in &mut comps {
        r.read_exact(&mut raw)
            .map_err(|_| Error::Data("truncated NSLP1 coefficient block".into()))?;
        *comp = raw
            .chunks_exact(16)
            .map(|b| {
                Complex64::new(
                    f64::from_le_bytes(b[0..8].try_into().unwrap()),
                    f64::from_le_bytes(b[8..16].try_into().unwrap()),
                )
            })
            .collect();
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Data("trailing bytes after NSLP1 payload".into()));
    }
    let field = SpectralField::from_coeffs(grid, comps)?;
    Ok(Snapshot { time, field })
}

pub fn save(path: &Path, time: f64, field: &SpectralField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_snapshot(&mut w, time, field)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Snapshot> {
    read_snapshot(BufReader::new(File::open(path)?)).map_err(|e| match e {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}
