//! Field serialization: flat little-endian binary or `(index, re, im)` CSV rows.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::LatticeField;
use super::grid::LatticeGrid;
use crate::error::{Error, Result};

/// Writes `(re, im)` pairs as little-endian `f64`, in site order, no header.
pub fn write_binary<W: Write>(field: &LatticeField, mut out: W) -> Result<()> {
    let mut buf = Vec::with_capacity(16 * field.values().len());
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<R: Read>(grid: LatticeGrid, mut input: R) -> Result<LatticeField> {
    let mut buf = Vec::new();
    input.read_to_end(&mut buf)?;
    if buf.len() != 16 * grid.len() {
        return Err(Error::GridMismatch(format!(
            "binary field has {} bytes, expected {}",
            buf.len(),
            16 * grid.len()
        )));
    }
    let values = buf
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    LatticeField::new(grid, values)
}

pub fn write_csv<W: Write>(field: &LatticeField, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "re", "im"])?;
    for (i, v) in field.values().iter().enumerate() {
        w.write_record([i.to_string(), format!("{:e}", v.re), format!("{:e}", v.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(grid: LatticeGrid, input: R) -> Result<LatticeField> {
    let mut r = csv::Reader::from_reader(input);
    let mut values = vec![Complex64::default(); grid.len()];
    let mut seen = vec![false; grid.len()];
    for rec in r.deserialize::<(usize, f64, f64)>() {
        let (i, re, im) = rec?;
        if i >= grid.len() {
            return Err(Error::GridMismatch(format!("site index {i} out of range")));
        }
        values[i] = Complex64::new(re, im);
        seen[i] = true;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::GridMismatch(format!("missing site {i}")));
    }
    LatticeField::new(grid, values)
}
