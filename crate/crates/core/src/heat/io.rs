//! Flat binary and CSV persistence for fields.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! magic    4 bytes  "FJFD"
//! version  u8       1
//! dtype    u8       1 = f64
//! reserved u16      0
//! ndim     u32
//! points   ndim × u64
//! lower    ndim × f64
//! upper    ndim × f64
//! values   Π points × dtype, axis 0 fastest
//! ```

use std::io::{Read, Write};

use crate::grid::{Field, GridSpec};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"FJFD";
const VERSION: u8 = 1;
const DTYPE_F64: u8 = 1;

pub fn write_field<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION, DTYPE_F64, 0, 0])?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    for &p in g.points() {
        w.write_all(&(p as u64).to_le_bytes())?;
    }
    for v in g.lower().iter().chain(g.upper()) {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::invalid("not a field file (bad magic)"));
    }
    let [version, dtype, _, _] = read_array::<4, _>(&mut r)?;
    if version != VERSION {
        return Err(Error::invalid(format!("unsupported field file version {version}")));
    }
    if dtype != DTYPE_F64 {
        return Err(Error::invalid(format!("unsupported dtype tag {dtype}")));
    }
    let ndim = u32::from_le_bytes(read_array(&mut r)?) as usize;
    if ndim == 0 || ndim > 16 {
        return Err(Error::invalid(format!("implausible dimension {ndim}")));
    }
    let mut points = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        points.push(u64::from_le_bytes(read_array(&mut r)?) as usize);
    }
    let mut bounds = Vec::with_capacity(2 * ndim);
    for _ in 0..2 * ndim {
        bounds.push(f64::from_le_bytes(read_array(&mut r)?));
    }
    let upper = bounds.split_off(ndim);
    let grid = GridSpec::new(bounds, upper, points)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        values.push(f64::from_le_bytes(read_array(&mut r)?));
    }
    Field::new(grid, values)
}

/// One row per node: coordinates `x1..xn` then `value`.
pub fn write_field_csv<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let g = field.grid();
    let header: Vec<String> = (1..=g.dim()).map(|j| format!("x{j}")).collect();
    writeln!(w, "{},value", header.join(","))?;
    for (p, v) in field.values().iter().enumerate() {
        let x: Vec<String> = g.coords(p).iter().map(|c| format!("{c}")).collect();
        writeln!(w, "{},{v}", x.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let g = GridSpec::new(vec![-1.0, 0.0], vec![1.0, 2.5], vec![4, 3]).unwrap();
        let f = Field::from_fn(&g, |x| x[0] * 10.0 + x[1]);
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 4 + 2 * 8 + 4 * 8 + 12 * 8);
        let back = read_field(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn bad_magic_and_truncation() {
        assert!(read_field(&b"NOPE\x01\x01\x00\x00"[..]).is_err());
        let g = GridSpec::centered(&[1.0], &[3]).unwrap();
        let mut buf = Vec::new();
        write_field(&Field::zeros(&g), &mut buf).unwrap();
        buf.pop();
        assert!(read_field(buf.as_slice()).is_err());
    }

    #[test]
    fn csv_layout() {
        let g = GridSpec::centered(&[1.0], &[3]).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&Field::constant(&g, 2.0), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x1,value\n-1,2\n0,2\n1,2\n");
    }
}
