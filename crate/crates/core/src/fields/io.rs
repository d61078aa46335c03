//! Binary and CSV serialization of physical-space fields.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! | offset | size | content                         |
//! |--------|------|---------------------------------|
//! | 0      | 8    | magic `OSEENFLD`                |
//! | 8      | 4    | `u32` dimension (2 or 3)        |
//! | 12     | 4    | `u32` points per axis `N`       |
//! | 16     | 8    | `f64` half period `L`           |
//! | 24     | 4    | `u32` component count           |
//! | 28     | 4    | `u32` reserved, zero            |
//! | 32     | ...  | `f64` values, component-major, each component row-major |

use std::io::{Read, Write};
use std::path::Path;

use super::{GridSpec, VectorField};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"OSEENFLD";
const HEADER_LEN: usize = 32;

pub fn write_binary<W: Write>(field: &VectorField, mut out: W) -> Result<()> {
    let g = &field.grid;
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&(g.dim as u32).to_le_bytes());
    header.extend_from_slice(&(g.points_per_axis as u32).to_le_bytes());
    header.extend_from_slice(&g.half_period.to_le_bytes());
    header.extend_from_slice(&(field.count() as u32).to_le_bytes());
    header.extend_from_slice(&0u32.to_le_bytes());
    out.write_all(&header)?;
    let mut buf = Vec::with_capacity(g.len() * 8);
    for c in &field.components {
        buf.clear();
        for v in c {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    out.flush()?;
    Ok(())
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

pub fn read_binary<R: Read>(mut input: R) -> Result<VectorField> {
    let mut header = [0u8; HEADER_LEN];
    input
        .read_exact(&mut header)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if &header[..8] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let dim = u32_at(&header, 8) as usize;
    let n = u32_at(&header, 12) as usize;
    let l = f64::from_le_bytes(header[16..24].try_into().expect("8 bytes"));
    let count = u32_at(&header, 24) as usize;
    let grid = GridSpec::new(dim, l, n).map_err(|e| Error::Format(e.to_string()))?;
    if count == 0 {
        return Err(Error::Format("zero components".into()));
    }
    let mut bytes = vec![0u8; grid.len() * 8];
    let mut components = Vec::with_capacity(count);
    for _ in 0..count {
        input
            .read_exact(&mut bytes)
            .map_err(|_| Error::Format("truncated data".into()))?;
        components.push(
            bytes
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
                .collect(),
        );
    }
    VectorField::from_components(grid, components)
}

pub fn save(field: &VectorField, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_binary(field, std::io::BufWriter::new(file))
}

pub fn load(path: impl AsRef<Path>) -> Result<VectorField> {
    let file = std::fs::File::open(path)?;
    read_binary(std::io::BufReader::new(file))
}

/// Largest grid accepted by the CSV export.
pub const CSV_MAX_POINTS: usize = 1 << 16;

/// One row per grid point: coordinates `x1..xd` then components `u1..um`.
pub fn write_csv<W: Write>(field: &VectorField, out: W) -> Result<()> {
    let grid = field.grid;
    if grid.len() > CSV_MAX_POINTS {
        return Err(Error::InvalidParameter(format!(
            "CSV export is limited to {CSV_MAX_POINTS} points"
        )));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=grid.dim).map(|a| format!("x{a}")).collect();
    header.extend((1..=field.count()).map(|c| format!("u{c}")));
    w.write_record(&header)?;
    let mut rows = Vec::with_capacity(grid.len());
    grid.for_each_point(|i, x| rows.push((i, x)));
    for (i, x) in rows {
        let mut rec: Vec<String> = x[..grid.dim].iter().map(|v| format!("{v:.16e}")).collect();
        rec.extend(field.components.iter().map(|c| format!("{:.16e}", c[i])));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn binary_round_trip_is_exact() {
        let grid = GridSpec::new(3, 0.75, 8).unwrap();
        let f = samples::random_solenoidal(&grid, 2);
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 3 * 512 * 8);
        assert_eq!(&buf[..8], b"OSEENFLD");
        let g = read_binary(buf.as_slice()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_binary(&b"NOTAFIELD..."[..]).is_err());
        let grid = GridSpec::new(2, 1.0, 4).unwrap();
        let mut buf = Vec::new();
        write_binary(&VectorField::zeros(grid), &mut buf).unwrap();
        buf.truncate(buf.len() - 1);
        assert!(matches!(read_binary(buf.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let grid = GridSpec::new(2, 1.0, 4).unwrap();
        let f = VectorField::from_fn(grid, |x| [x[0], x[1], 0.0]);
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x1,x2,u1,u2");
        assert_eq!(lines.len(), 17);
        let last: Vec<f64> = lines[16].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(last[0], last[2]);
    }
}
