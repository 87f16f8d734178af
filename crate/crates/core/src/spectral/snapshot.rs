//! Binary field snapshots.
//!
//! Layout:
//!
//! ```text
//! CHEMODECAY-FIELD v1\n
//! dim=<d> n=<N> length=<L> time=<t> name=<name>\n
//! <N^d little-endian f64 values, row-major, axis 0 slowest>
//! ```
//!
//! Grid point `(i0, i1[, i2])` sits at `x = (i0, i1[, i2]) * L / N` and is
//! stored at offset `8 * ((i0 * N + i1) * N + i2)` of the payload. Real
//! numbers in the header use the shortest round-trip decimal form.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::field::ScalarField;
use super::grid::Grid;
use crate::error::{Error, Result};

pub const SNAPSHOT_SCHEMA: &str = "CHEMODECAY-FIELD v1";

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub field: ScalarField,
    pub time: f64,
    pub name: String,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

pub fn write_snapshot<W: Write>(
    mut w: W,
    field: &ScalarField,
    time: f64,
    name: &str,
) -> std::io::Result<()> {
    if !valid_name(name) {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            format!("snapshot name {name:?} must be non-empty [A-Za-z0-9_.-]"),
        ));
    }
    let g = field.grid();
    writeln!(w, "{SNAPSHOT_SCHEMA}")?;
    writeln!(
        w,
        "dim={} n={} length={:?} time={:?} name={}",
        g.dim(),
        g.points_per_dim(),
        g.box_length(),
        time,
        name
    )?;
    let mut payload = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&payload)
}

pub fn save_snapshot(path: &Path, field: &ScalarField, time: f64, name: &str) -> Result<u64> {
    let mut buf = Vec::new();
    write_snapshot(&mut buf, field, time, name).map_err(|e| Error::io(path, e))?;
    fs::write(path, &buf).map_err(|e| Error::io(path, e))?;
    Ok(buf.len() as u64)
}

pub fn read_snapshot<R: Read>(r: R, origin: &Path) -> Result<Snapshot> {
    let parse_err = |detail: String| Error::Parse {
        path: origin.to_path_buf(),
        detail,
    };
    let mut reader = BufReader::new(r);
    let mut line = String::new();
    reader
        .read_line(&mut line)
        .map_err(|e| Error::io(origin, e))?;
    if line.trim_end() != SNAPSHOT_SCHEMA {
        return Err(parse_err(format!(
            "expected schema line {SNAPSHOT_SCHEMA:?}, found {:?}",
            line.trim_end()
        )));
    }
    line.clear();
    reader
        .read_line(&mut line)
        .map_err(|e| Error::io(origin, e))?;
    let (mut dim, mut n, mut length, mut time, mut name) = (None, None, None, None, None);
    for token in line.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| parse_err(format!("malformed header token {token:?}")))?;
        let bad = |what: &str| parse_err(format!("header field {key}: invalid {what} {value:?}"));
        match key {
            "dim" => dim = Some(value.parse::<usize>().map_err(|_| bad("integer"))?),
            "n" => n = Some(value.parse::<usize>().map_err(|_| bad("integer"))?),
            "length" => length = Some(value.parse::<f64>().map_err(|_| bad("number"))?),
            "time" => time = Some(value.parse::<f64>().map_err(|_| bad("number"))?),
            "name" => name = Some(value.to_string()),
            _ => return Err(parse_err(format!("unknown header field {key:?}"))),
        }
    }
    let missing = |k: &str| parse_err(format!("header field {k} missing"));
    let grid = Grid::new(
        dim.ok_or_else(|| missing("dim"))?,
        n.ok_or_else(|| missing("n"))?,
        length.ok_or_else(|| missing("length"))?,
    )?;
    let mut payload = Vec::new();
    reader
        .read_to_end(&mut payload)
        .map_err(|e| Error::io(origin, e))?;
    if payload.len() != 8 * grid.len() {
        return Err(parse_err(format!(
            "payload has {} bytes, expected {}",
            payload.len(),
            8 * grid.len()
        )));
    }
    let values = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
        .collect();
    Ok(Snapshot {
        field: ScalarField::new(&grid, values)?,
        time: time.ok_or_else(|| missing("time"))?,
        name: name.ok_or_else(|| missing("name"))?,
    })
}

pub fn load_snapshot(path: &Path) -> Result<Snapshot> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_snapshot(file, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_stable() {
        let g = Grid::new(2, 8, 2.5).unwrap();
        let f = ScalarField::from_fn(&g, |x| x[0] + 10.0 * x[1]);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.125, "n").unwrap();
        let header = b"CHEMODECAY-FIELD v1\ndim=2 n=8 length=2.5 time=0.125 name=n\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(buf.len(), header.len() + 8 * 64);
        // point (i0, i1) = (0, 1) -> x = (0, dx), offset 8
        let v = f64::from_le_bytes(buf[header.len() + 8..header.len() + 16].try_into().unwrap());
        assert_eq!(v, 10.0 * 2.5 / 8.0);
        let back = read_snapshot(&buf[..], Path::new("mem")).unwrap();
        assert_eq!(back.field, f);
        assert_eq!(back.time, 0.125);
        assert_eq!(back.name, "n");
    }

    #[test]
    fn rejects_truncated_payload_and_bad_names() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let f = ScalarField::zeros(&g);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.0, "x").unwrap();
        buf.pop();
        assert!(read_snapshot(&buf[..], Path::new("mem")).is_err());
        assert!(write_snapshot(Vec::new(), &f, 0.0, "has space").is_err());
    }
}
