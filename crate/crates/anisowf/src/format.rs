//! Binary `ANGB` files for signals and STFT fields, plus CSV mirrors.
//!
//! Layout (little endian): magic `b"ANGB"`, `u32` version, `u32` d, `u32` n
//! per axis, `f64` L, `u32` kind (0 signal, 1 STFT field), then interleaved
//! `re, im` `f64` pairs in row-major order. STFT fields store `n^2d` values,
//! x-lattice index slowest, the frequency lattice in centered (fftshift) order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{Grid, Signal};
use crate::stft::StftField;

pub const MAGIC: &[u8; 4] = b"ANGB";
pub const VERSION: u32 = 1;

const KIND_SIGNAL: u32 = 0;
const KIND_FIELD: u32 = 1;

fn write_header(w: &mut impl Write, grid: &Grid, kind: u32) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.d as u32).to_le_bytes())?;
    w.write_all(&(grid.n as u32).to_le_bytes())?;
    w.write_all(&grid.l.to_le_bytes())?;
    w.write_all(&kind.to_le_bytes())
}

fn write_values(w: &mut impl Write, values: &[Complex64]) -> std::io::Result<()> {
    for v in values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

fn encode(grid: &Grid, kind: u32, values: &[Complex64]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(28 + 16 * values.len());
    write_header(&mut buf, grid, kind).expect("in-memory write");
    write_values(&mut buf, values).expect("in-memory write");
    buf
}

pub fn signal_to_bytes(u: &Signal) -> Vec<u8> {
    encode(&u.grid, KIND_SIGNAL, &u.values)
}

pub fn field_to_bytes(f: &StftField) -> Vec<u8> {
    encode(&f.grid, KIND_FIELD, &f.values)
}

fn read_u32(r: &mut impl Read) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> std::io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn decode(r: &mut impl Read, path: &Path) -> Result<(Grid, u32, Vec<Complex64>)> {
    let fmt = |m: &str| Error::format(path, m);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| fmt("file too short for header"))?;
    if &magic != MAGIC {
        return Err(fmt("bad magic, not an ANGB file"));
    }
    let header = (|| -> std::io::Result<(u32, u32, u32, f64, u32)> {
        Ok((read_u32(r)?, read_u32(r)?, read_u32(r)?, read_f64(r)?, read_u32(r)?))
    })()
    .map_err(|_| fmt("truncated header"))?;
    let (version, d, n, l, kind) = header;
    if version != VERSION {
        return Err(fmt(&format!("unsupported version {version}")));
    }
    let grid = Grid::new(d as usize, n as usize, l).map_err(|e| fmt(&e.to_string()))?;
    let count = match kind {
        KIND_SIGNAL => grid.len(),
        KIND_FIELD => grid.len() * grid.len(),
        k => return Err(fmt(&format!("unknown payload kind {k}"))),
    };
    let mut raw = Vec::new();
    r.read_to_end(&mut raw).map_err(|e| Error::io(path, e))?;
    if raw.len() != 16 * count {
        return Err(fmt(&format!("expected {} payload bytes, found {}", 16 * count, raw.len())));
    }
    let values = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok((grid, kind, values))
}

pub fn signal_from_bytes(bytes: &[u8], path: &Path) -> Result<Signal> {
    let (grid, kind, values) = decode(&mut &bytes[..], path)?;
    if kind != KIND_SIGNAL {
        return Err(Error::format(path, "payload is an STFT field, not a signal"));
    }
    Signal::new(grid, values).map_err(|e| Error::format(path, e.to_string()))
}

pub fn write_signal(path: &Path, u: &Signal) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_header(&mut w, &u.grid, KIND_SIGNAL).map_err(|e| Error::io(path, e))?;
    write_values(&mut w, &u.values).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_signal(path: &Path) -> Result<Signal> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let (grid, kind, values) = decode(&mut BufReader::new(file), path)?;
    if kind != KIND_SIGNAL {
        return Err(Error::format(path, "payload is an STFT field, not a signal"));
    }
    Signal::new(grid, values).map_err(|e| Error::format(path, e.to_string()))
}

pub fn write_field(path: &Path, f: &StftField) -> Result<()> {
    std::fs::write(path, field_to_bytes(f)).map_err(|e| Error::io(path, e))
}

pub fn read_field(path: &Path) -> Result<StftField> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let (grid, kind, values) = decode(&mut BufReader::new(file), path)?;
    if kind != KIND_FIELD {
        return Err(Error::format(path, "payload is a signal, not an STFT field"));
    }
    Ok(StftField { grid, s: None, values })
}

/// CSV with one row per sample: grid indices, coordinates, `re`, `im`.
pub fn signal_csv(u: &Signal) -> String {
    let g = u.grid;
    let mut out = String::new();
    let idx: Vec<String> = (0..g.d).map(|a| format!("i{a}")).collect();
    let crd: Vec<String> = (0..g.d).map(|a| format!("x{a}")).collect();
    out.push_str(&format!("{},{},re,im\n", idx.join(","), crd.join(",")));
    for (flat, v) in u.values.iter().enumerate() {
        let m = g.unflatten(flat);
        let i: Vec<String> = m[..g.d].iter().map(|j| j.to_string()).collect();
        let x: Vec<String> = m[..g.d].iter().map(|&j| format!("{:.12}", g.coord(j))).collect();
        out.push_str(&format!("{},{},{:.17e},{:.17e}\n", i.join(","), x.join(","), v.re, v.im));
    }
    out
}

/// CSV of an STFT field: x-lattice indices, frequency indices, `re`, `im`.
pub fn field_csv(f: &StftField) -> String {
    let g = f.grid;
    let nd = g.len();
    let mut out = String::new();
    let ix: Vec<String> = (0..g.d).map(|a| format!("ix{a}")).collect();
    let ik: Vec<String> = (0..g.d).map(|a| format!("ik{a}")).collect();
    out.push_str(&format!("{},{},re,im\n", ix.join(","), ik.join(",")));
    for (flat, v) in f.values.iter().enumerate() {
        let a = g.unflatten(flat / nd);
        let b = g.unflatten(flat % nd);
        let sa: Vec<String> = a[..g.d].iter().map(|j| j.to_string()).collect();
        let sb: Vec<String> = b[..g.d].iter().map(|j| j.to_string()).collect();
        out.push_str(&format!("{},{},{:.17e},{:.17e}\n", sa.join(","), sb.join(","), v.re, v.im));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::hermite;

    #[test]
    fn bytes_roundtrip() {
        let g = Grid::new(1, 32, 5.0).unwrap();
        let u = hermite(g, 2);
        let back = signal_from_bytes(&signal_to_bytes(&u), Path::new("mem")).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn corrupt_input_is_format_error() {
        let g = Grid::new(1, 32, 5.0).unwrap();
        let mut b = signal_to_bytes(&hermite(g, 2));
        b.truncate(b.len() - 3);
        assert!(matches!(signal_from_bytes(&b, Path::new("mem")), Err(Error::Format { .. })));
        assert!(matches!(signal_from_bytes(b"NOPE", Path::new("mem")), Err(Error::Format { .. })));
    }
}
