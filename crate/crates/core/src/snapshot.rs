//! Binary snapshot files.
//!
//! Layout, all little-endian: magic `FBRG`, format version `u32`, `N` as
//! `u64`, then `L`, `t`, `α`, `ν` as `f64`, then the `N` samples as `f64`.

use std::io::{self, Read, Write};

use crate::spectral::{DomainSpec, EvolutionParams, GridFunction};

pub const MAGIC: [u8; 4] = *b"FBRG";
pub const FORMAT_VERSION: u32 = 1;

/// A snapshot as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub t: f64,
    pub params: EvolutionParams,
    pub u: GridFunction,
}

pub fn write_snapshot<W: Write>(
    mut w: W,
    t: f64,
    params: &EvolutionParams,
    u: &GridFunction,
) -> io::Result<()> {
    let d = u.domain();
    w.write_all(&MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(d.points as u64).to_le_bytes())?;
    for x in [d.length, t, params.alpha, params.nu] {
        w.write_all(&x.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(8 * d.points);
    for x in u.samples() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf)
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_snapshot<R: Read>(mut r: R) -> io::Result<SnapshotFile> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(invalid("bad snapshot magic"));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != FORMAT_VERSION {
        return Err(invalid(format!("unsupported snapshot version {version}")));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let n = usize::try_from(u64::from_le_bytes(b8)).map_err(|_| invalid("grid size overflows"))?;
    let length = read_f64(&mut r)?;
    let t = read_f64(&mut r)?;
    let alpha = read_f64(&mut r)?;
    let nu = read_f64(&mut r)?;
    let domain = DomainSpec::new(length, n).map_err(|e| invalid(e.to_string()))?;
    let params = EvolutionParams::new(alpha, nu).map_err(|e| invalid(e.to_string()))?;
    let mut raw = vec![0u8; 8 * n];
    r.read_exact(&mut raw)?;
    let samples = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let u = GridFunction::from_samples(domain, samples).map_err(|e| invalid(e.to_string()))?;
    Ok(SnapshotFile { t, params, u })
}
