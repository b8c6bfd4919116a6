//! Binary replay format for field samples.
//!
//! Layout, all little-endian: the 8-byte magic `MOTKFLD1`, n_points as u64,
//! then half_width, gamma, β₁, β₂, β₃ as f64, then n field values and n cell
//! weights as f64.

use std::io::{self, Read, Write};

use super::field::{Boundary, BoundaryFieldSample, BoundaryGridSpec, DriftSpec};
use crate::specfun::InsertionTriple;

const MAGIC: &[u8; 8] = b"MOTKFLD1";

pub fn write_field<W: Write>(mut w: W, s: &BoundaryFieldSample) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(s.grid.n_points as u64).to_le_bytes())?;
    let b = s.drift.betas;
    for v in [s.grid.half_width, s.drift.gamma, b.beta1, b.beta2, b.beta3] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in s.values.iter().chain(&s.gmc_weights) {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

fn f64_from<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

pub fn read_field<R: Read>(mut r: R) -> io::Result<BoundaryFieldSample> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "not a field sample file"));
    }
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    let n = u64::from_le_bytes(buf) as usize;
    let mut head = [0.0; 5];
    for h in head.iter_mut() {
        *h = f64_from(&mut r)?;
    }
    let values = (0..n).map(|_| f64_from(&mut r)).collect::<io::Result<Vec<_>>>()?;
    let gmc_weights = (0..n).map(|_| f64_from(&mut r)).collect::<io::Result<Vec<_>>>()?;
    Ok(BoundaryFieldSample {
        grid: BoundaryGridSpec { half_width: head[0], n_points: n, boundary: Boundary::Top },
        drift: DriftSpec::new(head[1], InsertionTriple::new(head[2], head[3], head[4])),
        values,
        gmc_weights,
    })
}
