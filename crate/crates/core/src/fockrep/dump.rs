//! Debug dump of matrices: a 16-byte little-endian header (rows, cols, cutoff,
//! modes as u32) followed by row-major complex128 entries.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::linalg::CMat;

pub fn write_dump<W: Write>(
    mut w: W,
    m: &CMat,
    cutoff: usize,
    modes: usize,
) -> std::io::Result<()> {
    for v in [m.nrows(), m.ncols(), cutoff, modes] {
        w.write_all(&(v as u32).to_le_bytes())?;
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].re.to_le_bytes())?;
            w.write_all(&m[(i, j)].im.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Returns (matrix, cutoff, modes).
pub fn read_dump<R: Read>(mut r: R) -> std::io::Result<(CMat, usize, usize)> {
    let mut head = [0u8; 16];
    r.read_exact(&mut head)?;
    let word = |k: usize| u32::from_le_bytes(head[4 * k..4 * k + 4].try_into().unwrap()) as usize;
    let (rows, cols) = (word(0), word(1));
    let mut m = CMat::zeros(rows, cols);
    let mut buf = [0u8; 8];
    for i in 0..rows {
        for j in 0..cols {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf);
            r.read_exact(&mut buf)?;
            let im = f64::from_le_bytes(buf);
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok((m, word(2), word(3)))
}
