//! CSV and PGM exports of field files.

use super::field_file::FieldFile;
use crate::error::{Error, Result};
use std::io::Write;

fn node_point(f: &FieldFile, mut k: usize) -> Vec<f64> {
    let mut idx = vec![0; f.dim];
    for a in (0..f.dim).rev() {
        idx[a] = k % f.shape[a];
        k /= f.shape[a];
    }
    (0..f.dim).map(|a| f.origin[a] + idx[a] as f64 * f.spacing[a]).collect()
}

/// One row per node: coordinates, then `value` or `c0, c1, ...`.
pub fn write_csv(f: &FieldFile, mut w: impl Write) -> Result<()> {
    let axes = ["x", "y", "z"];
    let mut header: Vec<String> = axes[..f.dim].iter().map(|s| s.to_string()).collect();
    if f.components == 1 {
        header.push("value".into());
    } else {
        header.extend((0..f.components).map(|c| format!("c{c}")));
    }
    writeln!(w, "{}", header.join(","))?;
    for (k, node) in f.data.chunks_exact(f.components).enumerate() {
        let row: Vec<String> = node_point(f, k).iter().chain(node).map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Binary greyscale image of a scalar field, scaled to `[0, 255]`.
///
/// Axis 0 runs left to right and axis 1 bottom to top. A 3D field is cut at
/// the middle index of axis 2.
pub fn write_pgm(f: &FieldFile, mut w: impl Write) -> Result<()> {
    if f.components != 1 {
        return Err(Error::InvalidArgument(format!("PGM needs a scalar field, got {} components", f.components)));
    }
    let (nx, ny) = (f.shape[0], f.shape[1]);
    let nz = if f.dim == 3 { f.shape[2] } else { 1 };
    let mid = nz / 2;
    let at = |i: usize, j: usize| f.data[(i * ny + j) * nz + mid];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..nx {
        for j in 0..ny {
            lo = lo.min(at(i, j));
            hi = hi.max(at(i, j));
        }
    }
    let range = if hi > lo { hi - lo } else { 1.0 };
    write!(w, "P5\n{nx} {ny}\n255\n")?;
    let mut pixels = Vec::with_capacity(nx * ny);
    for j in (0..ny).rev() {
        for i in 0..nx {
            pixels.push((255.0 * (at(i, j) - lo) / range).round() as u8);
        }
    }
    w.write_all(&pixels)?;
    Ok(())
}
