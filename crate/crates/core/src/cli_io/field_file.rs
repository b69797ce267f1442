//! `NGF1` binary field files.
//!
//! ```text
//! offset  size      content
//! 0       4         magic "NGF1"
//! 4       1         u8 dimension (2 or 3)
//! 5       1         u8 components per node (1, n or n^2)
//! 6       4 n       u32 shape per axis
//! ..      8 n       f64 spacing per axis
//! ..      8 n       f64 origin per axis
//! ..      8 N c     f64 samples, row-major, components fastest
//! ```
//!
//! All multi-byte values are little-endian.

use crate::error::{Error, Result};
use crate::grid::{GridField, GridSpec};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"NGF1";

/// Contents of a field file, not yet bound to a dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub dim: usize,
    pub components: usize,
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    pub data: Vec<f64>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Format {
                offset: self.pos,
                reason: format!("truncated {what}: need {n} bytes, {} left", self.bytes.len() - self.pos),
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

impl FieldFile {
    pub fn from_field<const D: usize, F: GridField<D>>(f: &F) -> Self {
        let spec = f.spec();
        Self {
            dim: D,
            components: F::components_per_node(),
            shape: spec.shape().to_vec(),
            spacing: spec.spacing().to_vec(),
            origin: spec.origin().to_vec(),
            data: f.data().to_vec(),
        }
    }

    pub fn grid<const D: usize>(&self) -> Result<GridSpec<D>> {
        if self.dim != D {
            return Err(Error::InvalidArgument(format!("expected a {D}-dimensional field, file holds {}", self.dim)));
        }
        GridSpec::new(
            std::array::from_fn(|a| self.shape[a]),
            std::array::from_fn(|a| self.spacing[a]),
            std::array::from_fn(|a| self.origin[a]),
        )
    }

    /// Binds the samples to a field type, checking dimension and component count.
    pub fn to_field<const D: usize, F: GridField<D>>(&self) -> Result<F> {
        let spec = self.grid::<D>()?;
        if self.components != F::components_per_node() {
            return Err(Error::InvalidArgument(format!(
                "expected {} components per node, file holds {}",
                F::components_per_node(),
                self.components
            )));
        }
        F::from_raw(spec, self.data.clone())
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(6 + self.dim * 20 + self.data.len() * 8);
        out.extend_from_slice(MAGIC);
        out.push(self.dim as u8);
        out.push(self.components as u8);
        for &n in &self.shape {
            out.extend_from_slice(&(n as u32).to_le_bytes());
        }
        for v in self.spacing.iter().chain(&self.origin).chain(&self.data) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut c = Cursor { bytes, pos: 0 };
        if c.take(4, "magic")? != MAGIC {
            return Err(Error::Format { offset: 0, reason: "bad magic, expected NGF1".into() });
        }
        let dim = c.u8("dimension")? as usize;
        if !(2..=3).contains(&dim) {
            return Err(Error::Format { offset: 4, reason: format!("dimension {dim} not in {{2, 3}}") });
        }
        let components = c.u8("component count")? as usize;
        if ![1, dim, dim * dim].contains(&components) {
            return Err(Error::Format {
                offset: 5,
                reason: format!("{components} components per node; expected 1, {dim} or {}", dim * dim),
            });
        }
        let mut shape = Vec::with_capacity(dim);
        for a in 0..dim {
            let at = c.pos;
            let n = c.u32("shape")? as usize;
            if n == 0 {
                return Err(Error::Format { offset: at, reason: format!("axis {a} has zero nodes") });
            }
            shape.push(n);
        }
        let mut spacing = Vec::with_capacity(dim);
        for a in 0..dim {
            let at = c.pos;
            let h = c.f64("spacing")?;
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Format { offset: at, reason: format!("spacing {h} on axis {a} is not positive") });
            }
            spacing.push(h);
        }
        let mut origin = Vec::with_capacity(dim);
        for a in 0..dim {
            let at = c.pos;
            let o = c.f64("origin")?;
            if !o.is_finite() {
                return Err(Error::Format { offset: at, reason: format!("origin {o} on axis {a} is not finite") });
            }
            origin.push(o);
        }
        let count = shape.iter().try_fold(components, |acc, &n| acc.checked_mul(n));
        let payload = count
            .and_then(|n| n.checked_mul(8))
            .ok_or_else(|| Error::Format { offset: 6, reason: "shape overflows the addressable size".into() })?;
        let raw = c.take(payload, "payload")?;
        if c.pos != bytes.len() {
            return Err(Error::Format {
                offset: c.pos,
                reason: format!("{} trailing bytes after payload", bytes.len() - c.pos),
            });
        }
        let data = raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
        Ok(Self { dim, components, shape, spacing, origin, data })
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&self.encode())?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::decode(&bytes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.encode())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::decode(&fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ScalarField;

    #[test]
    fn header_layout() {
        let spec = GridSpec::new([4, 5], [0.5, 0.25], [-1.0, 0.0]).unwrap();
        let f = ScalarField::from_fn(spec, |x| x[0] + x[1]).unwrap();
        let bytes = FieldFile::from_field(&f).encode();
        assert_eq!(&bytes[..6], b"NGF1\x02\x01");
        assert_eq!(&bytes[6..10], &4u32.to_le_bytes());
        assert_eq!(&bytes[14..22], &0.5f64.to_le_bytes());
        assert_eq!(bytes.len(), 6 + 8 + 32 + 20 * 8);
    }
}
