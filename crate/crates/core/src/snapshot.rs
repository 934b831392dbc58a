//! Binary field dumps: `"B4NL"`, `u32` version, `u32` dimension, `u32` point
//! count per axis, `f64` extent per axis, then row-major `(re, im)` `f64`
//! pairs. Little-endian throughout.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField, Space};
use crate::grid::Grid;

pub const MAGIC: &[u8; 4] = b"B4NL";
pub const VERSION: u32 = 1;

pub fn to_bytes(f: &ComplexField) -> Result<Vec<u8>> {
    f.require_physical("snapshot")?;
    let grid = f.grid();
    let mut out = Vec::with_capacity(12 + 12 * grid.dim() + 16 * f.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    for &n in grid.points() {
        let n = u32::try_from(n).map_err(|_| Error::Format(format!("axis length {n} does not fit in u32")))?;
        out.extend_from_slice(&n.to_le_bytes());
    }
    for &l in grid.extents() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for z in f.values() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const K: usize>(&mut self) -> Result<[u8; K]> {
        let end = self.pos + K;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Format(format!("snapshot truncated at byte {}", self.pos)))?;
        self.pos = end;
        Ok(chunk.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<ComplexField> {
    let mut r = Reader { bytes, pos: 0 };
    if &r.take::<4>()? != MAGIC {
        return Err(Error::Format("not a B4NL snapshot (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let dim = r.u32()? as usize;
    if dim == 0 || dim > 8 {
        return Err(Error::Format(format!("implausible snapshot dimension {dim}")));
    }
    let points = (0..dim).map(|_| r.u32().map(|n| n as usize)).collect::<Result<Vec<_>>>()?;
    let extents = (0..dim).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    let grid = Grid::new(&extents, &points)?;
    let expected = r.pos + 16 * grid.len();
    if bytes.len() != expected {
        return Err(Error::Format(format!("snapshot has {} bytes, header implies {expected}", bytes.len())));
    }
    let values = (0..grid.len()).map(|_| Ok(Complex64::new(r.f64()?, r.f64()?))).collect::<Result<Vec<_>>>()?;
    ComplexField::from_values(&grid, values, Space::Physical)
}

pub fn write(path: impl AsRef<Path>, f: &ComplexField) -> Result<()> {
    fs::write(path, to_bytes(f)?)?;
    Ok(())
}

pub fn read(path: impl AsRef<Path>) -> Result<ComplexField> {
    from_bytes(&fs::read(path)?)
}
