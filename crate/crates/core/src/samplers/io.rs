//! Sample streams on disk: CSV (one row per sample) or the `LSMP` binary
//! layout `magic | version u32 | d u32 | count u64 | count*d i64`, little endian.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::lattice::IntegerPoint;

pub const MAGIC: &[u8; 4] = b"LSMP";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    Csv,
    Binary,
}

fn check_dims(dim: usize, samples: &[IntegerPoint]) -> Result<()> {
    match samples.iter().find(|s| s.dim() != dim) {
        Some(s) => Err(Error::DimensionMismatch { expected: dim, got: s.dim() }),
        None => Ok(()),
    }
}

/// `metadata` pairs are written as `# key=value` lines before the header.
pub fn write_csv<W: Write>(mut w: W, dim: usize, samples: &[IntegerPoint], metadata: &[(String, String)]) -> Result<()> {
    check_dims(dim, samples)?;
    for (k, v) in metadata {
        writeln!(w, "# {k}={v}")?;
    }
    let header: Vec<String> = (0..dim).map(|i| format!("z{i}")).collect();
    writeln!(w, "{}", header.join(","))?;
    let mut line = String::new();
    for s in samples {
        line.clear();
        for (i, v) in s.0.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<IntegerPoint>> {
    let mut out = Vec::new();
    let mut dim = None;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if dim.is_none() {
            dim = Some(t.split(',').count());
            continue;
        }
        let row: std::result::Result<Vec<i64>, _> = t.split(',').map(|s| s.trim().parse::<i64>()).collect();
        let row = row.map_err(|e| Error::Parse { line: idx + 1, msg: e.to_string() })?;
        if Some(row.len()) != dim {
            return Err(Error::Parse { line: idx + 1, msg: format!("expected {} fields, got {}", dim.unwrap_or(0), row.len()) });
        }
        out.push(IntegerPoint(row));
    }
    Ok(out)
}

pub fn write_binary<W: Write>(mut w: W, dim: usize, samples: &[IntegerPoint]) -> Result<()> {
    check_dims(dim, samples)?;
    let d = u32::try_from(dim).map_err(|_| Error::InvalidInput("dimension too large".into()))?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&d.to_le_bytes())?;
    w.write_all(&(samples.len() as u64).to_le_bytes())?;
    for s in samples {
        for v in &s.0 {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<(usize, Vec<IntegerPoint>)> {
    let mut head = [0u8; 20];
    r.read_exact(&mut head)?;
    if &head[0..4] != MAGIC {
        return Err(Error::InvalidInput("not an LSMP sample file".into()));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(Error::InvalidInput(format!("unsupported LSMP version {version}")));
    }
    let dim = u32::from_le_bytes(head[8..12].try_into().expect("4 bytes")) as usize;
    let count = u64::from_le_bytes(head[12..20].try_into().expect("8 bytes")) as usize;
    let mut out = Vec::with_capacity(count.min(1 << 20));
    let mut buf = [0u8; 8];
    for _ in 0..count {
        let mut z = Vec::with_capacity(dim);
        for _ in 0..dim {
            r.read_exact(&mut buf)?;
            z.push(i64::from_le_bytes(buf));
        }
        out.push(IntegerPoint(z));
    }
    Ok((dim, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts() -> Vec<IntegerPoint> {
        vec![IntegerPoint(vec![1, -2, 3]), IntegerPoint(vec![0, 0, i64::MIN])]
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_csv(&mut buf, 3, &pts(), &[("seed".into(), "7".into())]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# seed=7\nz0,z1,z2\n1,-2,3\n"));
        assert_eq!(read_csv(&buf[..]).unwrap(), pts());
    }

    #[test]
    fn binary_round_trip() {
        let mut buf = Vec::new();
        write_binary(&mut buf, 3, &pts()).unwrap();
        assert_eq!(buf.len(), 20 + 2 * 3 * 8);
        let (d, back) = read_binary(&buf[..]).unwrap();
        assert_eq!((d, back), (3, pts()));
    }

    #[test]
    fn malformed_inputs() {
        assert!(write_csv(Vec::new(), 2, &pts(), &[]).is_err());
        assert!(read_binary(&b"NOPE\0\0\0\0"[..]).is_err());
        let err = read_csv(&b"a,b\n1,2\n3\n"[..]).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }
}
