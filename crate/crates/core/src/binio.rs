//! Little-endian binary helpers shared by the on-disk formats, plus atomic
//! file replacement.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub fn put_u32(w: &mut impl Write, v: u32) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub fn put_u64(w: &mut impl Write, v: u64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub fn put_i64(w: &mut impl Write, v: i64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub fn put_f64(w: &mut impl Write, v: f64) -> io::Result<()> {
    w.write_all(&v.to_bits().to_le_bytes())
}

fn take<const N: usize>(r: &mut impl Read) -> io::Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn get_u32(r: &mut impl Read) -> io::Result<u32> {
    take::<4>(r).map(u32::from_le_bytes)
}

pub fn get_u64(r: &mut impl Read) -> io::Result<u64> {
    take::<8>(r).map(u64::from_le_bytes)
}

pub fn get_i64(r: &mut impl Read) -> io::Result<i64> {
    take::<8>(r).map(i64::from_le_bytes)
}

pub fn get_f64(r: &mut impl Read) -> io::Result<f64> {
    take::<8>(r).map(|b| f64::from_bits(u64::from_le_bytes(b)))
}

pub fn expect_magic(r: &mut impl Read, magic: &[u8; 4], what: &'static str) -> Result<()> {
    let got = take::<4>(r)?;
    if &got != magic {
        return Err(Error::format(
            what,
            format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(&got),
                String::from_utf8_lossy(magic)
            ),
        ));
    }
    Ok(())
}

pub fn expect_version(r: &mut impl Read, version: u32, what: &'static str) -> Result<()> {
    let got = get_u32(r)?;
    if got != version {
        return Err(Error::format(
            what,
            format!("unsupported version {got}, expected {version}"),
        ));
    }
    Ok(())
}

/// Fails unless the reader is exhausted.
pub fn expect_eof(r: &mut impl Read, what: &'static str) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(Error::format(what, "trailing bytes after payload")),
    }
}

/// Converts a length read from disk, rejecting values that cannot be addressed.
pub fn len_from_u64(v: u64, what: &'static str) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::format(what, format!("length {v} too large")))
}

/// Writes `bytes` to `path` through a sibling temp file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::at(dir, e))?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::at(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::at(&tmp, e))?;
        f.sync_all().map_err(|e| Error::at(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::at(path, e))?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::at(path, e))
}
