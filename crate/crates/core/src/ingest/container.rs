//! Versioned index file: header, section table, payload.
//!
//! ```text
//! magic "RJIX" | version u16 | variant u8 | n u64 | universe u32 | count u32
//! count x (name: u16 len + utf-8, offset u64, length u64, crc32 u32)
//! section payloads
//! ```
//! All integers are little-endian; offsets are relative to the payload
//! start.

use std::fs;
use std::path::Path;

use crate::codec::Persist;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"RJIX";
pub const VERSION: u16 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Container {
    tag: u8,
    n: u64,
    universe: u32,
    sections: Vec<(String, Vec<u8>)>,
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    what: &'static str,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < k {
            return Err(Error::corrupt(self.what, "truncated"));
        }
        let s = &self.buf[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

impl Container {
    pub fn new(tag: u8, n: u64, universe: u32) -> Self {
        Self {
            tag,
            n,
            universe,
            sections: Vec::new(),
        }
    }

    pub fn tag(&self) -> u8 {
        self.tag
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn section_names(&self) -> impl Iterator<Item = &str> {
        self.sections.iter().map(|(n, _)| n.as_str())
    }

    pub fn has(&self, name: &str) -> bool {
        self.sections.iter().any(|(n, _)| n == name)
    }

    pub fn put<T: Persist>(&mut self, name: &str, value: &T) {
        self.put_raw(name, value.to_bytes());
    }

    pub fn put_raw(&mut self, name: &str, bytes: Vec<u8>) {
        assert!(!self.has(name), "duplicate section {name}");
        self.sections.push((name.to_string(), bytes));
    }

    pub fn raw(&self, name: &str) -> Result<&[u8]> {
        self.sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.as_slice())
            .ok_or_else(|| Error::corrupt(name, "missing"))
    }

    pub fn get<T: Persist>(&self, name: &str) -> Result<T> {
        T::from_bytes(self.raw(name)?, name)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.tag);
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.universe.to_le_bytes());
        out.extend_from_slice(&(self.sections.len() as u32).to_le_bytes());
        let mut offset = 0u64;
        for (name, bytes) in &self.sections {
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            out.extend_from_slice(&offset.to_le_bytes());
            out.extend_from_slice(&(bytes.len() as u64).to_le_bytes());
            out.extend_from_slice(&crc32fast::hash(bytes).to_le_bytes());
            offset += bytes.len() as u64;
        }
        for (_, bytes) in &self.sections {
            out.extend_from_slice(bytes);
        }
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader {
            buf,
            pos: 0,
            what: "header",
        };
        if r.take(4)? != MAGIC {
            return Err(Error::corrupt("header", "bad magic, not an index file"));
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(Error::corrupt(
                "header",
                format!("unsupported version {version}, expected {VERSION}"),
            ));
        }
        let tag = r.take(1)?[0];
        let n = r.u64()?;
        let universe = r.u32()?;
        let count = r.u32()? as usize;
        r.what = "section table";
        let mut table = Vec::with_capacity(count.min(1024));
        for _ in 0..count {
            let len = r.u16()? as usize;
            let name = std::str::from_utf8(r.take(len)?)
                .map_err(|_| Error::corrupt("section table", "section name is not utf-8"))?
                .to_string();
            let offset = r.u64()?;
            let length = r.u64()?;
            let crc = r.u32()?;
            table.push((name, offset, length, crc));
        }
        let payload = &buf[r.pos..];
        let mut sections = Vec::with_capacity(table.len());
        let mut expected = 0u64;
        for (name, offset, length, crc) in table {
            let end = offset.checked_add(length);
            if offset != expected || end.is_none_or(|e| e > payload.len() as u64) {
                return Err(Error::corrupt(&name, "extends past the end of the file"));
            }
            let bytes = &payload[offset as usize..(offset + length) as usize];
            if crc32fast::hash(bytes) != crc {
                return Err(Error::corrupt(&name, "checksum mismatch"));
            }
            if sections.iter().any(|(n, _): &(String, Vec<u8>)| *n == name) {
                return Err(Error::corrupt(&name, "duplicate section"));
            }
            expected = offset + length;
            sections.push((name, bytes.to_vec()));
        }
        if expected != payload.len() as u64 {
            return Err(Error::corrupt("section table", "trailing bytes after the last section"));
        }
        Ok(Self {
            tag,
            n,
            universe,
            sections,
        })
    }

    pub fn write(&self, path: &Path) -> Result<u64> {
        let bytes = self.to_bytes();
        fs::write(path, &bytes)?;
        Ok(bytes.len() as u64)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}
