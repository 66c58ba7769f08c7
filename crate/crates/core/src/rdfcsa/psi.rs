//! Storage for the cyclic Ψ of an rdfcsa.
//!
//! Ψ maps region `k` (positions `k*n+1 ..= (k+1)*n`) into region
//! `(k+1) mod 3`, and is increasing inside every first-symbol run.

use std::fmt::Debug;

use crate::codec::{Decoder, Encoder, Persist};
use crate::error::Result;
use crate::succinct::{bits_for, PackedInts};

/// Sample period of [`SampledPsi`].
pub const PSI_SAMPLE: usize = 16;

pub trait PsiSeq: Persist + Clone + Debug + PartialEq + Send + Sync {
    /// `values[i-1]` is Ψ(i); `n` is the region length.
    fn build(values: &[u32], n: usize) -> Self;

    /// Ψ(i) for `1 <= i <= len`.
    fn get(&self, i: usize) -> usize;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn size_in_bytes(&self) -> usize;
}

fn target_base(i: usize, n: usize) -> usize {
    let k = (i - 1) / n;
    ((k + 1) % 3) * n
}

/// Every entry stored explicitly, relative to the start of its target
/// region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainPsi {
    n: usize,
    vals: PackedInts,
}

impl PsiSeq for PlainPsi {
    fn build(values: &[u32], n: usize) -> Self {
        let rel: Vec<u64> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v as usize - target_base(i + 1, n) - 1) as u64)
            .collect();
        let width = bits_for(n.saturating_sub(1) as u64);
        Self {
            n,
            vals: PackedInts::with_width(&rel, width),
        }
    }

    #[inline]
    fn get(&self, i: usize) -> usize {
        target_base(i, self.n) + 1 + self.vals.get(i - 1) as usize
    }

    fn len(&self) -> usize {
        self.vals.len()
    }

    fn size_in_bytes(&self) -> usize {
        self.vals.size_in_bytes() + 8
    }
}

impl Persist for PlainPsi {
    fn encode(&self, enc: &mut Encoder) {
        enc.put_usize(self.n);
        self.vals.encode(enc);
    }

    fn decode(dec: &mut Decoder<'_>) -> Result<Self> {
        let n = dec.get_usize()?;
        let vals = PackedInts::decode(dec)?;
        if vals.len() != 3 * n {
            return Err(dec.error("psi length is not 3n"));
        }
        Ok(Self { n, vals })
    }
}

/// Absolute samples every [`PSI_SAMPLE`] entries; in between, byte-aligned
/// varint tokens holding either one zigzag delta or a run of `+1` deltas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledPsi {
    n: usize,
    len: usize,
    samples: PackedInts,
    offsets: PackedInts,
    bytes: Vec<u8>,
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

#[inline]
fn get_varint(bytes: &[u8], pos: &mut usize) -> u64 {
    let mut v = 0u64;
    let mut shift = 0;
    loop {
        let b = bytes[*pos];
        *pos += 1;
        v |= ((b & 0x7f) as u64) << shift;
        if b < 0x80 {
            return v;
        }
        shift += 7;
    }
}

fn zigzag(d: i64) -> u64 {
    ((d << 1) ^ (d >> 63)) as u64
}

fn unzigzag(z: u64) -> i64 {
    (z >> 1) as i64 ^ -((z & 1) as i64)
}

impl PsiSeq for SampledPsi {
    fn build(values: &[u32], n: usize) -> Self {
        let mut samples = Vec::with_capacity(values.len().div_ceil(PSI_SAMPLE));
        let mut offsets = Vec::with_capacity(samples.capacity());
        let mut bytes = Vec::new();
        for block in values.chunks(PSI_SAMPLE) {
            samples.push(block[0] as u64);
            offsets.push(bytes.len() as u64);
            let mut run = 0u64;
            for w in block.windows(2) {
                let d = w[1] as i64 - w[0] as i64;
                if d == 1 {
                    run += 1;
                    continue;
                }
                if run > 0 {
                    put_varint(&mut bytes, run << 1 | 1);
                    run = 0;
                }
                put_varint(&mut bytes, zigzag(d) << 1);
            }
            if run > 0 {
                put_varint(&mut bytes, run << 1 | 1);
            }
        }
        Self {
            n,
            len: values.len(),
            samples: PackedInts::from_slice(&samples),
            offsets: PackedInts::from_slice(&offsets),
            bytes,
        }
    }

    fn get(&self, i: usize) -> usize {
        let j = (i - 1) / PSI_SAMPLE;
        let mut left = (i - 1) % PSI_SAMPLE;
        let mut v = self.samples.get(j) as i64;
        let mut pos = self.offsets.get(j) as usize;
        while left > 0 {
            let tok = get_varint(&self.bytes, &mut pos);
            if tok & 1 == 1 {
                let take = ((tok >> 1) as usize).min(left);
                v += take as i64;
                left -= take;
            } else {
                v += unzigzag(tok >> 1);
                left -= 1;
            }
        }
        v as usize
    }

    fn len(&self) -> usize {
        self.len
    }

    fn size_in_bytes(&self) -> usize {
        self.samples.size_in_bytes() + self.offsets.size_in_bytes() + self.bytes.len() + 16
    }
}

impl Persist for SampledPsi {
    fn encode(&self, enc: &mut Encoder) {
        enc.put_usize(self.n);
        enc.put_usize(self.len);
        self.samples.encode(enc);
        self.offsets.encode(enc);
        enc.put_bytes(&self.bytes);
    }

    fn decode(dec: &mut Decoder<'_>) -> Result<Self> {
        let n = dec.get_usize()?;
        let len = dec.get_usize()?;
        let samples = PackedInts::decode(dec)?;
        let offsets = PackedInts::decode(dec)?;
        let bytes = dec.get_bytes()?;
        let blocks = len.div_ceil(PSI_SAMPLE);
        if len != 3 * n || samples.len() != blocks || offsets.len() != blocks {
            return Err(dec.error("psi sample table does not match its length"));
        }
        if offsets.iter().any(|o| o as usize > bytes.len())
            || samples.iter().any(|s| s == 0 || s as usize > len)
        {
            return Err(dec.error("psi sample out of range"));
        }
        // Every block must decode inside the byte stream.
        for j in 0..blocks {
            let end = if j + 1 < blocks { offsets.get(j + 1) as usize } else { bytes.len() };
            let mut pos = offsets.get(j) as usize;
            if end < pos {
                return Err(dec.error("psi offsets are not monotone"));
            }
            let want = (len - j * PSI_SAMPLE).min(PSI_SAMPLE) - 1;
            let mut got = 0usize;
            while pos < end {
                let mut shift = 0;
                let mut tok = 0u64;
                loop {
                    if pos >= end || shift > 63 {
                        return Err(dec.error("psi token truncated"));
                    }
                    let b = bytes[pos];
                    pos += 1;
                    tok |= ((b & 0x7f) as u64) << shift;
                    if b < 0x80 {
                        break;
                    }
                    shift += 7;
                }
                got += if tok & 1 == 1 { (tok >> 1) as usize } else { 1 };
            }
            if got != want {
                return Err(dec.error("psi block has the wrong number of entries"));
            }
        }
        Ok(Self {
            n,
            len,
            samples,
            offsets,
            bytes,
        })
    }
}
