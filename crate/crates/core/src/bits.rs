//! Word-packed bit arrays and the on-disk bitmap format shared by the
//! practical sieve and the representability bitmaps.
//!
//! File layout (all integers little-endian):
//!
//! | offset | size | field                                            |
//! |--------|------|--------------------------------------------------|
//! | 0      | 8    | magic `PSUMBITS`                                 |
//! | 8      | 2    | format version (currently 1)                     |
//! | 10     | 1    | kind: 0 practical, 1 one-gonal, 2 two-gonal      |
//! | 11     | 1    | flags: bit 0 set when gonal index 0 was allowed  |
//! | 12     | 4    | gonality `s` (0 for the practical sieve)         |
//! | 16     | 8    | bound                                            |
//! | 24     | 8    | number of bits `len`                             |
//! | 32     | ⌈len/8⌉ | payload; bit `i` is bit `i % 8` of byte `i / 8` |

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"PSUMBITS";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 32;

#[derive(Clone, PartialEq, Eq)]
pub struct Bitset {
    words: Vec<u64>,
    len: usize,
}

impl std::fmt::Debug for Bitset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Bitset {{ len: {}, ones: {} }}", self.len, self.count_ones())
    }
}

impl Bitset {
    pub fn new(len: usize) -> Result<Self> {
        let n_words = len.div_ceil(64);
        let mut words = Vec::new();
        words
            .try_reserve_exact(n_words)
            .map_err(|e| Error::Resource(format!("bitset of {len} bits: {e}")))?;
        words.resize(n_words, 0);
        Ok(Bitset { words, len })
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert_eq!(words.len(), len.div_ceil(64));
        let mut b = Bitset { words, len };
        b.clear_tail();
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i >> 6] &= !(1 << (i & 63));
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// Indices in `range` whose bit is clear, ascending.
    pub fn iter_zeros_in(&self, range: std::ops::Range<usize>) -> impl Iterator<Item = usize> + '_ {
        let end = range.end.min(self.len);
        (range.start.min(end)..end).filter(move |&i| !self.get(i))
    }

    fn clear_tail(&mut self) {
        let rem = self.len & 63;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Word `word` of `src` shifted left by `offset` bits, i.e. bits
/// `[64*word - offset, 64*word - offset + 64)` of `src`, with bits below zero
/// reading as clear.
#[inline]
pub(crate) fn shifted_word(src: &[u64], word: usize, offset: usize) -> u64 {
    let q = offset >> 6;
    let r = offset & 63;
    if word < q {
        return 0;
    }
    let hi_idx = word - q;
    let hi = src.get(hi_idx).copied().unwrap_or(0);
    if r == 0 {
        return hi;
    }
    let lo = if hi_idx > 0 { src.get(hi_idx - 1).copied().unwrap_or(0) } else { 0 };
    (hi << r) | (lo >> (64 - r))
}

/// What a bitmap file describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitmapKind {
    Practical,
    OneGonal,
    TwoGonal,
}

impl BitmapKind {
    fn tag(self) -> u8 {
        match self {
            BitmapKind::Practical => 0,
            BitmapKind::OneGonal => 1,
            BitmapKind::TwoGonal => 2,
        }
    }

    fn from_tag(t: u8) -> Result<Self> {
        Ok(match t {
            0 => BitmapKind::Practical,
            1 => BitmapKind::OneGonal,
            2 => BitmapKind::TwoGonal,
            _ => return Err(Error::Format(format!("unknown bitmap kind {t}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitmapHeader {
    pub kind: BitmapKind,
    pub allow_zero: bool,
    pub s: u32,
    pub bound: u64,
}

pub fn write_bitmap<W: Write>(mut w: W, header: &BitmapHeader, bits: &Bitset) -> Result<()> {
    let mut head = [0u8; HEADER_LEN];
    head[..8].copy_from_slice(MAGIC);
    head[8..10].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
    head[10] = header.kind.tag();
    head[11] = header.allow_zero as u8;
    head[12..16].copy_from_slice(&header.s.to_le_bytes());
    head[16..24].copy_from_slice(&header.bound.to_le_bytes());
    head[24..32].copy_from_slice(&(bits.len() as u64).to_le_bytes());
    w.write_all(&head)?;
    let n_bytes = bits.len().div_ceil(8);
    let mut payload = Vec::with_capacity(n_bytes);
    for word in bits.words() {
        payload.extend_from_slice(&word.to_le_bytes());
    }
    payload.truncate(n_bytes);
    w.write_all(&payload)?;
    Ok(())
}

pub fn read_bitmap<R: Read>(mut r: R) -> Result<(BitmapHeader, Bitset)> {
    let mut head = [0u8; HEADER_LEN];
    r.read_exact(&mut head)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if &head[..8] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u16::from_le_bytes([head[8], head[9]]);
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let kind = BitmapKind::from_tag(head[10])?;
    if head[11] > 1 {
        return Err(Error::Format(format!("unknown flags {:#x}", head[11])));
    }
    let allow_zero = head[11] == 1;
    let s = u32::from_le_bytes(head[12..16].try_into().unwrap());
    let bound = u64::from_le_bytes(head[16..24].try_into().unwrap());
    let len = u64::from_le_bytes(head[24..32].try_into().unwrap());
    let len = usize::try_from(len).map_err(|_| Error::Format("length too large".into()))?;
    let n_bytes = len.div_ceil(8);
    let mut payload = Vec::new();
    payload
        .try_reserve_exact(n_bytes)
        .map_err(|e| Error::Resource(e.to_string()))?;
    payload.resize(n_bytes, 0);
    r.read_exact(&mut payload)
        .map_err(|_| Error::Format("truncated payload".into()))?;
    let mut words = vec![0u64; len.div_ceil(64)];
    for (i, chunk) in payload.chunks(8).enumerate() {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        words[i] = u64::from_le_bytes(buf);
    }
    let header = BitmapHeader { kind, allow_zero, s, bound };
    Ok((header, Bitset::from_words(words, len)))
}
