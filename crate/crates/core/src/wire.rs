//! Binary encoding of summaries exchanged between workers and written to disk.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic  b"SSS1"
//! k      u32
//! nz     u32
//! nz x { item u32, est_freq u64, err u64 }   ascending by (est_freq, item)
//! ```

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::summary::{Counter, Item, Summary};

pub const MAGIC: [u8; 4] = *b"SSS1";
const HEADER_LEN: usize = 12;
const RECORD_LEN: usize = 20;

pub fn encoded_len(nz: usize) -> usize {
    HEADER_LEN + nz * RECORD_LEN
}

pub fn encode(summary: &Summary) -> Vec<u8> {
    let counters = summary.counters();
    let mut out = Vec::with_capacity(encoded_len(counters.len()));
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&(summary.capacity() as u32).to_le_bytes());
    out.extend_from_slice(&(counters.len() as u32).to_le_bytes());
    for c in &counters {
        out.extend_from_slice(&c.item.0.to_le_bytes());
        out.extend_from_slice(&c.est_freq.to_le_bytes());
        out.extend_from_slice(&c.err.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Summary> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Decode(format!(
            "{} bytes is shorter than the header",
            bytes.len()
        )));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::Decode("bad magic".into()));
    }
    let k = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let nz = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if bytes.len() != encoded_len(nz) {
        return Err(Error::Decode(format!(
            "expected {} bytes for {nz} records, found {}",
            encoded_len(nz),
            bytes.len()
        )));
    }
    let mut counters = Vec::with_capacity(nz);
    for rec in bytes[HEADER_LEN..].chunks_exact(RECORD_LEN) {
        counters.push(Counter {
            item: Item(u32::from_le_bytes(rec[0..4].try_into().unwrap())),
            est_freq: u64::from_le_bytes(rec[4..12].try_into().unwrap()),
            err: u64::from_le_bytes(rec[12..20].try_into().unwrap()),
        });
    }
    if counters.windows(2).any(|w| w[0].key() >= w[1].key()) {
        return Err(Error::Decode(
            "records are not in ascending (est_freq, item) order".into(),
        ));
    }
    Summary::from_counters(k, counters)
}

pub fn write_to<W: Write>(summary: &Summary, mut writer: W) -> Result<()> {
    writer.write_all(&encode(summary))?;
    Ok(())
}

pub fn read_from<R: Read>(mut reader: R) -> Result<Summary> {
    let mut buf = Vec::new();
    reader.read_to_end(&mut buf)?;
    decode(&buf)
}
