//! Stream files.
//!
//! `.u32` files are a raw little-endian `u32` sequence with no header; `.txt`
//! files hold one decimal integer per line, blank lines ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::summary::Item;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamFormat {
    Binary,
    Text,
}

impl StreamFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("u32") => Ok(StreamFormat::Binary),
            Some("txt") => Ok(StreamFormat::Text),
            _ => Err(Error::Parse {
                line: 0,
                reason: format!("{}: expected a .u32 or .txt stream file", path.display()),
            }),
        }
    }
}

pub fn read_stream(path: &Path) -> Result<Vec<Item>> {
    let format = StreamFormat::from_path(path)?;
    let file = File::open(path)?;
    match format {
        StreamFormat::Binary => read_binary(file),
        StreamFormat::Text => read_text(BufReader::new(file)),
    }
}

pub fn read_binary<R: Read>(mut reader: R) -> Result<Vec<Item>> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() % 4 != 0 {
        return Err(Error::Parse {
            line: 0,
            reason: format!("binary stream length {} is not a multiple of 4", bytes.len()),
        });
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|b| Item(u32::from_le_bytes(b.try_into().unwrap())))
        .collect())
}

pub fn read_text<R: BufRead>(reader: R) -> Result<Vec<Item>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value = trimmed.parse::<u32>().map_err(|e| Error::Parse {
            line: i + 1,
            reason: format!("{trimmed:?}: {e}"),
        })?;
        out.push(Item(value));
    }
    Ok(out)
}

pub fn write_stream(path: &Path, stream: &[Item]) -> Result<()> {
    let format = StreamFormat::from_path(path)?;
    let mut writer = BufWriter::new(File::create(path)?);
    match format {
        StreamFormat::Binary => write_binary(&mut writer, stream)?,
        StreamFormat::Text => {
            for item in stream {
                writeln!(writer, "{item}")?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn write_binary<W: Write>(mut writer: W, stream: &[Item]) -> Result<()> {
    let mut buf = Vec::with_capacity(stream.len() * 4);
    for item in stream {
        buf.extend_from_slice(&item.0.to_le_bytes());
    }
    writer.write_all(&buf)?;
    Ok(())
}
