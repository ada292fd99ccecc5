//! Newline-delimited JSON files.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use graph_instruct_core::instruct::InstructionRecord;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::Error;

/// Writes one JSON object per line, each followed by `\n`, creating parent
/// directories. Returns the number of lines written.
pub fn write_jsonl<T: Serialize>(items: &[T], path: &Path) -> Result<usize, Error> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(Error::io(parent))?;
    }
    let file = File::create(path).map_err(Error::io(path))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e.into(),
        })?;
        w.write_all(b"\n").map_err(Error::io(path))?;
    }
    w.flush().map_err(Error::io(path))?;
    Ok(items.len())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, Error> {
    let reader = BufReader::new(File::open(path).map_err(Error::io(path))?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(Error::io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(item);
    }
    Ok(out)
}

/// Instruction records as `{task, dataset, kind, instruction, input, output}`
/// lines, in the given order.
pub fn emit_jsonl(records: &[InstructionRecord], path: &Path) -> Result<usize, Error> {
    write_jsonl(records, path)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(Error::io(parent))?;
    }
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    fs::write(path, text).map_err(Error::io(path))
}
