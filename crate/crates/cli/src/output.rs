//! Versioned CSV/JSON writers and readers. Files are written to a temporary
//! sibling and renamed, so a crashed run never leaves a half-written table.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub const SCHEMA_PREFIX: &str = "hullsweep";

pub fn schema(name: &str) -> String {
    format!("{SCHEMA_PREFIX}/{name}/v1")
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming {}", tmp.display()))?;
    Ok(())
}

/// CSV with a `# schema:` comment line. The header row is written even without rows.
pub fn write_csv<T: Serialize>(path: &Path, name: &str, header: &[&str], rows: &[T]) -> Result<()> {
    let mut buf = format!("# schema: {}\n", schema(name)).into_bytes();
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut buf);
        w.write_record(header)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    write_atomic(path, &buf)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .with_context(|| format!("reading {}", path.display()))
}

/// JSON object with a `schema` field added.
pub fn write_json<T: Serialize>(path: &Path, name: &str, value: &T) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    if let Some(obj) = v.as_object_mut() {
        obj.insert("schema".into(), schema(name).into());
    }
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        a: String,
        b: f64,
    }

    #[test]
    fn csv_round_trip_and_empty_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let rows = vec![Row { a: "x".into(), b: 0.1 }, Row { a: "y,z".into(), b: f64::NAN }];
        write_csv(&p, "t", &["a", "b"], &rows).unwrap();
        let back: Vec<Row> = read_csv(&p).unwrap();
        assert_eq!(back[0], rows[0]);
        assert!(back[1].b.is_nan());
        write_csv::<Row>(&p, "t", &["a", "b"], &[]).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "# schema: hullsweep/t/v1\na,b\n");
        assert!(read_csv::<Row>(&p).unwrap().is_empty());
    }
}
