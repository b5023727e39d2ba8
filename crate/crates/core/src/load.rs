//! Database facts from delimited files.
//!
//! One predicate per file: the file stem names the predicate and every
//! record is one fact whose columns are the arguments. A cell `<iri>` or an
//! absolute IRI is taken as is, a plain name becomes a constant in the
//! example namespace, anything else is a string literal.

use std::io::Read;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::Constant;
use crate::parser::is_local_name;
use crate::rules::{Atom, RuleTerm};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{0}: cannot derive a predicate name from the file name")]
    NoPredicate(PathBuf),
    #[error("{0}: expected a .csv or .tsv file")]
    UnknownFormat(PathBuf),
    #[error("{path}: record {record} is empty")]
    EmptyRecord { path: PathBuf, record: usize },
}

/// Interprets one cell.
pub fn cell_constant(cell: &str) -> Constant {
    let cell = cell.trim();
    if let Some(iri) = cell.strip_prefix('<').and_then(|c| c.strip_suffix('>')) {
        Constant::iri(iri)
    } else if cell.contains("://") || cell.starts_with("urn:") {
        Constant::iri(cell)
    } else if is_local_name(cell) && !cell.starts_with(|c: char| c.is_ascii_digit() || c == '-') {
        Constant::example(cell)
    } else {
        Constant::literal(cell)
    }
}

/// Reads headerless records of `predicate` facts.
pub fn read_delimited(reader: impl Read, predicate: &str, delimiter: u8, path: &Path) -> Result<Vec<Atom>, LoadError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|source| LoadError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        if rec.is_empty() || rec.iter().all(|c| c.trim().is_empty()) {
            return Err(LoadError::EmptyRecord {
                path: path.to_path_buf(),
                record: i + 1,
            });
        }
        out.push(Atom::new(
            predicate,
            rec.iter().map(|c| RuleTerm::Constant(cell_constant(c))).collect(),
        ));
    }
    Ok(out)
}

/// Loads a `.csv` or `.tsv` file; the stem is the predicate.
pub fn load_delimited(path: &Path) -> Result<Vec<Atom>, LoadError> {
    let delimiter = match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => b',',
        Some(e) if e.eq_ignore_ascii_case("tsv") => b'\t',
        _ => return Err(LoadError::UnknownFormat(path.to_path_buf())),
    };
    let predicate = path
        .file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| LoadError::NoPredicate(path.to_path_buf()))?;
    let file = std::fs::File::open(path).map_err(|e| LoadError::Csv {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    read_delimited(std::io::BufReader::new(file), predicate, delimiter, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells() {
        assert_eq!(cell_constant("tom"), Constant::example("tom"));
        assert_eq!(cell_constant("<urn:x>"), Constant::iri("urn:x"));
        assert_eq!(cell_constant("http://a.org/b"), Constant::iri("http://a.org/b"));
        assert_eq!(cell_constant("Tom Smith"), Constant::literal("Tom Smith"));
        assert_eq!(cell_constant("42"), Constant::literal("42"));
    }

    #[test]
    fn records() {
        let src = "lucy,tom\ntom,lucy\n";
        let atoms = read_delimited(src.as_bytes(), "knows", b',', Path::new("knows.csv")).unwrap();
        assert_eq!(atoms.len(), 2);
        assert_eq!(atoms[0].predicate.as_ref(), "knows");
        assert_eq!(atoms[0].arity(), 2);
        let ragged = "a,b\nc\n";
        assert!(read_delimited(ragged.as_bytes(), "p", b',', Path::new("p.csv")).is_err());
    }

    #[test]
    fn extension_decides_format() {
        assert!(matches!(
            load_delimited(Path::new("facts.txt")),
            Err(LoadError::UnknownFormat(_))
        ));
    }
}
