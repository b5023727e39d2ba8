//! Reading documents and turning them into rules and database facts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use n3ex::load::load_delimited;
use n3ex::pnf::{to_pnf, PieceSet};
use n3ex::translate::{inverse_translate, translate_set};
use n3ex::{parse_n3, parse_rules, Atom, Formula, RuleSet};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    N3,
    Rules,
    Csv,
    Tsv,
}

impl Format {
    pub fn of(path: &Path) -> Result<Format> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("")
            .to_ascii_lowercase();
        Ok(match ext.as_str() {
            "n3" | "ttl" => Format::N3,
            "erl" | "rules" => Format::Rules,
            "csv" => Format::Csv,
            "tsv" => Format::Tsv,
            _ => bail!(
                "{}: unknown file type, expected .n3, .erl, .csv or .tsv",
                path.display()
            ),
        })
    }
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write_output(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A document, either on disk or generated in memory.
pub enum Source {
    Path(PathBuf),
    Text { name: String, format: Format, text: String },
}

impl Source {
    pub fn name(&self) -> String {
        match self {
            Source::Path(p) => p.display().to_string(),
            Source::Text { name, .. } => name.clone(),
        }
    }
}

enum Parsed {
    N3(Formula),
    Rules(RuleSet),
    Atoms(Vec<Atom>),
}

fn parse_source(src: &Source) -> Result<Parsed> {
    let (name, format, text) = match src {
        Source::Path(p) => {
            let format = Format::of(p)?;
            if matches!(format, Format::Csv | Format::Tsv) {
                return Ok(Parsed::Atoms(load_delimited(p)?));
            }
            (p.display().to_string(), format, read(p)?)
        }
        Source::Text { name, format, text } => (name.clone(), *format, text.clone()),
    };
    Ok(match format {
        Format::N3 => Parsed::N3(parse_n3(&text).with_context(|| name.clone())?),
        Format::Rules => Parsed::Rules(parse_rules(&text).with_context(|| name.clone())?),
        Format::Csv | Format::Tsv => bail!("{name}: delimited data must come from a file"),
    })
}

/// Parses an N3 document, or reads a rule file through the canonical
/// translation.
pub fn load_formula(path: &Path) -> Result<Formula> {
    match parse_source(&Source::Path(path.to_path_buf()))? {
        Parsed::N3(f) => Ok(f),
        Parsed::Rules(rs) => Ok(inverse_translate(&rs).with_context(|| path.display().to_string())?),
        Parsed::Atoms(_) => bail!("{}: expected an N3 or rule document", path.display()),
    }
}

/// An N3 document goes through normalization and translation; a rule
/// file is taken as is.
pub fn load_rules(path: &Path) -> Result<RuleSet> {
    match parse_source(&Source::Path(path.to_path_buf()))? {
        Parsed::N3(f) => Ok(translate_set(&to_pnf(&f)).with_context(|| path.display().to_string())?),
        Parsed::Rules(rs) => Ok(rs),
        Parsed::Atoms(_) => bail!("{}: expected an N3 or rule document", path.display()),
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct PhaseSeconds {
    pub parse: f64,
    pub normalize: f64,
    pub translate: f64,
    pub reason: f64,
}

enum Normalized {
    Pieces(PieceSet),
    Rules(RuleSet),
    Atoms(Vec<Atom>),
}

pub struct Prepared {
    pub rules: RuleSet,
    /// Rules obtained from the rule document, facts included.
    pub rule_count: usize,
    pub db: Vec<Atom>,
    pub seconds: PhaseSeconds,
}

/// Parses, normalizes and translates a rule document and fact documents.
/// Ground facts of the rule document move into the database unless
/// `facts_as_rules` is set.
pub fn prepare(rules: &Source, facts: &[Source], facts_as_rules: bool) -> Result<Prepared> {
    let mut seconds = PhaseSeconds::default();
    let t = Instant::now();
    let parsed_rules = parse_source(rules)?;
    let parsed_facts = facts.iter().map(parse_source).collect::<Result<Vec<_>>>()?;
    seconds.parse = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let normalize = |p: Parsed| match p {
        Parsed::N3(f) => Normalized::Pieces(to_pnf(&f)),
        Parsed::Rules(rs) => Normalized::Rules(rs),
        Parsed::Atoms(a) => Normalized::Atoms(a),
    };
    let rules_norm = normalize(parsed_rules);
    let facts_norm: Vec<Normalized> = parsed_facts.into_iter().map(normalize).collect();
    seconds.normalize = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let to_rules = |n: Normalized, name: &str| -> Result<(RuleSet, Vec<Atom>)> {
        Ok(match n {
            Normalized::Pieces(p) => (translate_set(&p).with_context(|| name.to_string())?, Vec::new()),
            Normalized::Rules(rs) => (rs, Vec::new()),
            Normalized::Atoms(a) => (RuleSet::empty(), a),
        })
    };
    let (rule_set, mut db) = to_rules(rules_norm, &rules.name())?;
    let rule_count = rule_set.len();
    let rule_set = if facts_as_rules {
        rule_set
    } else {
        let (rs, split) = rule_set.split_facts();
        db.extend(split);
        rs
    };
    for (norm, src) in facts_norm.into_iter().zip(facts) {
        let (rs, atoms) = to_rules(norm, &src.name())?;
        let (rest, split) = rs.split_facts();
        if !rest.is_empty() {
            bail!("{}: fact files may only contain ground facts", src.name());
        }
        db.extend(split);
        db.extend(atoms);
    }
    seconds.translate = t.elapsed().as_secs_f64();
    Ok(Prepared {
        rules: rule_set,
        rule_count,
        db,
        seconds,
    })
}
