//! Differential corpus runner: interpreter as oracle, reducer as subject.
//!
//! A corpus directory holds `.mlc` sources, each with an `.expect` sidecar:
//!
//! ```text
//! value (pair 1 2)     # oracle and reduced print must both equal this
//! error fuel           # the oracle must fail with this tag
//! non-ground <lambda>  # the reduced normal form is not first-order data
//! ```
//!
//! An optional `fuel N` line before the expectation overrides the oracle's
//! step budget for that entry. Whenever the oracle produces a ground value,
//! the reduced graph must print identically, no matter what the sidecar
//! says.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::interp::{default_env, interp, Fuel, Value, DEFAULT_FUEL};
use crate::ir::{comp, default_env as default_comp_env, Arena};
use crate::rewrite::{reduce, DagContext};
use crate::sexpr::read_sexpr;
use crate::syntax::parse;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    /// Ground value print form.
    Value(String),
    /// Oracle error tag: `parse`, `unbound`, `type`, or `fuel`.
    Error(String),
    /// Summary of a non-ground normal form, e.g. `<lambda>` or `<mu>`.
    NonGround(String),
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub source_path: PathBuf,
    pub expectation: Expectation,
    pub fuel_override: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone)]
pub struct EntryResult {
    pub name: String,
    pub status: EntryStatus,
    pub detail: String,
    /// The reduced normal form contained lambdas, mus, or other
    /// non-first-order structure.
    pub non_ground: bool,
}

#[derive(Debug, Default)]
pub struct CorpusReport {
    pub results: Vec<EntryResult>,
}

impl CorpusReport {
    pub fn total(&self) -> usize {
        self.results.len()
    }

    pub fn passed(&self) -> usize {
        self.results
            .iter()
            .filter(|r| r.status == EntryStatus::Pass)
            .count()
    }

    pub fn failed(&self) -> usize {
        self.total() - self.passed()
    }

    pub fn non_ground(&self) -> usize {
        self.results.iter().filter(|r| r.non_ground).count()
    }
}

impl fmt::Display for CorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for result in &self.results {
            let status = match result.status {
                EntryStatus::Pass => "PASS",
                EntryStatus::Fail => "FAIL",
            };
            let marker = if result.non_ground { " [non-ground]" } else { "" };
            writeln!(f, "{} {}: {}{}", status, result.name, result.detail, marker)?;
        }
        writeln!(
            f,
            "total {} / pass {} / fail {} / non-ground {}",
            self.total(),
            self.passed(),
            self.failed(),
            self.non_ground()
        )
    }
}

fn parse_expect_file(text: &str, path: &Path) -> io::Result<(Expectation, Option<u64>)> {
    let mut fuel_override = None;
    let mut expectation = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("fuel ") {
            let steps = rest.trim().parse::<u64>().map_err(|_| {
                io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}: bad fuel override `{}`", path.display(), rest),
                )
            })?;
            fuel_override = Some(steps);
            continue;
        }
        let parsed = if let Some(rest) = line.strip_prefix("value ") {
            Expectation::Value(rest.trim().to_string())
        } else if let Some(rest) = line.strip_prefix("error ") {
            Expectation::Error(rest.trim().to_string())
        } else if let Some(rest) = line.strip_prefix("non-ground ") {
            Expectation::NonGround(rest.trim().to_string())
        } else {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("{}: unrecognized expectation line `{}`", path.display(), line),
            ));
        };
        expectation = Some(parsed);
    }
    match expectation {
        Some(expectation) => Ok((expectation, fuel_override)),
        None => Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("{}: no expectation line", path.display()),
        )),
    }
}

/// Loads every `.mlc`/`.expect` pair from a directory, sorted by name.
pub fn load_corpus(dir: &Path) -> io::Result<Vec<CorpusEntry>> {
    let mut entries = Vec::new();
    for dir_entry in fs::read_dir(dir)? {
        let path = dir_entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("mlc") {
            continue;
        }
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        let expect_path = path.with_extension("expect");
        let expect_text = fs::read_to_string(&expect_path).map_err(|e| {
            io::Error::new(
                e.kind(),
                format!("{}: missing expectation sidecar", expect_path.display()),
            )
        })?;
        let (expectation, fuel_override) = parse_expect_file(&expect_text, &expect_path)?;
        entries.push(CorpusEntry {
            name,
            source_path: path,
            expectation,
            fuel_override,
        });
    }
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(entries)
}

enum OracleOutcome {
    Ground(String),
    NonGround(Value),
    Error(&'static str, String),
}

fn run_oracle(source: &str, fuel_steps: u64) -> OracleOutcome {
    let sexpr = match read_sexpr(source) {
        Ok(sexpr) => sexpr,
        Err(e) => return OracleOutcome::Error("parse", e.to_string()),
    };
    let syntax = match parse(&sexpr) {
        Ok(syntax) => syntax,
        Err(e) => return OracleOutcome::Error("parse", e.to_string()),
    };
    let mut fuel = Fuel::new(fuel_steps);
    match interp(&default_env(), &syntax, &mut fuel) {
        Ok(value) if value.is_ground() => OracleOutcome::Ground(value.to_string()),
        Ok(value) => OracleOutcome::NonGround(value),
        Err(e) => OracleOutcome::Error(e.tag(), e.to_string()),
    }
}

enum SubjectOutcome {
    Reduced { printed: String, ground: bool },
    Error(String),
}

fn run_subject(source: &str) -> SubjectOutcome {
    let syntax = match read_sexpr(source).map_err(|e| e.to_string()).and_then(|s| {
        parse(&s).map_err(|e| e.to_string())
    }) {
        Ok(syntax) => syntax,
        Err(e) => return SubjectOutcome::Error(e),
    };
    let mut arena = Arena::new();
    let env = default_comp_env(&mut arena);
    let root = match comp(&mut arena, &env, &syntax) {
        Ok(root) => root,
        Err(e) => return SubjectOutcome::Error(e.to_string()),
    };
    let mut ctx = DagContext::new();
    match reduce(&mut arena, &mut ctx, root) {
        Ok(reduced) => SubjectOutcome::Reduced {
            printed: arena.printed(reduced),
            ground: arena.is_ground(reduced),
        },
        Err(e) => SubjectOutcome::Error(e.to_string()),
    }
}

/// Runs one corpus entry: interpret as the oracle, reduce as the subject,
/// then judge against the expectation. Oracle-ground entries additionally
/// require the reduced print to match the oracle's print exactly.
pub fn run_entry(entry: &CorpusEntry, default_fuel: u64) -> io::Result<EntryResult> {
    let source = fs::read_to_string(&entry.source_path)?;
    let fuel_steps = entry.fuel_override.unwrap_or(default_fuel);
    let oracle = run_oracle(&source, fuel_steps);
    let subject = run_subject(&source);

    let non_ground = matches!(
        subject,
        SubjectOutcome::Reduced { ground: false, .. }
    );
    let fail = |detail: String| EntryResult {
        name: entry.name.clone(),
        status: EntryStatus::Fail,
        detail,
        non_ground,
    };

    // the oracle-agreement rule comes first: a ground oracle value pins the
    // reduced print no matter what the sidecar says
    if let OracleOutcome::Ground(ref oracle_print) = oracle {
        match &subject {
            SubjectOutcome::Reduced { printed, .. } if printed == oracle_print => {}
            SubjectOutcome::Reduced { printed, .. } => {
                return Ok(fail(format!(
                    "oracle printed `{}` but reduction printed `{}`",
                    oracle_print, printed
                )))
            }
            SubjectOutcome::Error(e) => {
                return Ok(fail(format!(
                    "oracle printed `{}` but reduction failed: {}",
                    oracle_print, e
                )))
            }
        }
    }

    let result = match &entry.expectation {
        Expectation::Value(expected) => match &oracle {
            OracleOutcome::Ground(printed) if printed == expected => EntryResult {
                name: entry.name.clone(),
                status: EntryStatus::Pass,
                detail: format!("value {}", printed),
                non_ground,
            },
            OracleOutcome::Ground(printed) => fail(format!(
                "expected value `{}`, oracle printed `{}`",
                expected, printed
            )),
            OracleOutcome::NonGround(value) => fail(format!(
                "expected value `{}`, oracle produced non-ground {}",
                expected, value
            )),
            OracleOutcome::Error(tag, detail) => fail(format!(
                "expected value `{}`, oracle failed with {} ({})",
                expected, tag, detail
            )),
        },
        Expectation::Error(expected_tag) => match &oracle {
            OracleOutcome::Error(tag, detail) if tag == expected_tag => EntryResult {
                name: entry.name.clone(),
                status: EntryStatus::Pass,
                detail: format!("oracle error {} ({})", tag, detail),
                non_ground,
            },
            OracleOutcome::Error(tag, detail) => fail(format!(
                "expected error `{}`, oracle failed with {} ({})",
                expected_tag, tag, detail
            )),
            OracleOutcome::Ground(printed) => fail(format!(
                "expected error `{}`, oracle printed `{}`",
                expected_tag, printed
            )),
            OracleOutcome::NonGround(value) => fail(format!(
                "expected error `{}`, oracle produced {}",
                expected_tag, value
            )),
        },
        Expectation::NonGround(expected_summary) => match &subject {
            SubjectOutcome::Reduced { printed, ground: false, .. }
                if printed == expected_summary =>
            {
                EntryResult {
                    name: entry.name.clone(),
                    status: EntryStatus::Pass,
                    detail: format!("non-ground {}", printed),
                    non_ground,
                }
            }
            SubjectOutcome::Reduced { printed, .. } => fail(format!(
                "expected non-ground `{}`, reduction printed `{}`",
                expected_summary, printed
            )),
            SubjectOutcome::Error(e) => fail(format!(
                "expected non-ground `{}`, reduction failed: {}",
                expected_summary, e
            )),
        },
    };
    Ok(result)
}

/// Runs every entry in a corpus directory.
pub fn run_corpus_dir(dir: &Path, fuel: Option<u64>) -> io::Result<CorpusReport> {
    let entries = load_corpus(dir)?;
    let default_fuel = fuel.unwrap_or(DEFAULT_FUEL);
    let mut report = CorpusReport::default();
    for entry in &entries {
        report.results.push(run_entry(entry, default_fuel)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_entry(dir: &Path, name: &str, source: &str, expect: &str) {
        fs::write(dir.join(format!("{}.mlc", name)), source).unwrap();
        fs::write(dir.join(format!("{}.expect", name)), expect).unwrap();
    }

    fn temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "mulambda-corpus-{}-{}",
            tag,
            std::process::id()
        ));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn value_entry_passes() {
        let dir = temp_dir("value");
        write_entry(&dir, "add", "(+ 2 3)", "value 5\n");
        let report = run_corpus_dir(&dir, None).unwrap();
        assert_eq!(report.passed(), 1);
        assert_eq!(report.failed(), 0);
    }

    #[test]
    fn expected_error_checks_oracle_only() {
        let dir = temp_dir("error");
        write_entry(
            &dir,
            "omega",
            "((lambda (x) (x x)) (lambda (x) (x x)))",
            "fuel 10000\nerror fuel\n",
        );
        let report = run_corpus_dir(&dir, None).unwrap();
        assert_eq!(report.passed(), 1, "{}", report);
    }

    #[test]
    fn deliberate_mismatch_fails() {
        let dir = temp_dir("mismatch");
        write_entry(&dir, "wrong", "(first (pair 1 2))", "value 2\n");
        let report = run_corpus_dir(&dir, None).unwrap();
        assert_eq!(report.failed(), 1);
    }

    #[test]
    fn non_ground_entry_matches_summary() {
        let dir = temp_dir("nonground");
        write_entry(&dir, "lam", "(lambda (x) x)", "non-ground <lambda>\n");
        let report = run_corpus_dir(&dir, None).unwrap();
        assert_eq!(report.passed(), 1, "{}", report);
        assert_eq!(report.non_ground(), 1);
    }

    #[test]
    fn missing_sidecar_is_io_error() {
        let dir = temp_dir("missing");
        fs::write(dir.join("orphan.mlc"), "1").unwrap();
        assert!(run_corpus_dir(&dir, None).is_err());
    }
}
