//! The bundled domain models and loading of fixture directories.
//!
//! A fixture directory holds `model.facts`, `model.rules` and a
//! `manifest.json` listing the statements inference is expected to derive:
//!
//! ```json
//! { "id": "loan", "title": "Loan eligibility", "facts": "model.facts",
//!   "rules": "model.rules", "expected_inferred": [{"s": "ex:a", "p": "ex:p", "o": "0.4"}] }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ParseError;
use crate::kb::{parse_statement, parse_triples, Graph, Statement};
use crate::rules::{parse_rule_file, Rule, RuleSet};

/// Ids of the fixtures compiled into the crate.
pub const BUILTIN_FIXTURES: [&str; 3] = ["loan", "transitive", "diet"];

struct Bundled {
    id: &'static str,
    manifest: &'static str,
    facts: &'static str,
    rules: &'static str,
}

const BUNDLED: [Bundled; 3] = [
    Bundled {
        id: "loan",
        manifest: include_str!("../fixtures/loan/manifest.json"),
        facts: include_str!("../fixtures/loan/model.facts"),
        rules: include_str!("../fixtures/loan/model.rules"),
    },
    Bundled {
        id: "transitive",
        manifest: include_str!("../fixtures/transitive/manifest.json"),
        facts: include_str!("../fixtures/transitive/model.facts"),
        rules: include_str!("../fixtures/transitive/model.rules"),
    },
    Bundled {
        id: "diet",
        manifest: include_str!("../fixtures/diet/manifest.json"),
        facts: include_str!("../fixtures/diet/model.facts"),
        rules: include_str!("../fixtures/diet/model.rules"),
    },
];

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture '{0}'")]
    Unknown(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}: {source}")]
    Parse { file: String, source: ParseError },
    #[error("{file}: invalid manifest: {source}")]
    Manifest { file: String, source: serde_json::Error },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixtureManifest {
    pub id: String,
    pub title: String,
    pub facts_path: String,
    pub rules_path: String,
    pub notes: Option<String>,
    pub expected_inferred: Vec<Statement>,
}

#[derive(Deserialize)]
struct RawManifest {
    id: String,
    title: String,
    facts: String,
    rules: String,
    #[serde(default)]
    notes: Option<String>,
    #[serde(default)]
    expected_inferred: Vec<RawStatement>,
}

#[derive(Deserialize)]
struct RawStatement {
    s: String,
    p: String,
    o: String,
}

/// A loaded fixture: its base graph, rules and manifest, plus the source
/// texts they came from.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub manifest: FixtureManifest,
    pub graph: Graph,
    pub rules: Vec<Rule>,
    pub facts_text: String,
    pub rules_text: String,
}

impl Fixture {
    pub fn id(&self) -> &str {
        &self.manifest.id
    }

    pub fn rule_set(&self) -> RuleSet {
        parse_rule_file(&self.rules_text).expect("fixture rules parsed once already")
    }
}

/// Loads one of the bundled fixtures.
pub fn load_fixture(id: &str) -> Result<Fixture, FixtureError> {
    let bundled = BUNDLED.iter().find(|b| b.id == id).ok_or_else(|| FixtureError::Unknown(id.to_string()))?;
    assemble(id, bundled.manifest, bundled.facts.to_string(), bundled.rules.to_string())
}

/// Loads `<dir>/<id>/` from disk.
pub fn load_fixture_from_dir(dir: &Path, id: &str) -> Result<Fixture, FixtureError> {
    let root = dir.join(id);
    let manifest_path = root.join("manifest.json");
    if !manifest_path.is_file() {
        return Err(FixtureError::Unknown(id.to_string()));
    }
    let manifest_text = read(&manifest_path)?;
    let raw: RawManifest = serde_json::from_str(&manifest_text)
        .map_err(|source| FixtureError::Manifest { file: manifest_path.display().to_string(), source })?;
    let facts = read(&root.join(&raw.facts))?;
    let rules = read(&root.join(&raw.rules))?;
    assemble(id, &manifest_text, facts, rules)
}

/// Fixture ids found under `dir` (subdirectories with a manifest), sorted.
pub fn list_fixtures_in_dir(dir: &Path) -> Result<Vec<String>, FixtureError> {
    let entries = fs::read_dir(dir).map_err(|source| FixtureError::Io { path: dir.to_path_buf(), source })?;
    let mut ids: Vec<String> = entries
        .filter_map(Result::ok)
        .filter(|e| e.path().join("manifest.json").is_file())
        .filter_map(|e| e.file_name().into_string().ok())
        .collect();
    ids.sort();
    Ok(ids)
}

/// Manifests of all bundled fixtures, in their canonical order.
pub fn list_fixtures() -> Vec<FixtureManifest> {
    BUILTIN_FIXTURES.iter().map(|id| load_fixture(id).expect("bundled fixtures are valid").manifest).collect()
}

fn read(path: &Path) -> Result<String, FixtureError> {
    fs::read_to_string(path).map_err(|source| FixtureError::Io { path: path.to_path_buf(), source })
}

fn assemble(id: &str, manifest_text: &str, facts_text: String, rules_text: String) -> Result<Fixture, FixtureError> {
    let raw: RawManifest = serde_json::from_str(manifest_text)
        .map_err(|source| FixtureError::Manifest { file: format!("{id}/manifest.json"), source })?;
    let graph = parse_triples(&facts_text)
        .map_err(|source| FixtureError::Parse { file: format!("{id}/{}", raw.facts), source })?;
    let rules = parse_rule_file(&rules_text)
        .map_err(|source| FixtureError::Parse { file: format!("{id}/{}", raw.rules), source })?
        .rules;
    let expected_inferred = raw
        .expected_inferred
        .iter()
        .map(|t| parse_statement(&format!("{} {} {}", t.s, t.p, t.o), graph.prefixes()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|source| FixtureError::Parse { file: format!("{id}/manifest.json"), source })?;
    Ok(Fixture {
        manifest: FixtureManifest {
            id: raw.id,
            title: raw.title,
            facts_path: raw.facts,
            rules_path: raw.rules,
            notes: raw.notes,
            expected_inferred,
        },
        graph,
        rules,
        facts_text,
        rules_text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loan_fixture_shape() {
        let f = load_fixture("loan").unwrap();
        assert_eq!(f.graph.len(), 12);
        let names: Vec<&str> = f.rules.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["DTIRule", "EligibilityRule", "NotEligibleDTIRule", "NotEligibleCreditRule"]);
        assert_eq!(f.manifest.expected_inferred.len(), 6);
    }

    #[test]
    fn transitive_fixture_shape() {
        let f = load_fixture("transitive").unwrap();
        assert_eq!(f.graph.len(), 3);
        assert_eq!(f.rules.len(), 1);
        assert_eq!(f.manifest.expected_inferred.len(), 3);
    }

    #[test]
    fn unknown_fixture() {
        assert!(matches!(load_fixture("bogus"), Err(FixtureError::Unknown(_))));
    }

    #[test]
    fn lists_all_three() {
        let ids: Vec<String> = list_fixtures().into_iter().map(|m| m.id).collect();
        assert_eq!(ids, BUILTIN_FIXTURES);
    }

    #[test]
    fn loads_from_directory() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        assert_eq!(list_fixtures_in_dir(&dir).unwrap(), ["diet", "loan", "transitive"]);
        let f = load_fixture_from_dir(&dir, "diet").unwrap();
        assert_eq!(f.manifest.id, "diet");
        assert!(matches!(load_fixture_from_dir(&dir, "bogus"), Err(FixtureError::Unknown(_))));
    }
}
