use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;
use rulelens_core::fixtures::{
    list_fixtures_in_dir, load_fixture, load_fixture_from_dir, Fixture, FixtureError, BUILTIN_FIXTURES,
};
use rulelens_core::kb::parse_triples;
use rulelens_core::rules::{parse_rule_file, RuleSet};
use rulelens_core::{infer_with, Graph, InferenceConfig, InferenceError, InferenceModel, ParseError};
use thiserror::Error;
use tokio::sync::RwLock;
use tracing::info;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{what}: {source}")]
    Parse { what: &'static str, source: ParseError },
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("nothing to revert")]
    NothingToRevert,
}

#[derive(Clone, Debug)]
struct Snapshot {
    base: Graph,
    rules: RuleSet,
    model: Arc<InferenceModel>,
}

/// One live model: its inputs, the inference over them, and one step of
/// undo.
#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub title: String,
    pub revision: u64,
    current: Snapshot,
    previous: Option<Snapshot>,
    config: InferenceConfig,
}

impl Session {
    pub fn new(
        id: impl Into<String>,
        title: impl Into<String>,
        base: Graph,
        rules: RuleSet,
        config: InferenceConfig,
    ) -> Result<Self, SessionError> {
        let model = Arc::new(infer_with(&base, &rules.rules, config)?);
        Ok(Self {
            id: id.into(),
            title: title.into(),
            revision: 0,
            current: Snapshot { base, rules, model },
            previous: None,
            config,
        })
    }

    pub fn from_fixture(fixture: Fixture, config: InferenceConfig) -> Result<Self, SessionError> {
        let rules = fixture.rule_set();
        Self::new(fixture.manifest.id, fixture.manifest.title, fixture.graph, rules, config)
    }

    /// Parses uploaded facts and rules texts.
    pub fn from_texts(
        id: impl Into<String>,
        title: impl Into<String>,
        facts: &str,
        rules: &str,
        config: InferenceConfig,
    ) -> Result<Self, SessionError> {
        let base = parse_triples(facts).map_err(|source| SessionError::Parse { what: "facts", source })?;
        let rules = parse_rule_file(rules).map_err(|source| SessionError::Parse { what: "rules", source })?;
        Self::new(id, title, base, rules, config)
    }

    pub fn model(&self) -> &Arc<InferenceModel> {
        &self.current.model
    }

    pub fn base(&self) -> &Graph {
        &self.current.base
    }

    pub fn rules(&self) -> &RuleSet {
        &self.current.rules
    }

    /// Replaces the rules and re-infers. On failure nothing changes.
    pub fn update_rules(&mut self, rules_text: &str) -> Result<(), SessionError> {
        let rules = parse_rule_file(rules_text).map_err(|source| SessionError::Parse { what: "rules", source })?;
        let model = Arc::new(infer_with(&self.current.base, &rules.rules, self.config)?);
        let next = Snapshot { base: self.current.base.clone(), rules, model };
        self.previous = Some(std::mem::replace(&mut self.current, next));
        self.revision += 1;
        info!(model = %self.id, revision = self.revision, inferred = self.current.model.inferred().len(), "rules updated");
        Ok(())
    }

    /// Restores the state before the last edit. The revision still moves
    /// forward so clients can tell the state changed.
    pub fn revert(&mut self) -> Result<(), SessionError> {
        let previous = self.previous.take().ok_or(SessionError::NothingToRevert)?;
        self.current = previous;
        self.revision += 1;
        info!(model = %self.id, revision = self.revision, "reverted");
        Ok(())
    }
}

/// Every session, keyed by model id in registration order.
#[derive(Clone, Default)]
pub struct AppState {
    pub(crate) sessions: Arc<RwLock<IndexMap<String, Arc<RwLock<Session>>>>>,
    pub(crate) config: InferenceConfig,
}

impl AppState {
    pub fn empty(config: InferenceConfig) -> Self {
        Self { sessions: Arc::default(), config }
    }

    /// A state holding the three bundled fixtures.
    pub fn with_builtin_fixtures(config: InferenceConfig) -> Result<Self, FixtureError> {
        let fixtures = BUILTIN_FIXTURES.iter().map(|id| load_fixture(id)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_fixtures(fixtures, config))
    }

    /// A state holding every fixture found in `dir`.
    pub fn with_fixtures_dir(dir: &Path, config: InferenceConfig) -> Result<Self, FixtureError> {
        let fixtures = list_fixtures_in_dir(dir)?
            .iter()
            .map(|id| load_fixture_from_dir(dir, id))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_fixtures(fixtures, config))
    }

    fn from_fixtures(fixtures: Vec<Fixture>, config: InferenceConfig) -> Self {
        let mut sessions = IndexMap::new();
        for fixture in fixtures {
            let id = fixture.manifest.id.clone();
            match Session::from_fixture(fixture, config) {
                Ok(session) => {
                    sessions.insert(id, Arc::new(RwLock::new(session)));
                }
                Err(err) => tracing::warn!(fixture = %id, %err, "fixture skipped"),
            }
        }
        Self { sessions: Arc::new(RwLock::new(sessions)), config }
    }

    pub async fn session(&self, id: &str) -> Option<Arc<RwLock<Session>>> {
        self.sessions.read().await.get(id).cloned()
    }

    /// Registers a session; returns false if the id is taken.
    pub async fn insert(&self, session: Session) -> bool {
        let mut sessions = self.sessions.write().await;
        if sessions.contains_key(&session.id) {
            return false;
        }
        sessions.insert(session.id.clone(), Arc::new(RwLock::new(session)));
        true
    }

    pub fn config(&self) -> InferenceConfig {
        self.config
    }
}
