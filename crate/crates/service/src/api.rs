use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Multipart, Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use rulelens_core::explain::{explain, ExplainError, ExplainOptions, ExplanationKind};
use rulelens_core::kb::{parse_statement, parse_term};
use rulelens_core::rules::format_rule;
use rulelens_core::{InferenceModel, LabelTable, ModelError, Statement, Term, Which};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::ApiError;
use crate::state::{AppState, Session, SessionError};

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/models", get(list_models).post(upload_model))
        .route("/api/models/{id}/statements", get(get_statements))
        .route("/api/models/{id}/explain", post(explain_statement))
        .route("/api/models/{id}/rules", put(update_rules))
        .route("/api/models/{id}/revert", post(revert))
        .with_state(state)
}

#[derive(Serialize)]
struct ModelSummary {
    id: String,
    title: String,
    revision: u64,
}

async fn list_models(State(state): State<AppState>) -> Json<Vec<ModelSummary>> {
    let sessions: Vec<_> = state.sessions.read().await.values().cloned().collect();
    let mut out = Vec::with_capacity(sessions.len());
    for session in sessions {
        let s = session.read().await;
        out.push(ModelSummary { id: s.id.clone(), title: s.title.clone(), revision: s.revision });
    }
    Json(out)
}

async fn session(state: &AppState, id: &str) -> Result<Arc<tokio::sync::RwLock<Session>>, ApiError> {
    state.session(id).await.ok_or_else(|| ApiError::not_found(format!("unknown model '{id}'")))
}

#[derive(Deserialize)]
struct WhichQuery {
    which: Option<String>,
}

async fn get_statements(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<WhichQuery>, QueryRejection>,
) -> Result<Json<Value>, ApiError> {
    let Query(query) = query.map_err(|e| ApiError::unprocessable("invalid_query", e.body_text()))?;
    let session = session(&state, &id).await?;
    let s = session.read().await;
    let which = query.which.as_deref().unwrap_or("inferred");
    let items = match which {
        "base" => serde_json::to_value(s.model().list_statements(Which::Base)),
        "inferred" => serde_json::to_value(s.model().list_statements(Which::Inferred)),
        "all" => serde_json::to_value(s.model().list_statements(Which::All)),
        "rules" => serde_json::to_value(s.rules().rules.iter().map(format_rule).collect::<Vec<_>>()),
        other => {
            return Err(ApiError::unprocessable(
                "invalid_query",
                format!("which must be base, inferred, all or rules, not '{other}'"),
            ))
        }
    }
    .expect("statements serialize");
    Ok(Json(json!({ "which": which, "revision": s.revision, "items": items })))
}

#[derive(Deserialize)]
struct StatementBody {
    s: String,
    p: String,
    o: String,
}

#[derive(Deserialize, Default)]
struct OptionsBody {
    against: Option<String>,
    alt_model: Option<String>,
    desired: Option<String>,
}

#[derive(Deserialize)]
struct ExplainBody {
    statement: StatementBody,
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    options: OptionsBody,
}

fn json_body<T>(body: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    body.map(|Json(b)| b).map_err(|e| ApiError::unprocessable("invalid_body", e.body_text()))
}

/// Parses a desired value: a term in the facts grammar, or else the raw
/// text as a string.
pub(crate) fn desired_term(text: &str, model: &InferenceModel) -> Term {
    parse_term(text, model.base().prefixes()).unwrap_or_else(|_| Term::string(text))
}

async fn explain_statement(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<ExplainBody>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let body = json_body(body)?;
    let kind: ExplanationKind = body
        .kind
        .parse()
        .map_err(|e: rulelens_core::explain::UnknownKind| ApiError::unprocessable("invalid_type", e.to_string()))?;

    // Work on a snapshot so a slow explanation never blocks an edit.
    let model = Arc::clone(session(&state, &id).await?.read().await.model());
    let alt_model = match &body.options.alt_model {
        Some(alt) => Some(Arc::clone(session(&state, alt).await?.read().await.model())),
        None => None,
    };

    let prefixes = model.base().prefixes();
    let StatementBody { s, p, o } = &body.statement;
    let statement: Statement =
        parse_statement(&format!("{s} {p} {o}"), prefixes).map_err(|e| ApiError::parse("statement", &e))?;
    let against = match &body.options.against {
        Some(text) => match parse_term(text, prefixes).map_err(|e| ApiError::parse("against", &e))? {
            Term::Iri(iri) => Some(iri),
            other => {
                return Err(ApiError::unprocessable(
                    "invalid_option",
                    format!("against must be a subject, not {other}"),
                ))
            }
        },
        None => None,
    };
    let desired = body.options.desired.as_deref().map(|d| desired_term(d, &model));

    let options =
        ExplainOptions { against: against.as_ref(), alt_model: alt_model.as_deref(), desired: desired.as_ref() };
    let labels = LabelTable::for_graph(model.base());
    match explain(&model, &statement, kind, options) {
        Ok(explanation) => Ok(Json(json!({
            "type": kind.name(),
            "text": explanation.render(&labels),
            "structured": explanation,
        }))),
        Err(err) => Err(explain_error(err, &labels)),
    }
}

fn explain_error(err: ExplainError, labels: &LabelTable) -> ApiError {
    let detail = err.to_string();
    match err {
        ExplainError::Model(ModelError::StatementNotFound(_)) | ExplainError::UnknownSubject(_) => {
            ApiError::not_found(detail)
        }
        ExplainError::Model(ModelError::StatementIsAsserted(_)) => {
            ApiError::unprocessable("statement_is_asserted", detail)
        }
        ExplainError::MissingOption(_) => ApiError::unprocessable("missing_option", detail),
        ExplainError::DesiredEqualsCurrent(_) => ApiError::unprocessable("invalid_option", detail),
        ExplainError::Inference(_) => ApiError::conflict("inference_cap_exceeded", detail),
        ExplainError::NoHistoricalCases { .. } => ApiError::conflict("no_historical_cases", detail),
        ExplainError::ValidationFailed(c) => ApiError {
            text: Some(rulelens_core::explain::render_counterfactual(&c, labels)),
            structured: serde_json::to_value(&*c).ok().map(Box::new),
            ..ApiError::conflict("validation_failed", detail)
        },
    }
}

#[derive(Deserialize)]
struct RulesBody {
    rules_text: String,
}

#[derive(Serialize)]
struct RevisionResponse {
    revision: u64,
    inferred_count: usize,
}

fn session_error(err: SessionError) -> ApiError {
    match err {
        SessionError::Parse { what, source } => ApiError::parse(what, &source),
        SessionError::Inference(e) => ApiError::conflict("inference_cap_exceeded", e.to_string()),
        SessionError::NothingToRevert => ApiError::conflict("nothing_to_revert", err.to_string()),
    }
}

async fn update_rules(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<RulesBody>, JsonRejection>,
) -> Result<Json<RevisionResponse>, ApiError> {
    let body = json_body(body)?;
    let session = session(&state, &id).await?;
    let mut s = session.write().await;
    s.update_rules(&body.rules_text).map_err(session_error)?;
    Ok(Json(RevisionResponse { revision: s.revision, inferred_count: s.model().inferred().len() }))
}

async fn revert(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<RevisionResponse>, ApiError> {
    let session = session(&state, &id).await?;
    let mut s = session.write().await;
    s.revert().map_err(session_error)?;
    Ok(Json(RevisionResponse { revision: s.revision, inferred_count: s.model().inferred().len() }))
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// Multipart fields: `facts` and `rules` (files or text), optional `id` and
/// `title`. Without an id the facts file name (minus extension) is used.
async fn upload_model(
    State(state): State<AppState>,
    mut multipart: Multipart,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let bad = |e: axum::extract::multipart::MultipartError| ApiError::unprocessable("invalid_upload", e.body_text());
    let (mut id, mut title, mut facts, mut rules, mut facts_name) = (None, None, None, None, None);
    while let Some(field) = multipart.next_field().await.map_err(bad)? {
        let name = field.name().unwrap_or_default().to_string();
        let file_name = field.file_name().map(String::from);
        let text = field.text().await.map_err(bad)?;
        match name.as_str() {
            "id" => id = Some(text.trim().to_string()),
            "title" => title = Some(text.trim().to_string()),
            "facts" => {
                facts = Some(text);
                facts_name = file_name;
            }
            "rules" => rules = Some(text),
            _ => {}
        }
    }
    let facts = facts.ok_or_else(|| ApiError::unprocessable("invalid_upload", "missing 'facts' field"))?;
    let rules = rules.ok_or_else(|| ApiError::unprocessable("invalid_upload", "missing 'rules' field"))?;
    let id = id
        .or_else(|| facts_name.as_deref().and_then(|n| n.split('.').next()).map(String::from))
        .ok_or_else(|| ApiError::unprocessable("invalid_upload", "missing 'id' field"))?;
    if !valid_id(&id) {
        return Err(ApiError::unprocessable("invalid_upload", format!("invalid model id '{id}'")));
    }
    let title = title.unwrap_or_else(|| id.clone());

    let session = Session::from_texts(&id, &title, &facts, &rules, state.config()).map_err(session_error)?;
    let inferred_count = session.model().inferred().len();
    if !state.insert(session).await {
        return Err(ApiError::conflict("model_exists", format!("model '{id}' already exists")));
    }
    Ok((
        StatusCode::CREATED,
        Json(json!({ "id": id, "title": title, "revision": 0, "inferred_count": inferred_count })),
    ))
}
