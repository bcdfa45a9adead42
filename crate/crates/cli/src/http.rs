//! JSON HTTP API over a frozen search engine.

use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Serialize;

use newsgraph_core::store::{SearchEngine, SearchQuery};
use newsgraph_core::Error;

#[derive(Debug, Serialize)]
pub struct ApiErrorBody {
    pub error: &'static str,
    pub message: String,
}

pub struct ApiError {
    status: StatusCode,
    body: ApiErrorBody,
}

impl ApiError {
    fn bad_request(message: String) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: ApiErrorBody { error: "invalid_query", message },
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, error) = match &e {
            Error::NotFound { .. } => (StatusCode::NOT_FOUND, "not_found"),
            Error::InvalidQuery(_) => (StatusCode::BAD_REQUEST, "invalid_query"),
            Error::UnknownSchema(_) => (StatusCode::BAD_REQUEST, "unknown_schema"),
            Error::UnknownProperty(_) => (StatusCode::BAD_REQUEST, "unknown_property"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError {
            status,
            body: ApiErrorBody { error, message: e.to_string() },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type Shared = Arc<SearchEngine>;
type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(engine: Shared) -> Router {
    Router::new()
        .route("/api/search", get(search))
        .route("/api/articles/{id}", get(article))
        .route("/api/schemas", get(schemas))
        .route("/api/schemas/{id}", get(schema))
        .route("/api/events/{qid}", get(event))
        .fallback(not_found)
        .with_state(engine)
}

async fn search(
    State(engine): State<Shared>,
    params: Result<Query<Vec<(String, String)>>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(params) = params.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let query = SearchQuery::from_params(&params)?;
    Ok(Json(engine.search(&query)?).into_response())
}

async fn article(State(engine): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(engine.article_detail(&id)?).into_response())
}

async fn schemas(State(engine): State<Shared>) -> ApiResult<Vec<newsgraph_core::store::SchemaSummary>> {
    Ok(Json(engine.schema_list()))
}

async fn schema(State(engine): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(engine.schema_detail(&id)?).into_response())
}

async fn event(State(engine): State<Shared>, Path(qid): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(engine.event_detail(&qid)?).into_response())
}

async fn not_found() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        body: ApiErrorBody {
            error: "not_found",
            message: "no such endpoint".into(),
        },
    }
}

/// Binds `addr` and serves until ctrl-c.
pub async fn serve(engine: SearchEngine, addr: &str) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(engine)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
