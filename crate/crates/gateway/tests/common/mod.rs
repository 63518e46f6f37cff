#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use discourse_gateway::{router, SessionStore};

pub const C1: &str = "id,agent,text\n\
    1,A,knowledge building needs ideas\n\
    2,B,ideas improve through discussion\n\
    3,A,discussion builds knowledge\n";
pub const V1: &str = "knowledge\nideas\ndiscussion\n";

pub fn core_fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: String,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }
}

pub struct Client {
    pub app: Router,
}

impl Client {
    pub fn new() -> Self {
        Client::with_store(SessionStore::in_memory())
    }

    pub fn with_store(store: SessionStore) -> Self {
        Client {
            app: router(Arc::new(store)),
        }
    }

    pub async fn send(&self, method: Method, uri: &str, body: impl Into<Body>) -> Reply {
        let req = Request::builder()
            .method(method)
            .uri(uri)
            .body(body.into())
            .unwrap();
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let content_type = resp
            .headers()
            .get(header::CONTENT_TYPE)
            .map(|v| v.to_str().unwrap().to_owned())
            .unwrap_or_default();
        let body = resp
            .into_body()
            .collect()
            .await
            .unwrap()
            .to_bytes()
            .to_vec();
        Reply {
            status,
            content_type,
            body,
        }
    }

    pub async fn get(&self, uri: &str) -> Reply {
        self.send(Method::GET, uri, Body::empty()).await
    }

    pub async fn post_json(&self, uri: &str, value: &Value) -> Reply {
        self.send(Method::POST, uri, serde_json::to_vec(value).unwrap())
            .await
    }

    pub async fn create(&self, corpus: &str, words: &str) -> String {
        let r = self
            .post_json(
                "/api/sessions",
                &json!({ "corpus_csv": corpus, "wordlist": words }),
            )
            .await;
        assert_eq!(r.status, StatusCode::CREATED, "{}", r.text());
        r.json()["session_id"].as_str().unwrap().to_owned()
    }
}
