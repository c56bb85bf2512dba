//! Starts the HTTP service on a free local port, calls a few endpoints and
//! shuts it down.
//!
//!     cargo run --example service_client

use std::sync::Arc;

use lq::api::{router, serve_on, AppState};
use lq::{ExponentPolicy, TaxonomyTree};
use serde_json::{json, Value};
use tokio::net::TcpListener;

#[tokio::main]
async fn main() {
    let state = AppState {
        tree: TaxonomyTree::from_json(lq::SAMPLE_TAXONOMY).unwrap(),
        default_policy: ExponentPolicy::SqrtRank,
    };
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(serve_on(listener, router(Arc::new(state)), async {
        let _ = stopped.await;
    }));

    let client = reqwest::Client::new();
    let portfolio = json!({"languages": {"Serbian": 1, "Slovene": 1, "Croatian": 1, "Chinese": 1, "English": 0.5}});
    let calls = [
        ("/lq", json!({ "portfolio": portfolio })),
        ("/whatif", json!({ "portfolio": {"languages": {"Serbian": 1}}, "add": {"language": "Chinese"} })),
        ("/suggest", json!({ "portfolio": {"languages": {"Serbian": 1}}, "top_k": 2 })),
        ("/matrix", json!({ "rho": 0.3, "r": 2 })),
        ("/lq", json!({ "portfolio": {"languages": {"Klingon": 1}} })),
    ];
    for (path, body) in calls {
        let resp = client.post(format!("{base}{path}")).json(&body).send().await.unwrap();
        let status = resp.status();
        let body: Value = resp.json().await.unwrap();
        println!("POST {path} -> {status}\n  {body}");
    }
    let langs: Value = client.get(format!("{base}/languages?q=S")).send().await.unwrap().json().await.unwrap();
    println!("GET /languages?q=S\n  {langs}");

    let _ = stop.send(());
    server.await.unwrap().unwrap();
}
