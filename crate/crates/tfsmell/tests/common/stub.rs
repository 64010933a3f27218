//! Local stand-in for the code-hosting API.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use serde_json::{json, Value};
use tfsmell::harvest::Clock;
use tiny_http::{Header, Response, Server};

pub struct Request {
    pub path: String,
    pub query: BTreeMap<String, String>,
    pub authorization: Option<String>,
    pub accept: Option<String>,
}

pub struct Reply {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(v: Value) -> Reply {
        Reply { status: 200, headers: vec![("Content-Type".into(), "application/json".into())], body: v.to_string().into_bytes() }
    }

    pub fn raw(body: &str) -> Reply {
        Reply { status: 200, headers: Vec::new(), body: body.as_bytes().to_vec() }
    }

    pub fn status(status: u16) -> Reply {
        Reply { status, headers: Vec::new(), body: br#"{"message":"stub"}"#.to_vec() }
    }

    pub fn header(mut self, k: &str, v: &str) -> Reply {
        self.headers.push((k.into(), v.into()));
        self
    }
}

pub struct Stub {
    pub url: String,
    /// Request paths in arrival order.
    pub log: Arc<Mutex<Vec<String>>>,
    server: Arc<Server>,
    handle: Option<JoinHandle<()>>,
}

fn decode(s: &str) -> String {
    percent_encoding::percent_decode_str(&s.replace('+', " ")).decode_utf8_lossy().into_owned()
}

impl Stub {
    pub fn start<F>(handler: F) -> Stub
    where
        F: Fn(&Request) -> Reply + Send + Sync + 'static,
    {
        let server = Arc::new(Server::http("127.0.0.1:0").unwrap());
        let url = format!("http://{}", server.server_addr().to_ip().unwrap());
        let log = Arc::new(Mutex::new(Vec::new()));
        let (srv, lg) = (server.clone(), log.clone());
        let handle = std::thread::spawn(move || {
            for req in srv.incoming_requests() {
                let (path, qs) = req.url().split_once('?').unwrap_or((req.url(), ""));
                let query = qs
                    .split('&')
                    .filter(|p| !p.is_empty())
                    .map(|p| {
                        let (k, v) = p.split_once('=').unwrap_or((p, ""));
                        (decode(k), decode(v))
                    })
                    .collect();
                let header = |name: &str| {
                    req.headers().iter().find(|h| h.field.as_str().as_str().eq_ignore_ascii_case(name)).map(|h| h.value.as_str().to_string())
                };
                let request = Request {
                    path: decode(path),
                    query,
                    authorization: header("Authorization"),
                    accept: header("Accept"),
                };
                lg.lock().unwrap().push(request.path.clone());
                let reply = handler(&request);
                let mut resp = Response::from_data(reply.body).with_status_code(reply.status);
                for (k, v) in reply.headers {
                    resp = resp.with_header(Header::from_bytes(k.as_bytes(), v.as_bytes()).unwrap());
                }
                let _ = req.respond(resp);
            }
        });
        Stub { url, log, server, handle: Some(handle) }
    }

    pub fn hits(&self, prefix: &str) -> usize {
        self.log.lock().unwrap().iter().filter(|p| p.starts_with(prefix)).count()
    }
}

impl Drop for Stub {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

/// Clock whose sleeps advance time instantly and are recorded.
#[derive(Clone, Default)]
pub struct FakeClock {
    now: Arc<AtomicU64>,
    pub slept: Arc<Mutex<Vec<u64>>>,
}

impl FakeClock {
    pub fn at(now: u64) -> FakeClock {
        let c = FakeClock::default();
        c.now.store(now, Ordering::SeqCst);
        c
    }

    pub fn total_slept(&self) -> u64 {
        self.slept.lock().unwrap().iter().sum()
    }
}

impl Clock for FakeClock {
    fn now(&self) -> u64 {
        self.now.load(Ordering::SeqCst)
    }

    fn sleep(&self, d: Duration) {
        self.slept.lock().unwrap().push(d.as_secs());
        self.now.fetch_add(d.as_secs(), Ordering::SeqCst);
    }
}

pub fn repo_meta(full_name: &str, stars: u64, fork: bool, size: u64, public: bool) -> Value {
    json!({
        "full_name": full_name,
        "stargazers_count": stars,
        "fork": fork,
        "size": size,
        "private": !public,
        "visibility": if public { "public" } else { "private" },
    })
}

pub fn search_page(total: u64, names: &[String]) -> Value {
    json!({
        "total_count": total,
        "incomplete_results": false,
        "items": names.iter().map(|n| json!({"path": "main.tf", "repository": {"full_name": n}})).collect::<Vec<_>>(),
    })
}

pub fn tree(entries: &[(&str, &str, &str)]) -> Value {
    json!({
        "sha": "head",
        "truncated": false,
        "tree": entries.iter().map(|(p, t, s)| json!({"path": p, "type": t, "sha": s})).collect::<Vec<_>>(),
    })
}
