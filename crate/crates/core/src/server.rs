//! A minimal embedding service speaking protocol v1, for serving in-process
//! encoders over loopback (tests, demos, or a local stand-in for a remote
//! encoder).

use std::net::SocketAddr;
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use tiny_http::{Header, Method, Request, Response, Server};

use crate::encoder::protocol::{
    decode_image, EmbedRequest, EmbedResponse, ErrorBody, HealthResponse, EMBED_PATH, HEALTH_PATH,
    PROTOCOL_VERSION,
};
use crate::encoder::{Encoder, EncoderInput};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_BATCH: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServeOptions {
    /// Batches larger than this are rejected with 413.
    pub max_batch: usize,
    pub workers: usize,
}

impl Default for ServeOptions {
    fn default() -> Self {
        ServeOptions {
            max_batch: DEFAULT_MAX_BATCH,
            workers: 2,
        }
    }
}

/// A running service. Dropping it stops the workers.
pub struct EmbeddingServer {
    server: Arc<Server>,
    addr: SocketAddr,
    workers: Vec<JoinHandle<()>>,
}

impl EmbeddingServer {
    /// Binds `addr` (e.g. `127.0.0.1:0`) and serves `encoder` on worker
    /// threads.
    pub fn start(addr: &str, encoder: Arc<dyn Encoder>, options: ServeOptions) -> Result<Self> {
        let server = Server::http(addr).map_err(|e| Error::Unresolvable {
            what: "bind address",
            locator: addr.to_string(),
            reason: e.to_string(),
        })?;
        let local = server
            .server_addr()
            .to_ip()
            .expect("http server binds an IP address");
        let server = Arc::new(server);
        let workers = (0..options.workers.max(1))
            .map(|_| {
                let server = Arc::clone(&server);
                let encoder = Arc::clone(&encoder);
                thread::spawn(move || {
                    for request in server.incoming_requests() {
                        handle(request, &*encoder, options);
                    }
                })
            })
            .collect();
        Ok(EmbeddingServer {
            server,
            addr: local,
            workers,
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// `http://host:port`, ready for [`crate::EncoderHandle::remote`].
    pub fn endpoint(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        self.server.unblock();
        for _ in 1..self.workers.len() {
            self.server.unblock();
        }
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}

impl Drop for EmbeddingServer {
    fn drop(&mut self) {
        self.stop();
    }
}

fn json_response(status: u16, body: String) -> Response<std::io::Cursor<Vec<u8>>> {
    let header = Header::from_bytes("Content-Type", "application/json").expect("static header");
    Response::from_string(body)
        .with_status_code(status)
        .with_header(header)
}

fn error_response(status: u16, code: &str, message: impl Into<String>) -> (u16, String) {
    let body = serde_json::to_string(&ErrorBody::new(code, message)).expect("error serializes");
    (status, body)
}

fn handle(mut request: Request, encoder: &dyn Encoder, options: ServeOptions) {
    let (status, body) = route(&mut request, encoder, options);
    let _ = request.respond(json_response(status, body));
}

fn route(request: &mut Request, encoder: &dyn Encoder, options: ServeOptions) -> (u16, String) {
    let path = request.url().split('?').next().unwrap_or("").to_string();
    match (request.method(), path.as_str()) {
        (Method::Get, HEALTH_PATH) => match encoder.health() {
            Ok(h) => {
                let body = HealthResponse {
                    dim: h.dim,
                    protocol_version: PROTOCOL_VERSION.to_string(),
                };
                (200, serde_json::to_string(&body).expect("health serializes"))
            }
            Err(e) => error_response(500, "internal", e.to_string()),
        },
        (Method::Post, EMBED_PATH) => embed(request, encoder, options),
        (_, HEALTH_PATH | EMBED_PATH) => error_response(405, "method_not_allowed", "wrong method"),
        _ => error_response(404, "not_found", format!("no route for {path}")),
    }
}

fn embed(request: &mut Request, encoder: &dyn Encoder, options: ServeOptions) -> (u16, String) {
    let mut text = String::new();
    if let Err(e) = request.as_reader().read_to_string(&mut text) {
        return error_response(400, "bad_request", format!("unreadable body: {e}"));
    }
    let parsed: EmbedRequest = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => return error_response(400, "bad_request", format!("malformed request: {e}")),
    };
    if parsed.images.is_empty() {
        return error_response(400, "bad_request", "images must be non-empty");
    }
    if parsed.images.len() > options.max_batch {
        return error_response(
            413,
            "batch_too_large",
            format!("{} images exceed the limit of {}", parsed.images.len(), options.max_batch),
        );
    }
    let mut images = Vec::with_capacity(parsed.images.len());
    for (i, wire) in parsed.images.iter().enumerate() {
        match decode_image(wire) {
            Ok(img) => images.push(img),
            Err(e) => return error_response(400, "bad_request", format!("image {i}: {e}")),
        }
    }
    let inputs: Vec<EncoderInput<'_>> = images.iter().map(EncoderInput::anonymous).collect();
    match encoder.embed(&inputs) {
        Ok(out) => {
            let dim = out.first().map_or(0, |e| e.dim());
            let body = EmbedResponse {
                dim,
                embeddings: out.into_iter().map(|e| e.into_inner()).collect(),
            };
            (200, serde_json::to_string(&body).expect("embeddings serialize"))
        }
        Err(e) => error_response(500, "internal", e.to_string()),
    }
}
