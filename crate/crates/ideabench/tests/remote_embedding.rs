//! Exercises the remote embedding provider against a local scripted HTTP
//! endpoint: wire format, retries, and the cache's one-call-per-distinct-text
//! contract.

use std::io::{Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use ideabench::embedding::{EmbedError, Embedder, ProviderConfig, RetryPolicy};
use ideabench::model::{Idea, Pool};

/// Behavior of the scripted endpoint.
#[derive(Clone)]
struct StubPlan {
    /// Respond with 500 to this many requests before succeeding.
    fail_first: usize,
    dim: usize,
}

struct Stub {
    url: String,
    hits: Arc<AtomicUsize>,
    last_auth: Arc<std::sync::Mutex<Option<String>>>,
}

/// Minimal one-thread HTTP responder. Each request body is parsed for its
/// input texts; the response embeds each text as a deterministic vector so
/// assertions can recompute expectations.
fn spawn_stub(plan: StubPlan) -> Stub {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/embed", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let hits_for_thread = Arc::clone(&hits);
    let last_auth = Arc::new(std::sync::Mutex::new(None));
    let auth_for_thread = Arc::clone(&last_auth);

    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let hit = hits_for_thread.fetch_add(1, Ordering::SeqCst);

            let mut buf = Vec::new();
            let mut chunk = [0_u8; 4096];
            let body_start = loop {
                match stream.read(&mut chunk) {
                    Ok(0) => break None,
                    Ok(n) => {
                        buf.extend_from_slice(&chunk[..n]);
                        if let Some(pos) = find_header_end(&buf) {
                            break Some(pos);
                        }
                    }
                    Err(_) => break None,
                }
            };
            let Some(body_start) = body_start else { continue };

            let header_text = String::from_utf8_lossy(&buf[..body_start]).to_string();
            let content_length = header_text
                .lines()
                .find_map(|l| {
                    let (name, value) = l.split_once(':')?;
                    name.eq_ignore_ascii_case("content-length")
                        .then(|| value.trim().parse::<usize>().ok())
                        .flatten()
                })
                .unwrap_or(0);
            *auth_for_thread.lock().unwrap() = header_text.lines().find_map(|l| {
                let (name, value) = l.split_once(':')?;
                name.eq_ignore_ascii_case("authorization")
                    .then(|| value.trim().to_string())
            });
            while buf.len() < body_start + content_length {
                match stream.read(&mut chunk) {
                    Ok(0) => break,
                    Ok(n) => buf.extend_from_slice(&chunk[..n]),
                    Err(_) => break,
                }
            }

            if hit < plan.fail_first {
                let _ = stream.write_all(
                    b"HTTP/1.1 500 Internal Server Error\r\ncontent-length: 0\r\nconnection: close\r\n\r\n",
                );
                continue;
            }

            let body: serde_json::Value = serde_json::from_slice(&buf[body_start..]).unwrap();
            let inputs: Vec<String> = body["input"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_str().unwrap().to_string())
                .collect();
            let embeddings: Vec<Vec<f64>> =
                inputs.iter().map(|text| stub_vector(text, plan.dim)).collect();
            let payload = serde_json::to_vec(&serde_json::json!({ "embeddings": embeddings })).unwrap();
            let head = format!(
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n",
                payload.len()
            );
            let _ = stream.write_all(head.as_bytes());
            let _ = stream.write_all(&payload);
        }
    });

    Stub { url, hits, last_auth }
}

fn find_header_end(buf: &[u8]) -> Option<usize> {
    buf.windows(4).position(|w| w == b"\r\n\r\n").map(|p| p + 4)
}

/// Unnormalized per-text vector; the provider is expected to normalize.
fn stub_vector(text: &str, dim: usize) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    for (i, b) in text.bytes().enumerate() {
        acc[(i + b as usize) % dim] += f64::from(b) / 64.0;
    }
    acc[0] += 1.0;
    acc
}

fn pool_of(texts: &[&str]) -> Pool {
    let mut pool = Pool::new("remote_test", 0);
    for (i, text) in texts.iter().enumerate() {
        pool.ideas.push(Idea {
            id: Idea::position_id("remote_test", 0, i),
            name: format!("n{i}"),
            description: text.to_string(),
            raw_text: text.to_string(),
            strategy_id: "remote_test".to_string(),
            session_index: 0,
            idea_index: i,
        });
    }
    pool
}

#[test]
fn remote_vectors_are_normalized_and_deterministic() {
    let stub = spawn_stub(StubPlan { fail_first: 0, dim: 8 });
    let config = ProviderConfig::remote(&stub.url, "stub-model");
    let embedder = Embedder::with_retry(config, RetryPolicy::immediate(2));

    let v1 = embedder.embed_text("portable kettle").unwrap();
    let v2 = embedder.embed_text("portable kettle").unwrap();
    assert_eq!(v1.dim(), 8);
    assert!((v1.norm() - 1.0).abs() < 1e-6);
    assert_eq!(v1.components(), v2.components());
}

#[test]
fn transient_failures_are_retried() {
    let stub = spawn_stub(StubPlan { fail_first: 2, dim: 4 });
    let config = ProviderConfig::remote(&stub.url, "stub-model");
    let embedder = Embedder::with_retry(config, RetryPolicy::immediate(5));

    let v = embedder.embed_text("resilient request").unwrap();
    assert!((v.norm() - 1.0).abs() < 1e-6);
    assert_eq!(stub.hits.load(Ordering::SeqCst), 3);
}

#[test]
fn retries_exhaust_into_provider_error() {
    let stub = spawn_stub(StubPlan { fail_first: 100, dim: 4 });
    let config = ProviderConfig::remote(&stub.url, "stub-model");
    let embedder = Embedder::with_retry(config, RetryPolicy::immediate(3));

    match embedder.embed_text("doomed") {
        Err(EmbedError::Provider(message)) => assert!(message.contains("3 attempts")),
        other => panic!("expected provider error, got {other:?}"),
    }
    assert_eq!(stub.hits.load(Ordering::SeqCst), 3);
}

#[test]
fn embed_pool_failure_names_the_failing_idea() {
    let stub = spawn_stub(StubPlan { fail_first: 100, dim: 4 });
    let config = ProviderConfig::remote(&stub.url, "stub-model");
    let embedder = Embedder::with_retry(config, RetryPolicy::immediate(2)).with_parallelism(1);

    match embedder.embed_pool(&pool_of(&["first", "second"])) {
        Err(EmbedError::Provider(message)) => {
            assert!(message.starts_with("idea 0:"), "got {message:?}");
        }
        other => panic!("expected provider error, got {other:?}"),
    }
}

#[test]
fn api_key_travels_as_bearer_header() {
    let stub = spawn_stub(StubPlan { fail_first: 0, dim: 4 });
    // Only this test touches the variable; tests in this binary that
    // construct embedders run fast enough that the brief overlap window
    // does not matter for the others.
    std::env::set_var(ideabench::embedding::EMBED_API_KEY_VAR, "sekrit-token");
    let config = ProviderConfig::remote(&stub.url, "stub-model");
    let embedder = Embedder::with_retry(config, RetryPolicy::immediate(2));
    embedder.embed_text("authorized request").unwrap();
    std::env::remove_var(ideabench::embedding::EMBED_API_KEY_VAR);
    assert_eq!(
        stub.last_auth.lock().unwrap().as_deref(),
        Some("Bearer sekrit-token")
    );
}

#[test]
fn unreachable_endpoint_is_a_provider_error() {
    // Port 9 on localhost is the discard service and should refuse.
    let config = ProviderConfig::remote("http://127.0.0.1:9/embed", "stub-model");
    let embedder = Embedder::with_retry(config, RetryPolicy::immediate(2));
    assert!(matches!(embedder.embed_text("x"), Err(EmbedError::Provider(_))));
}

#[test]
fn embed_pool_makes_one_call_per_distinct_text_and_zero_when_cached() {
    let stub = spawn_stub(StubPlan { fail_first: 0, dim: 8 });
    let cache = tempfile::tempdir().unwrap();
    let config = ProviderConfig::remote(&stub.url, "stub-model").with_cache_dir(cache.path());

    let pool = pool_of(&["alpha", "beta", "alpha", "gamma", "beta"]);
    let first = Embedder::with_retry(config.clone(), RetryPolicy::immediate(2))
        .with_parallelism(2);
    let embedded = first.embed_pool(&pool).unwrap();
    assert_eq!(embedded.len(), 5);
    assert_eq!(stub.hits.load(Ordering::SeqCst), 3, "one call per distinct text");

    // Duplicate texts map to identical vectors, in idea order.
    assert_eq!(embedded.vectors[0].components(), embedded.vectors[2].components());
    assert_eq!(embedded.vectors[1].components(), embedded.vectors[4].components());

    let second = Embedder::with_retry(config, RetryPolicy::immediate(2));
    let again = second.embed_pool(&pool).unwrap();
    assert_eq!(stub.hits.load(Ordering::SeqCst), 3, "second run is cache-only");
    for (a, b) in embedded.vectors.iter().zip(&again.vectors) {
        assert_eq!(a.components(), b.components());
    }
}

#[test]
fn hundred_idea_pool_embeds_twice_with_no_second_round_of_calls() {
    let stub = spawn_stub(StubPlan { fail_first: 0, dim: 16 });
    let cache = tempfile::tempdir().unwrap();
    let config = ProviderConfig::remote(&stub.url, "stub-model").with_cache_dir(cache.path());

    let texts: Vec<String> = (0..100).map(|i| format!("distinct idea number {i}")).collect();
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let pool = pool_of(&refs);

    Embedder::with_retry(config.clone(), RetryPolicy::immediate(2))
        .with_parallelism(4)
        .embed_pool(&pool)
        .unwrap();
    let after_first = stub.hits.load(Ordering::SeqCst);
    assert_eq!(after_first, 100);

    Embedder::with_retry(config, RetryPolicy::immediate(2))
        .embed_pool(&pool)
        .unwrap();
    assert_eq!(stub.hits.load(Ordering::SeqCst), after_first, "zero remote calls on rerun");
}
