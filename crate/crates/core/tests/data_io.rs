use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use fermat_core::data_io::{
    parse_poly_expr, sha256_hex, to_fixture_json, Cache, FieldDescriptor, FixtureStore, LmfdbClient, LmfdbQuery,
    LMFDB_SCHEMA,
};
use fermat_core::newform::{condition_c_scan, records_from_table, FormStatus};
use fermat_core::Error;

/// Serves fixed bodies by request path; unknown paths get a 500.
struct MockServer {
    url: String,
    hits: Arc<AtomicUsize>,
}

fn serve(routes: HashMap<String, String>) -> MockServer {
    serve_with(|_| routes)
}

/// Like [`serve`], with routes that may mention the server's own URL.
fn serve_with(routes: impl FnOnce(&str) -> HashMap<String, String>) -> MockServer {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let routes = routes(&url);
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            counter.fetch_add(1, Ordering::SeqCst);
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            let path = line.split_whitespace().nth(1).unwrap_or("").to_string();
            loop {
                let mut h = String::new();
                if reader.read_line(&mut h).unwrap() == 0 || h == "\r\n" {
                    break;
                }
            }
            let (status, body) = match routes.get(&path) {
                Some(b) => ("200 OK", b.clone()),
                None => ("500 Internal Server Error", format!("no route {path}")),
            };
            let _ = write!(
                stream,
                "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });
    MockServer { url, hits }
}

fn routes_404(base: &str) -> HashMap<String, String> {
    let forms = LmfdbQuery::new("hmf_forms").with("field_label", "3.3.404.1").with("level_norm", 2).path();
    let page2 = format!("{forms}&_offset=1");
    HashMap::from([
        (
            LmfdbQuery::new("hmf_fields").with("label", "3.3.404.1").path(),
            r#"{"data":[{"label":"3.3.404.1","primes":["[2, 2, w + 1]","[7, 7, w + 5]","[49, 7, 7]"]}],"next":null}"#
                .to_string(),
        ),
        (forms, format!(r#"{{"data":[{{"label":"3.3.404.1-2.1-a","level_norm":2}}],"next":"{base}{page2}"}}"#)),
        (page2, r#"{"data":[],"next":null}"#.to_string()),
        (
            LmfdbQuery::new("hmf_hecke").with("label", "3.3.404.1-2.1-a").path(),
            r#"{"data":[{"hecke_polynomial":"x","hecke_eigenvalues":["1","-2","6"]}],"next":null}"#.to_string(),
        ),
    ])
}

fn mock_404() -> MockServer {
    serve_with(routes_404)
}

#[test]
fn lmfdb_fetch_parses_caches_and_replays_offline() {
    let dir = tempfile::tempdir().unwrap();
    let server = mock_404();
    let k = FixtureStore::bundled().load_field("3.3.404.1").unwrap();
    let client = LmfdbClient::new(&server.url, Cache::new(dir.path())).retries(0);
    let online = client.newforms(&k, 2).unwrap();
    assert_eq!(online.schema, LMFDB_SCHEMA);
    assert_eq!(online.forms.len(), 1);
    let ev = &online.forms[0].eigenvalues;
    // [7, 7, w + 5] is the degree-1 factor x + 5, [49, 7, 7] the degree-2 one.
    let at7: Vec<_> = ev.iter().filter(|e| e.p == 7).map(|e| (e.f, e.factor_index, e.aq.clone())).collect();
    assert_eq!(at7, vec![(1, 0, vec!["-2".to_string()]), (2, 1, vec!["6".to_string()])]);
    let fetched = server.hits.load(Ordering::SeqCst);
    // fields, two pages of forms, one Hecke record
    assert_eq!(fetched, 4);

    let offline = LmfdbClient::new(&server.url, Cache::new(dir.path())).offline(true);
    assert_eq!(offline.newforms(&k, 2).unwrap(), online);
    assert_eq!(server.hits.load(Ordering::SeqCst), fetched);

    let recs = records_from_table(&online).unwrap();
    let scan = condition_c_scan("3.3.404.1", &recs).unwrap();
    assert!(matches!(&scan.scans[0].status, FormStatus::Witness { a_q, .. } if a_q == "-2"));

    let manifest = client.cache().manifest().unwrap();
    let entry = &manifest.entries["lmfdb/3.3.404.1/2.json"];
    assert_eq!(entry.schema, LMFDB_SCHEMA);
    let text = std::fs::read_to_string(dir.path().join("lmfdb/3.3.404.1/2.json")).unwrap();
    assert_eq!(sha256_hex(text.as_bytes()), entry.sha256);
    assert_eq!(text, to_fixture_json(&online).unwrap());
}

#[test]
fn offline_cold_cache_is_a_data_gap() {
    let dir = tempfile::tempdir().unwrap();
    let k = FixtureStore::bundled().load_field("3.3.148.1").unwrap();
    let client = LmfdbClient::new("http://127.0.0.1:9", Cache::new(dir.path())).offline(true);
    assert!(matches!(client.newforms(&k, 2), Err(Error::DataGap(_))));
    assert!(matches!(client.get_json("/api/x"), Err(Error::DataGap(_))));
}

#[test]
fn http_failures_surface_as_network_errors() {
    let server = serve(HashMap::new());
    let dir = tempfile::tempdir().unwrap();
    let client = LmfdbClient::new(&server.url, Cache::new(dir.path())).retries(1);
    assert!(matches!(client.get_json("/api/missing"), Err(Error::Network(_))));
    assert_eq!(server.hits.load(Ordering::SeqCst), 2);
    let bad = serve(HashMap::from([("/api/bad".to_string(), "{not json".to_string())]));
    let client = LmfdbClient::new(&bad.url, Cache::new(dir.path())).retries(0);
    assert!(matches!(client.get_json("/api/bad"), Err(Error::Network(_))));
}

#[test]
fn every_single_bit_flip_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let payload = FixtureStore::bundled().read_newform_text("3.3.564.1").unwrap();
    cache.put("lmfdb", "3.3.564.1", 2, &payload, "test").unwrap();
    assert_eq!(cache.get("lmfdb", "3.3.564.1", 2).unwrap().unwrap().0, payload);
    let path = cache.path("lmfdb", "3.3.564.1", 2).unwrap();
    let bytes = payload.as_bytes().to_vec();
    for i in (0..bytes.len()).step_by(7) {
        for bit in 0..8 {
            let mut b = bytes.clone();
            b[i] ^= 1 << bit;
            std::fs::write(&path, &b).unwrap();
            match cache.get("lmfdb", "3.3.564.1", 2) {
                Err(Error::Inconsistency(_)) | Err(Error::Io(_)) => {}
                other => panic!("flip at byte {i} bit {bit} not detected: {other:?}"),
            }
        }
    }
}

#[test]
fn cache_rejects_path_escapes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    assert!(matches!(cache.put("lmfdb", "../etc", 2, "x", "s"), Err(Error::Invalid(_))));
    assert!(matches!(cache.put("a/b", "3.3.148.1", 2, "x", "s"), Err(Error::Invalid(_))));
    assert!(cache.get("lmfdb", "3.3.148.1", 2).unwrap().is_none());
}

#[test]
fn field_fixtures_round_trip_byte_for_byte() {
    let store = FixtureStore::bundled();
    for label in store.field_labels().unwrap() {
        let text = store.read_field_text(&label).unwrap();
        let desc: FieldDescriptor = serde_json::from_str(&text).unwrap();
        assert_eq!(to_fixture_json(&desc).unwrap(), text, "{label}");
    }
}

#[test]
fn load_field_validates() {
    let store = FixtureStore::bundled();
    let k = store.load_field("3.3.148.1").unwrap();
    assert_eq!(k.min_poly().to_string(), store.load_field("3.3.148.1").unwrap().min_poly().to_string());
    assert_eq!(k.min_poly(), &fermat_core::algebra::poly::IntPoly::from_i64(&[1, -3, -1, 1]));
    let q5 = store.load_field("5.5.126032.1").unwrap();
    assert_eq!(q5.min_poly(), &fermat_core::algebra::poly::IntPoly::from_i64(&[-2, 6, 0, -6, 0, 1]));
    assert!(matches!(store.load_field("3.3.999.1"), Err(Error::DataGap(_)) | Err(Error::Io(_))));
    assert!(matches!(store.load_field("../x"), Err(Error::Invalid(_))));

    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("fields")).unwrap();
    let mut desc = store.field_descriptor("3.3.148.1").unwrap();
    desc.disc = "149".into();
    std::fs::write(dir.path().join("fields/3.3.148.1.json"), to_fixture_json(&desc).unwrap()).unwrap();
    let err = FixtureStore::new(dir.path()).load_field("3.3.148.1").unwrap_err();
    assert!(err.to_string().contains("disc"), "{err}");
    let mut desc = store.field_descriptor("3.3.148.1").unwrap();
    desc.fundamental_units[0] = vec!["2".into(), "0".into(), "0".into()];
    std::fs::write(dir.path().join("fields/3.3.148.1.json"), to_fixture_json(&desc).unwrap()).unwrap();
    assert!(FixtureStore::new(dir.path()).load_field("3.3.148.1").is_err());
}

#[test]
fn poly_expressions() {
    let p = parse_poly_expr("-3/2*e^2 + e - 7", 'e').unwrap();
    assert_eq!(p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(), vec!["-7", "1", "-3/2"]);
    assert!(parse_poly_expr("e^", 'e').is_err());
    assert!(parse_poly_expr("", 'e').is_err());
}
