use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use cadseq::dataset::{
    build_dataset, read_jsonl, BuildOptions, DatasetMode, HttpCaptionClient, MockCaptioner,
    PipelineConfig, UreqTransport, IMAGE_PLACEHOLDER,
};
use cadseq::geometry::prepare_for_tokenization;
use cadseq::sequence::serialize_model;
use cadseq::synth::{random_corpus, SynthConfig};
use cadseq::tokenizer::encode_model;

fn write_models(dir: &Path, n: usize) {
    fs::create_dir_all(dir).unwrap();
    for (i, m) in random_corpus(n, 21, &SynthConfig::default())
        .iter()
        .enumerate()
    {
        fs::write(dir.join(format!("part{i}.json")), serialize_model(m)).unwrap();
    }
}

fn opts(mode: DatasetMode) -> BuildOptions {
    BuildOptions {
        mode,
        seed: 4,
        config: PipelineConfig::default(),
    }
}

#[test]
fn image_build_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    write_models(&input, 6);
    fs::copy(input.join("part0.json"), input.join("part9.json")).unwrap();
    fs::write(input.join("broken.json"), "{\"steps\": 3}").unwrap();

    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let s = build_dataset(&input, &a, &opts(DatasetMode::Image), &MockCaptioner).unwrap();
    build_dataset(&input, &b, &opts(DatasetMode::Image), &MockCaptioner).unwrap();
    assert_eq!(s.read, 8);
    assert_eq!(s.rejected.len(), 1);
    assert_eq!(s.rejected[0].0, "broken");
    assert_eq!(s.duplicates, 1);
    assert_eq!(s.records, 6);

    let ra = fs::read(a.join("records.jsonl")).unwrap();
    assert_eq!(ra, fs::read(b.join("records.jsonl")).unwrap());
    let records = read_jsonl(std::str::from_utf8(&ra).unwrap()).unwrap();
    for r in &records {
        let image = r.image.as_deref().unwrap();
        assert_eq!(image, format!("images/{}.png", r.id));
        assert_eq!(
            fs::read(a.join(image)).unwrap(),
            fs::read(b.join(image)).unwrap()
        );
        assert!(r.instruction().starts_with(IMAGE_PLACEHOLDER));
        let m = cadseq::sequence::parse_model(
            &fs::read_to_string(input.join(format!("{}.json", r.id))).unwrap(),
        )
        .unwrap();
        let expected = encode_model(&prepare_for_tokenization(&m).unwrap()).unwrap();
        assert_eq!(r.target(), expected.to_string());
    }
}

/// Serves one scripted response per request and records the request bodies.
fn scripted_server(script: Vec<(u16, &'static str)>) -> (String, Arc<Mutex<Vec<String>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/caption", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    thread::spawn(move || {
        for (status, body) in script {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream);
            let mut len = 0;
            let mut auth = String::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let lower = line.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                if lower.starts_with("authorization:") {
                    auth = line["authorization:".len()..].trim().to_string();
                }
                if line == "\r\n" || line.is_empty() {
                    break;
                }
            }
            let mut req = vec![0; len];
            reader.read_exact(&mut req).unwrap();
            log.lock()
                .unwrap()
                .push(format!("{auth} {}", String::from_utf8(req).unwrap()));
            let mut stream = reader.into_inner();
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
    });
    (url, seen)
}

#[test]
fn text_build_over_http() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    write_models(&input, 3);
    let (url, seen) = scripted_server(vec![
        (503, "{}"),
        (200, r#"{"caption": "a flat plate"}"#),
        (429, "{}"),
        (200, r#"{"filtered": true, "reason": "too simple"}"#),
        (400, "{}"),
    ]);
    let client = HttpCaptionClient::new(
        url,
        Some("k3y".into()),
        Box::new(UreqTransport::new(Duration::from_secs(10))),
    )
    .with_min_interval(Duration::ZERO)
    .with_sleeper(|_| {});
    let out = dir.path().join("out");
    let s = build_dataset(&input, &out, &opts(DatasetMode::Text), &client).unwrap();
    assert_eq!((s.records, s.filtered, s.uncaptioned), (1, 1, 1));

    let requests = seen.lock().unwrap();
    assert_eq!(requests.len(), 5);
    for r in requests.iter() {
        assert!(r.starts_with("Bearer k3y {"), "{r}");
        let body: serde_json::Value = serde_json::from_str(&r[r.find('{').unwrap()..]).unwrap();
        assert!(body["image_png_base64"]
            .as_str()
            .unwrap()
            .starts_with("iVBOR"));
        assert!(body["model_json"].as_str().unwrap().contains("steps"));
    }
    let records = read_jsonl(&fs::read_to_string(out.join("records.jsonl")).unwrap()).unwrap();
    assert_eq!(records[0].id, "part0");
    assert_eq!(records[0].instruction(), "a flat plate");
    assert!(records[0].image.is_none());
}
