use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use asphint::harness::bundled;
use asphint::llm::{
    classify_faults, propose_repair, FlPrompt, HttpBackend, LlmBackend, LlmConfig, LlmError, LlmRequest, MockBackend,
    RepairPrompt, ReplayBackend, Task,
};

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn enabled() -> LlmConfig {
    LlmConfig { enabled: true, ..LlmConfig::default() }
}

fn fl_prompt() -> FlPrompt {
    FlPrompt {
        problem: "vertex-cover".into(),
        reference_program: bundled::vertex_cover().reference.to_string(),
        incorrect_program: bundled::VERTEX_COVER_BUGGY.into(),
    }
}

fn repair_prompt() -> RepairPrompt {
    let fl = fl_prompt();
    RepairPrompt {
        problem: fl.problem,
        reference_program: fl.reference_program,
        incorrect_program: fl.incorrect_program,
        fl: vec![2],
        missing_lines: false,
    }
}

#[test]
fn prompts_are_byte_stable() {
    assert_eq!(fl_prompt().render(), golden("fl_prompt.txt"));
    assert_eq!(repair_prompt().render(), golden("repair_prompt.txt"));
    let body = serde_json::to_string_pretty(&LlmRequest::repair("asp-repair", &repair_prompt())).unwrap();
    assert_eq!(body + "\n", golden("repair_request.json"));
}

#[test]
fn mock_rule_scores_choice_lines() {
    let mock = MockBackend::new().with_rule(|r: &LlmRequest| {
        (r.task == Task::FaultLocalization).then(|| {
            let scores: Vec<&str> =
                r.incorrect_program.lines().map(|l| if l.contains('{') { "0.9" } else { "0.1" }).collect();
            format!("{} | missing=0", scores.join(" "))
        })
    });
    let c = classify_faults(&mock, &fl_prompt(), &enabled()).unwrap();
    assert_eq!(c.scores.scores, vec![0.1, 0.1, 0.9, 0.1]);
    assert_eq!(c.scores.faulty(), [2].into());
}

#[test]
fn mock_canned_repair() {
    let mock = MockBackend::new().with_sequence(Task::Repair, ["{ sel(X) : v(X) } k.", "not asp @@"]);
    let stmts = propose_repair(&mock, &repair_prompt(), &enabled()).unwrap();
    assert_eq!(stmts.len(), 1);
    assert_eq!(stmts[0].to_string(), "{ sel(X) : v(X) } k.");
    assert!(matches!(propose_repair(&mock, &repair_prompt(), &enabled()), Err(LlmError::MalformedResponse { .. })));
    assert!(matches!(propose_repair(&mock, &repair_prompt(), &enabled()), Err(LlmError::Unavailable(_))));
    assert_eq!(mock.call_count(Task::Repair), 3);
}

#[test]
fn replayed_fixture() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/llm");
    let c = classify_faults(&ReplayBackend::replay(&dir), &fl_prompt(), &enabled()).unwrap();
    assert_eq!(c.scores.scores, vec![0.02, 0.01, 0.97, 0.05]);
    assert!(!c.scores.missing_lines);
}

#[test]
fn recording_writes_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let live: Arc<dyn LlmBackend> = Arc::new(MockBackend::new().with_sequence(Task::FaultLocalization, ["0.5 | missing=1"]));
    let rec = ReplayBackend::recording(dir.path(), live);
    let first = classify_faults(&rec, &fl_prompt(), &enabled()).unwrap();
    let again = classify_faults(&ReplayBackend::replay(dir.path()), &fl_prompt(), &enabled()).unwrap();
    assert_eq!(first, again);
}

/// Serves one canned HTTP response and returns the request body it saw.
fn one_shot_server(status: &'static str, body: &'static str, delay: Duration) -> (String, std::thread::JoinHandle<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/complete", listener.local_addr().unwrap());
    let handle = std::thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream);
        let mut length = 0;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if line == "\r\n" {
                break;
            }
            if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                length = v.trim().parse().unwrap();
            }
        }
        let mut request = vec![0; length];
        reader.read_exact(&mut request).unwrap();
        std::thread::sleep(delay);
        let mut stream = reader.into_inner();
        let _ = write!(stream, "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}", body.len());
        String::from_utf8(request).unwrap()
    });
    (url, handle)
}

#[test]
fn http_round_trip() {
    let (url, server) = one_shot_server("200 OK", r#"{"completion":"0.1 0.1 0.8 0.1 | missing=0"}"#, Duration::ZERO);
    let backend = HttpBackend::new(url, Duration::from_secs(5)).unwrap();
    let c = classify_faults(&backend, &fl_prompt(), &enabled()).unwrap();
    assert_eq!(c.scores.faulty(), [2].into());
    let sent: LlmRequest = serde_json::from_str(&server.join().unwrap()).unwrap();
    assert_eq!(sent.task, Task::FaultLocalization);
    assert_eq!(sent.prompt, fl_prompt().render());
}

#[test]
fn http_errors_map_to_fallbacks() {
    let (url, server) = one_shot_server("503 Service Unavailable", "{}", Duration::ZERO);
    let backend = HttpBackend::new(url, Duration::from_secs(5)).unwrap();
    assert!(matches!(classify_faults(&backend, &fl_prompt(), &enabled()), Err(LlmError::Unavailable(_))));
    server.join().unwrap();

    let (url, _server) = one_shot_server("200 OK", "{}", Duration::from_millis(1500));
    let backend = HttpBackend::new(url, Duration::from_millis(300)).unwrap();
    assert_eq!(classify_faults(&backend, &fl_prompt(), &enabled()), Err(LlmError::Timeout));

    let backend = HttpBackend::new("http://127.0.0.1:9/none", Duration::from_secs(2)).unwrap();
    assert!(matches!(classify_faults(&backend, &fl_prompt(), &enabled()), Err(LlmError::Unavailable(_))));
}
