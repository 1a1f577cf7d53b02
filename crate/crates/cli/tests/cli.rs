use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use reqsynth::corpus::to_canonical_json;
use reqsynth::recommender::write_instances;
use reqsynth::synth::{separable_training_set, reference_corpus};
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_reqsynth"));
    cmd.env_remove("REQSYNTH_API_KEY");
    cmd
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).output().expect("binary runs")
}

fn run_with_key(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).env("REQSYNTH_API_KEY", "secret").current_dir(cwd).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

/// The single run directory under `out`.
fn only_run(out: &Path) -> PathBuf {
    let dirs: Vec<PathBuf> = fs::read_dir(out).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs.into_iter().next().unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.display().to_string()
}

fn synthetic_corpus(dir: &Path, n: usize, seed: u64) -> String {
    let reqs: Vec<_> = reference_corpus(n, seed).into_iter().map(|l| l.requirement).collect();
    write(dir, "corpus.json", &to_canonical_json(&reqs))
}

const FLIGHT_PLAN: &str = "[Arg2][Arg0]Flight plan[Arg0][shall][V][Arg1][ArgM-BNF]UAV[ArgM-BNF]";

fn flight_plan_features(dir: &Path) -> String {
    write(dir, "fp.jsonl", "{\"tokens\":[{\"text\":\"Flight plan\",\"role\":1},{\"text\":\"UAV\",\"role\":4}]}\n")
}

#[test]
fn induce_recovers_the_reference_templates() {
    let dir = TempDir::new().unwrap();
    let corpus = synthetic_corpus(dir.path(), 220, 3);
    let o = run(&["induce", "--corpus", &corpus, "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "1: [Arg2]*[Arg0][shall][V][Arg1][variable part]*\n2: [Arg2]*[Arg1][shall][V][variable part]*\n"
    );
    let run_dir = only_run(&dir.path().join("out"));
    assert!(run_dir.file_name().unwrap().to_string_lossy().ends_with("-seed0"));
    assert!(run_dir.join("config.toml").exists());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(run_dir.join("induction.json")).unwrap()).unwrap();
    assert_eq!(report["uncovered"].as_array().unwrap().len(), 0);
}

#[test]
fn induce_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let corpus = fixture("requirements.json");
    for out in ["a", "b"] {
        assert!(run(&["induce", "--corpus", &corpus, "--out", out], dir.path()).status.success());
    }
    let (a, b) = (only_run(&dir.path().join("a")), only_run(&dir.path().join("b")));
    for name in ["templates.txt", "induction.json", "dropped.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn induce_rejects_empty_input() {
    let dir = TempDir::new().unwrap();
    let empty = write(dir.path(), "empty.json", "");
    assert_eq!(run(&["induce", "--corpus", &empty, "--out", "out"], dir.path()).status.code(), Some(2));
    let none = write(dir.path(), "none.json", "{\"requirements\": []}");
    assert_eq!(run(&["induce", "--corpus", &none, "--out", "out"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["induce", "--out", "out"], dir.path()).status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let corpus = fixture("requirements.json");
    let config = write(dir.path(), "c.toml", "seed = 5\n[induce]\nmin_support = 3\n[train]\nepochs = 4\n");
    let o = run(&["induce", "--config", &config, "--corpus", &corpus, "--seed", "7", "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let run_dir = only_run(&dir.path().join("out"));
    assert!(run_dir.to_string_lossy().ends_with("-seed7"));
    let snapshot = fs::read_to_string(run_dir.join("config.toml")).unwrap();
    assert!(snapshot.contains("seed = 7"), "{snapshot}");
    assert!(snapshot.contains("min_support = 3"));
    assert!(snapshot.contains("epochs = 4"));

    let bad = write(dir.path(), "bad.toml", "[train]\nepoch = 4\n");
    assert_eq!(run(&["induce", "--config", &bad, "--corpus", &corpus], dir.path()).status.code(), Some(3));
    let bad = write(dir.path(), "bad2.toml", "[sampler]\nmin_tokens = 1\n");
    assert_eq!(run(&["induce", "--config", &bad, "--corpus", &corpus], dir.path()).status.code(), Some(3));
    let missing = dir.path().join("nope.toml").display().to_string();
    assert_eq!(run(&["induce", "--config", &missing, "--corpus", &corpus], dir.path()).status.code(), Some(3));
}

fn instances_file(dir: &Path, n: usize, seed: u64) -> String {
    let mut buf = Vec::new();
    write_instances(&mut buf, &separable_training_set(n, seed)).unwrap();
    write(dir, "instances.jsonl", std::str::from_utf8(&buf).unwrap())
}

fn accuracy_line(out: &str, task: &str) -> (f64, f64) {
    let line = out
        .lines()
        .find(|l| l.starts_with(&format!("{task} accuracy")))
        .unwrap_or_else(|| panic!("no {task} line in {out}"));
    let nums: Vec<f64> = line.split_whitespace().filter_map(|w| w.parse().ok()).collect();
    (nums[0], nums[1])
}

#[test]
fn train_is_deterministic_and_beats_fallback() {
    let dir = TempDir::new().unwrap();
    let instances = instances_file(dir.path(), 150, 2);
    let a = run(&["train", "--instances", &instances, "--seed", "4", "--out", "a"], dir.path());
    let b = run(&["train", "--instances", &instances, "--seed", "4", "--out", "b"], dir.path());
    assert!(a.status.success(), "{}", stderr(&a));
    assert!(b.status.success(), "{}", stderr(&b));
    let model_a = fs::read(only_run(&dir.path().join("a")).join("model.json")).unwrap();
    let model_b = fs::read(only_run(&dir.path().join("b")).join("model.json")).unwrap();
    assert_eq!(model_a, model_b);
    for task in ["task1", "task2"] {
        let (model, fallback) = accuracy_line(&stdout(&a), task);
        assert!(model >= fallback, "{task}: {model} < {fallback}");
    }
}

#[test]
fn train_reports_the_malformed_line() {
    let dir = TempDir::new().unwrap();
    let good = "{\"tokens\":[{\"text\":\"a\",\"role\":1},{\"text\":\"b\",\"role\":2}],\"template_id\":1,\"tags\":[\"ARG0\",\"V\"]}";
    let file = write(dir.path(), "i.jsonl", &format!("{good}\n{{not json\n"));
    let o = run(&["train", "--instances", &file, "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn train_from_corpus_writes_instances_and_history() {
    let dir = TempDir::new().unwrap();
    let corpus = synthetic_corpus(dir.path(), 60, 1);
    let o = run(&["train", "--corpus", &corpus, "--epochs", "20", "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let run_dir = only_run(&dir.path().join("out"));
    assert_eq!(fs::read_to_string(run_dir.join("instances.jsonl")).unwrap().lines().count(), 60);
    let history = fs::read_to_string(run_dir.join("history.csv")).unwrap();
    assert!(history.starts_with("epoch,task1,task2\n"));
    assert_eq!(history.lines().count(), 22);
}

#[test]
fn recommend_forced_tags_and_fallback() {
    let dir = TempDir::new().unwrap();
    let fp = flight_plan_features(dir.path());
    let o = run(&["recommend", "--tokens", &fp, "--force-tags", "ARG0,ARGM-BNF", "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), format!("{FLIGHT_PLAN}\n"));
    assert!(stderr(&o).contains("fallback"));

    let o = run(
        &["recommend", "--tokens", &fp, "--force-tags", "ARG0,ARGM-BNF", "--prune-empty-slots", "--out", "out"],
        dir.path(),
    );
    assert_eq!(stdout(&o), "[Arg0]Flight plan[Arg0][shall][V][Arg1][ArgM-BNF]UAV[ArgM-BNF]\n");

    let bad = write(dir.path(), "bad.jsonl", "{\"tokens\":[{\"text\":\"x\",\"role\":7}]}\n");
    assert_eq!(run(&["recommend", "--tokens", &bad, "--out", "out"], dir.path()).status.code(), Some(2));
    let o = run(&["recommend", "--tokens", &fp, "--force-tags", "ARG0", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["recommend", "--tokens", &fp, "--template", "9", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn recommend_with_a_trained_model() {
    let dir = TempDir::new().unwrap();
    let instances = instances_file(dir.path(), 600, 11);
    let o = run(&["train", "--instances", &instances, "--out", "m"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let model = only_run(&dir.path().join("m")).join("model.json").display().to_string();
    let fp = flight_plan_features(dir.path());
    let o = run(&["recommend", "--tokens", &fp, "--model", &model, "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), format!("{FLIGHT_PLAN}\n"));
    assert!(!stderr(&o).contains("fallback"));
}

#[test]
fn generate_with_the_offline_realizer() {
    let dir = TempDir::new().unwrap();
    let features = write(
        dir.path(),
        "f.jsonl",
        "{\"id\":\"a\",\"tokens\":[{\"text\":\"The system\",\"role\":1},{\"text\":\"display\",\"role\":2},{\"text\":\"alarm status\",\"role\":3}]}\n",
    );
    let o = run(&["generate", "--tokens", &features, "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "The system shall display alarm status.\n");

    let fp = flight_plan_features(dir.path());
    let o = run(&["generate", "--tokens", &fp, "--force-tags", "ARG0,ARGM-BNF", "--out", "strict"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = run(
        &["generate", "--tokens", &fp, "--force-tags", "ARG0,ARGM-BNF", "--permissive", "--out", "loose"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let draft = stdout(&o);
    assert!(draft.starts_with("Flight plan shall "), "{draft}");
    assert!(draft.contains("UAV"));
}

#[test]
fn generate_from_corpus_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let corpus = fixture("requirements.json");
    for out in ["a", "b"] {
        let o = run(
            &["generate", "--corpus", &corpus, "--sampler", "t3", "--seed", "9", "--permissive", "--out", out],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (a, b) = (only_run(&dir.path().join("a")), only_run(&dir.path().join("b")));
    for name in ["drafts.jsonl", "features.jsonl", "references.jsonl", "skipped.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    assert!(fs::read_to_string(a.join("references.jsonl")).unwrap().lines().count() >= 15);
}

#[test]
fn llm_mode_without_credential_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let fp = flight_plan_features(dir.path());
    let config = write(dir.path(), "c.toml", "[llm]\nendpoint = \"http://127.0.0.1:9/v1\"\nmodel_name = \"m\"\n");
    let o = run(&["generate", "--tokens", &fp, "--mode", "llm", "--config", &config, "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("REQSYNTH_API_KEY"), "{}", stderr(&o));
}

/// Serves completions that echo the prompt's token line, after failing the
/// first `failures` requests with 503.
fn mock_endpoint(failures: usize) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/completions", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = Arc::clone(&hits);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { break };
            let n = counter.fetch_add(1, Ordering::SeqCst);
            thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut length = 0;
                let mut auth = String::new();
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap() == 0 || line == "\r\n" {
                        break;
                    }
                    let lower = line.to_ascii_lowercase();
                    if let Some(v) = lower.strip_prefix("content-length:") {
                        length = v.trim().parse().unwrap();
                    }
                    if lower.starts_with("authorization:") {
                        auth = line.trim().to_string();
                    }
                }
                let mut body = vec![0; length];
                reader.read_exact(&mut body).unwrap();
                let request: serde_json::Value = serde_json::from_slice(&body).unwrap();
                let (status, payload) = if n < failures {
                    ("503 Service Unavailable", "{}".to_string())
                } else if !auth.ends_with("Bearer secret") {
                    ("401 Unauthorized", "{}".to_string())
                } else {
                    let tokens = request["prompt"].as_str().unwrap().lines().nth(1).unwrap().to_string();
                    let text = format!("Echo {tokens}. A second sentence.");
                    ("200 OK", serde_json::json!({ "choices": [{ "text": text }] }).to_string())
                };
                let response = format!(
                    "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
                    payload.len()
                );
                let _ = stream.write_all(response.as_bytes());
            });
        }
    });
    (url, hits)
}

fn llm_config(dir: &Path, url: &str) -> String {
    write(
        dir,
        "llm.toml",
        &format!("[llm]\nendpoint = \"{url}\"\nmodel_name = \"mock\"\nbackoff_base_secs = 0.01\nmax_in_flight = 3\n"),
    )
}

fn drafts(run_dir: &Path) -> Vec<serde_json::Value> {
    fs::read_to_string(run_dir.join("drafts.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn llm_batch_keeps_input_order() {
    let dir = TempDir::new().unwrap();
    let (url, hits) = mock_endpoint(0);
    let config = llm_config(dir.path(), &url);
    let lines: String = ["alpha", "beta", "gamma"]
        .iter()
        .map(|w| format!("{{\"id\":\"{w}\",\"tokens\":[{{\"text\":\"{w}\",\"role\":1}},{{\"text\":\"log\",\"role\":2}}]}}\n"))
        .collect();
    let features = write(dir.path(), "f.jsonl", &lines);
    let o = run_with_key(&["generate", "--tokens", &features, "--mode", "llm", "--config", &config, "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(hits.load(Ordering::SeqCst), 3);
    let drafts = drafts(&only_run(&dir.path().join("out")));
    let ids: Vec<&str> = drafts.iter().map(|d| d["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["alpha", "beta", "gamma"]);
    for d in &drafts {
        let text = d["text"].as_str().unwrap();
        assert!(text.starts_with(&format!("Echo {}, 1", d["id"].as_str().unwrap())), "{text}");
        assert!(!text.contains("second"), "{text}");
        assert_eq!(d["provenance"]["mode"], "llm");
        assert_eq!(d["provenance"]["deterministic"], false);
        assert_eq!(d["provenance"]["attempts"], 1);
    }
}

#[test]
fn llm_retries_transient_failures() {
    let dir = TempDir::new().unwrap();
    let (url, hits) = mock_endpoint(2);
    let config = llm_config(dir.path(), &url);
    let fp = flight_plan_features(dir.path());
    let o = run_with_key(&["generate", "--tokens", &fp, "--mode", "llm", "--config", &config, "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(hits.load(Ordering::SeqCst), 3);
    let drafts = drafts(&only_run(&dir.path().join("out")));
    assert_eq!(drafts[0]["provenance"]["attempts"], 3);
    assert!(drafts[0]["text"].as_str().unwrap().contains("Flight plan, 1, UAV, 4"));
}

#[test]
fn llm_gives_up_after_max_attempts() {
    let dir = TempDir::new().unwrap();
    let (url, _) = mock_endpoint(100);
    let config = llm_config(dir.path(), &url);
    let fp = flight_plan_features(dir.path());
    let o = run_with_key(&["generate", "--tokens", &fp, "--mode", "llm", "--config", &config, "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(only_run(&dir.path().join("out")).join("failures.jsonl").exists());
}

fn jsonl(dir: &Path, name: &str, rows: &[(&str, &str)]) -> String {
    let lines: String = rows
        .iter()
        .map(|(id, text)| format!("{}\n", serde_json::json!({ "id": id, "text": text })))
        .collect();
    write(dir, name, &lines)
}

const REFERENCES: [(&str, &str); 6] = [
    ("r1", "The system shall display the alarm status on the console."),
    ("r2", "The operator shall acknowledge every alarm within 5 seconds."),
    ("r3", "Audit logs shall be archived every night."),
    ("r4", "The pump shall stop when the tank is full."),
    ("r5", "The user shall insert a smart card to sign an order."),
    ("r6", "The controller shall record the valve position."),
];

#[test]
fn evaluate_self_scores_one_hundred() {
    let dir = TempDir::new().unwrap();
    let refs = jsonl(dir.path(), "refs.jsonl", &REFERENCES);
    let o = run(&["evaluate", "--dataset", &refs, "--system", &format!("gold={refs}"), "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("gold,all,6,100.00,100.00,100.00,"), "{row}");
    let csv = fs::read_to_string(only_run(&dir.path().join("out")).join("gold.metrics.csv")).unwrap();
    assert!(csv.contains("# system=gold"));
}

#[test]
fn evaluate_two_systems_with_folds() {
    let dir = TempDir::new().unwrap();
    let refs = jsonl(dir.path(), "refs.jsonl", &REFERENCES);
    let sys = jsonl(
        dir.path(),
        "sys.jsonl",
        &[
            ("r1", "The system shall display the alarm status."),
            ("r2", "The operator shall acknowledge alarms within 5 seconds."),
            ("r3", "Audit logs shall be archived nightly."),
            ("r4", "The pump shall stop."),
            ("r5", "The user shall insert a card to sign an order."),
            ("r6", "The controller shall record the position of the valve."),
        ],
    );
    let o = run(
        &[
            "evaluate", "--dataset", &refs, "--system", &format!("a={sys}"), "--system", &format!("b={sys}"), "--k", "3",
            "--out", "out",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let run_dir = only_run(&dir.path().join("out"));
    let stats: Vec<serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(run_dir.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats.len(), 5);
    for s in &stats {
        let p = s["p_value"].as_f64().unwrap();
        assert!((p - 0.5).abs() < 0.1, "{s}");
        assert!(s["p_holm"].as_f64().unwrap() >= p);
    }
    let summary = fs::read_to_string(run_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 4);
    let fold_sizes: Vec<&str> = summary.lines().filter(|l| l.starts_with("a,") && !l.starts_with("a,all")).collect();
    assert!(fold_sizes.iter().all(|l| l.split(',').nth(2) == Some("2")), "{summary}");
    assert!(run_dir.join("a.fold2.metrics.json").exists());

    let partial = jsonl(dir.path(), "partial.jsonl", &[("r1", "x")]);
    let o = run(&["evaluate", "--dataset", &refs, "--system", &partial, "--out", "out2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
