mod common;

use std::path::Path;
use std::process::Command;

use common::*;
use ioa_calculus::channel::{check_well_formed, ProtocolOptions};
use ioa_calculus::dsl::{parse, Model};
use ioa_calculus::system::parse_num;

fn ioa(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ioa"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn corpus(file: &str) -> String {
    corpus_dir().join(file).display().to_string()
}

fn path(dir: &Path, file: &str) -> String {
    dir.join(file).display().to_string()
}

#[test]
fn check_passes_on_buyer_seller() {
    let (code, out, _) = ioa(&[
        "check",
        &corpus("buyer_seller.ioa"),
        "--target",
        "order_protocol",
        "--which",
        "all",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("verdict: pass"));
}

#[test]
fn check_reports_deadlock_witness() {
    let dir = tempfile::tempdir().unwrap();
    let report = path(dir.path(), "r.json");
    let (code, out, _) = ioa(&[
        "check",
        &corpus("buyer_seller_deadlock.ioa"),
        "--target",
        "order_protocol",
        "--which",
        "all",
        "--report",
        &report,
    ]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("deadlock"), "{out}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["verdict"], "fail");
}

#[test]
fn capped_check_is_unknown() {
    let (code, out, _) = ioa(&[
        "check",
        &corpus("network.ioa"),
        "--target",
        "order_protocol",
        "--cap",
        "2",
    ]);
    assert_eq!(code, 3);
    assert!(out.contains("unknown (capped)"), "{out}");
}

#[test]
fn unknown_target_is_a_usage_error() {
    let (code, _, err) = ioa(&["check", &corpus("buyer_seller.ioa"), "--target", "nobody"]);
    assert_eq!(code, 2);
    assert!(err.contains("nobody"), "{err}");
}

#[test]
fn parse_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.ioa");
    std::fs::write(&bad, "format 1;\nautomaton A {\n  initial ;\n}\n").unwrap();
    let (code, _, err) = ioa(&["check", &bad, "--target", "A"]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.ioa:3:"), "{err}");
}

#[test]
fn seq_matches_function_composition() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "seq.ioa");
    let (code, stdout, err) = ioa(&[
        "compose",
        &corpus("systems.ioa"),
        "--op",
        "seq",
        "-o",
        "inc",
        "-o",
        "dbl",
        "--out",
        &out,
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("Compositional"));
    let text = std::fs::read_to_string(&out).unwrap();
    let composed = Model::from_document(&parse(&text).unwrap()).unwrap();
    let c = composed.systems.values().next().unwrap();
    let m = model("systems.ioa");
    let (inc, dbl) = (&m.systems["inc"], &m.systems["dbl"]);
    for ((_, x), (_, o)) in &c.table {
        let Some(x) = x else { continue };
        let want = apply(inc, x.as_str()).and_then(|y| apply(dbl, &y));
        assert_eq!(o.as_ref().map(|o| o.to_string()), want);
    }
}

#[test]
fn incompatible_seq_names_the_alphabet() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = ioa(&[
        "compose",
        &corpus("systems.ioa"),
        "--op",
        "seq",
        "-o",
        "parity",
        "-o",
        "inc",
        "--out",
        &path(dir.path(), "x.ioa"),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("alphabet"), "{err}");
    assert!(!dir.path().join("x.ioa").exists());
}

#[test]
fn loop_note_records_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "loop.ioa");
    let (code, stdout, err) = ioa(&[
        "compose",
        &corpus("systems.ioa"),
        "--op",
        "loop",
        "-o",
        "tri_body",
        "--n",
        "3",
        "--out",
        &out,
    ]);
    assert_eq!(code, 0, "{err}");
    let note = stdout
        .lines()
        .find(|l| l.contains("value"))
        .expect("value line");
    let value = note.rsplit(' ').next().and_then(|v| parse_num(&v.into()));
    assert_eq!(value, Some((1..=3).sum()));
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("# "));
}

#[test]
fn while_note_records_delta() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, err) = ioa(&[
        "compose",
        &corpus("systems.ioa"),
        "--op",
        "while",
        "-o",
        "g3",
        "--budget",
        "10",
        "--out",
        &path(dir.path(), "w.ioa"),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("δ=3"), "{stdout}");
    let (code, stdout, _) = ioa(&[
        "compose",
        &corpus("systems.ioa"),
        "--op",
        "while",
        "-o",
        "g5",
        "--budget",
        "2",
        "--out",
        &path(dir.path(), "w2.ioa"),
    ]);
    assert_eq!(code, 3, "{stdout}");
}

#[test]
fn simulate_ping_pong_alternates_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let (t1, t2) = (path(dir.path(), "t1.txt"), path(dir.path(), "t2.txt"));
    for t in [&t1, &t2] {
        let (code, out, err) = ioa(&[
            "simulate",
            &corpus("ping_pong.ioa"),
            "--target",
            "ping_pong",
            "--seed",
            "7",
            "--steps",
            "20",
            "--trace",
            t,
        ]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("acceptance:"));
        assert!(out.contains("fairness"));
    }
    let a = std::fs::read_to_string(&t1).unwrap();
    assert_eq!(a, std::fs::read_to_string(&t2).unwrap());
    let senders: Vec<char> = a
        .lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| l.split('|').nth(3))
        .filter(|o| *o != "eps")
        .map(|o| o.chars().next().unwrap())
        .collect();
    assert!(senders.len() >= 2);
    assert!(senders.windows(2).all(|w| w[0] != w[1]), "{senders:?}");
}

#[test]
fn scripted_illegal_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let script = path(dir.path(), "s.txt");
    std::fs::write(&script, "eps\nrx.q\n").unwrap();
    let (code, _, err) = ioa(&[
        "simulate",
        &corpus("ping_pong.ioa"),
        "--target",
        "A",
        "--script",
        &script,
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("input rejected at step 1"), "{err}");
}

#[test]
fn coordinate_apply_and_synthesize() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "gate.ioa");
    let (code, stdout, err) = ioa(&[
        "coordinate",
        "apply",
        &corpus("gatekeeper.ioa"),
        "--rules",
        "gate",
        "--out",
        &out,
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("removed"));
    assert!(parse(&std::fs::read_to_string(&out).unwrap()).is_ok());
    let syn = path(dir.path(), "syn.ioa");
    let (code, _, err) = ioa(&[
        "coordinate",
        "synthesize",
        &corpus("gatekeeper.ioa"),
        "--rules",
        "gate",
        "--out",
        &syn,
    ]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&syn).unwrap();
    assert!(text.contains("gate_synthesized"), "{text}");
}

#[test]
fn export_toggle_and_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let dot = path(dir.path(), "toggle.dot");
    assert_eq!(
        ioa(&[
            "export",
            &corpus("toggle.ioa"),
            "--target",
            "toggle",
            "--dot",
            &dot
        ])
        .0,
        0
    );
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    let nodes = text
        .lines()
        .filter(|l| l.trim_start().starts_with('n') && l.contains("shape"))
        .count();
    assert_eq!(nodes, 2);

    let dot = path(dir.path(), "pp.dot");
    assert_eq!(
        ioa(&[
            "export",
            &corpus("ping_pong.ioa"),
            "--target",
            "ping_pong",
            "--dot",
            &dot
        ])
        .0,
        0
    );
    let text = std::fs::read_to_string(&dot).unwrap();
    let p = model("ping_pong.ioa")
        .protocol("ping_pong", ProtocolOptions::default())
        .unwrap();
    let nodes = text
        .lines()
        .filter(|l| l.contains("shape=") && l.trim_start().starts_with('n'))
        .count();
    let edges = text
        .lines()
        .filter(|l| l.contains("->") && l.trim_start().starts_with('n'))
        .count();
    assert_eq!(nodes, check_well_formed(&p).explored);
    assert_eq!(edges, p.cbr.transitions.len());
}

#[test]
fn export_missing_target_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = ioa(&[
        "export",
        &corpus("toggle.ioa"),
        "--target",
        "nothing",
        "--dot",
        &path(dir.path(), "x.dot"),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn export_to_unwritable_path_is_an_io_error() {
    let (code, _, _) = ioa(&[
        "export",
        &corpus("toggle.ioa"),
        "--target",
        "toggle",
        "--dot",
        "/nonexistent/dir/x.dot",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn uncoordinated_target_refuses_to_run() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(corpus("gatekeeper.ioa")).unwrap();
    let start = text.find("rules gate").unwrap();
    let file = path(dir.path(), "open.ioa");
    std::fs::write(
        &file,
        format!("{}rules gate for A, B {{\n}}\n", &text[..start]),
    )
    .unwrap();
    let (code, _, err) = ioa(&["simulate", &file, "--target", "gate"]);
    assert_eq!(code, 1);
    assert!(err.contains("state (pending|quiet)"), "{err}");
}
