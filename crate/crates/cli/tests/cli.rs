use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn tree(name: &str) -> PathBuf {
    fixtures().join("trees").join(format!("{name}.cgel"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgel-kit"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn count_substr(text: &str, needle: &str) -> usize {
    text.matches(needle).count()
}

#[test]
fn validate_clean_file_is_silent() {
    let out = run(&["validate", tree("wh-movement").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty(), "{}", stdout(&out));
}

#[test]
fn validate_negative_fixture_fails() {
    let out = run(&["validate", fixtures().join("negative/R5.cgel").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains(" error R5 "), "{}", stdout(&out));
}

#[test]
fn warnings_as_errors_changes_exit_code() {
    let file = tree("doublegap");
    let out = run(&["validate", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(count_substr(&stdout(&out), " warning R12 "), 2);
    let out = run(&["-W", "validate", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_file_exits_2() {
    let out = run(&["validate", "/nonexistent/file.cgel"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn parse_error_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("broken.cgel");
    fs::write(&file, "(Clause :Head (VP :Head (V :t \"go\"))\n").unwrap();
    let out = run(&["validate", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.cgel:") && err.contains("error parse"), "{err}");
}

#[test]
fn stats_counts_match_source_text() {
    let file = tree("wh-movement");
    let text = fs::read_to_string(&file).unwrap();
    // Fused functions contain a hyphen; gaps are GAP nodes.
    let fused = text
        .split(':')
        .skip(1)
        .filter(|s| {
            let word: String = s.chars().take_while(|c| !c.is_whitespace()).collect();
            word.chars().next().is_some_and(char::is_uppercase) && word.contains('-')
        })
        .count();
    let gaps = count_substr(&text, "/ GAP");
    assert_eq!((fused, gaps), (2, 2));

    let out = run(&["stats", "--tsv", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let tsv = stdout(&out);
    assert!(tsv.lines().any(|l| l == format!("fused\t{fused}")), "{tsv}");
    assert!(tsv.lines().any(|l| l == format!("gaps\t{gaps}")), "{tsv}");
}

#[test]
fn fmt_check_accepts_canonical_and_rejects_reindented() {
    let file = tree("wh-movement");
    let out = run(&["fmt", "--check", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let messy = dir.path().join("messy.cgel");
    let text = fs::read_to_string(&file).unwrap().replace("    ", "  ");
    fs::write(&messy, &text).unwrap();
    let out = run(&["fmt", "--check", messy.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not canonically formatted"));

    let out = run(&["fmt", "--write", messy.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&messy).unwrap(), fs::read_to_string(&file).unwrap());
}

#[test]
fn directory_output_is_sorted_and_deterministic() {
    let dir = fixtures().join("trees");
    let first = run(&["sent-check", dir.to_str().unwrap()]);
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    let a = run(&["fmt", dir.to_str().unwrap()]);
    let b = run(&["fmt", dir.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    let first_tree = stdout(&a).lines().next().unwrap_or_default().to_string();
    let expected = fs::read_to_string(dir.join("120M.cgel")).unwrap();
    assert_eq!(first_tree, expected.lines().next().unwrap());
}

#[test]
fn render_writes_one_file_per_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "render",
        "-o",
        dir.path().to_str().unwrap(),
        tree("wh-movement").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let tex = fs::read_to_string(dir.path().join("wh-movement-1.tex")).unwrap();
    let golden = fs::read_to_string(fixtures().join("../golden/wh-movement.tex")).unwrap();
    assert_eq!(tex, golden);
}
