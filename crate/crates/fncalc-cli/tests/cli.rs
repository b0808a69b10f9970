//! End-to-end tests of the input language and the binary's exit-code
//! contract.

use std::io::Write;
use std::process::{Command, Stdio};

use fncalc::poly::{rat, ratio};
use fncalc_cli::parser::{parse_document, Decl};
use fncalc_cli::printer::{document_text, rational_text};

fn parse_ok(text: &str) -> fncalc_cli::parser::Document {
    parse_document(text).expect("document should parse")
}

#[test]
fn patch_line_parses() {
    let doc = parse_ok("patch (x1 x2 | y1 y2) jet 3\n");
    let split = doc.split.expect("patch present");
    assert_eq!(split.n_base(), 2);
    assert_eq!(split.n_vars(), 4);
    assert_eq!(split.jet_order(), 3);
}

#[test]
fn vform_example_parses() {
    let doc = parse_ok(
        "patch (x1 x2 | y1 y2) jet 3\n\
         vform J = [x1]->y1 (1) ; [y1]->x1 (-1) ; [x2]->y2 (1) ; [y2]->x2 (-1)\n",
    );
    match doc.lookup("J") {
        Some(Decl::VForm(j)) => {
            assert_eq!(j.degree(), 1);
            assert_eq!(j.terms().count(), 4);
        }
        other => panic!("expected a vform, got {other:?}"),
    }
}

#[test]
fn zero_denominator_is_a_parse_error() {
    let err = parse_document(
        "patch (x1 | y1) jet 2\n\
         sform a deg 0 = [] (1/0)\n",
    )
    .unwrap_err();
    assert!(err.to_string().contains("zero denominator"), "{err}");
    assert_eq!(err.line, 2);
}

#[test]
fn unary_minus_binds_looser_than_power() {
    let doc = parse_ok(
        "patch (x1 | y1) jet 2\n\
         sform a deg 0 = [] (-x1^2 + 1)\n",
    );
    let a = match doc.lookup("a") {
        Some(Decl::SForm(f)) => f.clone(),
        other => panic!("expected an sform, got {other:?}"),
    };
    // at x1 = 2 the value must be -3, not (−2)^2 + 1 = 5
    let split = doc.split.unwrap();
    let p = fncalc::poly::Point::new(&split, vec![rat(2), rat(0)]).unwrap();
    assert_eq!(a.eval_on_vectors(&p, &[]).unwrap(), rat(-3));
}

#[test]
fn rationals_print_in_lowest_terms() {
    assert_eq!(rational_text(&ratio(-3, 6)), "-1/2");
    assert_eq!(rational_text(&ratio(4, 2)), "2");
}

#[test]
fn printing_is_idempotent_on_parsed_documents() {
    let text = "patch (x1 x2 | y1 y2) jet 4\n\
                metric g = diag (1 1 1 1)\n\
                sform om deg 2 = [x1 x2] (3) ; [x1 y1] (-1/2*x2 + 1)\n\
                vform K = [x1]->y1 (x1*x2 - y2^2) ; [y2]->x2 (2/3)\n\
                section s = y1 (x1^2) ; y2 (-x2)\n\
                square-zero K\n\
                hat om g\n";
    let doc = parse_ok(text);
    let canonical = document_text(&doc);
    let doc2 = parse_ok(&canonical);
    assert_eq!(document_text(&doc2), canonical);
    assert_eq!(doc.decls, doc2.decls);
    assert_eq!(doc.commands, doc2.commands);
}

// --- binary exit codes -----------------------------------------------------

fn run_stdin(input: &str, extra: &[&str]) -> (Option<i32>, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fncalc"))
        .arg("-")
        .args(extra)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn binary");
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(input.as_bytes())
        .expect("write stdin");
    let out = child.wait_with_output().expect("wait for binary");
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn exit_zero_on_success() {
    let (code, stdout, _) = run_stdin(
        "patch (x1 x2 | y1 y2) jet 4\n\
         vform J = [x1]->x2 (1) ; [x2]->x1 (-1) ; [y1]->y2 (1) ; [y2]->y1 (-1)\n\
         square-zero J\n",
        &[],
    );
    assert_eq!(code, Some(0), "{stdout}");
    assert!(stdout.contains("RESULT square-zero pass"), "{stdout}");
}

#[test]
fn exit_one_on_false_verdict() {
    // [K, K] != 0 for K = y1 dx1 (x) d/dx1 on the split patch
    let (code, stdout, _) = run_stdin(
        "patch (x1 | y1) jet 4\n\
         vform K = [x1]->x1 (y1)\n\
         square-zero K\n",
        &[],
    );
    assert_eq!(code, Some(1), "{stdout}");
    assert!(stdout.contains("RESULT square-zero fail"), "{stdout}");
}

#[test]
fn exit_two_on_parse_error() {
    let (code, _, stderr) = run_stdin("patch (x1 | y1) jet\n", &[]);
    assert_eq!(code, Some(2), "{stderr}");
    assert!(stderr.contains("parse error"), "{stderr}");
}

#[test]
fn exit_two_on_undeclared_name() {
    let (code, _, stderr) = run_stdin(
        "patch (x1 | y1) jet 2\nsquare-zero nothere\n",
        &[],
    );
    assert_eq!(code, Some(2), "{stderr}");
    assert!(stderr.contains("nothere"), "{stderr}");
}

#[test]
fn json_result_lines_are_valid_json() {
    let (code, stdout, _) = run_stdin(
        "patch (x1 x2 | y1 y2) jet 4\n\
         vform J = [x1]->x2 (1) ; [x2]->x1 (-1) ; [y1]->y2 (1) ; [y2]->y1 (-1)\n\
         square-zero J\n\
         vdata-validate J 2\n",
        &["--format", "json"],
    );
    assert_eq!(code, Some(0), "{stdout}");
    let mut seen = 0;
    for line in stdout.lines() {
        if let Some(rest) = line.strip_prefix("RESULT ") {
            let v: serde_json::Value = serde_json::from_str(rest)
                .unwrap_or_else(|e| panic!("RESULT payload is not JSON ({e}): {rest}"));
            assert!(v.is_object(), "expected an object payload: {rest}");
            seen += 1;
        }
    }
    assert_eq!(seen, 2, "{stdout}");
}

#[test]
fn missing_fixture_fails_closed() {
    let (code, stdout, stderr) = run_stdin("fixture does-not-exist\n", &[]);
    assert_eq!(code, Some(2), "{stdout}{stderr}");
}
