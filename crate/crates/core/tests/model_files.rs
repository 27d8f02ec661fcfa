use cartanext::library;
use cartanext::parser::{emit_model, parse_model, parse_model_str, DiagnosticKind, ModelSource};
use cartanext::validate::validate_model;
use proptest::prelude::*;

#[test]
fn bundled_files_match_builders() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("models");
    for (name, text) in library::generated_files() {
        let on_disk = std::fs::read_to_string(dir.join(&name)).unwrap();
        assert_eq!(on_disk, text, "{name} is stale; regenerate with `cartanext bundle --out models`");
    }
}

#[test]
fn bundled_models_validate() {
    for m in library::bundled_models().unwrap() {
        let report = validate_model(&m);
        assert!(report.is_valid(), "{}: {:?}", m.name(), report.first_failure());
    }
}

#[test]
fn bundled_packages_parse() {
    let packages = library::bundled_packages().unwrap();
    assert_eq!(packages.len(), 3);
}

#[test]
fn round_trip_is_identity() {
    for m in library::builtin_models() {
        let text = emit_model(&m).text;
        let back = parse_model_str(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(emit_model(&back).text, text);
    }
}

#[test]
fn table_line_order_does_not_matter() {
    // declarations fix the indices; table lines may come in any order
    let m = library::s3_tube(3);
    let text = emit_model(&m).text;
    let (fixed, mut tables): (Vec<&str>, Vec<&str>) =
        text.lines().partition(|l| l.starts_with("model") || l.starts_with("basis") || l.starts_with("unit") || l.starts_with("generator"));
    tables.reverse();
    let shuffled = fixed.into_iter().chain(tables).collect::<Vec<_>>().join("\n");
    assert_eq!(parse_model_str(&shuffled).unwrap(), m);
}

#[test]
fn diagnostics_carry_kinds() {
    let cases = [
        ("model a\nbasis one deg 0\nbasis one deg 0\nunit one\n", DiagnosticKind::DuplicateName),
        ("model a\nbasis one deg 0\nunit one\nd one -> 1 two\n", DiagnosticKind::UnknownName),
        ("model a\nbasis one deg 0\nbasis x deg 1\nunit one\nd x -> 1/0 one\n", DiagnosticKind::MalformedRational),
        ("model a\nbasis one deg zero\nunit one\n", DiagnosticKind::Syntax),
    ];
    for (text, kind) in cases {
        let diags = parse_model(&ModelSource::inline(text)).unwrap_err();
        assert!(diags.iter().any(|d| d.kind == kind), "{text:?}: {diags:?}");
    }
}

proptest! {
    #[test]
    fn parser_never_panics(text in "(model|basis|unit|wedge|d|iota|H|xi|generator|[a-z]{1,3}|-?[0-9]{1,2}(/[0-9])?|->|\\.| |\n){0,60}") {
        let _ = parse_model(&ModelSource::inline(&text));
    }

    #[test]
    fn mangled_bundle_never_panics(cut in 0usize..400, junk in "[ a-z0-9/.>-]{0,8}") {
        let text = emit_model(&library::s3_tube(3)).text;
        let at = text.char_indices().map(|(i, _)| i).nth(cut % text.len()).unwrap_or(0);
        let mangled = format!("{}{}{}", &text[..at], junk, &text[at..]);
        let _ = parse_model(&ModelSource::inline(&mangled));
    }
}
