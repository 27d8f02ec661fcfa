use cartanext::cli::run;
use cartanext::library;
use std::path::PathBuf;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("cartanext").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cartanext-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn validate_exit_codes() {
    assert_eq!(cli(&["validate", "models/s3.cdga"]).0, 0);
    let (code, _, err) = cli(&["validate", "/nonexistent/nope.cdga"]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());

    let broken = library::model_source("s1_trivial").unwrap().replace("unit one", "unit one\nbogus line");
    assert_eq!(cli(&["validate", scratch("broken.cdga", &broken).to_str().unwrap()]).0, 1);
}

#[test]
fn odd_square_violation_names_the_axiom() {
    let text = "model odd\nbasis one deg 0\nbasis a deg 1\nbasis b deg 2\nunit one\nwedge a a -> 1 b\ngenerator x\n";
    let (code, out, err) = cli(&["validate", scratch("odd.cdga", text).to_str().unwrap()]);
    assert_eq!(code, 2, "{out}{err}");
    assert!(format!("{out}{err}").contains("odd"), "{out}{err}");
}

#[test]
fn cohomology_examples() {
    let (code, out, _) = cli(&["cohomology", "point", "--json"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"rank\": 1") && out.contains("\"rank\": 0"), "{out}");
    let (code, out, _) = cli(&["cohomology", "s1_trivial"]);
    assert_eq!(code, 0);
    assert!(out.contains("even: 1") && out.contains("odd: 1"), "{out}");
}

#[test]
fn equivariant_examples() {
    let (code, out, _) = cli(&["equivariant", "s1_trivial", "-N", "4", "--stable"]);
    assert_eq!(code, 0);
    assert!(out.contains("even: 0, odd: 1 (u-degree 0)"), "{out}");
    let (code, out, _) = cli(&["equivariant", "s3_fixed_circle", "-N", "4", "--stable"]);
    assert_eq!(code, 0);
    assert!(out.contains("even: 0, odd: 1"), "{out}");
    assert_ne!(cli(&["equivariant", "s1_trivial", "-N", "0"]).0, 0);
}

#[test]
fn non_isotropic_model_is_a_precondition_failure() {
    // ι_X ξ = 1 for ξ = dθ₁
    let text = format!("{}xi x -> 1 dtheta1\n", library::model_source("t2").unwrap());
    let path = scratch("skew.cdga", &text);
    let (code, _, err) = cli(&["equivariant", path.to_str().unwrap(), "-N", "2"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn json_is_deterministic() {
    for args in [
        &["equivariant", "s3", "-N", "3", "--json"][..],
        &["cohomology", "t3_bundle", "--json"][..],
        &["localize", "s3_tube", "s3_fixed_circle", "s3_localization", "--json"][..],
        &["verify", "s3", "--relations", "--json"][..],
    ] {
        let (c1, a, _) = cli(args);
        let (c2, b, _) = cli(args);
        assert_eq!((c1, &a), (c2, &b), "{args:?}");
        assert!(a.trim_start().starts_with('{'), "{args:?}: {a}");
    }
}

#[test]
fn localize_bundled_packages() {
    let (code, out, err) = cli(&["localize", "s3_tube", "s3_fixed_circle", "s3_localization", "-N", "3"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("all stable classes torsion; localized ranks 0/0"), "{out}");
    let (code, out, err) = cli(&["localize", "s3_fixed_circle", "s3_fixed_circle", "identity", "-N", "3"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("reconstruction: exact"), "{out}");
}

#[test]
fn corrupted_euler_data_exits_4() {
    let text = library::package_source("s3_localization").unwrap().replace("euler 1 -> 1 one", "euler 1 -> 2 one");
    let path = scratch("corrupt.pkg", &text);
    let (code, _, err) = cli(&["localize", "s3_tube", "s3_fixed_circle", path.to_str().unwrap(), "-N", "3"]);
    assert_eq!(code, 4);
    assert!(err.contains("failed"), "{err}");
}

#[test]
fn verify_examples() {
    assert_eq!(cli(&["verify", "s3", "--relations"]).0, 0);
    assert_eq!(cli(&["verify", "s3", "--relations", "--probes", "random:7"]).0, 0);
    assert_eq!(cli(&["verify", "s1_trivial", "--isotropy", "--dsq"]).0, 0);
    let (code, _, err) = cli(&["verify", "t3_bundle", "--purity"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn bundle_writes_the_library() {
    let dir = std::env::temp_dir().join(format!("cartanext-bundle-{}", std::process::id()));
    let (code, _, _) = cli(&["bundle", "--out", dir.to_str().unwrap()]);
    assert_eq!(code, 0);
    for (name, text) in library::generated_files() {
        assert_eq!(std::fs::read_to_string(dir.join(name)).unwrap(), text);
    }
    assert!(dir.join("s3_localization.pkg").exists());
}
