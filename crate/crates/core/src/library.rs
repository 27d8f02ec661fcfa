//! Bundled models and packages. The `.cdga` files under `models/` are generated from the
//! builders below (`cartanext bundle --out models`) and checked in.

use crate::error::{Error, Result};
use crate::free::{enumerate_free_cdga, term, CapMode, FreeCdgaSpec, FreeGenerator, PolySpec};
use crate::model::CdgaModel;
use crate::parser::{emit_model, parse_model_str, parse_package_str, Package};
use crate::scalar::int;

/// Weight cap used by the bundled polynomial models.
pub const DEFAULT_CAP: usize = 3;

pub const MODEL_FILES: &[(&str, &str)] = &[
    ("point.cdga", include_str!("../models/point.cdga")),
    ("s1_trivial.cdga", include_str!("../models/s1_trivial.cdga")),
    ("s1_exact_xi.cdga", include_str!("../models/s1_exact_xi.cdga")),
    ("t2.cdga", include_str!("../models/t2.cdga")),
    ("t3_bundle.cdga", include_str!("../models/t3_bundle.cdga")),
    ("s3.cdga", include_str!("../models/s3.cdga")),
    ("s3_tube.cdga", include_str!("../models/s3_tube.cdga")),
    ("s3_fixed_circle.cdga", include_str!("../models/s3_fixed_circle.cdga")),
    ("disk.cdga", include_str!("../models/disk.cdga")),
];

pub const PACKAGE_FILES: &[(&str, &str)] = &[
    ("s3_localization.pkg", include_str!("../models/s3_localization.pkg")),
    ("disk_localization.pkg", include_str!("../models/disk_localization.pkg")),
    ("identity.pkg", include_str!("../models/identity.pkg")),
];

fn gen(name: &str, degree: usize, d: PolySpec) -> FreeGenerator {
    FreeGenerator { name: name.into(), degree, weight: None, d }
}

fn odd(name: &str) -> FreeGenerator {
    gen(name, 1, vec![])
}

fn one_term(c: i64, factors: &str) -> PolySpec {
    vec![term(int(c), factors)]
}

pub fn point() -> CdgaModel {
    let mut spec = FreeCdgaSpec::new("point");
    spec.action_generators = vec!["t".into()];
    spec.iota = vec![vec![]];
    spec.xi = vec![vec![]];
    enumerate_free_cdga(&spec).expect("point model")
}

/// Circle with the trivial action and `ξ = dθ`.
pub fn s1_trivial() -> CdgaModel {
    let mut spec = FreeCdgaSpec::new("s1_trivial");
    spec.generators = vec![odd("dtheta")];
    spec.action_generators = vec!["t".into()];
    spec.iota = vec![vec![]];
    spec.xi = vec![one_term(1, "dtheta")];
    enumerate_free_cdga(&spec).expect("s1_trivial model")
}

/// Circle times a truncated interval coordinate `f`, trivial action, `ξ = df`.
pub fn s1_exact_xi(cap: usize) -> CdgaModel {
    let mut spec = FreeCdgaSpec::new("s1_exact_xi");
    spec.generators = vec![
        gen("f", 0, one_term(1, "df")),
        FreeGenerator { name: "df".into(), degree: 1, weight: Some(1), d: vec![] },
        odd("dtheta"),
    ];
    spec.poly_cap = cap;
    spec.mode = CapMode::Quotient;
    spec.action_generators = vec!["t".into()];
    spec.iota = vec![vec![]];
    spec.xi = vec![one_term(1, "df")];
    enumerate_free_cdga(&spec).expect("s1_exact_xi model")
}

/// Two-torus rotated along the first circle, untwisted.
pub fn t2() -> CdgaModel {
    let mut spec = FreeCdgaSpec::new("t2");
    spec.generators = vec![odd("dtheta1"), odd("dtheta2")];
    spec.action_generators = vec!["x".into()];
    spec.iota = vec![vec![("dtheta1".into(), one_term(1, ""))]];
    spec.xi = vec![vec![]];
    enumerate_free_cdga(&spec).expect("t2 model")
}

/// Three-torus as the trivial circle bundle over `T²`, `H = k·dθ₁dθ₂dθ₃`, fiber action, `ξ = 0`.
pub fn t3_bundle(k: i64) -> CdgaModel {
    let mut spec = FreeCdgaSpec::new("t3_bundle");
    spec.generators = vec![odd("dtheta1"), odd("dtheta2"), odd("dtheta3")];
    spec.action_generators = vec!["x".into()];
    spec.iota = vec![vec![("dtheta3".into(), one_term(1, ""))]];
    spec.h = one_term(k, "dtheta1 dtheta2 dtheta3");
    spec.xi = vec![vec![]];
    enumerate_free_cdga(&spec).expect("t3_bundle model")
}

/// Torus-invariant forms on `S³` away from both fixed circles: `c`, `γ = dc`, `α`, `β`, with
/// `H = γαβ`, `ξ = −cβ` and the action contracting `α`.
pub fn s3(cap: usize) -> CdgaModel {
    let mut spec = FreeCdgaSpec::new("s3");
    spec.generators = vec![
        gen("c", 0, one_term(1, "gamma")),
        FreeGenerator { name: "gamma".into(), degree: 1, weight: Some(1), d: vec![] },
        odd("alpha"),
        odd("beta"),
    ];
    spec.poly_cap = cap;
    spec.mode = CapMode::Quotient;
    spec.action_generators = vec!["x".into()];
    spec.iota = vec![vec![("alpha".into(), one_term(1, ""))]];
    spec.h = one_term(1, "gamma alpha beta");
    spec.xi = vec![one_term(-1, "c beta")];
    enumerate_free_cdga(&spec).expect("s3 model")
}

/// Invariant forms on a tubular neighbourhood of the fixed circle in `S³`: `s` is the squared
/// normal radius, `a = s·dφ₁`, `ω = da`, `β = dφ₂`.
pub fn s3_tube(cap: usize) -> CdgaModel {
    let mut spec = FreeCdgaSpec::new("s3_tube");
    spec.generators = vec![
        gen("s", 0, one_term(1, "sigma")),
        FreeGenerator { name: "sigma".into(), degree: 1, weight: Some(1), d: vec![] },
        FreeGenerator { name: "a".into(), degree: 1, weight: Some(1), d: one_term(1, "omega") },
        FreeGenerator { name: "omega".into(), degree: 2, weight: Some(1), d: vec![] },
        odd("beta"),
    ];
    spec.relations = vec![
        (vec!["sigma".into(), "a".into()], one_term(1, "s omega")),
        (vec!["a".into(), "omega".into()], vec![]),
        (vec!["sigma".into(), "omega".into()], vec![]),
        (vec!["omega".into(), "omega".into()], vec![]),
    ];
    spec.poly_cap = cap;
    spec.mode = CapMode::Quotient;
    spec.action_generators = vec!["x".into()];
    spec.iota = vec![vec![("a".into(), one_term(1, "s")), ("omega".into(), one_term(-1, "sigma"))]];
    spec.h = one_term(-1, "omega beta");
    spec.xi = vec![vec![term(int(-1), "beta"), term(int(1), "s beta")]];
    enumerate_free_cdga(&spec).expect("s3_tube model")
}

/// The fixed circle `F ⊂ S³` with the restricted twist `ξ = −β_F`.
pub fn s3_fixed_circle() -> CdgaModel {
    let mut spec = FreeCdgaSpec::new("s3_fixed_circle");
    spec.generators = vec![odd("beta_F")];
    spec.action_generators = vec!["x".into()];
    spec.iota = vec![vec![]];
    spec.xi = vec![one_term(-1, "beta_F")];
    enumerate_free_cdga(&spec).expect("s3_fixed_circle model")
}

/// Rotation-invariant forms on the plane: `s = r²`, `σ = ds`, `a = r²dφ`, `ω = da`.
pub fn disk(cap: usize) -> CdgaModel {
    let mut spec = FreeCdgaSpec::new("disk");
    spec.generators = vec![
        gen("s", 0, one_term(1, "sigma")),
        FreeGenerator { name: "sigma".into(), degree: 1, weight: Some(1), d: vec![] },
        FreeGenerator { name: "a".into(), degree: 1, weight: Some(1), d: one_term(1, "omega") },
        FreeGenerator { name: "omega".into(), degree: 2, weight: Some(1), d: vec![] },
    ];
    spec.relations = vec![
        (vec!["sigma".into(), "a".into()], one_term(1, "s omega")),
        (vec!["a".into(), "omega".into()], vec![]),
        (vec!["sigma".into(), "omega".into()], vec![]),
        (vec!["omega".into(), "omega".into()], vec![]),
    ];
    spec.poly_cap = cap;
    spec.mode = CapMode::Quotient;
    spec.action_generators = vec!["t".into()];
    spec.iota = vec![vec![("a".into(), one_term(1, "s")), ("omega".into(), one_term(-1, "sigma"))]];
    spec.xi = vec![vec![]];
    enumerate_free_cdga(&spec).expect("disk model")
}

/// All bundled models, built from code at the default cap.
pub fn builtin_models() -> Vec<CdgaModel> {
    vec![
        point(),
        s1_trivial(),
        s1_exact_xi(DEFAULT_CAP),
        t2(),
        t3_bundle(1),
        s3(DEFAULT_CAP),
        s3_tube(DEFAULT_CAP),
        s3_fixed_circle(),
        disk(DEFAULT_CAP),
    ]
}

/// Canonical file text for every bundled model, as written by `bundle --out`.
pub fn generated_files() -> Vec<(String, String)> {
    builtin_models().iter().map(|m| (format!("{}.cdga", m.name()), emit_model(m).text)).collect()
}

fn file_key(name: &str) -> &str {
    let base = name.rsplit('/').next().unwrap_or(name);
    base.trim_end_matches(".cdga").trim_end_matches(".pkg")
}

pub fn model_source(name: &str) -> Option<&'static str> {
    let key = file_key(name);
    MODEL_FILES.iter().find(|(f, _)| file_key(f) == key).map(|(_, t)| *t)
}

pub fn package_source(name: &str) -> Option<&'static str> {
    let key = file_key(name);
    PACKAGE_FILES.iter().find(|(f, _)| file_key(f) == key).map(|(_, t)| *t)
}

/// Parses a bundled model file by name (with or without the `.cdga` suffix).
pub fn load_model(name: &str) -> Result<CdgaModel> {
    let text = model_source(name).ok_or_else(|| Error::Io(format!("no bundled model `{name}`")))?;
    parse_model_str(text)
}

/// The bundled model, rebuilt with a larger cap when truncation `n` needs one.
pub fn load_model_for_truncation(name: &str, n: usize) -> Result<CdgaModel> {
    let key = file_key(name);
    if key == "s3" && n + 1 > DEFAULT_CAP {
        return Ok(s3(n + 1));
    }
    load_model(name)
}

/// Every bundled model, parsed from its file.
pub fn bundled_models() -> Result<Vec<CdgaModel>> {
    MODEL_FILES.iter().map(|(f, _)| load_model(f)).collect()
}

pub fn load_package(name: &str) -> Result<Package> {
    let text = package_source(name).ok_or_else(|| Error::Io(format!("no bundled package `{name}`")))?;
    parse_package_str(text, &bundled_models()?)
}

pub fn bundled_packages() -> Result<Vec<Package>> {
    PACKAGE_FILES.iter().map(|(f, _)| load_package(f)).collect()
}
