use std::path::{Path, PathBuf};

use pairframe::cli::{self, CliError, Format, SystemDocument, EXIT_NEGATIVE, EXIT_OK};
use pairframe::unconditional::UnconditionalConfig;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pairframe-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classify_biorthogonal_is_schauder() {
    let out = cli::cmd_classify(&golden("biorthogonal.json"), 1e-9, 42, Format::Json).unwrap();
    assert_eq!(out.exit_code, EXIT_OK);
    assert_eq!(out.report["verdict"], "SchauderFrame");
    assert_eq!(out.report["seed"], 42);
}

#[test]
fn adjoint_output_round_trips_through_the_loader() {
    let path = scratch("dual.json");
    let out = cli::cmd_adjoint(&golden("biorthogonal.json"), Some(&path), 1e-9, 7, Format::Json).unwrap();
    assert_eq!(out.exit_code, EXIT_OK);
    let written = cli::load(&path).unwrap();
    let reported = SystemDocument::from_value(&out.report["dual_document"]).unwrap();
    assert_eq!(written.to_value(), reported.to_value());

    // the adjoint of the adjoint is the original system
    let again = cli::cmd_adjoint(&path, None, 1e-9, 7, Format::Json).unwrap();
    let back = SystemDocument::from_value(&again.report["dual_document"]).unwrap();
    let orig = cli::load(&golden("biorthogonal.json")).unwrap();
    for key in ["family_G", "family_F"] {
        assert_eq!(back.to_value()[key], orig.to_value()[key], "{key}");
    }
}

#[test]
fn transform_output_is_loadable() {
    let path = scratch("transformed.json");
    let out = cli::cmd_transform(&golden("transform.json"), Some(&path), 1e-9, 42, Format::Json).unwrap();
    assert_eq!(out.exit_code, EXIT_OK);
    assert!(cli::load(&path).is_ok());
}

#[test]
fn bounds_accepts_exponent_override() {
    let out = cli::cmd_bounds(&golden("orthonormal.json"), Some("inf"), 1e-9, 42, Format::Json).unwrap();
    assert_eq!(out.exit_code, EXIT_OK);
    let err = cli::cmd_bounds(&golden("orthonormal.json"), Some("0.5"), 1e-9, 42, Format::Json).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn unconditional_config_is_echoed() {
    let cfg = UnconditionalConfig { truncation: 256, num_perms: 8, num_subseries: 8, tol: 1e-10, seed: 3 };
    let out = cli::cmd_unconditional(&golden("lazy_alternating_harmonic.json"), &cfg, Format::Json).unwrap();
    assert_eq!(out.exit_code, EXIT_NEGATIVE);
    assert_eq!(out.report["verdict"], "ConditionalDetected");
    assert_eq!(out.report["seed"], 3);
}

#[test]
fn missing_input_is_a_parse_error() {
    let err = cli::cmd_classify(Path::new("/nonexistent/x.json"), 1e-9, 42, Format::Text).unwrap_err();
    assert!(matches!(err, CliError::Parse(_)));
}
