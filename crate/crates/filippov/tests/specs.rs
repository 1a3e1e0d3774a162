use filippov::report::{analysis_report, classify_report, AnalysisReport, ClassifyReport};
use filippov::scenarios::{example1_y2, solve_rho_c, EXAMPLE7_EPS};
use filippov::specfile::{bundled, bundled_examples, SystemSpec, BUNDLED};
use filippov::FlpError;

#[test]
fn bundled_specs_round_trip_byte_identically() {
    for (name, text) in BUNDLED {
        let spec = SystemSpec::parse(text).unwrap();
        assert_eq!(spec.to_json(), text, "{name}");
        assert_eq!(spec.name.as_deref(), Some(name));
        assert!(spec.note.is_some(), "{name} has no provenance note");
    }
    assert_eq!(bundled_examples().len(), 11);
}

#[test]
fn bundled_lookup_accepts_file_names() {
    assert_eq!(bundled("example3.json"), bundled("example3"));
    assert!(bundled("example8").is_none());
}

#[test]
fn example7_sits_above_rho_c() {
    let spec = bundled("example7").unwrap();
    let rho = spec.get("b_minus[1]").unwrap();
    assert_eq!(rho, solve_rho_c(0.05).unwrap() + EXAMPLE7_EPS);
    assert!(example1_y2(0.05).unwrap() > 0.0);
}

#[test]
fn family_parameters_resolve() {
    let rho = bundled("rho_family").unwrap();
    assert_eq!(rho.get("rho"), rho.get("b_minus[1]"));
    let moved = rho.with("rho", 0.25).unwrap();
    assert_eq!(moved.b_minus[1], 0.25);
    let eta = bundled("eta_family").unwrap();
    assert_eq!(eta.get("eta"), eta.get("b_minus[0]"));
    assert!(matches!(eta.with("kappa", 1.0), Err(FlpError::MalformedSpec(_))));
}

#[test]
fn motivating_models_classify() {
    let buck = bundled("buck_converter").unwrap();
    assert_eq!(buck.c(), [1.0, 0.0]);
    assert_eq!(buck.d(), -0.5);
    classify_report(&buck).unwrap();
    let dry = bundled("dry_friction").unwrap();
    assert_eq!(dry.c(), [0.0, 1.0]);
    assert_eq!(dry.d(), 0.0);
    let (sys, rec) = dry.system().unwrap();
    // points on y = 0 land on the switching line
    for x in [-2.0, 0.5, 3.0] {
        assert!(rec.push(&[x, 0.0])[0].abs() < 1e-15);
    }
    assert!(sys.is_nondegenerate());
}

#[test]
fn malformed_specs_are_input_errors() {
    let zero = r#"{"A_plus":[[1,0],[0,1]],"b_plus":[0,1],"A_minus":[[1,0],[0,1]],"b_minus":[0,1],"c":[0,0]}"#;
    assert_eq!(SystemSpec::parse(zero), Err(FlpError::ZeroNormal));
    for bad in [
        r#"{"A_plus":[[1,0],[0,1]],"b_plus":[0,1],"A_minus":[[1,0],[0,1]]}"#,
        r#"{"A_plus":[[1,0],[0,1]],"b_plus":[0,1],"A_minus":[[1,0],[0,1]],"b_minus":[0,1],"e":3}"#,
        r#"{"A_plus":[[1,0],[0,1]],"b_plus":[0,1],"A_minus":[[1,0],[0,1]],"b_minus":[0,1],"parameters":{"k":"q[0]"}}"#,
        "not json",
    ] {
        let e = SystemSpec::parse(bad).unwrap_err();
        assert!(e.is_input_error(), "{e}");
    }
}

#[test]
fn reports_are_reproducible_from_the_embedded_spec() {
    for name in ["example5", "example6", "rho_family"] {
        let spec = bundled(name).unwrap();
        let a = analysis_report(&spec, 1).unwrap();
        let text = serde_json::to_string_pretty(&a).unwrap();
        let back: AnalysisReport = serde_json::from_str(&text).unwrap();
        let again = analysis_report(&back.spec, back.seed).unwrap();
        assert_eq!(serde_json::to_string_pretty(&again).unwrap(), text, "{name}");
    }
}

#[test]
fn classify_report_round_trips() {
    let r = classify_report(&bundled("example1").unwrap()).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: ClassifyReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}
