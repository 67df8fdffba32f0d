use meanfield_lab::config::{parse_config, parse_config_str, InitialKind, Particles, RunConfig};
use meanfield_lab::LabError;

#[test]
fn defaults_round_trip_through_json() {
    let cfg = RunConfig::default();
    let back = parse_config_str(&cfg.to_json()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.particle_list(), vec![4, 6, 8, 10, 12]);
    assert_eq!(back.steps(), 500);
}

#[test]
fn empty_object_is_the_default() {
    assert_eq!(parse_config_str("{}").unwrap(), RunConfig::default());
}

#[test]
fn single_particle_number_and_static_trap() {
    let cfg =
        parse_config_str(r#"{"particles": 6, "trap": {"tau": null}, "initial": "ground_state"}"#)
            .unwrap();
    assert_eq!(cfg.particles, Particles::One(6));
    assert_eq!(cfg.trap.tau, None);
    assert_eq!(cfg.initial, InitialKind::GroundState);
}

#[test]
fn one_particle_is_rejected() {
    match parse_config_str(r#"{"particles": [1]}"#) {
        Err(LabError::Invalid(v)) => {
            assert_eq!(v.len(), 1);
            assert!(v[0].contains("N = 1"), "{v:?}");
        }
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn zero_time_step_is_rejected() {
    match parse_config_str(r#"{"dt": 0.0}"#) {
        Err(LabError::Invalid(v)) => {
            assert!(v.iter().any(|m| m.starts_with("dt must be positive")))
        }
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn oversized_sector_is_rejected() {
    let err = parse_config_str(r#"{"lattice": {"sites": 12}, "particles": [12]}"#).unwrap_err();
    assert!(err.to_string().contains("dimension_cap"), "{err}");
}

#[test]
fn syntax_errors_carry_a_position() {
    match parse_config_str("{\n  \"dt\": 1e-3,\n  \"t1\" 0.5\n}") {
        Err(LabError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let err = parse_config(std::path::Path::new("/nonexistent/cfg.json")).unwrap_err();
    assert!(matches!(err, LabError::Io { .. }));
}

#[test]
fn config_schema_accepts_defaults() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../schemas/config.schema.json")).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let cfg: serde_json::Value = serde_json::from_str(&RunConfig::default().to_json()).unwrap();
    assert!(v.is_valid(&cfg));
    let bad: serde_json::Value = serde_json::from_str(r#"{"particles": [1]}"#).unwrap();
    assert!(!v.is_valid(&bad));
}
