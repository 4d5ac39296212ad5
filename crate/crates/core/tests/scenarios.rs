use pseudodyn::exactnum::Scalar;
use pseudodyn::pseudogroup::orbit_ball;
use pseudodyn::scenario::{bundled, bundled_names, load, parse_scenario};

#[test]
fn every_bundled_scenario_builds() {
    let names: Vec<&str> = bundled_names().collect();
    assert!(names.len() >= 4);
    for name in names {
        let sc = bundled(name).unwrap_or_else(|| panic!("{name} failed to load"));
        for s in &sc.seeds {
            assert!(orbit_ball(&sc.system, s, 2).is_ok(), "{name}");
        }
    }
}

#[test]
fn nonrecurrent_scenario_logs_the_g1_check() {
    let sc = bundled("nonrecurrent").unwrap();
    assert!(sc.notes.iter().any(|n| n.starts_with("g1(a'') = 5/2 < b'' = 3")), "{:?}", sc.notes);
    assert!(sc.nonrecurrent.is_some());
}

#[test]
fn missing_inverse_is_completed() {
    let text = r#"{"schema": 1, "space": "line",
        "generators": [{"name": "h", "pieces": [{"interval": {"lo": "0", "hi": "4"},
                                                  "moebius": {"a": "1", "b": "1", "c": "0", "d": "2"}}]}]}"#;
    let sc = parse_scenario(text).unwrap();
    let inv = sc.system.index_of("h^-1").expect("inverse added");
    assert_eq!(sc.system.step(inv, &Scalar::frac(1, 1)), Some(Scalar::frac(1, 1)));
    assert_eq!(sc.system.step(inv, &Scalar::frac(3, 2)), Some(Scalar::frac(2, 1)));
    assert!(sc.notes.iter().any(|n| n.contains("h^-1")));
}

#[test]
fn unknown_path_is_an_io_error() {
    let e = load("/nonexistent/scenario.json").unwrap_err();
    assert!(e.to_string().contains("/nonexistent/scenario.json"));
}
