//! The shipped configs and circuits parse and mean what their comments say.

use std::path::PathBuf;

use robust_vqc::circuitsim::{
    acceptance_probability, classify_instance, qotp_roundtrip, Circuit, PauliKeys,
};
use robust_vqc::experiments::{load_config, ExperimentSpec};
use robust_vqc::protocol::InstanceLabel;

fn path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(rel)
}

fn circuit(name: &str) -> Circuit {
    Circuit::parse(&std::fs::read_to_string(path(&format!("circuits/{name}.circ"))).unwrap())
        .unwrap()
}

#[test]
fn configs_parse() {
    let kinds = [
        ("honest_abort", "honest-abort"),
        ("adversary_success", "adversary-success"),
        ("lemma_validation", "lemma-validation"),
        ("tail_bounds", "tail-bounds"),
        ("threshold_curve", "threshold-curve"),
    ];
    for (file, kind) in kinds {
        let c = load_config(&path(&format!("configs/{file}.json")), &[]).unwrap();
        assert_eq!(c.spec.kind(), kind);
    }
    let c = load_config(&path("configs/lemma_validation.json"), &[]).unwrap();
    match c.spec {
        ExperimentSpec::LemmaValidation(s) => assert_eq!(s.points[1].epsilon, 0.5),
        other => panic!("{other:?}"),
    }
}

#[test]
fn circuits_classify() {
    let q = 1.0 / 3.0;
    assert_eq!(
        classify_instance(&circuit("identity"), q).unwrap(),
        InstanceLabel::Yes
    );
    assert_eq!(
        classify_instance(&circuit("x_last"), q).unwrap(),
        InstanceLabel::No
    );
    assert_eq!(
        classify_instance(&circuit("h_last"), q).unwrap(),
        InstanceLabel::Unpromised
    );
    let t = circuit("t_rotation");
    let expect = (std::f64::consts::PI / 8.0).cos().powi(2);
    assert!((acceptance_probability(&t).unwrap() - expect).abs() < 1e-12);
    assert_eq!(classify_instance(&t, q).unwrap(), InstanceLabel::Yes);
    let bell = circuit("bell_pair");
    assert!(bell.is_clifford());
    let keys = PauliKeys {
        a: vec![true, false, true],
        b: vec![true, true, false],
    };
    assert!(qotp_roundtrip(&bell, &keys).unwrap() <= 1e-10);
}
