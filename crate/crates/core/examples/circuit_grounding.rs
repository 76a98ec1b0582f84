//! Circuit-level grounding: classification, benign Paulis, and the one-time pad.
//!
//! cargo run --example circuit_grounding [-- path/to/circuit.circ]

use robust_vqc::circuitsim::{
    acceptance_probability, benign_invariance_check, classify_instance, classify_pauli,
    qotp_roundtrip, Circuit, Pauli, PauliKeys, PauliString,
};
use robust_vqc::rng::StreamKey;

fn main() -> robust_vqc::Result<()> {
    let q = 1.0 / 3.0;
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/circuits");
    let mut files: Vec<_> = match std::env::args().nth(1) {
        Some(path) => vec![path.into()],
        None => std::fs::read_dir(&dir)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()?,
    };
    files.sort();
    for path in &files {
        let circuit = Circuit::parse(&std::fs::read_to_string(path)?)?;
        let n = circuit.n_qubits();
        let p = acceptance_probability(&circuit)?;
        let label = classify_instance(&circuit, q)?;
        let z = benign_invariance_check(&circuit, &PauliString::single(n, n - 1, Pauli::Z))?;
        print!(
            "{:<18} P = {p:.6}  {label:<10}  Z-on-output distance {:.1e}",
            path.file_name().unwrap_or_default().to_string_lossy(),
            z.distance
        );
        if circuit.is_clifford() {
            let keys = PauliKeys::random(n, &mut StreamKey::new(1, 0).trial(0));
            print!("  pad round trip {:.1e}", qotp_roundtrip(&circuit, &keys)?);
        }
        println!();
    }

    let attack: PauliString = "XXZ".parse()?;
    let measured = [2];
    println!(
        "\nXXZ with wire 2 measured: {:?}",
        classify_pauli(&attack, &measured)?
    );
    println!(
        "IIY with wire 2 measured: {:?}",
        classify_pauli(&"IIY".parse()?, &measured)?
    );
    Ok(())
}
