//! Parse a circuit file and print its history states |α_0⟩ … |α_L⟩.
//!
//!     cargo run --example circuit_history [path/to/file.circ]

use clockforge::circuit::{parse_circuit, run_circuit};

fn main() -> clockforge::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/circuits/bell.circ").to_string());
    let circuit = parse_circuit(&std::fs::read_to_string(&path)?)?;
    println!("{path}: {} qubits, {} gates", circuit.n_qubits(), circuit.num_gates());
    print!("{circuit}");

    for (step, state) in run_circuit(&circuit)?.iter().enumerate() {
        let amplitudes: Vec<String> = state
            .amplitudes
            .iter()
            .map(|a| if a.im.abs() < 1e-12 { format!("{:+.4}", a.re) } else { format!("{:+.4}{:+.4}i", a.re, a.im) })
            .collect();
        println!("alpha_{step} = [{}]", amplitudes.join(", "));
    }
    Ok(())
}
