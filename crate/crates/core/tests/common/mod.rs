#![allow(dead_code)]

use num_complex::Complex64;
use qrewrite::{parse_term, Term};

pub fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture_term(name: &str) -> Term {
    parse_term(fixture(name).trim()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Dense three-qubit teleportation circuit with its own index order
/// (a2, a, b): CNOT with control a2, then Hadamard on a2. The result is
/// returned in label order (a, a2, b).
pub fn simulate_teleport(alpha: Complex64, beta: Complex64) -> Vec<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // index = 4*a2 + 2*a + b
    let mut psi = [z; 8];
    for (a2, amp) in [(0, alpha), (1, beta)] {
        for ab in [0, 1] {
            psi[4 * a2 + 2 * ab + ab] += amp * s;
        }
    }
    let mut after_cnot = [z; 8];
    for (i, amp) in psi.iter().enumerate() {
        let (a2, a, b) = (i >> 2, (i >> 1) & 1, i & 1);
        after_cnot[4 * a2 + 2 * (a ^ a2) + b] += amp;
    }
    let mut out = [z; 8];
    for (i, amp) in after_cnot.iter().enumerate() {
        let (a2, rest) = (i >> 2, i & 3);
        out[rest] += amp * s;
        out[4 + rest] += amp * if a2 == 0 { s } else { -s };
    }
    let mut sorted = vec![z; 8];
    for (i, amp) in out.iter().enumerate() {
        let (a2, a, b) = (i >> 2, (i >> 1) & 1, i & 1);
        sorted[4 * a + 2 * a2 + b] = *amp;
    }
    sorted
}
