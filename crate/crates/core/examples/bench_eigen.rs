use std::time::Instant;

use collective::{correlate, eigendecompose, generate_one_factor, FactorSpec};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let rp = generate_one_factor(&FactorSpec::one_factor(n, 2000, 0.3, 1)).unwrap();
    let t0 = Instant::now();
    let c = correlate(&rp);
    println!("correlate {:?}", t0.elapsed());
    let t0 = Instant::now();
    let es = eigendecompose(&c).unwrap();
    println!("eigen {:?}", t0.elapsed());
    println!("orth {:e} res {:e}", es.orthonormality_error(), es.max_residual(c.entries()));
}
