use hermite_spectral::jacobi::{build_operator, Family, PerturbationSpec};
use hermite_spectral::jost::spectral_density;
use hermite_spectral::oracle::{cdf_compare, truncated_measure};
use std::time::Instant;

fn main() {
    let spec = PerturbationSpec::new(
        Family::Power { amplitude: 0.1, exponent: 0.5 },
        Family::Power { amplitude: 0.2, exponent: 1.0 },
        "power",
    );
    let op = build_operator(&spec, 2100).unwrap();
    let t0 = Instant::now();
    let m = truncated_measure(&op, 2000).unwrap();
    println!("measure: {:?}", t0.elapsed());
    let density = |x: f64| {
        if x.abs() > 8.0 { 0.0 } else { spectral_density(&op, x, 1e-6).unwrap() }
    };
    let grid = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let t0 = Instant::now();
    for &x in &grid {
        let dev = cdf_compare(&m, &density, &[x]).unwrap();
        println!("x={x:+.1}: dev = {dev:.6e}");
    }
    println!("cdf time: {:?}", t0.elapsed());
    let mid = m.nodes.iter().position(|&v| v > 0.0).unwrap();
    println!("spacing near 0: {:.4}, atom weights {:.4}",
        m.nodes[mid] - m.nodes[mid-1], m.weights[mid]);
}
