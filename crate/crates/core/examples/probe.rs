use eparam_core::measurement::encode_measurement;
use eparam_core::*;
use std::time::Instant;

fn main() {
    let mut cfg = OptimizationConfig::default();
    cfg.restarts = 32;
    cfg.outer_evals = 4500;
    let t = Instant::now();
    let supinf = max_min_product_entropy(3, &cfg).unwrap();
    println!("sup-inf d=3: {:.5}  [{:.0}s]", supinf.value, t.elapsed().as_secs_f64());
    let mut strong = cfg.clone();
    strong.inner_restarts = 64;
    strong.seed = 4242;
    let solid = min_klein_entropy_over_products(&supinf.best_measurement, &strong).unwrap().value;
    println!("strong re-score: {solid:.5}");

    let rho = max_entangled(3).unwrap().density();
    let t = Instant::now();
    let warm = vec![encode_measurement(&supinf.best_measurement)];
    let report = estimate_eparam_seeded(&rho, &cfg, &warm).unwrap();
    println!("psi+3 estimate (cross-seeded): {:.5}  [{:.0}s]", report.estimate, t.elapsed().as_secs_f64());
    let solid2 = min_klein_entropy_over_products(&report.best_measurement, &strong).unwrap().value
        - klein_entropy(&rho, &report.best_measurement).unwrap();
    println!("strong re-score: {solid2:.5}");
}
