//! The two-language matrix measure across correlation levels.
//!
//!     cargo run --example matrix_measure

use lq::{matrix_lq, PairCorrelation};

fn main() {
    let exponents = [0.5, 1.0, 2.0];
    print!("{:>5}", "rho");
    for r in exponents {
        print!("{:>10}", format!("r={r}"));
    }
    println!();
    for step in 0..=10 {
        let rho = f64::from(step) / 10.0;
        print!("{rho:>5.1}");
        for r in exponents {
            let pair = PairCorrelation::new(rho, r).unwrap();
            print!("{:>10.4}", matrix_lq(&pair).unwrap());
        }
        println!();
    }
    if let Err(e) = PairCorrelation::new(1.2, 1.0) {
        println!("rejected: {e}");
    }
}
