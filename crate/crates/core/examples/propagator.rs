//! The per-mode linear propagator: eigenvalue regimes across frequencies
//! and the closed form checked against a brute-force matrix exponential.

use chemodecay::semigroup::LinearSystem;

fn main() -> chemodecay::Result<()> {
    for eps in [0.0, 0.5, 1.0, 3.0] {
        let sys = LinearSystem::new(eps)?;
        println!("eps = {eps}");
        for k in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let e = sys.eigenvalues(k * k);
            let xi = [0.6 * k, 0.8 * k];
            let mu = sys.decay_shift(k * k);
            let err = sys
                .green_hat_shifted(2.0, &xi, mu)
                .relative_error(&sys.oracle_green_shifted(2.0, &xi, mu)?);
            println!(
                "  |xi| = {k:>5}: {:?}, lambda+ = {:.4}, lambda- = {:.4}, oracle error {err:.1e}",
                e.regime, e.lambda_plus, e.lambda_minus
            );
        }
    }
    Ok(())
}
