// Least-squares perturbation bound on a random well-conditioned system.

use lrs_pfsrc::metrics::stability_bound;
use lrs_pfsrc::{Matrix, Result};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn run_example() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut draw = |r: usize, c: usize, s: f64| {
        Matrix::from_fn(r, c, |_, _| {
            let z: f64 = StandardNormal.sample(&mut rng);
            s * z
        })
    };
    let v = draw(12, 4, 1.0);
    let x: DVector<f64> = draw(12, 1, 1.0).column(0).into_owned();
    let dv = draw(12, 4, 1e-5);
    let dx: DVector<f64> = draw(12, 1, 1e-5).column(0).into_owned();
    let check = stability_bound(&v, &x, &dx, &dv)?;
    println!(
        "kappa {:.3} eps {:.2e} theta {:.3}: lhs {:.3e} <= rhs {:.3e} ({})",
        check.kappa2,
        check.epsilon,
        check.theta,
        check.lhs,
        check.rhs,
        if check.holds() { "holds" } else { "violated" }
    );
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
