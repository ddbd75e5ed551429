// Solves the three representation models on a noiseless synthetic union of
// subspaces and reports residuals and the iterate-difference diagnostic.

use lrs_pfsrc::datagen::{generate, SynthSpec};
use lrs_pfsrc::diagnostics::convergence_report;
use lrs_pfsrc::model::{ModelKind, Regularization};
use lrs_pfsrc::solver::{solve, SolverConfig};
use lrs_pfsrc::Result;

pub fn run_example() -> Result<()> {
    let ds = generate(&SynthSpec::standard())?;
    let cfg = SolverConfig::default();
    let reg = Regularization {
        lambda1: 0.09,
        ..Regularization::default()
    };
    for model in [ModelKind::LowRankSparse, ModelKind::Sparse, ModelKind::LowRank] {
        let p = ds.problem(model, reg)?;
        let sol = solve(&p, &cfg)?;
        let report = convergence_report(&sol.trace, &sol.z, None)?;
        println!(
            "{:>3}: converged={} iterations={} r1={:.2e} r2={:.2e} h_diff {:.2e} -> {:.2e} objective {:.4}",
            model.as_str(),
            sol.converged,
            sol.iterations,
            report.final_r1,
            report.final_r2,
            report.first_h_diff,
            report.final_h_diff,
            sol.last().objective,
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
