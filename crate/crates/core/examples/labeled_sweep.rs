// Accuracy and RSI as the number of labeled samples per category shrinks.

use std::path::Path;

use lrs_pfsrc::experiment::{run_experiment, ExperimentPlan};
use lrs_pfsrc::io::Manifest;
use lrs_pfsrc::Result;

const PLAN: &str = "
source = synth
synth.noise = 0.05
models = SRC, SRC+test, LR-PFSR, LR-S-PFSR
sweep = labeled_count
values = 6, 4, 2
seeds = 1, 2
lambda1 = 0.09
";

pub fn run_example() -> Result<()> {
    let plan = ExperimentPlan::from_manifest(&Manifest::parse(PLAN)?, Path::new("."))?;
    let report = run_experiment(&plan)?;
    print!("{}", report.results_csv());
    print!("{}", report.rsi_csv()?);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
