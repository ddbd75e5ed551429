// Full classification run: synthetic data, optional eigenfaces, solver,
// category contribution rates and accuracy.

use lrs_pfsrc::datagen::{generate, SynthSpec};
use lrs_pfsrc::metrics::accuracy;
use lrs_pfsrc::model::{ModelKind, Regularization};
use lrs_pfsrc::pipeline::{classify_pfsr, prepare, PipelineConfig};
use lrs_pfsrc::Result;

pub fn run_example() -> Result<()> {
    let ds = generate(&SynthSpec {
        noise_sigma: 0.02,
        ..SynthSpec::standard()
    })?;
    let truth = ds.unlabeled_truth().expect("synthetic data carries truth").to_vec();
    let cfg = PipelineConfig {
        reg: Regularization {
            lambda1: 0.09,
            ..Regularization::default()
        },
        ..PipelineConfig::default()
    };
    for dim in [0, 12] {
        let prepared = prepare(&ds, dim)?;
        let out = classify_pfsr(&prepared.dataset, ModelKind::LowRankSparse, &cfg)?;
        let labels: Vec<String> = out.predictions.iter().map(|l| l.to_string()).collect();
        println!(
            "dim {dim:>2}: predictions [{}] accuracy {:.3} converged {}",
            labels.join(" "),
            accuracy(&out.predictions, &truth)?,
            out.solution.converged
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
