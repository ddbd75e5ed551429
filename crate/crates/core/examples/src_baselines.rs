// SRC and SRC+test on a noisy synthetic set.

use lrs_pfsrc::datagen::{generate, SynthSpec};
use lrs_pfsrc::metrics::accuracy;
use lrs_pfsrc::pipeline::{classify_src_all, PipelineConfig};
use lrs_pfsrc::Result;

pub fn run_example() -> Result<()> {
    let ds = generate(&SynthSpec {
        noise_sigma: 0.1,
        n_labeled: 3,
        n_unlabeled: 6,
        ..SynthSpec::standard()
    })?;
    let truth = ds.unlabeled_truth().expect("synthetic data carries truth");
    let cfg = PipelineConfig::default();
    for (name, plus_test) in [("SRC", false), ("SRC+test", true)] {
        let out = classify_src_all(&ds, plus_test, &cfg)?;
        println!("{name:<8} accuracy {:.3}", accuracy(&out.predictions, truth)?);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
