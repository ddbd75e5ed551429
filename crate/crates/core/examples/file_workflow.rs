// The command-line workflow driven in-process: generate files, solve,
// classify.

use lrs_pfsrc::cli::run;
use lrs_pfsrc::{Error, Result};

pub fn run_example() -> Result<()> {
    let dir = std::env::temp_dir().join(format!("lrs-pfsrc-example-{}", std::process::id()));
    let d = |name: &str| dir.join(name).display().to_string();
    let steps: [Vec<String>; 3] = [
        vec!["generate".into(), "--out".into(), d("data")],
        vec![
            "solve".into(),
            "--x".into(), d("data/X.csv"),
            "--y".into(), d("data/Y.csv"),
            "--labels".into(), d("data/labels.txt"),
            "--lambda1".into(), "0.09".into(),
            "--out".into(), d("solution"),
        ],
        vec![
            "classify".into(),
            "--solution".into(), d("solution"),
            "--labels".into(), d("data/labels.txt"),
            "--truth".into(), d("data/Y_labels.txt"),
            "--out".into(), d("classified"),
        ],
    ];
    for args in steps {
        let code = run(std::iter::once("lrs-pfsrc".to_string()).chain(args.iter().cloned()));
        if code != 0 {
            return Err(Error::InvalidInput(format!("{} exited with {code}", args[0])));
        }
    }
    println!("predictions: {}", std::fs::read_to_string(dir.join("classified/pred.txt"))?.replace('\n', " "));
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
