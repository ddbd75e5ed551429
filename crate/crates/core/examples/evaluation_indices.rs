// Category concentration and relative stability indices.

use lrs_pfsrc::metrics::{cci, rsi, ResultsMatrix, RsiScope};
use lrs_pfsrc::{Matrix, Result};

pub fn run_example() -> Result<()> {
    let alpha = [0.5, 0.3, 0.1, 0.1];
    let labels = [1, 1, 2, 2];
    println!("cci({alpha:?}) = {:?}", cci(&alpha, &labels)?);

    let results = ResultsMatrix::new(
        Matrix::from_row_slice(2, 3, &[0.95, 0.90, 0.70, 0.90, 0.92, 0.80]),
        vec!["SRC".into(), "LR-S-PFSRC".into()],
        vec!["6".into(), "4".into(), "2".into()],
    )?;
    for scope in [RsiScope::Column, RsiScope::Global] {
        let r = rsi(&results, scope);
        for (i, name) in results.model_names.iter().enumerate() {
            let row: Vec<String> = (0..r.ncols())
                .map(|j| r[(i, j)].map_or("NaN".into(), |v| format!("{v:.4}")))
                .collect();
            println!("{scope:?} RSI {name:<10} {}", row.join(" "));
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
