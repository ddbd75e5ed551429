// Eigenface features fitted on labeled samples and applied to both sets.

use lrs_pfsrc::datagen::{generate, SynthSpec};
use lrs_pfsrc::features::{fit_eigenfaces, transform};
use lrs_pfsrc::Result;

pub fn run_example() -> Result<()> {
    let ds = generate(&SynthSpec {
        noise_sigma: 0.05,
        ..SynthSpec::standard()
    })?;
    let basis = fit_eigenfaces(ds.labeled(), 6)?;
    let x = transform(&basis, ds.labeled())?;
    let y = transform(&basis, ds.unlabeled())?;
    println!(
        "basis {}x{}, labeled features {:?}, unlabeled features {:?}",
        basis.input_dim(),
        basis.dim(),
        x.data.shape(),
        y.data.shape()
    );
    let gram = basis.u.transpose() * &basis.u;
    println!("max |U^T U - I| = {:.2e}", (gram - nalgebra::DMatrix::identity(6, 6)).abs().max());
    println!("zero columns after projection: {:?} {:?}", x.zero_columns, y.zero_columns);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
