// Soft thresholding, singular value thresholding and the zero-diagonal
// projection on small matrices.

use lrs_pfsrc::prox::{nuclear_norm, singular_values, soft_threshold, svt, zero_diagonal_project};
use lrs_pfsrc::{Matrix, Result};

pub fn run_example() -> Result<()> {
    let m = Matrix::from_row_slice(2, 3, &[3.0, -0.5, 1.2, -2.0, 0.1, 0.0]);
    println!("soft_threshold(M, 1) = {}", soft_threshold(&m, 1.0)?);

    let a = Matrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
    let tau = 1.5;
    let shrunk = svt(&a, tau)?;
    println!("singular values before: {:.4}", singular_values(&a)?.transpose());
    println!("singular values after svt({tau}): {:.4}", singular_values(&shrunk)?.transpose());
    println!("nuclear norm {:.4} -> {:.4}", nuclear_norm(&a)?, nuclear_norm(&shrunk)?);

    let p = zero_diagonal_project(&Matrix::from_element(4, 2, 1.0), 2)?;
    println!("zero-diagonal projection of a 4x2 ones matrix: {p}");
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
