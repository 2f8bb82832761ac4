use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::averaging::{jacobian, FdStep};
use crate::error::{Error, Result};

/// Largest `|f(x_eq)|` accepted as an equilibrium.
pub const EQUILIBRIUM_TOL: f64 = 1e-6;
/// Relative tolerance on the trace and determinant reproduced by the
/// eigenvalues.
pub const SPECTRUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Linearization {
    pub equilibrium: Vec<f64>,
    pub jacobian: DMatrix<f64>,
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex<f64>>,
}

impl Linearization {
    /// Largest real part.
    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_hurwitz(&self) -> bool {
        self.spectral_abscissa() < 0.0
    }

    pub fn eigen_pairs(&self) -> Vec<[f64; 2]> {
        self.eigenvalues.iter().map(|l| [l.re, l.im]).collect()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectrumResidual {
    pub trace: f64,
    pub determinant: f64,
}

/// Eigenvalues of a real square matrix, sorted, with the trace and
/// determinant residuals checked.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    if !m.is_square() {
        return Err(Error::Eigen(format!("matrix is {}x{}", m.nrows(), m.ncols())));
    }
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }
    let mut ev: Vec<Complex<f64>> = m.clone().complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let res = spectrum_residual(m, &ev);
    let scale = m.norm().max(1.0);
    if res.trace > SPECTRUM_TOL * scale || res.determinant > SPECTRUM_TOL * scale.powi(m.nrows() as i32) {
        return Err(Error::Eigen(format!(
            "eigenvalues miss trace by {:e} and determinant by {:e}",
            res.trace, res.determinant
        )));
    }
    Ok(ev)
}

/// `|Σλ − tr M|` and `|Πλ − det M|`.
pub fn spectrum_residual(m: &DMatrix<f64>, ev: &[Complex<f64>]) -> SpectrumResidual {
    let sum: Complex<f64> = ev.iter().sum();
    let prod: Complex<f64> = ev.iter().product();
    SpectrumResidual {
        trace: (sum - Complex::new(m.trace(), 0.0)).norm(),
        determinant: (prod - Complex::new(m.determinant(), 0.0)).norm(),
    }
}

/// Central-difference Jacobian at an equilibrium and its spectrum.
pub fn linearize(f: &dyn Fn(&[f64]) -> Vec<f64>, x_eq: &[f64], step: FdStep) -> Result<Linearization> {
    let fx = f(x_eq);
    if fx.len() != x_eq.len() {
        return Err(Error::DimensionMismatch {
            expected: x_eq.len(),
            got: fx.len(),
        });
    }
    let residual = fx.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(residual < EQUILIBRIUM_TOL) {
        return Err(Error::NotEquilibrium { residual });
    }
    let rows = jacobian(f, x_eq, step)?;
    let n = x_eq.len();
    let jac = DMatrix::from_fn(n, n, |i, k| rows[i][k]);
    let eigenvalues = eigenvalues(&jac)?;
    Ok(Linearization {
        equilibrium: x_eq.to_vec(),
        jacobian: jac,
        eigenvalues,
    })
}
