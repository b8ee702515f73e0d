//! Least-squares line fits.

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Euclidean norm of the residual vector.
    pub residual: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`; needs at least three
/// samples and two distinct abscissae.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::contract("abscissae and ordinates differ in length"));
    }
    if x.len() < 3 {
        return Err(Error::contract("a line fit needs at least 3 samples"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::contract("a line fit needs distinct abscissae"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = libm::sqrt(
        x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept) * (b - slope * a - intercept)).sum(),
    );
    Ok(LineFit { slope, intercept, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_and_errors() {
        let f = fit_line(&[1.0, 2.0, 3.0, 4.0], &[3.0, 5.0, 7.0, 9.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!((f.intercept - 1.0).abs() < 1e-14);
        assert!(f.residual < 1e-13);
        assert!(fit_line(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_line(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn residual_of_noisy_line() {
        // residuals 0.4, -1.2, 1.2, -0.4 worked by hand
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 0.0, 3.0, 2.0];
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope - 0.6).abs() < 1e-14);
        assert!((f.intercept - 0.6).abs() < 1e-14);
        let expect = ((0.4f64).powi(2) + 1.2f64.powi(2) + 1.2f64.powi(2) + 0.4f64.powi(2)).sqrt();
        assert!((f.residual - expect).abs() < 1e-14);
    }
}
