//! Thin adapter over the `levenberg-marquardt` crate for dynamically sized
//! real residual vectors.

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt, TerminationReason};
use nalgebra::storage::Owned;
use nalgebra::{DMatrix, DVector, Dyn};

/// Residual model `r(p)` with an analytic Jacobian.
pub(crate) trait Residuals {
    fn n_residuals(&self) -> usize;

    /// Fill `r` (length `n_residuals`) and, when requested, the row-major
    /// Jacobian `jac` (`n_residuals x p.len()`).
    fn eval(&self, p: &[f64], r: &mut [f64], jac: Option<&mut [f64]>);
}

pub(crate) struct LsqOutcome {
    pub params: Vec<f64>,
    /// Sum of squared residuals at `params`.
    pub ssr: f64,
    pub jacobian: DMatrix<f64>,
    pub converged: bool,
}

struct Problem<'a, R> {
    model: &'a R,
    p: DVector<f64>,
}

impl<R: Residuals> LeastSquaresProblem<f64, Dyn, Dyn> for Problem<'_, R> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, x: &DVector<f64>) {
        self.p.copy_from(x);
    }

    fn params(&self) -> DVector<f64> {
        self.p.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let mut r = vec![0.0; self.model.n_residuals()];
        self.model.eval(self.p.as_slice(), &mut r, None);
        r.iter().all(|v| v.is_finite()).then(|| DVector::from_vec(r))
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        Some(jacobian_at(self.model, self.p.as_slice()))
    }
}

fn jacobian_at<R: Residuals>(model: &R, p: &[f64]) -> DMatrix<f64> {
    let m = model.n_residuals();
    let n = p.len();
    let mut r = vec![0.0; m];
    let mut j = vec![0.0; m * n];
    model.eval(p, &mut r, Some(&mut j));
    DMatrix::from_row_slice(m, n, &j)
}

/// Minimize `|r(p)|^2` starting at `p0`. The evaluation budget is
/// `max_iterations * (n + 1)` residual computations.
pub(crate) fn minimize<R: Residuals>(model: &R, p0: &[f64], max_iterations: usize) -> LsqOutcome {
    let problem = Problem {
        model,
        p: DVector::from_column_slice(p0),
    };
    let (problem, report) = LevenbergMarquardt::new()
        .with_patience(max_iterations.max(1))
        .minimize(problem);
    let converged = report.termination.was_successful()
        || matches!(report.termination, TerminationReason::NoImprovementPossible(_));
    let params = problem.p.as_slice().to_vec();
    let mut r = vec![0.0; model.n_residuals()];
    model.eval(&params, &mut r, None);
    let ssr = r.iter().map(|v| v * v).sum();
    LsqOutcome {
        jacobian: jacobian_at(model, &params),
        params,
        ssr,
        converged,
    }
}

/// Parameter covariance `s^2 (J^T J)^-1` with `s^2 = SSR / (m - n)`.
pub(crate) fn covariance(outcome: &LsqOutcome) -> Option<DMatrix<f64>> {
    let (m, n) = outcome.jacobian.shape();
    if m <= n {
        return None;
    }
    let s2 = outcome.ssr / (m - n) as f64;
    let jtj = outcome.jacobian.transpose() * &outcome.jacobian;
    jtj.try_inverse().map(|inv| inv * s2)
}
