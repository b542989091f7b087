//! Thin adapters over argmin for the two derivative-free searches we need.

use std::sync::{Arc, Mutex};

use argmin::core::observers::{Observe, ObserverMode};
use argmin::core::{CostFunction, Error as ArgminError, Executor, IterState, State, KV};
use argmin::solver::goldensectionsearch::GoldenSectionSearch;
use argmin::solver::neldermead::NelderMead;

use crate::error::{Error, Result};

struct Scalar<F: Fn(f64) -> f64>(F);

impl<F: Fn(f64) -> f64> CostFunction for Scalar<F> {
    type Param = f64;
    type Output = f64;
    fn cost(&self, p: &f64) -> std::result::Result<f64, ArgminError> {
        Ok((self.0)(*p))
    }
}

struct Vector<F: Fn(&[f64]) -> f64>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Vector<F> {
    type Param = Vec<f64>;
    type Output = f64;
    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, ArgminError> {
        Ok((self.0)(p))
    }
}

fn wrap(e: ArgminError) -> Error {
    Error::Model(format!("optimizer: {e}"))
}

/// Maximum of `f` on [a, b] by golden-section search; returns (x, f(x)).
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_iters: u64) -> Result<(f64, f64)> {
    let solver = GoldenSectionSearch::new(a, b).and_then(|s| s.with_tolerance(tol)).map_err(wrap)?;
    let res = Executor::new(Scalar(|x| -f(x)), solver)
        .configure(|s| s.param(0.5 * (a + b)).max_iters(max_iters))
        .run()
        .map_err(wrap)?;
    let st = res.state();
    let x = st.get_best_param().copied().unwrap_or(0.5 * (a + b));
    Ok((x, -st.get_best_cost()))
}

/// Records the best cost after every iteration.
#[derive(Clone, Default)]
struct BestLog(Arc<Mutex<Vec<f64>>>);

impl Observe<IterState<Vec<f64>, (), (), (), (), f64>> for BestLog {
    fn observe_iter(
        &mut self,
        state: &IterState<Vec<f64>, (), (), (), (), f64>,
        _kv: &KV,
    ) -> std::result::Result<(), ArgminError> {
        self.0.lock().expect("log lock").push(state.get_best_cost());
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Best objective after each iteration; never increases.
    pub log: Vec<f64>,
}

/// Nelder-Mead from an explicit initial simplex.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    simplex: Vec<Vec<f64>>,
    sd_tol: f64,
    max_iters: u64,
) -> Result<MinimizeResult> {
    let start = simplex
        .iter()
        .map(|p| (f(p), p.clone()))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| Error::Input("empty simplex".into()))?;
    let solver = NelderMead::new(simplex).with_sd_tolerance(sd_tol).map_err(wrap)?;
    let log = BestLog::default();
    let res = Executor::new(Vector(f), solver)
        .configure(|s| s.max_iters(max_iters))
        .add_observer(log.clone(), ObserverMode::Always)
        .run()
        .map_err(wrap)?;
    let st = res.state();
    let (mut x, mut value) = (st.get_best_param().cloned().unwrap_or_default(), st.get_best_cost());
    if !(value <= start.0) {
        x = start.1;
        value = start.0;
    }
    let mut trace = vec![start.0];
    trace.extend(log.0.lock().expect("log lock").iter().copied());
    // best-so-far, so the log is monotone even if the solver reports a worse vertex first
    for k in 1..trace.len() {
        if !(trace[k] <= trace[k - 1]) {
            trace[k] = trace[k - 1];
        }
    }
    Ok(MinimizeResult { x, value, log: trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| 1.0 - (x - 0.3).powi(2), -1.0, 2.0, 1e-8, 200).unwrap();
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
        let r = nelder_mead(f, vec![vec![-1.0, 1.0], vec![-0.8, 1.0], vec![-1.0, 1.2]], 1e-14, 2000).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4, "{:?}", r.x);
        assert!(r.log.windows(2).all(|w| w[1] <= w[0]));
    }
}
