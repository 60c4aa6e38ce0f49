//! Factorisation of a matrix as an ordered product of one-parameter
//! exponentials, `M = exp(z_p A_p) ··· exp(z_1 A_1)`.
//!
//! The generators are passed in ascending index order and the product is
//! always taken in descending order (leftmost factor = last generator).
//! All `n²` entries enter a Gauss–Newton least-squares problem with an
//! exact Jacobian; a solution is accepted once the relative Frobenius
//! residual drops below `residual_tol`.

use nalgebra::{DMatrix, DVector};

use super::linalg::{vec_of, RANK_CUTOFF};
use super::mat_exp;
use crate::config::SolverConfig;
use crate::error::{LieError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub coeffs: DVector<f64>,
    /// `‖Π exp(z_a A_a) − M‖_F / max(1, ‖M‖_F)`.
    pub residual: f64,
    pub iterations: usize,
}

/// `exp(z_p A_p) ··· exp(z_1 A_1)`.
pub fn ordered_product(generators: &[DMatrix<f64>], coeffs: &[f64], dim: usize) -> Result<DMatrix<f64>> {
    let mut p = DMatrix::identity(dim, dim);
    for (g, z) in generators.iter().zip(coeffs).rev() {
        if *z != 0.0 {
            p *= mat_exp(&(g * *z))?;
        }
    }
    Ok(p)
}

struct Evaluation {
    factors: Vec<DMatrix<f64>>,
    product: DMatrix<f64>,
    residual: DMatrix<f64>,
    norm: f64,
}

fn evaluate(target: &DMatrix<f64>, generators: &[DMatrix<f64>], z: &DVector<f64>) -> Result<Evaluation> {
    let n = target.nrows();
    let factors = generators
        .iter()
        .zip(z.iter())
        .map(|(g, c)| mat_exp(&(g * *c)))
        .collect::<Result<Vec<_>>>()?;
    let mut product = DMatrix::identity(n, n);
    for f in factors.iter().rev() {
        product *= f;
    }
    let residual = &product - target;
    let norm = residual.norm();
    Ok(Evaluation { factors, product, residual, norm })
}

fn jacobian(generators: &[DMatrix<f64>], eval: &Evaluation) -> DMatrix<f64> {
    let p = generators.len();
    let n = eval.product.nrows();
    // right[a] = E_{a-1} ··· E_0, left[a] = E_{p-1} ··· E_{a+1}
    let mut right = Vec::with_capacity(p);
    let mut acc = DMatrix::identity(n, n);
    for f in &eval.factors {
        right.push(acc.clone());
        acc = f * &acc;
    }
    let mut left = vec![DMatrix::identity(n, n); p];
    let mut acc = DMatrix::identity(n, n);
    for a in (0..p).rev() {
        left[a] = acc.clone();
        acc = &acc * &eval.factors[a];
    }
    let mut jac = DMatrix::zeros(n * n, p);
    for a in 0..p {
        let d = &left[a] * &generators[a] * &eval.factors[a] * &right[a];
        jac.set_column(a, &vec_of(&d));
    }
    jac
}

/// Solves `Π exp(z_a A_a) = M` for `z` by Gauss–Newton from `initial_guess`.
pub fn decompose_product(
    target: &DMatrix<f64>,
    generators: &[DMatrix<f64>],
    cfg: &SolverConfig,
    initial_guess: &DVector<f64>,
) -> Result<Decomposition> {
    let n = target.nrows();
    if target.ncols() != n || generators.iter().any(|g| g.shape() != (n, n)) {
        return Err(LieError::InvalidInput("decomposition needs square matrices of one size".into()));
    }
    if initial_guess.len() != generators.len() {
        return Err(LieError::InvalidInput(format!(
            "initial guess has {} entries for {} generators",
            initial_guess.len(),
            generators.len()
        )));
    }
    if target.iter().chain(initial_guess.iter()).any(|v| !v.is_finite()) {
        return Err(LieError::InvalidInput("non-finite decomposition input".into()));
    }
    let scale = target.norm().max(1.0);
    let tol = cfg.residual_tol * scale;
    let p = generators.len();

    let mut z = initial_guess.clone();
    let mut cur = evaluate(target, generators, &z)?;
    for it in 0..=cfg.max_iter {
        if cur.norm <= tol {
            if p > 0 {
                check_rank(&jacobian(generators, &cur))?;
            }
            return Ok(Decomposition { coeffs: z, residual: cur.norm / scale, iterations: it });
        }
        if p == 0 || it == cfg.max_iter {
            break;
        }
        let jac = jacobian(generators, &cur);
        let rhs = -vec_of(&cur.residual);
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        let step = match svd.solve(&rhs, RANK_CUTOFF * smax) {
            Ok(s) => s,
            Err(_) => break,
        };

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let trial = &z + &step * lambda;
            if trial.iter().any(|v| !v.is_finite() || v.abs() > 1e6) {
                lambda *= 0.5;
                continue;
            }
            let e = evaluate(target, generators, &trial)?;
            if e.norm < cur.norm {
                accepted = Some((trial, e));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((t, e)) => {
                z = t;
                cur = e;
            }
            None => break,
        }
    }
    Err(LieError::DecompositionFailure { iterations: cfg.max_iter, residual: cur.norm / scale })
}

fn check_rank(jac: &DMatrix<f64>) -> Result<()> {
    let sv = jac.clone().singular_values();
    let smax = sv.max();
    let rank = sv.iter().filter(|s| **s > RANK_CUTOFF * smax).count();
    if smax == 0.0 || rank < jac.ncols() {
        return Err(LieError::Ambiguity { rank: if smax == 0.0 { 0 } else { rank }, expected: jac.ncols() });
    }
    Ok(())
}

/// Follows the decomposition of a target that depends continuously on a
/// path parameter, warm-starting every solve from the previous one and
/// bisecting a step whenever the warm start is too far off.
pub struct PathTracker<'a, F>
where
    F: Fn(&DVector<f64>) -> Result<DMatrix<f64>>,
{
    target: F,
    generators: &'a [DMatrix<f64>],
    cfg: &'a SolverConfig,
    point: DVector<f64>,
    coeffs: DVector<f64>,
    /// Worst residual accepted so far.
    pub max_residual: f64,
}

const MAX_BISECTIONS: usize = 12;

impl<'a, F> PathTracker<'a, F>
where
    F: Fn(&DVector<f64>) -> Result<DMatrix<f64>>,
{
    /// `start_coeffs` must decompose `target(start_point)` exactly.
    pub fn new(
        target: F,
        generators: &'a [DMatrix<f64>],
        cfg: &'a SolverConfig,
        start_point: DVector<f64>,
        start_coeffs: DVector<f64>,
    ) -> Self {
        Self { target, generators, cfg, point: start_point, coeffs: start_coeffs, max_residual: 0.0 }
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    /// Decomposes `target(point)` and makes it the new warm start.
    pub fn advance(&mut self, point: &DVector<f64>) -> Result<&DVector<f64>> {
        self.advance_depth(point, 0)?;
        Ok(&self.coeffs)
    }

    fn advance_depth(&mut self, point: &DVector<f64>, depth: usize) -> Result<()> {
        let m = (self.target)(point)?;
        match decompose_product(&m, self.generators, self.cfg, &self.coeffs) {
            Ok(d) => {
                self.max_residual = self.max_residual.max(d.residual);
                self.point = point.clone();
                self.coeffs = d.coeffs;
                Ok(())
            }
            Err(LieError::DecompositionFailure { .. }) if depth < MAX_BISECTIONS => {
                let mid = (&self.point + point) * 0.5;
                self.advance_depth(&mid, depth + 1)?;
                self.advance_depth(point, depth + 1)
            }
            Err(e) => Err(e),
        }
    }
}

/// Decomposes `path(1)` trying `initial_guess` first; on failure follows
/// the path from `path(0)`, whose decomposition is `start`, through
/// `homotopy_steps` intermediate targets.
pub fn decompose_with_homotopy<F>(
    path: F,
    start: &DVector<f64>,
    generators: &[DMatrix<f64>],
    cfg: &SolverConfig,
    initial_guess: Option<&DVector<f64>>,
) -> Result<Decomposition>
where
    F: Fn(f64) -> Result<DMatrix<f64>>,
{
    let end = path(1.0)?;
    if let Some(guess) = initial_guess {
        match decompose_product(&end, generators, cfg, guess) {
            Ok(d) => return Ok(d),
            Err(LieError::DecompositionFailure { .. } | LieError::Ambiguity { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let mut tracker = PathTracker::new(|s: &DVector<f64>| path(s[0]), generators, cfg, DVector::zeros(1), start.clone());
    let steps = cfg.homotopy_steps;
    for k in 1..=steps {
        tracker.advance(&DVector::from_element(1, k as f64 / steps as f64))?;
    }
    // Final polish doubles as the rank check at the solution.
    decompose_product(&end, generators, cfg, tracker.coeffs())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// so(3)-type generators: [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2.
    fn so3_ad() -> Vec<DMatrix<f64>> {
        vec![
            DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]),
            DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]),
            DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ]
    }

    #[test]
    fn identity_gives_zero() {
        let g = so3_ad();
        let cfg = SolverConfig::default();
        let d = decompose_product(&DMatrix::identity(3, 3), &g, &cfg, &DVector::zeros(3)).unwrap();
        assert_eq!(d.coeffs, DVector::zeros(3));
        assert_eq!(d.iterations, 0);
    }

    #[test]
    fn single_factor() {
        let g = so3_ad();
        let cfg = SolverConfig::default();
        let m = mat_exp(&(&g[2] * 0.7)).unwrap();
        let d = decompose_product(&m, &g, &cfg, &DVector::from_row_slice(&[0.1, -0.1, 0.5])).unwrap();
        assert!((d.coeffs - DVector::from_row_slice(&[0.0, 0.0, 0.7])).amax() < 1e-12);
    }

    #[test]
    fn round_trip_random_products() {
        let g = so3_ad();
        let cfg = SolverConfig::default();
        let z = [0.3, -0.45, 0.2];
        let m = ordered_product(&g, &z, 3).unwrap();
        let d = decompose_product(&m, &g, &cfg, &DVector::zeros(3)).unwrap();
        let back = ordered_product(&g, d.coeffs.as_slice(), 3).unwrap();
        assert!((back - &m).norm() <= cfg.residual_tol * m.norm().max(1.0));
    }

    #[test]
    fn dependent_generators_are_ambiguous() {
        let g = so3_ad();
        let gens = vec![g[0].clone(), g[0].clone()];
        let cfg = SolverConfig::default();
        let m = mat_exp(&(&g[0] * 0.3)).unwrap();
        let r = decompose_product(&m, &gens, &cfg, &DVector::from_row_slice(&[0.1, 0.1]));
        assert!(matches!(r, Err(LieError::Ambiguity { .. })), "{r:?}");
    }

    #[test]
    fn unreachable_target_fails() {
        let g = so3_ad();
        let cfg = SolverConfig { max_iter: 20, ..Default::default() };
        let r = decompose_product(&(DMatrix::identity(3, 3) * 2.0), &g, &cfg, &DVector::zeros(3));
        assert!(matches!(r, Err(LieError::DecompositionFailure { .. })));
    }

    #[test]
    fn homotopy_reaches_far_target() {
        let g = so3_ad();
        let cfg = SolverConfig::default();
        let z = [0.9, -1.1, 1.2];
        let path = |s: f64| ordered_product(&g, &[z[0] * s, z[1] * s, z[2] * s], 3);
        let d = decompose_with_homotopy(path, &DVector::zeros(3), &g, &cfg, None).unwrap();
        assert!((d.coeffs - DVector::from_row_slice(&z)).amax() < 1e-10);
    }

    #[test]
    fn far_guess_may_land_on_another_branch() {
        let g = so3_ad();
        let cfg = SolverConfig::default();
        let m = ordered_product(&g, &[0.9, -1.1, 1.2], 3).unwrap();
        let d = decompose_product(&m, &g, &cfg, &DVector::from_row_slice(&[-2.0, 2.0, -2.0])).unwrap();
        let back = ordered_product(&g, d.coeffs.as_slice(), 3).unwrap();
        assert!((back - &m).norm() <= 1e-11);
    }
}
