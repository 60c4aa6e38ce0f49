//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants (degrees 3, 5, 7, 9 and 13), and the function
//! `Ω(A) = (I - e^{-A}) A⁻¹` evaluated without inverting `A`.

use nalgebra::DMatrix;

use super::{ensure_finite, ensure_square, one_norm};
use crate::error::{LieError, Result};

// Backward-error bounds for the [m/m] approximants in the 1-norm.
const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(A)` for a finite square matrix.
pub fn mat_exp(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    ensure_square(a)?;
    ensure_finite(a)?;
    let n = a.nrows();
    let norm = one_norm(a);
    if norm == 0.0 {
        return Ok(DMatrix::identity(n, n));
    }

    let low: [(f64, &[f64]); 4] = [(THETA_3, &B3), (THETA_5, &B5), (THETA_7, &B7), (THETA_9, &B9)];
    for (theta, b) in low {
        if norm <= theta {
            return pade_low(a, b);
        }
    }

    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let scaled = a * 2f64.powi(-s);
    let mut r = pade_13(&scaled)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn pade_low(a: &DMatrix<f64>, b: &[f64]) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let a2 = a * a;
    let mut u = DMatrix::<f64>::zeros(n, n);
    let mut v = DMatrix::<f64>::zeros(n, n);
    let mut power = DMatrix::<f64>::identity(n, n);
    for k in (0..b.len()).step_by(2) {
        v += &power * b[k];
        if k + 1 < b.len() {
            u += &power * b[k + 1];
        }
        power = &power * &a2;
    }
    let u = a * u;
    solve_pade(u, v)
}

fn pade_13(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let b = &B13;
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    solve_pade(u, v)
}

/// Solves `(V - U) R = V + U`.
fn solve_pade(u: DMatrix<f64>, v: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| LieError::InvalidInput("Padé denominator is singular".into()))
}

/// `Ω(A) = Σ_k (-A)^k / (k+1)!`, read off the top-right block of
/// `exp([[-A, I], [0, 0]])`.
pub fn omega_of(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    ensure_square(a)?;
    ensure_finite(a)?;
    let n = a.nrows();
    let mut block = DMatrix::<f64>::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&(-a));
    block.view_mut((0, n), (n, n)).fill_with_identity();
    let e = mat_exp(&block)?;
    Ok(e.view((0, n), (n, n)).into_owned())
}
