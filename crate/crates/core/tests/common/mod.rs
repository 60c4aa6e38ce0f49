//! Shared helpers for integration tests: seeded sampling, catalog access,
//! finite differences and the closed forms of the 6-dimensional example.
#![allow(dead_code)]

use lieforge::cli::catalog;
use lieforge::{frame_second, GroupPoint, LieAlgebra};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CATALOG: &[&str] = &[
    "abelian:3",
    "abelian:4",
    "abelian:5",
    "abelian:6",
    "heisenberg3",
    "so3",
    "paper6",
    "poincare-sub",
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sample(rng: &mut ChaCha8Rng, n: usize, r: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-r..=r))
}

pub fn adapted(key: &str) -> LieAlgebra {
    catalog::build(key).unwrap().center_adapted().unwrap()
}

pub fn unit(n: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 })
}

pub fn second(v: &DVector<f64>) -> GroupPoint {
    GroupPoint::new(lieforge::Chart::Second, v.clone())
}

pub fn first(v: &DVector<f64>) -> GroupPoint {
    GroupPoint::new(lieforge::Chart::First, v.clone())
}

/// Central difference of a matrix-valued map along coordinate `a`.
pub fn partial<F>(f: F, x: &DVector<f64>, a: usize, h: f64) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    let mut xp = x.clone();
    let mut xm = x.clone();
    xp[a] += h;
    xm[a] -= h;
    (f(&xp) - f(&xm)) / (2.0 * h)
}

/// Worst violation of `∂_a ω^k_b − ∂_b ω^k_a = −C^k_ij ω^i_a ω^j_b`.
pub fn maurer_cartan_defect(alg: &LieAlgebra, x: &DVector<f64>, h: f64) -> f64 {
    let n = alg.dim();
    let omega = |p: &DVector<f64>| frame_second(alg, &second(p)).unwrap().omega;
    let w = omega(x);
    let d: Vec<DMatrix<f64>> = (0..n).map(|a| partial(omega, x, a, h)).collect();
    let c = alg.constants();
    let mut worst = 0.0f64;
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                let lhs = d[a][(k, b)] - d[b][(k, a)];
                let mut rhs = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        rhs -= c.get(k, i, j) * w[(i, a)] * w[(j, b)];
                    }
                }
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    worst
}

/// Worst violation of `[F_i, F_j] = C^k_ij F_k` for the fields whose
/// components are the columns of `fields(x)`.
pub fn commutator_defect<F>(alg: &LieAlgebra, fields: F, x: &DVector<f64>, h: f64) -> f64
where
    F: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    let n = alg.dim();
    let f = fields(x);
    let d: Vec<DMatrix<f64>> = (0..n).map(|a| partial(&fields, x, a, h)).collect();
    let c = alg.constants();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut lie = 0.0;
                for a in 0..n {
                    lie += f[(a, i)] * d[a][(k, j)] - f[(a, j)] * d[a][(k, i)];
                }
                let rhs: f64 = (0..n).map(|l| c.get(l, i, j) * f[(k, l)]).sum();
                worst = worst.max((lie - rhs).abs());
            }
        }
    }
    worst
}

/// Closed forms for the 6-dimensional example algebra. Coordinates are
/// 0-based: `x[0]` is `x¹`.
pub mod paper6 {
    use nalgebra::{DMatrix, DVector};

    pub fn omega(x: &DVector<f64>) -> DMatrix<f64> {
        let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
        let e = (2.0 * x4).exp();
        let u = x2 * x3 - x1;
        DMatrix::from_row_slice(
            6,
            6,
            &[
                1.0, 0.0, -x2, x1 - 2.0 * x2 * x3, x3 * e * u, 0.0, //
                0.0, 1.0, 0.0, -x2, e * u, 0.0, //
                0.0, 0.0, 1.0, 2.0 * x3, -x3 * x3 * e, 0.0, //
                0.0, 0.0, 0.0, 1.0, -x3 * e, 0.0, //
                0.0, 0.0, 0.0, 0.0, e, 0.0, //
                0.0, -x1, -x2 * x2 / 2.0, x2 * (x1 - x2 * x3), e / 2.0 * u * u, 1.0,
            ],
        )
    }

    /// Columns are the left-invariant fields `ξ_i`.
    pub fn xi(x: &DVector<f64>) -> DMatrix<f64> {
        let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
        let cols = [
            [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0, 0.0, x1],
            [x2, 0.0, 1.0, 0.0, 0.0, x2 * x2 / 2.0],
            [-x1, x2, -2.0 * x3, 1.0, 0.0, 0.0],
            [0.0, x1, -x3 * x3, x3, (-2.0 * x4).exp(), x1 * x1 / 2.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ];
        DMatrix::from_fn(6, 6, |r, c| cols[c][r])
    }

    /// Columns are the right-invariant fields `η_i`.
    pub fn eta(x: &DVector<f64>) -> DMatrix<f64> {
        let (x2, x3, x4, x5) = (x[1], x[2], x[3], x[4]);
        let (ep, em) = (x4.exp(), (-x4).exp());
        let s = em + x3 * x5 * ep;
        let cols = [
            [-s, -x5 * ep, 0.0, 0.0, 0.0, -x2 * s],
            [-ep * x3, -ep, 0.0, 0.0, 0.0, -ep * x2 * x3],
            [0.0, 0.0, -(-2.0 * x4).exp(), -x5, x5 * x5, 0.0],
            [0.0, 0.0, 0.0, -1.0, 2.0 * x5, 0.0],
            [0.0, 0.0, 0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, -1.0],
        ];
        DMatrix::from_fn(6, 6, |r, c| cols[c][r])
    }

    pub fn compose(x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = 1.0 + x[2] * y[4];
        let w = x[1] + x[0] * y[4];
        DVector::from_row_slice(&[
            x[0] * (-y[3]).exp() + y[0] + y[2] * y[3].exp() * w,
            y[3].exp() * w + y[1],
            ((-2.0 * y[3]).exp() * x[2] + y[2] * d) / d,
            x[3] + y[3] + d.ln(),
            (x[4] + (-2.0 * x[3]).exp() * y[4] + x[2] * x[4] * y[4]) / d,
            x[5] + y[5] + 0.5 * x[0] * x[0] * y[4] + y[1] * y[2] * y[3].exp() * w + x[0] * y[1] * (-y[3]).exp()
                + 0.5 * y[2] * (2.0 * y[3]).exp() * w * w,
        ])
    }

    /// Ψ(q, z) on the coset space of `h = span{e4, e5}`, `q = (x¹, x², x³, x⁶)`.
    pub fn psi(q: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = 1.0 + q[2] * y[4];
        let w = q[1] + q[0] * y[4];
        DVector::from_row_slice(&[
            q[0] * (-y[3]).exp() + y[0] + y[2] * y[3].exp() * w,
            y[3].exp() * w + y[1],
            ((-2.0 * y[3]).exp() * q[2] + y[2] * d) / d,
            q[3] + y[5] + 0.5 * q[0] * q[0] * y[4] + y[1] * y[2] * y[3].exp() * w + q[0] * y[1] * (-y[3]).exp()
                + 0.5 * y[2] * (2.0 * y[3]).exp() * w * w,
        ])
    }

    /// Generators for `h = span{e4, e5}` as an `4×6` matrix, column `i` = `X_i`.
    pub fn generators(q: &DVector<f64>) -> DMatrix<f64> {
        let (q1, q2, q3) = (q[0], q[1], q[2]);
        let cols = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, q1],
            [q2, 0.0, 1.0, q2 * q2 / 2.0],
            [-q1, q2, -2.0 * q3, 0.0],
            [0.0, q1, -q3 * q3, q1 * q1 / 2.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        DMatrix::from_fn(4, 6, |r, c| cols[c][r])
    }

    /// Functions of `s = J²` that are even in `J`, evaluated without
    /// complex arithmetic: `(cosh J, sinh J / J, sinh 2J / 2J)`.
    fn even(s: f64) -> (f64, f64, f64) {
        if s >= 0.0 {
            let j = s.sqrt();
            if j == 0.0 {
                (1.0, 1.0, 1.0)
            } else {
                (j.cosh(), j.sinh() / j, (2.0 * j).sinh() / (2.0 * j))
            }
        } else {
            let w = (-s).sqrt();
            (w.cos(), w.sin() / w, (2.0 * w).sin() / (2.0 * w))
        }
    }

    pub fn j_squared(y: &DVector<f64>) -> f64 {
        y[3] * y[3] + y[2] * y[4]
    }

    /// Second-kind coordinates of `exp(y^i e_i)`. `variant_x2` selects the
    /// `x²` formula exactly as variant instead of the corrected one.
    pub fn to_second(y: &DVector<f64>, variant_x2: bool) -> DVector<f64> {
        let (y1, y2, y3, y4, y5, y6) = (y[0], y[1], y[2], y[3], y[4], y[5]);
        let s = j_squared(y);
        let (c, sj, s2j) = even(s);
        // sinh²(J/2)/J² = (cosh J − 1)/(2J²), cosh 2J = 2cosh²J − 1
        let half = if s == 0.0 { 0.25 } else { (c - 1.0) / (2.0 * s) };
        let c2 = 2.0 * c * c - 1.0;
        let den = c + y4 * sj;
        let x1 = y1 * sj + 2.0 * (y2 * y3 - y1 * y4) * half;
        let x2 = if variant_x2 {
            y2 * sj + 2.0 * (y2 * y3 + y1 * y5) * half
        } else {
            y2 * sj + 2.0 * (y2 * y4 + y1 * y5) * half
        };
        let x3 = y3 * (s2j + y4 * sj * sj) / (den * den);
        let x4 = den.ln();
        let x5 = y5 * sj / den;
        let x6 = y6
            + (y1 * y2 * c - y1 * y2 - y2 * y2 * y3 / 2.0 + y1 * y1 * y5 / 2.0 + y1 * y2 * y4) / s
            + (2.0 * s2j * (y2 * y2 * y3 + y1 * y1 * y5) / 4.0 - sj * (y1 * y2 * y4 + y1 * y1 * y5)) / s
            + (-2.0 * y1 * y2 * y3 * y5 - y2 * y2 * y3 * y4 + y1 * y1 * y4 * y5) * (c - c2 / 4.0 - 0.75) / (s * s);
        DVector::from_row_slice(&[x1, x2, x3, x4, x5, x6])
    }
}
