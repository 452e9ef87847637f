//! Oracles shared by the integration tests. Nothing here calls into the
//! integrator or the radial transport code.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use radial_gauge::{BundleSpec, ConnectionField, Domain};

/// `exp(A)` by scaling and squaring around a 64-term Taylor series.
pub fn expm_taylor(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.iter().map(|v| v.abs()).sum::<f64>();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled = a * scale;
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for m in 1..=64 {
        term = &term * &scaled / m as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Christoffel symbols `Γ^s_ij = ½ g^{sl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij)` of the
/// stereographic round-sphere metric `g = 4R⁴ (R² + |z|²)⁻² δ`, returned as
/// matrices `M_i[(s, j)] = Γ^s_ij`.
pub fn sphere_christoffel_oracle(z: &[f64], radius: f64) -> Vec<DMatrix<f64>> {
    let r4 = radius.powi(4);
    let q = radius * radius + z[0] * z[0] + z[1] * z[1];
    let conformal = 4.0 * r4 / (q * q);
    let g = DMatrix::identity(2, 2) * conformal;
    let g_inv = g.clone().try_inverse().unwrap();
    // ∂_l g_ab = δ_ab · (−16 R⁴ z_l q⁻³)
    let dg = |l: usize, a: usize, b: usize| {
        if a == b {
            -16.0 * r4 * z[l] / (q * q * q)
        } else {
            0.0
        }
    };
    (0..2)
        .map(|i| {
            DMatrix::from_fn(2, 2, |s, j| {
                (0..2)
                    .map(|l| 0.5 * g_inv[(s, l)] * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j)))
                    .sum()
            })
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector<R: Rng>(rng: &mut R, len: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.gen_range(-scale..=scale))
}

pub fn random_point<R: Rng>(rng: &mut R, n: usize, half: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-half..=half)).collect()
}

/// Random matrix with Frobenius norm at most `max_norm`.
pub fn random_matrix<R: Rng>(rng: &mut R, k: usize, max_norm: f64) -> DMatrix<f64> {
    let m = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..=1.0));
    let target = rng.gen_range(0.1..=max_norm);
    &m * (target / m.norm())
}

pub fn unit_box(n: usize, half: f64) -> Domain {
    Domain::symmetric(n, half).unwrap()
}

pub fn scalar_field(expr: &str, half: f64) -> ConnectionField {
    let spec = BundleSpec::new(1, 1, unit_box(1, half)).unwrap();
    ConnectionField::from_expressions(spec, &[vec![vec![expr]]]).unwrap()
}

pub fn rotation(omega: f64) -> ConnectionField {
    ConnectionField::rotation(unit_box(2, 1.0), omega).unwrap()
}

/// The abelian field with `Γ_1 = −x2`, `Γ_2 = x1` (curvature `F_12 = 2`).
pub fn abelian_vortex() -> ConnectionField {
    ConnectionField::abelian_poly(unit_box(2, 1.0), &["-x2", "x1"]).unwrap()
}

/// An abelian field whose radial section is not constant.
pub fn abelian_wavy() -> ConnectionField {
    ConnectionField::abelian_poly(unit_box(2, 1.0), &["x1*x2 + 0.5", "sin(x1) - x2^2"]).unwrap()
}

pub fn sphere() -> ConnectionField {
    ConnectionField::sphere_levicivita(unit_box(2, 1.0), 1.0).unwrap()
}

/// A non-commuting constant family on a rank-3 bundle over R².
pub fn constant_pair() -> ConnectionField {
    let c1 = DMatrix::from_row_slice(3, 3, &[0.0, 0.4, -0.2, -0.4, 0.1, 0.3, 0.2, -0.3, 0.0]);
    let c2 = DMatrix::from_row_slice(3, 3, &[0.2, -0.1, 0.0, 0.5, 0.0, -0.4, 0.1, 0.3, -0.2]);
    ConnectionField::constant(
        BundleSpec::new(2, 3, unit_box(2, 1.0)).unwrap(),
        vec![c1, c2],
    )
    .unwrap()
}

pub fn all_builtins() -> Vec<(&'static str, ConnectionField)> {
    vec![
        (
            "flat",
            ConnectionField::flat(BundleSpec::new(3, 2, unit_box(3, 1.0)).unwrap()),
        ),
        ("constant", constant_pair()),
        ("abelian_vortex", abelian_vortex()),
        ("abelian_wavy", abelian_wavy()),
        ("sphere", sphere()),
        ("rotation", rotation(1.0)),
    ]
}
