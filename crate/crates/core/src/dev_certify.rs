//! Positivity certificates for developing maps.
//!
//! Two immersion quantities are evaluated in closed form and against the
//! full 7x7 pairing they come from. Polynomial positivity is certified with
//! exact Sturm sequences. The Hitchin comparison checks are small dense
//! eigenproblems.

use crate::scalar::Rational;
use nalgebra::{DMatrix, Matrix3, SMatrix, SVector};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, SQRT_2};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("parameter {0} outside [0, sqrt(5/3)]")]
    OutOfRange(f64),
    #[error("grid size {0} is below 64")]
    GridTooSmall(usize),
    #[error("eigen check failed: {0}")]
    Eigen(String),
}

/// Tolerance for the equality constraints of a sample.
pub const SAMPLE_TOL: f64 = 1e-9;
/// Default distance kept from the boundary |delta0| = 1.
pub const DELTA_MARGIN: f64 = 1e-3;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check(cond: bool, msg: &str) -> Result<(), CertifyError> {
    if cond {
        Ok(())
    } else {
        Err(CertifyError::InvalidSample(msg.to_string()))
    }
}

fn finite(vals: &[f64]) -> Result<(), CertifyError> {
    check(vals.iter().all(|v| v.is_finite()), "non-finite entry")
}

type CMat7 = SMatrix<Complex64, 7, 7>;
type CVec7 = SVector<Complex64, 7>;

// ---------------------------------------------------------------------------
// Einstein-side immersion quantity

/// Point of the unit fiber together with the off-Fuchsian Higgs entries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BetaSample {
    pub x0: f64,
    pub z2: Complex64,
    pub z: Complex64,
    pub alpha0: Complex64,
    pub delta0: Complex64,
}

impl BetaSample {
    /// Requires x0² + 2|z2|² = 1, |z|² = 1/2, |alpha0| ≤ √2, |delta0| ≤ 1.
    pub fn new(
        x0: f64,
        z2: Complex64,
        z: Complex64,
        alpha0: Complex64,
        delta0: Complex64,
    ) -> Result<Self, CertifyError> {
        finite(&[x0, z2.re, z2.im, z.re, z.im, alpha0.re, alpha0.im, delta0.re, delta0.im])?;
        check((x0 * x0 + 2.0 * z2.norm_sqr() - 1.0).abs() <= SAMPLE_TOL, "x0^2 + 2|z2|^2 != 1")?;
        check((z.norm_sqr() - 0.5).abs() <= SAMPLE_TOL, "|z|^2 != 1/2")?;
        check(alpha0.norm() <= SQRT_2 + SAMPLE_TOL, "|alpha0| > sqrt 2")?;
        check(delta0.norm() <= 1.0 + SAMPLE_TOL, "|delta0| > 1")?;
        Ok(BetaSample { x0, z2, z, alpha0, delta0 })
    }

    /// λ² = 2x0² + |z2|², equal to (3x0² + 1)/2 on valid samples.
    pub fn lambda_sq(&self) -> f64 {
        2.0 * self.x0 * self.x0 + self.z2.norm_sqr()
    }

    /// Uniform phases, x0 uniform in [-1, 1], alpha0 and delta0 uniform in
    /// their disks (delta0 in the disk of radius `delta_max`).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, delta_max: f64) -> Self {
        let x0: f64 = rng.gen_range(-1.0..=1.0);
        let z2 = Complex64::from_polar(((1.0 - x0 * x0) / 2.0).max(0.0).sqrt(), rng.gen_range(0.0..2.0 * PI));
        let z = Complex64::from_polar(0.5f64.sqrt(), rng.gen_range(0.0..2.0 * PI));
        let alpha0 = Complex64::from_polar(SQRT_2 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
        let delta0 = Complex64::from_polar(delta_max * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
        BetaSample { x0, z2, z, alpha0, delta0 }
    }
}

/// Closed form of A′ without checking the sample constraints.
pub fn beta_immersion_formula(x0: f64, z2: Complex64, z: Complex64, alpha0: Complex64, delta0: Complex64) -> f64 {
    let lam2 = 2.0 * x0 * x0 + z2.norm_sqr();
    let zb = z.conj();
    let n2 = z2.norm_sqr();
    4.0 * x0 * x0 + 4.0 * lam2 * n2 + 4.0 * n2 + 8.0 * lam2 * x0 * x0
        - 8.0 * (z2 * z2 * zb * zb).re
        - 2.0 * SQRT_2 * x0 * (2.0 * lam2 - 1.0) * (I * alpha0 * z2).re
        + (4.0 * delta0 * (-2.0 * x0 * x0 * zb * zb + lam2 * z2.conj() * z2.conj())).re
}

/// A′ for a validated sample.
pub fn beta_immersion_quantity(s: &BetaSample) -> Result<f64, CertifyError> {
    let s = BetaSample::new(s.x0, s.z2, s.z, s.alpha0, s.delta0)?;
    Ok(beta_immersion_formula(s.x0, s.z2, s.z, s.alpha0, s.delta0))
}

fn beta_higgs(alpha0: Complex64, delta0: Complex64) -> (CMat7, CMat7) {
    let s2 = c(SQRT_2);
    let mut p0 = CMat7::zeros();
    p0[(0, 1)] = c(1.0);
    p0[(1, 0)] = c(1.0);
    p0[(5, 6)] = c(1.0);
    p0[(6, 5)] = c(1.0);
    p0[(2, 3)] = I * s2;
    p0[(3, 2)] = -I * s2;
    p0[(3, 4)] = I * s2;
    p0[(4, 3)] = -I * s2;
    let mut p = p0;
    p[(0, 5)] = delta0;
    p[(1, 6)] = delta0;
    p[(5, 0)] = delta0.conj();
    p[(6, 1)] = delta0.conj();
    p[(1, 2)] = alpha0.conj();
    p[(2, 1)] = alpha0;
    p[(4, 5)] = alpha0.conj();
    p[(5, 4)] = alpha0;
    (p0, p)
}

/// A′ as the pairing ⟨(ψψ₀ + ψ₀ψ)Z, Z⟩ with Z the fiber vector expanded in a
/// unitary cross-product basis.
pub fn beta_immersion_oracle(s: &BetaSample) -> f64 {
    let (p0, p) = beta_higgs(s.alpha0, s.delta0);
    let m = p * p0 + p0 * p;
    let lam = s.lambda_sq().sqrt();
    let (x0, z2, z) = (c(s.x0), s.z2, s.z);
    let r2i = I * c(SQRT_2);
    let zv = CVec7::from([
        r2i * x0 * z,
        c(lam) * z2,
        z2.conj() * z,
        c(lam) * x0,
        z2 * z.conj(),
        c(lam) * z2.conj(),
        -r2i * x0 * z.conj(),
    ]);
    (m * zv).dot(&zv.conjugate()).re
}

/// Lower bound x(12x + 4 − 6√2·√(x(1−x))) for A′ in terms of x = x0².
pub fn beta_lower_bound(x: f64) -> f64 {
    x * (12.0 * x + 4.0 - 6.0 * SQRT_2 * (x * (1.0 - x)).max(0.0).sqrt())
}

// ---------------------------------------------------------------------------
// Photon-side immersion quantity

/// Mixing angle (a, b), phase pair (x, y) and the off-Fuchsian entry beta0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaSample {
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub y: f64,
    pub beta0: Complex64,
}

impl AlphaSample {
    /// Requires a² + b² = 1, x² + y² = 1 and |beta0| ≤ √(3/5).
    pub fn new(a: f64, b: f64, x: f64, y: f64, beta0: Complex64) -> Result<Self, CertifyError> {
        finite(&[a, b, x, y, beta0.re, beta0.im])?;
        check((a * a + b * b - 1.0).abs() <= SAMPLE_TOL, "a^2 + b^2 != 1")?;
        check((x * x + y * y - 1.0).abs() <= SAMPLE_TOL, "x^2 + y^2 != 1")?;
        check(beta0.norm() <= (0.6f64).sqrt() + SAMPLE_TOL, "|beta0| > sqrt(3/5)")?;
        Ok(AlphaSample { a, b, x, y, beta0 })
    }

    /// λ with λ⁻² = a² + 4b².
    pub fn lambda(&self) -> f64 {
        1.0 / (self.a * self.a + 4.0 * self.b * self.b).sqrt()
    }

    /// Phase frame (z, w) with w = 1 and z the principal root of x − iy, so
    /// that x = Re(z² w̄) and y = Re(i z² w̄).
    pub fn frame(&self) -> (Complex64, Complex64) {
        (Complex64::new(self.x, -self.y).sqrt(), c(1.0))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let t: f64 = rng.gen_range(0.0..2.0 * PI);
        let p: f64 = rng.gen_range(0.0..2.0 * PI);
        let beta0 = Complex64::from_polar((0.6 * rng.gen::<f64>()).sqrt(), rng.gen_range(0.0..2.0 * PI));
        AlphaSample { a: t.cos(), b: t.sin(), x: p.cos(), y: p.sin(), beta0 }
    }
}

/// The five b-polynomials of the reduced form, with the two mixed ones
/// already multiplied by 6ab.
pub fn alpha_coefficients(a: f64, b: f64) -> [f64; 5] {
    let b2 = b * b;
    let b4 = b2 * b2;
    let b6 = b4 * b2;
    let b8 = b4 * b4;
    [
        4.0 + 16.0 * b2 + 4.0 * b4 - 8.0 * b6,
        8.0 * b2 + 8.0 * b4 - 16.0 * b8,
        2.0 + 2.0 * b2 - 2.0 * b4 - 2.0 * b6,
        6.0 * a * b * (1.0 + 3.0 * b2 - 8.0 * b6),
        6.0 * a * b * (2.0 + 3.0 * b2 - b4),
    ]
}

/// 2λ⁻²A in the reduced five-coefficient form.
pub fn alpha_immersion_quantity(s: &AlphaSample) -> Result<f64, CertifyError> {
    let s = AlphaSample::new(s.a, s.b, s.x, s.y, s.beta0)?;
    let (z, w) = s.frame();
    let r1 = (s.beta0 * z.conj() * w).re;
    let r2 = (I * s.beta0 * z.conj() * w).re;
    let [a1, a2, a3, a4, a5] = alpha_coefficients(s.a, s.b);
    Ok(a1 - s.x * s.x * a2 - s.y * s.y * a3 - s.x * r1 * a4 - s.y * r2 * a5)
}

fn alpha_higgs(beta0: Complex64) -> (CMat7, CMat7) {
    let s2 = c(SQRT_2);
    let bb = beta0.conj();
    let mut p = CMat7::zeros();
    p[(0, 1)] = bb;
    p[(1, 0)] = beta0;
    p[(1, 2)] = c(1.0);
    p[(2, 1)] = c(1.0);
    p[(2, 3)] = I * s2 * bb;
    p[(3, 2)] = -I * s2 * beta0;
    p[(3, 4)] = I * s2 * bb;
    p[(4, 3)] = -I * s2 * beta0;
    p[(4, 5)] = c(1.0);
    p[(5, 4)] = c(1.0);
    p[(5, 6)] = bb;
    p[(6, 5)] = beta0;
    let mut p0 = CMat7::zeros();
    p0[(1, 2)] = c(1.0);
    p0[(2, 1)] = c(1.0);
    p0[(4, 5)] = c(1.0);
    p0[(5, 4)] = c(1.0);
    (p0, p)
}

fn ip(x: &CVec7, y: &CVec7) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a * b.conj()).re).sum()
}

/// 2λ⁻²A from the ten-term pairing expression, built from the tangent frame
/// (u, v) and the normal pair of the photon fiber.
pub fn alpha_immersion_oracle(s: &AlphaSample) -> f64 {
    let (p0, p) = alpha_higgs(s.beta0);
    let (z, w) = s.frame();
    let (a, b) = (s.a, s.b);
    let lam = s.lambda();
    let r = c(1.0 / SQRT_2);
    let mut u = CVec7::zeros();
    u[1] = z * r;
    u[5] = z.conj() * r;
    let mut v = CVec7::zeros();
    v[1] = c(b) * I * z * r;
    v[3] = c(a);
    v[5] = -c(b) * I * z.conj() * r;
    let k = lam / SQRT_2;
    let mut zz = CVec7::zeros();
    zz[0] = c(k * (a * a + 2.0 * b * b)) * w;
    zz[2] = c(k * a * b) * w * z.conj();
    zz[4] = c(k * a * b) * w.conj() * z;
    zz[6] = c(k * (a * a + 2.0 * b * b)) * w.conj();
    let m = k * (3.0 * a * b * b + a * a * a);
    let mut ww = CVec7::zeros();
    ww[0] = -c(k * 2.0 * b * b * b) * I * w;
    ww[2] = c(m) * I * w * z.conj();
    ww[4] = -c(m) * I * w.conj() * z;
    ww[6] = c(k * 2.0 * b * b * b) * I * w.conj();

    let pp = p0 * p;
    let total = ip(&(pp * u), &u) + ip(&(pp * v), &v) + ip(&(pp * zz), &zz) + ip(&(pp * ww), &ww)
        - 2.0 * ip(&(p0 * u), &zz) * ip(&(p * u), &zz)
        - 2.0 * ip(&(p0 * v), &ww) * ip(&(p * v), &ww)
        - ip(&(p0 * u), &ww) * ip(&(p * u), &ww)
        - ip(&(p0 * u), &ww) * ip(&(p * v), &zz)
        - ip(&(p0 * v), &zz) * ip(&(p * u), &ww)
        - ip(&(p0 * v), &zz) * ip(&(p * v), &zz);
    2.0 * total / (lam * lam)
}

// ---------------------------------------------------------------------------
// Exact polynomials and Sturm sequences

/// Polynomial with rational coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn poly_eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    let mut q = vec![Rational::zero(); a.len().saturating_sub(db).max(1)];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let c = r.last().unwrap() / lb;
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] -= &c * bi;
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    poly_divrem(a, b).1
}

fn sign(x: &Rational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn changes(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

impl RationalPoly {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self, CertifyError> {
        let coeffs = trim(coeffs);
        if coeffs.is_empty() {
            return Err(CertifyError::ZeroPolynomial);
        }
        Ok(RationalPoly { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, CertifyError> {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &Rational {
        self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        poly_eval(&self.coeffs, x)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Derivative, or `None` for constants.
    pub fn derivative(&self) -> Option<RationalPoly> {
        let d: Vec<Rational> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rational::from_integer(k.into()))
            .collect();
        RationalPoly::new(d).ok()
    }

    pub fn add(&self, o: &RationalPoly) -> Vec<Rational> {
        let n = self.coeffs.len().max(o.coeffs.len());
        trim((0..n)
            .map(|k| {
                self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
                    + o.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
            })
            .collect())
    }

    pub fn mul(&self, o: &RationalPoly) -> RationalPoly {
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly { coeffs: out }
    }

    pub fn scale(&self, s: &Rational) -> Vec<Rational> {
        trim(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Canonical Sturm sequence p, p', -rem(p, p'), ...
    pub fn sturm_sequence(&self) -> Vec<Vec<Rational>> {
        let mut seq = vec![self.coeffs.clone()];
        if let Some(d) = self.derivative() {
            seq.push(d.coeffs);
            loop {
                let n = seq.len();
                let r = poly_rem(&seq[n - 2], &seq[n - 1]);
                if r.is_empty() {
                    break;
                }
                seq.push(r.into_iter().map(|c| -c).collect());
            }
        }
        seq
    }

    /// Number of distinct real roots.
    pub fn real_root_count(&self) -> usize {
        let seq = self.sturm_sequence();
        let at_pos = changes(seq.iter().map(|p| sign(p.last().unwrap())));
        let at_neg = changes(seq.iter().map(|p| {
            let s = sign(p.last().unwrap());
            if (p.len() - 1) % 2 == 1 {
                -s
            } else {
                s
            }
        }));
        at_neg - at_pos
    }

    /// Cauchy bound: every real root lies in (-M, M).
    pub fn root_bound(&self) -> Rational {
        let lead = self.leading().abs();
        let m = self.coeffs[..self.degree()]
            .iter()
            .map(|c| c.abs() / &lead)
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        m + Rational::one()
    }

    /// Disjoint intervals (lo, hi], each containing exactly one distinct real
    /// root, narrowed until hi − lo ≤ `width`.
    pub fn isolate_roots(&self, width: &Rational) -> Vec<(Rational, Rational)> {
        // Dividing out the gcd keeps the counts valid at repeated roots, where
        // every member of the raw sequence vanishes.
        let raw = self.sturm_sequence();
        let g = raw.last().unwrap().clone();
        let seq: Vec<Vec<Rational>> = raw.iter().map(|p| poly_divrem(p, &g).0).collect();
        let v = |x: &Rational| changes(seq.iter().map(|p| sign(&poly_eval(p, x))));
        let m = self.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-m.clone(), m)];
        let two = Rational::from_integer(2.into());
        while let Some((lo, hi)) = stack.pop() {
            let count = v(&lo) - v(&hi);
            if count == 0 {
                continue;
            }
            if count == 1 && &hi - &lo <= *width {
                out.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / &two;
            stack.push((mid.clone(), hi));
            stack.push((lo, mid));
        }
        out.sort();
        out
    }
}

/// Outcome of a positivity check over ℝ.
#[derive(Clone, Debug, PartialEq)]
pub enum PolyCertificate {
    /// No real roots and p(0) > 0.
    Positive { value_at_zero: Rational },
    /// An interval (lo, hi] containing a point where p ≤ 0.
    Counterexample { lo: Rational, hi: Rational },
}

impl PolyCertificate {
    pub fn is_positive(&self) -> bool {
        matches!(self, PolyCertificate::Positive { .. })
    }
}

fn isolation_width() -> Rational {
    Rational::new(1.into(), (1u64 << 40).into())
}

pub fn certify_polynomial_positive(p: &RationalPoly) -> Result<PolyCertificate, CertifyError> {
    let p0 = p.eval(&Rational::zero());
    if p.real_root_count() == 0 {
        if p0.is_positive() {
            return Ok(PolyCertificate::Positive { value_at_zero: p0 });
        }
        return Ok(PolyCertificate::Counterexample { lo: Rational::zero(), hi: Rational::zero() });
    }
    let (lo, hi) = p.isolate_roots(&isolation_width()).swap_remove(0);
    Ok(PolyCertificate::Counterexample { lo, hi })
}

/// Numerical global minimum over ℝ from isolated critical points. `None` for
/// polynomials unbounded below.
pub fn polynomial_minimum(p: &RationalPoly) -> Option<f64> {
    if p.degree() % 2 == 1 || p.leading().is_negative() {
        return None;
    }
    let Some(d) = p.derivative() else {
        return p.coeffs[0].to_f64();
    };
    let two = Rational::from_integer(2.into());
    d.isolate_roots(&isolation_width())
        .into_iter()
        .map(|(lo, hi)| p.eval(&((lo + hi) / &two)).to_f64().unwrap_or(f64::NAN))
        .reduce(f64::min)
}

fn even_poly(coeffs: &[i64]) -> RationalPoly {
    let mut out = vec![0i64; 2 * coeffs.len() - 1];
    for (k, &c) in coeffs.iter().enumerate() {
        out[2 * k] = c;
    }
    RationalPoly::from_i64(&out).expect("nonzero")
}

fn poly(v: Vec<Rational>) -> RationalPoly {
    RationalPoly::new(v).expect("nonzero")
}

/// The three quadratic-form coefficients in the variable b, built from the
/// reduced-form polynomials with a² = 1 − b².
#[derive(Clone, Debug, PartialEq)]
pub struct PhoPolynomials {
    pub c_xx: RationalPoly,
    pub c_xy: RationalPoly,
    pub c_yy: RationalPoly,
}

pub fn pho_coefficient_polys() -> PhoPolynomials {
    let a1 = even_poly(&[4, 16, 4, -8]);
    let a2 = even_poly(&[0, 8, 8, 0, -16]);
    let a3 = even_poly(&[2, 2, -2, -2]);
    // 36 a² b² (...)² with a² = 1 − b²
    let ab2 = even_poly(&[0, 36, -36]);
    let f4 = even_poly(&[1, 3, 0, -8]);
    let f5 = even_poly(&[2, 3, -1]);
    let a4sq = ab2.mul(&f4).mul(&f4);
    let a5sq = ab2.mul(&f5).mul(&f5);
    let neg = -Rational::one();
    let d2 = poly(a1.add(&poly(a2.scale(&neg))));
    let d3 = poly(a1.add(&poly(a3.scale(&neg))));
    let k = Rational::new((-3).into(), 5.into());
    let c_xx = poly(d2.mul(&d2).add(&poly(a4sq.scale(&k))));
    let c_yy = poly(d3.mul(&d3).add(&poly(a5sq.scale(&k))));
    let cross = poly(d2.mul(&d3).scale(&Rational::from_integer(2.into())));
    let c_xy = poly(cross.add(&poly(poly(a4sq.add(&a5sq)).scale(&k))));
    PhoPolynomials { c_xx, c_xy, c_yy }
}

impl PhoPolynomials {
    pub fn named(&self) -> [(&'static str, &RationalPoly); 3] {
        [("C_XX", &self.c_xx), ("C_XY", &self.c_xy), ("C_YY", &self.c_yy)]
    }

    /// X²C_XX + XY·C_XY + Y²C_YY at b.
    pub fn quadratic_form(&self, b: f64, x: f64, y: f64) -> f64 {
        x * x * self.c_xx.eval_f64(b) + x * y * self.c_xy.eval_f64(b) + y * y * self.c_yy.eval_f64(b)
    }
}

// ---------------------------------------------------------------------------
// Certificates

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Positive,
    Counterexample,
}

impl Verdict {
    pub fn is_success(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Positive)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    pub min_value: f64,
    pub samples: usize,
}

pub fn polynomial_certificate(name: &str, p: &RationalPoly) -> Result<Certificate, CertifyError> {
    let cert = certify_polynomial_positive(p)?;
    let (verdict, witness, min_value) = match &cert {
        PolyCertificate::Positive { value_at_zero } => (
            Verdict::Positive,
            serde_json::json!({ "value_at_zero": value_at_zero.to_string(), "real_roots": 0 }),
            polynomial_minimum(p).unwrap_or(f64::NAN),
        ),
        PolyCertificate::Counterexample { lo, hi } => {
            let mid = (lo + hi) / Rational::from_integer(2.into());
            (
                Verdict::Counterexample,
                serde_json::json!({ "lo": lo.to_string(), "hi": hi.to_string() }),
                p.eval(&mid).to_f64().unwrap_or(f64::NAN),
            )
        }
    };
    Ok(Certificate { name: name.to_string(), verdict, witness: Some(witness), min_value, samples: 0 })
}

pub fn pho_polynomial_certificates() -> Vec<Certificate> {
    let polys = pho_coefficient_polys();
    polys
        .named()
        .into_iter()
        .map(|(n, p)| polynomial_certificate(n, p).expect("nonzero polynomial"))
        .collect()
}

const BATCH: usize = 8192;

fn sweep<T, F, G>(samples: usize, seed: u64, draw: F, value: G) -> (f64, Option<T>)
where
    T: Send + Copy,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
    G: Fn(&T) -> f64 + Sync,
{
    let batches = samples.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let n = BATCH.min(samples - k * BATCH);
            let mut best = (f64::INFINITY, None);
            for _ in 0..n {
                let s = draw(&mut rng);
                let v = value(&s);
                if !(v >= best.0) {
                    best = (v, Some(s));
                }
            }
            best
        })
        .reduce(|| (f64::INFINITY, None), |a, b| if b.0 < a.0 || b.0.is_nan() { b } else { a })
}

/// Minimum of A′ over random valid samples with |delta0| ≤ 1 − margin.
pub fn sweep_beta_immersion(samples: usize, seed: u64, delta_margin: f64) -> Certificate {
    let dmax = 1.0 - delta_margin;
    let (min_value, arg) = sweep(
        samples,
        seed,
        |r| BetaSample::random(r, dmax),
        |s| beta_immersion_formula(s.x0, s.z2, s.z, s.alpha0, s.delta0),
    );
    Certificate {
        name: "beta-immersion".into(),
        verdict: if min_value > 0.0 { Verdict::Pass } else { Verdict::Fail },
        witness: arg.map(|s| serde_json::to_value(s).unwrap()),
        min_value,
        samples,
    }
}

/// Minimum of 2λ⁻²A over random valid samples.
pub fn sweep_alpha_immersion(samples: usize, seed: u64) -> Certificate {
    let (min_value, arg) = sweep(
        samples,
        seed,
        |r| AlphaSample::random(r),
        |s| alpha_immersion_quantity(s).unwrap_or(f64::NAN),
    );
    Certificate {
        name: "alpha-immersion".into(),
        verdict: if min_value > 0.0 { Verdict::Pass } else { Verdict::Fail },
        witness: arg.map(|s| serde_json::to_value(s).unwrap()),
        min_value,
        samples,
    }
}

// ---------------------------------------------------------------------------
// Hitchin comparison: positivity on the span

pub fn span_upper_bound() -> f64 {
    (5.0f64 / 3.0).sqrt()
}

/// Real symmetric tridiagonal matrix with off-diagonal (1, a, √2, √2, a, 1).
pub fn span_matrix(a_t: f64) -> SMatrix<f64, 7, 7> {
    let off = [1.0, a_t, SQRT_2, SQRT_2, a_t, 1.0];
    let mut m = SMatrix::<f64, 7, 7>::zeros();
    for (k, &o) in off.iter().enumerate() {
        m[(k, k + 1)] = o;
        m[(k + 1, k)] = o;
    }
    m
}

/// Eigenvalues √6, 2√(2/3), √(2/3) of the endpoint matrix.
pub fn span_eigenvalues() -> [f64; 3] {
    [6f64.sqrt(), 2.0 * (2.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt()]
}

/// Eigenvectors for `span_eigenvalues`, as rows.
pub fn span_eigenvectors() -> [[f64; 7]; 3] {
    let s = f64::sqrt;
    [
        [1.0, s(6.0), s(15.0), 2.0 * s(5.0), s(15.0), s(6.0), 1.0],
        [-1.0, -2.0 * s(2.0 / 3.0), -s(5.0 / 3.0), 0.0, s(5.0 / 3.0), 2.0 * s(2.0 / 3.0), 1.0],
        [1.0, s(2.0 / 3.0), -s(1.0 / 15.0), -2.0 / s(5.0), -s(1.0 / 15.0), s(2.0 / 3.0), 1.0],
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpanReport {
    pub a_t: f64,
    /// Restricted form ⟨A_t v_i, v_j⟩.
    pub gram: [[f64; 3]; 3],
    pub leading_minors: [f64; 3],
    /// ⟨A_t v_i, A_t v_i⟩.
    pub image_norms: [f64; 3],
    pub positive: bool,
}

pub fn hitchin_span_report(a_t: f64) -> Result<SpanReport, CertifyError> {
    if !(0.0..=span_upper_bound() + 1e-12).contains(&a_t) {
        return Err(CertifyError::OutOfRange(a_t));
    }
    let m = span_matrix(a_t);
    let vs: Vec<SVector<f64, 7>> = span_eigenvectors().iter().map(|v| SVector::from(*v)).collect();
    let mv: Vec<_> = vs.iter().map(|v| m * v).collect();
    let mut g = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            g[(i, j)] = vs[i].dot(&mv[j]);
        }
    }
    let minors = [
        g[(0, 0)],
        g.fixed_view::<2, 2>(0, 0).determinant(),
        g.determinant(),
    ];
    let mut gram = [[0.0; 3]; 3];
    for (i, row) in gram.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = g[(i, j)];
        }
    }
    Ok(SpanReport {
        a_t,
        gram,
        leading_minors: minors,
        image_norms: [mv[0].norm_squared(), mv[1].norm_squared(), mv[2].norm_squared()],
        positive: minors.iter().all(|&d| d > 0.0),
    })
}

/// True iff the restricted form is positive definite.
pub fn hitchin_span_positivity(a_t: f64) -> Result<bool, CertifyError> {
    Ok(hitchin_span_report(a_t)?.positive)
}

pub fn span_sweep(points: usize) -> Certificate {
    let top = span_upper_bound();
    let mut min_value = f64::INFINITY;
    let mut witness = None;
    let mut ok = true;
    for k in 0..points {
        let t = if points == 1 { top } else { top * k as f64 / (points - 1) as f64 };
        let r = hitchin_span_report(t).expect("in range");
        let m = r.leading_minors.iter().cloned().fold(f64::INFINITY, f64::min);
        if m < min_value {
            min_value = m;
            witness = Some(serde_json::json!({ "a_t": t }));
        }
        ok &= r.positive;
    }
    Certificate {
        name: "hitchin-span".into(),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        witness,
        min_value,
        samples: points,
    }
}

// ---------------------------------------------------------------------------
// Fuchsian photon transversality

/// Hermitian Higgs matrix divided by ‖α‖ at the Fuchsian point.
pub fn transversality_matrix() -> CMat7 {
    let r35 = c((0.6f64).sqrt());
    let r65 = (1.2f64).sqrt();
    let mut m = CMat7::zeros();
    for (i, j, v) in [(0, 1, r35), (5, 6, r35), (1, 2, c(1.0)), (4, 5, c(1.0))] {
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    m[(2, 3)] = I * r65;
    m[(3, 2)] = -I * r65;
    m[(3, 4)] = I * r65;
    m[(4, 3)] = -I * r65;
    m
}

/// The two top eigenpairs (√(18/5), E1) and (√(8/5), E2).
pub fn transversality_eigenvectors() -> [(f64, CVec7); 2] {
    let s = f64::sqrt;
    let e1 = CVec7::from([-I, -I * s(6.0), -I * s(15.0), c(-2.0 * s(5.0)), I * s(15.0), I * s(6.0), I]);
    let e2 = CVec7::from([s(3.0), 2.0 * s(2.0), s(5.0), 0.0, s(5.0), 2.0 * s(2.0), s(3.0)].map(c));
    [(s(3.6), e1), (s(1.6), e2)]
}

/// Complex bilinear extension of the quadratic form in a unitary
/// cross-product basis ordered 3..−3.
pub fn bilinear_pairing(x: &CVec7, y: &CVec7) -> Complex64 {
    (0..7)
        .map(|p| {
            let s = if p % 2 == 0 { -1.0 } else { 1.0 };
            c(s) * x[p] * y[6 - p]
        })
        .sum()
}

/// The null vector (e^{iθ}, e^{iα}, 0, 0, 0, e^{−iα}, e^{−iθ}).
pub fn null_vector(theta: f64, alpha: f64) -> CVec7 {
    let mut x = CVec7::zeros();
    x[0] = Complex64::from_polar(1.0, theta);
    x[1] = Complex64::from_polar(1.0, alpha);
    x[5] = Complex64::from_polar(1.0, -alpha);
    x[6] = Complex64::from_polar(1.0, -theta);
    x
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransversalityReport {
    pub grid_n: usize,
    pub min_value: f64,
    pub argmin: (f64, f64),
    pub eigen_residuals: [f64; 2],
    pub top_eigenvalues: [f64; 2],
}

/// Minimum of |q(x, Ê1)|² + |q(x, Ê2)|² over a grid_n × grid_n phase grid.
pub fn fuchsian_pho_transversality(grid_n: usize) -> Result<TransversalityReport, CertifyError> {
    if grid_n < 64 {
        return Err(CertifyError::GridTooSmall(grid_n));
    }
    let m = transversality_matrix();
    let pairs = transversality_eigenvectors();
    let mut residuals = [0.0; 2];
    for (k, (l, e)) in pairs.iter().enumerate() {
        residuals[k] = (m * e - e * c(*l)).norm();
    }
    let dm = DMatrix::from_fn(7, 7, |i, j| m[(i, j)]);
    let mut ev: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let top = [ev[0], ev[1]];
    for k in 0..2 {
        if residuals[k] > 1e-10 || (top[k] - pairs[k].0).abs() > 1e-10 {
            return Err(CertifyError::Eigen(format!(
                "pair {k}: residual {:e}, eigenvalue {} vs {}",
                residuals[k], top[k], pairs[k].0
            )));
        }
    }
    let e1 = pairs[0].1.normalize();
    let e2 = pairs[1].1.normalize();
    let step = 2.0 * PI / grid_n as f64;
    let (min_value, argmin) = (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let th = i as f64 * step;
            let mut best = (f64::INFINITY, (th, 0.0));
            for j in 0..grid_n {
                let al = j as f64 * step;
                let x = null_vector(th, al);
                let v = bilinear_pairing(&x, &e1).norm_sqr() + bilinear_pairing(&x, &e2).norm_sqr();
                if v < best.0 {
                    best = (v, (th, al));
                }
            }
            best
        })
        .reduce(|| (f64::INFINITY, (0.0, 0.0)), |a, b| if b.0 < a.0 { b } else { a });
    Ok(TransversalityReport { grid_n, min_value, argmin, eigen_residuals: residuals, top_eigenvalues: top })
}

pub fn transversality_certificate(grid_n: usize) -> Result<Certificate, CertifyError> {
    let r = fuchsian_pho_transversality(grid_n)?;
    Ok(Certificate {
        name: "pho-transversality".into(),
        verdict: if r.min_value > 0.0 { Verdict::Pass } else { Verdict::Fail },
        witness: Some(serde_json::json!({ "theta": r.argmin.0, "alpha": r.argmin.1 })),
        min_value: r.min_value,
        samples: grid_n * grid_n,
    })
}
