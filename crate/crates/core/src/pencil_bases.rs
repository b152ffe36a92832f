//! Pencils of tangent vectors at a point of the symmetric space and their
//! bases at infinity in Ein^{2,3} and Pho^x: membership tests, the R-planes
//! with their graph maps, and explicit fiber parametrizations.

use thiserror::Error;

use crate::flag_geometry::{
    self as fg, add, combo, cross, euclid, hat, q, scale, sub, FlagError, NullLine, Photon, SpacePoint,
    TangentVector, V,
};
use crate::linalg::{self, Mat7};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PencilError {
    #[error(transparent)]
    Flag(#[from] FlagError),
    #[error("{0} must have unit norm")]
    NotUnit(&'static str),
    #[error("{0} does not lie in the required subspace")]
    NotInSubspace(&'static str),
    #[error("pencil generators are dependent")]
    Dependent,
    #[error("pencil generator is not tangent to the G2 symmetric space (defect {0:e})")]
    NotG2(f64),
    #[error("splitting is not a Frenet splitting: {0}")]
    BadSplitting(&'static str),
    #[error("linear system has the wrong solution dimension {0}")]
    Degenerate(usize),
}

// ---------------------------------------------------------------------------
// Frenet splittings.

/// `Im O' = L ⊕ T ⊕ N ⊕ B` with a unit `x` in the line `L`; each plane is
/// stored as `(a, x × a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrenetSplitting {
    pub x: V,
    pub t: [V; 2],
    pub n: [V; 2],
    pub b: [V; 2],
}

impl FrenetSplitting {
    pub fn new(x: V, t1: V, n1: V, b1: V, tol: f64) -> Result<Self, PencilError> {
        let fr = FrenetSplitting {
            x,
            t: [t1, cross(&x, &t1)],
            n: [n1, cross(&x, &n1)],
            b: [b1, cross(&x, &b1)],
        };
        let all = fr.vectors();
        let signs = [1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
        for a in 0..7 {
            for c in 0..7 {
                let want = if a == c { signs[a] } else { 0.0 };
                if (q(&all[a], &all[c]) - want).abs() > tol {
                    return Err(PencilError::BadSplitting("vectors are not orthonormal"));
                }
            }
        }
        let nt = cross(&fr.n[0], &fr.t[0]);
        if (q(&nt, &fr.b[0]).powi(2) + q(&nt, &fr.b[1]).powi(2) - 1.0).abs() > tol {
            return Err(PencilError::BadSplitting("B is not N × T"));
        }
        Ok(fr)
    }

    /// `L = ⟨i⟩, T = ⟨l, li⟩, N = ⟨j, k⟩, B = ⟨lj, lk⟩`.
    pub fn model() -> Self {
        FrenetSplitting::new(fg::basis_vector(0), fg::basis_vector(3), fg::basis_vector(1), fg::basis_vector(5), 1e-12)
            .unwrap()
    }

    /// `(x, t1, t2, n1, n2, b1, b2)`.
    pub fn vectors(&self) -> [V; 7] {
        [self.x, self.t[0], self.t[1], self.n[0], self.n[1], self.b[0], self.b[1]]
    }

    pub fn transform(&self, g: &Mat7<f64>) -> Result<Self, PencilError> {
        let a = |v: &V| fg::apply(g, v);
        FrenetSplitting::new(a(&self.x), a(&self.t[0]), a(&self.n[0]), a(&self.b[0]), 1e-8)
    }

    /// `P = L ⊕ N`.
    pub fn point(&self) -> SpacePoint {
        SpacePoint::new(self.x, self.n[0], 1e-8).expect("L ⊕ N is spacelike")
    }

    pub fn proj_l(&self, v: &V) -> V {
        scale(q(v, &self.x), &self.x)
    }

    /// Orthogonal projection onto a plane with orthonormal basis of norm `sign`.
    fn proj_plane(p: &[V; 2], sign: f64, v: &V) -> V {
        combo(&[sign * q(v, &p[0]), sign * q(v, &p[1])], p)
    }

    pub fn proj_t(&self, v: &V) -> V {
        Self::proj_plane(&self.t, -1.0, v)
    }

    pub fn proj_n(&self, v: &V) -> V {
        Self::proj_plane(&self.n, 1.0, v)
    }

    pub fn proj_b(&self, v: &V) -> V {
        Self::proj_plane(&self.b, -1.0, v)
    }

    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        Self::model().transform(&fg::random_group_element(rng, 0.4)).unwrap()
    }
}

// ---------------------------------------------------------------------------
// Pencils.

#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub base: SpacePoint,
    pub psi: [TangentVector; 2],
}

impl Pencil {
    pub fn new(psi1: TangentVector, psi2: TangentVector, tol: f64) -> Result<Self, PencilError> {
        let g11 = fg::tangent_metric(&psi1, &psi1)?;
        let g12 = fg::tangent_metric(&psi1, &psi2)?;
        let g22 = fg::tangent_metric(&psi2, &psi2)?;
        if g11 * g22 - g12 * g12 <= tol * g11 * g22 {
            return Err(PencilError::Dependent);
        }
        for p in [&psi1, &psi2] {
            let d = p.derivation_defect();
            if d > tol {
                return Err(PencilError::NotG2(d));
            }
        }
        Ok(Pencil { base: psi1.base.clone(), psi: [psi1, psi2] })
    }

    /// Ranks of the generators and dimension of their common kernel in `P`.
    pub fn rank_signature(&self, tol: f64) -> (usize, usize, usize) {
        let f = self.base.frame();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for p in &self.psi {
            for c in 0..7 {
                rows.push((0..3).map(|i| p.apply(&f[i])[c]).collect());
            }
        }
        let ker = 3 - linalg::rank(&rows, tol);
        (self.psi[0].rank(tol), self.psi[1].rank(tol), ker)
    }
}

/// Maps `N -> T` that commute with the cross product by `x`, extended by zero on `L`.
pub fn alpha_pencil(fr: &FrenetSplitting) -> Pencil {
    let p = fr.point();
    let gen = |t0: V| {
        let t1 = cross(&fr.x, &t0);
        TangentVector::from_map(&p, |v| combo(&[q(v, &fr.n[0]), q(v, &fr.n[1])], &[t0, t1]))
    };
    Pencil::new(gen(fr.t[0]), gen(fr.t[1]), 1e-8).expect("alpha pencil")
}

/// `ψ_Z`: `x |-> 2 Z × x` on `L` and `n |-> -Z × n` on `N`, for `Z = t1, t2`.
pub fn beta_pencil_map(fr: &FrenetSplitting, z: &V) -> TangentVector {
    let p = fr.point();
    TangentVector::from_map(&p, |v| {
        let vl = fr.proj_l(v);
        let vn = sub(v, &vl);
        sub(&scale(2.0, &cross(z, &vl)), &cross(z, &vn))
    })
}

pub fn beta_pencil(fr: &FrenetSplitting) -> Pencil {
    Pencil::new(beta_pencil_map(fr, &fr.t[0]), beta_pencil_map(fr, &fr.t[1]), 1e-8).expect("beta pencil")
}

// ---------------------------------------------------------------------------
// Ein^{2,3}.

/// `q(z, ψ(u))` for both generators, where `ℓ = [u + z]` over the pencil's point.
pub fn beta_base_residuals(pencil: &Pencil, l: &NullLine) -> [f64; 2] {
    let (u, z) = l.decompose(&pencil.base);
    pencil.psi.clone().map(|p| q(&z, &p.apply(&u)))
}

/// The same condition through the Euclidean form `h = q|_P - q|_{P⊥}`:
/// `h(Z, ψ Z)` with `ψ` acting by its skew extension.
pub fn beta_base_residuals_harmonic(pencil: &Pencil, l: &NullLine) -> [f64; 2] {
    let (u, z) = l.decompose(&pencil.base);
    let zz = add(&u, &z);
    pencil.psi.clone().map(|p| pencil.base.euclidean_form(&zz, &fg::apply(&p.full_matrix(), &zz)))
}

/// The same condition through the metric pairing with a vector pointing at `ℓ`;
/// `g2` selects the G2 projection of the rank-one SO(3,4) pointing vector.
pub fn beta_base_residuals_pointing(pencil: &Pencil, l: &NullLine, g2: bool) -> Result<[f64; 2], PencilError> {
    let mut phi = fg::rank_one_pointing(&pencil.base, l);
    if g2 {
        phi = fg::project_to_g2(&phi)?;
    }
    Ok([fg::tangent_metric(&phi, &pencil.psi[0])?, fg::tangent_metric(&phi, &pencil.psi[1])?])
}

pub fn beta_base_membership(pencil: &Pencil, l: &NullLine, tol: f64) -> bool {
    beta_base_residuals(pencil, l).iter().all(|r| r.abs() <= tol)
}

/// Admissible `z` for a fixed `u`: `P⊥ ∩ {ψ1(u), ψ2(u)}⊥`.
pub fn beta_fiber_plane(pencil: &Pencil, u: &V) -> Vec<V> {
    let perp = pencil.base.perp_basis();
    let rows: Vec<Vec<f64>> = pencil.psi.iter().map(|p| perp.iter().map(|e| q(&p.apply(u), e)).collect()).collect();
    linalg::nullspace(&rows, 4, 1e-10).iter().map(|c| combo(c, perp)).collect()
}

/// `[u + (2 u_L × v - u_N × v) / sqrt(4 |u_L|^2 + |u_N|^2)]` for unit `u` in
/// `L ⊕ N` and unit timelike `v` in `B`.
pub fn ein_fiber_point(fr: &FrenetSplitting, u: &V, v: &V, tol: f64) -> Result<NullLine, PencilError> {
    if (q(u, u) - 1.0).abs() > tol {
        return Err(PencilError::NotUnit("u"));
    }
    if (q(v, v) + 1.0).abs() > tol {
        return Err(PencilError::NotUnit("v"));
    }
    let ul = fr.proj_l(u);
    let un = fr.proj_n(u);
    if euclid(&sub(u, &add(&ul, &un))) > tol {
        return Err(PencilError::NotInSubspace("u"));
    }
    if euclid(&sub(v, &fr.proj_b(v))) > tol {
        return Err(PencilError::NotInSubspace("v"));
    }
    let d = (4.0 * q(&ul, &ul) + q(&un, &un)).sqrt();
    let z = scale(1.0 / d, &sub(&scale(2.0, &cross(&ul, v)), &cross(&un, v)));
    Ok(NullLine::new(add(u, &z), 1e-8)?)
}

// ---------------------------------------------------------------------------
// Pho^x.

/// The plane `R_{[u], W} ⊂ P⊥` for orthonormal `u, v` spanning `W`, and the map
/// `Γ: B -> T` whose graph it is (absent when `u` lies in `L`).
#[derive(Debug, Clone, PartialEq)]
pub struct RSpace {
    pub u: V,
    pub v: V,
    pub plane: [V; 2],
    /// Matrix of `Γ` from the basis `(b1, b2)` to `(t1, t2)`.
    pub gamma: Option<[[f64; 2]; 2]>,
}

impl RSpace {
    pub fn gamma_apply(&self, fr: &FrenetSplitting, z: &V) -> Option<V> {
        let g = self.gamma?;
        let c = [-q(z, &fr.b[0]), -q(z, &fr.b[1])];
        Some(combo(&[g[0][0] * c[0] + g[0][1] * c[1], g[1][0] * c[0] + g[1][1] * c[1]], &fr.t))
    }

    /// `σ(z) = z + Γ(z)`, the inverse of the projection to `B`.
    pub fn lift(&self, fr: &FrenetSplitting, z: &V) -> Option<V> {
        Some(add(z, &self.gamma_apply(fr, z)?))
    }
}

/// `{z ∈ P⊥ : q(ψ u, z) + q((u × v) × z, ψ v) = 0}` for the generators of `pencil`.
pub fn r_space(fr: &FrenetSplitting, pencil: &Pencil, u: &V, v: &V, tol: f64) -> Result<RSpace, PencilError> {
    let p = &pencil.base;
    if (q(u, u) - 1.0).abs() > tol || (q(v, v) - 1.0).abs() > tol || q(u, v).abs() > tol {
        return Err(PencilError::NotUnit("(u, v)"));
    }
    if !p.contains(u, tol) || !p.contains(v, tol) {
        return Err(PencilError::NotInSubspace("W"));
    }
    let perp = [fr.t[0], fr.t[1], fr.b[0], fr.b[1]];
    let uv = cross(u, v);
    let rows: Vec<Vec<f64>> = pencil
        .psi
        .iter()
        .map(|psi| {
            let (pu, pv) = (psi.apply(u), psi.apply(v));
            perp.iter().map(|e| q(&pu, e) + q(&cross(&uv, e), &pv)).collect()
        })
        .collect();
    let ns = linalg::nullspace(&rows, 4, 1e-10);
    if ns.len() != 2 {
        return Err(PencilError::Degenerate(ns.len()));
    }
    let plane = [combo(&ns[0], &perp), combo(&ns[1], &perp)];
    // coordinates (t-part, b-part) of the plane vectors; the bases have q = -1
    let tb = |w: &V| ([-q(w, &fr.t[0]), -q(w, &fr.t[1])], [-q(w, &fr.b[0]), -q(w, &fr.b[1])]);
    let (t0, b0) = tb(&plane[0]);
    let (t1, b1) = tb(&plane[1]);
    let det = b0[0] * b1[1] - b0[1] * b1[0];
    let gamma = (det.abs() > 1e-9).then(|| {
        // Γ = T_cols * inverse(B_cols)
        let inv = [[b1[1] / det, -b1[0] / det], [-b0[1] / det, b0[0] / det]];
        let tc = [[t0[0], t1[0]], [t0[1], t1[1]]];
        std::array::from_fn(|r| std::array::from_fn(|c| tc[r][0] * inv[0][c] + tc[r][1] * inv[1][c]))
    });
    Ok(RSpace { u: *u, v: *v, plane, gamma })
}

/// `u` in `N ∩ W` and the completion `v = a1 x + a2 x × u` with the
/// coefficients `(a1, a2)`, for a 2-plane `W ⊂ P` spanned by `w1, w2`.
pub fn adapted_basis(fr: &FrenetSplitting, w1: &V, w2: &V) -> Result<(V, V, f64, f64), PencilError> {
    let (c1, c2) = (q(w1, &fr.x), q(w2, &fr.x));
    let u = if c1.abs() < 1e-14 && c2.abs() < 1e-14 {
        hat(w1)
    } else {
        hat(&sub(&scale(c2, w1), &scale(c1, w2)))
    }
    .ok_or(PencilError::Degenerate(0))?;
    let rest = if euclid(&sub(w1, &scale(q(w1, &u), &u))) > euclid(&sub(w2, &scale(q(w2, &u), &u))) {
        sub(w1, &scale(q(w1, &u), &u))
    } else {
        sub(w2, &scale(q(w2, &u), &u))
    };
    let v = hat(&rest).ok_or(PencilError::Degenerate(1))?;
    let xu = cross(&fr.x, &u);
    Ok((u, v, q(&v, &fr.x), q(&v, &xu)))
}

/// `Γ(z) = a1 a2 / (1 + a2^2) (z × u)`.
pub fn gamma_closed_form(a1: f64, a2: f64, u: &V, z: &V) -> V {
    scale(a1 * a2 / (1.0 + a2 * a2), &cross(z, u))
}

/// `cos^2 θ + sin^2 θ (2 a2 / (1 + a2^2))^2`.
pub fn transition_determinant(theta: f64, a2: f64) -> f64 {
    let k = 2.0 * a2 / (1.0 + a2 * a2);
    theta.cos().powi(2) + theta.sin().powi(2) * k * k
}

/// Determinant of `π_B ∘ (z |-> cos θ z + sin θ (u × v) × z) ∘ σ_u` on `B`,
/// computed from the R-plane of `(u, v)`.
pub fn transition_determinant_numeric(
    fr: &FrenetSplitting,
    pencil: &Pencil,
    u: &V,
    v: &V,
    theta: f64,
) -> Result<f64, PencilError> {
    let r = r_space(fr, pencil, u, v, 1e-9)?;
    let uv = cross(u, v);
    let cols: Vec<[f64; 2]> = fr
        .b
        .iter()
        .map(|y| {
            let z = r.lift(fr, y).expect("u in N has a graph map");
            let moved = add(&scale(theta.cos(), &z), &scale(theta.sin(), &cross(&uv, &z)));
            [-q(&moved, &fr.b[0]), -q(&moved, &fr.b[1])]
        })
        .collect();
    Ok(cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1])
}

/// A unit complex-linear map `N -> B`, determined by `n1 |-> b` with `q(b) = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NbMap {
    pub b: V,
}

impl NbMap {
    pub fn new(fr: &FrenetSplitting, b: V, tol: f64) -> Result<Self, PencilError> {
        if (q(&b, &b) + 1.0).abs() > tol {
            return Err(PencilError::NotUnit("L"));
        }
        if euclid(&sub(&b, &fr.proj_b(&b))) > tol {
            return Err(PencilError::NotInSubspace("L(n1)"));
        }
        Ok(NbMap { b })
    }

    pub fn from_angle(fr: &FrenetSplitting, phi: f64) -> Self {
        NbMap { b: add(&scale(phi.cos(), &fr.b[0]), &scale(phi.sin(), &fr.b[1])) }
    }

    pub fn apply(&self, fr: &FrenetSplitting, n: &V) -> V {
        add(&scale(q(n, &fr.n[0]), &self.b), &scale(q(n, &fr.n[1]), &cross(&fr.x, &self.b)))
    }
}

/// `span(u + ŝ(L u), x u + x ŝ(L u))` where `u` is a unit vector of `N ∩ W`,
/// `x` a unit vector of `W × W` and `ŝ` the normalized lift to the R-plane.
pub fn pho_fiber_point(fr: &FrenetSplitting, pencil: &Pencil, w1: &V, w2: &V, l: &NbMap) -> Result<Photon, PencilError> {
    let (u, v, _, _) = adapted_basis(fr, w1, w2)?;
    let r = r_space(fr, pencil, &u, &v, 1e-8)?;
    let s = r.lift(fr, &l.apply(fr, &u)).ok_or(PencilError::Degenerate(0))?;
    let z = hat(&s).ok_or(PencilError::Degenerate(0))?;
    let x = cross(&u, &v);
    Ok(Photon::new(add(&u, &z), add(&cross(&x, &u), &cross(&x, &z)), 1e-8)?)
}

/// `-tr(ψ ∘ φ_ω) / 2` from an arbitrary basis of `ω`, using Gram-Schmidt
/// coefficients on the projections to `P`.
pub fn pho_base_residuals(pencil: &Pencil, w: &Photon) -> Result<[f64; 2], PencilError> {
    let p = &pencil.base;
    let [w1, w2] = w.basis;
    let (u1, u2) = (p.proj(&w1), p.proj(&w2));
    let (z1, z2) = (p.proj_perp(&w1), p.proj_perp(&w2));
    let n1 = q(&u1, &u1);
    if n1 < 1e-12 {
        return Err(FlagError::DegenerateProjection.into());
    }
    let f3 = q(&u2, &u1) / n1;
    let n2 = q(&sub(&u2, &scale(f3, &u1)), &sub(&u2, &scale(f3, &u1)));
    if n2 < 1e-12 {
        return Err(FlagError::DegenerateProjection.into());
    }
    let (f1s, f2s) = (1.0 / n1, 1.0 / n2);
    Ok(pencil.psi.clone().map(|psi| {
        let (a, b) = (psi.apply(&u1), psi.apply(&u2));
        f1s * q(&a, &z1) + f2s * (q(&b, &z2) + f3 * f3 * q(&a, &z1) - f3 * q(&a, &z2) - f3 * q(&b, &z1))
    }))
}

/// The same condition with a basis whose projections to `P` are orthonormal:
/// `h(w1, ψ w1) + h(w2, ψ w2)` for the Euclidean form `h`.
pub fn pho_base_residuals_orthonormal(pencil: &Pencil, w: &Photon) -> Result<[f64; 2], PencilError> {
    let p = &pencil.base;
    let phi = fg::pointing_vector_pho(p, w)?;
    // orthonormal basis of the projection: the cokernel complement of φ
    let f = p.frame();
    let rows: Vec<Vec<f64>> = (0..7).map(|c| (0..3).map(|i| phi.images[i][c]).collect()).collect();
    let ker = linalg::nullspace(&rows, 3, 1e-9);
    let k = hat(&combo(&ker[0], f)).ok_or(PencilError::Degenerate(0))?;
    let a = f.iter().map(|e| sub(e, &scale(q(e, &k), &k))).max_by(|x, y| euclid(x).partial_cmp(&euclid(y)).unwrap()).unwrap();
    let x = hat(&a).ok_or(PencilError::Degenerate(0))?;
    let y = cross(&k, &x);
    let ws = [add(&x, &phi.apply(&x)), add(&y, &phi.apply(&y))];
    Ok(pencil.psi.clone().map(|psi| {
        let m = psi.full_matrix();
        ws.iter().map(|wi| p.euclidean_form(wi, &fg::apply(&m, wi))).sum()
    }))
}

/// The metric pairing of the pointing vector with the generators.
pub fn pho_base_residuals_metric(pencil: &Pencil, w: &Photon) -> Result<[f64; 2], PencilError> {
    let phi = fg::pointing_vector_pho(&pencil.base, w)?;
    Ok([fg::tangent_metric(&phi, &pencil.psi[0])?, fg::tangent_metric(&phi, &pencil.psi[1])?])
}

pub fn pho_base_membership(pencil: &Pencil, w: &Photon, tol: f64) -> Result<bool, PencilError> {
    Ok(pho_base_residuals(pencil, w)?.iter().all(|r| r.abs() <= tol))
}

// ---------------------------------------------------------------------------
// Samplers.

/// Random unit vector of `L ⊕ N` and random unit timelike vector of `B`.
pub fn random_ein_inputs<R: rand::Rng + ?Sized>(rng: &mut R, fr: &FrenetSplitting) -> (V, V) {
    let c: Vec<f64> = (0..3).map(|_| fg::standard_normal(rng)).collect();
    let u = hat(&combo(&c, &[fr.x, fr.n[0], fr.n[1]])).unwrap();
    let th = rng.gen_range(0.0..std::f64::consts::TAU);
    (u, add(&scale(th.cos(), &fr.b[0]), &scale(th.sin(), &fr.b[1])))
}

/// Random 2-plane in `P = L ⊕ N`.
pub fn random_plane<R: rand::Rng + ?Sized>(rng: &mut R, fr: &FrenetSplitting) -> (V, V) {
    let basis = [fr.x, fr.n[0], fr.n[1]];
    let c1: Vec<f64> = (0..3).map(|_| fg::standard_normal(rng)).collect();
    let c2: Vec<f64> = (0..3).map(|_| fg::standard_normal(rng)).collect();
    (combo(&c1, &basis), combo(&c2, &basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(a: usize) -> V {
        fg::basis_vector(a)
    }

    #[test]
    fn model_frenet_frame() {
        let fr = FrenetSplitting::model();
        assert_eq!(fr.t[1], scale(-1.0, &m(4)));
        assert_eq!(fr.n[1], m(2));
        assert_eq!(fr.b[1], scale(-1.0, &m(6)));
    }

    #[test]
    fn standard_pencils_are_g2_with_expected_ranks() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for fr in [FrenetSplitting::model(), FrenetSplitting::random(&mut rng)] {
            let a = alpha_pencil(&fr);
            let b = beta_pencil(&fr);
            assert_eq!(a.rank_signature(1e-9), (2, 2, 1));
            assert_eq!(b.rank_signature(1e-9), (3, 3, 0));
            for p in a.psi.iter().chain(b.psi.iter()) {
                assert!(p.derivation_defect() < 1e-9);
            }
        }
    }

    #[test]
    fn alpha_pencil_model_values() {
        // ψ1: j -> l, k -> -li
        let fr = FrenetSplitting::model();
        let a = alpha_pencil(&fr);
        assert!(euclid(&sub(&a.psi[0].apply(&m(1)), &m(3))) < 1e-12);
        assert!(euclid(&sub(&a.psi[0].apply(&m(2)), &scale(-1.0, &m(4)))) < 1e-12);
        assert!(euclid(&a.psi[0].apply(&m(0))) < 1e-12);
    }

    #[test]
    fn ein_fiber_special_cases() {
        let fr = FrenetSplitting::model();
        let v = fr.b[0];
        let u = fr.x;
        let l = ein_fiber_point(&fr, &u, &v, 1e-12).unwrap();
        assert!(l.same(&NullLine::new(add(&u, &cross(&u, &v)), 1e-12).unwrap(), 1e-12));
        let u = fr.n[0];
        let l = ein_fiber_point(&fr, &u, &v, 1e-12).unwrap();
        assert!(l.same(&NullLine::new(sub(&u, &cross(&u, &v)), 1e-12).unwrap(), 1e-12));
        assert_eq!(ein_fiber_point(&fr, &scale(2.0, &u), &v, 1e-9), Err(PencilError::NotUnit("u")));
    }

    #[test]
    fn ein_fiber_points_lie_in_beta_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let fr = FrenetSplitting::random(&mut rng);
            let pencil = beta_pencil(&fr);
            let (u, v) = random_ein_inputs(&mut rng, &fr);
            let l = ein_fiber_point(&fr, &u, &v, 1e-9).unwrap();
            assert!(q(&l.rep, &l.rep).abs() < 1e-12);
            assert!(beta_base_membership(&pencil, &l, 1e-9));
            let h = beta_base_residuals_harmonic(&pencil, &l);
            assert!(h.iter().all(|r| r.abs() < 1e-9));
            let so = beta_base_residuals_pointing(&pencil, &l, false).unwrap();
            let g2 = beta_base_residuals_pointing(&pencil, &l, true).unwrap();
            for i in 0..2 {
                assert!((so[i] - g2[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn generic_line_is_off_beta_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let fr = FrenetSplitting::model();
        let pencil = beta_pencil(&fr);
        let l = fg::random_null_line_at(&mut rng, &pencil.base);
        assert!(!beta_base_membership(&pencil, &l, 1e-6));
        // harmonic-form residual is -2 q(ψ u, z)
        let r = beta_base_residuals(&pencil, &l);
        let h = beta_base_residuals_harmonic(&pencil, &l);
        for i in 0..2 {
            assert!((h[i] + 2.0 * r[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn beta_fibers_are_circles_in_planes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fr = FrenetSplitting::random(&mut rng);
        let pencil = beta_pencil(&fr);
        for _ in 0..10 {
            let (u, _) = random_ein_inputs(&mut rng, &fr);
            let plane = beta_fiber_plane(&pencil, &u);
            assert_eq!(plane.len(), 2);
            // the plane is negative definite, so its unit vectors form a circle
            let g = [[q(&plane[0], &plane[0]), q(&plane[0], &plane[1])], [q(&plane[1], &plane[0]), q(&plane[1], &plane[1])]];
            assert!(g[0][0] < 0.0 && g[0][0] * g[1][1] - g[0][1] * g[1][0] > 0.0);
            let th: f64 = rng.gen_range(0.0..6.0);
            let z = hat(&add(&scale(th.cos(), &plane[0]), &scale(th.sin(), &plane[1]))).unwrap();
            let l = NullLine::new(add(&u, &z), 1e-9).unwrap();
            assert!(beta_base_membership(&pencil, &l, 1e-9));
        }
    }

    #[test]
    fn r_space_cases() {
        let fr = FrenetSplitting::model();
        let pencil = alpha_pencil(&fr);
        // W = N: plane B, Γ = 0
        let r = r_space(&fr, &pencil, &fr.n[0], &fr.n[1], 1e-12).unwrap();
        let g = r.gamma.unwrap();
        assert!(g.iter().flatten().all(|x| x.abs() < 1e-12));
        // a1 = a2 = 1/√2: Γ(z) = (z × u) / 3
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = fr.n[0];
        let v = add(&scale(s, &fr.x), &scale(s, &cross(&fr.x, &u)));
        let r = r_space(&fr, &pencil, &u, &v, 1e-12).unwrap();
        for z in &fr.b {
            let got = r.gamma_apply(&fr, z).unwrap();
            assert!(euclid(&sub(&got, &scale(1.0 / 3.0, &cross(z, &u)))) < 1e-12);
        }
        // u in L: plane T
        let r = r_space(&fr, &pencil, &fr.x, &fr.n[0], 1e-12).unwrap();
        assert!(r.gamma.is_none());
        for z in &r.plane {
            assert!(euclid(&sub(z, &fr.proj_t(z))) < 1e-12);
        }
        assert!((transition_determinant(std::f64::consts::FRAC_PI_2, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_matches_closed_form_on_random_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let fr = FrenetSplitting::random(&mut rng);
            let pencil = alpha_pencil(&fr);
            let (w1, w2) = random_plane(&mut rng, &fr);
            let (u, v, a1, a2) = adapted_basis(&fr, &w1, &w2).unwrap();
            let r = r_space(&fr, &pencil, &u, &v, 1e-8).unwrap();
            for z in &fr.b {
                let got = r.gamma_apply(&fr, z).unwrap();
                assert!(euclid(&sub(&got, &gamma_closed_form(a1, a2, &u, z))) < 1e-8);
            }
            let th: f64 = rng.gen_range(0.0..3.0);
            let num = transition_determinant_numeric(&fr, &pencil, &u, &v, th).unwrap();
            assert!((num - transition_determinant(th, a2)).abs() < 1e-8);
        }
    }

    #[test]
    fn pho_fiber_for_w_equal_n_is_graph() {
        let fr = FrenetSplitting::model();
        let pencil = alpha_pencil(&fr);
        let l = NbMap::from_angle(&fr, 0.7);
        let w = pho_fiber_point(&fr, &pencil, &fr.n[0], &fr.n[1], &l).unwrap();
        let g = Photon::new(add(&fr.n[0], &l.apply(&fr, &fr.n[0])), add(&fr.n[1], &l.apply(&fr, &fr.n[1])), 1e-12).unwrap();
        assert!(w.same(&g, 1e-10));
    }

    #[test]
    fn pho_fiber_points_lie_in_alpha_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let fr = FrenetSplitting::random(&mut rng);
            let pencil = alpha_pencil(&fr);
            let (w1, w2) = random_plane(&mut rng, &fr);
            let l = NbMap::from_angle(&fr, rng.gen_range(0.0..6.3));
            let w = pho_fiber_point(&fr, &pencil, &w1, &w2, &l).unwrap();
            assert!(pho_base_membership(&pencil, &w, 1e-8).unwrap());
            for r in pho_base_residuals_orthonormal(&pencil, &w).unwrap() {
                assert!(r.abs() < 1e-8);
            }
            for r in pho_base_residuals_metric(&pencil, &w).unwrap() {
                assert!(r.abs() < 1e-8);
            }
            // the photon projects onto W
            let wp = [pencil.base.proj(&w.basis[0]), pencil.base.proj(&w.basis[1])];
            for x in wp {
                let mut rows = vec![w1.to_vec(), w2.to_vec(), x.to_vec()];
                assert_eq!(linalg::rank(&mut rows, 1e-8), 2);
            }
            // sign choices do not matter
            let w_neg = pho_fiber_point(&fr, &pencil, &scale(-1.0, &w2), &w1, &l).unwrap();
            assert!(w.same(&w_neg, 1e-8));
        }
    }

    #[test]
    fn r_plane_photons_lie_in_alpha_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let fr = FrenetSplitting::random(&mut rng);
        let pencil = alpha_pencil(&fr);
        let (w1, w2) = random_plane(&mut rng, &fr);
        let (u, v, _, _) = adapted_basis(&fr, &w1, &w2).unwrap();
        let r = r_space(&fr, &pencil, &u, &v, 1e-8).unwrap();
        let z = hat(&add(&r.plane[0], &scale(0.3, &r.plane[1]))).unwrap();
        let w = Photon::new(add(&u, &z), add(&v, &cross(&cross(&u, &v), &z)), 1e-9).unwrap();
        assert!(pho_base_membership(&pencil, &w, 1e-8).unwrap());
        let off = fg::random_photon_at(&mut rng, &pencil.base);
        assert!(!pho_base_membership(&pencil, &off, 1e-6).unwrap());
        let a = pho_base_residuals(&pencil, &off).unwrap();
        let b = pho_base_residuals_metric(&pencil, &off).unwrap();
        // both are the same multiple of the trace pairing
        assert!((a[0] * b[1] - a[1] * b[0]).abs() < 1e-8 * (1.0 + a[0].abs() + a[1].abs()));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn prop_pho_fiber_sweeps_circle_over_w(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fr = FrenetSplitting::random(&mut rng);
            let pencil = alpha_pencil(&fr);
            let (w1, w2) = random_plane(&mut rng, &fr);
            let ws: Vec<Photon> = (0..4)
                .map(|k| pho_fiber_point(&fr, &pencil, &w1, &w2, &NbMap::from_angle(&fr, 0.7 * k as f64)).unwrap())
                .collect();
            for a in 0..4 {
                prop_assert!(fg::euclid(&cross(&ws[a].basis[0], &ws[a].basis[1])) < 1e-9);
                for b in 0..a {
                    prop_assert!(!ws[a].same(&ws[b], 1e-6));
                }
            }
        }

        #[test]
        fn prop_ein_fiber_null(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fr = FrenetSplitting::random(&mut rng);
            let (u, v) = random_ein_inputs(&mut rng, &fr);
            let l = ein_fiber_point(&fr, &u, &v, 1e-9).unwrap();
            prop_assert!(q(&l.rep, &l.rep).abs() < 1e-12);
        }
    }
}
