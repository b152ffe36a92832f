//! Points of the symmetric space as spacelike 3-planes, the flag manifolds
//! Ein^{2,3} (null lines) and Pho^x (annihilator photons), tangent vectors as
//! maps `P -> P⊥`, and the orbit classifications used for thickenings.
//!
//! Everything here is floating point in multiplication-basis coordinates
//! `(i, j, k, l, li, lj, lk)`.

use nalgebra::{SMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::g2_lie;
use crate::linalg::{self, Mat7};
use crate::octonion_core::{cross_m, model_r_vectors, qform_m, BasisTag};

pub type V = [f64; 7];

pub const TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlagError {
    #[error("vector is not null")]
    NotNull,
    #[error("frame is not orthonormal and spacelike")]
    NotOrthonormal,
    #[error("subspace is not isotropic")]
    NotIsotropic,
    #[error("2-plane is not an annihilator photon")]
    NotAnnihilator,
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("tangent vector must map P into P⊥")]
    NotInPerp,
    #[error("tangent vectors live at different points")]
    BaseMismatch,
    #[error("expected a rank {expected} map, found rank {found}")]
    WrongRank { expected: usize, found: usize },
    #[error("projection onto P is degenerate")]
    DegenerateProjection,
}

// ---------------------------------------------------------------------------
// Vector helpers.

pub fn q(a: &V, b: &V) -> f64 {
    qform_m(a, b)
}

pub fn cross(a: &V, b: &V) -> V {
    cross_m(a, b)
}

pub fn add(a: &V, b: &V) -> V {
    std::array::from_fn(|i| a[i] + b[i])
}

pub fn sub(a: &V, b: &V) -> V {
    std::array::from_fn(|i| a[i] - b[i])
}

pub fn scale(s: f64, a: &V) -> V {
    std::array::from_fn(|i| s * a[i])
}

/// `sum c_i v_i`.
pub fn combo(cs: &[f64], vs: &[V]) -> V {
    let mut r = [0.0; 7];
    for (c, v) in cs.iter().zip(vs) {
        for i in 0..7 {
            r[i] += c * v[i];
        }
    }
    r
}

pub fn euclid(a: &V) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `v / sqrt|q(v)|`, the unit spacelike or timelike rescaling.
pub fn hat(v: &V) -> Option<V> {
    let n = q(v, v).abs();
    (n > 1e-24).then(|| scale(1.0 / n.sqrt(), v))
}

pub fn basis_vector(a: usize) -> V {
    std::array::from_fn(|i| if i == a { 1.0 } else { 0.0 })
}

/// Multiplication-basis coordinates of the model real basis vector `x_k`.
pub fn model_r_vector(k: i32) -> V {
    let vs = model_r_vectors();
    std::array::from_fn(|i| vs[(3 - k) as usize][i].to_complex64().re)
}

fn rank(vs: &[V], tol: f64) -> usize {
    let rows: Vec<Vec<f64>> = vs.iter().map(|v| v.to_vec()).collect();
    linalg::rank(&rows, tol)
}

pub fn apply(g: &Mat7<f64>, v: &V) -> V {
    linalg::mat_vec(g, v)
}

// ---------------------------------------------------------------------------
// Points of the symmetric space.

/// A spacelike 3-plane closed under the cross product, given by an
/// orthonormal frame `(u, v, u x v)`, together with an orthonormal basis
/// `(z, z x u, z x v, z x (u x v))` of its orthogonal complement.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacePoint {
    frame: [V; 3],
    perp: [V; 4],
}

impl SpacePoint {
    pub fn new(u: V, v: V, tol: f64) -> Result<Self, FlagError> {
        if (q(&u, &u) - 1.0).abs() > tol || (q(&v, &v) - 1.0).abs() > tol || q(&u, &v).abs() > tol {
            return Err(FlagError::NotOrthonormal);
        }
        let w = cross(&u, &v);
        let frame = [u, v, w];
        let proj = |x: &V| sub(x, &combo(&frame.iter().map(|e| q(x, e)).collect::<Vec<_>>(), &frame));
        let z = (0..7)
            .map(|a| proj(&basis_vector(a)))
            .min_by(|a, b| q(a, a).partial_cmp(&q(b, b)).unwrap())
            .and_then(|z| hat(&z))
            .ok_or(FlagError::NotOrthonormal)?;
        let perp = [z, cross(&z, &u), cross(&z, &v), cross(&z, &w)];
        Ok(SpacePoint { frame, perp })
    }

    /// `span(i, j, k)`.
    pub fn origin() -> Self {
        SpacePoint::new(basis_vector(0), basis_vector(1), TOL).unwrap()
    }

    pub fn frame(&self) -> &[V; 3] {
        &self.frame
    }

    pub fn perp_basis(&self) -> &[V; 4] {
        &self.perp
    }

    pub fn proj(&self, x: &V) -> V {
        let cs: Vec<f64> = self.frame.iter().map(|e| q(x, e)).collect();
        combo(&cs, &self.frame)
    }

    pub fn proj_perp(&self, x: &V) -> V {
        sub(x, &self.proj(x))
    }

    pub fn contains(&self, x: &V, tol: f64) -> bool {
        euclid(&self.proj_perp(x)) <= tol * (1.0 + euclid(x))
    }

    pub fn same_plane(&self, other: &SpacePoint, tol: f64) -> bool {
        other.frame.iter().all(|e| self.contains(e, tol))
    }

    /// `q|_P - q|_{P⊥}`.
    pub fn euclidean_form(&self, a: &V, b: &V) -> f64 {
        let (pa, pb) = (self.proj(a), self.proj(b));
        let (na, nb) = (sub(a, &pa), sub(b, &pb));
        q(&pa, &pb) - q(&na, &nb)
    }

    pub fn transform(&self, g: &Mat7<f64>) -> Result<Self, FlagError> {
        SpacePoint::new(apply(g, &self.frame[0]), apply(g, &self.frame[1]), 1e-8)
    }
}

// ---------------------------------------------------------------------------
// Tangent vectors.

/// A linear map `P -> P⊥`, stored by its images of the frame of `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: SpacePoint,
    pub images: [V; 3],
}

impl TangentVector {
    pub fn new(base: SpacePoint, images: [V; 3], tol: f64) -> Result<Self, FlagError> {
        for im in &images {
            if euclid(&base.proj(im)) > tol * (1.0 + euclid(im)) {
                return Err(FlagError::NotInPerp);
            }
        }
        Ok(TangentVector { base, images })
    }

    /// The tangent vector `x |-> f(x)` for `x` in `P`; the images are projected to `P⊥`.
    pub fn from_map(base: &SpacePoint, f: impl Fn(&V) -> V) -> Self {
        let images = std::array::from_fn(|i| base.proj_perp(&f(&base.frame[i])));
        TangentVector { base: base.clone(), images }
    }

    /// Image of the P-component of `x`.
    pub fn apply(&self, x: &V) -> V {
        let cs: Vec<f64> = self.base.frame.iter().map(|e| q(x, e)).collect();
        combo(&cs, &self.images)
    }

    /// `φ^*(z) = sum q(φ e_i, z) e_i`.
    pub fn adjoint(&self, z: &V) -> V {
        let cs: Vec<f64> = self.images.iter().map(|im| q(im, z)).collect();
        combo(&cs, &self.base.frame)
    }

    /// The skew extension: `φ` on `P` and `-φ^*` on `P⊥`, in multiplication-basis coordinates.
    pub fn full_matrix(&self) -> Mat7<f64> {
        let cols: [V; 7] = std::array::from_fn(|a| {
            let x = basis_vector(a);
            sub(&self.apply(&x), &self.adjoint(&self.base.proj_perp(&x)))
        });
        linalg::from_columns(&cols)
    }

    pub fn derivation_defect(&self) -> f64 {
        g2_lie::derivation_defect(&self.full_matrix(), BasisTag::MImag).expect("multiplication basis")
    }

    pub fn is_g2(&self, tol: f64) -> bool {
        self.derivation_defect() <= tol
    }

    pub fn rank(&self, tol: f64) -> usize {
        rank(&self.images, tol)
    }

    pub fn add(&self, o: &TangentVector) -> TangentVector {
        TangentVector::from_map(&self.base, |x| add(&self.apply(x), &o.apply(x)))
    }

    pub fn scale(&self, s: f64) -> TangentVector {
        TangentVector { base: self.base.clone(), images: self.images.map(|v| scale(s, &v)) }
    }

    pub fn linear_combination(cs: &[f64], ts: &[TangentVector]) -> TangentVector {
        let base = &ts[0].base;
        TangentVector::from_map(base, |x| {
            let ims: Vec<V> = ts.iter().map(|t| t.apply(x)).collect();
            combo(cs, &ims)
        })
    }

    /// The 2-plane `{x + φ(x) : x ⊥ ker φ}` for a rank-two map.
    pub fn graph_star(&self, tol: f64) -> Result<Photon, FlagError> {
        let r = self.rank(tol);
        if r != 2 {
            return Err(FlagError::WrongRank { expected: 2, found: r });
        }
        let f = &self.base.frame;
        // kernel direction in frame coordinates
        let rows: Vec<Vec<f64>> = (0..7).map(|c| (0..3).map(|i| self.images[i][c]).collect()).collect();
        let ker = linalg::nullspace(&rows, 3, tol);
        let k = combo(&ker[0], f);
        let cs: Vec<V> = f.iter().map(|e| sub(e, &scale(q(e, &k) / q(&k, &k), &k))).collect();
        let mut w = cs.into_iter().filter(|c| euclid(c) > 1e-6).collect::<Vec<_>>();
        w.truncate(2);
        Photon::new(add(&w[0], &self.apply(&w[0])), add(&w[1], &self.apply(&w[1])), 1e-8)
    }
}

/// `g(φ, ψ) = -sum q(φ e_i, ψ e_i)` over an orthonormal frame of `P`.
pub fn tangent_metric(phi: &TangentVector, psi: &TangentVector) -> Result<f64, FlagError> {
    if !phi.base.same_plane(&psi.base, 1e-8) {
        return Err(FlagError::BaseMismatch);
    }
    Ok(-phi.base.frame.iter().map(|e| q(&phi.apply(e), &psi.apply(e))).sum::<f64>())
}

/// `tr(X Y) / 2` of the skew extensions; equals [`tangent_metric`].
pub fn tangent_metric_trace(phi: &TangentVector, psi: &TangentVector) -> f64 {
    0.5 * linalg::trace(&linalg::mat_mul(&phi.full_matrix(), &psi.full_matrix()))
}

/// `x |-> y x x` restricted to `P`, for `y` in `P⊥`.
pub fn cross_tangent(base: &SpacePoint, y: &V) -> TangentVector {
    TangentVector::from_map(base, |x| cross(y, x))
}

/// Orthogonal projection onto the G2 tangent directions, i.e. away from the
/// four-dimensional span of the cross-product maps by `P⊥`.
pub fn g2_component(phi: &TangentVector) -> TangentVector {
    let cs: Vec<TangentVector> = phi.base.perp.iter().map(|y| cross_tangent(&phi.base, y)).collect();
    let gram: Vec<Vec<f64>> = cs.iter().map(|a| cs.iter().map(|b| tangent_metric(a, b).unwrap()).collect()).collect();
    let rhs: Vec<Vec<f64>> = cs.iter().map(|a| vec![tangent_metric(a, phi).unwrap()]).collect();
    let c = linalg::solve(&gram, &rhs, 1e-12).expect("cross-product maps are independent");
    let coeffs: Vec<f64> = c.iter().map(|r| -r[0]).collect();
    let corr = TangentVector::linear_combination(&coeffs, &cs);
    phi.add(&corr)
}

/// G2 tangent pointing toward the null line of a rank-one SO(3,4) tangent.
pub fn project_to_g2(phi: &TangentVector) -> Result<TangentVector, FlagError> {
    let r = phi.rank(1e-9);
    if r != 1 {
        return Err(FlagError::WrongRank { expected: 1, found: r });
    }
    Ok(g2_component(phi))
}

/// The rank-one map `u |-> z`, `u⊥ ∩ P |-> 0` for `ℓ = [u + z]`.
pub fn rank_one_pointing(base: &SpacePoint, l: &NullLine) -> TangentVector {
    let (u, z) = l.decompose(base);
    TangentVector::from_map(base, |x| scale(q(x, &u), &z))
}

// ---------------------------------------------------------------------------
// Null lines and photons.

#[derive(Debug, Clone, PartialEq)]
pub struct NullLine {
    pub rep: V,
}

impl NullLine {
    pub fn new(rep: V, tol: f64) -> Result<Self, FlagError> {
        let n = euclid(&rep);
        if n < 1e-14 || q(&rep, &rep).abs() > tol * n * n {
            return Err(FlagError::NotNull);
        }
        Ok(NullLine { rep: scale(1.0 / n, &rep) })
    }

    pub fn same(&self, o: &NullLine, tol: f64) -> bool {
        rank(&[self.rep, o.rep], tol) == 1
    }

    /// `ℓ = [u + z]` with `u` unit spacelike in `P` and `z` unit timelike in `P⊥`.
    pub fn decompose(&self, base: &SpacePoint) -> (V, V) {
        let p = base.proj(&self.rep);
        let s = 1.0 / q(&p, &p).sqrt();
        (scale(s, &p), scale(s, &base.proj_perp(&self.rep)))
    }

    pub fn transform(&self, g: &Mat7<f64>) -> NullLine {
        NullLine::new(apply(g, &self.rep), 1e-6).expect("isometries preserve null vectors")
    }
}

/// An annihilator photon, stored in reduced row echelon form.
#[derive(Debug, Clone, PartialEq)]
pub struct Photon {
    pub basis: [V; 2],
}

fn rref2(a: V, b: V) -> [V; 2] {
    let mut rows = vec![a.to_vec(), b.to_vec()];
    linalg::rref(&mut rows, 1e-12);
    [std::array::from_fn(|i| rows[0][i]), std::array::from_fn(|i| rows[1][i])]
}

impl Photon {
    pub fn new(w1: V, w2: V, tol: f64) -> Result<Self, FlagError> {
        let s = euclid(&w1) * euclid(&w2);
        if rank(&[w1, w2], 1e-9 * s.sqrt().max(1e-300)) < 2 {
            return Err(FlagError::Dependent);
        }
        let s1 = euclid(&w1).powi(2);
        let s2 = euclid(&w2).powi(2);
        if q(&w1, &w1).abs() > tol * s1 || q(&w2, &w2).abs() > tol * s2 || q(&w1, &w2).abs() > tol * s {
            return Err(FlagError::NotIsotropic);
        }
        if euclid(&cross(&w1, &w2)) > tol * s {
            return Err(FlagError::NotAnnihilator);
        }
        Ok(Photon { basis: rref2(w1, w2) })
    }

    pub fn contains(&self, x: &V, tol: f64) -> bool {
        rank(&[self.basis[0], self.basis[1], *x], tol) == 2
    }

    pub fn same(&self, o: &Photon, tol: f64) -> bool {
        o.basis.iter().all(|b| self.contains(b, tol))
    }

    pub fn transform(&self, g: &Mat7<f64>) -> Photon {
        Photon::new(apply(g, &self.basis[0]), apply(g, &self.basis[1]), 1e-6).expect("G2 preserves photons")
    }
}

/// Basis of `Ann(x) = ker(y |-> x x y)` as the graph of `v |-> -z x (u x v)` over
/// `u⊥ ∩ P`, together with `x` itself, where `x = u + z` over `base`.
pub fn annihilator_at(base: &SpacePoint, x: &NullLine) -> [V; 3] {
    let (u, z) = x.decompose(base);
    let rows: Vec<Vec<f64>> = vec![(0..3).map(|i| q(&base.frame[i], &u)).collect()];
    let perp = linalg::nullspace(&rows, 3, 1e-12);
    let mut vs: Vec<V> = perp.iter().map(|c| combo(c, &base.frame)).collect();
    // orthonormalize inside P
    let v1 = hat(&vs[0]).unwrap();
    vs[1] = sub(&vs[1], &scale(q(&vs[1], &v1), &v1));
    let v2 = hat(&vs[1]).unwrap();
    let graph = |v: &V| add(v, &scale(-1.0, &cross(&z, &cross(&u, v))));
    [add(&u, &z), graph(&v1), graph(&v2)]
}

pub fn annihilator(x: &NullLine) -> Result<[V; 3], FlagError> {
    if q(&x.rep, &x.rep).abs() > 1e-9 {
        return Err(FlagError::NotNull);
    }
    Ok(annihilator_at(&SpacePoint::origin(), x))
}

/// The kernel of the cross-product map of `x`, by elimination.
pub fn cross_kernel(x: &V, tol: f64) -> Vec<V> {
    let cols: [V; 7] = std::array::from_fn(|a| cross(x, &basis_vector(a)));
    let m = linalg::from_columns(&cols);
    let rows: Vec<Vec<f64>> = m.iter().map(|r| r.to_vec()).collect();
    linalg::nullspace(&rows, 7, tol)
        .into_iter()
        .map(|v| std::array::from_fn(|i| v[i]))
        .collect()
}

/// Rank-two tangent vector whose graph over its cokernel is `ω`.
pub fn pointing_vector_pho(base: &SpacePoint, w: &Photon) -> Result<TangentVector, FlagError> {
    let [w1, w2] = w.basis;
    let (p1, p2) = (base.proj(&w1), base.proj(&w2));
    let n1 = q(&p1, &p1);
    if n1 < 1e-12 {
        return Err(FlagError::DegenerateProjection);
    }
    let a1 = scale(1.0 / n1.sqrt(), &w1);
    let x = base.proj(&a1);
    let b = sub(&w2, &scale(q(&p2, &x), &a1));
    let y0 = base.proj(&b);
    let n2 = q(&y0, &y0);
    if n2 < 1e-12 * (1.0 + q(&p2, &p2)) {
        return Err(FlagError::DegenerateProjection);
    }
    let a2 = scale(1.0 / n2.sqrt(), &b);
    let y = base.proj(&a2);
    let (zx, zy) = (base.proj_perp(&a1), base.proj_perp(&a2));
    Ok(TangentVector::from_map(base, |e| add(&scale(q(e, &x), &zx), &scale(q(e, &y), &zy))))
}

// ---------------------------------------------------------------------------
// Orbits.

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum Iso3Orbit {
    /// An annihilator; carries a generator `x` with `T = Ann(x)`.
    O0 { generator: V },
    O1,
}

pub fn iso3_orbit(t: &[V; 3], tol: f64) -> Result<Iso3Orbit, FlagError> {
    let s = t.iter().map(euclid).fold(0.0, f64::max).powi(2);
    if rank(t, 1e-9) < 3 {
        return Err(FlagError::Dependent);
    }
    for a in 0..3 {
        for b in 0..3 {
            if q(&t[a], &t[b]).abs() > tol * s {
                return Err(FlagError::NotIsotropic);
            }
        }
    }
    let omega = q(&cross(&t[0], &t[1]), &t[2]);
    if omega.abs() > tol * s * s.sqrt() {
        return Ok(Iso3Orbit::O1);
    }
    // x = sum a_i t_i with x x t_j = 0
    let mut rows = Vec::new();
    for j in 0..3 {
        let prods: Vec<V> = (0..3).map(|i| cross(&t[i], &t[j])).collect();
        for c in 0..7 {
            rows.push((0..3).map(|i| prods[i][c]).collect::<Vec<f64>>());
        }
    }
    let ns = linalg::nullspace(&rows, 3, 1e-8 * s);
    let a = ns.first().ok_or(FlagError::NotAnnihilator)?;
    let x = combo(a, t);
    Ok(Iso3Orbit::O0 { generator: scale(1.0 / euclid(&x), &x) })
}

/// Relative position of two photons: `k` with Tits angle `k π / 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct TitsAngle {
    pub k: u8,
}

impl std::fmt::Display for TitsAngle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.k {
            0 => write!(f, "0"),
            1 => write!(f, "π/3"),
            k => write!(f, "{k}π/3"),
        }
    }
}

/// Signature `(positive, negative, null)` of a symmetric matrix.
fn signature(g: &[Vec<f64>], tol: f64) -> (usize, usize, usize) {
    let n = g.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |r, c| g[r][c]);
    let ev = SymmetricEigen::new(m).eigenvalues;
    let scale = ev.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-300);
    let pos = ev.iter().filter(|&&x| x > tol * scale).count();
    let neg = ev.iter().filter(|&&x| x < -tol * scale).count();
    (pos, neg, n - pos - neg)
}

pub fn photon_pair_orbit(a: &Photon, b: &Photon) -> TitsAngle {
    let vs = [a.basis[0], a.basis[1], b.basis[0], b.basis[1]];
    let d = rank(&vs, 1e-8);
    let k = match d {
        2 => 0,
        3 => 1,
        _ => {
            let g: Vec<Vec<f64>> = vs.iter().map(|x| vs.iter().map(|y| q(x, y)).collect()).collect();
            let (p, n, _) = signature(&g, 1e-8);
            if p == 2 && n == 2 {
                3
            } else {
                2
            }
        }
    };
    TitsAngle { k }
}

/// `ω ⊂ ω_lim⊥`, i.e. the photon lies in the thickening of `ω_lim`.
pub fn in_thickening(limit: &Photon, w: &Photon) -> bool {
    limit.basis.iter().all(|a| w.basis.iter().all(|b| q(a, b).abs() <= 1e-9))
}

// ---------------------------------------------------------------------------
// Incidence.

/// Photons through `x`: `span(x, cos θ a + sin θ b)` for a complement `(a, b)` of `x` in `Ann(x)`.
pub fn dual_circle_of_line(x: &NullLine, n: usize) -> Vec<Photon> {
    let [x0, a, b] = annihilator_at(&SpacePoint::origin(), x);
    (0..n)
        .map(|t| {
            let th = std::f64::consts::PI * t as f64 / n as f64;
            let v = add(&scale(th.cos(), &a), &scale(th.sin(), &b));
            Photon::new(x0, v, 1e-8).expect("lines through x in Ann(x) are photons")
        })
        .collect()
}

/// Null lines inside `ω`.
pub fn dual_circle_of_photon(w: &Photon, n: usize) -> Vec<NullLine> {
    (0..n)
        .map(|t| {
            let th = std::f64::consts::PI * t as f64 / n as f64;
            NullLine::new(add(&scale(th.cos(), &w.basis[0]), &scale(th.sin(), &w.basis[1])), 1e-8).unwrap()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Random samples.

/// Random element of the group, `exp` of a random combination of a
/// derivation basis.
pub fn random_group_element<R: Rng + ?Sized>(rng: &mut R, size: f64) -> Mat7<f64> {
    thread_local! {
        static BASIS: Vec<Mat7<f64>> = g2_lie::derivation_basis::<f64>(BasisTag::MImag, 1e-12).unwrap();
    }
    BASIS.with(|basis| {
        let mut x = SMatrix::<f64, 7, 7>::zeros();
        for b in basis {
            let c = size * standard_normal(rng);
            x += SMatrix::<f64, 7, 7>::from_fn(|r, k| c * b[r][k]);
        }
        let g = x.exp();
        std::array::from_fn(|r| std::array::from_fn(|k| g[(r, k)]))
    })
}

pub fn random_space_point<R: Rng + ?Sized>(rng: &mut R) -> SpacePoint {
    SpacePoint::origin().transform(&random_group_element(rng, 0.4)).unwrap()
}

/// `[u + z]` for random unit `u` in `P` and unit timelike `z` in `P⊥`.
pub fn random_null_line_at<R: Rng + ?Sized>(rng: &mut R, base: &SpacePoint) -> NullLine {
    let cu: Vec<f64> = (0..3).map(|_| standard_normal(rng)).collect();
    let cz: Vec<f64> = (0..4).map(|_| standard_normal(rng)).collect();
    let u = hat(&combo(&cu, base.frame())).unwrap();
    let z = hat(&combo(&cz, base.perp_basis())).unwrap();
    NullLine::new(add(&u, &z), 1e-8).unwrap()
}

pub fn random_photon_at<R: Rng + ?Sized>(rng: &mut R, base: &SpacePoint) -> Photon {
    let x = random_null_line_at(rng, base);
    let [x0, a, b] = annihilator_at(base, &x);
    let th = rng.gen_range(0.0..std::f64::consts::PI);
    Photon::new(x0, add(&scale(th.cos(), &a), &scale(th.sin(), &b)), 1e-8).unwrap()
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x(k: i32) -> V {
        model_r_vector(k)
    }

    fn m(a: usize) -> V {
        basis_vector(a)
    }

    fn photon(a: V, b: V) -> Photon {
        Photon::new(a, b, 1e-10).unwrap()
    }

    fn in_span(vs: &[V], w: &V) -> bool {
        let mut all = vs.to_vec();
        all.push(*w);
        rank(&all, 1e-9) == rank(vs, 1e-9)
    }

    #[test]
    fn annihilator_of_model_vector() {
        let ann = annihilator(&NullLine::new(x(3), TOL).unwrap()).unwrap();
        for k in [3, 2, 1] {
            assert!(in_span(&ann, &x(k)));
        }
        // (i + l) x (j - lk) = 0
        let il = NullLine::new(add(&m(0), &m(3)), TOL).unwrap();
        let ann = annihilator(&il).unwrap();
        assert!(in_span(&ann, &sub(&m(1), &m(6))));
        assert_eq!(cross(&add(&m(0), &m(3)), &sub(&m(1), &m(6))), [0.0; 7]);
        assert_eq!(NullLine::new(m(0), TOL), Err(FlagError::NotNull));
    }

    #[test]
    fn annihilator_matches_cross_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let p = random_space_point(&mut rng);
            let l = random_null_line_at(&mut rng, &p);
            let ann = annihilator_at(&p, &l);
            let ker = cross_kernel(&l.rep, 1e-9);
            assert_eq!(ker.len(), 3);
            for v in &ker {
                assert!(in_span(&ann, v));
            }
        }
    }

    #[test]
    fn metric_by_two_routes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_space_point(&mut rng);
        for _ in 0..10 {
            let mk = |rng: &mut ChaCha8Rng| {
                let ims: [V; 3] = std::array::from_fn(|_| {
                    let c: Vec<f64> = (0..4).map(|_| standard_normal(rng)).collect();
                    combo(&c, p.perp_basis())
                });
                TangentVector::new(p.clone(), ims, 1e-9).unwrap()
            };
            let (a, b) = (mk(&mut rng), mk(&mut rng));
            let g = tangent_metric(&a, &b).unwrap();
            assert!((g - tangent_metric_trace(&a, &b)).abs() < 1e-9);
            assert!(tangent_metric(&a, &a).unwrap() > 0.0);
        }
    }

    #[test]
    fn metric_is_frame_independent() {
        let p = SpacePoint::origin();
        let c = (0.3f64).cos();
        let s = (0.3f64).sin();
        let p2 = SpacePoint::new(add(&scale(c, &m(0)), &scale(s, &m(2))), m(1), TOL).unwrap();
        let a = cross_tangent(&p, &add(&m(3), &scale(0.5, &m(5))));
        let b = TangentVector::from_map(&p, |v| scale(q(v, &m(2)), &m(6)));
        let a2 = TangentVector::from_map(&p2, |v| a.apply(v));
        let b2 = TangentVector::from_map(&p2, |v| b.apply(v));
        let g1 = tangent_metric(&a, &b).unwrap();
        let g2 = tangent_metric(&a2, &b2).unwrap();
        assert!((g1 - g2).abs() < 1e-12);
    }

    #[test]
    fn cross_maps_are_orthogonal() {
        let p = SpacePoint::origin();
        let [z1, z2, z3, z4] = *p.perp_basis();
        let cs = [z1, z2, z3, z4].map(|z| cross_tangent(&p, &z));
        for a in 0..4 {
            for b in 0..4 {
                let g = tangent_metric(&cs[a], &cs[b]).unwrap();
                if a != b {
                    assert!(g.abs() < 1e-12);
                } else {
                    assert!(g > 0.0);
                }
            }
        }
    }

    fn r_basis_matrix(t: &TangentVector) -> Mat7<f64> {
        // the skew extension expressed in the model real basis
        let xs: [V; 7] = std::array::from_fn(|p| x(3 - p as i32));
        let xm = linalg::from_columns(&xs);
        let xinv = linalg::inverse(&xm, 1e-12).unwrap();
        linalg::mat_mul(&xinv, &linalg::mat_mul(&t.full_matrix(), &xm))
    }

    fn is_diag_multiple(mm: &Mat7<f64>, d: [f64; 7]) -> bool {
        let lam = mm[0][0] / d[0];
        (0..7).all(|r| (0..7).all(|c| (mm[r][c] - if r == c { lam * d[r] } else { 0.0 }).abs() < 1e-9)) && lam > 0.0
    }

    #[test]
    fn projection_toward_model_line_is_diagonal() {
        let p = SpacePoint::origin();
        let l = NullLine::new(x(3), TOL).unwrap();
        let phi = rank_one_pointing(&p, &l);
        let g2t = project_to_g2(&phi).unwrap();
        assert!(g2t.derivation_defect() < 1e-12);
        assert!(is_diag_multiple(&r_basis_matrix(&g2t), [2.0, 1.0, 1.0, 0.0, -1.0, -1.0, -2.0]));
        for z in p.perp_basis() {
            assert!(tangent_metric(&g2t, &cross_tangent(&p, z)).unwrap().abs() < 1e-12);
        }
        let again = project_to_g2(&g2t);
        assert!(matches!(again, Err(FlagError::WrongRank { .. })));
        let idem = g2_component(&g2t);
        for i in 0..3 {
            assert!(euclid(&sub(&idem.images[i], &g2t.images[i])) < 1e-12);
        }
    }

    #[test]
    fn rank_one_projection_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let p = random_space_point(&mut rng);
            let l = random_null_line_at(&mut rng, &p);
            let (u, z) = l.decompose(&p);
            let big_z = scale(-1.0, &cross(&z, &u));
            let t = project_to_g2(&rank_one_pointing(&p, &l)).unwrap();
            // u |-> 2z/3 and v |-> -Z x v / 3 on u⊥
            assert!(euclid(&sub(&t.apply(&u), &scale(2.0 / 3.0, &z))) < 1e-9);
            let v = hat(&sub(&p.frame()[1], &scale(q(&p.frame()[1], &u), &u))).unwrap();
            assert!(euclid(&sub(&t.apply(&v), &scale(-1.0 / 3.0, &cross(&big_z, &v)))) < 1e-9);
            assert!(t.derivation_defect() < 1e-9);
        }
    }

    #[test]
    fn pointing_toward_model_photon() {
        let p = SpacePoint::origin();
        let w = photon(x(3), x(2));
        let t = pointing_vector_pho(&p, &w).unwrap();
        assert!(t.derivation_defect() < 1e-12);
        assert!(is_diag_multiple(&r_basis_matrix(&t), [1.0, 1.0, 0.0, 0.0, 0.0, -1.0, -1.0]));
        assert!(t.graph_star(1e-9).unwrap().same(&w, 1e-9));
    }

    #[test]
    fn pointing_vector_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let p = random_space_point(&mut rng);
            let w = random_photon_at(&mut rng, &p);
            let t = pointing_vector_pho(&p, &w).unwrap();
            assert!(t.derivation_defect() < 1e-8);
            assert!(t.graph_star(1e-9).unwrap().same(&w, 1e-8));
            // with x, y orthonormal in the projection and z = φ(x): φ(y) = (x x y) x z
            let wp = [p.proj(&w.basis[0]), p.proj(&w.basis[1])];
            let xx = hat(&wp[0]).unwrap();
            let yy = hat(&sub(&wp[1], &scale(q(&wp[1], &xx), &xx))).unwrap();
            let z = t.apply(&xx);
            let lhs = t.apply(&yy);
            let rhs = cross(&cross(&xx, &yy), &z);
            assert!(euclid(&sub(&lhs, &rhs)) < 1e-8);
            assert!(euclid(&t.apply(&cross(&xx, &yy))) < 1e-8);
        }
    }

    #[test]
    fn iso3_representatives() {
        match iso3_orbit(&[x(3), x(2), x(1)], 1e-10).unwrap() {
            Iso3Orbit::O0 { generator } => assert!(rank(&[generator, x(3)], 1e-9) == 1),
            o => panic!("{:?}", o),
        }
        assert_eq!(iso3_orbit(&[x(-3), x(2), x(1)], 1e-10).unwrap(), Iso3Orbit::O1);
        assert_eq!(iso3_orbit(&[x(3), x(-3), x(1)], 1e-10), Err(FlagError::NotIsotropic));
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let p0 = random_space_point(&mut rng);
            let l = random_null_line_at(&mut rng, &p0);
            let ann = annihilator_at(&SpacePoint::origin(), &l);
            match iso3_orbit(&ann, 1e-9).unwrap() {
                Iso3Orbit::O0 { generator } => assert!(rank(&[generator, l.rep], 1e-7) == 1),
                o => panic!("{:?}", o),
            }
        }
    }

    #[test]
    fn photon_pair_representatives() {
        let w = photon(x(3), x(2));
        assert_eq!(photon_pair_orbit(&w, &w).k, 0);
        assert_eq!(photon_pair_orbit(&w, &photon(x(3), x(1))).k, 1);
        assert_eq!(photon_pair_orbit(&w, &photon(x(-2), x(-3))).k, 3);
        assert_eq!(photon_pair_orbit(&w, &photon(x(-3), x(-1))).k, 2);
        assert!(in_thickening(&w, &w));
        assert!(!in_thickening(&w, &photon(x(-2), x(-3))));
        assert!(in_thickening(&w, &photon(x(3), x(1))));
        assert!(!in_thickening(&w, &photon(x(-3), x(-1))));
    }

    #[test]
    fn dual_circles() {
        let l = NullLine::new(x(3), TOL).unwrap();
        let ann = annihilator(&l).unwrap();
        for w in dual_circle_of_line(&l, 16) {
            assert!(w.contains(&x(3), 1e-9));
            assert!(w.basis.iter().all(|b| in_span(&ann, b)));
        }
        let w = photon(x(3), x(2));
        for (t, line) in dual_circle_of_photon(&w, 8).iter().enumerate() {
            let th = std::f64::consts::PI * t as f64 / 8.0;
            let expect = NullLine::new(add(&scale(th.cos(), &x(3)), &scale(th.sin(), &x(2))), TOL).unwrap();
            assert!(line.same(&expect, 1e-9));
        }
    }

    #[test]
    fn ein_two_fold_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let p = random_space_point(&mut rng);
            let p0 = random_space_point(&mut rng);
            let l = random_null_line_at(&mut rng, &p0);
            let (u, z) = l.decompose(&p);
            assert!((q(&u, &u) - 1.0).abs() < 1e-9 && (q(&z, &z) + 1.0).abs() < 1e-9);
            assert!(p.contains(&u, 1e-9) && euclid(&p.proj(&z)) < 1e-9);
            assert!(rank(&[add(&u, &z), l.rep], 1e-8) == 1);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn prop_projection_is_g2_and_orthogonal(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_space_point(&mut rng);
            let l = random_null_line_at(&mut rng, &p);
            let t = project_to_g2(&rank_one_pointing(&p, &l)).unwrap();
            prop_assert!(t.derivation_defect() < 1e-8);
            for z in p.perp_basis() {
                prop_assert!(tangent_metric(&t, &cross_tangent(&p, z)).unwrap().abs() < 1e-9);
            }
        }

        #[test]
        fn prop_photon_fiber_over_plane(seed in 0u64..100_000) {
            // span(u + z, v + (u x v) x z) is a photon projecting onto span(u, v)
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_space_point(&mut rng);
            let cz: Vec<f64> = (0..4).map(|_| standard_normal(&mut rng)).collect();
            let z = hat(&combo(&cz, p.perp_basis())).unwrap();
            let [u, v, w] = *p.frame();
            let om = Photon::new(add(&u, &z), add(&v, &cross(&w, &z)), 1e-9);
            prop_assert!(om.is_ok());
        }

        #[test]
        fn prop_thickening_matches_orbit(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = SpacePoint::origin();
            let a = random_photon_at(&mut rng, &p);
            let b = if seed % 3 == 0 {
                // a photon meeting a in a line
                let x = NullLine::new(a.basis[0], 1e-8).unwrap();
                dual_circle_of_line(&x, 7)[(seed % 7) as usize].clone()
            } else {
                random_photon_at(&mut rng, &p)
            };
            let k = photon_pair_orbit(&a, &b).k;
            prop_assert_eq!(in_thickening(&a, &b), k <= 1);
        }
    }
}
