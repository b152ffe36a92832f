//! The Lie algebra g2 as derivations of the cross product: Leibniz defect,
//! the extension of an infinitesimal action on a null triple, root vectors,
//! Cartan projection, the regularity invariant and the five sl2 classes.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::cross_bases::NullTriple;
use crate::linalg::{self, Mat7, Vec7};
use crate::octonion_core::{model_c_vectors, model_r_vectors, BasisTag, ImOct, OctError};
use crate::scalar::{rat, ExactScalar, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error(transparent)]
    Oct(#[from] OctError),
    #[error("relation {index} of the null triple is violated by the action")]
    ConstraintViolation { index: usize },
    #[error("eigenvalues do not fit the pattern (r+s, r, s, 0, -s, -r, -r-s): {0}")]
    PatternMismatch(String),
    #[error("regularity invariant is undefined for the zero map")]
    ZeroInput,
    #[error("null triple frame is singular")]
    SingularFrame,
}

/// A 7x7 matrix acting on imaginary octonion coordinates in `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation<S> {
    pub matrix: Mat7<S>,
    pub basis: BasisTag,
}

impl<S: Scalar> Derivation<S> {
    pub fn new(matrix: Mat7<S>, basis: BasisTag) -> Self {
        Derivation { matrix, basis }
    }

    pub fn apply(&self, v: &ImOct<S>) -> Result<ImOct<S>, OctError> {
        if v.basis != self.basis {
            return Err(OctError::BasisMismatch(self.basis, v.basis));
        }
        Ok(ImOct::new(linalg::mat_vec(&self.matrix, &v.coords), self.basis))
    }

    pub fn defect(&self) -> Result<f64, LieError> {
        derivation_defect(&self.matrix, self.basis)
    }
}

/// `table[a][b]` holds the coordinates of `b_a x b_b` for the basis vectors.
pub type CrossTable<S> = [[Vec7<S>; 7]; 7];

pub fn cross_table<S: Scalar>(tag: BasisTag) -> Result<CrossTable<S>, OctError> {
    let mut t: CrossTable<S> = std::array::from_fn(|_| std::array::from_fn(|_| linalg::zero_vec()));
    for a in 0..7 {
        for b in 0..7 {
            if a == b {
                continue;
            }
            let x = ImOct::<S>::basis_vector(a, tag);
            let y = ImOct::<S>::basis_vector(b, tag);
            t[a][b] = x.cross(&y)?.coords;
        }
    }
    Ok(t)
}

pub fn cross_with<S: Scalar>(t: &CrossTable<S>, x: &Vec7<S>, y: &Vec7<S>) -> Vec7<S> {
    let mut r = linalg::zero_vec::<S>();
    for a in 0..7 {
        if x[a].is_zero() {
            continue;
        }
        for b in 0..7 {
            if y[b].is_zero() || a == b {
                continue;
            }
            let s = x[a].clone() * y[b].clone();
            for c in 0..7 {
                if !t[a][b][c].is_zero() {
                    r[c] = r[c].clone() + s.clone() * t[a][b][c].clone();
                }
            }
        }
    }
    r
}

/// Entrywise residual `M(u x v) - Mu x v - u x Mv` over all basis pairs.
pub fn leibniz_residual<S: Scalar>(m: &Mat7<S>, t: &CrossTable<S>) -> Vec<S> {
    let mut out = Vec::with_capacity(343);
    for a in 0..7 {
        for b in 0..7 {
            let ma = linalg::column(m, a);
            let mb = linalg::column(m, b);
            let lhs = linalg::mat_vec(m, &t[a][b]);
            let e_a = unit::<S>(a);
            let e_b = unit::<S>(b);
            let r1 = cross_with(t, &ma, &e_b);
            let r2 = cross_with(t, &e_a, &mb);
            for c in 0..7 {
                out.push(lhs[c].clone() - r1[c].clone() - r2[c].clone());
            }
        }
    }
    out
}

fn unit<S: Scalar>(a: usize) -> Vec7<S> {
    std::array::from_fn(|i| if i == a { S::one() } else { S::zero() })
}

/// Max-norm of the Leibniz residual; zero exactly for derivations.
pub fn derivation_defect<S: Scalar>(m: &Mat7<S>, tag: BasisTag) -> Result<f64, LieError> {
    let t = cross_table::<S>(tag)?;
    Ok(leibniz_residual(m, &t).iter().map(|x| x.magnitude()).fold(0.0, f64::max))
}

pub fn is_derivation_exact(m: &Mat7<ExactScalar>, tag: BasisTag) -> Result<bool, LieError> {
    let t = cross_table::<ExactScalar>(tag)?;
    Ok(leibniz_residual(m, &t).iter().all(|x| x.is_zero()))
}

/// Rows of the linear system in the 49 matrix entries expressing the Leibniz rule.
pub fn leibniz_system<S: Scalar>(tag: BasisTag) -> Result<Vec<Vec<S>>, OctError> {
    let t = cross_table::<S>(tag)?;
    let mut rows = Vec::with_capacity(343);
    for a in 0..7 {
        for b in 0..7 {
            for comp in 0..7 {
                let mut row = vec![S::zero(); 49];
                for c in 0..7 {
                    row[comp * 7 + c] = row[comp * 7 + c].clone() + t[a][b][c].clone();
                }
                for r in 0..7 {
                    row[r * 7 + a] = row[r * 7 + a].clone() - t[r][b][comp].clone();
                    row[r * 7 + b] = row[r * 7 + b].clone() - t[a][r][comp].clone();
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}

/// Dimension of the space of derivations, computed exactly.
pub fn g2_dimension(tag: BasisTag) -> Result<usize, OctError> {
    let rows = leibniz_system::<ExactScalar>(tag)?;
    Ok(49 - linalg::rank(&rows, 0.0))
}

/// A basis of the derivation algebra, as matrices.
pub fn derivation_basis<S: Scalar>(tag: BasisTag, tol: f64) -> Result<Vec<Mat7<S>>, OctError> {
    let rows = leibniz_system::<S>(tag)?;
    Ok(linalg::nullspace(&rows, 49, tol)
        .into_iter()
        .map(|v| std::array::from_fn(|r| std::array::from_fn(|c| v[r * 7 + c].clone())))
        .collect())
}

// ---------------------------------------------------------------------------
// Root vectors.

fn ex(n: i64, d: i64) -> ExactScalar {
    ExactScalar::from_ratio(n, d)
}

/// Position of index `k` (3..-3) in the ordered basis.
pub fn pos(k: i32) -> usize {
    (3 - k) as usize
}

/// Matrix with entries given as `(source k, target k, coefficient)`.
pub fn from_arrows(arrows: &[(i32, i32, ExactScalar)]) -> Mat7<ExactScalar> {
    let mut m = linalg::zero_mat::<ExactScalar>();
    for (src, dst, c) in arrows {
        m[pos(*dst)][pos(*src)] = c.clone();
    }
    m
}

/// Root vectors in the model complex basis.
pub mod model_c {
    use super::*;

    pub fn e_minus_alpha() -> Mat7<ExactScalar> {
        from_arrows(&[(2, 1, ex(1, 1)), (-1, -2, ex(1, 1))])
    }

    pub fn e_minus_beta() -> Mat7<ExactScalar> {
        let c = -(ExactScalar::sqrt2() * ExactScalar::i());
        from_arrows(&[(3, 2, ex(1, 1)), (1, 0, c.clone()), (0, -1, c), (-2, -3, ex(1, 1))])
    }

    /// Root vector of the highest root.
    pub fn e_delta() -> Mat7<ExactScalar> {
        from_arrows(&[(-2, 3, ex(1, 1)), (-3, 2, ex(1, 1))])
    }

    pub fn e_alpha() -> Mat7<ExactScalar> {
        linalg::conj_transpose(&e_minus_alpha())
    }

    pub fn e_beta() -> Mat7<ExactScalar> {
        linalg::conj_transpose(&e_minus_beta())
    }

    /// Cartan theta: +1 on the `e2, e0, e-2` side and -1 on the rest.
    pub fn theta() -> Mat7<ExactScalar> {
        let d = [-1, 1, -1, 1, -1, 1, -1];
        std::array::from_fn(|r| std::array::from_fn(|c| if r == c { ex(d[r], 1) } else { ex(0, 1) }))
    }
}

/// Root vectors in the model real basis.
pub mod model_r {
    use super::*;

    pub fn e_minus_alpha() -> Mat7<ExactScalar> {
        from_arrows(&[(2, 1, ex(1, 1)), (-1, -2, ex(-1, 1))])
    }

    pub fn e_minus_beta() -> Mat7<ExactScalar> {
        let s = ExactScalar::sqrt2();
        from_arrows(&[(3, 2, ex(1, 1)), (1, 0, s.clone()), (0, -1, s), (-2, -3, ex(-1, 1))])
    }

    pub fn e_delta() -> Mat7<ExactScalar> {
        from_arrows(&[(-2, 3, ex(1, 1)), (-3, 2, ex(-1, 1))])
    }

    pub fn e_alpha() -> Mat7<ExactScalar> {
        linalg::transpose(&e_minus_alpha())
    }

    pub fn e_beta() -> Mat7<ExactScalar> {
        linalg::transpose(&e_minus_beta())
    }
}

/// `diag(r+s, r, s, 0, -s, -r, -r-s)`.
pub fn cartan_element<S: Scalar>(r: S, s: S) -> Mat7<S> {
    let d = [
        r.clone() + s.clone(),
        r.clone(),
        s.clone(),
        S::zero(),
        -s.clone(),
        -r.clone(),
        -(r + s),
    ];
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { d[i].clone() } else { S::zero() }))
}

/// The Hermitian tridiagonal element of the model complex basis with
/// subdiagonal `(b, a, -√2 i b, -√2 i b, a, b)` and conjugate superdiagonal.
pub fn higgs_psi<S: Scalar>(a: S, b: S) -> Mat7<S> {
    let ri2 = S::from_exact(&(ExactScalar::sqrt2() * ExactScalar::i()))
        .expect("complex scalar type required");
    let sub = [
        b.clone(),
        a.clone(),
        -(ri2.clone() * b.clone()),
        -(ri2.clone() * b.clone()),
        a.clone(),
        b.clone(),
    ];
    let mut m = linalg::zero_mat::<S>();
    for t in 0..6 {
        m[t + 1][t] = sub[t].clone();
        m[t][t + 1] = sub[t].conj();
    }
    m
}

// ---------------------------------------------------------------------------
// Extension from a null triple.

/// The seven linear relations an infinitesimal action on `(u, v, w)` must
/// satisfy; returns the values in the order q(u',u), q(v',v), q(w',w),
/// q(u',v)+q(u,v'), q(u',w)+q(u,w'), q(v',w)+q(v,w'), and the variation of Ω.
pub fn triple_constraints<S: Scalar>(
    n: &NullTriple<S>,
    act: &[ImOct<S>; 3],
) -> Result<[S; 7], OctError> {
    let (u, v, w) = (&n.u, &n.v, &n.w);
    let [du, dv, dw] = act;
    let omega = |a: &ImOct<S>, b: &ImOct<S>, c: &ImOct<S>| a.cross(b)?.qform(c);
    Ok([
        du.qform(u)?,
        dv.qform(v)?,
        dw.qform(w)?,
        du.qform(v)? + u.qform(dv)?,
        du.qform(w)? + u.qform(dw)?,
        dv.qform(w)? + v.qform(dw)?,
        omega(du, v, w)? + omega(u, dv, w)? + omega(u, v, dw)?,
    ])
}

/// The unique derivation restricting to `act` on the triple, obtained by
/// extending through the frame `(u x v, u, v, (u x v) x w, u x w, v x w, w)`.
pub fn extend_derivation<S: Scalar>(
    n: &NullTriple<S>,
    act: &[ImOct<S>; 3],
    tol: f64,
) -> Result<Derivation<S>, LieError> {
    let tag = n.u.basis;
    for a in act {
        if a.basis != tag {
            return Err(OctError::BasisMismatch(tag, a.basis).into());
        }
    }
    for (index, c) in triple_constraints(n, act)?.iter().enumerate() {
        if !linalg::negligible(c, tol) {
            return Err(LieError::ConstraintViolation { index });
        }
    }
    let (u, v, w) = (&n.u, &n.v, &n.w);
    let [du, dv, dw] = act;
    let uv = u.cross(v)?;
    let duv = du.cross(v)?.add(&u.cross(dv)?)?;
    let uvw = uv.cross(w)?;
    let duvw = duv.cross(w)?.add(&uv.cross(dw)?)?;
    let uw = u.cross(w)?;
    let duw = du.cross(w)?.add(&u.cross(dw)?)?;
    let vw = v.cross(w)?;
    let dvw = dv.cross(w)?.add(&v.cross(dw)?)?;
    let frame = [uv, u.clone(), v.clone(), uvw, uw, vw, w.clone()];
    let image = [duv, du.clone(), dv.clone(), duvw, duw, dvw, dw.clone()];
    let f = linalg::from_columns(&std::array::from_fn(|i| frame[i].coords.clone()));
    let g = linalg::from_columns(&std::array::from_fn(|i| image[i].coords.clone()));
    let finv = linalg::inverse(&f, tol).ok_or(LieError::SingularFrame)?;
    Ok(Derivation::new(linalg::mat_mul(&g, &finv), tag))
}

/// Images of the triple under a matrix (the inverse of extension).
pub fn restrict_to_triple<S: Scalar>(m: &Derivation<S>, n: &NullTriple<S>) -> Result<[ImOct<S>; 3], OctError> {
    Ok([m.apply(&n.u)?, m.apply(&n.v)?, m.apply(&n.w)?])
}

// ---------------------------------------------------------------------------
// Cartan projection and the regularity invariant.

/// Element `diag(r+s, r, s, 0, -s, -r, -r-s)` of the closed Weyl chamber.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CartanVector {
    pub r: f64,
    pub s: f64,
}

impl CartanVector {
    pub fn alpha(&self) -> f64 {
        self.r - self.s
    }
    pub fn beta(&self) -> f64 {
        self.s
    }
}

/// Power sums `tr M^k` for k = 1..6.
fn power_traces<S: Scalar>(m: &Mat7<S>) -> [S; 6] {
    let mut p = linalg::identity::<S>();
    std::array::from_fn(|_| {
        p = linalg::mat_mul(&p, m);
        linalg::trace(&p)
    })
}

/// Coefficients `(A, B, C)` of the characteristic polynomial
/// `X^7 - A X^5 + B X^3 - C X` of an element of g2, from traces of even powers.
pub fn char_coefficients<S: Scalar>(m: &Mat7<S>) -> (S, S, S) {
    let p = power_traces(m);
    let half = S::from_i64(2).inv().unwrap();
    let sixth = S::from_i64(6).inv().unwrap();
    // squares of the eigenvalue pairs have power sums P_k = tr M^{2k} / 2
    let p1 = half.clone() * p[1].clone();
    let p2 = half.clone() * p[3].clone();
    let p3 = half.clone() * p[5].clone();
    let a = p1.clone();
    let b = half * (p1.clone() * p1.clone() - p2.clone());
    let c = sixth
        * (p1.clone() * p1.clone() * p1.clone() - S::from_i64(3) * p1 * p2 + S::from_i64(2) * p3);
    (a, b, c)
}

/// `I = 54 C / A^3`.
pub fn regularity_invariant<S: Scalar>(m: &Mat7<S>) -> Result<S, LieError> {
    let (a, _, c) = char_coefficients(m);
    let a3 = a.clone() * a.clone() * a;
    let inv = a3.inv().ok_or(LieError::ZeroInput)?;
    Ok(S::from_i64(54) * c * inv)
}

/// Exact invariant of the Hermitian element with parameters `(a, b)` given
/// `|a|^2` and `|b|^2`: the tridiagonal matrix with unit superdiagonal and
/// subdiagonal `(|b|^2, |a|^2, 2|b|^2, 2|b|^2, |a|^2, |b|^2)` has the same
/// characteristic polynomial.
pub fn regularity_invariant_ab(a_sq: &Rational, b_sq: &Rational) -> Result<Rational, LieError> {
    let q = |x: &Rational| ExactScalar::from_rational(x.clone());
    let two = rat(2, 1);
    let sub = [
        q(b_sq),
        q(a_sq),
        q(&(two.clone() * b_sq)),
        q(&(two * b_sq)),
        q(a_sq),
        q(b_sq),
    ];
    let mut m = linalg::zero_mat::<ExactScalar>();
    for t in 0..6 {
        m[t + 1][t] = sub[t].clone();
        m[t][t + 1] = ExactScalar::one();
    }
    let i = regularity_invariant(&m)?;
    Ok(i.to_rational().expect("rational input gives a rational invariant"))
}

/// Sort the spectrum of a semisimple element with real eigenvalues into the
/// closed Weyl chamber.
pub fn cartan_projection<S: Scalar>(m: &Mat7<S>, tol: f64) -> Result<CartanVector, LieError> {
    let cm = nalgebra::SMatrix::<Complex64, 7, 7>::from_fn(|r, c| m[r][c].to_complex());
    let scale = 1.0 + cm.norm();
    let hermitian = (cm - cm.adjoint()).norm() <= tol * scale;
    let ev: Vec<Complex64> = if hermitian {
        nalgebra::SymmetricEigen::new(cm).eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    } else {
        nalgebra::linalg::Schur::try_new(cm, 1e-14, 10_000)
            .and_then(|s| s.eigenvalues())
            .ok_or_else(|| LieError::PatternMismatch("eigenvalue iteration did not converge".into()))?
            .iter()
            .copied()
            .collect()
    };
    let mut lam = Vec::with_capacity(7);
    for z in ev.iter() {
        if z.im.abs() > tol * scale {
            return Err(LieError::PatternMismatch(format!("non-real eigenvalue {z}")));
        }
        lam.push(z.re);
    }
    lam.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let (r, s) = (lam[1], lam[2]);
    let expected = [r + s, r, s, 0.0, -s, -r, -r - s];
    if s < -tol * scale || lam.iter().zip(expected).any(|(x, e)| (x - e).abs() > tol * scale) {
        return Err(LieError::PatternMismatch(format!("eigenvalues {:?}", lam)));
    }
    Ok(CartanVector { r, s: s.max(0.0) })
}

// ---------------------------------------------------------------------------
// The five sl2 classes.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sl2Class {
    Principal,
    ShortBeta,
    LongAlpha,
    Class4,
    Class5,
}

impl Sl2Class {
    pub const ALL: [Sl2Class; 5] =
        [Sl2Class::Principal, Sl2Class::ShortBeta, Sl2Class::LongAlpha, Sl2Class::Class4, Sl2Class::Class5];

    /// Block sizes of the invariant splitting, largest first.
    pub fn expected_blocks(&self) -> Vec<usize> {
        match self {
            Sl2Class::Principal => vec![7],
            Sl2Class::ShortBeta => vec![3, 2, 2],
            Sl2Class::LongAlpha => vec![2, 2, 1, 1, 1],
            Sl2Class::Class4 | Sl2Class::Class5 => vec![3, 3, 1],
        }
    }

    /// Signature `(p, q)` of the fixed line in the 3+3+1 splittings.
    pub fn expected_fixed_line(&self) -> Option<(u8, u8)> {
        match self {
            Sl2Class::Class4 => Some((0, 1)),
            Sl2Class::Class5 => Some((1, 0)),
            _ => None,
        }
    }
}

/// Nilpotent representative in the model complex basis.
pub fn sl2_nilpotent(class: Sl2Class) -> Derivation<ExactScalar> {
    use model_c::*;
    let m = match class {
        Sl2Class::Principal => linalg::mat_add(&e_minus_alpha(), &e_minus_beta()),
        Sl2Class::ShortBeta => e_minus_beta(),
        Sl2Class::LongAlpha => e_minus_alpha(),
        Sl2Class::Class4 => linalg::mat_add(&e_minus_beta(), &e_delta()),
        Sl2Class::Class5 => linalg::mat_add(&e_minus_alpha(), &e_delta()),
    };
    Derivation::new(m, BasisTag::ModelC)
}

/// Jordan block sizes of a nilpotent matrix from the ranks of its powers.
pub fn jordan_type<S: Scalar>(n: &Mat7<S>, tol: f64) -> Vec<usize> {
    let mut ranks = vec![7usize];
    let mut p = linalg::identity::<S>();
    for _ in 0..7 {
        p = linalg::mat_mul(&p, n);
        let rows: Vec<Vec<S>> = p.iter().map(|r| r.to_vec()).collect();
        ranks.push(linalg::rank(&rows, tol));
    }
    // number of blocks of size >= k is rank(N^{k-1}) - rank(N^k)
    let at_least: Vec<usize> = (1..=7).map(|k| ranks[k - 1] - ranks[k]).chain([0]).collect();
    let mut blocks = Vec::new();
    for k in (1..=7).rev() {
        for _ in 0..(at_least[k - 1] - at_least[k]) {
            blocks.push(k);
        }
    }
    blocks
}

/// Invariant data of an sl2 class representative.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Sl2Signature {
    pub blocks: Vec<usize>,
    /// Signature of the line `ker N / (ker N ∩ im N^2)` for 3+3+1 types,
    /// read off from the Cartan involution: spacelike on the +1 side.
    pub fixed_line: Option<(u8, u8)>,
    pub nilpotent: bool,
}

pub fn sl2_signature(class: Sl2Class) -> Sl2Signature {
    let n = sl2_nilpotent(class).matrix;
    let blocks = jordan_type(&n, 0.0);
    let mut p = linalg::identity::<ExactScalar>();
    for _ in 0..7 {
        p = linalg::mat_mul(&p, &n);
    }
    let nilpotent = p.iter().flatten().all(|x| x.is_zero());
    let fixed_line = if blocks == [3, 3, 1] { fixed_line_type(&n) } else { None };
    Sl2Signature { blocks, fixed_line, nilpotent }
}

fn fixed_line_type(n: &Mat7<ExactScalar>) -> Option<(u8, u8)> {
    let rows: Vec<Vec<ExactScalar>> = n.iter().map(|r| r.to_vec()).collect();
    let ker = linalg::nullspace(&rows, 7, 0.0);
    let n2 = linalg::mat_mul(n, n);
    let im2: Vec<Vec<ExactScalar>> = (0..7).map(|c| linalg::column(&n2, c).to_vec()).collect();
    let base = linalg::rank(&im2, 0.0);
    let theta = model_c::theta();
    for k in ker {
        let mut with = im2.clone();
        with.push(k.clone());
        if linalg::rank(&with, 0.0) == base + 1 {
            let kv: Vec7<ExactScalar> = std::array::from_fn(|i| k[i].clone());
            let tk = linalg::mat_vec(&theta, &kv);
            if tk == kv {
                return Some((1, 0));
            }
            if tk.iter().zip(kv.iter()).all(|(a, b)| a.clone() + b.clone() == ExactScalar::zero()) {
                return Some((0, 1));
            }
            return None;
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Exact group elements.

/// Columns are the model vectors in multiplication-basis coordinates.
pub fn model_change_of_basis(tag: BasisTag) -> Mat7<ExactScalar> {
    match tag {
        BasisTag::ModelC => linalg::from_columns(&model_c_vectors()),
        BasisTag::ModelR => linalg::from_columns(&model_r_vectors()),
        _ => linalg::identity(),
    }
}

/// Re-express a matrix given in the model real basis in the multiplication basis.
pub fn model_r_to_m(m: &Mat7<ExactScalar>) -> Mat7<ExactScalar> {
    let x = model_change_of_basis(BasisTag::ModelR);
    let xinv = linalg::inverse(&x, 0.0).expect("model basis is invertible");
    linalg::mat_mul(&linalg::mat_mul(&x, m), &xinv)
}

/// Random exact element of the group, as a product of exponentials of root
/// vectors with small rational times.  `ModelC` and `ModelR` use the
/// respective root vectors; `MImag` conjugates the real ones.
pub fn random_exact_group_element<R: Rng + ?Sized>(
    rng: &mut R,
    tag: BasisTag,
    factors: usize,
) -> Mat7<ExactScalar> {
    let gens: Vec<Mat7<ExactScalar>> = match tag {
        BasisTag::ModelC => vec![
            model_c::e_minus_alpha(),
            model_c::e_minus_beta(),
            model_c::e_alpha(),
            model_c::e_beta(),
        ],
        _ => vec![
            model_r::e_minus_alpha(),
            model_r::e_minus_beta(),
            model_r::e_alpha(),
            model_r::e_beta(),
        ],
    };
    let mut g = linalg::identity::<ExactScalar>();
    for _ in 0..factors {
        let x = &gens[rng.gen_range(0..gens.len())];
        let t = ExactScalar::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2));
        g = linalg::mat_mul(&g, &linalg::exp_nilpotent(&linalg::mat_scale(&t, x)));
    }
    if tag == BasisTag::MImag {
        model_r_to_m(&g)
    } else {
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const C: BasisTag = BasisTag::ModelC;
    const R: BasisTag = BasisTag::ModelR;

    #[test]
    fn dimension_is_fourteen() {
        assert_eq!(g2_dimension(BasisTag::MImag).unwrap(), 14);
        assert_eq!(g2_dimension(C).unwrap(), 14);
    }

    #[test]
    fn root_vectors_are_derivations() {
        for m in [
            model_c::e_minus_alpha(),
            model_c::e_minus_beta(),
            model_c::e_delta(),
            model_c::e_alpha(),
            model_c::e_beta(),
        ] {
            assert!(is_derivation_exact(&m, C).unwrap());
        }
        for m in [
            model_r::e_minus_alpha(),
            model_r::e_minus_beta(),
            model_r::e_delta(),
            model_r::e_alpha(),
            model_r::e_beta(),
        ] {
            assert!(is_derivation_exact(&m, R).unwrap());
        }
        let h = higgs_psi(ExactScalar::from_ratio(2, 3) + ExactScalar::i(), ExactScalar::from_ratio(-1, 5));
        assert!(is_derivation_exact(&h, C).unwrap());
        let d = cartan_element(ExactScalar::from_ratio(3, 1), ExactScalar::from_ratio(-7, 2));
        assert!(is_derivation_exact(&d, C).unwrap());
    }

    #[test]
    fn generic_matrix_has_positive_defect() {
        let mut m = linalg::zero_mat::<f64>();
        m[0][0] = 1.0;
        m[2][5] = 0.3;
        assert!(derivation_defect(&m, BasisTag::MImag).unwrap() > 0.1);
    }

    use crate::cross_bases::model_null_triple;

    #[test]
    fn extension_recovers_root_vectors() {
        let n = model_null_triple();
        let e = |k: i32| ImOct::<ExactScalar>::basis_vector(pos(k), C);
        let zero = ImOct::<ExactScalar>::zero(C);
        let c = -(ExactScalar::sqrt2() * ExactScalar::i());
        let eb = extend_derivation(&n, &[zero.clone(), e(0).scale(&c), zero.clone()], 0.0).unwrap();
        assert_eq!(eb.matrix, model_c::e_minus_beta());
        let ea = extend_derivation(&n, &[e(1), zero.clone(), zero.clone()], 0.0).unwrap();
        assert_eq!(ea.matrix, model_c::e_minus_alpha());
        let z = extend_derivation(&n, &[zero.clone(), zero.clone(), zero], 0.0).unwrap();
        assert_eq!(z.matrix, linalg::zero_mat());
    }

    #[test]
    fn extension_round_trip_on_cartan() {
        let n = model_null_triple();
        let d = Derivation::new(cartan_element(ExactScalar::from_ratio(2, 1), ExactScalar::from_ratio(1, 3)), C);
        let act = restrict_to_triple(&d, &n).unwrap();
        assert_eq!(extend_derivation(&n, &act, 0.0).unwrap(), d);
    }

    #[test]
    fn extension_rejects_bad_action() {
        let n = model_null_triple();
        let e = |k: i32| ImOct::<ExactScalar>::basis_vector(pos(k), C);
        let zero = ImOct::<ExactScalar>::zero(C);
        // u' = e-2 pairs with u = e2
        let err = extend_derivation(&n, &[e(-2), zero.clone(), zero], 0.0).unwrap_err();
        assert_eq!(err, LieError::ConstraintViolation { index: 0 });
    }

    #[test]
    fn regularity_exact_values() {
        assert_eq!(regularity_invariant_ab(&rat(1, 1), &rat(0, 1)).unwrap(), rat(0, 1));
        assert_eq!(regularity_invariant_ab(&rat(0, 1), &rat(1, 1)).unwrap(), rat(1, 1));
        assert_eq!(regularity_invariant_ab(&rat(5, 3), &rat(1, 1)).unwrap(), rat(243, 343));
    }

    #[test]
    fn regularity_on_coroots() {
        // s = 0 is beta-singular, r = s is alpha-singular
        let d1 = cartan_element(ExactScalar::one(), ExactScalar::zero());
        assert_eq!(regularity_invariant(&d1).unwrap(), ExactScalar::zero());
        let d2 = cartan_element(ExactScalar::one(), ExactScalar::one());
        assert_eq!(regularity_invariant(&d2).unwrap(), ExactScalar::one());
        assert_eq!(regularity_invariant(&linalg::zero_mat::<f64>()), Err(LieError::ZeroInput));
    }

    #[test]
    fn cartan_projection_examples() {
        let d = cartan_element(1.0, 1.0);
        let c = cartan_projection(&d, 1e-9).unwrap();
        assert!((c.r - 1.0).abs() < 1e-12 && (c.s - 1.0).abs() < 1e-12);
        let z = cartan_projection(&linalg::zero_mat::<f64>(), 1e-9).unwrap();
        assert_eq!((z.r, z.s), (0.0, 0.0));
        let p = higgs_psi(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let c = cartan_projection(&p, 1e-9).unwrap();
        assert!(c.alpha().abs() < 1e-9, "{:?}", c);
        // a non-g2 diagonal is rejected
        let mut bad = linalg::zero_mat::<f64>();
        bad[0][0] = 1.0;
        bad[6][6] = -1.0;
        bad[1][1] = 0.5;
        bad[5][5] = -0.5;
        assert!(cartan_projection(&bad, 1e-9).is_err());
    }

    #[test]
    fn sl2_classes_match_expected_splittings() {
        for class in Sl2Class::ALL {
            let sig = sl2_signature(class);
            assert!(sig.nilpotent);
            assert_eq!(sig.blocks, class.expected_blocks(), "{:?}", class);
            assert_eq!(sig.fixed_line, class.expected_fixed_line(), "{:?}", class);
            assert!(is_derivation_exact(&sl2_nilpotent(class).matrix, C).unwrap());
        }
    }

    #[test]
    fn random_group_elements_preserve_cross() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = cross_table::<ExactScalar>(BasisTag::MImag).unwrap();
        for _ in 0..3 {
            let g = random_exact_group_element(&mut rng, BasisTag::MImag, 3);
            for a in 0..7 {
                for b in 0..7 {
                    let lhs = linalg::mat_vec(&g, &t[a][b]);
                    let rhs = cross_with(&t, &linalg::column(&g, a), &linalg::column(&g, b));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    fn arb_psi() -> impl Strategy<Value = (f64, f64, f64, f64)> {
        (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn prop_regularity_homogeneous((ar, ai, br, bi) in arb_psi(), lam in 0.2f64..5.0) {
            let a = Complex64::new(ar, ai);
            let b = Complex64::new(br, bi);
            prop_assume!(a.norm() + b.norm() > 0.1);
            let m = higgs_psi(a, b);
            let ms = linalg::mat_scale(&Complex64::new(lam, 0.0), &m);
            let i1 = regularity_invariant(&m).unwrap();
            let i2 = regularity_invariant(&ms).unwrap();
            prop_assert!((i1 - i2).norm() < 1e-9);
        }

        #[test]
        fn prop_regularity_closed_form((ar, ai, br, bi) in arb_psi()) {
            let a = Complex64::new(ar, ai);
            let b = Complex64::new(br, bi);
            prop_assume!(a.norm() + b.norm() > 0.1);
            let i = regularity_invariant(&higgs_psi(a, b)).unwrap();
            let (a2, b2) = (a.norm_sqr(), b.norm_sqr());
            let closed = 27.0 * (a2 * b2 * b2 + b2 * b2 * b2) / (a2 + 3.0 * b2).powi(3);
            prop_assert!((i.re - closed).abs() < 1e-9 && i.im.abs() < 1e-9);
            prop_assert!(i.re > -1e-12 && i.re < 1.0 + 1e-12);
        }

        #[test]
        fn prop_cartan_projection_of_diagonal(r in 0.0f64..3.0, s in 0.0f64..3.0) {
            let (r, s) = if r >= s { (r, s) } else { (s, r) };
            let c = cartan_projection(&cartan_element(r, s), 1e-9).unwrap();
            prop_assert!((c.r - r).abs() < 1e-6 && (c.s - s).abs() < 1e-6);
        }

        #[test]
        fn prop_commutator_closure(i in 0usize..4, j in 0usize..4, t in -3i64..3) {
            let gens = [model_c::e_minus_alpha(), model_c::e_minus_beta(), model_c::e_alpha(), model_c::e_beta()];
            let a = linalg::mat_add(&gens[i], &linalg::mat_scale(&ExactScalar::from_ratio(t, 2), &gens[(i + 1) % 4]));
            let c = linalg::commutator(&a, &gens[j]);
            prop_assert!(is_derivation_exact(&c, C).unwrap());
        }
    }
}
