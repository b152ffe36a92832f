//! Cross-product bases `x_k x x_l = c_{k,l} x_{k+l}`, the two Stiefel models
//! (null triples and `(+,+,-)` triples) and the group element carrying one
//! triple to another.

use thiserror::Error;

use crate::linalg::{self, Mat7};
use crate::octonion_core::{BasisTag, ImOct, OctError};
use crate::scalar::{ExactScalar, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CrossError {
    #[error(transparent)]
    Oct(#[from] OctError),
    #[error("triple invariant violated: {0}")]
    Invariant(&'static str),
    #[error("cannot transport between a null triple and a (+,+,-) triple")]
    KindMismatch,
    #[error("frame is not a basis")]
    Singular,
}

/// `constants[pos(k)][pos(l)] = c_{k,l}`, zero whenever `|k + l| > 3`.
pub type Constants<S> = [[S; 7]; 7];

#[derive(Debug, Clone, PartialEq)]
pub struct CrossBasis<S> {
    /// `x3, ..., x-3`.
    pub vectors: [ImOct<S>; 7],
    pub constants: Constants<S>,
}

pub fn pos(k: i32) -> usize {
    (3 - k) as usize
}

impl<S: Scalar> CrossBasis<S> {
    pub fn constant(&self, k: i32, l: i32) -> S {
        self.constants[pos(k)][pos(l)].clone()
    }

    pub fn vector(&self, k: i32) -> &ImOct<S> {
        &self.vectors[pos(k)]
    }

    pub fn gram(&self) -> Result<Mat7<S>, OctError> {
        let mut g = linalg::zero_mat::<S>();
        for a in 0..7 {
            for b in 0..7 {
                g[a][b] = self.vectors[a].qform(&self.vectors[b])?;
            }
        }
        Ok(g)
    }
}

/// Why a 7-tuple fails to be a cross-product basis.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub enum CrossFailure {
    /// `x_k x x_l` is not a multiple of `x_{k+l}` (or nonzero when `|k+l| > 3`).
    NotProportional { k: i32, l: i32 },
    /// `q(x_k, x_l) != 0` with `k != -l`.
    NotAntiDiagonal { k: i32, l: i32 },
    LinearlyDependent,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CrossCheck<S> {
    Valid(CrossBasis<S>),
    Invalid(CrossFailure),
}

impl<S> CrossCheck<S> {
    pub fn is_valid(&self) -> bool {
        matches!(self, CrossCheck::Valid(_))
    }

    pub fn valid(self) -> Option<CrossBasis<S>> {
        match self {
            CrossCheck::Valid(b) => Some(b),
            CrossCheck::Invalid(_) => None,
        }
    }
}

/// Coefficient `c` with `p = c x`, if any.
fn proportionality<S: Scalar>(p: &ImOct<S>, x: &ImOct<S>, tol: f64) -> Option<S> {
    let (i, _) = x
        .coords
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.magnitude()))
        .fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
    let c = p.coords[i].clone() * x.coords[i].inv()?;
    let ok = (0..7).all(|a| linalg::negligible(&(p.coords[a].clone() - c.clone() * x.coords[a].clone()), tol));
    ok.then_some(c)
}

/// Check the defining relations and return the full constants table, or the
/// first violated relation.
pub fn verify_cross_basis<S: Scalar>(b: &[ImOct<S>; 7], tol: f64) -> CrossCheck<S> {
    let rows: Vec<Vec<S>> = b.iter().map(|v| v.coords.to_vec()).collect();
    if b.iter().any(|v| v.basis != b[0].basis) {
        return CrossCheck::Invalid(CrossFailure::Unsupported);
    }
    if linalg::rank(&rows, tol) < 7 {
        return CrossCheck::Invalid(CrossFailure::LinearlyDependent);
    }
    let mut constants: Constants<S> = std::array::from_fn(|_| linalg::zero_vec());
    for k in (-3..=3).rev() {
        for l in (-3..=3).rev() {
            let Ok(p) = b[pos(k)].cross(&b[pos(l)]) else {
                return CrossCheck::Invalid(CrossFailure::Unsupported);
            };
            if (k + l).abs() > 3 {
                if !p.coords.iter().all(|c| linalg::negligible(c, tol)) {
                    return CrossCheck::Invalid(CrossFailure::NotProportional { k, l });
                }
                continue;
            }
            match proportionality(&p, &b[pos(k + l)], tol) {
                Some(c) => constants[pos(k)][pos(l)] = c,
                None => return CrossCheck::Invalid(CrossFailure::NotProportional { k, l }),
            }
        }
    }
    for k in (-3..=3).rev() {
        for l in (-3..=3).rev() {
            if k == -l {
                continue;
            }
            match b[pos(k)].qform(&b[pos(l)]) {
                Ok(g) if linalg::negligible(&g, tol) => {}
                Ok(_) => return CrossCheck::Invalid(CrossFailure::NotAntiDiagonal { k, l }),
                Err(_) => return CrossCheck::Invalid(CrossFailure::Unsupported),
            }
        }
    }
    CrossCheck::Valid(CrossBasis { vectors: b.clone(), constants })
}

fn model_basis(tag: BasisTag) -> CrossBasis<ExactScalar> {
    let v: [ImOct<ExactScalar>; 7] = std::array::from_fn(|k| ImOct::basis_vector(k, tag));
    verify_cross_basis(&v, 0.0).valid().expect("model basis satisfies the cross relations")
}

/// `(e3, ..., e-3)`, expressed in its own coordinates.
pub fn model_c_basis() -> CrossBasis<ExactScalar> {
    model_basis(BasisTag::ModelC)
}

/// `(x3, ..., x-3)`, expressed in its own coordinates.
pub fn model_r_basis() -> CrossBasis<ExactScalar> {
    model_basis(BasisTag::ModelR)
}

/// Re-express a basis vector-by-vector in the multiplication basis.
pub fn to_m_basis<S: Scalar>(b: &CrossBasis<S>) -> Result<CrossBasis<S>, OctError> {
    let vectors = b.vectors.iter().map(|v| v.to_m()).collect::<Result<Vec<_>, _>>()?;
    Ok(CrossBasis { vectors: vectors.try_into().unwrap(), constants: b.constants.clone() })
}

// ---------------------------------------------------------------------------
// Stiefel models.

/// Pairwise orthogonal null vectors with `Ω(u, v, w) = √2`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullTriple<S> {
    pub u: ImOct<S>,
    pub v: ImOct<S>,
    pub w: ImOct<S>,
}

/// `q(u) = q(v) = 1`, `q(w) = -1`, pairwise orthogonal, `Ω(u, v, w) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PqrTriple<S> {
    pub u: ImOct<S>,
    pub v: ImOct<S>,
    pub w: ImOct<S>,
}

fn same_basis<S>(u: &ImOct<S>, v: &ImOct<S>, w: &ImOct<S>) -> Result<(), CrossError> {
    if u.basis != v.basis {
        return Err(OctError::BasisMismatch(u.basis, v.basis).into());
    }
    if u.basis != w.basis {
        return Err(OctError::BasisMismatch(u.basis, w.basis).into());
    }
    Ok(())
}

fn require<S: Scalar>(x: S, target: S, tol: f64, what: &'static str) -> Result<(), CrossError> {
    if linalg::negligible(&(x - target), tol) {
        Ok(())
    } else {
        Err(CrossError::Invariant(what))
    }
}

impl<S: Scalar> NullTriple<S> {
    pub fn new(u: ImOct<S>, v: ImOct<S>, w: ImOct<S>, tol: f64) -> Result<Self, CrossError> {
        same_basis(&u, &v, &w)?;
        require(u.q()?, S::zero(), tol, "q(u) = 0")?;
        require(v.q()?, S::zero(), tol, "q(v) = 0")?;
        require(w.q()?, S::zero(), tol, "q(w) = 0")?;
        require(u.qform(&v)?, S::zero(), tol, "q(u, v) = 0")?;
        require(u.qform(&w)?, S::zero(), tol, "q(u, w) = 0")?;
        require(v.qform(&w)?, S::zero(), tol, "q(v, w) = 0")?;
        require(u.cross(&v)?.qform(&w)?, S::sqrt2(), tol, "Ω(u, v, w) = √2")?;
        Ok(NullTriple { u, v, w })
    }

    pub fn basis(&self) -> BasisTag {
        self.u.basis
    }

    /// `(u x v, u, v, (u x v) x w, u x w, v x w, w)`.
    pub fn frame(&self) -> Result<[ImOct<S>; 7], OctError> {
        let (u, v, w) = (&self.u, &self.v, &self.w);
        let uv = u.cross(v)?;
        Ok([uv.clone(), u.clone(), v.clone(), uv.cross(w)?, u.cross(w)?, v.cross(w)?, w.clone()])
    }

    pub fn apply(&self, g: &Mat7<S>) -> NullTriple<S> {
        let m = |x: &ImOct<S>| ImOct::new(linalg::mat_vec(g, &x.coords), x.basis);
        NullTriple { u: m(&self.u), v: m(&self.v), w: m(&self.w) }
    }
}

impl<S: Scalar> PqrTriple<S> {
    pub fn new(u: ImOct<S>, v: ImOct<S>, w: ImOct<S>, tol: f64) -> Result<Self, CrossError> {
        same_basis(&u, &v, &w)?;
        require(u.q()?, S::one(), tol, "q(u) = 1")?;
        require(v.q()?, S::one(), tol, "q(v) = 1")?;
        require(w.q()?, -S::one(), tol, "q(w) = -1")?;
        require(u.qform(&v)?, S::zero(), tol, "q(u, v) = 0")?;
        require(u.qform(&w)?, S::zero(), tol, "q(u, w) = 0")?;
        require(v.qform(&w)?, S::zero(), tol, "q(v, w) = 0")?;
        require(u.cross(&v)?.qform(&w)?, S::zero(), tol, "Ω(u, v, w) = 0")?;
        Ok(PqrTriple { u, v, w })
    }

    pub fn basis(&self) -> BasisTag {
        self.u.basis
    }

    /// `(u, v, u x v, w, w x u, w x v, w x (u x v))`.
    pub fn frame(&self) -> Result<[ImOct<S>; 7], OctError> {
        let (u, v, w) = (&self.u, &self.v, &self.w);
        let uv = u.cross(v)?;
        Ok([u.clone(), v.clone(), uv.clone(), w.clone(), w.cross(u)?, w.cross(v)?, w.cross(&uv)?])
    }

    pub fn apply(&self, g: &Mat7<S>) -> PqrTriple<S> {
        let m = |x: &ImOct<S>| ImOct::new(linalg::mat_vec(g, &x.coords), x.basis);
        PqrTriple { u: m(&self.u), v: m(&self.v), w: m(&self.w) }
    }
}

/// The extended basis of a null triple; it is always a cross-product basis.
pub fn basis_from_null_triple<S: Scalar>(n: &NullTriple<S>, tol: f64) -> Result<CrossBasis<S>, CrossError> {
    match verify_cross_basis(&n.frame()?, tol) {
        CrossCheck::Valid(b) => Ok(b),
        CrossCheck::Invalid(_) => Err(CrossError::Invariant("extended frame is not a cross-product basis")),
    }
}

/// The orthonormal frame of a `(+,+,-)` triple.
pub fn basis_from_pqr_triple<S: Scalar>(p: &PqrTriple<S>) -> Result<[ImOct<S>; 7], CrossError> {
    Ok(p.frame()?)
}

/// `(e2, e1, -e-3)`: with the Gram `q(e3, e-3) = -1`, this sign of the last
/// vector gives `Ω = √2`.
pub fn model_null_triple() -> NullTriple<ExactScalar> {
    let e = |k: i32| ImOct::basis_vector(pos(k), BasisTag::ModelC);
    NullTriple::new(e(2), e(1), e(-3).scale(&-ExactScalar::one()), 0.0).expect("model null triple")
}

/// `(i, j, l)`, whose frame is the multiplication basis.
pub fn model_pqr_triple() -> PqrTriple<ExactScalar> {
    let e = |a: usize| ImOct::basis_vector(a, BasisTag::MImag);
    PqrTriple::new(e(0), e(1), e(3), 0.0).expect("model (+,+,-) triple")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Triple<S> {
    Null(NullTriple<S>),
    Pqr(PqrTriple<S>),
}

impl<S: Scalar> Triple<S> {
    pub fn frame(&self) -> Result<[ImOct<S>; 7], OctError> {
        match self {
            Triple::Null(n) => n.frame(),
            Triple::Pqr(p) => p.frame(),
        }
    }
}

/// The unique linear map sending the frame of `src` to that of `dst`.
pub fn transporter<S: Scalar>(src: &Triple<S>, dst: &Triple<S>, tol: f64) -> Result<Mat7<S>, CrossError> {
    match (src, dst) {
        (Triple::Null(a), Triple::Null(b)) if a.basis() == b.basis() => {}
        (Triple::Pqr(a), Triple::Pqr(b)) if a.basis() == b.basis() => {}
        (Triple::Null(_), Triple::Null(_)) | (Triple::Pqr(_), Triple::Pqr(_)) => {
            return Err(CrossError::Invariant("triples live in different bases"))
        }
        _ => return Err(CrossError::KindMismatch),
    }
    let fs = src.frame()?;
    let fd = dst.frame()?;
    let s = linalg::from_columns(&std::array::from_fn(|i| fs[i].coords.clone()));
    let d = linalg::from_columns(&std::array::from_fn(|i| fd[i].coords.clone()));
    let sinv = linalg::inverse(&s, tol).ok_or(CrossError::Singular)?;
    Ok(linalg::mat_mul(&d, &sinv))
}

/// Random exact null triple: the image of the model triple under a random
/// product of root-group elements.
pub fn random_exact_null_triple<R: rand::Rng + ?Sized>(rng: &mut R, factors: usize) -> NullTriple<ExactScalar> {
    let g = crate::g2_lie::random_exact_group_element(rng, BasisTag::ModelC, factors);
    model_null_triple().apply(&g)
}

/// Random exact `(+,+,-)` triple in the multiplication basis.
pub fn random_exact_pqr_triple<R: rand::Rng + ?Sized>(rng: &mut R, factors: usize) -> PqrTriple<ExactScalar> {
    let g = crate::g2_lie::random_exact_group_element(rng, BasisTag::MImag, factors);
    model_pqr_triple().apply(&g)
}
