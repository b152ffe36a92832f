//! Split octonions over a generic scalar: product, conjugation, the quadratic
//! form, and on the imaginary part the cross product, associator and the
//! 3-form `(u x v) . w`.
//!
//! Coordinates of `Oct` refer to the multiplication basis
//! `(1, i, j, k, l, li, lj, lk)`.  Products are read row times column:
//! `TABLE[a][b]` is the product of basis element `a` (left) with `b` (right).

use rand::Rng;
use thiserror::Error;

use crate::scalar::{rat, ExactScalar, Scalar};

pub const BASIS_NAMES: [&str; 8] = ["1", "i", "j", "k", "l", "li", "lj", "lk"];

/// `(sign, index)` of the product of basis elements, left factor first.
pub const TABLE: [[(i8, u8); 8]; 8] = [
    [(1, 0), (1, 1), (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7)],
    [(1, 1), (-1, 0), (1, 3), (-1, 2), (-1, 5), (1, 4), (-1, 7), (1, 6)],
    [(1, 2), (-1, 3), (-1, 0), (1, 1), (-1, 6), (1, 7), (1, 4), (-1, 5)],
    [(1, 3), (1, 2), (-1, 1), (-1, 0), (-1, 7), (-1, 6), (1, 5), (1, 4)],
    [(1, 4), (1, 5), (1, 6), (1, 7), (1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 5), (-1, 4), (-1, 7), (1, 6), (-1, 1), (1, 0), (1, 3), (-1, 2)],
    [(1, 6), (1, 7), (-1, 4), (-1, 5), (-1, 2), (-1, 3), (1, 0), (1, 1)],
    [(1, 7), (-1, 6), (1, 5), (-1, 4), (-1, 3), (1, 2), (-1, 1), (1, 0)],
];

/// Diagonal of q in the multiplication basis.
pub const Q_DIAG: [i8; 8] = [1, 1, 1, 1, -1, -1, -1, -1];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OctError {
    #[error("basis mismatch: {0:?} vs {1:?}")]
    BasisMismatch(BasisTag, BasisTag),
    #[error("no cross product registered for basis {0:?}")]
    UnsupportedBasis(BasisTag),
    #[error("constant of basis {0:?} is not representable in this scalar type")]
    NotRepresentable(BasisTag),
}

/// Which basis the seven coordinates of an [`ImOct`] refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum BasisTag {
    /// `(i, j, k, l, li, lj, lk)`.
    MImag,
    /// The model complex cross-product basis `(e3, ..., e-3)`.
    ModelC,
    /// The model real cross-product basis `(x3, ..., x-3)`.
    ModelR,
    /// A caller-defined basis; only coordinate-wise operations are allowed.
    User(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Oct<S> {
    pub coords: [S; 8],
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImOct<S> {
    pub coords: [S; 7],
    pub basis: BasisTag,
}

fn zeros<S: Scalar, const N: usize>() -> [S; N] {
    std::array::from_fn(|_| S::zero())
}

fn signed<S: Scalar>(s: i8, x: S) -> S {
    if s > 0 {
        x
    } else {
        -x
    }
}

/// Bilinear product on raw coordinates in the multiplication basis.
pub fn mul_coords<S: Scalar>(x: &[S; 8], y: &[S; 8]) -> [S; 8] {
    let mut r: [S; 8] = zeros();
    for a in 0..8 {
        if x[a].is_zero() {
            continue;
        }
        for b in 0..8 {
            if y[b].is_zero() {
                continue;
            }
            let (s, c) = TABLE[a][b];
            let t = x[a].clone() * y[b].clone();
            let c = c as usize;
            r[c] = r[c].clone() + signed(s, t);
        }
    }
    r
}

/// Cross product `Im(uv)` of imaginary octonions in `(i, ..., lk)` coordinates.
pub fn cross_m<S: Scalar>(u: &[S; 7], v: &[S; 7]) -> [S; 7] {
    let mut r: [S; 7] = zeros();
    for a in 0..7 {
        if u[a].is_zero() {
            continue;
        }
        for b in 0..7 {
            if a == b || v[b].is_zero() {
                continue;
            }
            let (s, c) = TABLE[a + 1][b + 1];
            let t = u[a].clone() * v[b].clone();
            let c = c as usize - 1;
            r[c] = r[c].clone() + signed(s, t);
        }
    }
    r
}

/// Polar form of q on `(i, ..., lk)` coordinates.
pub fn qform_m<S: Scalar>(u: &[S; 7], v: &[S; 7]) -> S {
    let mut acc = S::zero();
    for a in 0..7 {
        let t = u[a].clone() * v[a].clone();
        acc = acc + signed(Q_DIAG[a + 1], t);
    }
    acc
}

impl<S: Scalar> Oct<S> {
    pub fn new(coords: [S; 8]) -> Self {
        Oct { coords }
    }

    pub fn zero() -> Self {
        Oct { coords: zeros() }
    }

    /// The basis element with the given index in `(1, i, j, k, l, li, lj, lk)`.
    pub fn unit(index: usize) -> Self {
        let mut c: [S; 8] = zeros();
        c[index] = S::one();
        Oct { coords: c }
    }

    pub fn scalar(s: S) -> Self {
        let mut c: [S; 8] = zeros();
        c[0] = s;
        Oct { coords: c }
    }

    pub fn from_im(u: &ImOct<S>) -> Result<Self, OctError> {
        let m = u.to_m()?;
        let mut c: [S; 8] = zeros();
        c[1..].clone_from_slice(&m.coords);
        Ok(Oct { coords: c })
    }

    pub fn re(&self) -> S {
        self.coords[0].clone()
    }

    pub fn im(&self) -> ImOct<S> {
        ImOct::m(std::array::from_fn(|a| self.coords[a + 1].clone()))
    }

    pub fn mul(&self, y: &Oct<S>) -> Oct<S> {
        Oct { coords: mul_coords(&self.coords, &y.coords) }
    }

    pub fn add(&self, y: &Oct<S>) -> Oct<S> {
        Oct { coords: std::array::from_fn(|a| self.coords[a].clone() + y.coords[a].clone()) }
    }

    pub fn sub(&self, y: &Oct<S>) -> Oct<S> {
        Oct { coords: std::array::from_fn(|a| self.coords[a].clone() - y.coords[a].clone()) }
    }

    pub fn scale(&self, s: &S) -> Oct<S> {
        Oct { coords: std::array::from_fn(|a| s.clone() * self.coords[a].clone()) }
    }

    /// Octonion conjugation: negates the imaginary coordinates.
    pub fn conj(&self) -> Oct<S> {
        Oct {
            coords: std::array::from_fn(|a| {
                if a == 0 {
                    self.coords[0].clone()
                } else {
                    -self.coords[a].clone()
                }
            }),
        }
    }

    /// `q(x) = x conj(x)`, read off as the real coordinate.
    pub fn q(&self) -> S {
        self.qform(self)
    }

    /// Polar form `q(x, y) = Re(x conj(y))`.
    pub fn qform(&self, y: &Oct<S>) -> S {
        let mut acc = S::zero();
        for a in 0..8 {
            acc = acc + signed(Q_DIAG[a], self.coords[a].clone() * y.coords[a].clone());
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

/// `x(yz) - (xy)z`.
pub fn associator<S: Scalar>(x: &Oct<S>, y: &Oct<S>, z: &Oct<S>) -> Oct<S> {
    x.mul(&y.mul(z)).sub(&x.mul(y).mul(z))
}

// ---------------------------------------------------------------------------
// Model bases, as exact coordinates in (i, ..., lk).

fn ex(n: i64, d: i64) -> ExactScalar {
    ExactScalar::from_ratio(n, d)
}

/// Exact `(i, ..., lk)` coordinates of `e3, e2, e1, e0, e-1, e-2, e-3`.
///
/// `e±3 = (jl ± i kl)/√2`, `e±2 = (j ± i k)/√2`, `e±1 = (l ± i il)/√2`, `e0 = i`.
pub fn model_c_vectors() -> [[ExactScalar; 7]; 7] {
    let h = ExactScalar::sqrt2() * ex(1, 2); // 1/√2
    let ih = ExactScalar::i() * h.clone();
    let z = || ex(0, 1);
    // jl = -lj, kl = -lk, il = -li
    let e = |sgn: i64| -> [[ExactScalar; 7]; 3] {
        let s = ex(sgn, 1);
        let mut e3: [ExactScalar; 7] = std::array::from_fn(|_| z());
        e3[5] = -h.clone();
        e3[6] = -(s.clone() * ih.clone());
        let mut e2: [ExactScalar; 7] = std::array::from_fn(|_| z());
        e2[1] = h.clone();
        e2[2] = s.clone() * ih.clone();
        let mut e1: [ExactScalar; 7] = std::array::from_fn(|_| z());
        e1[3] = h.clone();
        e1[4] = -(s * ih.clone());
        [e3, e2, e1]
    };
    let [p3, p2, p1] = e(1);
    let [m3, m2, m1] = e(-1);
    let mut e0: [ExactScalar; 7] = std::array::from_fn(|_| z());
    e0[0] = ex(1, 1);
    [p3, p2, p1, e0, m1, m2, m3]
}

/// Exact `(i, ..., lk)` coordinates of `x3, ..., x-3`:
/// `((i+li)/√2, (j-lj)/√2, (k-lk)/√2, l, (k+lk)/√2, (j+lj)/√2, (i-li)/√2)`.
pub fn model_r_vectors() -> [[ExactScalar; 7]; 7] {
    let h = ExactScalar::sqrt2() * ex(1, 2);
    let v = |a: usize, b: usize, sb: i64| -> [ExactScalar; 7] {
        let mut r: [ExactScalar; 7] = std::array::from_fn(|_| ex(0, 1));
        r[a] = h.clone();
        r[b] = h.clone() * ex(sb, 1);
        r
    };
    let mut x0: [ExactScalar; 7] = std::array::from_fn(|_| ex(0, 1));
    x0[3] = ex(1, 1);
    [v(0, 4, 1), v(1, 5, -1), v(2, 6, -1), x0, v(2, 6, 1), v(1, 5, 1), v(0, 4, -1)]
}

/// Anti-diagonal Gram entries `q(b_k, b_-k)` for k = 3..-3.
pub fn model_gram_antidiag(tag: BasisTag) -> Option<[i8; 7]> {
    match tag {
        BasisTag::ModelC => Some([-1, 1, -1, 1, -1, 1, -1]),
        BasisTag::ModelR => Some([1, 1, 1, -1, 1, 1, 1]),
        _ => None,
    }
}

fn model_vectors<S: Scalar>(tag: BasisTag) -> Result<[[S; 7]; 7], OctError> {
    let ex = match tag {
        BasisTag::ModelC => model_c_vectors(),
        BasisTag::ModelR => model_r_vectors(),
        BasisTag::MImag => {
            return Ok(std::array::from_fn(|a| std::array::from_fn(|b| if a == b { S::one() } else { S::zero() })))
        }
        t => return Err(OctError::UnsupportedBasis(t)),
    };
    let mut out: [[S; 7]; 7] = std::array::from_fn(|_| zeros());
    for a in 0..7 {
        for b in 0..7 {
            out[a][b] = S::from_exact(&ex[a][b]).ok_or(OctError::NotRepresentable(tag))?;
        }
    }
    Ok(out)
}

impl<S: Scalar> ImOct<S> {
    pub fn new(coords: [S; 7], basis: BasisTag) -> Self {
        ImOct { coords, basis }
    }

    pub fn m(coords: [S; 7]) -> Self {
        ImOct { coords, basis: BasisTag::MImag }
    }

    pub fn zero(basis: BasisTag) -> Self {
        ImOct { coords: zeros(), basis }
    }

    /// The k-th basis vector (position 0..7 in the declared ordering).
    pub fn basis_vector(pos: usize, basis: BasisTag) -> Self {
        let mut c: [S; 7] = zeros();
        c[pos] = S::one();
        ImOct { coords: c, basis }
    }

    fn check(&self, other: &ImOct<S>) -> Result<(), OctError> {
        if self.basis == other.basis {
            Ok(())
        } else {
            Err(OctError::BasisMismatch(self.basis, other.basis))
        }
    }

    pub fn add(&self, o: &ImOct<S>) -> Result<ImOct<S>, OctError> {
        self.check(o)?;
        Ok(ImOct::new(std::array::from_fn(|a| self.coords[a].clone() + o.coords[a].clone()), self.basis))
    }

    pub fn sub(&self, o: &ImOct<S>) -> Result<ImOct<S>, OctError> {
        self.check(o)?;
        Ok(ImOct::new(std::array::from_fn(|a| self.coords[a].clone() - o.coords[a].clone()), self.basis))
    }

    pub fn scale(&self, s: &S) -> ImOct<S> {
        ImOct::new(std::array::from_fn(|a| s.clone() * self.coords[a].clone()), self.basis)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Re-express in the multiplication basis.
    pub fn to_m(&self) -> Result<ImOct<S>, OctError> {
        if self.basis == BasisTag::MImag {
            return Ok(self.clone());
        }
        let vs = model_vectors::<S>(self.basis)?;
        let mut r: [S; 7] = zeros();
        for (k, v) in vs.iter().enumerate() {
            if self.coords[k].is_zero() {
                continue;
            }
            for a in 0..7 {
                r[a] = r[a].clone() + self.coords[k].clone() * v[a].clone();
            }
        }
        Ok(ImOct::m(r))
    }

    /// Express an `MImag` vector in a model basis, using the anti-diagonal Gram
    /// matrix: the coordinate on `b_k` is `q(x, b_-k) / q(b_k, b_-k)`.
    pub fn from_m(x: &ImOct<S>, target: BasisTag) -> Result<ImOct<S>, OctError> {
        if x.basis != BasisTag::MImag {
            return Err(OctError::BasisMismatch(x.basis, BasisTag::MImag));
        }
        if target == BasisTag::MImag {
            return Ok(x.clone());
        }
        let vs = model_vectors::<S>(target)?;
        let g = model_gram_antidiag(target).ok_or(OctError::UnsupportedBasis(target))?;
        let c = std::array::from_fn(|k| signed(g[k], qform_m(&x.coords, &vs[6 - k])));
        Ok(ImOct::new(c, target))
    }

    /// Symmetric bilinear form q.
    pub fn qform(&self, o: &ImOct<S>) -> Result<S, OctError> {
        self.check(o)?;
        match self.basis {
            BasisTag::MImag => Ok(qform_m(&self.coords, &o.coords)),
            t @ (BasisTag::ModelC | BasisTag::ModelR) => {
                let g = model_gram_antidiag(t).unwrap();
                let mut acc = S::zero();
                for k in 0..7 {
                    acc = acc + signed(g[k], self.coords[k].clone() * o.coords[6 - k].clone());
                }
                Ok(acc)
            }
            t => Err(OctError::UnsupportedBasis(t)),
        }
    }

    pub fn q(&self) -> Result<S, OctError> {
        self.qform(self)
    }

    /// `u x v = Im(uv)`, computed in the multiplication basis and re-expressed
    /// in the common basis of the operands.
    pub fn cross(&self, o: &ImOct<S>) -> Result<ImOct<S>, OctError> {
        self.check(o)?;
        if self.basis == BasisTag::MImag {
            return Ok(ImOct::m(cross_m(&self.coords, &o.coords)));
        }
        let r = ImOct::m(cross_m(&self.to_m()?.coords, &o.to_m()?.coords));
        ImOct::from_m(&r, self.basis)
    }
}

pub fn qform<S: Scalar>(u: &ImOct<S>, v: &ImOct<S>) -> Result<S, OctError> {
    u.qform(v)
}

pub fn cross<S: Scalar>(u: &ImOct<S>, v: &ImOct<S>) -> Result<ImOct<S>, OctError> {
    u.cross(v)
}

/// `Ω(u, v, w) = q(u x v, w)`.
pub fn triple_product<S: Scalar>(u: &ImOct<S>, v: &ImOct<S>, w: &ImOct<S>) -> Result<S, OctError> {
    u.cross(v)?.qform(w)
}

// ---------------------------------------------------------------------------
// Random exact samples for identity checks.

/// Random exact element of Q(√2) with small numerators and denominators.
pub fn random_exact_real<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> ExactScalar {
    let a = rng.gen_range(-bound..=bound);
    let b = rng.gen_range(-bound..=bound);
    let d = rng.gen_range(1..=3);
    ExactScalar::new(rat(a, d), rat(b, d), rat(0, 1), rat(0, 1))
}

/// Random exact element of Q(i, √2).
pub fn random_exact_complex<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> ExactScalar {
    let re = random_exact_real(rng, bound);
    let im = random_exact_real(rng, bound);
    re + ExactScalar::i() * im
}

pub fn random_exact_oct<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Oct<ExactScalar> {
    Oct::new(std::array::from_fn(|_| random_exact_real(rng, bound)))
}

pub fn random_exact_im<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> ImOct<ExactScalar> {
    ImOct::m(std::array::from_fn(|_| random_exact_real(rng, bound)))
}

// ---------------------------------------------------------------------------
// Independent product route and identity suite.

fn quat_mul<S: Scalar>(p: &[S], q: &[S]) -> [S; 4] {
    let m = |a: usize, b: usize| p[a].clone() * q[b].clone();
    [
        m(0, 0) - m(1, 1) - m(2, 2) - m(3, 3),
        m(0, 1) + m(1, 0) + m(2, 3) - m(3, 2),
        m(0, 2) - m(1, 3) + m(2, 0) + m(3, 1),
        m(0, 3) + m(1, 2) - m(2, 1) + m(3, 0),
    ]
}

fn quat_conj<S: Scalar>(p: &[S]) -> [S; 4] {
    [p[0].clone(), -p[1].clone(), -p[2].clone(), -p[3].clone()]
}

/// Product through the doubling of the quaternions: writing `x = a + l b`,
/// `(a + l b)(c + l d) = (ac + d b*) + l (a* d + c b)`.
pub fn doubling_product<S: Scalar>(x: &[S; 8], y: &[S; 8]) -> [S; 8] {
    let (a, b) = x.split_at(4);
    let (c, d) = y.split_at(4);
    let lo = quat_mul(a, c);
    let lo2 = quat_mul(d, &quat_conj(b));
    let hi = quat_mul(&quat_conj(a), d);
    let hi2 = quat_mul(c, b);
    std::array::from_fn(|k| {
        if k < 4 {
            lo[k].clone() + lo2[k].clone()
        } else {
            hi[k - 4].clone() + hi2[k - 4].clone()
        }
    })
}

/// Number of products of imaginary basis units (out of 49) on which the
/// table agrees with the doubling route.
pub fn table_agreement() -> usize {
    let unit = |a: usize| -> [ExactScalar; 8] { std::array::from_fn(|k| ex((k == a) as i64, 1)) };
    let mut n = 0;
    for a in 1..8 {
        for b in 1..8 {
            if mul_coords(&unit(a), &unit(b)) == doubling_product(&unit(a), &unit(b)) {
                n += 1;
            }
        }
    }
    n
}

/// Failure counts of the exact identity suite.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub composition: usize,
    pub alternative: usize,
    pub associator_alternating: usize,
    pub conjugation: usize,
    pub double_cross: usize,
    pub cross_alternating: usize,
    pub triple_alternating: usize,
    pub doubling: usize,
}

impl IdentityReport {
    pub fn failures(&self) -> usize {
        self.composition
            + self.alternative
            + self.associator_alternating
            + self.conjugation
            + self.double_cross
            + self.cross_alternating
            + self.triple_alternating
            + self.doubling
    }
}

/// Composition, alternativity, alternation of the associator, conjugation
/// reversal, the double cross product identity, alternation of the cross
/// product and of the 3-form, and the doubling route, each on `samples`
/// random exact inputs.
pub fn identity_suite<R: Rng + ?Sized>(rng: &mut R, samples: usize) -> IdentityReport {
    let mut r = IdentityReport { samples, ..Default::default() };
    let bump = |c: &mut usize, ok: bool| *c += (!ok) as usize;
    for _ in 0..samples {
        let x = random_exact_oct(rng, 3);
        let y = random_exact_oct(rng, 3);
        bump(&mut r.composition, x.mul(&y).q() == x.q() * y.q());
        bump(&mut r.alternative, x.mul(&x).mul(&y) == x.mul(&x.mul(&y)) && y.mul(&x).mul(&x) == y.mul(&x.mul(&x)));
        let z = random_exact_oct(rng, 3);
        let a = associator(&x, &y, &z);
        let neg = |o: Oct<ExactScalar>| o.scale(&ex(-1, 1));
        bump(
            &mut r.associator_alternating,
            associator(&y, &x, &z) == neg(a.clone()) && associator(&x, &z, &y) == neg(a),
        );
        bump(&mut r.conjugation, x.mul(&y).conj() == y.conj().mul(&x.conj()));
        bump(&mut r.doubling, x.mul(&y).coords == doubling_product(&x.coords, &y.coords));
        let u = random_exact_im(rng, 3);
        let v = random_exact_im(rng, 3);
        let w = random_exact_im(rng, 3);
        let lhs = u.cross(&u.cross(&v).unwrap()).unwrap();
        let rhs = v.scale(&(-u.q().unwrap())).add(&u.scale(&u.qform(&v).unwrap())).unwrap();
        bump(&mut r.double_cross, lhs == rhs);
        bump(&mut r.cross_alternating, u.cross(&u).unwrap().is_zero());
        let t = triple_product(&u, &v, &w).unwrap();
        bump(
            &mut r.triple_alternating,
            triple_product(&v, &u, &w).unwrap() == -t.clone() && triple_product(&v, &w, &u).unwrap() == t,
        );
    }
    r
}
