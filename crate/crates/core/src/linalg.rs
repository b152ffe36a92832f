//! Small dense linear algebra over a generic [`Scalar`]: 7x7 matrices and
//! Gaussian elimination that is exact for `ExactScalar` and pivoted by
//! magnitude for floats.

use crate::scalar::Scalar;

pub type Vec7<S> = [S; 7];
pub type Mat7<S> = [[S; 7]; 7];

/// Zero test: exact for exact scalars, `|x| <= tol` otherwise.
pub fn negligible<S: Scalar>(x: &S, tol: f64) -> bool {
    if S::is_exact() {
        x.is_zero()
    } else {
        x.magnitude() <= tol
    }
}

pub fn zero_vec<S: Scalar>() -> Vec7<S> {
    std::array::from_fn(|_| S::zero())
}

pub fn zero_mat<S: Scalar>() -> Mat7<S> {
    std::array::from_fn(|_| zero_vec())
}

pub fn identity<S: Scalar>() -> Mat7<S> {
    std::array::from_fn(|r| std::array::from_fn(|c| if r == c { S::one() } else { S::zero() }))
}

pub fn mat_mul<S: Scalar>(a: &Mat7<S>, b: &Mat7<S>) -> Mat7<S> {
    let mut out = zero_mat::<S>();
    for r in 0..7 {
        for k in 0..7 {
            if a[r][k].is_zero() {
                continue;
            }
            for c in 0..7 {
                if b[k][c].is_zero() {
                    continue;
                }
                out[r][c] = out[r][c].clone() + a[r][k].clone() * b[k][c].clone();
            }
        }
    }
    out
}

pub fn mat_vec<S: Scalar>(a: &Mat7<S>, v: &Vec7<S>) -> Vec7<S> {
    std::array::from_fn(|r| {
        let mut acc = S::zero();
        for c in 0..7 {
            if !a[r][c].is_zero() && !v[c].is_zero() {
                acc = acc + a[r][c].clone() * v[c].clone();
            }
        }
        acc
    })
}

pub fn mat_add<S: Scalar>(a: &Mat7<S>, b: &Mat7<S>) -> Mat7<S> {
    std::array::from_fn(|r| std::array::from_fn(|c| a[r][c].clone() + b[r][c].clone()))
}

pub fn mat_sub<S: Scalar>(a: &Mat7<S>, b: &Mat7<S>) -> Mat7<S> {
    std::array::from_fn(|r| std::array::from_fn(|c| a[r][c].clone() - b[r][c].clone()))
}

pub fn mat_scale<S: Scalar>(s: &S, a: &Mat7<S>) -> Mat7<S> {
    std::array::from_fn(|r| std::array::from_fn(|c| s.clone() * a[r][c].clone()))
}

pub fn transpose<S: Scalar>(a: &Mat7<S>) -> Mat7<S> {
    std::array::from_fn(|r| std::array::from_fn(|c| a[c][r].clone()))
}

pub fn conj_transpose<S: Scalar>(a: &Mat7<S>) -> Mat7<S> {
    std::array::from_fn(|r| std::array::from_fn(|c| a[c][r].conj()))
}

pub fn commutator<S: Scalar>(a: &Mat7<S>, b: &Mat7<S>) -> Mat7<S> {
    mat_sub(&mat_mul(a, b), &mat_mul(b, a))
}

pub fn trace<S: Scalar>(a: &Mat7<S>) -> S {
    (0..7).fold(S::zero(), |acc, i| acc + a[i][i].clone())
}

/// Columns given as vectors; returns the matrix whose c-th column is `cols[c]`.
pub fn from_columns<S: Scalar>(cols: &[Vec7<S>; 7]) -> Mat7<S> {
    std::array::from_fn(|r| std::array::from_fn(|c| cols[c][r].clone()))
}

pub fn column<S: Scalar>(a: &Mat7<S>, c: usize) -> Vec7<S> {
    std::array::from_fn(|r| a[r][c].clone())
}

pub fn max_abs<S: Scalar>(a: &Mat7<S>) -> f64 {
    a.iter().flatten().map(|x| x.magnitude()).fold(0.0, f64::max)
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<S: Scalar>(m: &mut [Vec<S>], tol: f64) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for i in r..rows {
            if negligible(&m[i][c], tol) {
                continue;
            }
            let mag = m[i][c].magnitude();
            if best.map_or(true, |(_, b)| mag > b) {
                best = Some((i, mag));
            }
        }
        let Some((p, _)) = best else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("pivot is nonzero");
        for j in 0..cols {
            m[r][j] = inv.clone() * m[r][j].clone();
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..cols {
                if !m[r][j].is_zero() {
                    m[i][j] = m[i][j].clone() - f.clone() * m[r][j].clone();
                }
            }
            if !S::is_exact() {
                m[i][c] = S::zero();
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(rows: &[Vec<S>], tol: f64) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, tol).len()
}

/// Basis of the nullspace of the matrix with the given rows.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize, tol: f64) -> Vec<Vec<S>> {
    let mut m = rows.to_vec();
    let piv = rref(&mut m, tol);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); ncols];
            v[f] = S::one();
            for (r, &p) in piv.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Solve `A X = B` for square `A`; `None` if singular.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>], tol: f64) -> Option<Vec<Vec<S>>> {
    let n = a.len();
    let k = b.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<S>> = (0..n)
        .map(|i| a[i].iter().cloned().chain(b[i].iter().cloned()).collect())
        .collect();
    let piv = rref(&mut aug, tol);
    if piv.len() < n || piv.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some((0..n).map(|i| aug[i][n..n + k].to_vec()).collect())
}

pub fn inverse<S: Scalar>(a: &Mat7<S>, tol: f64) -> Option<Mat7<S>> {
    let rows: Vec<Vec<S>> = a.iter().map(|r| r.to_vec()).collect();
    let id: Vec<Vec<S>> = identity::<S>().iter().map(|r| r.to_vec()).collect();
    let x = solve(&rows, &id, tol)?;
    Some(std::array::from_fn(|r| std::array::from_fn(|c| x[r][c].clone())))
}

/// Coordinates of `v` in the basis given by the columns of `basis`.
pub fn coordinates<S: Scalar>(basis: &Mat7<S>, v: &Vec7<S>, tol: f64) -> Option<Vec7<S>> {
    let rows: Vec<Vec<S>> = basis.iter().map(|r| r.to_vec()).collect();
    let rhs: Vec<Vec<S>> = v.iter().map(|x| vec![x.clone()]).collect();
    let x = solve(&rows, &rhs, tol)?;
    Some(std::array::from_fn(|i| x[i][0].clone()))
}

/// Exponential of a nilpotent matrix, `sum N^k / k!`; exact when `N` is.
pub fn exp_nilpotent<S: Scalar>(n: &Mat7<S>) -> Mat7<S> {
    let mut out = identity::<S>();
    let mut term = identity::<S>();
    for k in 1..=7i64 {
        term = mat_mul(&term, n);
        if term.iter().flatten().all(|x| x.is_zero()) {
            break;
        }
        let f = S::from_i64(k).inv().expect("k > 0");
        term = mat_scale(&f, &term);
        out = mat_add(&out, &term);
    }
    out
}
