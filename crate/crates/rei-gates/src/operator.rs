//! Dense complex operators, kets and the matrix exponential.
//!
//! Everything is carried in angular-frequency units with ħ = 1.

use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Square dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: Array2<C64>,
}

impl Operator {
    pub fn new(m: Array2<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "operator must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self { m })
    }

    pub fn zeros(d: usize) -> Self {
        Self { m: Array2::zeros((d, d)) }
    }

    pub fn identity(d: usize) -> Self {
        Self { m: Array2::eye(d) }
    }

    /// |i⟩⟨j| in dimension d.
    pub fn ket_bra(d: usize, i: usize, j: usize) -> Self {
        let mut m = Array2::zeros((d, d));
        m[[i, j]] = ONE;
        Self { m }
    }

    pub fn diag(values: &[C64]) -> Self {
        let d = values.len();
        let mut m = Array2::zeros((d, d));
        for (i, v) in values.iter().enumerate() {
            m[[i, i]] = *v;
        }
        Self { m }
    }

    /// Builds from row-major real/complex entries.
    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let d = rows.len();
        let mut m = Array2::zeros((d, d));
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::Dimension("ragged rows".into()));
            }
            for (j, v) in r.iter().enumerate() {
                m[[i, j]] = *v;
            }
        }
        Ok(Self { m })
    }

    pub fn pauli_x() -> Self {
        Self::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]).unwrap()
    }

    pub fn pauli_y() -> Self {
        Self::from_rows(&[&[ZERO, -I], &[I, ZERO]]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::diag(&[ONE, -ONE])
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.m
    }

    pub fn into_array(self) -> Array2<C64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[[i, j]]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.m[[i, j]] = v;
    }

    pub fn dagger(&self) -> Self {
        Self { m: self.m.t().mapv(|z| z.conj()) }
    }

    pub fn conj(&self) -> Self {
        Self { m: self.m.mapv(|z| z.conj()) }
    }

    pub fn transpose(&self) -> Self {
        Self { m: self.m.t().to_owned() }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { m: &self.m * c }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        Self { m: self.m.mapv(|z| z * c) }
    }

    pub fn trace(&self) -> C64 {
        self.m.diag().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        self.m
            .axis_iter(Axis(1))
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { m: self.m.dot(&other.m) })
    }

    pub fn apply(&self, psi: &KetState) -> Result<KetState> {
        if psi.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "operator {} vs ket {}",
                self.dim(),
                psi.dim()
            )));
        }
        Ok(KetState { v: self.m.dot(&psi.v) })
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim(), other.dim());
        let mut m = Array2::zeros((a * b, a * b));
        for i in 0..a {
            for j in 0..a {
                let s = self.m[[i, j]];
                if s == ZERO {
                    continue;
                }
                let mut blk = m.slice_mut(ndarray::s![i * b..(i + 1) * b, j * b..(j + 1) * b]);
                blk.zip_mut_with(&other.m, |x, y| *x = s * *y);
            }
        }
        Self { m }
    }

    /// Left-to-right Kronecker product of all factors.
    pub fn kron_all(factors: &[&Operator]) -> Self {
        let mut it = factors.iter();
        let first = it.next().map(|f| (*f).clone()).unwrap_or_else(|| Self::identity(1));
        it.fold(first, |acc, f| acc.kron(f))
    }

    /// Places `op` on subsystem `site` of a tensor product with dimensions `dims`.
    pub fn embed(op: &Operator, dims: &[usize], site: usize) -> Result<Self> {
        if site >= dims.len() || dims[site] != op.dim() {
            return Err(Error::Dimension(format!(
                "cannot embed {}-dim operator at site {site} of {dims:?}",
                op.dim()
            )));
        }
        let ids: Vec<Operator> = dims.iter().map(|&d| Self::identity(d)).collect();
        let factors: Vec<&Operator> = (0..dims.len())
            .map(|k| if k == site { op } else { &ids[k] })
            .collect();
        Ok(Self::kron_all(&factors))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.matmul(other)? + &other.matmul(self)?)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (i..d).all(|j| (self.m[[i, j]] - self.m[[j, i]].conj()).norm() <= tol))
    }

    /// Opt-in density-matrix validation: Hermitian, unit trace.
    pub fn validate_density(&self, tol: f64) -> Result<()> {
        if !self.is_hermitian(tol) {
            return Err(Error::InvalidParameter("density matrix is not Hermitian".into()));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidParameter(format!("density matrix trace {tr}")));
        }
        Ok(())
    }

    /// Smallest eigenvalue of a Hermitian matrix, by Jacobi rotations.
    pub fn min_eigenvalue_hermitian(&self) -> f64 {
        hermitian_eigenvalues(self).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Matrix exponential by scaling and squaring with Padé approximants
    /// of degree 3 to 13 (Higham 2005 thresholds).
    pub fn expm(&self) -> Result<Self> {
        if !self.is_finite() {
            return Err(Error::NonFinite("expm input"));
        }
        expm(&self.m).map(|m| Self { m })
    }

    /// Partial trace keeping the subsystems listed in `keep`.
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != self.dim() {
            return Err(Error::Dimension(format!(
                "subsystem dims {dims:?} do not multiply to {}",
                self.dim()
            )));
        }
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.iter().any(|&k| k >= dims.len()) {
            return Err(Error::Dimension(format!("keep {keep:?} out of range")));
        }
        let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep_sorted.contains(k)).collect();
        let dk: usize = keep_sorted.iter().map(|&k| dims[k]).product();
        let dt: usize = traced.iter().map(|&k| dims[k]).product();
        let index = |kept: usize, tr: usize| -> usize {
            // Rebuild the full multi-index from kept and traced parts.
            let mut digits = vec![0usize; dims.len()];
            let mut r = kept;
            for &k in keep_sorted.iter().rev() {
                digits[k] = r % dims[k];
                r /= dims[k];
            }
            let mut r = tr;
            for &k in traced.iter().rev() {
                digits[k] = r % dims[k];
                r /= dims[k];
            }
            digits.iter().zip(dims).fold(0, |acc, (&dg, &d)| acc * d + dg)
        };
        let mut out = Array2::zeros((dk, dk));
        for a in 0..dk {
            for b in 0..dk {
                let mut s = ZERO;
                for t in 0..dt {
                    s += self.m[[index(a, t), index(b, t)]];
                }
                out[[a, b]] = s;
            }
        }
        Ok(Self { m: out })
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(())
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator { m: &self.m + &rhs.m }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator { m: &self.m - &rhs.m }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator { m: self.m.dot(&rhs.m) }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { m: self.m.mapv(|z| -z) }
    }
}

/// Pure state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct KetState {
    v: Array1<C64>,
}

impl KetState {
    pub fn new(v: Array1<C64>) -> Self {
        Self { v }
    }

    pub fn from_slice(v: &[C64]) -> Self {
        Self { v: Array1::from(v.to_vec()) }
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = Array1::zeros(d);
        v[i] = ONE;
        Self { v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn as_array(&self) -> &Array1<C64> {
        &self.v
    }

    pub fn norm(&self) -> f64 {
        self.v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self { v: self.v.mapv(|z| z / n) }
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.v.iter().zip(other.v.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut v = Array1::zeros(self.dim() * other.dim());
        for (i, a) in self.v.iter().enumerate() {
            for (j, b) in other.v.iter().enumerate() {
                v[i * other.dim() + j] = a * b;
            }
        }
        Self { v }
    }

    pub fn to_density(&self) -> Operator {
        let d = self.dim();
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = self.v[i] * self.v[j].conj();
            }
        }
        Operator { m }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { v: &self.v * c }
    }
}

/// ⟨ψ|ρ|ψ⟩ clamped to [0, 1].
pub fn state_fidelity(psi: &KetState, rho: &Operator) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::Dimension(format!("ket {} vs rho {}", psi.dim(), rho.dim())));
    }
    let v = psi.as_array();
    let f = v.mapv(|z| z.conj()).dot(&rho.as_array().dot(v)).re;
    Ok(f.clamp(0.0, 1.0))
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
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
const PADE13: [f64; 14] = [
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
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &Array2<C64>) -> f64 {
    a.axis_iter(Axis(1))
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    let eye = Array2::<C64>::eye(n);
    let norm = one_norm(a);
    if norm == 0.0 {
        return Ok(eye);
    }
    let a2 = a.dot(a);
    for &(m, theta) in THETA.iter() {
        if norm <= theta {
            let b: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            // Even/odd split with powers of A².
            let mut pow = eye.clone();
            let mut u = Array2::<C64>::zeros((n, n));
            let mut v = Array2::<C64>::zeros((n, n));
            for k in 0..=m / 2 {
                if k > 0 {
                    pow = pow.dot(&a2);
                }
                v.scaled_add(C64::new(b[2 * k], 0.0), &pow);
                u.scaled_add(C64::new(b[2 * k + 1], 0.0), &pow);
            }
            let u = a.dot(&u);
            return solve(&(&v - &u), &(&v + &u));
        }
    }
    let s = ((norm / THETA13).log2().ceil()).max(0.0) as i32;
    let scale = C64::new(0.5f64.powi(s), 0.0);
    let a1 = a.mapv(|z| z * scale);
    let a2 = a1.dot(&a1);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let b = &PADE13;
    let c = |x: f64| C64::new(x, 0.0);
    let mut inner_u = &a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]);
    inner_u = a6.dot(&inner_u);
    inner_u = inner_u + &a6 * c(b[7]) + &a4 * c(b[5]) + &a2 * c(b[3]) + &eye * c(b[1]);
    let u = a1.dot(&inner_u);
    let mut v = &a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]);
    v = a6.dot(&v);
    v = v + &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + &eye * c(b[0]);
    let mut r = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}

/// Solves A X = B by LU with partial pivoting.
pub(crate) fn solve(a: &Array2<C64>, b: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    let mut lu: Vec<C64> = a.iter().cloned().collect(); // row-major
    let mut x: Vec<C64> = b.iter().cloned().collect();
    let m = b.ncols();
    for k in 0..n {
        let (mut p, mut best) = (k, 0.0);
        for i in k..n {
            let v = lu[i * n + k].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(Error::Singular);
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            for j in 0..m {
                x.swap(k * m + j, p * m + j);
            }
        }
        let pivot = lu[k * n + k];
        let (top, bottom) = lu.split_at_mut((k + 1) * n);
        let row_k = &top[k * n..(k + 1) * n];
        let (xtop, xbottom) = x.split_at_mut((k + 1) * m);
        let xrow_k = &xtop[k * m..(k + 1) * m];
        for (r, row) in bottom.chunks_exact_mut(n).enumerate() {
            let f = row[k] / pivot;
            if f == ZERO {
                continue;
            }
            row[k] = f;
            for j in k + 1..n {
                row[j] -= f * row_k[j];
            }
            let xrow = &mut xbottom[r * m..(r + 1) * m];
            for j in 0..m {
                xrow[j] -= f * xrow_k[j];
            }
        }
    }
    for k in (0..n).rev() {
        let pivot = lu[k * n + k];
        for j in 0..m {
            let mut s = x[k * m + j];
            for i in k + 1..n {
                s -= lu[k * n + i] * x[i * m + j];
            }
            x[k * m + j] = s / pivot;
        }
    }
    Ok(Array2::from_shape_vec((n, m), x).expect("shape"))
}

/// Eigenvalues of a Hermitian matrix via cyclic complex Jacobi sweeps.
pub(crate) fn hermitian_eigenvalues(h: &Operator) -> Vec<f64> {
    let n = h.dim();
    let mut a = h.as_array().clone();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[[i, j]].norm_sqr())
            .sum();
        if off < 1e-26 * (1.0 + a.iter().map(|z| z.norm_sqr()).sum::<f64>()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq.norm() < 1e-300 {
                    continue;
                }
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                let phase = apq / apq.norm();
                let theta = 0.5 * (2.0 * apq.norm()).atan2(aqq - app);
                let (c, s) = (theta.cos(), theta.sin());
                // Rotation acting on columns p, q.
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * c - akq * s * phase.conj();
                    a[[k, q]] = akp * s * phase + akq * c;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = apk * c - aqk * s * phase;
                    a[[q, k]] = apk * s * phase.conj() + aqk * c;
                }
            }
        }
    }
    (0..n).map(|i| a[[i, i]].re).collect()
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_spectral_norm(h: &Operator) -> f64 {
    hermitian_eigenvalues(h).into_iter().map(f64::abs).fold(0.0, f64::max)
}
