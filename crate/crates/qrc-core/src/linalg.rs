//! Split real/imaginary dense kernels for the conjugation hot paths.
//!
//! A complex d x d product costs 4 real products done naively; the
//! Gauss/Karatsuba form needs 3. Routing those through `matrixmultiply`'s
//! f64 gemm is an order of magnitude faster than a generic complex gemm at
//! the sizes used here (d = 2^N <= 128), which is what makes the closed-loop
//! benchmarks affordable on one core. All buffers are column-major, matching
//! `nalgebra`'s storage.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// `c = a * b` for column-major `d x d` f64 buffers.
/// `a_t`/`b_t` multiply by the transpose instead, via swapped strides.
fn gemm(d: usize, a: &[f64], a_t: bool, b: &[f64], b_t: bool, c: &mut [f64]) {
    debug_assert!(a.len() == d * d && b.len() == d * d && c.len() == d * d);
    let (rsa, csa) = if a_t { (d as isize, 1) } else { (1, d as isize) };
    let (rsb, csb) = if b_t { (d as isize, 1) } else { (1, d as isize) };
    // SAFETY: all three buffers hold d*d elements and the stride pairs above
    // describe in-bounds d x d layouts of exactly those buffers.
    unsafe {
        matrixmultiply::dgemm(
            d,
            d,
            d,
            1.0,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            0.0,
            c.as_mut_ptr(),
            1,
            d as isize,
        );
    }
}

fn split_into(m: &DMatrix<Complex64>, re: &mut [f64], im: &mut [f64]) {
    for (k, z) in m.as_slice().iter().enumerate() {
        re[k] = z.re;
        im[k] = z.im;
    }
}

/// Split form of a unitary plus the sum/difference combinations consumed by
/// the 3-product complex multiply. Immutable once built.
pub(crate) struct SplitUnitary {
    pub d: usize,
    re: Vec<f64>,
    im: Vec<f64>,
    sum: Vec<f64>,
    diff: Vec<f64>,
}

impl SplitUnitary {
    pub fn new(u: &DMatrix<Complex64>) -> Self {
        let d = u.nrows();
        debug_assert_eq!(u.ncols(), d);
        let mut re = vec![0.0; d * d];
        let mut im = vec![0.0; d * d];
        split_into(u, &mut re, &mut im);
        let sum = re.iter().zip(&im).map(|(r, i)| r + i).collect();
        let diff = re.iter().zip(&im).map(|(r, i)| r - i).collect();
        SplitUnitary { d, re, im, sum, diff }
    }
}

/// Scratch buffers for one conjugation; reusable across calls of equal size.
pub(crate) struct ConjScratch {
    d: usize,
    xr: Vec<f64>,
    xi: Vec<f64>,
    xs: Vec<f64>,
    m1: Vec<f64>,
    m2: Vec<f64>,
    m3: Vec<f64>,
}

impl ConjScratch {
    pub fn new(d: usize) -> Self {
        ConjScratch {
            d,
            xr: vec![0.0; d * d],
            xi: vec![0.0; d * d],
            xs: vec![0.0; d * d],
            m1: vec![0.0; d * d],
            m2: vec![0.0; d * d],
            m3: vec![0.0; d * d],
        }
    }
}

/// `rho <- hermitize(U rho U^dag)` in place.
///
/// Stage 1 computes `A = U rho` with the 3-product form; stage 2 folds the
/// adjoint into the sign pattern instead of materializing `U^dag`. The
/// write-back averages `C` with its adjoint, so roundoff never accumulates
/// asymmetry in the state.
pub(crate) fn conjugate(u: &SplitUnitary, rho: &mut DMatrix<Complex64>, s: &mut ConjScratch) {
    let d = u.d;
    debug_assert_eq!(rho.nrows(), d);
    debug_assert_eq!(s.d, d);
    split_into(rho, &mut s.xr, &mut s.xi);
    for k in 0..d * d {
        s.xs[k] = s.xr[k] + s.xi[k];
    }
    // A = U * rho: Ar = m1 - m2, Ai = m3 - m1 - m2.
    gemm(d, &u.re, false, &s.xr, false, &mut s.m1);
    gemm(d, &u.im, false, &s.xi, false, &mut s.m2);
    gemm(d, &u.sum, false, &s.xs, false, &mut s.m3);
    for k in 0..d * d {
        let ar = s.m1[k] - s.m2[k];
        let ai = s.m3[k] - s.m1[k] - s.m2[k];
        s.xr[k] = ar;
        s.xi[k] = ai;
        s.xs[k] = ar + ai;
    }
    // C = A * U^dag, with Br = Ur^T, Bi = -Ui^T:
    // Cr = n1 + p2, Ci = n3 - n1 + p2.
    gemm(d, &s.xr, false, &u.re, true, &mut s.m1);
    gemm(d, &s.xi, false, &u.im, true, &mut s.m2);
    gemm(d, &s.xs, false, &u.diff, true, &mut s.m3);
    let out = rho.as_mut_slice();
    for j in 0..d {
        for k in j..d {
            let jk = j + k * d;
            let kj = k + j * d;
            let cr_jk = s.m1[jk] + s.m2[jk];
            let ci_jk = s.m3[jk] - s.m1[jk] + s.m2[jk];
            if k == j {
                out[jk] = Complex64::new(cr_jk, 0.0);
            } else {
                let cr_kj = s.m1[kj] + s.m2[kj];
                let ci_kj = s.m3[kj] - s.m1[kj] + s.m2[kj];
                let re = 0.5 * (cr_jk + cr_kj);
                let im = 0.5 * (ci_jk - ci_kj);
                out[jk] = Complex64::new(re, im);
                out[kj] = Complex64::new(re, -im);
            }
        }
    }
}

/// `U^dag Z U` for Hermitian `Z`; returns split (re, im) column-major buffers.
/// Used to precompute observables advanced into the frame of each virtual
/// node, so a reservoir step needs one full-period conjugation regardless
/// of `V`.
pub(crate) fn conjugate_adjoint(
    u: &SplitUnitary,
    zr: &[f64],
    zi: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let d = u.d;
    debug_assert!(zr.len() == d * d && zi.len() == d * d);
    let mut zs = vec![0.0; d * d];
    for k in 0..d * d {
        zs[k] = zr[k] + zi[k];
    }
    let mut t1 = vec![0.0; d * d];
    let mut p = vec![0.0; d * d];
    let mut t3 = vec![0.0; d * d];
    // T = U^dag * Z, with Ar = Ur^T, Ai = -Ui^T, Ar + Ai = (Ur - Ui)^T:
    // Tr = t1 + p, Ti = t3 - t1 + p.
    gemm(d, &u.re, true, zr, false, &mut t1);
    gemm(d, &u.im, true, zi, false, &mut p);
    gemm(d, &u.diff, true, &zs, false, &mut t3);
    let mut tr = vec![0.0; d * d];
    let mut ti = vec![0.0; d * d];
    let mut ts = vec![0.0; d * d];
    for k in 0..d * d {
        tr[k] = t1[k] + p[k];
        ti[k] = t3[k] - t1[k] + p[k];
        ts[k] = tr[k] + ti[k];
    }
    // Z' = T * U: standard 3-product recombination.
    gemm(d, &tr, false, &u.re, false, &mut t1);
    gemm(d, &ti, false, &u.im, false, &mut p);
    gemm(d, &ts, false, &u.sum, false, &mut t3);
    let mut or = vec![0.0; d * d];
    let mut oi = vec![0.0; d * d];
    for k in 0..d * d {
        or[k] = t1[k] - p[k];
        oi[k] = t3[k] - t1[k] - p[k];
    }
    (or, oi)
}

/// `A * B^dag` for general complex matrices (used once per propagator build).
pub(crate) fn mul_adjoint_rhs(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = a.nrows();
    debug_assert!(a.is_square() && b.nrows() == d && b.ncols() == d);
    let mut ar = vec![0.0; d * d];
    let mut ai = vec![0.0; d * d];
    split_into(a, &mut ar, &mut ai);
    let asum: Vec<f64> = ar.iter().zip(&ai).map(|(r, i)| r + i).collect();
    let mut br = vec![0.0; d * d];
    let mut bi = vec![0.0; d * d];
    split_into(b, &mut br, &mut bi);
    let bdiff: Vec<f64> = br.iter().zip(&bi).map(|(r, i)| r - i).collect();
    let mut m1 = vec![0.0; d * d];
    let mut m2 = vec![0.0; d * d];
    let mut m3 = vec![0.0; d * d];
    // B^dag re = Br^T, im = -Bi^T: Cr = m1 + m2, Ci = m3 - m1 + m2.
    gemm(d, &ar, false, &br, true, &mut m1);
    gemm(d, &ai, false, &bi, true, &mut m2);
    gemm(d, &asum, false, &bdiff, true, &mut m3);
    DMatrix::from_fn(d, d, |i, j| {
        let k = i + j * d;
        Complex64::new(m1[k] + m2[k], m3[k] - m1[k] + m2[k])
    })
}

/// `Re Tr[rho Z]` for Hermitian `rho` and Hermitian `Z` given in split form.
/// Hermiticity collapses the trace to two elementwise dot products.
pub(crate) fn trace_product_hermitian(rho: &DMatrix<Complex64>, zr: &[f64], zi: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (c, (r, i)) in rho.as_slice().iter().zip(zr.iter().zip(zi)) {
        acc += c.re * r + c.im * i;
    }
    acc
}

/// Split a Hermitian operator into (re, im) column-major buffers.
pub(crate) fn split_hermitian(m: &DMatrix<Complex64>) -> (Vec<f64>, Vec<f64>) {
    let d = m.nrows();
    let mut re = vec![0.0; d * d];
    let mut im = vec![0.0; d * d];
    split_into(m, &mut re, &mut im);
    (re, im)
}
