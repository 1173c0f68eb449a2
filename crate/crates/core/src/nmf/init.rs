//! Deterministic starting points for the multiplicative solver.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dtm::CsrMatrix;
use crate::error::{Error, Result};

/// Floor applied to exact zeros of the initial factors.
pub const INIT_FLOOR: f64 = 1e-9;

const SVD_OVERSAMPLE: usize = 10;
const SVD_MAX_POWER_ITERS: usize = 60;
const SVD_SEED: u64 = 0x5eed_0f_5bd;

/// Leading singular triplets of a sparse matrix.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    /// n_rows × k
    pub u: DMatrix<f64>,
    pub sigma: DVector<f64>,
    /// n_cols × k
    pub v: DMatrix<f64>,
}

fn orthonormal_basis(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

/// Randomized subspace iteration with a fixed seed, so repeated calls on
/// the same matrix give identical results.
pub fn truncated_svd(a: &CsrMatrix<f64>, k: usize) -> TruncatedSvd {
    let (n, m) = a.shape();
    let l = (k + SVD_OVERSAMPLE).min(n).min(m);
    let mut rng = ChaCha8Rng::seed_from_u64(SVD_SEED);
    let omega = DMatrix::from_fn(m, l, |_, _| rng.gen_range(-1.0..1.0));
    let mut q = orthonormal_basis(a.mul_dense(&omega));
    let mut prev: Option<DVector<f64>> = None;

    for _ in 0..SVD_MAX_POWER_ITERS {
        let z = orthonormal_basis(a.tr_mul_dense(&q));
        q = orthonormal_basis(a.mul_dense(&z));
        // when the basis already spans the whole column space there is nothing to refine
        if l == n.min(m) {
            break;
        }
        let s = (a.tr_mul_dense(&q).transpose()).singular_values();
        let top = s.rows(0, k).into_owned();
        if let Some(p) = &prev {
            let scale = top[0].max(f64::MIN_POSITIVE);
            if (&top - p).amax() <= 1e-12 * scale {
                break;
            }
        }
        prev = Some(top);
    }

    // project: B = Qᵀ A, then SVD of the small dense B
    let b = a.tr_mul_dense(&q).transpose();
    let svd = b.svd(true, true);
    let ub = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let order = &order[..k];

    let u_full = &q * ub;
    let u = DMatrix::from_fn(n, k, |r, c| u_full[(r, order[c])]);
    let v = DMatrix::from_fn(m, k, |r, c| vt[(order[c], r)]);
    let sigma = DVector::from_fn(k, |c, _| svd.singular_values[order[c]]);
    TruncatedSvd { u, sigma, v }
}

pub fn check_rank(shape: (usize, usize), k: usize) -> Result<()> {
    let bound = shape.0.min(shape.1);
    if k == 0 || k > bound {
        return Err(Error::InvalidRank(format!(
            "K = {k} must lie in 1..={bound} for a {}x{} matrix",
            shape.0, shape.1
        )));
    }
    Ok(())
}

fn positive_part(x: &DVector<f64>) -> DVector<f64> {
    x.map(|v| v.max(0.0))
}

fn negative_part(x: &DVector<f64>) -> DVector<f64> {
    x.map(|v| (-v).max(0.0))
}

fn floor_zeros(m: &mut DMatrix<f64>) {
    for v in m.iter_mut() {
        if *v <= 0.0 {
            *v = INIT_FLOOR;
        }
    }
}

/// NNDSVD initialization: each singular pair is split into its positive
/// and negative parts and the pair with the larger norm product is kept.
pub fn nndsvd(a: &CsrMatrix<f64>, k: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_rank(a.shape(), k)?;
    let (n, m) = a.shape();
    let svd = truncated_svd(a, k);
    let mut w = DMatrix::zeros(n, k);
    let mut h = DMatrix::zeros(k, m);

    for j in 0..k {
        let x: DVector<f64> = svd.u.column(j).into_owned();
        let y: DVector<f64> = svd.v.column(j).into_owned();
        let s = svd.sigma[j];
        let (uj, vj, scale) = if j == 0 {
            // the leading pair of a non-negative matrix is sign-coherent
            (x.abs(), y.abs(), s.sqrt())
        } else {
            let (xp, xn) = (positive_part(&x), negative_part(&x));
            let (yp, yn) = (positive_part(&y), negative_part(&y));
            let mp = xp.norm() * yp.norm();
            let mn = xn.norm() * yn.norm();
            let (xs, ys, mag) = if mp > mn { (xp, yp, mp) } else { (xn, yn, mn) };
            if mag == 0.0 {
                continue;
            }
            let (nx, ny) = (xs.norm(), ys.norm());
            (xs / nx, ys / ny, (s * mag).sqrt())
        };
        w.set_column(j, &(uj * scale));
        h.set_row(j, &(vj * scale).transpose());
    }
    floor_zeros(&mut w);
    floor_zeros(&mut h);
    Ok((w, h))
}

/// Uniform random factors scaled to the mean entry of `a`.
pub fn random_init(a: &CsrMatrix<f64>, k: usize, seed: u64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_rank(a.shape(), k)?;
    let (n, m) = a.shape();
    let mean = a.triplets().map(|(_, _, v)| v).sum::<f64>() / (n * m) as f64;
    let scale = (mean / k as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = DMatrix::from_fn(n, k, |_, _| scale * rng.gen::<f64>());
    let mut h = DMatrix::from_fn(k, m, |_, _| scale * rng.gen::<f64>());
    floor_zeros(&mut w);
    floor_zeros(&mut h);
    Ok((w, h))
}
