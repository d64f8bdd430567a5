//! Principal angles between column spaces via the SVD of `U_a' U_b`.

use nalgebra::DMatrix;

/// Cosines of the principal angles, descending.
pub fn principal_cosines(ua: &DMatrix<f64>, ub: &DMatrix<f64>) -> Vec<f64> {
    let prod = ua.transpose() * ub;
    let svd = prod.svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().map(|v| v.min(1.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Normalized sum of squared principal cosines.
pub fn inclusion_from_angles(ua: &DMatrix<f64>, ub: &DMatrix<f64>) -> f64 {
    let k = ua.ncols().min(ub.ncols());
    principal_cosines(ua, ub).iter().take(k).map(|c| c * c).sum::<f64>() / k as f64
}

/// Orthonormal basis of the column space of a full-rank matrix.
pub fn orthonormalize(m: DMatrix<f64>) -> DMatrix<f64> {
    let k = m.ncols();
    let q = m.qr().q();
    q.columns(0, k).into_owned()
}
