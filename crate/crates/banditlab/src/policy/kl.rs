//! Kullback-Leibler divergence between Bernoulli laws.

use super::PolicyError;

/// `K(p, q) = p ln(p/q) + (1-p) ln((1-p)/(1-q))` with `0 ln 0 = 0`.
///
/// Requires `q` in the open interval `(0, 1)`; `p` may touch the endpoints.
pub fn bern_kl(p: f64, q: f64) -> Result<f64, PolicyError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(PolicyError::KlReferenceOutOfRange { q });
    }
    Ok(bern_kl_unchecked(p, q))
}

pub(crate) fn bern_kl_unchecked(p: f64, q: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p) && q > 0.0 && q < 1.0);
    let left = if p == 0.0 { 0.0 } else { p * (p / q).ln() };
    let right = if p == 1.0 {
        0.0
    } else {
        (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln()
    };
    left + right
}
