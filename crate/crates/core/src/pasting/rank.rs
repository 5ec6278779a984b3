//! Exact ranks of the rational matrices behind the multiplicity formulas.

use super::omega::{OmegaMatrix, OmegaMethod};
use super::PastingError;
use crate::measure::poly::rational;
use num_rational::BigRational;
use num_traits::Zero;

/// Rank by fraction-exact Gaussian elimination.
pub fn exact_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = &rows[r][col] / &p;
            for c in col..cols {
                let delta = &f * &rows[rank][c];
                rows[r][c] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of `M_d` with entries `b_i(d − b_i)` on the diagonal and `−b_i b_j`
/// off it: `n − 1` when `d = Σ b_l`, else `n`.
pub fn rank_md(b: &[f64], d: f64) -> Result<usize, PastingError> {
    if b.is_empty() || d == 0.0 || b.iter().any(|&x| x == 0.0) {
        return Err(PastingError::Invalid("rank_md needs nonzero b_l and d".into()));
    }
    if !d.is_finite() || b.iter().any(|x| !x.is_finite()) {
        return Err(PastingError::Invalid("rank_md needs finite inputs".into()));
    }
    let bq: Vec<BigRational> = b.iter().map(|&x| rational(x)).collect();
    let dq = rational(d);
    let rows = (0..b.len())
        .map(|i| {
            (0..b.len())
                .map(|j| if i == j { &bq[i] * (&dq - &bq[i]) } else { -(&bq[i] * &bq[j]) })
                .collect()
        })
        .collect();
    Ok(exact_rank(rows))
}

/// `#{l : d_l > 0} − 1` for relative densities `d_l = dμ_l/dμ(x)` summing to
/// one with at least two of them positive.
pub fn predicted_rank_singular(d: &[f64]) -> Result<usize, PastingError> {
    if d.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(PastingError::Invalid("relative densities must lie in [0, 1]".into()));
    }
    let total: f64 = d.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(PastingError::Invalid(format!("relative densities sum to {total}, not 1")));
    }
    let positive = d.iter().filter(|&&x| x > 0.0).count();
    if positive < 2 {
        return Err(PastingError::Invalid("one density carries all the mass; no spectrum there".into()));
    }
    Ok(positive - 1)
}

/// `v vᵀ/(1 + Σ m_l²)` with `v = (m_1, …, m_{n−1}, 1)`: the value of `ω` at a
/// zero of `m = Σ m_l` where all `m_l` are finite.
pub fn rank_one_limit_matrix(m_values: &[f64]) -> OmegaMatrix {
    let mut v: Vec<f64> = m_values.to_vec();
    v.push(1.0);
    let norm: f64 = v.iter().map(|x| x * x).sum();
    let n = v.len();
    let entries = nalgebra::DMatrix::from_fn(n, n, |i, j| num_complex::Complex64::new(v[i] * v[j] / norm, 0.0));
    let vq: Vec<BigRational> = v.iter().map(|&x| rational(x)).collect();
    let rank = exact_rank(vq.iter().map(|a| vq.iter().map(|b| a * b).collect()).collect());
    let mut om = OmegaMatrix::exact(entries, OmegaMethod::KirchhoffZero);
    om.exact_rank = Some(rank);
    om
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_examples() {
        assert_eq!(rank_md(&[1.0, 1.0], 2.0).unwrap(), 1);
        assert_eq!(rank_md(&[1.0, 1.0], 3.0).unwrap(), 2);
        assert_eq!(rank_md(&[2.0, 3.0, 5.0], 10.0).unwrap(), 2);
        assert!(rank_md(&[0.0, 1.0], 1.0).is_err());
        assert!(rank_md(&[1.0], 0.0).is_err());
    }

    #[test]
    fn singular_prediction() {
        assert_eq!(predicted_rank_singular(&[0.5, 0.5, 0.0]).unwrap(), 1);
        assert_eq!(predicted_rank_singular(&[0.3, 0.3, 0.4]).unwrap(), 2);
        assert!(predicted_rank_singular(&[1.0, 0.0, 0.0]).is_err());
        assert!(predicted_rank_singular(&[0.5, 0.6]).is_err());
    }

    #[test]
    fn rank_one_examples() {
        let a = rank_one_limit_matrix(&[0.0]);
        assert_eq!(a.entries()[(0, 0)].re, 0.0);
        assert_eq!(a.entries()[(1, 1)].re, 1.0);
        assert_eq!(a.exact_rank, Some(1));
        let b = rank_one_limit_matrix(&[1.0, 1.0]);
        assert!(b.entries().iter().all(|v| (v.re - 1.0 / 3.0).abs() < 1e-16));
        assert_eq!(b.exact_rank, Some(1));
        assert_eq!(rank_one_limit_matrix(&[-3.5, 0.25, 7.0]).exact_rank, Some(1));
    }
}
