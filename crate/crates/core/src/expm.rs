//! Dense complex matrix exponential by scaling and squaring of a truncated
//! Taylor series. Only used for small verification problems.

use ndarray::Array2;
use num_complex::Complex;

use crate::scalar::{cre, Real};

const MAX_TERMS: usize = 60;

fn norm_1<T: Real>(a: &Array2<Complex<T>>) -> T {
    a.columns()
        .into_iter()
        .map(|col| col.iter().fold(T::zero(), |acc, z| acc + z.norm()))
        .fold(T::zero(), T::max)
}

/// `exp(a)` for a square matrix.
pub fn expm<T: Real>(a: &Array2<Complex<T>>) -> Array2<Complex<T>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = norm_1(a);
    let half = T::lit(0.5);
    let mut squarings = 0u32;
    let mut scale = T::one();
    while norm * scale > half {
        scale = scale * half;
        squarings += 1;
    }
    let x = a.mapv(|z| z * scale);

    let mut sum = Array2::from_diag_elem(n, cre(T::one()));
    let mut term = sum.clone();
    for k in 1..=MAX_TERMS {
        term = term.dot(&x).mapv(|z| z / T::from_usize_lossy(k));
        sum = sum + &term;
        if norm_1(&term) <= T::epsilon() * norm_1(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}
