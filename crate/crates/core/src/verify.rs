//! Brute-force reference computations, deliberately independent of the
//! solvers they are used to check.

use crate::cubic::{model_value, CubicModel};
use crate::linalg::{Point, SymMatrix};
use crate::Scalar;

/// Minimum of a 2-D cubic model over `[−half_width, half_width]²`: a grid
/// of spacing `step`, then repeated 21×21 refinements (each 10× finer)
/// around the best `keep` grid points until the spacing drops below `1e-10`.
pub fn grid_cubic_minimum_2d<T: Scalar>(model: &CubicModel<T>, half_width: T, step: T, keep: usize) -> (T, Point<T>) {
    assert_eq!(model.g.dim(), 2, "grid oracle is two-dimensional");
    let eval = |a: T, b: T| model_value(model, &Point::from(vec![a, b]));
    let n = (half_width * T::lit(2.0) / step).ceil().to_usize().unwrap_or(0);
    let mut best: Vec<(T, T, T)> = Vec::with_capacity(keep + 1);
    let push = |v: T, a: T, b: T, best: &mut Vec<(T, T, T)>| {
        if best.len() < keep || v < best[best.len() - 1].0 {
            let pos = best.partition_point(|e| e.0 <= v);
            best.insert(pos, (v, a, b));
            best.truncate(keep);
        }
    };
    for i in 0..=n {
        let a = -half_width + step * T::from_usize_lossy(i);
        for j in 0..=n {
            let b = -half_width + step * T::from_usize_lossy(j);
            push(eval(a, b), a, b, &mut best);
        }
    }
    let mut winner = (eval(T::zero(), T::zero()), T::zero(), T::zero());
    for &(v0, a0, b0) in &best {
        let (mut v, mut a, mut b) = (v0, a0, b0);
        let mut h = step;
        while h > T::lit(1e-10) {
            let (ca, cb) = (a, b);
            for i in -10i32..=10 {
                for j in -10i32..=10 {
                    let ta = ca + h * T::from_i32(i).unwrap() / T::lit(10.0);
                    let tb = cb + h * T::from_i32(j).unwrap() / T::lit(10.0);
                    let tv = eval(ta, tb);
                    if tv < v {
                        (v, a, b) = (tv, ta, tb);
                    }
                }
            }
            // stay at this scale while the best point keeps moving
            if a == ca && b == cb {
                h = h / T::lit(10.0);
            }
        }
        if v < winner.0 {
            winner = (v, a, b);
        }
    }
    (winner.0, Point::from(vec![winner.1, winner.2]))
}

/// Smallest eigenvalue by power iteration on `cI − H`, with `c` a
/// Gershgorin bound on the spectrum.
pub fn power_iteration_min_eig<T: Scalar>(h: &SymMatrix<T>, max_iters: usize, tol: T) -> T {
    let d = h.dim();
    let c = (0..d)
        .map(|i| (0..d).map(|j| h.get(i, j).abs()).sum::<T>())
        .fold(T::zero(), T::max)
        + T::one();
    let shifted = h.scaled(-T::one()).shifted(c);
    let mut v = Point::from_fn(d, |i| T::one() + T::from_usize_lossy(i) * T::lit(0.1));
    v = v.scaled(T::one() / v.norm());
    let mut rayleigh = shifted.quad_form(&v);
    for _ in 0..max_iters {
        let w = shifted.matvec(&v);
        let n = w.norm();
        if n == T::zero() {
            break;
        }
        v = w.scaled(T::one() / n);
        let next = shifted.quad_form(&v);
        let done = (next - rayleigh).abs() <= tol * c;
        rayleigh = next;
        if done {
            break;
        }
    }
    c - rayleigh
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_iteration_on_diagonal() {
        let h = SymMatrix::<f64>::from_diag(&[-2.0, 5.0, 1.0]);
        assert!((power_iteration_min_eig(&h, 100_000, 1e-15) + 2.0).abs() < 1e-8);
    }

    #[test]
    fn grid_finds_planar_hard_case_minimum() {
        let m = CubicModel::new(Point::from(vec![0.0, 1.0]), SymMatrix::<f64>::from_diag(&[-1.0, 1.0]), 2.0).unwrap();
        let (v, s) = grid_cubic_minimum_2d(&m, 2.0, 0.01, 4);
        // value at (±√0.75, −0.5): −0.5 + ½(−0.75 + 0.25) + 1/3
        let expect = -0.5 - 0.25 + 1.0 / 3.0;
        assert!((v - expect).abs() < 1e-12);
        assert!((s[1] + 0.5).abs() < 1e-5);
    }
}
