//! Hopf–Lax semigroup `Q_t f(y) = min_x f(x) + d(x, y)^p / (p t^{p−1})`
//! with exact argmin bookkeeping.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::slope::{ascending_slope, forward_lip_constant, ScalarField};
use crate::space::FiniteAsymmSpace;

/// Absolute tolerance for treating two values of `Φ(t, ·, y)` as tied.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HopfLaxProfile<T> {
    pub t: T,
    pub p: T,
    pub q_values: ScalarField<T>,
    /// Minimizing `x` for every `y`, within [`TIE_TOL`].
    pub argmins: Vec<Vec<usize>>,
    /// `𝔡⁻(y, t) = min d(x*, y)` over the argmins.
    pub d_minus: Vec<T>,
    /// `𝔡⁺(y, t) = max d(x*, y)` over the argmins.
    pub d_plus: Vec<T>,
}

fn check_args<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>, t: T, p: T) -> Result<()> {
    if f.len() != space.len() {
        return Err(Error::Shape(format!("field of length {} on a space of {} points", f.len(), space.len())));
    }
    if !(p > T::one()) || !p.is_finite() {
        return Err(Error::InvalidExponent(p.to_f64().unwrap_or(f64::NAN)));
    }
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be positive, got {}", t)));
    }
    Ok(())
}

pub fn hopf_lax<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>, t: T, p: T) -> Result<HopfLaxProfile<T>> {
    check_args(space, f, t, p)?;
    let n = space.len();
    let denom = p * t.powf(p - T::one());
    let tie: T = lit(TIE_TOL);
    let mut q_values = Vec::with_capacity(n);
    let mut argmins = Vec::with_capacity(n);
    let mut d_minus = Vec::with_capacity(n);
    let mut d_plus = Vec::with_capacity(n);
    let mut phi = vec![T::infinity(); n];
    for y in 0..n {
        let mut best = T::infinity();
        for x in 0..n {
            phi[x] = match space.d(x, y) {
                Some(d) => f[x] + d.powf(p) / denom,
                None => T::infinity(),
            };
            best = best.min(phi[x]);
        }
        let set: Vec<usize> = (0..n).filter(|&x| phi[x] <= best + tie).collect();
        let ds = set.iter().map(|&x| space.dist(x, y).to_float());
        let (lo, hi) = ds.fold((T::infinity(), T::zero()), |(lo, hi), d| (lo.min(d), hi.max(d)));
        q_values.push(best);
        argmins.push(set);
        d_minus.push(lo);
        d_plus.push(hi);
    }
    Ok(HopfLaxProfile { t, p, q_values: ScalarField::new(q_values)?, argmins, d_minus, d_plus })
}

/// `min_x f(x) + d(y, x)^p / (p t^{p−1})`, the semigroup of the reversed
/// distance.
pub fn backward_hopf_lax<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>, t: T, p: T) -> Result<HopfLaxProfile<T>> {
    hopf_lax(&space.reverse(), f, t, p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityViolation<T> {
    pub point: usize,
    pub s: T,
    pub t: T,
    pub d_plus_s: T,
    pub d_minus_t: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport<T> {
    pub violations: Vec<MonotonicityViolation<T>>,
    pub holds: bool,
}

/// `𝔡⁺(y, s) ≤ 𝔡⁻(y, t)` for all points and all grid pairs `s < t`.
pub fn d_monotonicity_check<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>, p: T, times: &[T]) -> Result<MonotonicityReport<T>> {
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("time grid must be strictly increasing".into()));
    }
    let profiles: Vec<HopfLaxProfile<T>> = times.iter().map(|&t| hopf_lax(space, f, t, p)).collect::<Result<_>>()?;
    let mut violations = Vec::new();
    for (i, a) in profiles.iter().enumerate() {
        for b in &profiles[i + 1..] {
            for y in 0..space.len() {
                if a.d_plus[y] > b.d_minus[y] {
                    violations.push(MonotonicityViolation { point: y, s: a.t, t: b.t, d_plus_s: a.d_plus[y], d_minus_t: b.d_minus[y] });
                }
            }
        }
    }
    Ok(MonotonicityReport { holds: violations.is_empty(), violations })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeSample<T> {
    pub point: usize,
    /// `(Q_{t+h} − Q_t)/h`
    pub right_difference: T,
    /// `−(1/q)(𝔡⁺/t)^p`
    pub right_formula: T,
    /// `(Q_t − Q_{t−h})/h`
    pub left_difference: T,
    /// `−(1/q)(𝔡⁻/t)^p`
    pub left_formula: T,
    /// Argmin sets differ across `[t − h, t + h]`.
    pub switching: bool,
    /// Largest relative error of the two one-sided comparisons.
    pub relative_error: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeDerivativeReport<T> {
    pub t: T,
    pub h: T,
    pub samples: Vec<DerivativeSample<T>>,
    /// Over points without a detected switch.
    pub max_relative_error: T,
}

/// Compares one-sided difference quotients of `t ↦ Q_t f(y)` with the
/// closed-form derivatives in terms of `𝔡±`.
///
/// Relative errors are taken against `max(|formula|, noise)`, where `noise`
/// is the roundoff level of a difference quotient with step `h`.
pub fn time_derivative_check<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>, p: T, t: T, h: T) -> Result<TimeDerivativeReport<T>> {
    if !(h > T::zero() && h < t) {
        return Err(Error::InvalidInput("need 0 < h < t".into()));
    }
    let before = hopf_lax(space, f, t - h, p)?;
    let now = hopf_lax(space, f, t, p)?;
    let after = hopf_lax(space, f, t + h, p)?;
    let q = p / (p - T::one());
    let scale = f.values().iter().fold(T::one(), |acc, v| acc.max(v.abs()));
    let noise = lit::<T>(1e3) * T::epsilon() * scale / h;
    let mut samples = Vec::with_capacity(space.len());
    let mut max_relative_error = T::zero();
    for y in 0..space.len() {
        let right_difference = (after.q_values[y] - now.q_values[y]) / h;
        let left_difference = (now.q_values[y] - before.q_values[y]) / h;
        let right_formula = -(now.d_plus[y] / t).powf(p) / q;
        let left_formula = -(now.d_minus[y] / t).powf(p) / q;
        let switching = before.argmins[y] != now.argmins[y] || after.argmins[y] != now.argmins[y];
        let rel = |a: T, b: T| (a - b).abs() / b.abs().max(noise);
        let relative_error = rel(right_difference, right_formula).max(rel(left_difference, left_formula));
        if !switching {
            max_relative_error = max_relative_error.max(relative_error);
        }
        samples.push(DerivativeSample { point: y, right_difference, right_formula, left_difference, left_formula, switching, relative_error });
    }
    Ok(TimeDerivativeReport { t, h, samples, max_relative_error })
}

/// Central difference of `Q_t f` in time plus `|D⁺Q_t f|^q / q` with the
/// discrete ascending slope. Nonpositive values mean the subsolution
/// inequality holds at that point.
pub fn hj_residual<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>, p: T, t: T, h: T) -> Result<ScalarField<T>> {
    if !(h > T::zero() && h < t) {
        return Err(Error::InvalidInput("need 0 < h < t".into()));
    }
    let q = p / (p - T::one());
    let before = hopf_lax(space, f, t - h, p)?;
    let now = hopf_lax(space, f, t, p)?;
    let after = hopf_lax(space, f, t + h, p)?;
    let slope = ascending_slope(space, &now.q_values)?;
    ScalarField::from_fn(space.len(), |y| {
        (after.q_values[y] - before.q_values[y]) / (h + h) + slope[y].powf(q) / q
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzReport<T> {
    /// `inf f ≤ Q_t f ≤ sup f` everywhere.
    pub range_holds: bool,
    pub lip: T,
    /// `2^{p−1} (p · osc f / t)^{1/q}`
    pub bound: T,
    pub holds: bool,
}

pub fn lipschitz_bound_check<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>, p: T, t: T) -> Result<LipschitzReport<T>> {
    let prof = hopf_lax(space, f, t, p)?;
    let tol: T = lit(TIE_TOL);
    let (lo, hi) = (f.min(), f.max());
    let range_holds = prof.q_values.values().iter().all(|&v| v >= lo - tol && v <= hi + tol);
    let q = p / (p - T::one());
    let bound = lit::<T>(2.0).powf(p - T::one()) * (p * (hi - lo) / t).powf(T::one() / q);
    let lip = forward_lip_constant(space, &prof.q_values)?.to_float();
    let holds = range_holds && lip <= bound + tol;
    Ok(LipschitzReport { range_holds, lip, bound, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifferenceViolation<T> {
    pub y: usize,
    pub z: usize,
    pub excess: T,
}

/// `Q_t f(z) − Q_t f(y) ≤ (𝔡⁻(y, t) + d(y, z))^{p−1} d(y, z) / t^{p−1}` over
/// all ordered pairs with finite distance.
pub fn difference_bound_check<T: Scalar>(space: &FiniteAsymmSpace<T>, profile: &HopfLaxProfile<T>) -> Vec<DifferenceViolation<T>> {
    let p = profile.p;
    let tp = profile.t.powf(p - T::one());
    let tol: T = lit(TIE_TOL);
    let qv = &profile.q_values;
    let mut out = Vec::new();
    for y in 0..space.len() {
        for z in 0..space.len() {
            let Some(d) = space.d(y, z) else { continue };
            let lhs = qv[z] - qv[y];
            let rhs = (profile.d_minus[y] + d).powf(p - T::one()) * d / tp;
            let excess = lhs - rhs;
            if excess > tol * (T::one() + qv[z].abs().max(qv[y].abs())) {
                out.push(DifferenceViolation { y, z, excess });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> FiniteAsymmSpace<f64> {
        FiniteAsymmSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap()
    }

    fn field(v: &[f64]) -> ScalarField<f64> {
        ScalarField::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_point_profile() {
        let s = two_point();
        let pr = hopf_lax(&s, &field(&[0.0, 10.0]), 1.0, 2.0).unwrap();
        assert_eq!(pr.q_values.values(), &[0.0, 0.5]);
        assert_eq!(pr.argmins[1], vec![0]);
        assert_eq!((pr.d_minus[1], pr.d_plus[1]), (1.0, 1.0));
        assert_eq!((pr.d_minus[0], pr.d_plus[0]), (0.0, 0.0));
        let lip = lipschitz_bound_check(&s, &field(&[0.0, 10.0]), 2.0, 1.0).unwrap();
        assert_eq!(lip.lip, 0.5);
        assert!((lip.bound - 2.0 * 20f64.sqrt()).abs() < 1e-12 && lip.holds);
    }

    #[test]
    fn constant_is_invariant() {
        let s = two_point();
        let pr = hopf_lax(&s, &field(&[3.0, 3.0]), 0.7, 3.0).unwrap();
        assert_eq!(pr.q_values.values(), &[3.0, 3.0]);
        assert_eq!(pr.argmins, vec![vec![0], vec![1]]);
        assert_eq!(pr.d_plus, vec![0.0, 0.0]);
    }

    #[test]
    fn switching_at_one_twentieth() {
        let s = two_point();
        let f = field(&[0.0, 10.0]);
        let r = d_monotonicity_check(&s, &f, 2.0, &[0.01, 0.04, 1.0]).unwrap();
        assert!(r.holds);
        assert_eq!(hopf_lax(&s, &f, 0.04, 2.0).unwrap().d_plus[1], 0.0);
        let at = hopf_lax(&s, &f, 0.05, 2.0).unwrap();
        assert_eq!(at.argmins[1], vec![0, 1]);
        assert_eq!((at.d_minus[1], at.d_plus[1]), (0.0, 1.0));
        let rep = time_derivative_check(&s, &f, 2.0, 0.05, 1e-7).unwrap();
        assert!(rep.samples[1].switching);
        assert!((rep.samples[1].right_formula + 0.5 / 0.0025).abs() < 1e-9);
        assert_eq!(rep.samples[1].left_formula, 0.0);
    }

    #[test]
    fn derivative_away_from_switch() {
        let s = two_point();
        let rep = time_derivative_check(&s, &field(&[0.0, 10.0]), 2.0, 1.0, 1e-5).unwrap();
        assert!(!rep.samples[1].switching);
        assert!((rep.samples[1].right_formula + 0.5).abs() < 1e-15);
        assert!(rep.max_relative_error < 1e-4);
    }

    #[test]
    fn coarse_mesh_residual() {
        let s = two_point();
        let r = hj_residual(&s, &field(&[0.0, 10.0]), 2.0, 1.0, 1e-5).unwrap();
        assert!((r[0] - 0.125).abs() < 1e-12);
        assert!((r[1] + 0.5).abs() < 1e-8);
    }

    #[test]
    fn backward_matches_reverse() {
        let s = two_point();
        let f = field(&[0.0, 10.0]);
        let b = backward_hopf_lax(&s, &f, 1.0, 2.0).unwrap();
        // min(10, 0 + d(b, a)^2 / 2) = 2
        assert_eq!(b.q_values.values(), &[0.0, 2.0]);
        assert!(difference_bound_check(&s, &hopf_lax(&s, &f, 1.0, 2.0).unwrap()).is_empty());
    }
}
