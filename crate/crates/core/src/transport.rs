//! Asymmetric Wasserstein distances by exact linear programming, with
//! Kantorovich and Kantorovich–Rubinstein duality certificates.
//!
//! The coupling LP has one variable per ordered pair `(x, y)` with
//! `d(x, y) < ∞` and cost `c_p = d^p / p`, so that its optimum is
//! `W_p^p / p` and its duals are Kantorovich potentials directly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::FlowTrajectory;
use crate::numerics::{lp_solve, LpProblem, LpStatus};
use crate::scalar::{lit, Scalar};
use crate::slope::{ascending_slope, ScalarField};
use crate::space::FiniteAsymmSpace;

pub const MASS_TOL: f64 = 1e-12;
pub const LP_TOL: f64 = 1e-12;

/// Probability vector on the points of a space.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Measure<T> {
    weights: Vec<T>,
}

impl<T: Scalar> Measure<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidMeasure(format!("weight {} at point {}", weights[i], i)));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > lit(MASS_TOL) {
            return Err(Error::InvalidMeasure(format!("total mass {}", total)));
        }
        Ok(Measure { weights })
    }

    pub fn dirac(n: usize, i: usize) -> Self {
        let mut weights = vec![T::zero(); n];
        weights[i] = T::one();
        Measure { weights }
    }

    pub fn uniform(n: usize) -> Self {
        Measure { weights: vec![T::one() / lit(n as f64); n] }
    }

    /// `f · m`, accepted when the mass is within `tol` of one and negative
    /// entries are within `tol` of zero; then clipped and renormalized.
    pub fn from_density(f: &ScalarField<T>, m: &[T], tol: T) -> Result<Self> {
        let w: Vec<T> = f.values().iter().zip(m).map(|(&v, &mi)| v * mi).collect();
        let total: T = w.iter().copied().sum();
        if (total - T::one()).abs() > tol {
            return Err(Error::InvalidMeasure(format!("total mass {}", total)));
        }
        if let Some(i) = w.iter().position(|&v| v < -tol) {
            return Err(Error::InvalidMeasure(format!("negative weight {} at point {}", w[i], i)));
        }
        let clipped: Vec<T> = w.iter().map(|&v| v.max(T::zero())).collect();
        let s: T = clipped.iter().copied().sum();
        Ok(Measure { weights: clipped.iter().map(|&v| v / s).collect() })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coupling<T> {
    pub plan: Vec<Vec<T>>,
}

impl<T: Scalar> Coupling<T> {
    /// Largest deviation of the marginals from `(μ, ν)`.
    pub fn marginal_error(&self, mu: &Measure<T>, nu: &Measure<T>) -> T {
        let n = self.plan.len();
        let mut err = T::zero();
        for i in 0..n {
            let row: T = self.plan[i].iter().copied().sum();
            let col: T = (0..n).map(|k| self.plan[k][i]).sum();
            err = err.max((row - mu.weights[i]).abs()).max((col - nu.weights[i]).abs());
        }
        err
    }
}

fn check_pair<T: Scalar>(space: &FiniteAsymmSpace<T>, mu: &Measure<T>, nu: &Measure<T>) -> Result<()> {
    if mu.len() != space.len() || nu.len() != space.len() {
        return Err(Error::Shape(format!("measures of length {} and {} on {} points", mu.len(), nu.len(), space.len())));
    }
    Ok(())
}

fn check_order<T: Scalar>(p: T) -> Result<()> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::InvalidExponent(p.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// `d^p / p`
pub fn cost_p<T: Scalar>(d: T, p: T) -> T {
    d.powf(p) / p
}

#[derive(Clone, Debug)]
pub struct TransportSolution<T> {
    /// `W_p(μ, ν)`
    pub value: T,
    /// LP optimum `Σ c_p π = W_p^p / p`.
    pub cost: T,
    pub coupling: Coupling<T>,
    /// Row potentials `ψ` and column potentials `φ` with `φ(y) − ψ(x) ≤ c_p(x, y)`.
    pub psi: ScalarField<T>,
    pub phi: ScalarField<T>,
    pub pivots: usize,
}

/// Optimal coupling for the cost `d^p / p`.
pub fn optimal_transport<T: Scalar>(space: &FiniteAsymmSpace<T>, mu: &Measure<T>, nu: &Measure<T>, p: T) -> Result<TransportSolution<T>> {
    check_pair(space, mu, nu)?;
    check_order(p)?;
    let n = space.len();
    let pairs: Vec<(usize, usize, T)> = (0..n)
        .flat_map(|x| (0..n).filter_map(move |y| space.d(x, y).map(|d| (x, y, d))))
        .collect();
    let cost: Vec<T> = pairs.iter().map(|&(_, _, d)| cost_p(d, p)).collect();
    let mut a = vec![vec![T::zero(); pairs.len()]; 2 * n];
    for (k, &(x, y, _)) in pairs.iter().enumerate() {
        a[x][k] = T::one();
        a[n + y][k] = T::one();
    }
    let b: Vec<T> = mu.weights.iter().chain(&nu.weights).copied().collect();
    let sol = lp_solve(&LpProblem::new(cost, a, b)?, lit(LP_TOL))?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::InfiniteCost),
        LpStatus::Unbounded => return Err(Error::InvalidInput("transport LP reported unbounded".into())),
    }
    let mut plan = vec![vec![T::zero(); n]; n];
    for (k, &(x, y, _)) in pairs.iter().enumerate() {
        plan[x][y] = sol.primal[k];
    }
    let value = (p * sol.objective.max(T::zero())).powf(T::one() / p);
    let psi = ScalarField::new(sol.dual[..n].iter().map(|&u| -u).collect())?;
    let phi = ScalarField::new(sol.dual[n..].to_vec())?;
    Ok(TransportSolution { value, cost: sol.objective, coupling: Coupling { plan }, psi, phi, pivots: sol.pivots })
}

/// `W_p(μ, ν)` and an optimal vertex coupling.
pub fn wasserstein<T: Scalar>(space: &FiniteAsymmSpace<T>, mu: &Measure<T>, nu: &Measure<T>, p: T) -> Result<(T, Coupling<T>)> {
    let s = optimal_transport(space, mu, nu, p)?;
    Ok((s.value, s.coupling))
}

/// `ψ^{c_p}(y) = min_x ψ(x) + d(x, y)^p / p`
pub fn c_p_transform<T: Scalar>(space: &FiniteAsymmSpace<T>, psi: &ScalarField<T>, p: T) -> Result<ScalarField<T>> {
    check_order(p)?;
    if psi.len() != space.len() {
        return Err(Error::Shape(format!("field of length {} on {} points", psi.len(), space.len())));
    }
    let n = space.len();
    ScalarField::new(
        (0..n)
            .map(|y| (0..n).filter_map(|x| space.d(x, y).map(|d| psi[x] + cost_p(d, p))).fold(T::infinity(), T::min))
            .collect(),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct DualCertificate<T> {
    pub psi: ScalarField<T>,
    pub phi: ScalarField<T>,
    /// `Σ c_p π`
    pub primal: T,
    /// `Σ φ ν − Σ ψ μ`
    pub dual: T,
    pub gap: T,
    /// `max (φ(y) − ψ(x) − c_p(x, y))⁺` over finite pairs.
    pub feasibility_violation: T,
    /// `max (φ − ψ^{c_p})⁺`
    pub transform_violation: T,
    /// `max |ψ^{c_p}(y) − ψ(x) − c_p(x, y)|` on the plan support.
    pub slackness_error: T,
    pub holds: bool,
}

/// Kantorovich potentials from the LP duals, with their certificate.
pub fn kantorovich_dual<T: Scalar>(space: &FiniteAsymmSpace<T>, mu: &Measure<T>, nu: &Measure<T>, p: T, tol: T) -> Result<DualCertificate<T>> {
    let s = optimal_transport(space, mu, nu, p)?;
    let n = space.len();
    let dual = (0..n).map(|y| s.phi[y] * nu.weights[y]).sum::<T>() - (0..n).map(|x| s.psi[x] * mu.weights[x]).sum::<T>();
    let gap = (s.cost - dual).abs();
    let mut feasibility_violation = T::zero();
    for x in 0..n {
        for y in 0..n {
            if let Some(d) = space.d(x, y) {
                feasibility_violation = feasibility_violation.max(s.phi[y] - s.psi[x] - cost_p(d, p));
            }
        }
    }
    let tr = c_p_transform(space, &s.psi, p)?;
    let transform_violation = (0..n).map(|y| s.phi[y] - tr[y]).fold(T::zero(), T::max);
    let support: T = lit(1e-14);
    let mut slackness_error = T::zero();
    for x in 0..n {
        for y in 0..n {
            if s.coupling.plan[x][y] > support {
                let d = space.dist(x, y).to_float();
                slackness_error = slackness_error.max((tr[y] - s.psi[x] - cost_p(d, p)).abs());
            }
        }
    }
    let holds = gap <= tol && feasibility_violation <= tol && transform_violation <= tol && slackness_error <= tol;
    Ok(DualCertificate {
        psi: s.psi,
        phi: s.phi,
        primal: s.cost,
        dual,
        gap,
        feasibility_violation,
        transform_violation,
        slackness_error,
        holds,
    })
}

/// `W_1` as `max Σ ψ dν − Σ ψ dμ` over `ψ(y) − ψ(x) ≤ d(x, y)`.
pub fn kr_w1<T: Scalar>(space: &FiniteAsymmSpace<T>, mu: &Measure<T>, nu: &Measure<T>) -> Result<(T, ScalarField<T>)> {
    check_pair(space, mu, nu)?;
    let n = space.len();
    let pairs: Vec<(usize, usize, T)> = (0..n)
        .flat_map(|x| (0..n).filter(move |&y| y != x).filter_map(move |y| space.d(x, y).map(|d| (x, y, d))))
        .collect();
    // Columns: ψ⁺ (n), ψ⁻ (n), one slack per pair.
    let width = 2 * n + pairs.len();
    let mut cost = vec![T::zero(); width];
    for i in 0..n {
        let c = nu.weights[i] - mu.weights[i];
        cost[i] = -c;
        cost[n + i] = c;
    }
    let mut a = vec![vec![T::zero(); width]; pairs.len()];
    let mut b = Vec::with_capacity(pairs.len());
    for (k, &(x, y, d)) in pairs.iter().enumerate() {
        let row = &mut a[k];
        row[y] = row[y] + T::one();
        row[n + y] = row[n + y] - T::one();
        row[x] = row[x] - T::one();
        row[n + x] = row[n + x] + T::one();
        row[2 * n + k] = T::one();
        b.push(d);
    }
    let sol = lp_solve(&LpProblem::new(cost, a, b)?, lit(LP_TOL))?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => return Err(Error::InfiniteCost),
        LpStatus::Infeasible => return Err(Error::InvalidInput("Lipschitz LP reported infeasible".into())),
    }
    let psi = ScalarField::new((0..n).map(|i| sol.primal[i] - sol.primal[n + i]).collect())?;
    Ok((-sol.objective, psi))
}

#[derive(Clone, Debug, Serialize)]
pub struct ReversibilityReport<T> {
    /// `max W_p(μ, ν) / W_p(ν, μ)` over sampled ordered pairs.
    pub sup_ratio: T,
    /// `λ_d(X)`
    pub bound: T,
    /// Ratio of the Dirac pair realizing `λ_d`.
    pub dirac_ratio: T,
    pub dirac_attains: bool,
    pub holds: bool,
}

/// Samples `W_p` reversibility against `λ_d(X)`.
pub fn wp_reversibility<T: Scalar>(space: &FiniteAsymmSpace<T>, p: T, samples: &[Measure<T>]) -> Result<ReversibilityReport<T>> {
    let bound = space
        .total_reversibility()
        .finite()
        .ok_or_else(|| Error::InvalidInput("reversibility of the space is infinite".into()))?;
    let n = space.len();
    let mut sup_ratio = T::one();
    for (i, a) in samples.iter().enumerate() {
        for b in &samples[i + 1..] {
            let ab = optimal_transport(space, a, b, p)?.value;
            let ba = optimal_transport(space, b, a, p)?.value;
            if ab > T::zero() && ba > T::zero() {
                sup_ratio = sup_ratio.max(ab / ba).max(ba / ab);
            }
        }
    }
    // Dirac pair attaining λ_d
    let mut best = (T::one(), 0, 0);
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            if let (Some(a), Some(b)) = (space.d(x, y), space.d(y, x)) {
                if a / b > best.0 {
                    best = (a / b, x, y);
                }
            }
        }
    }
    let dirac_ratio = if best.1 == best.2 {
        T::one()
    } else {
        let (x, y) = (best.1, best.2);
        let ab = optimal_transport(space, &Measure::dirac(n, x), &Measure::dirac(n, y), p)?.value;
        let ba = optimal_transport(space, &Measure::dirac(n, y), &Measure::dirac(n, x), p)?.value;
        ab / ba
    };
    sup_ratio = sup_ratio.max(dirac_ratio);
    let tol: T = lit(1e-10);
    let dirac_attains = (dirac_ratio - bound).abs() <= tol * bound;
    let holds = sup_ratio <= bound * (T::one() + tol);
    Ok(ReversibilityReport { sup_ratio, bound, dirac_ratio, dirac_attains, holds })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KuwadaSlack<T> {
    pub c_tau: T,
    pub c_mesh: T,
}

impl<T: Scalar> Default for KuwadaSlack<T> {
    fn default() -> Self {
        KuwadaSlack { c_tau: lit(10.0), c_mesh: lit(10.0) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KuwadaStep<T> {
    pub step: usize,
    pub time: T,
    /// `W_p(μ_{k+j}, μ_k) / (t_{k+j} − t_k)`
    pub speed: T,
    /// `(Σ_{f>0} |D⁺f|^q / f^{p−1} m)^{1/p}`
    pub bound: T,
    /// `bound · (1 + slack)`
    pub allowed: T,
    /// The bound is unusable because the density touches zero.
    pub flagged: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KuwadaReport<T> {
    pub slack: T,
    pub steps: Vec<KuwadaStep<T>>,
    pub holds: bool,
}

/// Backward metric speed of `t ↦ f_t m` in `W_p` against the Fisher-type
/// bound, at every step with a successor `h_index` steps later.
pub fn kuwada_check<T: Scalar>(
    space: &FiniteAsymmSpace<T>,
    trajectory: &FlowTrajectory<T>,
    p: T,
    h_index: usize,
    slack: KuwadaSlack<T>,
) -> Result<KuwadaReport<T>> {
    check_order(p)?;
    let q = trajectory.q;
    if !(p > T::one()) || (T::one() / p + T::one() / q - T::one()).abs() > lit(1e-12) {
        return Err(Error::InvalidExponent(p.to_f64().unwrap_or(f64::NAN)));
    }
    if h_index == 0 {
        return Err(Error::InvalidInput("h_index must be at least 1".into()));
    }
    let m = space.measure();
    let mass_tol: T = lit(1e-8);
    let measures: Vec<Measure<T>> = trajectory
        .states
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let mass = f.integral(m);
            if (mass - T::one()).abs() > mass_tol || f.min() < -mass_tol {
                return Err(Error::MassNotUnit { step: k, mass: mass.to_f64().unwrap_or(f64::NAN) });
            }
            Measure::from_density(f, m, mass_tol)
        })
        .collect::<Result<_>>()?;
    let slack_value = slack.c_tau * trajectory.tau + slack.c_mesh * space.mesh_size();
    let tiny: T = lit(1e-12);
    let mut steps = Vec::new();
    for k in 0..trajectory.len().saturating_sub(h_index) {
        let f = &trajectory.states[k];
        let dt = trajectory.times[k + h_index] - trajectory.times[k];
        let speed = optimal_transport(space, &measures[k + h_index], &measures[k], p)?.value / dt;
        let up = ascending_slope(space, f)?;
        let mut sum = T::zero();
        let mut flagged = false;
        for x in 0..space.len() {
            if f[x] <= T::zero() {
                continue;
            }
            if f[x] < tiny && up[x] > T::zero() {
                flagged = true;
            }
            sum = sum + up[x].powf(q) / f[x].powf(p - T::one()) * m[x];
        }
        let bound = sum.powf(T::one() / p);
        if !bound.is_finite() {
            flagged = true;
        }
        let allowed = bound * (T::one() + slack_value);
        let holds = flagged || speed <= allowed;
        steps.push(KuwadaStep { step: k, time: trajectory.times[k], speed, bound, allowed, flagged, holds });
    }
    let holds = steps.iter().all(|s| s.holds);
    Ok(KuwadaReport { slack: slack_value, steps, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> FiniteAsymmSpace<f64> {
        FiniteAsymmSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap()
    }

    #[test]
    fn dirac_to_dirac() {
        let s = two_point();
        let (a, b) = (Measure::dirac(2, 0), Measure::dirac(2, 1));
        for p in [1.0, 2.0, 3.0] {
            assert!((wasserstein(&s, &a, &b, p).unwrap().0 - 1.0).abs() < 1e-14);
            assert!((wasserstein(&s, &b, &a, p).unwrap().0 - 2.0).abs() < 1e-14);
        }
        let c = kantorovich_dual(&s, &a, &b, 2.0, 1e-12).unwrap();
        assert!(c.holds, "{:?}", c);
        assert!((c.phi[1] - c.psi[0] - 0.5).abs() < 1e-14);
        let (v, psi) = kr_w1(&s, &a, &b).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        assert!((psi[1] - psi[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identical_measures() {
        let s = two_point();
        let mu = Measure::new(vec![0.3, 0.7]).unwrap();
        let (v, plan) = wasserstein(&s, &mu, &mu, 2.0).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(plan.plan[0][1] + plan.plan[1][0], 0.0);
        assert!(kr_w1(&s, &mu, &mu).unwrap().0.abs() < 1e-15);
    }

    #[test]
    fn measure_validation() {
        assert!(matches!(Measure::new(vec![0.5, 0.6]), Err(Error::InvalidMeasure(_))));
        assert!(matches!(Measure::new(vec![1.5, -0.5]), Err(Error::InvalidMeasure(_))));
    }

    #[test]
    fn unreachable_target_is_infinite() {
        let s = FiniteAsymmSpace::from_digraph(2, &[(0, 1, 1.0)], None).unwrap();
        let (a, b) = (Measure::dirac(2, 0), Measure::dirac(2, 1));
        assert!(wasserstein(&s, &a, &b, 2.0).is_ok());
        assert!(matches!(wasserstein(&s, &b, &a, 2.0), Err(Error::InfiniteCost)));
        assert!(matches!(kr_w1(&s, &b, &a), Err(Error::InfiniteCost)));
    }

    #[test]
    fn transform_of_two_point() {
        let s = two_point();
        let psi = ScalarField::new(vec![0.0, 10.0]).unwrap();
        assert_eq!(c_p_transform(&s, &psi, 2.0).unwrap().values(), &[0.0, 0.5]);
    }

    #[test]
    fn two_point_reversibility() {
        let s = two_point();
        let r = wp_reversibility(&s, 2.0, &[Measure::new(vec![0.2, 0.8]).unwrap(), Measure::new(vec![0.9, 0.1]).unwrap()]).unwrap();
        assert!(r.holds && r.dirac_attains, "{:?}", r);
        assert_eq!(r.bound, 2.0);
    }
}
