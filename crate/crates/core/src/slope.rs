//! Discrete slopes, Lipschitz constants, Cheeger energies and the minimal
//! weak upper gradient over a finite curve family.
//!
//! Slopes are local: the sup over `y → x` is taken over the neighbor
//! relation of the space. Isolated points have slope 0.

use std::collections::HashSet;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{prox_solve, ConvexProblem, LinearConstraint, Term};
use crate::scalar::{lit, ExtReal, Scalar};
use crate::space::FiniteAsymmSpace;

/// Finite real values indexed by the points of a space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarField<T> {
    values: Vec<T>,
}

impl<T: Scalar> ScalarField<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(ScalarField { values })
    }

    pub fn constant(n: usize, c: T) -> Self {
        ScalarField { values: vec![c; n] }
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, T::zero())
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> T) -> Result<Self> {
        Self::new((0..n).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<T> {
        self.values
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: T) -> Self {
        ScalarField { values: self.values.iter().map(|&v| v * c).collect() }
    }

    pub fn neg(&self) -> Self {
        ScalarField { values: self.values.iter().map(|&v| -v).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        ScalarField { values: self.values.iter().zip(&other.values).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        ScalarField { values: self.values.iter().zip(&other.values).map(|(&a, &b)| a - b).collect() }
    }

    /// `f⁺ = max(f, 0)`
    pub fn positive_part(&self) -> Self {
        ScalarField { values: self.values.iter().map(|&v| v.max(T::zero())).collect() }
    }

    /// `f⁻ = max(−f, 0)`
    pub fn negative_part(&self) -> Self {
        ScalarField { values: self.values.iter().map(|&v| (-v).max(T::zero())).collect() }
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// `Σ f m`
    pub fn integral(&self, measure: &[T]) -> T {
        self.values.iter().zip(measure).map(|(&v, &m)| v * m).sum()
    }

    /// `(Σ |f|^θ m)^{1/θ}`
    pub fn lp_norm(&self, measure: &[T], theta: T) -> T {
        let s: T = self.values.iter().zip(measure).map(|(&v, &m)| v.abs().powf(theta) * m).sum();
        s.powf(T::one() / theta)
    }
}

impl<T> Index<usize> for ScalarField<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.values[i]
    }
}

fn check_len<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>) -> Result<()> {
    if f.len() != space.len() {
        return Err(Error::Shape(format!("field of length {} on a space of {} points", f.len(), space.len())));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
    Absolute,
}

/// `|D⁺f|(x) = max_{y ∈ N(x)} [f(y) − f(x)]⁺ / d(x, y)`
pub fn ascending_slope<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>) -> Result<ScalarField<T>> {
    check_len(space, f)?;
    let values = (0..space.len())
        .map(|x| {
            space
                .neighbor_edges(x)
                .map(|(y, d)| (f[y] - f[x]).max(T::zero()) / d)
                .fold(T::zero(), T::max)
        })
        .collect();
    Ok(ScalarField { values })
}

/// `|D⁻f|(x) = max_{y ∈ N(x)} [f(x) − f(y)]⁺ / d(x, y)`
pub fn descending_slope<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>) -> Result<ScalarField<T>> {
    ascending_slope(space, &f.neg())
}

/// `|Df| = max(|D⁺f|, |D⁻f|)`
pub fn local_lip<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>) -> Result<ScalarField<T>> {
    let up = ascending_slope(space, f)?;
    let down = descending_slope(space, f)?;
    Ok(ScalarField { values: up.values.iter().zip(&down.values).map(|(&a, &b)| a.max(b)).collect() })
}

pub fn slope<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>, direction: Direction) -> Result<ScalarField<T>> {
    match direction {
        Direction::Forward => ascending_slope(space, f),
        Direction::Backward => descending_slope(space, f),
        Direction::Absolute => local_lip(space, f),
    }
}

/// Smallest `C ≥ 0` with `f(y) − f(x) ≤ C d(x, y)` over all pairs.
pub fn forward_lip_constant<T: Scalar>(space: &FiniteAsymmSpace<T>, f: &ScalarField<T>) -> Result<ExtReal<T>> {
    check_len(space, f)?;
    let mut best = ExtReal::Finite(T::zero());
    for x in 0..space.len() {
        for y in 0..space.len() {
            if x == y {
                continue;
            }
            let Some(d) = space.d(x, y) else { continue };
            let rise = f[y] - f[x];
            if rise <= T::zero() {
                continue;
            }
            best = best.max(if d > T::zero() { ExtReal::new(rise / d) } else { ExtReal::Infinite });
        }
    }
    Ok(best)
}

pub(crate) fn check_exponent<T: Scalar>(q: T) -> Result<()> {
    if !(q > T::one()) || !q.is_finite() {
        return Err(Error::InvalidExponent(q.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// `(1/q) Σ slope^q m`
pub fn cheeger_energy<T: Scalar>(
    space: &FiniteAsymmSpace<T>,
    f: &ScalarField<T>,
    q: T,
    direction: Direction,
) -> Result<T> {
    check_exponent(q)?;
    let s = slope(space, f, direction)?;
    Ok(energy_of(&s, space.measure(), q))
}

/// `(1/q) Σ G^q m`
pub fn energy_of<T: Scalar>(g: &ScalarField<T>, measure: &[T], q: T) -> T {
    g.values.iter().zip(measure).map(|(&v, &m)| v.powf(q) * m).sum::<T>() / q
}

/// Vertex sequence along neighbor edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscretePath {
    vertices: Vec<usize>,
}

impl DiscretePath {
    pub fn new<T: Scalar>(space: &FiniteAsymmSpace<T>, vertices: Vec<usize>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least one edge".into()));
        }
        for w in vertices.windows(2) {
            if w[0] >= space.len() || w[1] >= space.len() {
                return Err(Error::InvalidPath(format!("vertex out of range in {:?}", w)));
            }
            if !space.neighbors(w[0]).contains(&w[1]) {
                return Err(Error::InvalidPath(format!("{} is not a neighbor of {}", w[1], w[0])));
            }
        }
        Ok(DiscretePath { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn num_edges(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn forward_length<T: Scalar>(&self, space: &FiniteAsymmSpace<T>) -> T {
        self.edges().map(|(a, b)| space.dist(a, b).to_float()).sum()
    }

    /// Energy of the constant-speed parametrization over `[0, 1]`.
    pub fn p_energy<T: Scalar>(&self, space: &FiniteAsymmSpace<T>, p: T) -> T {
        let n: T = lit(self.num_edges() as f64);
        self.edges().map(|(a, b)| space.dist(a, b).to_float().powf(p)).sum::<T>() / n.powf(p - T::one())
    }
}

/// Trapezoid-rule line integral `Σ (G(γᵢ) + G(γᵢ₊₁))/2 · d(γᵢ, γᵢ₊₁)`.
pub fn path_integral<T: Scalar>(space: &FiniteAsymmSpace<T>, g: &ScalarField<T>, path: &DiscretePath) -> Result<T> {
    check_len(space, g)?;
    if let Some(i) = path.vertices.iter().copied().find(|&i| g[i] < T::zero()) {
        return Err(Error::NegativeGradient(i));
    }
    let half: T = lit(0.5);
    Ok(path.edges().map(|(a, b)| (g[a] + g[b]) * half * space.dist(a, b).to_float()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy", content = "max_edges")]
pub enum CurvePolicy {
    Edges,
    PathsUpToLength(usize),
    Geodesics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub policy: CurvePolicy,
    pub paths: Vec<DiscretePath>,
}

pub const DEFAULT_CURVE_CAP: usize = 200_000;

/// Builds a curve family. `cap` bounds the number of paths.
pub fn generate_curves<T: Scalar>(space: &FiniteAsymmSpace<T>, policy: CurvePolicy, cap: usize) -> Result<CurveFamily> {
    let n = space.len();
    let mut paths = Vec::new();
    let push = |paths: &mut Vec<DiscretePath>, v: Vec<usize>| -> Result<()> {
        if paths.len() >= cap {
            return Err(Error::BudgetExceeded(cap));
        }
        paths.push(DiscretePath { vertices: v });
        Ok(())
    };
    match policy {
        CurvePolicy::Edges => {
            for x in 0..n {
                for (y, _) in space.neighbor_edges(x) {
                    push(&mut paths, vec![x, y])?;
                }
            }
        }
        CurvePolicy::PathsUpToLength(max_edges) => {
            // Simple paths are closed under taking subpaths, so the family is
            // complete without a separate closure pass.
            let mut stack: Vec<usize> = Vec::new();
            let mut on_path = vec![false; n];
            fn extend<T: Scalar>(
                space: &FiniteAsymmSpace<T>,
                stack: &mut Vec<usize>,
                on_path: &mut [bool],
                max_edges: usize,
                out: &mut dyn FnMut(Vec<usize>) -> Result<()>,
            ) -> Result<()> {
                if stack.len() > max_edges {
                    return Ok(());
                }
                let x = *stack.last().unwrap();
                for (y, _) in space.neighbor_edges(x) {
                    if on_path[y] {
                        continue;
                    }
                    stack.push(y);
                    on_path[y] = true;
                    out(stack.clone())?;
                    extend(space, stack, on_path, max_edges, out)?;
                    on_path[y] = false;
                    stack.pop();
                }
                Ok(())
            }
            let mut out = |v: Vec<usize>| push(&mut paths, v);
            for x in 0..n {
                stack.push(x);
                on_path[x] = true;
                extend(space, &mut stack, &mut on_path, max_edges, &mut out)?;
                on_path[x] = false;
                stack.pop();
            }
            paths.sort_by(|a, b| a.vertices.len().cmp(&b.vertices.len()).then_with(|| a.vertices.cmp(&b.vertices)));
        }
        CurvePolicy::Geodesics => {
            for x in 0..n {
                let pred = shortest_path_tree(space, x);
                for y in 0..n {
                    if y == x {
                        continue;
                    }
                    if pred[y] == usize::MAX {
                        return Err(Error::Disconnected(x, y));
                    }
                    let mut v = vec![y];
                    let mut c = y;
                    while c != x {
                        c = pred[c];
                        v.push(c);
                    }
                    v.reverse();
                    push(&mut paths, v)?;
                }
            }
        }
    }
    Ok(CurveFamily { policy, paths })
}

/// Dijkstra over the neighbor graph; ties go to the smaller predecessor.
fn shortest_path_tree<T: Scalar>(space: &FiniteAsymmSpace<T>, source: usize) -> Vec<usize> {
    let n = space.len();
    let mut dist = vec![T::infinity(); n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    dist[source] = T::zero();
    pred[source] = source;
    for _ in 0..n {
        let Some(u) = (0..n).filter(|&i| !done[i] && dist[i].is_finite()).min_by(|&a, &b| {
            dist[a].partial_cmp(&dist[b]).unwrap().then(a.cmp(&b))
        }) else {
            break;
        };
        done[u] = true;
        for (v, d) in space.neighbor_edges(u) {
            if done[v] {
                continue;
            }
            let alt = dist[u] + d;
            let tie = (alt - dist[v]).abs() <= T::epsilon() * lit(16.0) * alt;
            if alt < dist[v] && !tie {
                dist[v] = alt;
                pred[v] = u;
            } else if tie && u < pred[v] {
                pred[v] = u;
            }
        }
    }
    pred
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakGradient<T> {
    pub field: ScalarField<T>,
    /// `(1/q) Σ G^q m`
    pub energy: T,
    pub kkt_residual: T,
    pub iterations: usize,
    /// Constraints left after dropping implied and vacuous ones.
    pub active_constraints: usize,
}

/// Minimal `G ≥ 0` in `Lᵠ(m)` with `f(γ_end) − f(γ_start) ≤ ∫_γ G` for every
/// curve of the family.
pub fn minimal_weak_upper_gradient<T: Scalar>(
    space: &FiniteAsymmSpace<T>,
    f: &ScalarField<T>,
    curves: &CurveFamily,
    q: T,
    tol: T,
) -> Result<WeakGradient<T>> {
    check_len(space, f)?;
    check_exponent(q)?;
    let n = space.len();
    for p in &curves.paths {
        if p.vertices.iter().any(|&v| v >= n) {
            return Err(Error::InvalidPath(format!("{:?} leaves the space", p.vertices)));
        }
    }
    // A multi-edge constraint is the sum of its edge constraints when every
    // edge is itself a member, by additivity of the trapezoid rule.
    let single: HashSet<(usize, usize)> =
        curves.paths.iter().filter(|p| p.num_edges() == 1).map(|p| (p.start(), p.end())).collect();
    let mut rows: Vec<(Vec<(usize, T)>, T)> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let half: T = lit(0.5);
    for p in &curves.paths {
        let rise = f[p.end()] - f[p.start()];
        if rise <= T::zero() {
            continue;
        }
        if p.num_edges() > 1 && p.edges().all(|e| single.contains(&e)) {
            continue;
        }
        if !seen.insert(p.vertices.clone()) {
            continue;
        }
        let mut coefs: Vec<(usize, T)> = Vec::new();
        for (a, b) in p.edges() {
            let d = space.dist(a, b).to_float();
            for v in [a, b] {
                match coefs.iter_mut().find(|(j, _)| *j == v) {
                    Some(e) => e.1 = e.1 + d * half,
                    None => coefs.push((v, d * half)),
                }
            }
        }
        rows.push((coefs, rise));
    }

    let mut used: Vec<usize> = rows.iter().flat_map(|(c, _)| c.iter().map(|&(j, _)| j)).collect();
    used.sort_unstable();
    used.dedup();
    let mut values = vec![T::zero(); n];
    if used.is_empty() {
        let field = ScalarField { values };
        return Ok(WeakGradient { field, energy: T::zero(), kkt_residual: T::zero(), iterations: 0, active_constraints: 0 });
    }
    let mut slot = vec![usize::MAX; n];
    for (k, &j) in used.iter().enumerate() {
        slot[j] = k;
    }
    let scale = ascending_slope(space, f)?.max().max(T::min_positive_value());
    let problem = ConvexProblem {
        terms: used.iter().map(|&j| Term::Power { weight: space.mass(j), exponent: q }).collect(),
        nonneg: vec![true; used.len()],
        constraints: rows
            .iter()
            .map(|(c, rise)| LinearConstraint {
                coefs: c.iter().map(|&(j, a)| (slot[j], -a)).collect(),
                rhs: -*rise / scale,
            })
            .collect(),
        sigma: used.iter().map(|&j| space.mass(j)).fold(T::infinity(), T::min),
        initial: vec![T::one(); used.len()],
    };
    // Solved in units of the largest slope so that G is of order one.
    let sol = prox_solve(&problem, tol)?;
    for (k, &j) in used.iter().enumerate() {
        values[j] = sol.x[k].max(T::zero()) * scale;
    }
    let field = ScalarField { values };
    let energy = energy_of(&field, space.measure(), q);
    Ok(WeakGradient {
        field,
        energy,
        kkt_residual: sol.certificate.kkt_residual,
        iterations: sol.certificate.iterations,
        active_constraints: rows.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeIdentityReport<T> {
    /// `max |(|D⁻f| − |D⁺(−f)|)|`
    pub negation_error: T,
    /// `max |(|D⁺f| − |D⁺f⁺| − |D⁺(−f⁻)|)|`
    pub split_error: T,
    /// Points where the split identity fails beyond `1e-12`.
    pub split_failures: Vec<usize>,
    /// `|D⁺f| ≤ |D⁺f⁺| + |D⁺(−f⁻)|` everywhere.
    pub split_upper_bound_holds: bool,
    /// `(pair, point)` where `|D⁺(f+g)| ≤ |D⁺f| + |D⁺g|` fails.
    pub subadditivity_failures: Vec<(usize, usize)>,
    pub holds: bool,
}

pub const IDENTITY_TOL: f64 = 1e-12;

/// Checks the pointwise slope calculus on a field and on supplied pairs.
///
/// The split identity is exact when `f(x) ≥ 0` or when the same neighbor
/// realizes both one-sided maxima; otherwise only the upper bound holds on
/// a finite neighbor graph and the point is listed in `split_failures`.
pub fn slope_identities_check<T: Scalar>(
    space: &FiniteAsymmSpace<T>,
    f: &ScalarField<T>,
    pairs: &[(ScalarField<T>, ScalarField<T>)],
) -> Result<SlopeIdentityReport<T>> {
    let tol: T = lit(IDENTITY_TOL);
    let down = descending_slope(space, f)?;
    let up_neg = ascending_slope(space, &f.neg())?;
    let negation_error = down.values.iter().zip(&up_neg.values).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max);

    let up = ascending_slope(space, f)?;
    let up_pos = ascending_slope(space, &f.positive_part())?;
    let up_neg_part = ascending_slope(space, &f.negative_part().neg())?;
    let mut split_error = T::zero();
    let mut split_failures = Vec::new();
    let mut split_upper_bound_holds = true;
    for x in 0..space.len() {
        let sum = up_pos[x] + up_neg_part[x];
        let e = (up[x] - sum).abs();
        split_error = split_error.max(e);
        if e > tol * (T::one() + up[x].abs()) {
            split_failures.push(x);
        }
        if up[x] > sum + tol * (T::one() + sum) {
            split_upper_bound_holds = false;
        }
    }

    let mut subadditivity_failures = Vec::new();
    for (k, (g, h)) in pairs.iter().enumerate() {
        let lhs = ascending_slope(space, &g.add(h))?;
        let a = ascending_slope(space, g)?;
        let b = ascending_slope(space, h)?;
        for x in 0..space.len() {
            if lhs[x] > a[x] + b[x] + tol * (T::one() + a[x] + b[x]) {
                subadditivity_failures.push((k, x));
            }
        }
    }
    let holds = negation_error <= tol && split_failures.is_empty() && split_upper_bound_holds && subadditivity_failures.is_empty();
    Ok(SlopeIdentityReport { negation_error, split_error, split_failures, split_upper_bound_holds, subadditivity_failures, holds })
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
    fn two_point_slopes() {
        let s = two_point();
        let f = field(&[0.0, 1.0]);
        assert_eq!(ascending_slope(&s, &f).unwrap().values(), &[1.0, 0.0]);
        assert_eq!(descending_slope(&s, &f).unwrap().values(), &[0.0, 0.5]);
        assert_eq!(local_lip(&s, &f).unwrap().values(), &[1.0, 0.5]);
        assert_eq!(forward_lip_constant(&s, &f).unwrap(), ExtReal::Finite(1.0));
        assert_eq!(cheeger_energy(&s, &f, 2.0, Direction::Forward).unwrap(), 0.5);
        assert!(matches!(cheeger_energy(&s, &f, 1.0, Direction::Forward), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn constant_field_is_flat() {
        let s = two_point();
        let f = field(&[3.0, 3.0]);
        assert_eq!(local_lip(&s, &f).unwrap().values(), &[0.0, 0.0]);
        assert_eq!(forward_lip_constant(&s, &f).unwrap(), ExtReal::Finite(0.0));
    }

    #[test]
    fn rejects_infinite_values() {
        assert!(matches!(ScalarField::new(vec![0.0, f64::INFINITY]), Err(Error::NonFinite(1))));
    }

    #[test]
    fn trapezoid_integral() {
        let s = two_point();
        let p = DiscretePath::new(&s, vec![0, 1]).unwrap();
        assert_eq!(path_integral(&s, &field(&[2.0, 4.0]), &p).unwrap(), 3.0);
        assert!(matches!(path_integral(&s, &field(&[-1.0, 4.0]), &p), Err(Error::NegativeGradient(0))));
        let back = DiscretePath::new(&s, vec![1, 0, 1]).unwrap();
        assert_eq!(path_integral(&s, &field(&[1.0, 1.0]), &back).unwrap(), back.forward_length(&s));
        assert_eq!(back.forward_length(&s), 3.0);
        // (2^2 + 1^2) / 2
        assert_eq!(back.p_energy(&s, 2.0), 2.5);
    }

    #[test]
    fn three_cycle_family_size() {
        let s = FiniteAsymmSpace::from_matrix(vec![
            vec![0.0, 1.0, 2.0],
            vec![2.0, 0.0, 1.0],
            vec![1.0, 2.0, 0.0],
        ])
        .unwrap();
        let fam = generate_curves(&s, CurvePolicy::PathsUpToLength(2), 100).unwrap();
        assert_eq!(fam.paths.iter().filter(|p| p.num_edges() == 1).count(), 6);
        assert_eq!(fam.paths.iter().filter(|p| p.num_edges() == 2).count(), 6);
        assert!(matches!(generate_curves(&s, CurvePolicy::PathsUpToLength(2), 5), Err(Error::BudgetExceeded(5))));
        assert_eq!(generate_curves(&s, CurvePolicy::Edges, 100).unwrap().paths.len(), 6);
    }

    #[test]
    fn geodesics_on_path_graph_are_monotone() {
        let s = FiniteAsymmSpace::from_digraph(4, &[(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0), (2, 3, 1.0), (3, 2, 1.0)], None)
            .unwrap();
        let fam = generate_curves(&s, CurvePolicy::Geodesics, 100).unwrap();
        assert_eq!(fam.paths.len(), 12);
        for p in &fam.paths {
            let v = p.vertices();
            let inc = v.windows(2).all(|w| w[1] == w[0] + 1);
            let dec = v.windows(2).all(|w| w[0] == w[1] + 1);
            assert!(inc || dec, "{:?}", v);
        }
        let cut = FiniteAsymmSpace::from_digraph(2, &[(0, 1, 1.0)], None).unwrap();
        assert!(matches!(generate_curves(&cut, CurvePolicy::Geodesics, 100), Err(Error::Disconnected(1, 0))));
    }

    #[test]
    fn single_edge_weak_gradient() {
        let s = FiniteAsymmSpace::from_digraph(2, &[(0, 1, 1.0)], None).unwrap();
        let fam = generate_curves(&s, CurvePolicy::Edges, 10).unwrap();
        let g = minimal_weak_upper_gradient(&s, &field(&[0.0, 1.0]), &fam, 2.0, 1e-12).unwrap();
        assert!((g.field[0] - 1.0).abs() < 1e-10 && (g.field[1] - 1.0).abs() < 1e-10, "{:?}", g.field);
        let flat = minimal_weak_upper_gradient(&s, &field(&[2.0, 2.0]), &fam, 2.0, 1e-12).unwrap();
        assert_eq!(flat.field.values(), &[0.0, 0.0]);
        // steep data exercises the internal rescaling
        let steep = minimal_weak_upper_gradient(&s, &field(&[0.0, 3.0]), &fam, 3.0, 1e-12).unwrap();
        assert!((steep.field[0] - 3.0).abs() < 1e-9 && (steep.field[1] - 3.0).abs() < 1e-9, "{:?}", steep.field);
        for p in &fam.paths {
            assert!(path_integral(&s, &steep.field, p).unwrap() >= 3.0 - 1e-9);
        }
    }

    #[test]
    fn identities_on_two_points() {
        let s = two_point();
        let r = slope_identities_check(&s, &field(&[-1.0, 2.0]), &[(field(&[1.0, 0.0]), field(&[0.0, 3.0]))]).unwrap();
        assert!(r.holds, "{:?}", r);
    }

    #[test]
    fn split_identity_needs_a_common_maximizer() {
        // f(x) < 0 with the positive and negative rises won by different neighbors
        let s = FiniteAsymmSpace::from_digraph(3, &[(0, 1, 1.0), (0, 2, 0.05), (1, 0, 1.0), (2, 0, 0.05)], None).unwrap();
        let r = slope_identities_check(&s, &field(&[-1.0, 0.5, -0.9]), &[]).unwrap();
        assert_eq!(r.split_failures, vec![0]);
        assert!(r.split_upper_bound_holds);
        assert!(r.negation_error <= 1e-12);
    }
}
