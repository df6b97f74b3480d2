//! Closed-form Finsler model metrics.
//!
//! All three models are Randers norms `F(x, v) = |v|_{M(x)} + ⟨β(x), v⟩`:
//!
//! * Randers on `ℝⁿ`: Euclidean norm plus the constant drift `v₁ / 2`.
//! * Funk on the open unit ball.
//! * The interpolation `F_α = K + α L` on the unit ball, where `K` is the
//!   Klein (Cayley–Klein) metric and `L(x, v) = ⟨x, v⟩ / (1 − |x|²)` is the
//!   differential of `φ(x) = −½ log(1 − |x|²)`. Funk is `α = 1`.
//!
//! Because `L` is exact, `d_α(a, b) = d_K(a, b) + α (φ(b) − φ(a))` and
//! straight segments stay geodesic for every `α`. The dual norm of a Randers
//! norm is again of Randers form and is evaluated in closed form; a
//! numerical sphere maximization is kept alongside as a cross-check.

use crate::error::{Error, Result};
use crate::scalar::{lit, ExtReal, Scalar};
use crate::space::{default_labels, FiniteAsymmSpace};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FinslerModel<T> {
    Funk { dim: usize },
    Randers { dim: usize },
    Interp { dim: usize, alpha: T },
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a)
}

fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

fn in_ball<T: Scalar>(x: &[T]) -> bool {
    norm2(x) < T::one()
}

/// Funk distance on the open unit ball, evaluated from its closed form.
pub fn funk_distance<T: Scalar>(x1: &[T], x2: &[T]) -> Result<T> {
    if !in_ball(x1) {
        return Err(Error::OutOfDomain(0));
    }
    if !in_ball(x2) {
        return Err(Error::OutOfDomain(1));
    }
    if x1 == x2 {
        return Ok(T::zero());
    }
    let diff = sub(x2, x1);
    let cross = norm2(x1) * norm2(x2) - dot(x1, x2).powi(2);
    let root = (norm2(&diff) - cross).max(T::zero()).sqrt();
    let num = root - dot(x1, &diff);
    let den = root - dot(x2, &diff);
    Ok((num / den).ln())
}

/// Randers distance `|y − x| + (y₁ − x₁) / 2`.
pub fn randers_distance<T: Scalar>(x: &[T], y: &[T]) -> T {
    let diff = sub(y, x);
    norm2(&diff).sqrt() + diff.first().copied().unwrap_or_else(T::zero) * lit(0.5)
}

/// Klein (projective hyperbolic) distance on the unit ball,
/// `½ log` of the cross ratio with the two boundary points of the chord.
pub fn klein_distance<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if !in_ball(a) {
        return Err(Error::OutOfDomain(0));
    }
    if !in_ball(b) {
        return Err(Error::OutOfDomain(1));
    }
    if a == b {
        return Ok(T::zero());
    }
    // chord a + s (b - a); |a + s u|^2 = 1
    let u = sub(b, a);
    let uu = norm2(&u);
    let au = dot(a, &u);
    let c = norm2(a) - T::one();
    let disc = (au * au - uu * c).sqrt();
    // roots s_- < 0 < 1 < s_+, computed without cancellation
    let (s_minus, s_plus) = if au >= T::zero() {
        let q = -(au + disc);
        (q / uu, c / q)
    } else {
        let q = disc - au;
        (c / q, q / uu)
    };
    let half: T = lit(0.5);
    Ok(half * ((s_plus * (T::one() - s_minus)) / ((-s_minus) * (s_plus - T::one()))).ln())
}

/// Potential of the exact form `⟨x, v⟩ / (1 − |x|²)`.
fn ball_potential<T: Scalar>(x: &[T]) -> T {
    -lit::<T>(0.5) * (-norm2(x)).ln_1p()
}

impl<T: Scalar> FinslerModel<T> {
    pub fn dim(&self) -> usize {
        match *self {
            FinslerModel::Funk { dim } | FinslerModel::Randers { dim } | FinslerModel::Interp { dim, .. } => dim,
        }
    }

    fn alpha(&self) -> Option<T> {
        match *self {
            FinslerModel::Funk { .. } => Some(T::one()),
            FinslerModel::Interp { alpha, .. } => Some(alpha),
            FinslerModel::Randers { .. } => None,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if let Some(a) = self.alpha() {
            if !(a >= T::zero() && a <= T::one()) {
                return Err(Error::InvalidInput(format!("alpha {} outside [0, 1]", a)));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x.iter().all(|v| v.is_finite())
            && match self {
                FinslerModel::Randers { .. } => true,
                _ => in_ball(x),
            }
    }

    /// The Finsler norm `F(x, v)`.
    pub fn norm(&self, x: &[T], v: &[T]) -> Result<T> {
        if !self.contains(x) {
            return Err(Error::OutOfDomain(0));
        }
        Ok(match self.alpha() {
            None => norm2(v).sqrt() + v[0] * lit(0.5),
            Some(alpha) => {
                let c = T::one() - norm2(x);
                let xv = dot(x, v);
                let k = (norm2(v) * c + xv * xv).max(T::zero()).sqrt() / c;
                k + alpha * xv / c
            }
        })
    }

    /// Distance between two points of the model.
    pub fn distance(&self, a: &[T], b: &[T]) -> Result<T> {
        if !self.contains(a) {
            return Err(Error::OutOfDomain(0));
        }
        if !self.contains(b) {
            return Err(Error::OutOfDomain(1));
        }
        match *self {
            FinslerModel::Randers { .. } => Ok(randers_distance(a, b)),
            FinslerModel::Funk { .. } => funk_distance(a, b),
            FinslerModel::Interp { alpha, .. } => {
                Ok(klein_distance(a, b)? + alpha * (ball_potential(b) - ball_potential(a)))
            }
        }
    }

    /// Dual norm `F*(x, ξ) = sup { ξ(v) : F(x, v) ≤ 1 }` in closed form.
    pub fn dual_norm(&self, x: &[T], xi: &[T]) -> Result<T> {
        if !self.contains(x) {
            return Err(Error::OutOfDomain(0));
        }
        // (|ξ|²_{M⁻¹}, ⟨β, ξ⟩_{M⁻¹}, |β|²_{M⁻¹})
        let (xi_sq, beta_xi, beta_sq) = match self.alpha() {
            None => (norm2(xi), xi[0] * lit(0.5), lit(0.25)),
            Some(alpha) => {
                let c = T::one() - norm2(x);
                let xxi = dot(x, xi);
                (c * (norm2(xi) - xxi * xxi), alpha * c * xxi, alpha * alpha * norm2(x))
            }
        };
        let one_minus = T::one() - beta_sq;
        let root = (one_minus * xi_sq + beta_xi * beta_xi).max(T::zero()).sqrt();
        Ok((root - beta_xi) / one_minus)
    }

    /// Dual norm by direct maximization of `ξ(v) / F(x, v)` over unit
    /// directions: golden-section search on the circle for `n = 2`, projected
    /// gradient ascent on the sphere for `n ≥ 3`.
    pub fn dual_norm_numeric(&self, x: &[T], xi: &[T], tol: T) -> Result<T> {
        let n = self.dim();
        if xi.iter().all(|v| *v == T::zero()) {
            return Ok(T::zero());
        }
        let ratio = |v: &[T]| -> Result<T> { Ok(dot(xi, v) / self.norm(x, v)?) };
        match n {
            1 => Ok(ratio(&[T::one()])?.max(ratio(&[-T::one()])?).max(T::zero())),
            2 => {
                let at = |theta: T| ratio(&[theta.cos(), theta.sin()]);
                let samples = 720;
                let two_pi: T = lit(std::f64::consts::TAU);
                let step = two_pi / lit(samples as f64);
                let mut best = (T::neg_infinity(), T::zero());
                for k in 0..samples {
                    let th = step * lit(k as f64);
                    let v = at(th)?;
                    if v > best.0 {
                        best = (v, th);
                    }
                }
                let (mut lo, mut hi) = (best.1 - step, best.1 + step);
                let g: T = lit(0.5 * (5f64.sqrt() - 1.0));
                let mut c = hi - g * (hi - lo);
                let mut d = lo + g * (hi - lo);
                let (mut fc, mut fd) = (at(c)?, at(d)?);
                let bracket_tol = tol.max(lit(1e-15));
                while hi - lo > bracket_tol {
                    if fc > fd {
                        hi = d;
                        d = c;
                        fd = fc;
                        c = hi - g * (hi - lo);
                        fc = at(c)?;
                    } else {
                        lo = c;
                        c = d;
                        fc = fd;
                        d = lo + g * (hi - lo);
                        fd = at(d)?;
                    }
                }
                Ok(best.0.max(fc).max(fd))
            }
            _ => {
                let mut starts: Vec<Vec<T>> = Vec::new();
                let xin = norm2(xi).sqrt();
                starts.push(xi.iter().map(|&v| v / xin).collect());
                for i in 0..n {
                    for s in [T::one(), -T::one()] {
                        let mut e = vec![T::zero(); n];
                        e[i] = s;
                        starts.push(e);
                    }
                }
                let mut best = T::neg_infinity();
                for mut v in starts {
                    let mut val = ratio(&v)?;
                    let mut step: T = lit(0.5);
                    for _ in 0..10_000 {
                        // numerical gradient of the degree-0 ratio, projected to the tangent space
                        let h: T = lit(1e-7);
                        let mut grad = vec![T::zero(); n];
                        for i in 0..n {
                            let mut vp = v.clone();
                            vp[i] = vp[i] + h;
                            let mut vm = v.clone();
                            vm[i] = vm[i] - h;
                            grad[i] = (ratio(&vp)? - ratio(&vm)?) / (h + h);
                        }
                        let radial = dot(&grad, &v);
                        for i in 0..n {
                            grad[i] = grad[i] - radial * v[i];
                        }
                        if norm2(&grad).sqrt() < tol {
                            break;
                        }
                        loop {
                            let mut cand: Vec<T> = v.iter().zip(&grad).map(|(&a, &g)| a + step * g).collect();
                            let cn = norm2(&cand).sqrt();
                            cand.iter_mut().for_each(|c| *c = *c / cn);
                            let cv = ratio(&cand)?;
                            if cv > val {
                                v = cand;
                                val = cv;
                                step = step * lit(1.5);
                                break;
                            }
                            step = step * lit(0.5);
                            if step < lit(1e-14) {
                                break;
                            }
                        }
                        if step < lit(1e-14) {
                            break;
                        }
                    }
                    best = best.max(val);
                }
                Ok(best.max(T::zero()))
            }
        }
    }

    /// Ascending and descending slopes `(F*(x, df), F*(x, −df))` of a
    /// differentiable function with differential `df` at `x`.
    pub fn slopes(&self, x: &[T], df: &[T]) -> Result<(T, T)> {
        let neg: Vec<T> = df.iter().map(|&v| -v).collect();
        Ok((self.dual_norm(x, df)?, self.dual_norm(x, &neg)?))
    }
}

/// Ascending and descending slopes of a differentiable function in a model.
pub fn finsler_slopes<T: Scalar>(model: &FinslerModel<T>, x: &[T], df: &[T]) -> Result<(T, T)> {
    model.slopes(x, df)
}

fn check_points<T: Scalar>(model: &FinslerModel<T>, points: &[Vec<T>]) -> Result<()> {
    model.check()?;
    for (i, p) in points.iter().enumerate() {
        if !model.contains(p) {
            return Err(Error::OutOfDomain(i));
        }
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(Error::DuplicatePoint(i, j));
            }
        }
    }
    Ok(())
}

fn model_distances<T: Scalar>(model: &FinslerModel<T>, points: &[Vec<T>]) -> Result<Vec<Vec<ExtReal<T>>>> {
    let n = points.len();
    let mut dist = vec![vec![ExtReal::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                dist[i][j] = ExtReal::Finite(model.distance(&points[i], &points[j])?);
            }
        }
    }
    Ok(dist)
}

/// Samples a model on the given points.
///
/// Neighbors of `i` are its `k` nearest points under the symmetrized
/// distance (ties broken by index), made bidirectional. Masses come from
/// `density` evaluated at each point, or are 1.
pub fn sample_space<T: Scalar>(
    model: &FinslerModel<T>,
    points: &[Vec<T>],
    k: usize,
    density: Option<&dyn Fn(&[T]) -> T>,
) -> Result<FiniteAsymmSpace<T>> {
    if k == 0 {
        return Err(Error::InvalidInput("neighbor count must be at least 1".into()));
    }
    check_points(model, points)?;
    let n = points.len();
    let dist = model_distances(model, points)?;
    let mut neighbors = vec![Vec::new(); n];
    for i in 0..n {
        let mut order: Vec<(T, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| ((dist[i][j].to_float() + dist[j][i].to_float()) * lit(0.5), j))
            .collect();
        order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for &(_, j) in order.iter().take(k) {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
    }
    for nb in &mut neighbors {
        nb.sort_unstable();
        nb.dedup();
    }
    let measure = points.iter().map(|p| density.map_or(T::one(), |f| f(p))).collect();
    FiniteAsymmSpace::new(default_labels(n), dist, measure, neighbors)
}

/// A regular lattice sampled from a model, with axis neighbors.
#[derive(Clone, Debug)]
pub struct Lattice<T> {
    pub space: FiniteAsymmSpace<T>,
    pub coords: Vec<Vec<T>>,
    /// Lattice multi-index of every retained point.
    pub index: Vec<Vec<usize>>,
}

impl<T: Scalar> Lattice<T> {
    /// Points whose two axis neighbors along `axis` are both present.
    pub fn interior_along(&self, axis: usize) -> Vec<usize> {
        (0..self.coords.len())
            .filter(|&i| {
                let (mut lo, mut hi) = (false, false);
                for &j in self.space.neighbors(i) {
                    let diff: Vec<i64> =
                        self.index[j].iter().zip(&self.index[i]).map(|(&a, &b)| a as i64 - b as i64).collect();
                    if diff.iter().enumerate().all(|(k, &d)| if k == axis { d.abs() == 1 } else { d == 0 }) {
                        if diff[axis] < 0 {
                            lo = true;
                        } else {
                            hi = true;
                        }
                    }
                }
                lo && hi
            })
            .collect()
    }
}

/// Samples `origin + spacing · i` for every multi-index `i < counts`,
/// keeping points inside the model domain and, when given, with Euclidean
/// norm at most `max_radius`. Neighbors are the retained lattice points one
/// step away along a coordinate axis; masses are `spacing^n`.
pub fn lattice_space<T: Scalar>(
    model: &FinslerModel<T>,
    origin: &[T],
    spacing: T,
    counts: &[usize],
    max_radius: Option<T>,
) -> Result<Lattice<T>> {
    model.check()?;
    let dim = model.dim();
    if origin.len() != dim || counts.len() != dim {
        return Err(Error::Shape(format!("lattice of dimension {} for a {}-dimensional model", counts.len(), dim)));
    }
    if !(spacing > T::zero()) {
        return Err(Error::InvalidInput("lattice spacing must be positive".into()));
    }
    let total: usize = counts.iter().product();
    let mut coords = Vec::new();
    let mut index = Vec::new();
    let mut lookup = vec![usize::MAX; total];
    for flat in 0..total {
        let mut rem = flat;
        let mut idx = vec![0; dim];
        for a in (0..dim).rev() {
            idx[a] = rem % counts[a];
            rem /= counts[a];
        }
        let p: Vec<T> = idx.iter().zip(origin).map(|(&i, &o)| o + spacing * lit(i as f64)).collect();
        let inside = model.contains(&p) && max_radius.map_or(true, |r| norm2(&p).sqrt() <= r);
        if inside {
            lookup[flat] = coords.len();
            coords.push(p);
            index.push(idx);
        }
    }
    let n = coords.len();
    let dist = model_distances(model, &coords)?;
    let mut neighbors = vec![Vec::new(); n];
    for (i, idx) in index.iter().enumerate() {
        for a in 0..dim {
            for step in [-1i64, 1] {
                let c = idx[a] as i64 + step;
                if c < 0 || c >= counts[a] as i64 {
                    continue;
                }
                let mut other = idx.clone();
                other[a] = c as usize;
                let flat = other.iter().zip(counts).fold(0, |acc, (&i, &c)| acc * c + i);
                if lookup[flat] != usize::MAX {
                    neighbors[i].push(lookup[flat]);
                }
            }
        }
        neighbors[i].sort_unstable();
    }
    let cell = spacing.powi(dim as i32);
    let space = FiniteAsymmSpace::new(default_labels(n), dist, vec![cell; n], neighbors)?;
    Ok(Lattice { space, coords, index })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaCheck<T> {
    pub holds: bool,
    pub sup_ratio: T,
    pub bound: T,
    /// Number of samples inside the forward ball `B⁺₀(r)`.
    pub in_ball: usize,
}

/// Checks that the reversibility over sampled pairs inside the forward Funk
/// ball `B⁺₀(r)` stays below `Θ₀(r) = 2eʳ − 1`.
pub fn funk_theta_bound_check<T: Scalar>(samples: &[Vec<T>], r: T) -> Result<ThetaCheck<T>> {
    let origin = vec![T::zero(); samples.first().map_or(1, |s| s.len())];
    let mut inside = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        let d = funk_distance(&origin, s).map_err(|_| Error::OutOfDomain(i))?;
        if d < r {
            inside.push(s);
        }
    }
    let mut sup = T::one();
    for a in &inside {
        for b in &inside {
            if a == b {
                continue;
            }
            let ratio = funk_distance(a, b)? / funk_distance(b, a)?;
            sup = sup.max(ratio);
        }
    }
    let bound = lit::<T>(2.0) * r.exp() - T::one();
    Ok(ThetaCheck { holds: sup <= bound, sup_ratio: sup, bound, in_ball: inside.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn funk_radial_values() {
        let o = [0.0, 0.0];
        let x = [0.5, 0.0];
        assert!((funk_distance(&o, &x).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((funk_distance(&x, &o).unwrap() - 1.5f64.ln()).abs() < 1e-15);
        assert_eq!(funk_distance(&x, &x).unwrap(), 0.0);
        assert!(matches!(funk_distance(&o, &[1.0, 0.0]), Err(Error::OutOfDomain(1))));
    }

    #[test]
    fn randers_values() {
        assert_eq!(randers_distance(&[0.0, 0.0], &[1.0, 0.0]), 1.5);
        assert_eq!(randers_distance(&[1.0, 0.0], &[0.0, 0.0]), 0.5);
        assert_eq!(randers_distance(&[0.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_eq!(randers_distance(&[0.0, 1.0], &[0.0, 0.0]), 1.0);
        assert_eq!(randers_distance(&[0.3, 0.2], &[0.3, 0.2]), 0.0);
    }

    #[test]
    fn interp_endpoint_is_funk() {
        let m = FinslerModel::Interp { dim: 2, alpha: 1.0 };
        let a = [0.3f64, -0.2];
        let b = [-0.1, 0.6];
        let d1 = m.distance(&a, &b).unwrap();
        assert!((d1 - funk_distance(&a, &b).unwrap()).abs() < 1e-13);
        let d2 = m.distance(&b, &a).unwrap();
        assert!((d2 - funk_distance(&b, &a).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn klein_is_symmetric() {
        let a = [0.3f64, -0.2];
        let b = [-0.1, 0.6];
        let dab = klein_distance(&a, &b).unwrap();
        assert!((dab - klein_distance(&b, &a).unwrap()).abs() < 1e-14);
        // along a diameter from the origin: atanh(r)
        let r: f64 = 0.7;
        assert!((klein_distance(&[0.0], &[r]).unwrap() - r.atanh()).abs() < 1e-14);
    }

    #[test]
    fn randers_slopes_closed_form() {
        let m = FinslerModel::<f64>::Randers { dim: 2 };
        let (up, down) = m.slopes(&[0.4, -1.0], &[1.0, 0.0]).unwrap();
        assert!((up - 2.0 / 3.0).abs() < 1e-15);
        assert!((down - 2.0).abs() < 1e-15);
        assert_eq!(m.slopes(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn funk_slopes_euclidean_at_origin() {
        let m = FinslerModel::<f64>::Funk { dim: 2 };
        let df = [0.3, -0.4];
        let (up, down) = m.slopes(&[0.0, 0.0], &df).unwrap();
        assert!((up - 0.5).abs() < 1e-15 && (down - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dual_norm_matches_numeric() {
        for model in [
            FinslerModel::<f64>::Funk { dim: 2 },
            FinslerModel::Randers { dim: 2 },
            FinslerModel::Interp { dim: 2, alpha: 0.4 },
        ] {
            for (x, xi) in [([0.2, 0.5], [1.0, -0.3]), ([-0.6, 0.1], [0.2, 0.9]), ([0.0, 0.0], [-1.0, 0.0])] {
                let a = model.dual_norm(&x, &xi).unwrap();
                let b = model.dual_norm_numeric(&x, &xi, 1e-12).unwrap();
                assert!((a - b).abs() < 1e-10, "{:?} {} {}", model, a, b);
            }
        }
        let m3 = FinslerModel::<f64>::Funk { dim: 3 };
        let x = [0.1, -0.3, 0.4];
        let xi = [0.5, 0.2, -0.7];
        let a = m3.dual_norm(&x, &xi).unwrap();
        let b = m3.dual_norm_numeric(&x, &xi, 1e-12).unwrap();
        assert!((a - b).abs() < 1e-9, "{} {}", a, b);
    }

    #[test]
    fn sample_two_funk_points() {
        let m = FinslerModel::<f64>::Funk { dim: 1 };
        let s = sample_space(&m, &[vec![0.0], vec![0.5]], 1, None).unwrap();
        assert!((s.d(0, 1).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((s.d(1, 0).unwrap() - 1.5f64.ln()).abs() < 1e-15);
        assert_eq!(s.neighbors(0), &[1]);
        assert_eq!(s.neighbors(1), &[0]);
        let single = sample_space(&m, &[vec![0.1]], 3, None).unwrap();
        assert_eq!(single.d(0, 0), Some(0.0));
        assert!(matches!(sample_space(&m, &[vec![0.1], vec![0.1]], 1, None), Err(Error::DuplicatePoint(0, 1))));
        assert!(matches!(sample_space(&m, &[vec![1.1]], 1, None), Err(Error::OutOfDomain(0))));
    }

    #[test]
    fn randers_lattice_axis_steps() {
        let m = FinslerModel::<f64>::Randers { dim: 2 };
        let h = 0.25;
        let lat = lattice_space(&m, &[0.0, 0.0], h, &[3, 3], None).unwrap();
        // center point (1,1) -> index 4
        let c = 4;
        assert_eq!(lat.space.neighbors(c), &[1, 3, 5, 7]);
        assert!((lat.space.d(c, 7).unwrap() - 1.5 * h).abs() < 1e-15);
        assert!((lat.space.d(c, 1).unwrap() - 0.5 * h).abs() < 1e-15);
        assert!((lat.space.d(c, 5).unwrap() - h).abs() < 1e-15);
        assert_eq!(lat.interior_along(0), vec![3, 4, 5]);
    }

    #[test]
    fn theta_bound_trivial_cases() {
        let single = funk_theta_bound_check(&[vec![0.01, 0.0]], 0.1).unwrap();
        assert!(single.holds);
        assert_eq!(single.sup_ratio, 1.0);
    }
}
