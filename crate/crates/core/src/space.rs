//! Finite asymmetric metric measure spaces.
//!
//! A space is a set of `n` labelled points together with
//!
//! * an `n × n` distance matrix of extended reals (`+∞` allowed) that need
//!   not be symmetric,
//! * a strictly positive mass per point,
//! * a directed neighbor relation. Discrete slopes and curve families only
//!   look along neighbor edges, so locality is part of the input rather
//!   than something derived from the distances.
//!
//! Construction checks shapes only. Metric axioms are checked by
//! [`FiniteAsymmSpace::validate`], which reports violations as data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, ExtReal, Scalar};

/// Absolute tolerance on finite triangle inequalities.
pub const TRIANGLE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteAsymmSpace<T> {
    points: Vec<String>,
    dist: Vec<Vec<ExtReal<T>>>,
    measure: Vec<T>,
    neighbors: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NegativeDistance,
    NonzeroDiagonal,
    ZeroOffDiagonal,
    Triangle,
    NonpositiveMass,
    NeighborOutOfRange,
    NeighborAtInfinity,
    SelfNeighbor,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation<T> {
    pub kind: ViolationKind,
    pub indices: Vec<usize>,
    pub magnitude: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport<T> {
    pub ok: bool,
    pub violations: Vec<Violation<T>>,
}

impl<T> ValidationReport<T> {
    fn from_violations(violations: Vec<Violation<T>>) -> Self {
        ValidationReport { ok: violations.is_empty(), violations }
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallDirection {
    /// `{y : d(x, y) < r}`
    Forward,
    /// `{y : d(y, x) < r}`
    Backward,
}

impl<T: Scalar> FiniteAsymmSpace<T> {
    /// Builds a space after checking that all shapes agree with `points.len()`.
    ///
    /// Infinite diagonal entries are treated as absent and replaced by zero.
    pub fn new(
        points: Vec<String>,
        dist: Vec<Vec<ExtReal<T>>>,
        measure: Vec<T>,
        neighbors: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = points.len();
        if dist.len() != n {
            return Err(Error::Shape(format!("{} distance rows for {} points", dist.len(), n)));
        }
        if let Some((i, row)) = dist.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Shape(format!("distance row {} has {} entries, expected {}", i, row.len(), n)));
        }
        if measure.len() != n {
            return Err(Error::Shape(format!("{} masses for {} points", measure.len(), n)));
        }
        if neighbors.len() != n {
            return Err(Error::Shape(format!("{} neighbor lists for {} points", neighbors.len(), n)));
        }
        let mut dist = dist;
        for (i, row) in dist.iter_mut().enumerate() {
            if !row[i].is_finite() {
                row[i] = ExtReal::zero();
            }
        }
        Ok(FiniteAsymmSpace { points, dist, measure, neighbors })
    }

    /// Builds a space from a finite distance matrix with unit masses and
    /// every other point as a neighbor. Convenient for small examples.
    pub fn from_matrix(dist: Vec<Vec<T>>) -> Result<Self> {
        let n = dist.len();
        let dist: Vec<Vec<ExtReal<T>>> =
            dist.into_iter().map(|r| r.into_iter().map(ExtReal::new).collect()).collect();
        let neighbors = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && dist.get(i).map_or(false, |r| r.get(j).map_or(false, |d| d.is_finite()))).collect())
            .collect();
        Self::new(default_labels(n), dist, vec![T::one(); n], neighbors)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn dist(&self, i: usize, j: usize) -> ExtReal<T> {
        self.dist[i][j]
    }

    /// `d(i, j)` if finite.
    pub fn d(&self, i: usize, j: usize) -> Option<T> {
        self.dist[i][j].finite()
    }

    pub fn dist_matrix(&self) -> &[Vec<ExtReal<T>>] {
        &self.dist
    }

    pub fn measure(&self) -> &[T] {
        &self.measure
    }

    pub fn mass(&self, i: usize) -> T {
        self.measure[i]
    }

    pub fn total_mass(&self) -> T {
        self.measure.iter().copied().sum()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.neighbors[i].is_empty()
    }

    /// Neighbors of `i` with finite distance, paired with `d(i, j)`.
    pub fn neighbor_edges(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        self.neighbors[i].iter().filter_map(move |&j| self.d(i, j).map(|d| (j, d)))
    }

    /// Largest finite neighbor distance `max d(x, y)` over `y ∈ N(x)`.
    pub fn mesh_size(&self) -> T {
        (0..self.len())
            .flat_map(|i| self.neighbor_edges(i).map(|(_, d)| d))
            .fold(T::zero(), T::max)
    }

    /// Replaces the masses, keeping distances and neighbors.
    pub fn with_measure(mut self, measure: Vec<T>) -> Result<Self> {
        if measure.len() != self.len() {
            return Err(Error::Shape(format!("{} masses for {} points", measure.len(), self.len())));
        }
        self.measure = measure;
        Ok(self)
    }

    /// Replaces the neighbor relation.
    pub fn with_neighbors(mut self, neighbors: Vec<Vec<usize>>) -> Result<Self> {
        if neighbors.len() != self.len() {
            return Err(Error::Shape(format!("{} neighbor lists for {} points", neighbors.len(), self.len())));
        }
        self.neighbors = neighbors;
        Ok(self)
    }

    /// Checks the axioms of an asymmetric extended metric and the measure
    /// and neighbor invariants. Every violation is listed.
    pub fn validate(&self) -> ValidationReport<T> {
        let n = self.len();
        let tol: T = lit(TRIANGLE_TOL);
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                match self.dist[i][j] {
                    ExtReal::Finite(d) if d < T::zero() => out.push(Violation {
                        kind: ViolationKind::NegativeDistance,
                        indices: vec![i, j],
                        magnitude: d,
                    }),
                    ExtReal::Finite(d) if i == j && d != T::zero() => out.push(Violation {
                        kind: ViolationKind::NonzeroDiagonal,
                        indices: vec![i],
                        magnitude: d,
                    }),
                    ExtReal::Finite(d) if i != j && d == T::zero() => out.push(Violation {
                        kind: ViolationKind::ZeroOffDiagonal,
                        indices: vec![i, j],
                        magnitude: d,
                    }),
                    _ => {}
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let Some(dij) = self.d(i, j) else { continue };
                for k in 0..n {
                    let Some(djk) = self.d(j, k) else { continue };
                    let via = dij + djk;
                    let excess = match self.dist[i][k] {
                        ExtReal::Infinite => T::infinity(),
                        ExtReal::Finite(dik) => dik - via,
                    };
                    if excess > tol {
                        out.push(Violation { kind: ViolationKind::Triangle, indices: vec![i, j, k], magnitude: excess });
                    }
                }
            }
        }
        for (i, &m) in self.measure.iter().enumerate() {
            if !(m > T::zero()) || !m.is_finite() {
                out.push(Violation { kind: ViolationKind::NonpositiveMass, indices: vec![i], magnitude: m });
            }
        }
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb {
                if j >= n {
                    out.push(Violation {
                        kind: ViolationKind::NeighborOutOfRange,
                        indices: vec![i, j],
                        magnitude: T::zero(),
                    });
                } else if j == i {
                    out.push(Violation { kind: ViolationKind::SelfNeighbor, indices: vec![i], magnitude: T::zero() });
                } else if !self.dist[i][j].is_finite() {
                    out.push(Violation {
                        kind: ViolationKind::NeighborAtInfinity,
                        indices: vec![i, j],
                        magnitude: T::infinity(),
                    });
                }
            }
        }
        ValidationReport::from_violations(out)
    }

    /// Reversibility `λ_d(A) = sup_{x≠y ∈ A} d(x,y) / d(y,x)`, at least 1.
    ///
    /// `∞/∞` counts as 1 and a finite-over-infinite ratio as 0, matching
    /// `d(x,y) ≤ λ d(y,x)` with the usual extended arithmetic.
    pub fn reversibility(&self, subset: &[usize]) -> Result<ExtReal<T>> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut best = ExtReal::Finite(T::one());
        for &x in subset {
            for &y in subset {
                if x == y {
                    continue;
                }
                let ratio = match (self.dist[x][y], self.dist[y][x]) {
                    (ExtReal::Infinite, ExtReal::Infinite) => ExtReal::Finite(T::one()),
                    (ExtReal::Infinite, ExtReal::Finite(_)) => ExtReal::Infinite,
                    (ExtReal::Finite(_), ExtReal::Infinite) => ExtReal::Finite(T::zero()),
                    (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                        if b == T::zero() {
                            ExtReal::Infinite
                        } else {
                            ExtReal::new(a / b)
                        }
                    }
                };
                best = best.max(ratio);
            }
        }
        Ok(best)
    }

    /// Reversibility of the whole space.
    pub fn total_reversibility(&self) -> ExtReal<T> {
        let all: Vec<usize> = (0..self.len()).collect();
        if all.is_empty() {
            return ExtReal::Finite(T::one());
        }
        self.reversibility(&all).expect("nonempty")
    }

    /// The reverse metric `d'(x, y) = d(y, x)` with reversed neighbor edges.
    pub fn reverse(&self) -> Self {
        let n = self.len();
        let dist = (0..n).map(|i| (0..n).map(|j| self.dist[j][i]).collect()).collect();
        let mut neighbors = vec![Vec::new(); n];
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb {
                neighbors[j].push(i);
            }
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        FiniteAsymmSpace { points: self.points.clone(), dist, measure: self.measure.clone(), neighbors }
    }

    /// The symmetrized metric `(d(x,y) + d(y,x)) / 2`, `∞` absorbing.
    pub fn symmetrize(&self) -> Self {
        let n = self.len();
        let half: T = lit(0.5);
        let dist = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match self.dist[i][j] + self.dist[j][i] {
                        ExtReal::Finite(s) => ExtReal::Finite(s * half),
                        ExtReal::Infinite => ExtReal::Infinite,
                    })
                    .collect()
            })
            .collect();
        FiniteAsymmSpace {
            points: self.points.clone(),
            dist,
            measure: self.measure.clone(),
            neighbors: self.neighbors.clone(),
        }
    }

    /// Open ball around `center`; the center is always included.
    pub fn ball(&self, center: usize, radius: ExtReal<T>, direction: BallDirection) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| {
                if y == center {
                    return true;
                }
                let d = match direction {
                    BallDirection::Forward => self.dist[center][y],
                    BallDirection::Backward => self.dist[y][center],
                };
                match radius {
                    ExtReal::Infinite => d.is_finite(),
                    ExtReal::Finite(_) => d < radius,
                }
            })
            .collect()
    }

    /// Shortest-path space of a weighted digraph on `n` vertices.
    ///
    /// Neighbors of a vertex are the heads of its outgoing edges. Masses
    /// default to 1.
    pub fn from_digraph(n: usize, edges: &[(usize, usize, T)], measure: Option<Vec<T>>) -> Result<Self> {
        let mut dist = vec![vec![ExtReal::Infinite; n]; n];
        let mut neighbors = vec![Vec::new(); n];
        for (i, row) in dist.iter_mut().enumerate() {
            row[i] = ExtReal::zero();
        }
        for &(a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::Shape(format!("edge {}->{} outside 0..{}", a, b, n)));
            }
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::NegativeWeight { tail: a, head: b, weight: w.to_f64().unwrap_or(f64::NAN) });
            }
            if a == b {
                continue;
            }
            if ExtReal::Finite(w) < dist[a][b] {
                dist[a][b] = ExtReal::Finite(w);
            }
            neighbors[a].push(b);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
            nb.dedup();
        }
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i][k];
                if !dik.is_finite() {
                    continue;
                }
                for j in 0..n {
                    let via = dik + dist[k][j];
                    if via < dist[i][j] {
                        dist[i][j] = via;
                    }
                }
            }
        }
        let measure = measure.unwrap_or_else(|| vec![T::one(); n]);
        Self::new(default_labels(n), dist, measure, neighbors)
    }

    /// Parses the JSON space file format (see [`SpaceFile`]).
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: SpaceFile = serde_json::from_str(s)?;
        file.into_space()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&SpaceFile::from_space(self)).expect("space serializes")
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{}", i)).collect()
}

/// On-disk JSON form of a space.
///
/// ```json
/// {"points": ["a", "b"],
///  "dist": [[0, 1], [2, null]],
///  "measure": [1, 1],
///  "neighbors": [[1], [0]]}
/// ```
///
/// `null` is `+∞`. `measure` defaults to unit masses and `neighbors` to all
/// points at finite distance. Ragged rows are rejected.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub dist: Vec<Vec<Option<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbors: Option<Vec<Vec<usize>>>,
}

impl SpaceFile {
    pub fn into_space<T: Scalar>(self) -> Result<FiniteAsymmSpace<T>> {
        let n = self.points.len();
        let conv = |x: f64| -> Result<T> { T::from_f64(x).ok_or_else(|| Error::Parse(format!("bad number {}", x))) };
        let mut dist = Vec::with_capacity(self.dist.len());
        for (i, row) in self.dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!("distance row {} has {} entries, expected {}", i, row.len(), n)));
            }
            let mut out = Vec::with_capacity(n);
            for v in row {
                out.push(match v {
                    None => ExtReal::Infinite,
                    Some(x) => ExtReal::new(conv(*x)?),
                });
            }
            dist.push(out);
        }
        let measure = match self.measure {
            Some(m) => m.into_iter().map(conv).collect::<Result<Vec<T>>>()?,
            None => vec![T::one(); n],
        };
        let neighbors = match self.neighbors {
            Some(nb) => nb,
            None => (0..n)
                .map(|i| (0..n).filter(|&j| j != i && dist.get(i).map_or(false, |r: &Vec<ExtReal<T>>| r[j].is_finite())).collect())
                .collect(),
        };
        FiniteAsymmSpace::new(self.points, dist, measure, neighbors)
    }

    pub fn from_space<T: Scalar>(space: &FiniteAsymmSpace<T>) -> Self {
        SpaceFile {
            points: space.points.clone(),
            dist: space
                .dist
                .iter()
                .map(|r| r.iter().map(|d| d.finite().map(|x| x.to_f64().unwrap())).collect())
                .collect(),
            measure: Some(space.measure.iter().map(|m| m.to_f64().unwrap()).collect()),
            neighbors: Some(space.neighbors.clone()),
        }
    }
}
