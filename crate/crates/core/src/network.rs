//! Leader-follower communication topology and its spectral quantities.
//!
//! Followers talk over an undirected, unweighted, connected graph. The
//! single leader broadcasts one-way to a non-empty subset of followers. The
//! interaction matrix `H = L_f + B` (follower Laplacian plus the diagonal
//! leader-incidence matrix) is then symmetric positive definite, and its
//! smallest eigenvalue bounds the admissible consensus gain from below.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result, TopologyError};
use crate::math::{abs, sqrt};

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Builds a matrix from rows. Panics if the rows are ragged or not square.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend_from_slice(row);
        }
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `x^T M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.data.iter().map(|v| v * v).sum())
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)] * self[(i, j)];
                }
            }
        }
        sqrt(s)
    }

    /// First asymmetric entry, if any, beyond `tol`.
    fn asymmetry(&self, tol: f64) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if abs(self[(i, j)] - self[(j, i)]) > tol {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Follower graph plus the leader's broadcast set. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NetworkTopology {
    n_followers: usize,
    follower_edges: Vec<(usize, usize)>,
    leader_targets: Vec<usize>,
}

impl NetworkTopology {
    /// Validates and normalizes a topology: edges are stored as `(min, max)`
    /// pairs and both lists are sorted.
    pub fn new(
        n_followers: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        leader_targets: impl IntoIterator<Item = usize>,
    ) -> Result<Self, TopologyError> {
        if n_followers == 0 {
            return Err(TopologyError::NoFollowers);
        }
        let check = |index: usize| {
            if index >= n_followers {
                Err(TopologyError::IndexOutOfRange { index, n_followers })
            } else {
                Ok(())
            }
        };

        let mut follower_edges = Vec::new();
        for (a, b) in edges {
            check(a)?;
            check(b)?;
            if a == b {
                return Err(TopologyError::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if follower_edges.contains(&e) {
                return Err(TopologyError::DuplicateEdge(e.0, e.1));
            }
            follower_edges.push(e);
        }
        follower_edges.sort_unstable();

        let mut targets = Vec::new();
        for t in leader_targets {
            check(t)?;
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        if targets.is_empty() {
            return Err(TopologyError::NoLeaderTarget);
        }
        targets.sort_unstable();

        let topo = NetworkTopology {
            n_followers,
            follower_edges,
            leader_targets: targets,
        };
        if !topo.is_connected() {
            return Err(TopologyError::Disconnected);
        }
        Ok(topo)
    }

    pub fn n_followers(&self) -> usize {
        self.n_followers
    }

    pub fn follower_edges(&self) -> &[(usize, usize)] {
        &self.follower_edges
    }

    pub fn leader_targets(&self) -> &[usize] {
        &self.leader_targets
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.follower_edges.iter().filter_map(move |&(a, b)| {
            if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            }
        })
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n_followers];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in self.neighbors(i) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.iter().all(|s| *s)
    }
}

/// `H = L_f + B` together with its smallest eigenvalue.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InteractionMatrix {
    pub h: Matrix,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl InteractionMatrix {
    pub fn dim(&self) -> usize {
        self.h.dim()
    }
}

/// Follower graph Laplacian: degrees on the diagonal, -1 per edge.
pub fn build_laplacian(topology: &NetworkTopology) -> Matrix {
    let mut l = Matrix::zeros(topology.n_followers());
    for &(a, b) in topology.follower_edges() {
        l[(a, b)] = -1.0;
        l[(b, a)] = -1.0;
        l[(a, a)] += 1.0;
        l[(b, b)] += 1.0;
    }
    l
}

pub fn build_interaction_matrix(topology: &NetworkTopology) -> Result<InteractionMatrix> {
    let mut h = build_laplacian(topology);
    for &i in topology.leader_targets() {
        h[(i, i)] += 1.0;
    }
    let values = eigensolve(&h)?;
    Ok(InteractionMatrix {
        h,
        lambda_min: values[0],
        lambda_max: values[values.len() - 1],
    })
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: Matrix,
    pub sweeps: usize,
}

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Sorted eigenvalues of a symmetric matrix.
pub fn eigensolve(m: &Matrix) -> Result<Vec<f64>> {
    symmetric_eigen(m).map(|e| e.values)
}

/// Cyclic Jacobi rotations until the off-diagonal norm drops below
/// `1e-12 * ||m||_F`.
pub fn symmetric_eigen(m: &Matrix) -> Result<SymmetricEigen> {
    let n = m.dim();
    let scale = m.frobenius_norm();
    if let Some((row, col)) = m.asymmetry(1e-12 * scale.max(1.0)) {
        return Err(Error::NotSymmetric { row, col });
    }

    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let mut sweeps = 0;
    while sweeps < JACOBI_MAX_SWEEPS && a.off_diagonal_norm() > JACOBI_TOL * scale {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, col)] = v[(k, src)];
        }
    }
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}
