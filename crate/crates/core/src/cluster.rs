//! Galois-stable packets of closed points of the projective line.
//!
//! A finite cluster is a monic squarefree polynomial standing for the set of
//! its roots; it is never factored. All invariants in this crate depend only
//! on orders of vanishing along clusters, and a gcd-free basis is enough to
//! make different supports comparable.

use std::fmt;

use crate::error::{Error, Result};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointCluster {
    /// The point at infinity, `z = 1/0`. Sorts before every finite cluster.
    Infinity,
    Finite(Poly),
}

impl PointCluster {
    /// Builds a finite cluster, normalising to a monic polynomial.
    pub fn finite(p: Poly) -> Result<Self> {
        if p.is_zero() || p.is_constant() {
            return Err(Error::InvalidCluster(format!(
                "'{p}' has degree 0"
            )));
        }
        let p = p.monic();
        if !p.is_squarefree() {
            return Err(Error::InvalidCluster(format!("'{p}' is not squarefree")));
        }
        Ok(PointCluster::Finite(p))
    }

    /// The rational point `z = a`.
    pub fn point(a: crate::rational::Rational) -> Self {
        PointCluster::Finite(Poly::linear(a))
    }

    /// The point `z = 0`.
    pub fn zero() -> Self {
        PointCluster::Finite(Poly::z())
    }

    pub fn degree(&self) -> usize {
        match self {
            PointCluster::Infinity => 1,
            PointCluster::Finite(p) => p.deg(),
        }
    }

    pub fn poly(&self) -> Option<&Poly> {
        match self {
            PointCluster::Infinity => None,
            PointCluster::Finite(p) => Some(p),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, PointCluster::Infinity)
    }

    pub fn is_coprime(&self, other: &PointCluster) -> bool {
        match (self, other) {
            (PointCluster::Infinity, PointCluster::Infinity) => false,
            (PointCluster::Finite(a), PointCluster::Finite(b)) => a.is_coprime(b),
            _ => true,
        }
    }

    /// True when every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &PointCluster) -> bool {
        match (self, other) {
            (PointCluster::Infinity, PointCluster::Infinity) => true,
            (PointCluster::Finite(a), PointCluster::Finite(b)) => a.divides(b),
            _ => false,
        }
    }

    /// Parses `inf` or a polynomial string.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" => Ok(PointCluster::Infinity),
            other => PointCluster::finite(Poly::parse(other)?),
        }
    }
}

impl fmt::Display for PointCluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointCluster::Infinity => write!(f, "inf"),
            PointCluster::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// A gcd-free basis of a family of clusters, with each input expressed as
/// a set of basis indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub basis: Vec<PointCluster>,
    /// `parts[i][j]` lists the basis indices whose product is input `j` of set `i`.
    pub parts: Vec<Vec<Vec<usize>>>,
}

impl Refinement {
    /// Basis elements contained in `cluster`.
    pub fn pieces_of(&self, cluster: &PointCluster) -> Vec<usize> {
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, b)| b.is_subset_of(cluster))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Refines several sets of clusters into one pairwise coprime basis.
pub fn refine_supports(sets: &[Vec<PointCluster>]) -> Refinement {
    let mut finite: Vec<Poly> = Vec::new();
    let mut has_inf = false;
    for c in sets.iter().flatten() {
        match c {
            PointCluster::Infinity => has_inf = true,
            PointCluster::Finite(p) => finite.push(p.clone()),
        }
    }
    let basis_polys = coprime_basis(finite);
    let mut basis: Vec<PointCluster> = basis_polys.into_iter().map(PointCluster::Finite).collect();
    if has_inf {
        basis.push(PointCluster::Infinity);
    }
    basis.sort();
    let parts = sets
        .iter()
        .map(|set| {
            set.iter()
                .map(|c| {
                    basis
                        .iter()
                        .enumerate()
                        .filter(|(_, b)| b.is_subset_of(c))
                        .map(|(i, _)| i)
                        .collect()
                })
                .collect()
        })
        .collect();
    Refinement { basis, parts }
}

/// Pairwise coprime monic squarefree polynomials whose products recover
/// every (squarefree) input.
fn coprime_basis(inputs: Vec<Poly>) -> Vec<Poly> {
    let mut basis: Vec<Poly> = Vec::new();
    for p in inputs {
        let mut pending = vec![p.monic()];
        while let Some(mut cur) = pending.pop() {
            if cur.is_constant() {
                continue;
            }
            let mut i = 0;
            while i < basis.len() {
                let g = cur.gcd(&basis[i]);
                if g.is_constant() {
                    i += 1;
                    continue;
                }
                let b = basis.swap_remove(i);
                let b_rest = b.exact_div(&g).monic();
                cur = cur.exact_div(&g).monic();
                if !b_rest.is_constant() {
                    pending.push(b_rest);
                }
                pending.push(g);
                if cur.is_constant() {
                    break;
                }
                // restart the scan: basis changed
                i = 0;
            }
            if !cur.is_constant() {
                basis.push(cur);
            }
        }
    }
    basis.sort();
    basis.dedup();
    basis
}
