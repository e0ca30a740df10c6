//! Divisor-level probe for finite generation of the span of the twisted
//! pullback sequence `phi_n`.

use std::fmt;

use num_traits::{One, Zero};

use crate::cluster::{refine_supports, PointCluster};
use crate::divisor::{FormalRationalFunction, RDivisor};
use crate::dynamics::EigenData;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiEntry {
    pub n: usize,
    pub phi: FormalRationalFunction,
    /// Cumulative refined support of `phi_1, ..., phi_n`.
    pub basis: Vec<PointCluster>,
    /// Exponents of `phi_n` on `basis`.
    pub exponents: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiSequence {
    pub entries: Vec<PhiEntry>,
}

/// `phi_1 = phi^(1/d)`, `phi_n = (f^* phi_{n-1} * phi)^(1/d)`.
pub fn phi_sequence(e: &EigenData, n_max: usize) -> Result<PhiSequence> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be >= 1".into()));
    }
    let inv_d = Rational::one() / &e.d;
    let mut phis: Vec<FormalRationalFunction> = vec![e.phi.pow(&inv_d)];
    for _ in 1..n_max {
        let prev = phis.last().expect("nonempty");
        let pulled = e.f.pullback_function(prev);
        let next = pulled.mul(&e.phi).pow(&inv_d);
        if next.pow(&e.d) != pulled.mul(&e.phi) {
            return Err(Error::Internal("phi recursion failed".into()));
        }
        phis.push(next);
    }
    let mut entries = Vec::with_capacity(n_max);
    let mut basis: Vec<PointCluster> = Vec::new();
    for (i, phi) in phis.into_iter().enumerate() {
        basis = refine_supports(&[basis, phi.support()]).basis;
        let div = RDivisor::from_terms(phi.iter().map(|(x, c)| (x.clone(), c.clone())));
        let exponents = basis
            .iter()
            .map(|b| div.ord(b).unwrap_or_else(|_| Rational::zero()))
            .collect();
        entries.push(PhiEntry {
            n: i + 1,
            phi,
            basis: basis.clone(),
            exponents,
        });
    }
    Ok(PhiSequence { entries })
}

/// Rank of a list of rows over the rationals.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.iter().map(Vec::len).max().unwrap_or(0);
    for r in &mut m {
        r.resize(cols, Rational::zero());
    }
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (upper, lower) = m.split_at_mut(rank + 1);
        let pivot = &upper[rank];
        for row in lower {
            if !row[col].is_zero() {
                let k = &row[col] / &pivot[col];
                for (x, y) in row.iter_mut().zip(pivot).skip(col) {
                    *x -= y * &k;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Stabilized(usize),
    NotStabilized(usize),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Stabilized(n) => write!(f, "Stabilized({n})"),
            Verdict::NotStabilized(n) => write!(f, "NotStabilized({n})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitenessReport {
    /// `(n, basis size, rank)` per step.
    pub rows: Vec<(usize, usize, usize)>,
    pub verdict: Verdict,
    pub divisor_effective: bool,
}

impl FinitenessReport {
    pub fn ranks(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.2).collect()
    }

    pub fn support_growth(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.1).collect()
    }

    pub fn note(&self) -> &'static str {
        match (self.verdict, self.divisor_effective) {
            (Verdict::Stabilized(_), true) => {
                "divisor-level span is finite and D is effective: the Dirichlet property over number fields follows if unit contributions are finite as well (not probed)"
            }
            (Verdict::Stabilized(_), false) => {
                "divisor-level span is finite (evidence only; unit contributions are not probed)"
            }
            (Verdict::NotStabilized(_), _) => {
                "divisor-level span kept growing: the finiteness hypothesis fails if growth persists"
            }
        }
    }
}

impl fmt::Display for FinitenessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n,basis_size,rank")?;
        for (n, b, r) in &self.rows {
            writeln!(f, "{n},{b},{r}")?;
        }
        writeln!(f, "verdict: {}", self.verdict)?;
        write!(f, "note: {}", self.note())
    }
}

pub const DEFAULT_WINDOW: usize = 3;
pub const DEFAULT_N_MAX: usize = 20;

/// Stabilized at the least `n` whose row stays unchanged through
/// `n + window <= n_max`.
pub fn finiteness_probe(e: &EigenData, n_max: usize, window: usize) -> Result<FinitenessReport> {
    if window == 0 || n_max < window {
        return Err(Error::Precondition(format!(
            "need n_max >= window >= 1, got n_max = {n_max}, window = {window}"
        )));
    }
    let seq = phi_sequence(e, n_max)?;
    let mut rows = Vec::with_capacity(n_max);
    let mut vectors: Vec<Vec<Rational>> = Vec::new();
    for entry in &seq.entries {
        vectors.push(entry.exponents.clone());
        rows.push((entry.n, entry.basis.len(), rank(&vectors)));
    }
    let key = |i: usize| (rows[i].1, rows[i].2);
    let verdict = (0..n_max)
        .find(|&i| i + window < n_max && (i..=i + window).all(|j| key(j) == key(i)))
        .map(|i| Verdict::Stabilized(i + 1))
        .unwrap_or(Verdict::NotStabilized(n_max));
    Ok(FinitenessReport {
        rows,
        verdict,
        divisor_effective: e.divisor.is_effective(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Endomorphism;
    use crate::rational::{q, qi};

    fn squaring() -> EigenData {
        EigenData::new(
            Endomorphism::parse("z^2", "1").unwrap(),
            RDivisor::point(PointCluster::parse("z - 1").unwrap()),
            qi(2),
            FormalRationalFunction::parse("(z+1)/(z-1)").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn trivial_phi_stabilizes_at_once() {
        let e = EigenData::new(
            Endomorphism::parse("z^2 - 1", "1").unwrap(),
            RDivisor::point(PointCluster::Infinity),
            qi(2),
            FormalRationalFunction::one(),
        )
        .unwrap();
        let seq = phi_sequence(&e, 4).unwrap();
        assert!(seq.entries.iter().all(|x| x.phi.is_one()));
        let rep = finiteness_probe(&e, 12, 3).unwrap();
        assert_eq!(rep.verdict, Verdict::Stabilized(1));
        assert_eq!(finiteness_probe(&e, 3, 3).unwrap().verdict, Verdict::NotStabilized(3));
    }

    #[test]
    fn squaring_keeps_growing() {
        let e = squaring();
        let seq = phi_sequence(&e, 3).unwrap();
        assert_eq!(seq.entries[0].phi, FormalRationalFunction::parse("(z+1)^(1/2) / (z-1)^(1/2)").unwrap());
        let z2p1 = PointCluster::parse("z^2 + 1").unwrap();
        assert_eq!(seq.entries[1].phi.ord(&z2p1).unwrap(), q(1, 4));
        let rep = finiteness_probe(&e, 8, 3).unwrap();
        assert_eq!(rep.verdict, Verdict::NotStabilized(8));
        assert!(rep.support_growth().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn invariant_support_stabilizes() {
        // z^2 pulls [0] - [inf] back to twice itself, so 3 is an eigenvalue with phi = 1/z
        let f = Endomorphism::parse("z^2", "1").unwrap();
        let d = RDivisor::from_terms([(PointCluster::Infinity, qi(-1)), (PointCluster::zero(), qi(1))]);
        let phi = FormalRationalFunction::parse("1/z").unwrap();
        let e = EigenData::new(f, d, qi(3), phi).unwrap();
        assert!(phi_sequence(&e, 5).unwrap().entries.iter().all(|x| x.basis == vec![PointCluster::zero()]));
        let rep = finiteness_probe(&e, 6, 2).unwrap();
        assert_eq!(rep.verdict, Verdict::Stabilized(1));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[vec![qi(1), qi(2)], vec![qi(2), qi(4)]]), 1);
        assert_eq!(rank(&[vec![qi(1), qi(0)], vec![qi(0), q(1, 3)], vec![qi(1), qi(1)]]), 2);
    }
}
