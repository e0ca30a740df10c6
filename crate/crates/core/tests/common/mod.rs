#![allow(dead_code)]

use adelic_core::{
    AdelicDivisor, BranchProfile, FormalRationalFunction, GeometricTail, GreenFunction,
    PointCluster, RDivisor, Rational,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn c(s: &str) -> PointCluster {
    PointCluster::parse(s).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Pairwise coprime clusters.
pub fn pool() -> Vec<PointCluster> {
    ["inf", "z", "z - 1", "z + 1", "z - 2", "z - 1/2", "z^2 + 1", "z^2 - 2", "z^2 + z + 1"]
        .iter()
        .map(|s| c(s))
        .collect()
}

pub fn small_rational(r: &mut impl Rng, lo: i64, hi: i64) -> Rational {
    let d = *[1i64, 2, 3, 4].choose(r).unwrap();
    q(r.gen_range(lo * d..=hi * d), d)
}

pub fn positive_step(r: &mut impl Rng) -> Rational {
    let d = *[1i64, 2, 3].choose(r).unwrap();
    q(r.gen_range(1..=2 * d), d)
}

/// Profile from `v0` with up to `max_breaks` further breakpoints and final
/// slope `slope`.
pub fn random_profile(r: &mut impl Rng, v0: &Rational, slope: &Rational, max_breaks: usize) -> BranchProfile {
    let k = r.gen_range(0..=max_breaks);
    let mut pts = vec![(Rational::zero(), v0.clone())];
    let mut t = Rational::zero();
    for _ in 0..k {
        t += positive_step(r);
        pts.push((t.clone(), small_rational(r, -2, 2)));
    }
    BranchProfile::new(pts, slope.clone()).unwrap()
}

/// Concave profile: slopes strictly decrease down to `slope`.
pub fn random_concave_profile(r: &mut impl Rng, v0: &Rational, slope: &Rational, max_breaks: usize) -> BranchProfile {
    let k = r.gen_range(0..=max_breaks);
    let mut slopes = vec![slope.clone()];
    for _ in 0..k {
        let s = slopes.last().unwrap() + positive_step(r);
        slopes.push(s);
    }
    slopes.reverse();
    let mut pts = vec![(Rational::zero(), v0.clone())];
    let (mut t, mut v) = (Rational::zero(), v0.clone());
    for s in &slopes[..slopes.len() - 1] {
        let dt = positive_step(r);
        v += s * &dt;
        t += dt;
        pts.push((t.clone(), v.clone()));
    }
    BranchProfile::new(pts, slope.clone()).unwrap()
}

#[derive(Clone, Debug)]
pub struct Opts {
    pub max_clusters: usize,
    pub max_breaks: usize,
    pub v0_range: (i64, i64),
    pub slope_range: (i64, i64),
    pub concave: bool,
    pub tail_chance: f64,
}

impl Default for Opts {
    fn default() -> Self {
        Opts {
            max_clusters: 5,
            max_breaks: 6,
            v0_range: (-1, 2),
            slope_range: (-1, 2),
            concave: false,
            tail_chance: 0.0,
        }
    }
}

pub fn random_tail(r: &mut impl Rng) -> GeometricTail {
    let psi = {
        let k = r.gen_range(1..=3);
        let mut pts = vec![(Rational::zero(), Rational::zero())];
        let mut t = Rational::zero();
        for _ in 0..k {
            t += positive_step(r);
            pts.push((t.clone(), small_rational(r, -2, 1)));
        }
        BranchProfile::new(pts, Rational::zero()).unwrap()
    };
    let ratio = [q(1, 2), q(1, 3), q(2, 3)].choose(r).unwrap().clone();
    GeometricTail::new(qi(r.gen_range(10..=20)), qi(r.gen_range(1..=3)), r.gen_range(1..=3), ratio, psi).unwrap()
}

/// Random valid adelic divisor supported on pool clusters.
pub fn random_adelic(r: &mut impl Rng, o: &Opts) -> AdelicDivisor {
    let mut clusters = pool();
    clusters.shuffle(r);
    let k = r.gen_range(1..=o.max_clusters);
    let v0 = small_rational(r, o.v0_range.0, o.v0_range.1);
    let mut exceptional = Vec::new();
    let mut terms = Vec::new();
    for x in clusters.into_iter().take(k) {
        let a = small_rational(r, o.slope_range.0, o.slope_range.1);
        let p = if o.concave {
            random_concave_profile(r, &v0, &a, o.max_breaks)
        } else {
            random_profile(r, &v0, &a, o.max_breaks)
        };
        terms.push((x.clone(), a));
        exceptional.push((x, p));
    }
    let tails = if r.gen_bool(o.tail_chance) { vec![random_tail(r)] } else { vec![] };
    let g = GreenFunction::new(v0, exceptional, tails).unwrap();
    AdelicDivisor::new(RDivisor::from_terms(terms), g).unwrap()
}

/// Random product of finite pool clusters.
pub fn random_function(r: &mut impl Rng, integral: bool) -> FormalRationalFunction {
    let mut out = FormalRationalFunction::one();
    for x in pool().into_iter().filter(|x| !x.is_infinity()) {
        if r.gen_bool(0.4) {
            let e = if integral { qi(r.gen_range(-2..=2)) } else { small_rational(r, -2, 2) };
            if !e.is_zero() {
                out = out.mul(&FormalRationalFunction::from_poly_power(x.poly().unwrap(), e).unwrap());
            }
        }
    }
    out
}

// Brute-force filtration oracle on rational points.

/// `None` is the point at infinity.
pub type Pt = Option<Rational>;

pub fn cluster_of(p: &Pt) -> PointCluster {
    match p {
        None => PointCluster::Infinity,
        Some(a) => PointCluster::point(a.clone()),
    }
}

#[derive(Clone, Debug)]
pub struct OracleInstance {
    pub v0: Rational,
    pub branches: Vec<(Pt, BranchProfile)>,
}

impl OracleInstance {
    pub fn adelic(&self) -> AdelicDivisor {
        let d = RDivisor::from_terms(
            self.branches.iter().map(|(p, prof)| (cluster_of(p), prof.final_slope().clone())),
        );
        let g = GreenFunction::new(
            self.v0.clone(),
            self.branches.iter().map(|(p, prof)| (cluster_of(p), prof.clone())).collect(),
            vec![],
        )
        .unwrap();
        AdelicDivisor::new(d, g).unwrap()
    }

    fn k(&self, i: usize, n: i64) -> i64 {
        floor(&(self.branches[i].1.final_slope() * qi(n)))
    }

    /// `inf_t (t m + n g(t))` evaluated directly on the profile.
    fn b(&self, i: usize, m: i64, n: i64) -> Rational {
        let prof = &self.branches[i].1;
        prof.points()
            .iter()
            .map(|(t, _)| t * qi(m) + prof.value(t) * qi(n))
            .min()
            .unwrap()
    }

    /// Least admissible order along branch `i` with `B >= t`, by scanning.
    fn m(&self, i: usize, n: i64, t: &Rational) -> i64 {
        let mut m = -self.k(i, n);
        while &self.b(i, m, n) < t {
            m += 1;
        }
        m
    }

    /// Partial-fraction basis of the functions with poles allowed by `nD`:
    /// `(None, i)` is `z^i`, `(Some(a), i)` is `(z - a)^-i`.
    fn basis(&self, n: i64) -> Vec<(Pt, i64)> {
        let mut v = vec![(None, 0)];
        for (i, (p, _)) in self.branches.iter().enumerate() {
            let k = self.k(i, n);
            for j in 1..=k.max(0) {
                v.push((p.clone(), j));
            }
        }
        v
    }

    /// Coefficient of `w^k` in the expansion at `at` of basis element `e`
    /// (`w = z - b` or `1/z`).
    fn coefficient(e: &(Pt, i64), at: &Pt, k: i64) -> Rational {
        match (e, at) {
            ((None, i), None) => {
                if k == -i {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            ((None, i), Some(b)) => {
                if k < 0 || k > *i {
                    Rational::zero()
                } else {
                    binom(*i, k) * pow(b, i - k)
                }
            }
            ((Some(a), i), None) => {
                let j = k - i;
                if j < 0 {
                    Rational::zero()
                } else {
                    binom(i + j - 1, j) * pow(a, j)
                }
            }
            ((Some(a), i), Some(b)) => {
                if a == b {
                    if k == -i {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                } else if k < 0 {
                    Rational::zero()
                } else {
                    let sign = if k % 2 == 0 { qi(1) } else { qi(-1) };
                    sign * binom(i + k - 1, k) * pow(&(b - a), -i - k)
                }
            }
        }
    }

    /// `rank F^t H0(nD)` by linear algebra on the partial-fraction basis.
    pub fn rank(&self, n: i64, t: &Rational) -> usize {
        if t > &(&self.v0 * qi(n)) {
            return 0;
        }
        let basis = self.basis(n);
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        let mut points: Vec<(Pt, i64, i64)> = self
            .branches
            .iter()
            .enumerate()
            .map(|(i, (p, _))| (p.clone(), -self.k(i, n).max(0), self.m(i, n, t)))
            .collect();
        if !self.branches.iter().any(|(p, _)| p.is_none()) {
            // bounded at infinity
            points.push((None, 0, 0));
        }
        for (p, lowest, required) in points {
            for k in lowest..required {
                rows.push(basis.iter().map(|e| Self::coefficient(e, &p, k)).collect());
            }
        }
        basis.len() - matrix_rank(rows)
    }

    /// Every value where the oracle rank may change at level `n`.
    pub fn criticals(&self, n: i64) -> Vec<Rational> {
        let top = &self.v0 * qi(n);
        let mut out = vec![top.clone()];
        for (i, (_, prof)) in self.branches.iter().enumerate() {
            let m_hi = self.m(i, n, &top) + 1;
            for m in (-self.k(i, n) - 1)..=m_hi {
                for (tau, v) in prof.points().iter().skip(1) {
                    out.push(tau * qi(m) + v * qi(n));
                }
                out.push(self.b(i, m, n));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// `(critical t, rank)` including midpoints and values beyond the ends.
    pub fn samples(&self, n: i64) -> Vec<Rational> {
        let cr = self.criticals(n);
        let mut out = vec![&cr[0] - qi(1)];
        for w in cr.windows(2) {
            out.push(w[0].clone());
            out.push((&w[0] + &w[1]) / qi(2));
        }
        out.push(cr.last().unwrap().clone());
        out.push(cr.last().unwrap() + qi(1));
        out
    }

    pub fn lambda_max(&self, n: i64) -> Option<Rational> {
        self.criticals(n).into_iter().filter(|t| self.rank(n, t) > 0).max()
    }

    /// `∫_0^inf rank dt` as a step integral over the critical grid.
    pub fn deg_plus(&self, n: i64) -> Rational {
        let mut cr: Vec<Rational> = self.criticals(n).into_iter().filter(|t| t.is_positive()).collect();
        cr.insert(0, Rational::zero());
        let mut total = Rational::zero();
        for w in cr.windows(2) {
            let mid = (&w[0] + &w[1]) / qi(2);
            total += (&w[1] - &w[0]) * qi(self.rank(n, &mid) as i64);
        }
        total
    }
}

pub fn random_oracle_instance(r: &mut impl Rng) -> OracleInstance {
    let mut pts: Vec<Pt> = vec![None, Some(qi(0)), Some(qi(1)), Some(qi(-1)), Some(qi(2)), Some(q(1, 2))];
    pts.shuffle(r);
    let k = r.gen_range(1..=3);
    let v0 = small_rational(r, 0, 2);
    let branches = pts
        .into_iter()
        .take(k)
        .map(|p| {
            let a = small_rational(r, -1, 2);
            let prof = random_profile(r, &v0, &a, 3);
            (p, prof)
        })
        .collect();
    OracleInstance { v0, branches }
}

fn floor(x: &Rational) -> i64 {
    let f = x.floor().to_integer();
    i64::try_from(f).unwrap()
}

fn binom(n: i64, k: i64) -> Rational {
    if k < 0 || k > n {
        return Rational::zero();
    }
    let mut out = BigInt::one();
    for j in 0..k {
        out = out * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    Rational::from_integer(out)
}

fn pow(b: &Rational, e: i64) -> Rational {
    let mut out = Rational::one();
    for _ in 0..e.abs() {
        out *= b;
    }
    if e < 0 {
        out.recip()
    } else {
        out
    }
}

pub fn matrix_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
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
