//! Global sections of `nD`, their sup norms, the norm filtration and the
//! invariants built on it: `lambda_max`, `deg_+`, the asymptotic maximal
//! slope and the arithmetic volume.
//!
//! On a trivially valued field `-log ||s||_{ng}` depends only on the orders
//! `m_x = ord_x(s)`, through `B_x(m) = inf_t (t m + n g_x(t))`, which is
//! attained at a breakpoint. The filtration step `F^t` is therefore the
//! space of sections of the divisor `E_t = sum_x -M_x(t) [x]` where `M_x(t)`
//! is the least admissible order with `B_x >= t`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cluster::PointCluster;
use crate::divisor::{FormalRationalFunction, RDivisor};
use crate::error::{Error, Result};
use crate::green::{AdelicDivisor, GeometricTail};
use crate::profile::{integrate_max_of_lines, kinks_between, max_of_lines, BranchProfile, Line};
use crate::rational::{ceil_int, floor_int, Extended, Rational};

fn rat(n: u64) -> Rational {
    Rational::from_integer(n.into())
}

/// `max(0, 1 + sum_x floor(n a_x) deg x)`.
pub fn h0_dimension(d: &RDivisor, n: u64) -> u64 {
    let nn = rat(n);
    let s: BigInt = d
        .iter()
        .map(|(x, a)| floor_int(&(a * &nn)) * BigInt::from(x.degree()))
        .sum();
    let dim = BigInt::one() + s;
    if dim.is_positive() {
        dim.to_u64().expect("dimension fits in u64")
    } else {
        0
    }
}

/// One branch at level `n`: `B(m) = min_i (tau_i m + c_i)` over the
/// breakpoints with `tau_i > 0`, admissible for `m >= floor`.
#[derive(Clone, Debug)]
struct LevelBranch {
    cluster: PointCluster,
    deg: BigInt,
    floor: BigInt,
    pieces: Vec<(Rational, Rational)>,
}

impl LevelBranch {
    fn new(cluster: PointCluster, profile: &BranchProfile, n: &Rational) -> Self {
        let floor = ceil_int(&(-(profile.final_slope() * n)));
        let pieces = profile
            .points()
            .iter()
            .skip(1)
            .map(|(t, v)| (t.clone(), v * n))
            .collect();
        LevelBranch {
            deg: BigInt::from(cluster.degree()),
            cluster,
            floor,
            pieces,
        }
    }

    /// Least admissible `m` with `B(m) >= t` (the root constraint is global).
    fn m_at(&self, t: &Rational) -> BigInt {
        let mut m = self.floor.clone();
        for (tau, c) in &self.pieces {
            let k = ceil_int(&((t - c) / tau));
            if k > m {
                m = k;
            }
        }
        m
    }

    /// Smallest `t` at which the branch can leave its floor.
    fn start(&self) -> Option<Rational> {
        let fl = Rational::from_integer(self.floor.clone());
        self.pieces.iter().map(|(tau, c)| c + tau * &fl).min()
    }
}

/// All branches relevant at level `n`, with `t_top` the largest `t` at which
/// the filtration can be nonzero.
struct Level {
    dim: u64,
    branches: Vec<LevelBranch>,
    t_top: Rational,
}

impl Level {
    fn new(a: &AdelicDivisor, n: u64) -> Self {
        assert!(n >= 1, "tensor power must be >= 1");
        let nn = rat(n);
        let dim = h0_dimension(a.divisor(), n);
        let g = a.green();
        let mut branches: Vec<LevelBranch> = g
            .exceptional()
            .iter()
            .map(|(x, p)| LevelBranch::new(x.clone(), p, &nn))
            .collect();
        let mut t_top = a.v0() * &nn;
        for t in g.tails() {
            let min_psi = t.min_psi();
            if !min_psi.is_negative() {
                continue;
            }
            // each active member costs at least one dimension, so `dim`
            // members exhaust the space
            let count = dim.max(1);
            for k in t.n0..t.n0 + count {
                branches.push(LevelBranch::new(t.cluster(k), &t.member_profile(a.v0(), k), &nn));
            }
            let last = t.n0 + count - 1;
            let hi = (a.v0() + t.scale_at(last) * &min_psi) * &nn;
            if hi < t_top {
                t_top = hi;
            }
        }
        Level {
            dim,
            branches,
            t_top,
        }
    }

    fn rank_at(&self, t: &Rational) -> u64 {
        if self.dim == 0 || t > &self.t_top {
            return 0;
        }
        let s: BigInt = self.branches.iter().map(|b| b.m_at(t) * &b.deg).sum();
        let r = BigInt::one() - s;
        if r.is_positive() {
            r.to_u64().expect("rank fits")
        } else {
            0
        }
    }

    fn lo(&self) -> Rational {
        self.branches
            .iter()
            .filter_map(|b| b.start())
            .fold(self.t_top.clone(), |acc, s| if s < acc { s } else { acc })
    }

    /// Every `t` in `[lo, t_top]` where the rank may change, sorted.
    fn candidates(&self) -> Vec<Rational> {
        let lo = self.lo();
        let mut set = BTreeSet::new();
        set.insert(lo.clone());
        set.insert(self.t_top.clone());
        for b in &self.branches {
            for (tau, c) in &b.pieces {
                let first = ceil_int(&((&lo - c) / tau)).max(b.floor.clone());
                let last = floor_int(&((&self.t_top - c) / tau));
                let mut m = first;
                while m <= last {
                    set.insert(c + tau * Rational::from_integer(m.clone()));
                    m += 1;
                }
            }
        }
        set.into_iter().filter(|t| t >= &lo && t <= &self.t_top).collect()
    }
}

/// Jumps of `t -> rank F^t(H0(nD))`: entry `(t_j, r_j)` means rank `r_j`
/// on `(t_{j-1}, t_j]`, and full rank for `t <= t_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationTable {
    pub n: u64,
    pub dimension: u64,
    pub jumps: Vec<(Rational, u64)>,
    pub lambda_max: Extended,
}

impl FiltrationTable {
    pub fn rank_at(&self, t: &Rational) -> u64 {
        self.jumps
            .iter()
            .find(|(tj, _)| t <= tj)
            .map_or(0, |(_, r)| *r)
    }

    /// `∫_0^inf rank F^t dt`.
    pub fn positive_integral(&self) -> Rational {
        let mut prev: Option<Rational> = None;
        let mut total = Rational::zero();
        for (t, r) in &self.jumps {
            let start = match &prev {
                Some(p) if p.is_positive() => p.clone(),
                _ => Rational::zero(),
            };
            if t > &start {
                total += (t - &start) * rat(*r);
            }
            prev = Some(t.clone());
        }
        total
    }

    /// CSV rows `t,rank`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,rank\n");
        for (t, r) in &self.jumps {
            s.push_str(&format!("{t},{r}\n"));
        }
        s
    }
}

impl fmt::Display for FiltrationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_csv())?;
        write!(f, "lambda_max: {}", self.lambda_max)
    }
}

pub fn filtration(a: &AdelicDivisor, n: u64) -> FiltrationTable {
    let level = Level::new(a, n);
    if level.dim == 0 {
        return FiltrationTable {
            n,
            dimension: 0,
            jumps: Vec::new(),
            lambda_max: Extended::NegInf,
        };
    }
    let mut jumps: Vec<(Rational, u64)> = Vec::new();
    for t in level.candidates() {
        let r = level.rank_at(&t);
        if r == 0 {
            break;
        }
        match jumps.last_mut() {
            Some(last) if last.1 == r => last.0 = t,
            _ => jumps.push((t, r)),
        }
    }
    let lambda_max = jumps
        .last()
        .map_or(Extended::NegInf, |(t, _)| Extended::Finite(t.clone()));
    FiltrationTable {
        n,
        dimension: level.dim,
        jumps,
        lambda_max,
    }
}

/// `lambda_max(nD, ng)` by bisection over the critical values.
pub fn lambda_max_n(a: &AdelicDivisor, n: u64) -> Extended {
    let level = Level::new(a, n);
    if level.dim == 0 {
        return Extended::NegInf;
    }
    let cands = level.candidates();
    // rank is nonincreasing; find the last candidate with positive rank
    if level.rank_at(&cands[0]) == 0 {
        return Extended::NegInf;
    }
    let (mut lo, mut hi) = (0usize, cands.len());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if level.rank_at(&cands[mid]) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Extended::Finite(cands[lo].clone())
}

pub fn deg_plus(a: &AdelicDivisor, n: u64) -> Rational {
    filtration(a, n).positive_integral()
}

/// `-log ||s||_{ng}` for `s` in `H0(nD)`.
pub fn section_norm(a: &AdelicDivisor, s: &FormalRationalFunction, n: u64) -> Result<Rational> {
    if !s.is_integral() {
        return Err(Error::Precondition(format!(
            "section {s} must have integer exponents"
        )));
    }
    let nn = rat(n);
    let g = a.green();
    let div = s.principal_divisor();
    let mut clusters: Vec<PointCluster> = g.exceptional().keys().cloned().collect();
    clusters.extend(div.support());
    clusters.extend(a.divisor().support());
    let pieces = g.branch_pieces(&clusters);
    let mut best = a.v0() * &nn;
    for x in &pieces {
        let m = div.ord(x)?;
        let d = a.divisor().ord(x)?;
        if (&m + &d * &nn).is_negative() {
            return Err(Error::Precondition(format!(
                "section {s} is not in H0({n}D): order {m} at {x}"
            )));
        }
        match g.profile_at(x)?.b_min(&m, &nn) {
            Extended::Finite(b) => {
                if b < best {
                    best = b;
                }
            }
            _ => unreachable!("admissible order"),
        }
    }
    for t in g.tails() {
        if !t.min_psi().is_negative() {
            continue;
        }
        let mut k = t.n0;
        while pieces.contains(&t.cluster(k)) {
            k += 1;
        }
        let b = (a.v0() + t.scale_at(k) * t.min_psi()) * &nn;
        if b < best {
            best = b;
        }
    }
    Ok(best)
}

/// A section of maximal norm exponent at level `n`: `(lambda_max_n, s)`.
pub fn best_section(a: &AdelicDivisor, n: u64) -> Option<(Rational, FormalRationalFunction)> {
    let lam = lambda_max_n(a, n).finite()?.clone();
    let level = Level::new(a, n);
    let terms: Vec<(PointCluster, Rational)> = level
        .branches
        .iter()
        .filter(|b| !b.cluster.is_infinity())
        .map(|b| (b.cluster.clone(), Rational::from_integer(b.m_at(&lam))))
        .collect();
    Some((lam, FormalRationalFunction::from_terms(terms)))
}

/// The continuous relaxation `Phi(t) = lim rank F^{nt}(H0(nD)) / n`.
struct Relaxation {
    v0: Rational,
    degree: Rational,
    /// `(deg x, lines of M_x)`: the branch contributes `-deg * max(lines)`.
    exc: Vec<(Rational, Vec<Line>)>,
    tails: Vec<GeometricTail>,
}

impl Relaxation {
    fn new(a: &AdelicDivisor) -> Self {
        let exc = a
            .green()
            .exceptional()
            .iter()
            .map(|(x, p)| (rat(x.degree() as u64), m_lines(p, &-p.final_slope())))
            .collect();
        Relaxation {
            v0: a.v0().clone(),
            degree: a.degree(),
            exc,
            tails: a
                .green()
                .tails()
                .iter()
                .filter(|t| t.min_psi().is_negative())
                .cloned()
                .collect(),
        }
    }

    fn threshold(&self, t: &GeometricTail, k: u64) -> Rational {
        &self.v0 + t.scale_at(k) * t.min_psi()
    }

    fn member_lines(&self, t: &GeometricTail, k: u64) -> Vec<Line> {
        m_lines(&t.member_profile(&self.v0, k), &Rational::zero())
    }

    /// Tail members whose term is nonzero somewhere below `t_hi < v0`.
    fn active_members(&self, t_hi: &Rational) -> Vec<Vec<Line>> {
        let mut out = Vec::new();
        for t in &self.tails {
            let mut k = t.n0;
            while &self.threshold(t, k) < t_hi {
                out.push(self.member_lines(t, k));
                k += 1;
            }
        }
        out
    }

    fn exc_at(&self, t: &Rational) -> Rational {
        self.exc
            .iter()
            .map(|(d, lines)| -(d * max_of_lines(lines, t)))
            .sum()
    }

    /// `Phi(t)` for `t < v0`, or any `t <= v0` when no tail is active.
    fn phi(&self, t: &Rational) -> Rational {
        let tails: Rational = self
            .active_members(t)
            .iter()
            .map(|lines| max_of_lines(lines, t))
            .sum();
        self.exc_at(t) - tails
    }

    /// `Phi(v0)`, summing the tail series in closed form.
    fn phi_at_v0(&self) -> Rational {
        let mut total = self.exc_at(&self.v0);
        for t in &self.tails {
            let c = t
                .base
                .points()
                .iter()
                .skip(1)
                .map(|(tau, psi)| -psi / tau)
                .fold(Rational::zero(), |a, b| if b > a { b } else { a });
            total -= c * t.scale_at(t.n0) / (Rational::one() - &t.ratio);
        }
        total
    }

    fn all_lines(&self, t_hi: &Rational) -> Vec<(Rational, Vec<Line>)> {
        let mut out = self.exc.clone();
        for lines in self.active_members(t_hi) {
            out.push((Rational::one(), lines));
        }
        out
    }

    fn lambda_asy(&self) -> Extended {
        if self.degree.is_negative() {
            return Extended::NegInf;
        }
        if !self.phi_at_v0().is_negative() {
            return Extended::Finite(self.v0.clone());
        }
        // a point below v0 where Phi < 0
        let mut t_hi = self.v0.clone();
        if !self.tails.is_empty() {
            let mut j = 0u64;
            loop {
                let cand = self
                    .tails
                    .iter()
                    .map(|t| self.threshold(t, t.n0 + j))
                    .max()
                    .expect("nonempty");
                if self.phi(&cand).is_negative() {
                    t_hi = cand;
                    break;
                }
                j += 1;
            }
        }
        let families = self.all_lines(&t_hi);
        let mut lo = t_hi.clone() - Rational::one();
        for (_, lines) in &families {
            for l in lines.iter() {
                for m in lines.iter() {
                    if let Some(t) = l.meet(m) {
                        if t < lo {
                            lo = t - Rational::one();
                        }
                    }
                }
            }
        }
        let mut grid: Vec<Rational> = families
            .iter()
            .flat_map(|(_, lines)| kinks_between(lines, &lo, &t_hi))
            .collect();
        grid.push(lo);
        grid.push(t_hi);
        grid.sort();
        grid.dedup();
        let f = |t: &Rational| -> Rational {
            families
                .iter()
                .map(|(d, lines)| -(d * max_of_lines(lines, t)))
                .sum()
        };
        let values: Vec<Rational> = grid.iter().map(f).collect();
        debug_assert!(!values[0].is_negative());
        let j = values
            .iter()
            .rposition(|v| !v.is_negative())
            .expect("Phi(lo) = deg D >= 0");
        let (t0, f0) = (&grid[j], &values[j]);
        let (t1, f1) = (&grid[j + 1], &values[j + 1]);
        Extended::Finite(t0 + f0 * (t1 - t0) / (f0 - f1))
    }

    /// `∫_0^{lam} Phi`, for `0 < lam <= v0` with `Phi >= 0` on `[0, lam]`.
    fn integral(&self, lam: &Rational) -> Rational {
        let zero = Rational::zero();
        let mut total: Rational = self
            .exc
            .iter()
            .map(|(d, lines)| -(d * integrate_max_of_lines(lines, &zero, lam)))
            .sum();
        if lam < &self.v0 {
            for lines in self.active_members(lam) {
                total -= integrate_max_of_lines(&lines, &zero, lam);
            }
            return total;
        }
        for t in &self.tails {
            // member k: r^{2k} ∫_0^{min(M, v0/r^k)} G(w) dw
            let depth = -t.min_psi();
            let g_lines: Vec<Line> = std::iter::once(Line::new(zero.clone(), zero.clone()))
                .chain(
                    t.base
                        .points()
                        .iter()
                        .skip(1)
                        .map(|(tau, psi)| Line::new(-(Rational::one() / tau), -(psi / tau))),
                )
                .collect();
            let full = integrate_max_of_lines(&g_lines, &zero, &depth);
            let mut k = t.n0;
            loop {
                let s = t.scale_at(k);
                if &s * &depth <= self.v0 {
                    let r2 = &t.ratio * &t.ratio;
                    total -= full * &s * &s / (Rational::one() - r2);
                    break;
                }
                let upper = &self.v0 / &s;
                total -= &s * &s * integrate_max_of_lines(&g_lines, &zero, &upper);
                k += 1;
            }
        }
        total
    }
}

/// Lines whose maximum is `M_x(t) = max(floor, max_i (t - v_i) / tau_i)`.
fn m_lines(p: &BranchProfile, floor: &Rational) -> Vec<Line> {
    std::iter::once(Line::new(Rational::zero(), floor.clone()))
        .chain(
            p.points()
                .iter()
                .skip(1)
                .map(|(tau, v)| Line::new(Rational::one() / tau, -(v / tau))),
        )
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaAsy {
    pub exact: Extended,
    /// `lambda_max_n / n` for `n = 1..=n_sweep`.
    pub lower_bounds: Vec<(u64, Extended)>,
}

/// `lim lambda_max_n / n`, with the per-level values as certified lower bounds.
pub fn lambda_max_asy(a: &AdelicDivisor, n_sweep: u64, jobs: usize) -> Result<LambdaAsy> {
    let exact = lambda_asy_exact(a);
    let lower_bounds = sweep(n_sweep, jobs, |n| match lambda_max_n(a, n) {
        Extended::Finite(l) => Extended::Finite(l / rat(n)),
        other => other,
    });
    for (n, l) in &lower_bounds {
        if l > &exact {
            return Err(Error::Internal(format!(
                "lambda_max_{n}/{n} = {l} exceeds the asymptotic value {exact}"
            )));
        }
    }
    if exact > Extended::Finite(a.v0().clone()) {
        return Err(Error::Internal("asymptotic maximal slope above v0".into()));
    }
    Ok(LambdaAsy {
        exact,
        lower_bounds,
    })
}

pub fn lambda_asy_exact(a: &AdelicDivisor) -> Extended {
    Relaxation::new(a).lambda_asy()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Volume {
    pub exact: Rational,
    /// `2 deg_+(nD) / n^2` for `n = 1..=n_sweep`.
    pub sequence: Vec<(u64, Rational)>,
}

impl Volume {
    /// CSV rows `n,estimate` and a final `exact` line.
    pub fn report(&self) -> String {
        let mut s = String::from("n,estimate\n");
        for (n, v) in &self.sequence {
            s.push_str(&format!("{n},{v}\n"));
        }
        s.push_str(&format!("exact: {}", self.exact));
        s
    }
}

pub fn volume_exact(a: &AdelicDivisor) -> Rational {
    let rel = Relaxation::new(a);
    let lam = match rel.lambda_asy() {
        Extended::Finite(l) => l,
        _ => return Rational::zero(),
    };
    let lam = if lam > rel.v0 { rel.v0.clone() } else { lam };
    if !lam.is_positive() {
        return Rational::zero();
    }
    rel.integral(&lam) * rat(2)
}

pub fn volume(a: &AdelicDivisor, n_sweep: u64, jobs: usize) -> Volume {
    let sequence = sweep(n_sweep, jobs, |n| deg_plus(a, n) * rat(2) / rat(n * n));
    Volume {
        exact: volume_exact(a),
        sequence,
    }
}

/// Evaluates `f(1..=n_max)`, on up to `jobs` threads, in order.
fn sweep<T: Send>(n_max: u64, jobs: usize, f: impl Fn(u64) -> T + Sync) -> Vec<(u64, T)> {
    let jobs = jobs.max(1);
    if jobs == 1 || n_max <= 1 {
        return (1..=n_max).map(|n| (n, f(n))).collect();
    }
    let f = &f;
    let mut out: Vec<(u64, T)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs as u64)
            .map(|j| {
                scope.spawn(move || {
                    (1..=n_max)
                        .filter(|n| (n - 1) % jobs as u64 == j)
                        .map(|n| (n, f(n)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    out.sort_by_key(|(n, _)| *n);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigReport {
    pub big: bool,
    /// `(n0, s)` with `||s||_{n0 g} < 1`.
    pub witness: Option<(u64, FormalRationalFunction)>,
}

/// Levels searched for a bigness witness.
pub const BIG_SEARCH_LIMIT: u64 = 128;

pub fn is_big(a: &AdelicDivisor) -> Result<BigReport> {
    if !a.degree().is_positive() || !lambda_asy_exact(a).finite().is_some_and(|l| l.is_positive()) {
        return Ok(BigReport {
            big: false,
            witness: None,
        });
    }
    for n in 1..=BIG_SEARCH_LIMIT {
        if let Some((lam, s)) = best_section(a, n) {
            if lam.is_positive() {
                let norm = section_norm(a, &s, n)?;
                if norm < lam {
                    return Err(Error::Internal(format!(
                        "section {s} at level {n} has norm exponent {norm} < {lam}"
                    )));
                }
                return Ok(BigReport {
                    big: true,
                    witness: Some((n, s)),
                });
            }
        }
    }
    Ok(BigReport {
        big: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::GreenFunction;
    use crate::rational::{q, qi};

    fn c(s: &str) -> PointCluster {
        PointCluster::parse(s).unwrap()
    }

    fn e1(v: Rational) -> AdelicDivisor {
        AdelicDivisor::standard(v)
    }

    fn two_point() -> AdelicDivisor {
        let g = GreenFunction::new(
            qi(0),
            vec![
                (c("z"), BranchProfile::linear(qi(0), qi(1))),
                (c("inf"), BranchProfile::linear(qi(0), qi(1))),
            ],
            vec![],
        )
        .unwrap();
        AdelicDivisor::new(RDivisor::from_terms([(c("z"), qi(1)), (c("inf"), qi(1))]), g).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(h0_dimension(&RDivisor::point(c("inf")), 1), 2);
        assert_eq!(h0_dimension(two_point().divisor(), 1), 3);
        assert_eq!(h0_dimension(&RDivisor::from_terms([(c("inf"), q(1, 2))]), 1), 1);
        assert_eq!(h0_dimension(&RDivisor::from_terms([(c("inf"), qi(-1))]), 1), 0);
    }

    #[test]
    fn norms() {
        let one = FormalRationalFunction::one();
        let z = FormalRationalFunction::z();
        assert_eq!(section_norm(&e1(qi(1)), &one, 1).unwrap(), qi(1));
        assert_eq!(section_norm(&e1(qi(1)), &z, 1).unwrap(), qi(1));
        assert_eq!(section_norm(&e1(qi(0)), &one, 1).unwrap(), qi(0));
        assert!(section_norm(&e1(qi(0)), &z.pow(&qi(2)), 1).is_err());
    }

    #[test]
    fn filtrations() {
        let t = filtration(&e1(qi(1)), 1);
        assert_eq!(t.jumps, vec![(qi(1), 2)]);
        assert_eq!(t.rank_at(&q(1, 2)), 2);
        assert_eq!(t.rank_at(&q(3, 2)), 0);
        assert_eq!(filtration(&e1(qi(0)), 1).jumps, vec![(qi(0), 2)]);
        assert_eq!(filtration(&two_point(), 1).jumps, vec![(qi(0), 3)]);
    }

    #[test]
    fn lambda_and_deg_plus() {
        assert_eq!(lambda_max_n(&e1(qi(1)), 1), Extended::Finite(qi(1)));
        assert_eq!(lambda_max_n(&e1(qi(1)), 3), Extended::Finite(qi(3)));
        assert_eq!(deg_plus(&e1(qi(1)), 1), qi(2));
        assert_eq!(deg_plus(&e1(qi(1)), 2), qi(6));
        assert_eq!(deg_plus(&e1(qi(0)), 1), qi(0));
        for v in [q(3, 2), q(-2, 3), qi(0)] {
            assert_eq!(lambda_asy_exact(&e1(v.clone())), Extended::Finite(v));
        }
    }

    #[test]
    fn volumes() {
        let v = volume(&e1(qi(1)), 8, 1);
        assert_eq!(v.exact, qi(2));
        for (n, est) in &v.sequence {
            assert_eq!(est, &(rat(2) * rat(n + 1) * rat(*n) / rat(n * n)));
        }
        assert_eq!(volume_exact(&e1(qi(0))), qi(0));
        assert_eq!(volume_exact(&e1(q(1, 5))), q(2, 5));
        assert_eq!(volume(&e1(qi(1)), 6, 3), volume(&e1(qi(1)), 6, 1));
    }

    #[test]
    fn bigness() {
        let r = is_big(&e1(qi(1))).unwrap();
        assert!(r.big);
        assert_eq!(r.witness, Some((1, FormalRationalFunction::one())));
        assert!(!is_big(&e1(qi(0))).unwrap().big);
        assert!(!is_big(&AdelicDivisor::constant(qi(1))).unwrap().big);
    }

    #[test]
    fn tails_lower_the_norm() {
        let psi = BranchProfile::new(vec![(qi(0), qi(0)), (qi(1), qi(-1))], qi(0)).unwrap();
        let tail = GeometricTail::new(qi(0), qi(1), 1, q(1, 2), psi).unwrap();
        let base = e1(qi(1));
        let g = GreenFunction::new(
            qi(1),
            base.green().exceptional().clone().into_iter().collect(),
            vec![tail],
        )
        .unwrap();
        let a = AdelicDivisor::new(base.divisor().clone(), g).unwrap();
        let one = FormalRationalFunction::one();
        assert_eq!(section_norm(&a, &one, 1).unwrap(), q(1, 2));
        let s = FormalRationalFunction::parse("z - 1").unwrap();
        assert_eq!(section_norm(&a, &s, 1).unwrap(), q(3, 4));
        assert_eq!(lambda_max_n(&a, 1), Extended::Finite(q(3, 4)));
        let t = filtration(&a, 1);
        assert_eq!(t.lambda_max, Extended::Finite(q(3, 4)));
        assert_eq!(lambda_asy_exact(&a), Extended::Finite(qi(1)));
    }
}
