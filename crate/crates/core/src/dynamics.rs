//! Endomorphisms of the projective line acting on divisors and Green
//! functions; canonical Green functions and their heights.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::cluster::{refine_supports, PointCluster};
use crate::divisor::{FormalRationalFunction, RDivisor};
use crate::error::{Error, Result};
use crate::green::{AdelicDivisor, GreenFunction, TreePoint};
use crate::mu::{decide_dirichlet, DirichletCertificate};
use crate::poly::Poly;
use crate::profile::BranchProfile;
use crate::rational::{pow_u, Extended, Rational};

/// `z -> p(z) / q(z)` of degree `d = max(deg p, deg q) >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    p: Poly,
    q: Poly,
    d: usize,
}

impl Endomorphism {
    pub fn new(p: Poly, q: Poly) -> Result<Self> {
        if q.is_zero() || p.is_zero() {
            return Err(Error::Invalid("numerator and denominator must be nonzero".into()));
        }
        if !p.is_coprime(&q) {
            return Err(Error::Invalid(format!("'{p}' and '{q}' are not coprime")));
        }
        let d = p.deg().max(q.deg());
        if d < 2 {
            return Err(Error::Invalid(format!("degree {d} < 2")));
        }
        Ok(Endomorphism { p, q, d })
    }

    pub fn polynomial(p: Poly) -> Result<Self> {
        Self::new(p, Poly::one())
    }

    pub fn parse(num: &str, den: &str) -> Result<Self> {
        Self::new(Poly::parse(num)?, Poly::parse(den)?)
    }

    pub fn numerator(&self) -> &Poly {
        &self.p
    }

    pub fn denominator(&self) -> &Poly {
        &self.q
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// `f^*[x]` as pieces with their local degrees.
    pub fn pullback_cluster(&self, x: &PointCluster) -> Vec<(PointCluster, u32)> {
        let (affine, k_total) = match x {
            PointCluster::Infinity => (self.q.clone(), self.d),
            PointCluster::Finite(h) => (h.homogeneous_compose(&self.p, &self.q), h.deg() * self.d),
        };
        let mut out: Vec<(PointCluster, u32)> = if affine.is_constant() {
            Vec::new()
        } else {
            affine
                .squarefree_decompose()
                .expect("nonzero")
                .into_iter()
                .map(|(r, j)| (PointCluster::Finite(r), j))
                .collect()
        };
        let at_inf = k_total - affine.deg();
        if at_inf > 0 {
            out.push((PointCluster::Infinity, at_inf as u32));
        }
        out.sort();
        out
    }

    pub fn pullback_divisor(&self, d: &RDivisor) -> RDivisor {
        RDivisor::from_terms(d.iter().flat_map(|(x, a)| {
            self.pullback_cluster(x)
                .into_iter()
                .map(move |(y, j)| (y, a * Rational::from_integer(j.into())))
        }))
    }

    /// `s o f`, up to a constant.
    pub fn pullback_function(&self, s: &FormalRationalFunction) -> FormalRationalFunction {
        let mut out = FormalRationalFunction::one();
        for (x, c) in s.iter() {
            let h = x.poly().expect("formal functions have finite support");
            let n = h.homogeneous_compose(&self.p, &self.q);
            out = out.mul(&FormalRationalFunction::from_poly_power(&n, c.clone()).expect("nonzero"));
            if !self.q.is_constant() {
                let k = Rational::from_integer(h.deg().into());
                out = out.mul(
                    &FormalRationalFunction::from_poly_power(&self.q, -(c * k)).expect("nonzero"),
                );
            }
        }
        out
    }

    /// `f(inf)` with its local degree.
    fn image_of_infinity(&self) -> (PointCluster, u32) {
        let (dp, dq) = (self.p.deg(), self.q.deg());
        if dp > dq {
            (PointCluster::Infinity, (dp - dq) as u32)
        } else if dp < dq {
            (PointCluster::zero(), (dq - dp) as u32)
        } else {
            let c = self.p.lead() / self.q.lead();
            let diff = &self.p - &self.q.scale(&c);
            (PointCluster::point(c), (dq - diff.deg()) as u32)
        }
    }

    /// Splits `x` by local degree: `(piece of x, f(piece), e)`. The branch
    /// toward a point of the piece at parameter `t` maps to the branch toward
    /// its image at parameter `e t`.
    pub fn pushforward_cluster(&self, x: &PointCluster) -> Vec<(PointCluster, PointCluster, u32)> {
        let h = match x {
            PointCluster::Infinity => {
                let (y, e) = self.image_of_infinity();
                return vec![(PointCluster::Infinity, y, e)];
            }
            PointCluster::Finite(h) => h,
        };
        let mut out = Vec::new();
        let poles = h.gcd(&self.q);
        if !poles.is_constant() {
            for (r, j) in self.q.squarefree_decompose().expect("nonzero") {
                let piece = poles.gcd(&r);
                if !piece.is_constant() {
                    out.push((PointCluster::Finite(piece), PointCluster::Infinity, j));
                }
            }
        }
        let fin = h.exact_div(&poles).monic();
        if !fin.is_constant() {
            let image = fin.image_polynomial(&self.p, &self.q).squarefree_part();
            let pulled = image.homogeneous_compose(&self.p, &self.q);
            for (r, j) in pulled.squarefree_decompose().expect("nonzero") {
                let piece = fin.gcd(&r);
                if piece.is_constant() {
                    continue;
                }
                let y = piece.image_polynomial(&self.p, &self.q).squarefree_part();
                out.push((PointCluster::Finite(piece), PointCluster::Finite(y), j));
            }
        }
        out.sort();
        out
    }

    /// Forward image of a finite set of points.
    pub fn image_set(&self, s: &PointSet) -> PointSet {
        let mut out = PointSet::empty();
        if s.infinity {
            out = out.union(&PointSet::from_cluster(&self.image_of_infinity().0));
        }
        if !s.finite.is_constant() {
            for (_, y, _) in self.pushforward_cluster(&PointCluster::Finite(s.finite.clone())) {
                out = out.union(&PointSet::from_cluster(&y));
            }
        }
        out
    }

    /// True when every point of `x` has a finite forward orbit, detected
    /// within `cap` steps.
    pub fn is_preperiodic(&self, x: &PointCluster, cap: usize) -> bool {
        let mut seen = vec![PointSet::from_cluster(x)];
        for _ in 0..cap {
            let next = self.image_set(seen.last().expect("nonempty"));
            if seen.contains(&next) {
                return true;
            }
            seen.push(next);
        }
        false
    }

    /// `(f^an)^* g`: the profile at `x` is `g_{f(x)}(e_x t)`.
    pub fn pullback_green(&self, g: &GreenFunction) -> Result<GreenFunction> {
        if g.has_tails() {
            return Err(Error::Precondition("pullback of tails is unsupported".into()));
        }
        let mut exceptional = Vec::new();
        for (y, prof) in g.exceptional() {
            for (x, j) in self.pullback_cluster(y) {
                exceptional.push((x, prof.reparametrize(&Rational::from_integer(j.into()))));
            }
        }
        GreenFunction::new(g.v0().clone(), exceptional, Vec::new())
    }

    pub fn pullback_adelic(&self, a: &AdelicDivisor) -> Result<AdelicDivisor> {
        AdelicDivisor::new(self.pullback_divisor(a.divisor()), self.pullback_green(a.green())?)
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_constant() && self.q.lead().is_one() {
            write!(f, "z -> {}", self.p)
        } else {
            write!(f, "z -> ({}) / ({})", self.p, self.q)
        }
    }
}

/// A finite set of closed points: a squarefree polynomial plus a flag for
/// infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    pub finite: Poly,
    pub infinity: bool,
}

impl PointSet {
    pub fn empty() -> Self {
        PointSet {
            finite: Poly::one(),
            infinity: false,
        }
    }

    pub fn from_cluster(x: &PointCluster) -> Self {
        match x {
            PointCluster::Infinity => PointSet {
                finite: Poly::one(),
                infinity: true,
            },
            PointCluster::Finite(p) => PointSet {
                finite: p.clone(),
                infinity: false,
            },
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let g = self.finite.gcd(&other.finite);
        PointSet {
            finite: (&self.finite * &other.finite).exact_div(&g).monic(),
            infinity: self.infinity || other.infinity,
        }
    }
}

/// `f^*(D) = d D + (phi)`.
pub fn check_eigen(f: &Endomorphism, d: &RDivisor, lambda: &Rational, phi: &FormalRationalFunction) -> bool {
    f.pullback_divisor(d) == d.scale(lambda).add(&phi.principal_divisor())
}

/// An endomorphism with an eigen-divisor `f^*(D) = d D + (phi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenData {
    pub f: Endomorphism,
    pub divisor: RDivisor,
    pub d: Rational,
    pub phi: FormalRationalFunction,
}

impl EigenData {
    pub fn new(
        f: Endomorphism,
        divisor: RDivisor,
        d: Rational,
        phi: FormalRationalFunction,
    ) -> Result<Self> {
        if d <= Rational::one() {
            return Err(Error::Precondition(format!("eigenvalue {d} must exceed 1")));
        }
        if !check_eigen(&f, &divisor, &d, &phi) {
            return Err(Error::Precondition(format!(
                "f^*(D) != {d} D + (phi) for f: {f}, phi = {phi}"
            )));
        }
        Ok(EigenData {
            f,
            divisor,
            d,
            phi,
        })
    }

    /// `T(g) = (f^* g + log|phi|) / d`.
    pub fn step(&self, g: &GreenFunction) -> Result<GreenFunction> {
        let pulled = self.f.pullback_green(g)?;
        Ok(pulled
            .minus_log_abs(&self.phi.inv())?
            .scale(&(Rational::one() / &self.d)))
    }
}

/// Orbit cap used to detect preperiodic branches.
pub const ORBIT_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalGreenResult {
    pub green: GreenFunction,
    pub steps: u32,
    pub lambda_sup: Rational,
    pub error_bound: Rational,
    /// Branches where the canonical profile is exact.
    pub exact_branches: Vec<PointCluster>,
}

impl CanonicalGreenResult {
    pub fn adelic(&self, e: &EigenData) -> AdelicDivisor {
        AdelicDivisor::new(e.divisor.clone(), self.green.clone()).expect("valid iterate")
    }
}

/// How far to iterate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Horizon {
    Steps(u32),
    Tolerance(Rational),
}

fn check_initial(e: &EigenData, g0: &GreenFunction) -> Result<GreenFunction> {
    if g0.has_tails() {
        return Err(Error::Precondition("canonical Green functions need a tail-free g0".into()));
    }
    AdelicDivisor::new(e.divisor.clone(), g0.clone())?;
    // the limit is independent of g0; normalising g0(root) = 0 keeps every
    // iterate at 0 there
    Ok(g0.shift(&-g0.v0()))
}

/// `lambda = f^* g0 - d g0 + log|phi|` for the normalised `g0`.
pub fn lambda_function(e: &EigenData, g0: &GreenFunction) -> Result<GreenFunction> {
    let g0 = check_initial(e, g0)?;
    e.step(&g0)?.sub(&g0).map(|diff| diff.scale(&e.d))
}

/// `g_0, ..., g_m` for the normalised `g0`.
pub fn iterates(e: &EigenData, g0: &GreenFunction, m: u32) -> Result<Vec<GreenFunction>> {
    let mut out = vec![check_initial(e, g0)?];
    for _ in 0..m {
        let next = e.step(out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

pub fn canonical_green(e: &EigenData, g0: &GreenFunction, horizon: &Horizon) -> Result<CanonicalGreenResult> {
    let lambda = lambda_function(e, g0)?;
    let lambda_sup = lambda
        .sup_abs()
        .ok_or_else(|| Error::Internal("lambda is unbounded".into()))?;
    let factor = &e.d - Rational::one();
    let bound = |m: u32| -> Rational { &lambda_sup / (pow_u(&e.d, m as u64) * &factor) };
    let steps = match horizon {
        Horizon::Steps(m) => *m,
        Horizon::Tolerance(tol) => {
            if !tol.is_positive() {
                return Err(Error::Precondition("tolerance must be > 0".into()));
            }
            let mut m = 0;
            while &bound(m) > tol {
                m += 1;
            }
            m
        }
    };
    let g = iterates(e, g0, steps)?.pop().expect("nonempty");
    let mut exact_branches = Vec::new();
    let mut exceptional = Vec::new();
    for (x, prof) in g.exceptional() {
        if e.f.is_preperiodic(x, ORBIT_CAP) {
            exact_branches.push(x.clone());
            exceptional.push((x.clone(), BranchProfile::linear(Rational::zero(), prof.final_slope().clone())));
        } else {
            exceptional.push((x.clone(), prof.clone()));
        }
    }
    let green = GreenFunction::new(g.v0().clone(), exceptional, Vec::new())?;
    Ok(CanonicalGreenResult {
        green,
        steps,
        error_bound: bound(steps),
        lambda_sup,
        exact_branches,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightReport {
    pub samples: usize,
    pub root_ok: bool,
    pub functional_equation_ok: bool,
    pub max_residual: Rational,
    pub lower_bound_ok: bool,
    pub preperiodic_leaves_ok: bool,
}

impl HeightReport {
    pub fn passed(&self) -> bool {
        self.root_ok && self.functional_equation_ok && self.lower_bound_ok && self.preperiodic_leaves_ok
    }
}

impl fmt::Display for HeightReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples: {}", self.samples)?;
        writeln!(f, "g(root) = 0: {}", self.root_ok)?;
        writeln!(f, "h(f(x)) = d h(x): {} (max residual {})", self.functional_equation_ok, self.max_residual)?;
        writeln!(f, "h >= -error: {}", self.lower_bound_ok)?;
        write!(f, "preperiodic leaves h = 0: {}", self.preperiodic_leaves_ok)
    }
}

/// Checks the canonical height identities on a deterministic sample of
/// tree points, with tolerances derived from the error bound.
pub fn canonical_height_checks(e: &EigenData, res: &CanonicalGreenResult) -> Result<HeightReport> {
    let a = res.adelic(e);
    let err = &res.error_bound;
    let d = &e.d;
    let mut clusters: Vec<PointCluster> = a.green().exceptional().keys().cloned().collect();
    clusters.push(PointCluster::Infinity);
    for k in -1..=1 {
        clusters.push(PointCluster::point(Rational::from_integer(k.into())));
    }
    // split so that every piece maps into a single branch class
    let mut preimages = Vec::new();
    for y in a.green().exceptional().keys() {
        preimages.extend(e.f.pullback_cluster(y).into_iter().map(|(x, _)| x));
    }
    let keys: Vec<PointCluster> = a.green().exceptional().keys().cloned().collect();
    let r = refine_supports(&[clusters, preimages, keys]);
    let mut samples = 0;
    let mut max_residual = Rational::zero();
    let mut lower_ok = true;
    let tol = (d + Rational::one()) * err;
    let nonneg_degree = !a.degree().is_negative();
    for x in &r.basis {
        let prof = a.green().profile_at(x)?;
        let mut ts: Vec<Extended> = prof.points().iter().skip(1).map(|(t, _)| Extended::Finite(t.clone())).collect();
        for (n, dd) in [(1, 2), (1, 1), (2, 1), (7, 3)] {
            ts.push(Extended::Finite(Rational::new(n.into(), dd.into())));
        }
        ts.push(Extended::PosInf);
        for (piece, y, e_loc) in e.f.pushforward_cluster(x) {
            let e_loc = Rational::from_integer(e_loc.into());
            for t in &ts {
                let here = a.height(&TreePoint { branch: Some(piece.clone()), t: t.clone() })?;
                let there_t = match t {
                    Extended::Finite(v) => Extended::Finite(v * &e_loc),
                    other => other.clone(),
                };
                let there = a.height(&TreePoint { branch: Some(y.clone()), t: there_t })?;
                let residual = (there - d * &here).abs();
                if residual > max_residual {
                    max_residual = residual;
                }
                if nonneg_degree && here < -err.clone() {
                    lower_ok = false;
                }
                samples += 1;
            }
        }
    }
    let preperiodic_ok = res.exact_branches.iter().all(|x| {
        a.height(&TreePoint::leaf(x.clone()))
            .map(|h| &h.abs() <= err)
            .unwrap_or(false)
    });
    Ok(HeightReport {
        samples,
        root_ok: &a.v0().abs() <= err,
        functional_equation_ok: max_residual <= tol,
        max_residual,
        lower_bound_ok: lower_ok,
        preperiodic_leaves_ok: preperiodic_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcaveReport {
    pub mu_equals_ord: bool,
    pub pseudo_effective: bool,
    pub dirichlet: DirichletCertificate,
}

/// For branch-concave `(D, g)`: `mu_x = ord_x(D)`, and Dirichlet, pseudo-
/// effectivity and `v0 >= 0, deg D >= 0` coincide.
pub fn concave_criteria(a: &AdelicDivisor) -> Result<ConcaveReport> {
    if let Some((b, _)) = a.green().concavity().into_iter().find(|(_, c)| !c) {
        return Err(Error::Precondition(format!(
            "branch {b} is not concave; use the general Dirichlet decision"
        )));
    }
    let v0_ok = !a.v0().is_negative();
    let mu_equals_ord = !v0_ok
        || a.green().exceptional().iter().all(|(x, p)| {
            p.mu() == Extended::Finite(a.divisor().ord(x).expect("valid divisor"))
        });
    let pseudo_effective = v0_ok && !a.degree().is_negative();
    let dirichlet = decide_dirichlet(a)?;
    if dirichlet.is_yes() != pseudo_effective {
        return Err(Error::Internal(
            "Dirichlet decision disagrees with the concave criterion".into(),
        ));
    }
    Ok(ConcaveReport {
        mu_equals_ord,
        pseudo_effective,
        dirichlet,
    })
}
