//! Green functions on the Berkovich tree of the projective line and the
//! adelic divisors they define.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cluster::{refine_supports, PointCluster};
use crate::divisor::{FormalRationalFunction, RDivisor};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::profile::BranchProfile;
use crate::rational::{ceil_int, floor_int, is_integer, pow_u, Extended, Rational};

/// A point of the tree: the root, or parameter `t` on the branch toward a
/// cluster. `t = 0` is the root on every branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePoint {
    pub branch: Option<PointCluster>,
    pub t: Extended,
}

impl TreePoint {
    pub fn root() -> Self {
        TreePoint {
            branch: None,
            t: Extended::zero(),
        }
    }

    pub fn on(x: PointCluster, t: Rational) -> Self {
        assert!(!t.is_negative(), "negative branch parameter");
        TreePoint {
            branch: Some(x),
            t: Extended::Finite(t),
        }
    }

    pub fn leaf(x: PointCluster) -> Self {
        TreePoint {
            branch: Some(x),
            t: Extended::PosInf,
        }
    }

    pub fn is_root(&self) -> bool {
        self.branch.is_none() || self.t == Extended::zero()
    }

    /// Parses `root`, `<cluster>:<t>` or `<cluster>:inf`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "root" || s == "eta0" {
            return Ok(TreePoint::root());
        }
        let (c, t) = s.rsplit_once(':').ok_or_else(|| Error::Parse {
            line: 0,
            column: 1,
            message: format!("expected '<cluster>:<t>', got '{s}'"),
        })?;
        let x = PointCluster::parse(c)?;
        let t = Extended::parse(t)?;
        if t < Extended::zero() {
            return Err(Error::Invalid("branch parameter must be >= 0".into()));
        }
        Ok(TreePoint { branch: Some(x), t })
    }
}

impl fmt::Display for TreePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.branch {
            None => write!(f, "root"),
            Some(x) => write!(f, "{x}:{}", self.t),
        }
    }
}

/// The family of branches `x_n = z - (c0 + c1 n)`, `n >= n0`, carrying
/// `v0 + r^n psi(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeometricTail {
    pub c0: Rational,
    pub c1: Rational,
    pub n0: u64,
    pub ratio: Rational,
    pub base: BranchProfile,
}

impl GeometricTail {
    pub fn new(
        c0: Rational,
        c1: Rational,
        n0: u64,
        ratio: Rational,
        base: BranchProfile,
    ) -> Result<Self> {
        let t = GeometricTail {
            c0,
            c1,
            n0,
            ratio,
            base,
        };
        let problems = t.problems();
        if let Some(p) = problems.first() {
            return Err(Error::Invalid(p.clone()));
        }
        Ok(t)
    }

    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.c1.is_zero() {
            out.push("tail step c1 must be nonzero".into());
        }
        if !self.ratio.is_positive() || self.ratio >= Rational::one() {
            out.push(format!("tail ratio {} must lie in (0,1)", self.ratio));
        }
        if !self.base.v0().is_zero() {
            out.push("tail base profile must vanish at t = 0".into());
        }
        if !self.base.final_slope().is_zero() {
            out.push("tail base profile must have final slope 0".into());
        }
        out
    }

    pub fn point(&self, n: u64) -> Rational {
        &self.c0 + &self.c1 * Rational::from_integer(n.into())
    }

    pub fn cluster(&self, n: u64) -> PointCluster {
        PointCluster::point(self.point(n))
    }

    pub fn scale_at(&self, n: u64) -> Rational {
        pow_u(&self.ratio, n)
    }

    pub fn member_profile(&self, v0: &Rational, n: u64) -> BranchProfile {
        self.base.scale(&self.scale_at(n)).shift(v0)
    }

    /// `min psi <= 0`.
    pub fn min_psi(&self) -> Rational {
        self.base.min_breakpoint_value()
    }

    /// `mu(psi) <= 0`.
    pub fn mu_psi(&self) -> Rational {
        self.base
            .mu()
            .finite()
            .cloned()
            .expect("tail base vanishes at the root")
    }

    pub fn index_of_point(&self, a: &Rational) -> Option<u64> {
        let n = (a - &self.c0) / &self.c1;
        if !is_integer(&n) {
            return None;
        }
        let n = n.to_integer().to_u64()?;
        (n >= self.n0).then_some(n)
    }

    /// Indices `n >= n0` with `x_n` contained in `x`.
    pub fn members_in(&self, x: &PointCluster) -> Vec<u64> {
        let p = match x {
            PointCluster::Infinity => return Vec::new(),
            PointCluster::Finite(p) => p,
        };
        if p.deg() == 1 {
            return self.index_of_point(&-p.coeff(0)).into_iter().collect();
        }
        // integer roots of p(c0 + c1 w)
        let composed = p.homogeneous_compose(
            &Poly::from_coeffs(vec![self.c0.clone(), self.c1.clone()]),
            &Poly::one(),
        );
        let monic = composed.monic();
        let bound: Rational = Rational::one()
            + monic
                .coeffs()
                .iter()
                .take(monic.deg())
                .map(|c| c.abs())
                .max()
                .unwrap_or_else(Rational::zero);
        let hi = floor_int(&bound);
        let mut out = Vec::new();
        let mut w = BigInt::from(self.n0);
        while w <= hi {
            if monic.eval(&Rational::from_integer(w.clone())).is_zero() {
                out.push(w.to_u64().expect("small index"));
            }
            w += 1;
        }
        out
    }

    /// True when the two progressions share a point.
    pub fn meets(&self, other: &GeometricTail) -> bool {
        // c1a n - c1b m = c0b - c0a with n >= n0a, m >= n0b
        let l = [&self.c0, &self.c1, &other.c0, &other.c1]
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let lr = Rational::from_integer(l);
        let a = (&self.c1 * &lr).to_integer();
        let b = (&other.c1 * &lr).to_integer();
        let c = ((&other.c0 - &self.c0) * &lr).to_integer();
        let eg = a.extended_gcd(&b);
        let g = eg.gcd;
        if !(&c % &g).is_zero() {
            return false;
        }
        let n_p = &eg.x * &c / &g;
        let m_p = -(&eg.y * &c / &g);
        // n = n_p + (b/g) k, m = m_p + (a/g) k
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for (coef, rhs) in [
            (&b / &g, BigInt::from(self.n0) - &n_p),
            (&a / &g, BigInt::from(other.n0) - &m_p),
        ] {
            let bound = Rational::new(rhs, coef.clone());
            if coef.is_positive() {
                let k = ceil_int(&bound);
                lo = Some(lo.map_or(k.clone(), |v| v.max(k)));
            } else {
                let k = floor_int(&bound);
                hi = Some(hi.map_or(k.clone(), |v| v.min(k)));
            }
        }
        match (lo, hi) {
            (Some(l), Some(h)) => l <= h,
            _ => true,
        }
    }

    fn same_rule(&self, other: &GeometricTail) -> bool {
        self.c0 == other.c0 && self.c1 == other.c1 && self.ratio == other.ratio
    }
}

/// A Green function in the piecewise-linear model: value `v0` at the root,
/// explicit profiles on finitely many branches, geometric tails, and the
/// constant `v0` on every other branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GreenFunction {
    v0: Rational,
    exceptional: BTreeMap<PointCluster, BranchProfile>,
    tails: Vec<GeometricTail>,
}

impl GreenFunction {
    pub fn constant(v0: Rational) -> Self {
        GreenFunction {
            v0,
            exceptional: BTreeMap::new(),
            tails: Vec::new(),
        }
    }

    /// Builds and normalises. Checks root continuity and coprimality of the
    /// exceptional clusters; tail checks live in [`AdelicDivisor`].
    pub fn new(
        v0: Rational,
        exceptional: Vec<(PointCluster, BranchProfile)>,
        tails: Vec<GeometricTail>,
    ) -> Result<Self> {
        for (x, p) in &exceptional {
            if p.v0() != &v0 {
                return Err(Error::Invalid(format!(
                    "branch {x}: profile starts at {} but g(root) = {v0}",
                    p.v0()
                )));
            }
        }
        for (i, (x, _)) in exceptional.iter().enumerate() {
            for (y, _) in &exceptional[i + 1..] {
                if !x.is_coprime(y) {
                    return Err(Error::Invalid(format!(
                        "branches {x} and {y} are not coprime"
                    )));
                }
            }
        }
        let mut g = GreenFunction {
            v0,
            exceptional: exceptional.into_iter().collect(),
            tails,
        };
        g.normalize();
        Ok(g)
    }

    /// Drops default-valued profiles and merges finite clusters carrying the
    /// same profile.
    fn normalize(&mut self) {
        let mut by_profile: BTreeMap<Vec<u8>, (Vec<PointCluster>, BranchProfile)> = BTreeMap::new();
        let mut out = BTreeMap::new();
        for (x, p) in std::mem::take(&mut self.exceptional) {
            if p.is_constant() {
                continue;
            }
            if x.is_infinity() {
                out.insert(x, p);
                continue;
            }
            let key = p.to_string().into_bytes();
            by_profile.entry(key).or_insert_with(|| (Vec::new(), p.clone())).0.push(x);
        }
        for (_, (xs, p)) in by_profile {
            let prod = xs
                .iter()
                .filter_map(|x| x.poly().cloned())
                .fold(Poly::one(), |acc, q| &acc * &q);
            out.insert(PointCluster::Finite(prod), p);
        }
        self.exceptional = out;
    }

    pub fn v0(&self) -> &Rational {
        &self.v0
    }

    pub fn exceptional(&self) -> &BTreeMap<PointCluster, BranchProfile> {
        &self.exceptional
    }

    pub fn tails(&self) -> &[GeometricTail] {
        &self.tails
    }

    pub fn has_tails(&self) -> bool {
        !self.tails.is_empty()
    }

    /// Tail members (tail index, member index) lying in `x`.
    pub fn tail_members_in(&self, x: &PointCluster) -> Vec<(usize, u64)> {
        self.tails
            .iter()
            .enumerate()
            .flat_map(|(i, t)| t.members_in(x).into_iter().map(move |n| (i, n)))
            .collect()
    }

    /// The profile along `x`; errors if `x` meets differently profiled branches.
    pub fn profile_at(&self, x: &PointCluster) -> Result<BranchProfile> {
        let mut met: Option<&BranchProfile> = None;
        for (k, p) in &self.exceptional {
            if x.is_subset_of(k) {
                return Ok(p.clone());
            }
            if !x.is_coprime(k) {
                match met {
                    Some(q) if q != p => return Err(Error::AmbiguousBranch(x.to_string())),
                    _ => met = Some(p),
                }
            }
        }
        if met.is_some() {
            return Err(Error::AmbiguousBranch(x.to_string()));
        }
        let members = self.tail_members_in(x);
        match members.as_slice() {
            [] => Ok(BranchProfile::constant(self.v0.clone())),
            [(i, n)] if x.degree() == 1 => Ok(self.tails[*i].member_profile(&self.v0, *n)),
            _ => Err(Error::AmbiguousBranch(x.to_string())),
        }
    }

    /// Refines `clusters` against the exceptional set and splits off tail
    /// members, so that every returned piece has a well-defined profile.
    pub fn branch_pieces(&self, clusters: &[PointCluster]) -> Vec<PointCluster> {
        let keys: Vec<PointCluster> = self.exceptional.keys().cloned().collect();
        let r = refine_supports(&[clusters.to_vec(), keys]);
        let mut out = Vec::new();
        for b in &r.basis {
            if !clusters.iter().any(|c| b.is_subset_of(c)) {
                continue;
            }
            let members = self.tail_members_in(b);
            if members.is_empty() {
                out.push(b.clone());
                continue;
            }
            let mut rest = b.poly().expect("tails are finite").clone();
            for (i, n) in members {
                let m = self.tails[i].cluster(n);
                rest = rest.exact_div(m.poly().expect("finite"));
                out.push(m);
            }
            if !rest.is_constant() {
                out.push(PointCluster::Finite(rest.monic()));
            }
        }
        out.sort();
        out
    }

    pub fn eval(&self, p: &TreePoint) -> Result<Extended> {
        match &p.branch {
            None => Ok(Extended::Finite(self.v0.clone())),
            Some(x) => Ok(self.profile_at(x)?.value_ext(&p.t)),
        }
    }

    /// Moves tail members `n0..=upto` of tail `i` into the exceptional set.
    pub fn promote_tail_prefix(&mut self, i: usize, upto: u64) {
        let tail = self.tails[i].clone();
        for n in tail.n0..=upto {
            self.exceptional
                .insert(tail.cluster(n), tail.member_profile(&self.v0, n));
        }
        self.tails[i].n0 = upto + 1;
        self.normalize();
    }

    /// Promotes every tail member lying in one of `clusters`, together with
    /// all earlier members of its tail.
    pub fn promote_tail_members(&mut self, clusters: &[PointCluster]) {
        for i in 0..self.tails.len() {
            let top = clusters
                .iter()
                .flat_map(|c| self.tails[i].members_in(c))
                .max();
            if let Some(top) = top {
                self.promote_tail_prefix(i, top);
            }
        }
    }

    pub fn shift(&self, c: &Rational) -> Self {
        GreenFunction {
            v0: &self.v0 + c,
            exceptional: self
                .exceptional
                .iter()
                .map(|(x, p)| (x.clone(), p.shift(c)))
                .collect(),
            tails: self.tails.clone(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut g = GreenFunction {
            v0: &self.v0 * k,
            exceptional: self
                .exceptional
                .iter()
                .map(|(x, p)| (x.clone(), p.scale(k)))
                .collect(),
            tails: if k.is_zero() {
                Vec::new()
            } else {
                self.tails
                    .iter()
                    .map(|t| GeometricTail {
                        base: t.base.scale(k),
                        ..t.clone()
                    })
                    .collect()
            },
        };
        g.normalize();
        g
    }

    /// Pointwise sum. Tails must follow the same point rule or be disjoint.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut a = self.clone();
        let mut b = other.clone();
        let a_keys: Vec<PointCluster> = a.exceptional.keys().cloned().collect();
        let b_keys: Vec<PointCluster> = b.exceptional.keys().cloned().collect();
        a.promote_tail_members(&b_keys);
        b.promote_tail_members(&a_keys);
        // align tails sharing a rule
        let mut tails: Vec<GeometricTail> = Vec::new();
        let mut b_used = vec![false; b.tails.len()];
        for i in 0..a.tails.len() {
            let partner = (0..b.tails.len()).find(|&j| !b_used[j] && a.tails[i].same_rule(&b.tails[j]));
            match partner {
                Some(j) => {
                    b_used[j] = true;
                    let n0 = a.tails[i].n0.max(b.tails[j].n0);
                    if a.tails[i].n0 < n0 {
                        a.promote_tail_prefix(i, n0 - 1);
                    }
                    if b.tails[j].n0 < n0 {
                        b.promote_tail_prefix(j, n0 - 1);
                    }
                    tails.push(GeometricTail {
                        base: a.tails[i].base.add(&b.tails[j].base),
                        ..a.tails[i].clone()
                    });
                }
                None => tails.push(a.tails[i].clone()),
            }
        }
        for (j, t) in b.tails.iter().enumerate() {
            if !b_used[j] {
                tails.push(t.clone());
            }
        }
        for (i, t) in tails.iter().enumerate() {
            for u in &tails[i + 1..] {
                if t.meets(u) {
                    return Err(Error::Invalid(
                        "cannot add Green functions with incompatible tails".into(),
                    ));
                }
            }
        }
        // exceptional parts: after promotion neither side has tail members
        // inside the other's keys
        let mut keys: Vec<PointCluster> = a.exceptional.keys().cloned().collect();
        keys.extend(b.exceptional.keys().cloned());
        let r = refine_supports(&[keys]);
        let mut exceptional = Vec::new();
        for piece in r.basis {
            let pa = a.profile_at(&piece)?;
            let pb = b.profile_at(&piece)?;
            exceptional.push((piece, pa.add(&pb)));
        }
        GreenFunction::new(&a.v0 + &b.v0, exceptional, tails)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    /// `g - log|s|`: adds `ord_x(s) t` on every branch. Tail members in the
    /// support of `s` are rejected.
    pub fn minus_log_abs(&self, s: &FormalRationalFunction) -> Result<Self> {
        let div = s.principal_divisor();
        if div.is_zero() {
            return Ok(self.clone());
        }
        for x in div.support() {
            if let Some((i, n)) = self.tail_members_in(&x).first() {
                return Err(Error::TailCollision(self.tails[*i].cluster(*n).to_string()));
            }
        }
        let mut clusters: Vec<PointCluster> = self.exceptional.keys().cloned().collect();
        clusters.extend(div.support());
        let pieces = self.branch_pieces(&clusters);
        let mut exceptional = Vec::new();
        for piece in pieces {
            let base = self.profile_at(&piece)?;
            exceptional.push((piece.clone(), base.add_linear(&div.ord(&piece)?)));
        }
        GreenFunction::new(self.v0.clone(), exceptional, self.tails.clone())
    }

    /// `sup |g|`, finite when every branch is bounded.
    pub fn sup_abs(&self) -> Option<Rational> {
        let mut best = self.v0.abs();
        for p in self.exceptional.values() {
            best = best.max(p.max_abs_value()?);
        }
        for t in &self.tails {
            let s = t.scale_at(t.n0);
            for (_, v) in t.base.points() {
                best = best.max((&self.v0 + &s * v).abs());
            }
        }
        Some(best)
    }

    /// Concavity of every exceptional profile and tail base.
    pub fn concavity(&self) -> Vec<(String, bool)> {
        let mut out: Vec<(String, bool)> = self
            .exceptional
            .iter()
            .map(|(x, p)| (x.to_string(), p.is_concave()))
            .collect();
        for (i, t) in self.tails.iter().enumerate() {
            out.push((format!("tail {i}"), t.base.is_concave()));
        }
        out
    }

    pub fn is_branch_concave(&self) -> bool {
        self.concavity().iter().all(|(_, c)| *c)
    }
}

/// One failed validity condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub branch: String,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.branch, self.reason)
    }
}

/// A pair `(D, g)` of an R-divisor and a Green function for it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdelicDivisor {
    divisor: RDivisor,
    green: GreenFunction,
}

impl AdelicDivisor {
    pub fn new(divisor: RDivisor, green: GreenFunction) -> Result<Self> {
        let violations = validate(&divisor, &green);
        if !violations.is_empty() {
            let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::Invalid(text.join("; ")));
        }
        Ok(AdelicDivisor { divisor, green })
    }

    /// `(0, c)`.
    pub fn constant(c: Rational) -> Self {
        AdelicDivisor {
            divisor: RDivisor::zero(),
            green: GreenFunction::constant(c),
        }
    }

    /// `([inf], log max{1, |z|}) + c`.
    pub fn standard(c: Rational) -> Self {
        let g = GreenFunction::new(
            c.clone(),
            vec![(PointCluster::Infinity, BranchProfile::linear(c, Rational::one()))],
            Vec::new(),
        )
        .expect("valid");
        AdelicDivisor {
            divisor: RDivisor::point(PointCluster::Infinity),
            green: g,
        }
    }

    /// The principal adelic divisor `((s), -log|s|)`.
    pub fn principal(s: &FormalRationalFunction) -> Self {
        AdelicDivisor::constant(Rational::zero())
            .add_principal(s)
            .expect("no tails")
    }

    pub fn divisor(&self) -> &RDivisor {
        &self.divisor
    }

    pub fn green(&self) -> &GreenFunction {
        &self.green
    }

    pub fn v0(&self) -> &Rational {
        &self.green.v0
    }

    pub fn degree(&self) -> Rational {
        self.divisor.degree()
    }

    pub fn eval_green(&self, p: &TreePoint) -> Result<Extended> {
        self.green.eval(p)
    }

    /// `g(x,t) - t ord_x(D)`, with the finite limit at leaves.
    pub fn height(&self, p: &TreePoint) -> Result<Rational> {
        let x = match &p.branch {
            None => return Ok(self.green.v0.clone()),
            Some(x) => x,
        };
        let prof = self.green.profile_at(x)?;
        Ok(match &p.t {
            Extended::Finite(t) => prof.value(t) - t * prof.final_slope(),
            Extended::PosInf => prof.limit_minus_slope(),
            Extended::NegInf => unreachable!("negative branch parameter"),
        })
    }

    pub fn essential_minimum(&self) -> Rational {
        self.green.v0.clone()
    }

    /// `(D + (s), g - log|s|)`.
    pub fn add_principal(&self, s: &FormalRationalFunction) -> Result<Self> {
        let green = self.green.minus_log_abs(s)?;
        Ok(AdelicDivisor {
            divisor: self.divisor.add(&s.principal_divisor()),
            green,
        })
    }

    /// Moves tail members touched by `s` into the exceptional set; the
    /// function itself is unchanged.
    pub fn promote_tails_for(&self, s: &FormalRationalFunction) -> Self {
        let mut g = self.green.clone();
        g.promote_tail_members(&s.principal_divisor().support());
        AdelicDivisor {
            divisor: self.divisor.clone(),
            green: g,
        }
    }

    pub fn with_green(&self, green: GreenFunction) -> Result<Self> {
        AdelicDivisor::new(self.divisor.clone(), green)
    }

    pub fn shift(&self, c: &Rational) -> Self {
        AdelicDivisor {
            divisor: self.divisor.clone(),
            green: self.green.shift(c),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        AdelicDivisor {
            divisor: self.divisor.scale(k),
            green: self.green.scale(k),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(AdelicDivisor {
            divisor: self.divisor.add(&other.divisor),
            green: self.green.add(&other.green)?,
        })
    }

    pub fn is_effective(&self) -> bool {
        if !self.divisor.is_effective() || self.green.v0.is_negative() {
            return false;
        }
        if self
            .green
            .exceptional
            .values()
            .any(|p| !p.min_value().is_nonnegative())
        {
            return false;
        }
        self.green.tails.iter().all(|t| {
            !(&self.green.v0 + t.scale_at(t.n0) * t.min_psi()).is_negative()
        })
    }

    pub fn violations(&self) -> Vec<Violation> {
        validate(&self.divisor, &self.green)
    }
}

/// All violations of the validity conditions for `(d, g)`.
pub fn validate(d: &RDivisor, g: &GreenFunction) -> Vec<Violation> {
    let mut out = Vec::new();
    let v = |branch: String, reason: String| Violation { branch, reason };
    for (x, p) in &g.exceptional {
        if p.v0() != &g.v0 {
            out.push(v(x.to_string(), format!("profile(0) = {} != v0 = {}", p.v0(), g.v0)));
        }
    }
    let keys: Vec<&PointCluster> = g.exceptional.keys().collect();
    for (i, x) in keys.iter().enumerate() {
        for y in &keys[i + 1..] {
            if !x.is_coprime(y) {
                out.push(v(x.to_string(), format!("not coprime to branch {y}")));
            }
        }
    }
    for (i, t) in g.tails.iter().enumerate() {
        let label = format!("tail {i}");
        for p in t.problems() {
            out.push(v(label.clone(), p));
        }
        for x in &keys {
            if let Some(n) = t.members_in(x).first() {
                out.push(v(
                    label.clone(),
                    format!("member {} overlaps exceptional branch {x}", t.cluster(*n)),
                ));
            }
        }
        for x in d.support() {
            if let Some(n) = t.members_in(&x).first() {
                out.push(v(
                    label.clone(),
                    format!("member {} lies in the support of D", t.cluster(*n)),
                ));
            }
        }
        for (j, u) in g.tails.iter().enumerate().skip(i + 1) {
            if t.meets(u) {
                out.push(v(label.clone(), format!("shares a point with tail {j}")));
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    let mut clusters: Vec<PointCluster> = keys.into_iter().cloned().collect();
    clusters.extend(d.support());
    let r = refine_supports(&[clusters]);
    for piece in r.basis {
        let prof = match g.profile_at(&piece) {
            Ok(p) => p,
            Err(e) => {
                out.push(v(piece.to_string(), e.to_string()));
                continue;
            }
        };
        let ord = d.ord(&piece).expect("refined");
        if prof.final_slope() != &ord {
            out.push(v(
                piece.to_string(),
                format!("slope {} != ord {}", prof.final_slope(), ord),
            ));
        }
    }
    out
}
