//! Piecewise-linear functions on a single branch `[0, inf]` of the tree.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Extended, Rational};

/// Continuous PL function on `[0, inf)` given by breakpoints `(t_i, v_i)`
/// with `t_0 = 0`, linear interpolation between them, and `final_slope`
/// after the last breakpoint. Stored in canonical form: no breakpoint is
/// collinear with its neighbours.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BranchProfile {
    points: Vec<(Rational, Rational)>,
    final_slope: Rational,
}

/// An affine function `slope * t + intercept`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub slope: Rational,
    pub intercept: Rational,
}

impl Line {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Line { slope, intercept }
    }

    pub fn at(&self, t: &Rational) -> Rational {
        &self.slope * t + &self.intercept
    }

    /// Abscissa where two non-parallel lines meet.
    pub fn meet(&self, other: &Line) -> Option<Rational> {
        if self.slope == other.slope {
            None
        } else {
            Some((&other.intercept - &self.intercept) / (&self.slope - &other.slope))
        }
    }
}

/// Value at `t` of the upper envelope of `lines` (which must be non-empty).
pub fn max_of_lines(lines: &[Line], t: &Rational) -> Rational {
    lines
        .iter()
        .map(|l| l.at(t))
        .max()
        .expect("empty line family")
}

/// Every abscissa in the open interval `(lo, hi)` where two of the lines meet.
pub fn kinks_between(lines: &[Line], lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            if let Some(t) = a.meet(b) {
                if &t > lo && &t < hi {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Exact `∫_lo^hi max_i lines_i(t) dt`.
pub fn integrate_max_of_lines(lines: &[Line], lo: &Rational, hi: &Rational) -> Rational {
    if hi <= lo {
        return Rational::zero();
    }
    let mut grid = kinks_between(lines, lo, hi);
    grid.push(lo.clone());
    grid.push(hi.clone());
    grid.sort();
    grid.dedup();
    let two = Rational::from_integer(2.into());
    grid.windows(2)
        .map(|w| {
            let fa = max_of_lines(lines, &w[0]);
            let fb = max_of_lines(lines, &w[1]);
            (&w[1] - &w[0]) * (fa + fb) / &two
        })
        .sum()
}

impl BranchProfile {
    pub fn new(points: Vec<(Rational, Rational)>, final_slope: Rational) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid("profile has no breakpoints".into()));
        }
        if !points[0].0.is_zero() {
            return Err(Error::Invalid(format!(
                "profile must start at t = 0, got t = {}",
                points[0].0
            )));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Invalid(
                    "profile breakpoints must be strictly increasing in t".into(),
                ));
            }
        }
        Ok(Self::canonical(points, final_slope))
    }

    fn canonical(points: Vec<(Rational, Rational)>, final_slope: Rational) -> Self {
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                let prev = out.last().expect("nonempty");
                let incoming = (&p.1 - &prev.1) / (&p.0 - &prev.0);
                let outgoing = match points.get(i + 1) {
                    Some(next) => (&next.1 - &p.1) / (&next.0 - &p.0),
                    None => final_slope.clone(),
                };
                if incoming == outgoing {
                    continue;
                }
            }
            out.push(p.clone());
        }
        BranchProfile {
            points: out,
            final_slope,
        }
    }

    /// `v0 + slope * t`.
    pub fn linear(v0: Rational, slope: Rational) -> Self {
        BranchProfile {
            points: vec![(Rational::zero(), v0)],
            final_slope: slope,
        }
    }

    pub fn constant(v0: Rational) -> Self {
        Self::linear(v0, Rational::zero())
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn final_slope(&self) -> &Rational {
        &self.final_slope
    }

    pub fn v0(&self) -> &Rational {
        &self.points[0].1
    }

    pub fn is_constant(&self) -> bool {
        self.points.len() == 1 && self.final_slope.is_zero()
    }

    pub fn last_point(&self) -> &(Rational, Rational) {
        self.points.last().expect("nonempty")
    }

    /// Slopes of every segment, the unbounded one last.
    pub fn slopes(&self) -> Vec<Rational> {
        let mut s: Vec<Rational> = self
            .points
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect();
        s.push(self.final_slope.clone());
        s
    }

    pub fn initial_slope(&self) -> Rational {
        self.slopes().swap_remove(0)
    }

    pub fn value(&self, t: &Rational) -> Rational {
        assert!(!t.is_negative(), "negative branch parameter");
        let idx = self.points.partition_point(|(ti, _)| ti <= t) - 1;
        let (ti, vi) = &self.points[idx];
        let slope = match self.points.get(idx + 1) {
            Some((tn, vn)) => (vn - vi) / (tn - ti),
            None => self.final_slope.clone(),
        };
        vi + slope * (t - ti)
    }

    /// Value on the extended parameter range; at `t = inf` the limit.
    pub fn value_ext(&self, t: &Extended) -> Extended {
        match t {
            Extended::Finite(t) => Extended::Finite(self.value(t)),
            Extended::PosInf => {
                if self.final_slope.is_positive() {
                    Extended::PosInf
                } else if self.final_slope.is_negative() {
                    Extended::NegInf
                } else {
                    Extended::Finite(self.last_point().1.clone())
                }
            }
            Extended::NegInf => panic!("negative branch parameter"),
        }
    }

    /// `lim_{t -> inf} (g(t) - slope * t)`.
    pub fn limit_minus_slope(&self) -> Rational {
        let (t, v) = self.last_point();
        v - &self.final_slope * t
    }

    pub fn min_value(&self) -> Extended {
        if self.final_slope.is_negative() {
            return Extended::NegInf;
        }
        Extended::Finite(self.points.iter().map(|p| p.1.clone()).min().expect("nonempty"))
    }

    pub fn min_breakpoint_value(&self) -> Rational {
        self.points.iter().map(|p| p.1.clone()).min().expect("nonempty")
    }

    pub fn max_abs_value(&self) -> Option<Rational> {
        if !self.final_slope.is_zero() {
            return None;
        }
        self.points.iter().map(|p| p.1.abs()).max()
    }

    /// `inf_{t > 0} g(t) / t`.
    pub fn mu(&self) -> Extended {
        let v0 = self.v0();
        if v0.is_negative() {
            return Extended::NegInf;
        }
        let mut best = self.final_slope.clone();
        for (t, v) in self.points.iter().skip(1) {
            let r = v / t;
            if r < best {
                best = r;
            }
        }
        if v0.is_zero() {
            let s = self.initial_slope();
            if s < best {
                best = s;
            }
        }
        Extended::Finite(best)
    }

    pub fn is_concave(&self) -> bool {
        self.slopes().windows(2).all(|w| w[1] <= w[0])
    }

    pub fn shift(&self, c: &Rational) -> Self {
        BranchProfile {
            points: self.points.iter().map(|(t, v)| (t.clone(), v + c)).collect(),
            final_slope: self.final_slope.clone(),
        }
    }

    /// `g(t) + slope * t`.
    pub fn add_linear(&self, slope: &Rational) -> Self {
        Self::canonical(
            self.points
                .iter()
                .map(|(t, v)| (t.clone(), v + slope * t))
                .collect(),
            &self.final_slope + slope,
        )
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::constant(Rational::zero());
        }
        BranchProfile {
            points: self.points.iter().map(|(t, v)| (t.clone(), v * k)).collect(),
            final_slope: &self.final_slope * k,
        }
    }

    /// `t -> g(e * t)` for `e > 0`.
    pub fn reparametrize(&self, e: &Rational) -> Self {
        assert!(e.is_positive(), "reparametrization factor must be positive");
        BranchProfile {
            points: self.points.iter().map(|(t, v)| (t / e, v.clone())).collect(),
            final_slope: &self.final_slope * e,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut ts: Vec<Rational> = self
            .points
            .iter()
            .chain(other.points.iter())
            .map(|p| p.0.clone())
            .collect();
        ts.sort();
        ts.dedup();
        let points = ts
            .into_iter()
            .map(|t| {
                let v = self.value(&t) + other.value(&t);
                (t, v)
            })
            .collect();
        Self::canonical(points, &self.final_slope + &other.final_slope)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    /// Affine pieces `t -> tau_i * m + n * v_i` evaluated as a minimum give
    /// `inf_t (t m + n g(t))` once `m + n * slope >= 0`.
    pub fn b_min(&self, m: &Rational, n: &Rational) -> Extended {
        if (m + n * &self.final_slope).is_negative() {
            return Extended::NegInf;
        }
        Extended::Finite(
            self.points
                .iter()
                .map(|(t, v)| t * m + n * v)
                .min()
                .expect("nonempty"),
        )
    }

    /// Parses `(0,0);(1,1)` plus a slope.
    pub fn parse(points: &str, slope: &str) -> Result<Self> {
        let mut pts = Vec::new();
        for chunk in points.split(';') {
            let chunk = chunk.trim();
            let inner = chunk
                .strip_prefix('(')
                .and_then(|c| c.strip_suffix(')'))
                .ok_or_else(|| Error::Invalid(format!("malformed breakpoint '{chunk}'")))?;
            let (t, v) = inner
                .split_once(',')
                .ok_or_else(|| Error::Invalid(format!("malformed breakpoint '{chunk}'")))?;
            pts.push((parse_rational(t)?, parse_rational(v)?));
        }
        Self::new(pts, parse_rational(slope)?)
    }

    /// The breakpoint list in the `(t,v);(t,v)` syntax.
    pub fn points_string(&self) -> String {
        self.points
            .iter()
            .map(|(t, v)| format!("({t},{v})"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for BranchProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} slope={}", self.points_string(), self.final_slope)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn p(pts: &[(i64, i64)], slope: i64) -> BranchProfile {
        BranchProfile::new(
            pts.iter().map(|&(t, v)| (qi(t), qi(v))).collect(),
            qi(slope),
        )
        .unwrap()
    }

    #[test]
    fn canonical_form_drops_collinear_points() {
        let a = p(&[(0, 0), (1, 1), (2, 2)], 1);
        assert_eq!(a, BranchProfile::linear(qi(0), qi(1)));
        let b = p(&[(0, 0), (1, -1), (3, -1)], 0);
        assert_eq!(b.points().len(), 2);
        assert!(BranchProfile::new(vec![(qi(1), qi(0))], qi(0)).is_err());
        assert!(BranchProfile::new(vec![(qi(0), qi(0)), (qi(0), qi(1))], qi(0)).is_err());
    }

    #[test]
    fn evaluation_and_limits() {
        let g = p(&[(0, 0), (1, -1)], 0);
        assert_eq!(g.value(&q(1, 2)), q(-1, 2));
        assert_eq!(g.value(&qi(5)), qi(-1));
        assert_eq!(g.value_ext(&Extended::PosInf), Extended::Finite(qi(-1)));
        let e1 = BranchProfile::linear(qi(0), qi(1));
        assert_eq!(e1.value(&qi(3)), qi(3));
        assert_eq!(e1.value_ext(&Extended::PosInf), Extended::PosInf);
        assert_eq!(e1.limit_minus_slope(), qi(0));
    }

    #[test]
    fn mu_examples() {
        assert_eq!(BranchProfile::linear(qi(0), qi(1)).mu(), Extended::Finite(qi(1)));
        assert_eq!(BranchProfile::constant(qi(0)).mu(), Extended::Finite(qi(0)));
        let tail = p(&[(0, 0), (1, -1)], 0).scale(&q(1, 4));
        assert_eq!(tail.mu(), Extended::Finite(q(-1, 4)));
        assert_eq!(BranchProfile::constant(qi(-1)).mu(), Extended::NegInf);
        assert_eq!(p(&[(0, 1), (1, 0), (2, 0)], 1).mu(), Extended::Finite(qi(0)));
        assert_eq!(p(&[(0, 1), (2, 0)], 1).mu(), Extended::Finite(qi(0)));
    }

    #[test]
    fn concavity() {
        assert!(BranchProfile::linear(qi(0), qi(1)).is_concave());
        assert!(!p(&[(0, 0), (1, 0)], 1).is_concave());
        assert!(!p(&[(0, 0), (1, -1)], 0).is_concave());
        assert!(p(&[(0, 0), (1, 2)], 1).is_concave());
    }

    #[test]
    fn b_min_examples() {
        let g = BranchProfile::linear(qi(1), qi(1));
        assert_eq!(g.b_min(&qi(-1), &qi(1)), Extended::Finite(qi(1)));
        assert_eq!(g.b_min(&qi(-2), &qi(1)), Extended::NegInf);
    }

    #[test]
    fn line_integration() {
        let lines = vec![Line::new(qi(0), qi(0)), Line::new(qi(1), qi(-1))];
        assert_eq!(integrate_max_of_lines(&lines, &qi(0), &qi(3)), qi(2));
    }

    fn arb_profile() -> impl Strategy<Value = BranchProfile> {
        (
            -4i64..=4,
            prop::collection::vec((1i64..=4, -4i64..=4), 0..5),
            -3i64..=3,
        )
            .prop_map(|(v0, steps, slope)| {
                let mut pts = vec![(qi(0), qi(v0))];
                let mut t = qi(0);
                for (dt, v) in steps {
                    t += q(dt, 2);
                    pts.push((t.clone(), q(v, 2)));
                }
                BranchProfile::new(pts, qi(slope)).unwrap()
            })
    }

    proptest! {
        #[test]
        fn add_is_pointwise(a in arb_profile(), b in arb_profile(), t in 0i64..40) {
            let t = q(t, 4);
            prop_assert_eq!(a.add(&b).value(&t), a.value(&t) + b.value(&t));
        }

        #[test]
        fn reparametrize_is_composition(a in arb_profile(), e in 1i64..4, t in 0i64..40) {
            let t = q(t, 4);
            prop_assert_eq!(a.reparametrize(&qi(e)).value(&t), a.value(&(&t * qi(e))));
        }

        #[test]
        fn mu_is_lower_bound_of_ratio(a in arb_profile(), t in 1i64..80) {
            let t = q(t, 8);
            if let Extended::Finite(m) = a.mu() {
                prop_assert!(a.value(&t) / &t >= m);
            }
        }

        #[test]
        fn b_min_is_lower_bound(a in arb_profile(), m in -6i64..6, t in 0i64..40) {
            let t = q(t, 4);
            if let Extended::Finite(b) = a.b_min(&qi(m), &qi(1)) {
                prop_assert!(&t * qi(m) + a.value(&t) >= b);
            }
        }
    }
}
