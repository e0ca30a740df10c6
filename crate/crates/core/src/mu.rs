//! The slope invariants `mu_x`, `mu_tot` and the Dirichlet and
//! pseudo-effectivity decisions.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::cluster::PointCluster;
use crate::divisor::{solve_principal, FormalRationalFunction, RDivisor};
use crate::error::{Error, Result};
use crate::green::{AdelicDivisor, GeometricTail};
use crate::rational::{Extended, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureReason {
    NegativeMuTot,
    InfinitelyManyNegativeMu,
    MuTotMinusInfinity,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FailureReason::NegativeMuTot => "NegativeMuTot",
            FailureReason::InfinitelyManyNegativeMu => "InfinitelyManyNegativeMu",
            FailureReason::MuTotMinusInfinity => "MuTotMinusInfinity",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DirichletCertificate {
    Yes { witness: FormalRationalFunction },
    No { reason: FailureReason },
}

impl DirichletCertificate {
    pub fn is_yes(&self) -> bool {
        matches!(self, DirichletCertificate::Yes { .. })
    }

    pub fn witness(&self) -> Option<&FormalRationalFunction> {
        match self {
            DirichletCertificate::Yes { witness } => Some(witness),
            DirichletCertificate::No { .. } => None,
        }
    }
}

impl fmt::Display for DirichletCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirichletCertificate::Yes { witness } => write!(f, "yes: witness {witness}"),
            DirichletCertificate::No { reason } => write!(f, "no: {reason}"),
        }
    }
}

pub fn mu_x(a: &AdelicDivisor, x: &PointCluster) -> Result<Extended> {
    Ok(a.green().profile_at(x)?.mu())
}

/// `mu` of tail member `n`.
pub fn tail_member_mu(v0: &Rational, tail: &GeometricTail, n: u64) -> Extended {
    tail.member_profile(v0, n).mu()
}

/// For `v0 > 0`: the least `n >= n0` from which every member has `mu = 0`.
pub fn tail_negative_cutoff(v0: &Rational, tail: &GeometricTail) -> u64 {
    let depth = -tail.min_psi();
    let mut n = tail.n0;
    let mut s = tail.scale_at(n);
    while &s * &depth > *v0 {
        n += 1;
        s *= &tail.ratio;
    }
    n
}

/// Sum of `mu_{x_n}` over one tail; `None` when `v0 < 0`.
pub fn tail_mu_sum(v0: &Rational, tail: &GeometricTail) -> Option<Rational> {
    if v0.is_negative() {
        return None;
    }
    if v0.is_zero() {
        let r = &tail.ratio;
        return Some(tail.mu_psi() * tail.scale_at(tail.n0) / (Rational::one() - r));
    }
    let cutoff = tail_negative_cutoff(v0, tail);
    Some(
        (tail.n0..cutoff)
            .map(|n| {
                tail_member_mu(v0, tail, n)
                    .finite()
                    .cloned()
                    .expect("v0 >= 0")
            })
            .sum(),
    )
}

/// `sum_x mu_x deg(x)` over all closed points.
pub fn mu_tot(a: &AdelicDivisor) -> Extended {
    let v0 = a.v0();
    if v0.is_negative() {
        return Extended::NegInf;
    }
    let mut total = Rational::zero();
    for (x, p) in a.green().exceptional() {
        let m = p.mu().finite().cloned().expect("v0 >= 0");
        total += m * Rational::from_integer(x.degree().into());
    }
    for t in a.green().tails() {
        total += tail_mu_sum(v0, t).expect("v0 >= 0");
    }
    Extended::Finite(total)
}

/// Decides whether some `s` makes `(D + (s), g - log|s|)` effective and
/// produces such an `s`.
pub fn decide_dirichlet(a: &AdelicDivisor) -> Result<DirichletCertificate> {
    let v0 = a.v0().clone();
    if v0.is_negative() {
        return Ok(DirichletCertificate::No {
            reason: FailureReason::MuTotMinusInfinity,
        });
    }
    if v0.is_zero() && a.green().tails().iter().any(|t| t.mu_psi().is_negative()) {
        return Ok(DirichletCertificate::No {
            reason: FailureReason::InfinitelyManyNegativeMu,
        });
    }
    let total = match mu_tot(a) {
        Extended::Finite(t) => t,
        _ => unreachable!("v0 >= 0"),
    };
    if total.is_negative() {
        return Ok(DirichletCertificate::No {
            reason: FailureReason::NegativeMuTot,
        });
    }
    // bring the finitely many negative tail members into the exceptional set
    let mut g = a.green().clone();
    for i in 0..g.tails().len() {
        let t = &g.tails()[i];
        if v0.is_positive() {
            let cutoff = tail_negative_cutoff(&v0, t);
            if cutoff > t.n0 {
                g.promote_tail_prefix(i, cutoff - 1);
            }
        }
    }
    let a = a.with_green(g)?;
    let branches: Vec<(PointCluster, Rational)> = a
        .green()
        .exceptional()
        .iter()
        .map(|(x, p)| (x.clone(), p.mu().finite().cloned().expect("v0 >= 0")))
        .collect();
    let witness = match branches.first() {
        None => FormalRationalFunction::one(),
        Some((first, _)) => {
            let surplus: Rational = branches
                .iter()
                .map(|(x, m)| m * Rational::from_integer(x.degree().into()))
                .sum();
            let d1 = Rational::from_integer(first.degree().into());
            let terms = branches.iter().enumerate().map(|(i, (x, m))| {
                let a_i = if i == 0 { m - &surplus / &d1 } else { m.clone() };
                (x.clone(), -a_i)
            });
            solve_principal(&RDivisor::from_terms(terms))?
        }
    };
    if !verify_witness(&a, &witness)? {
        return Err(Error::Internal(format!(
            "constructed witness {witness} does not make the divisor effective"
        )));
    }
    Ok(DirichletCertificate::Yes { witness })
}

/// Exact check that `(D, g) + (s)^` is effective.
pub fn verify_witness(a: &AdelicDivisor, s: &FormalRationalFunction) -> Result<bool> {
    Ok(a.promote_tails_for(s).add_principal(s)?.is_effective())
}

/// For `deg D > 0`: pseudo-effective iff `mu_tot >= 0`.
pub fn decide_pseudoeffective(a: &AdelicDivisor) -> Result<bool> {
    let deg = a.degree();
    if !deg.is_positive() {
        return Err(Error::Precondition(format!(
            "criterion requires D big (deg D = {deg} <= 0)"
        )));
    }
    Ok(mu_tot(a).is_nonnegative())
}

/// The Dirichlet decision for `(D, g + eps)`.
pub fn epsilon_dirichlet(a: &AdelicDivisor, eps: &Rational) -> Result<DirichletCertificate> {
    if !eps.is_positive() {
        return Err(Error::Precondition(format!("epsilon must be > 0, got {eps}")));
    }
    decide_dirichlet(&a.shift(eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::GreenFunction;
    use crate::profile::BranchProfile;
    use crate::rational::{q, qi};

    fn c(s: &str) -> PointCluster {
        PointCluster::parse(s).unwrap()
    }

    fn halving_tail() -> GeometricTail {
        let psi = BranchProfile::new(vec![(qi(0), qi(0)), (qi(1), qi(-1))], qi(0)).unwrap();
        GeometricTail::new(qi(0), qi(1), 1, q(1, 2), psi).unwrap()
    }

    fn with_tail(a: &AdelicDivisor) -> AdelicDivisor {
        let g = GreenFunction::new(
            a.v0().clone(),
            a.green().exceptional().clone().into_iter().collect(),
            vec![halving_tail()],
        )
        .unwrap();
        AdelicDivisor::new(a.divisor().clone(), g).unwrap()
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
        let d = RDivisor::from_terms([(c("z"), qi(1)), (c("inf"), qi(1))]);
        AdelicDivisor::new(d, g).unwrap()
    }

    #[test]
    fn mu_values() {
        let e1 = AdelicDivisor::standard(qi(0));
        assert_eq!(mu_x(&e1, &c("inf")).unwrap(), Extended::Finite(qi(1)));
        assert_eq!(mu_x(&e1, &c("z - 5")).unwrap(), Extended::Finite(qi(0)));
        assert_eq!(mu_tot(&e1), Extended::Finite(qi(1)));
        let t = with_tail(&e1);
        for n in 1..6 {
            assert_eq!(
                mu_x(&t, &c(&format!("z - {n}"))).unwrap(),
                Extended::Finite(-crate::rational::pow_u(&q(1, 2), n))
            );
        }
        assert_eq!(mu_tot(&t), Extended::Finite(qi(0)));
        assert_eq!(mu_tot(&AdelicDivisor::standard(qi(-1))), Extended::NegInf);
    }

    #[test]
    fn dirichlet_examples() {
        let e1 = AdelicDivisor::standard(qi(0));
        assert_eq!(
            decide_dirichlet(&e1).unwrap(),
            DirichletCertificate::Yes { witness: FormalRationalFunction::one() }
        );
        assert_eq!(
            decide_dirichlet(&with_tail(&e1)).unwrap(),
            DirichletCertificate::No { reason: FailureReason::InfinitelyManyNegativeMu }
        );
        let cert = decide_dirichlet(&two_point()).unwrap();
        let s = cert.witness().unwrap();
        assert_eq!(
            s.principal_divisor(),
            RDivisor::from_terms([(c("inf"), qi(1)), (c("z"), qi(-1))])
        );
        assert!(verify_witness(&two_point(), s).unwrap());
        let moved = two_point().add_principal(s).unwrap();
        assert_eq!(moved.divisor(), &RDivisor::from_terms([(c("inf"), qi(2))]));
    }

    #[test]
    fn witness_checks() {
        let e1 = AdelicDivisor::standard(qi(0));
        assert!(verify_witness(&e1, &FormalRationalFunction::one()).unwrap());
        let low = AdelicDivisor::standard(q(-1, 2));
        for s in ["1", "z", "1/z", "(z-1)^(1/2)"] {
            let s = FormalRationalFunction::parse(s).unwrap();
            assert!(!verify_witness(&low, &s).unwrap());
        }
    }

    #[test]
    fn pseudoeffective_examples() {
        let e1 = AdelicDivisor::standard(qi(0));
        assert!(decide_pseudoeffective(&with_tail(&e1)).unwrap());
        assert!(!decide_pseudoeffective(&AdelicDivisor::standard(qi(-1))).unwrap());
        assert!(decide_pseudoeffective(&e1).unwrap());
        assert!(matches!(
            decide_pseudoeffective(&AdelicDivisor::constant(qi(0))),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn epsilon_examples() {
        let e1 = AdelicDivisor::standard(qi(0));
        let cert = epsilon_dirichlet(&with_tail(&e1), &q(1, 8)).unwrap();
        assert!(cert.is_yes());
        assert!(verify_witness(&with_tail(&e1).shift(&q(1, 8)), cert.witness().unwrap()).unwrap());
        let low = AdelicDivisor::standard(q(-1, 2));
        assert!(epsilon_dirichlet(&low, &qi(1)).unwrap().is_yes());
        assert_eq!(
            epsilon_dirichlet(&low, &q(1, 4)).unwrap(),
            DirichletCertificate::No { reason: FailureReason::MuTotMinusInfinity }
        );
        assert!(epsilon_dirichlet(&low, &qi(0)).is_err());
    }

    #[test]
    fn tail_cutoff_is_sharp() {
        let t = halving_tail();
        for (num, den) in [(1, 8), (1, 3), (1, 100), (2, 1)] {
            let v0 = q(num, den);
            let cutoff = tail_negative_cutoff(&v0, &t);
            for n in t.n0..cutoff + 10 {
                let m = tail_member_mu(&v0, &t, n).finite().cloned().unwrap();
                assert_eq!(m.is_negative(), n < cutoff, "n = {n}, v0 = {v0}");
            }
        }
    }
}
