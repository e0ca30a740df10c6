//! ℝ-divisors (with rational coefficients) and formal ℝ-rational functions
//! on the projective line, with the principal-divisor calculus.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::cluster::{refine_supports, PointCluster};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{is_integer, parse_rational, Rational};

/// Sums `(cluster, coefficient)` terms over a common gcd-free basis,
/// spreading each coefficient onto every basis piece of its cluster.
pub(crate) fn merge_terms(
    terms: impl IntoIterator<Item = (PointCluster, Rational)>,
) -> BTreeMap<PointCluster, Rational> {
    let terms: Vec<(PointCluster, Rational)> = terms.into_iter().collect();
    let clusters: Vec<PointCluster> = terms.iter().map(|(c, _)| c.clone()).collect();
    let refinement = refine_supports(&[clusters]);
    let mut acc: BTreeMap<PointCluster, Rational> = BTreeMap::new();
    for ((_, coef), pieces) in terms.iter().zip(&refinement.parts[0]) {
        for &i in pieces {
            *acc.entry(refinement.basis[i].clone()).or_insert_with(Rational::zero) += coef;
        }
    }
    acc.retain(|_, v| !v.is_zero());
    group_by_value(acc)
}

/// Canonical form: one finite cluster per distinct value (the product of all
/// pieces carrying it), plus infinity.
pub(crate) fn group_by_value(
    map: BTreeMap<PointCluster, Rational>,
) -> BTreeMap<PointCluster, Rational> {
    let mut by_value: BTreeMap<Rational, Poly> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for (c, v) in map {
        match c {
            PointCluster::Infinity => {
                out.insert(PointCluster::Infinity, v);
            }
            PointCluster::Finite(p) => {
                let e = by_value.entry(v).or_insert_with(Poly::one);
                *e = &*e * &p;
            }
        }
    }
    for (v, p) in by_value {
        out.insert(PointCluster::Finite(p), v);
    }
    out
}

/// Coefficient of a cluster map along `x`: the value of the key containing
/// `x`, zero if `x` is disjoint from every key.
pub(crate) fn value_along(
    map: &BTreeMap<PointCluster, Rational>,
    x: &PointCluster,
) -> Result<Rational> {
    let mut found: Option<&Rational> = None;
    for (k, v) in map {
        if x.is_subset_of(k) {
            return Ok(v.clone());
        }
        if !x.is_coprime(k) {
            match found {
                Some(prev) if prev != v => return Err(Error::AmbiguousBranch(x.to_string())),
                _ => found = Some(v),
            }
        }
    }
    match found {
        // x straddles keys; fine only if x is covered by keys sharing one value
        Some(v) => {
            let covered: Poly = map
                .iter()
                .filter(|(k, _)| !x.is_coprime(k))
                .filter_map(|(k, _)| k.poly().cloned())
                .fold(Poly::one(), |acc, p| &acc * &p);
            match x.poly() {
                Some(px) if px.divides(&covered) => Ok(v.clone()),
                _ => Err(Error::AmbiguousBranch(x.to_string())),
            }
        }
        None => Ok(Rational::zero()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RDivisor {
    coeffs: BTreeMap<PointCluster, Rational>,
}

impl RDivisor {
    pub fn zero() -> Self {
        RDivisor::default()
    }

    /// `[x]`.
    pub fn point(x: PointCluster) -> Self {
        RDivisor::from_terms([(x, Rational::one())])
    }

    /// Builds a divisor from arbitrary (possibly overlapping) clusters.
    pub fn from_terms(terms: impl IntoIterator<Item = (PointCluster, Rational)>) -> Self {
        RDivisor {
            coeffs: merge_terms(terms),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PointCluster, &Rational)> {
        self.coeffs.iter()
    }

    pub fn terms(&self) -> &BTreeMap<PointCluster, Rational> {
        &self.coeffs
    }

    pub fn support(&self) -> Vec<PointCluster> {
        self.coeffs.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `sum a_x deg(x)`.
    pub fn degree(&self) -> Rational {
        self.coeffs
            .iter()
            .map(|(c, a)| a * Rational::from_integer(c.degree().into()))
            .sum()
    }

    /// `ord_x(D)` along a cluster `x` that does not straddle the support.
    pub fn ord(&self, x: &PointCluster) -> Result<Rational> {
        value_along(&self.coeffs, x)
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|a| !a.is_negative())
    }

    pub fn add(&self, other: &RDivisor) -> RDivisor {
        RDivisor::from_terms(
            self.coeffs
                .iter()
                .chain(other.coeffs.iter())
                .map(|(c, a)| (c.clone(), a.clone())),
        )
    }

    pub fn scale(&self, k: &Rational) -> RDivisor {
        RDivisor::from_terms(self.coeffs.iter().map(|(c, a)| (c.clone(), a * k)))
    }

    pub fn neg(&self) -> RDivisor {
        self.scale(&-Rational::one())
    }

    /// Re-expresses the divisor on a finer basis containing its support.
    pub fn refined_to(&self, basis: &[PointCluster]) -> BTreeMap<PointCluster, Rational> {
        let mut out = BTreeMap::new();
        for b in basis {
            if let Ok(v) = self.ord(b) {
                if !v.is_zero() {
                    out.insert(b.clone(), v);
                }
            }
        }
        out
    }
}

impl fmt::Display for RDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(c, a)| format!("{a}*[{c}]"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A formal product `prod q^{c_q}` of monic squarefree polynomials with
/// rational exponents. Constant factors are dropped: they have absolute value
/// one everywhere on the tree. The exponent at infinity is implied by degree
/// balance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FormalRationalFunction {
    exponents: BTreeMap<PointCluster, Rational>,
}

impl FormalRationalFunction {
    pub fn one() -> Self {
        Self::default()
    }

    /// The coordinate function `z`.
    pub fn z() -> Self {
        Self::from_poly_power(&Poly::z(), Rational::one()).expect("z is nonzero")
    }

    /// `p^e` for an arbitrary nonzero polynomial.
    pub fn from_poly_power(p: &Poly, e: Rational) -> Result<Self> {
        let terms = p
            .squarefree_decompose()?
            .into_iter()
            .map(|(r, j)| (PointCluster::Finite(r), &e * Rational::from_integer(j.into())));
        Ok(Self::from_terms(terms))
    }

    /// Panics if a term is the infinity cluster.
    pub fn from_terms(terms: impl IntoIterator<Item = (PointCluster, Rational)>) -> Self {
        let exponents = merge_terms(terms);
        assert!(
            !exponents.contains_key(&PointCluster::Infinity),
            "infinity carries no exponent in a formal rational function"
        );
        FormalRationalFunction { exponents }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PointCluster, &Rational)> {
        self.exponents.iter()
    }

    pub fn exponents(&self) -> &BTreeMap<PointCluster, Rational> {
        &self.exponents
    }

    pub fn is_one(&self) -> bool {
        self.exponents.is_empty()
    }

    /// True when every exponent is an integer (a genuine rational function).
    pub fn is_integral(&self) -> bool {
        self.exponents.values().all(is_integer)
    }

    pub fn support(&self) -> Vec<PointCluster> {
        self.exponents.keys().cloned().collect()
    }

    /// `ord_x(s)` along a cluster `x` (finite or infinite).
    pub fn ord(&self, x: &PointCluster) -> Result<Rational> {
        match x {
            PointCluster::Infinity => Ok(self.ord_infinity()),
            _ => value_along(&self.exponents, x),
        }
    }

    pub fn ord_infinity(&self) -> Rational {
        -self
            .exponents
            .iter()
            .map(|(c, e)| e * Rational::from_integer(c.degree().into()))
            .sum::<Rational>()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_terms(
            self.exponents
                .iter()
                .chain(other.exponents.iter())
                .map(|(c, e)| (c.clone(), e.clone())),
        )
    }

    pub fn pow(&self, k: &Rational) -> Self {
        Self::from_terms(self.exponents.iter().map(|(c, e)| (c.clone(), e * k)))
    }

    pub fn inv(&self) -> Self {
        self.pow(&-Rational::one())
    }

    /// `(s) = sum c_q ([q] - deg(q) [inf])`.
    pub fn principal_divisor(&self) -> RDivisor {
        let mut terms: Vec<(PointCluster, Rational)> = self
            .exponents
            .iter()
            .map(|(c, e)| (c.clone(), e.clone()))
            .collect();
        terms.push((PointCluster::Infinity, self.ord_infinity()));
        RDivisor::from_terms(terms)
    }

    /// Parses products such as `(z+1)^(1/2)*(z-1)^(-1/2)`, `z/(z-1)`, `1`.
    pub fn parse(s: &str) -> Result<Self> {
        if let Ok(p) = Poly::parse(s) {
            if p.is_zero() {
                return Err(Error::Parse {
                    line: 0,
                    column: 1,
                    message: "zero function".into(),
                });
            }
            return Self::from_poly_power(&p, Rational::one());
        }
        FunctionParser::new(s).parse()
    }
}

/// A degree-zero divisor as the divisor of a formal rational function.
pub fn solve_principal(d: &RDivisor) -> Result<FormalRationalFunction> {
    let deg = d.degree();
    if !deg.is_zero() {
        return Err(Error::NonzeroDegree(deg));
    }
    Ok(FormalRationalFunction::from_terms(
        d.iter()
            .filter(|(c, _)| !c.is_infinity())
            .map(|(c, a)| (c.clone(), a.clone())),
    ))
}

impl fmt::Display for FormalRationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .map(|(c, e)| {
                if e.is_one() {
                    format!("({c})")
                } else if is_integer(e) && e.is_positive() {
                    format!("({c})^{e}")
                } else {
                    format!("({c})^({e})")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

struct FunctionParser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> FunctionParser<'a> {
    fn new(src: &'a str) -> Self {
        FunctionParser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: 0,
            column: self.pos + 1,
            message: format!("{} in function '{}'", message.into(), self.src),
        }
    }

    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.bytes.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<FormalRationalFunction> {
        let mut terms: Vec<(Poly, Rational)> = Vec::new();
        let mut sign = Rational::one();
        loop {
            let (p, e) = self.factor()?;
            terms.push((p, e * &sign));
            match self.peek() {
                None => break,
                Some(b'*') => {
                    self.pos += 1;
                    sign = Rational::one();
                }
                Some(b'/') => {
                    self.pos += 1;
                    sign = -Rational::one();
                }
                Some(_) => return Err(self.err("expected '*' or '/'")),
            }
        }
        let mut out = FormalRationalFunction::one();
        for (p, e) in terms {
            if p.is_zero() {
                return Err(self.err("zero factor"));
            }
            out = out.mul(&FormalRationalFunction::from_poly_power(&p, e)?);
        }
        Ok(out)
    }

    fn factor(&mut self) -> Result<(Poly, Rational)> {
        let base = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let start = self.pos;
                let mut depth = 1;
                while self.pos < self.bytes.len() {
                    match self.bytes[self.pos] {
                        b'(' => depth += 1,
                        b')' => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    self.pos += 1;
                }
                if depth != 0 {
                    return Err(self.err("unbalanced parenthesis"));
                }
                let inner = &self.src[start..self.pos];
                self.pos += 1;
                Poly::parse(inner).map_err(|_| self.err(format!("bad polynomial '{inner}'")))?
            }
            Some(b'z') => {
                self.pos += 1;
                Poly::z()
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = &self.src[start..self.pos];
                let c = parse_rational(text).map_err(|_| self.err("bad constant"))?;
                Poly::constant(c)
            }
            _ => return Err(self.err("expected a factor")),
        };
        let mut exp = Rational::one();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            exp = self.exponent()?;
        }
        Ok((base, exp))
    }

    fn exponent(&mut self) -> Result<Rational> {
        let paren = self.peek() == Some(b'(');
        if paren {
            self.pos += 1;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            let ok = c.is_ascii_digit()
                || c == b'-'
                || c == b' '
                || (paren && c == b'/');
            if !ok {
                break;
            }
            self.pos += 1;
        }
        let text = &self.src[start..self.pos];
        let e = parse_rational(text).map_err(|_| self.err("bad exponent"))?;
        if paren {
            if self.peek() != Some(b')') {
                return Err(self.err("expected ')'"));
            }
            self.pos += 1;
        }
        Ok(e)
    }
}
