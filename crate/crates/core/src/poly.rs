//! Dense univariate polynomials in `z` over the rationals.
//!
//! Coefficients are stored low degree first with no trailing zeros, so the
//! zero polynomial is the empty vector and structural equality is equality of
//! polynomials.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The coordinate `z`.
    pub fn z() -> Self {
        Poly::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    /// `z - root`.
    pub fn linear(root: Rational) -> Self {
        Poly::from_coeffs(vec![-root, Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.lead().recip();
        self.scale(&inv)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division. Panics when `divisor` is zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv = divisor.lead().recip();
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                if !dc.is_zero() {
                    rem[i + j] -= &c * dc;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Quotient of an exact division; panics if the remainder is nonzero.
    pub fn exact_div(&self, divisor: &Poly) -> Poly {
        let (q, r) = self.div_rem(divisor);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.div_rem(self).1.is_zero()
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let r = a.div_rem(&b).1.monic();
            a = b;
            b = r;
        }
        a
    }

    pub fn is_coprime(&self, other: &Poly) -> bool {
        self.gcd(other).is_constant()
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).is_constant()
    }

    /// Yun's algorithm: monic squarefree, pairwise coprime `r_j` with
    /// `p = lead * prod r_j^j`, listed by increasing multiplicity.
    pub fn squarefree_decompose(&self) -> Result<Vec<(Poly, u32)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let f = self.monic();
        let mut out = Vec::new();
        if f.is_constant() {
            return Ok(out);
        }
        let df = f.derivative();
        let g = f.gcd(&df);
        let mut a = f.exact_div(&g);
        let mut b = df.exact_div(&g);
        let mut mult = 1u32;
        loop {
            let c = &b - &a.derivative();
            if c.is_zero() {
                if !a.is_constant() {
                    out.push((a.monic(), mult));
                }
                break;
            }
            let d = a.gcd(&c);
            if !d.is_constant() {
                out.push((d.clone(), mult));
            }
            a = a.exact_div(&d);
            b = c.exact_div(&d);
            mult += 1;
        }
        Ok(out)
    }

    /// Monic product of the distinct irreducible factors.
    pub fn squarefree_part(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let f = self.monic();
        f.exact_div(&f.gcd(&f.derivative())).monic()
    }

    /// `sum_i c_i num^i den^(k-i)` for `k = deg self`: the numerator of
    /// `self(num/den)` cleared by `den^k`.
    pub fn homogeneous_compose(&self, num: &Poly, den: &Poly) -> Poly {
        let k = match self.degree() {
            Some(k) => k,
            None => return Poly::zero(),
        };
        let mut den_pows = Vec::with_capacity(k + 1);
        den_pows.push(Poly::one());
        if !den.is_constant() || !den.lead().is_one() {
            for i in 1..=k {
                let next = &den_pows[i - 1] * den;
                den_pows.push(next);
            }
        }
        let den_pow = |i: usize| -> Poly {
            if den_pows.len() == 1 {
                Poly::one()
            } else {
                den_pows[i].clone()
            }
        };
        let mut acc = Poly::constant(self.lead());
        for i in (0..k).rev() {
            acc = &acc * num;
            let c = &self.coeffs[i];
            if !c.is_zero() {
                acc = &acc + &den_pow(k - i).scale(c);
            }
        }
        acc
    }

    /// Resultant `Res_z(self, other)` via the Sylvester determinant with
    /// formal degrees `m = deg self` and `n` (`other` may have lower actual
    /// degree, its top coefficients are then zero).
    pub fn resultant_formal(&self, other: &Poly, n: usize) -> Rational {
        let m = self.deg();
        let size = m + n;
        if size == 0 {
            return Rational::one();
        }
        let mut mat = vec![vec![Rational::zero(); size]; size];
        for row in 0..n {
            for i in 0..=m {
                mat[row][row + i] = self.coeff(m - i);
            }
        }
        for row in 0..m {
            for i in 0..=n {
                mat[n + row][row + i] = other.coeff(n - i);
            }
        }
        determinant(mat)
    }

    /// Polynomial in `w` whose roots are `num(a)/den(a)` over roots `a` of
    /// `self` with `den(a) != 0`, up to a nonzero constant.
    pub fn image_polynomial(&self, num: &Poly, den: &Poly) -> Poly {
        let m = self.deg();
        let n = num.deg().max(den.deg());
        // Res_z(self, w*den - num) has degree <= m in w; interpolate.
        let points: Vec<Rational> = (0..=m as i64)
            .map(|i| Rational::from_integer(BigInt::from(i)))
            .collect();
        let values: Vec<Rational> = points
            .iter()
            .map(|w| {
                let g = &den.scale(w) - num;
                self.resultant_formal(&g, n)
            })
            .collect();
        interpolate(&points, &values)
    }

    /// Parses strings such as `z^2 - 1`, `3*z + 1/2`, `-z`.
    pub fn parse(s: &str) -> Result<Poly> {
        PolyParser::new(s).parse()
    }
}

fn determinant(mut mat: Vec<Vec<Rational>>) -> Rational {
    let n = mat.len();
    let mut det = Rational::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !mat[r][col].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => return Rational::zero(),
        };
        if pivot != col {
            mat.swap(pivot, col);
            det = -det;
        }
        let p = mat[col][col].clone();
        det *= &p;
        let (upper, lower) = mat.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &p;
            for (x, y) in row.iter_mut().zip(pivot_row).skip(col) {
                *x -= &factor * y;
            }
        }
    }
    det
}

/// Lagrange interpolation through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Poly {
    let mut acc = Poly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = Poly::one();
        let mut denom = Rational::one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                basis = &basis * &Poly::linear(xj.clone());
                denom *= xi - xj;
            }
        }
        acc = &acc + &basis.scale(&(yi / denom));
    }
    acc
}

impl Ord for Poly {
    /// Degree first, then coefficients from the top down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| {
            for (a, b) in self.coeffs.iter().rev().zip(other.coeffs.iter().rev()) {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            };
            if i == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

struct PolyParser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PolyParser<'a> {
    fn new(src: &'a str) -> Self {
        PolyParser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: 0,
            column: self.pos + 1,
            message: format!("{} in polynomial '{}'", message.into(), self.src),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.src[start..self.pos])
    }

    fn parse(mut self) -> Result<Poly> {
        let mut acc = Poly::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if first => return Err(self.err("empty input")),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    Rational::one()
                }
                Some(b'-') => {
                    self.pos += 1;
                    -Rational::one()
                }
                Some(_) if first => Rational::one(),
                Some(_) => return Err(self.err("expected '+' or '-'")),
            };
            first = false;
            let (coef, exp) = self.term()?;
            let mut coeffs = vec![Rational::zero(); exp + 1];
            coeffs[exp] = sign * coef;
            acc = &acc + &Poly::from_coeffs(coeffs);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<(Rational, usize)> {
        let mut coef = Rational::one();
        let mut have_coef = false;
        if let Some(n) = self.digits() {
            let mut text = n.to_string();
            if self.peek() == Some(b'/') {
                self.pos += 1;
                let d = self.digits().ok_or_else(|| self.err("expected denominator"))?;
                text = format!("{text}/{d}");
            }
            coef = parse_rational(&text).map_err(|_| self.err("bad coefficient"))?;
            have_coef = true;
            if self.peek() == Some(b'*') {
                self.pos += 1;
                if self.peek() != Some(b'z') {
                    return Err(self.err("expected 'z' after '*'"));
                }
            }
        }
        if self.peek() == Some(b'z') {
            self.pos += 1;
            let mut exp = 1usize;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                let e = self.digits().ok_or_else(|| self.err("expected exponent"))?;
                exp = e.parse().map_err(|_| self.err("exponent too large"))?;
            }
            return Ok((coef, exp));
        }
        if !have_coef {
            return Err(self.err("expected a term"));
        }
        Ok((coef, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["z^2 - 1", "z", "-z^3 + 2*z - 7", "1/2*z + 3/4", "5"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("z^2-1"), Poly::from_i64(&[-1, 0, 1]));
        assert_eq!(p("3z + z"), Poly::from_i64(&[0, 4]));
        assert!(Poly::parse("").is_err());
        assert!(Poly::parse("z^").is_err());
        assert!(Poly::parse("z z").is_err());
    }

    #[test]
    fn division_and_gcd() {
        let a = p("z^3 - 1");
        let b = p("z - 1");
        let (qq, r) = a.div_rem(&b);
        assert_eq!(qq, p("z^2 + z + 1"));
        assert!(r.is_zero());
        assert_eq!(p("z^2 - 1").gcd(&p("z^2 + 2*z + 1")), p("z + 1"));
        assert!(p("z").is_coprime(&p("z + 1")));
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(p("z^2").squarefree_decompose().unwrap(), vec![(p("z"), 2)]);
        assert_eq!(
            p("z^2 - 1").squarefree_decompose().unwrap(),
            vec![(p("z^2 - 1"), 1)]
        );
        // (z-1)^2 (z+2) = z^3 - 3z + 2
        let f = &p("z - 1").pow(2) * &p("z + 2");
        assert_eq!(f, p("z^3 - 3*z + 2"));
        assert_eq!(
            f.squarefree_decompose().unwrap(),
            vec![(p("z + 2"), 1), (p("z - 1"), 2)]
        );
        assert_eq!(Poly::zero().squarefree_decompose(), Err(Error::ZeroPolynomial));
        assert!(Poly::constant(qi(3)).squarefree_decompose().unwrap().is_empty());
    }

    #[test]
    fn homogeneous_composition() {
        // (z - 1) o z^2 = z^2 - 1
        assert_eq!(p("z - 1").homogeneous_compose(&p("z^2"), &Poly::one()), p("z^2 - 1"));
        // (z^2 + 1) o (1/z): num 1, den z -> 1 + z^2
        assert_eq!(p("z^2 + 1").homogeneous_compose(&Poly::one(), &p("z")), p("z^2 + 1"));
        // z o ((z+1)/(z-1)) = z + 1
        assert_eq!(p("z").homogeneous_compose(&p("z + 1"), &p("z - 1")), p("z + 1"));
    }

    #[test]
    fn image_polynomial_of_squaring() {
        // roots +-1 both map to 1 under z^2
        let img = p("z^2 - 1").image_polynomial(&p("z^2"), &Poly::one());
        assert_eq!(img.squarefree_part(), p("z - 1"));
        // root 2 of z - 2 maps to 4 + 3 under z^2 + 3
        let img = p("z - 2").image_polynomial(&p("z^2 + 3"), &Poly::one());
        assert_eq!(img.monic(), p("z - 7"));
        // z - 1 under 1/(z - 1): pole, no finite image
        let img = p("z - 1").image_polynomial(&Poly::one(), &p("z - 1"));
        assert!(img.is_constant());
        let _ = q(1, 2);
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(-4i64..=4, 1..5).prop_map(|v| Poly::from_i64(&v))
    }

    proptest! {
        #[test]
        fn squarefree_reproduces_input(a in small_poly(), b in small_poly(), c in small_poly()) {
            let f = &(&a * &b.pow(2)) * &c.pow(3);
            prop_assume!(!f.is_zero());
            let parts = f.squarefree_decompose().unwrap();
            let mut prod = Poly::one();
            for (r, j) in &parts {
                prop_assert!(r.is_squarefree());
                prop_assert!(r.is_monic());
                prod = &prod * &r.pow(*j);
            }
            prop_assert_eq!(prod, f.monic());
            for (i, (r, _)) in parts.iter().enumerate() {
                for (s, _) in parts.iter().skip(i + 1) {
                    prop_assert!(r.is_coprime(s));
                }
            }
        }

        #[test]
        fn div_rem_identity(a in small_poly(), b in small_poly()) {
            prop_assume!(!b.is_zero());
            let (qq, r) = a.div_rem(&b);
            prop_assert_eq!(&(&qq * &b) + &r, a);
            prop_assert!(r.is_zero() || r.deg() < b.deg());
        }
    }
}
