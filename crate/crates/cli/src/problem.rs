//! The versioned problem-file format.
//!
//! ```text
//! format = 1
//!
//! [divisor]
//! inf = 1
//!
//! [green]
//! v0 = 0
//! branch inf = (0,0) slope=1
//!
//! [tail]
//! c0 = 0
//! c1 = 1
//! n0 = 1
//! ratio = 1/2
//! psi = (0,0);(1,-1) slope=0
//!
//! [dynamics]
//! numerator = z^2 - 1
//! denominator = 1
//! eigenvalue = 2
//! phi = 1
//!
//! [options]
//! jobs = 1
//! n_sweep = 16
//! resolution = 4
//! ```
//!
//! `#` starts a comment. `[tail]` may repeat; every other section appears
//! at most once. Unknown sections and keys are rejected.

use std::fmt::Write as _;

use adelic_core::{
    AdelicDivisor, BranchProfile, EigenData, Endomorphism, Error as CoreError, FormalRationalFunction,
    GeometricTail, GreenFunction, PointCluster, Poly, RDivisor, Rational,
};
use adelic_core::rational::parse_rational;
use num_traits::Zero;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dynamics {
    pub f: Endomorphism,
    pub eigenvalue: Rational,
    pub phi: FormalRationalFunction,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub jobs: Option<usize>,
    pub n_sweep: Option<u64>,
    pub resolution: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub adelic: AdelicDivisor,
    pub dynamics: Option<Dynamics>,
    pub options: Options,
}

impl ProblemFile {
    pub fn new(adelic: AdelicDivisor) -> Self {
        ProblemFile {
            adelic,
            dynamics: None,
            options: Options::default(),
        }
    }

    /// The eigen-data, validated.
    pub fn eigen(&self) -> Result<EigenData, CliError> {
        let d = self
            .dynamics
            .as_ref()
            .ok_or_else(|| CliError::Input("problem file has no [dynamics] section".into()))?;
        EigenData::new(
            d.f.clone(),
            self.adelic.divisor().clone(),
            d.eigenvalue.clone(),
            d.phi.clone(),
        )
        .map_err(CliError::from)
    }

    pub fn parse(src: &str) -> Result<Self, CliError> {
        Parser::default().run(src)
    }

    pub fn serialize(&self) -> String {
        let mut s = String::from("format = 1\n\n[divisor]\n");
        for (x, a) in self.adelic.divisor().iter() {
            let _ = writeln!(s, "{x} = {a}");
        }
        let g = self.adelic.green();
        let _ = write!(s, "\n[green]\nv0 = {}\n", g.v0());
        for (x, p) in g.exceptional() {
            let _ = writeln!(s, "branch {x} = {p}");
        }
        for t in g.tails() {
            let _ = write!(
                s,
                "\n[tail]\nc0 = {}\nc1 = {}\nn0 = {}\nratio = {}\npsi = {}\n",
                t.c0, t.c1, t.n0, t.ratio, t.base
            );
        }
        if let Some(d) = &self.dynamics {
            let _ = write!(
                s,
                "\n[dynamics]\nnumerator = {}\ndenominator = {}\neigenvalue = {}\nphi = {}\n",
                d.f.numerator(),
                d.f.denominator(),
                d.eigenvalue,
                d.phi
            );
        }
        let o = &self.options;
        if o != &Options::default() {
            s.push_str("\n[options]\n");
            if let Some(j) = o.jobs {
                let _ = writeln!(s, "jobs = {j}");
            }
            if let Some(n) = o.n_sweep {
                let _ = writeln!(s, "n_sweep = {n}");
            }
            if let Some(r) = o.resolution {
                let _ = writeln!(s, "resolution = {r}");
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Divisor,
    Green,
    Tail,
    Dynamics,
    Options,
}

/// One `key = value` line with the positions needed for error reports.
struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
    value_col: usize,
}

impl Entry<'_> {
    fn err(&self, message: impl Into<String>) -> CliError {
        CliError::Syntax {
            line: self.line,
            column: self.value_col,
            message: message.into(),
        }
    }

    /// Places a core parse error inside this value.
    fn wrap(&self, e: CoreError) -> CliError {
        match e {
            CoreError::Parse { column, message, .. } => CliError::Syntax {
                line: self.line,
                column: if column > 0 { self.value_col + column - 1 } else { self.value_col },
                message,
            },
            other => self.err(other.to_string()),
        }
    }

    fn rational(&self) -> Result<Rational, CliError> {
        parse_rational(self.value).map_err(|e| self.wrap(e))
    }

    fn integer<T: std::str::FromStr>(&self) -> Result<T, CliError> {
        self.value
            .trim()
            .parse()
            .map_err(|_| self.err(format!("expected a nonnegative integer, got '{}'", self.value)))
    }

    fn profile(&self) -> Result<BranchProfile, CliError> {
        let (pts, slope) = match self.value.rsplit_once("slope=") {
            Some((p, s)) => (p.trim(), s.trim()),
            None => (self.value.trim(), "0"),
        };
        BranchProfile::parse(pts, slope).map_err(|e| self.wrap(e))
    }
}

#[derive(Default)]
struct TailDraft {
    line: usize,
    c0: Option<Rational>,
    c1: Option<Rational>,
    n0: Option<u64>,
    ratio: Option<Rational>,
    psi: Option<BranchProfile>,
}

#[derive(Default)]
struct DynamicsDraft {
    line: usize,
    numerator: Option<(Poly, usize)>,
    denominator: Option<Poly>,
    degree: Option<(usize, usize)>,
    eigenvalue: Option<Rational>,
    phi: Option<FormalRationalFunction>,
}

#[derive(Default)]
struct Parser {
    divisor: Vec<(PointCluster, Rational)>,
    v0: Option<Rational>,
    branches: Vec<(PointCluster, BranchProfile)>,
    green_line: usize,
    tails: Vec<TailDraft>,
    dynamics: Option<DynamicsDraft>,
    options: Options,
    seen: Vec<(Section, usize, String)>,
}

fn split_entry(raw: &str, line: usize) -> Result<Entry<'_>, CliError> {
    let eq = raw.find('=').ok_or(CliError::Syntax {
        line,
        column: 1,
        message: "expected 'key = value'".into(),
    })?;
    let key = raw[..eq].trim();
    let after = &raw[eq + 1..];
    let lead = after.len() - after.trim_start().len();
    let value = after.trim();
    if key.is_empty() || value.is_empty() {
        return Err(CliError::Syntax {
            line,
            column: if key.is_empty() { 1 } else { eq + 2 },
            message: "empty key or value".into(),
        });
    }
    Ok(Entry {
        line,
        key,
        value,
        value_col: eq + 2 + lead,
    })
}

impl Parser {
    fn run(mut self, src: &str) -> Result<ProblemFile, CliError> {
        let mut section: Option<Section> = None;
        let mut have_format = false;
        let mut section_counter = 0;
        for (i, full) in src.lines().enumerate() {
            let line = i + 1;
            let raw = full.split('#').next().unwrap_or("").trim_end();
            if raw.trim().is_empty() {
                continue;
            }
            let indent = raw.len() - raw.trim_start().len();
            let raw_trim = raw.trim_start();
            if !have_format {
                let e = split_entry(raw_trim, line).map_err(|_| CliError::Syntax {
                    line,
                    column: indent + 1,
                    message: "file must start with 'format = 1'".into(),
                })?;
                if e.key != "format" {
                    return Err(CliError::Syntax {
                        line,
                        column: indent + 1,
                        message: "file must start with 'format = 1'".into(),
                    });
                }
                if e.value != "1" {
                    return Err(CliError::Syntax {
                        line,
                        column: indent + e.value_col,
                        message: format!("unsupported format version '{}'", e.value),
                    });
                }
                have_format = true;
                continue;
            }
            if let Some(name) = raw_trim.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or(CliError::Syntax {
                    line,
                    column: indent + 1,
                    message: "unterminated section header".into(),
                })?;
                let s = match name.trim() {
                    "divisor" => Section::Divisor,
                    "green" => Section::Green,
                    "tail" => Section::Tail,
                    "dynamics" => Section::Dynamics,
                    "options" => Section::Options,
                    other => {
                        return Err(CliError::Syntax {
                            line,
                            column: indent + 2,
                            message: format!("unknown section '{other}'"),
                        })
                    }
                };
                if s != Section::Tail && self.seen.iter().any(|(x, _, k)| *x == s && k.is_empty()) {
                    return Err(CliError::Syntax {
                        line,
                        column: indent + 1,
                        message: format!("duplicate section '{name}'"),
                    });
                }
                section_counter += 1;
                self.seen.push((s, section_counter, String::new()));
                match s {
                    Section::Green => self.green_line = line,
                    Section::Tail => self.tails.push(TailDraft {
                        line,
                        ..TailDraft::default()
                    }),
                    Section::Dynamics => {
                        self.dynamics = Some(DynamicsDraft {
                            line,
                            ..DynamicsDraft::default()
                        })
                    }
                    _ => {}
                }
                section = Some(s);
                continue;
            }
            let mut e = split_entry(raw_trim, line)?;
            e.value_col += indent;
            let s = section.ok_or_else(|| e.err("entry outside of any section"))?;
            self.entry(s, section_counter, &e, indent)?;
        }
        if !have_format {
            return Err(CliError::Syntax {
                line: 1,
                column: 1,
                message: "file must start with 'format = 1'".into(),
            });
        }
        self.finish()
    }

    fn entry(&mut self, s: Section, counter: usize, e: &Entry<'_>, indent: usize) -> Result<(), CliError> {
        let key_err = |msg: String| CliError::Syntax {
            line: e.line,
            column: indent + 1,
            message: msg,
        };
        // duplicate keys within one section instance
        let tag = e.key.split_whitespace().collect::<Vec<_>>().join(" ");
        if self.seen.iter().any(|(x, c, k)| *x == s && *c == counter && *k == tag) {
            return Err(key_err(format!("duplicate key '{tag}'")));
        }
        self.seen.push((s, counter, tag));
        match s {
            Section::Divisor => {
                let x = PointCluster::parse(e.key).map_err(|err| key_err(err.to_string()))?;
                self.divisor.push((x, e.rational()?));
            }
            Section::Green => {
                if e.key == "v0" {
                    self.v0 = Some(e.rational()?);
                } else if let Some(c) = e.key.strip_prefix("branch ") {
                    let x = PointCluster::parse(c).map_err(|err| key_err(err.to_string()))?;
                    self.branches.push((x, e.profile()?));
                } else {
                    return Err(key_err(format!("unknown key '{}' in [green]", e.key)));
                }
            }
            Section::Tail => {
                let t = self.tails.last_mut().expect("tail section opened");
                match e.key {
                    "c0" => t.c0 = Some(e.rational()?),
                    "c1" => t.c1 = Some(e.rational()?),
                    "n0" => t.n0 = Some(e.integer()?),
                    "ratio" => t.ratio = Some(e.rational()?),
                    "psi" => t.psi = Some(e.profile()?),
                    other => return Err(key_err(format!("unknown key '{other}' in [tail]"))),
                }
            }
            Section::Dynamics => {
                let d = self.dynamics.as_mut().expect("dynamics section opened");
                match e.key {
                    "numerator" => d.numerator = Some((Poly::parse(e.value).map_err(|x| e.wrap(x))?, e.line)),
                    "denominator" => d.denominator = Some(Poly::parse(e.value).map_err(|x| e.wrap(x))?),
                    "degree" => d.degree = Some((e.integer()?, e.line)),
                    "eigenvalue" => d.eigenvalue = Some(e.rational()?),
                    "phi" => d.phi = Some(FormalRationalFunction::parse(e.value).map_err(|x| e.wrap(x))?),
                    other => return Err(key_err(format!("unknown key '{other}' in [dynamics]"))),
                }
            }
            Section::Options => match e.key {
                "jobs" => self.options.jobs = Some(e.integer()?),
                "n_sweep" => self.options.n_sweep = Some(e.integer()?),
                "resolution" => self.options.resolution = Some(e.integer()?),
                other => return Err(key_err(format!("unknown key '{other}' in [options]"))),
            },
        }
        Ok(())
    }

    fn finish(self) -> Result<ProblemFile, CliError> {
        let at = |line: usize, message: String| CliError::Syntax {
            line,
            column: 1,
            message,
        };
        let v0 = self
            .v0
            .ok_or_else(|| at(self.green_line.max(1), "[green] needs 'v0 = <rational>'".into()))?;
        let mut tails = Vec::new();
        for t in self.tails {
            let missing = |k: &str| at(t.line, format!("[tail] is missing '{k}'"));
            let tail = GeometricTail::new(
                t.c0.ok_or_else(|| missing("c0"))?,
                t.c1.ok_or_else(|| missing("c1"))?,
                t.n0.ok_or_else(|| missing("n0"))?,
                t.ratio.ok_or_else(|| missing("ratio"))?,
                t.psi.ok_or_else(|| missing("psi"))?,
            )
            .map_err(|e| at(t.line, e.to_string()))?;
            tails.push(tail);
        }
        let green_line = self.green_line.max(1);
        let green = GreenFunction::new(v0, self.branches, tails).map_err(|e| at(green_line, e.to_string()))?;
        let adelic = AdelicDivisor::new(RDivisor::from_terms(self.divisor), green)
            .map_err(|e| at(green_line, e.to_string()))?;
        let dynamics = match self.dynamics {
            None => None,
            Some(d) => {
                let (p, _) = d
                    .numerator
                    .ok_or_else(|| at(d.line, "[dynamics] is missing 'numerator'".into()))?;
                let q = d.denominator.unwrap_or_else(Poly::one);
                let f = Endomorphism::new(p, q).map_err(|e| at(d.line, e.to_string()))?;
                if let Some((k, line)) = d.degree {
                    if k != f.degree() {
                        return Err(at(line, format!("declared degree {k} but the map has degree {}", f.degree())));
                    }
                }
                let eigenvalue = d
                    .eigenvalue
                    .unwrap_or_else(|| Rational::from_integer(f.degree().into()));
                if eigenvalue.is_zero() {
                    return Err(at(d.line, "eigenvalue must be nonzero".into()));
                }
                Some(Dynamics {
                    f,
                    eigenvalue,
                    phi: d.phi.unwrap_or_else(FormalRationalFunction::one),
                })
            }
        };
        Ok(ProblemFile {
            adelic,
            dynamics,
            options: self.options,
        })
    }
}
