//! Text form of potentials.
//!
//! ```text
//! potential := term ( ("+" | "-") term )*
//! term      := rational ( "*" factor )*  |  factor ( "*" factor )*
//! factor    := "x" [ "^" rational ]  |  "ln" INT "(x)" [ "^" rational ]
//! rational  := ["-"] INT [ "/" INT ]  |  ["-"] DECIMAL
//! ```
//!
//! Whitespace is ignored. A leading `-` directly before a factor (`-x^2`) is also
//! accepted and means a coefficient of `-1`. Sampled potentials are read from
//! two-column CSV (`x,q`) with `#` comments.

use crate::error::{Error, Result};
use crate::symalg::{LogPoly, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

/// Deepest `ln_k` accepted in symbolic potentials.
pub const MAX_DEPTH: u32 = 4;

/// Minimum number of rows in a sampled potential.
pub const MIN_SAMPLES: usize = 8;

/// Parses a potential expression into canonical form.
pub fn parse(text: &str) -> Result<LogPoly> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let poly = p.potential()?;
    p.skip_ws();
    if p.pos < p.s.len() {
        return Err(p.expected(&["'+'", "'-'", "'*'", "end of input"]));
    }
    Ok(poly)
}

/// Parses a bare rational such as `-3/4` or `0.25`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let p = parse(text)?;
    match p.terms().as_slice() {
        [] => Ok(Rational::zero()),
        [m] if m.xpow.is_zero() && m.logexps.is_empty() => Ok(m.coef.clone()),
        _ => Err(Error::Format(format!("not a rational number: {text}"))),
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expected(&self, what: &[&str]) -> Error {
        Error::Syntax { offset: self.pos, expected: what.iter().map(|s| s.to_string()).collect() }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, lit: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn potential(&mut self) -> Result<LogPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<LogPoly> {
        let start_factor = |c: Option<u8>| matches!(c, Some(b'x') | Some(b'l'));
        let mut acc = match self.peek() {
            Some(c) if c.is_ascii_digit() => LogPoly::constant(self.rational()?),
            Some(b'-') => {
                let save = self.pos;
                self.pos += 1;
                if start_factor(self.peek()) {
                    -&self.factor()?
                } else {
                    self.pos = save;
                    LogPoly::constant(self.rational()?)
                }
            }
            c if start_factor(c) => self.factor()?,
            _ => return Err(self.expected(&["rational", "'x'", "'ln'"])),
        };
        while self.eat(b'*') {
            if !start_factor(self.peek()) {
                return Err(self.expected(&["'x'", "'ln'"]));
            }
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<Rational> {
        if self.eat(b'^') {
            self.rational()
        } else {
            Ok(Rational::one())
        }
    }

    fn factor(&mut self) -> Result<LogPoly> {
        if self.eat_str("ln") {
            self.skip_ws();
            let k_text = self.digits();
            if k_text.is_empty() {
                return Err(self.expected(&["INT"]));
            }
            let k: u32 = k_text.parse().unwrap_or(u32::MAX);
            if k == 0 || k > MAX_DEPTH {
                return Err(Error::Depth { depth: k });
            }
            if !self.eat(b'(') || !self.eat(b'x') || !self.eat(b')') {
                return Err(self.expected(&["'(x)'"]));
            }
            let e = self.exponent()?;
            Ok(LogPoly::ln_pow(k, e))
        } else if self.eat(b'x') {
            let e = self.exponent()?;
            Ok(LogPoly::x_pow(e))
        } else {
            Err(self.expected(&["'x'", "'ln'"]))
        }
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn rational(&mut self) -> Result<Rational> {
        let neg = self.eat(b'-');
        self.skip_ws();
        let whole = self.digits();
        if whole.is_empty() {
            return Err(self.expected(&["INT", "DECIMAL"]));
        }
        let mut value;
        if self.pos < self.s.len() && self.s[self.pos] == b'.' {
            self.pos += 1;
            let frac = self.digits();
            if frac.is_empty() {
                return Err(self.expected(&["digit"]));
            }
            let num: BigInt = format!("{whole}{frac}").parse().expect("digits");
            let den = BigInt::from(10u32).pow(frac.len() as u32);
            value = Rational::new(num, den);
        } else {
            value = Rational::from_integer(whole.parse::<BigInt>().expect("digits"));
            if self.eat(b'/') {
                self.skip_ws();
                let at = self.pos;
                let d = self.digits();
                if d.is_empty() {
                    return Err(self.expected(&["INT"]));
                }
                let d: BigInt = d.parse().expect("digits");
                if d.is_zero() {
                    return Err(Error::Syntax { offset: at, expected: vec!["nonzero INT".into()] });
                }
                value /= Rational::from_integer(d);
            }
        }
        Ok(if neg { -value } else { value })
    }
}

impl FromStr for LogPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<LogPoly> {
        parse(s)
    }
}

impl Serialize for LogPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LogPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Tabulated potential, interpolated linearly between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    xs: Vec<f64>,
    qs: Vec<f64>,
}

impl Samples {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < MIN_SAMPLES {
            return Err(Error::Format(format!("need at least {MIN_SAMPLES} samples, got {}", points.len())));
        }
        for (i, &(x, q)) in points.iter().enumerate() {
            if !(x > 0.0) || !x.is_finite() || !q.is_finite() {
                return Err(Error::Format(format!("row {i}: x must be positive and values finite")));
            }
            if i > 0 && x <= points[i - 1].0 {
                return Err(Error::Monotonicity { row: i });
            }
        }
        let (xs, qs) = points.into_iter().unzip();
        Ok(Samples { xs, qs })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Closed hull `[x_min, x_max]` of the abscissae.
    pub fn hull(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.qs.iter().copied())
    }

    /// Linear interpolation; refuses to extrapolate.
    pub fn interpolate(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.hull();
        if !(x >= lo && x <= hi) {
            return Err(Error::Domain(format!("x = {x:e} outside the sample hull [{lo:e}, {hi:e}]")));
        }
        let i = self.xs.partition_point(|&v| v <= x);
        if i == 0 {
            return Ok(self.qs[0]);
        }
        if i == self.xs.len() {
            return Ok(self.qs[i - 1]);
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let t = (x - x0) / (x1 - x0);
        Ok(self.qs[i - 1] + t * (self.qs[i] - self.qs[i - 1]))
    }
}

/// A potential given either exactly or as samples.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSource {
    Symbolic(LogPoly),
    Sampled(Samples),
}

impl PotentialSource {
    pub fn symbolic(p: LogPoly) -> Result<Self> {
        let d = p.max_depth();
        if d > MAX_DEPTH {
            return Err(Error::Depth { depth: d });
        }
        Ok(PotentialSource::Symbolic(p))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::symbolic(parse(text)?)
    }

    /// Value near zero (symbolic) or by interpolation (sampled).
    pub fn value(&self, x: f64) -> Result<f64> {
        match self {
            PotentialSource::Symbolic(p) => p.evaluate(x),
            PotentialSource::Sampled(s) => s.interpolate(x),
        }
    }
}

/// Reads two-column `x,q` CSV. Lines starting with `#` are skipped, as is a
/// non-numeric header row.
pub fn load_samples<R: Read>(reader: R) -> Result<PotentialSource> {
    let mut rdr =
        csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let mut points = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        if rec.len() != 2 {
            return Err(Error::Format(format!("row {row}: expected 2 columns, got {}", rec.len())));
        }
        let x = rec[0].parse::<f64>();
        let q = rec[1].parse::<f64>();
        match (x, q) {
            (Ok(x), Ok(q)) => points.push((x, q)),
            (Err(_), Err(_)) if row == 0 => continue,
            _ => return Err(Error::Format(format!("row {row}: non-numeric field"))),
        }
    }
    Ok(PotentialSource::Sampled(Samples::new(points)?))
}

pub fn load_samples_path(path: &Path) -> Result<PotentialSource> {
    let f = std::fs::File::open(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    load_samples(f)
}
