//! Initial data given as text: `zero`, `random`, `peakon`, or a finite Fourier
//! sum such as `1 + 0.1cos(x) - 0.05*sin(2x)`.

use std::fmt;

use fwbesov::experiments::periodized_peakon;
use fwbesov::solver::random_suite;
use fwbesov::{SpectralField, TorusGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave {
    Const,
    Cos(u32),
    Sin(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub wave: Wave,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Zero,
    /// Band-limited random field drawn from `seed`.
    Random,
    /// Periodized peakon of amplitude `A` centred at `L/2`.
    Peakon,
    Series(Vec<Term>),
}

/// Parameters consumed by the non-series variants.
#[derive(Debug, Clone, Copy)]
pub struct Extras {
    pub amplitude: f64,
    pub kmax: usize,
    pub seed: u64,
    pub peakon_amplitude: f64,
}

impl InitialData {
    pub fn build(&self, grid: TorusGrid, extras: Extras) -> SpectralField {
        match self {
            InitialData::Zero => SpectralField::zeros(grid),
            InitialData::Random => random_suite(grid, 1, extras.kmax, extras.amplitude, extras.seed).remove(0),
            InitialData::Peakon => periodized_peakon(grid, extras.peakon_amplitude, 0.5 * grid.length()),
            InitialData::Series(terms) => {
                let omega = 2.0 * std::f64::consts::PI / grid.length();
                SpectralField::from_fn(grid, |x| {
                    terms
                        .iter()
                        .map(|t| match t.wave {
                            Wave::Const => t.coef,
                            Wave::Cos(k) => t.coef * (k as f64 * omega * x).cos(),
                            Wave::Sin(k) => t.coef * (k as f64 * omega * x).sin(),
                        })
                        .sum()
                })
            }
        }
    }

    /// Largest wavenumber of a series, if this is one.
    pub fn top_mode(&self) -> Option<u32> {
        match self {
            InitialData::Series(terms) => Some(
                terms
                    .iter()
                    .map(|t| match t.wave {
                        Wave::Const => 0,
                        Wave::Cos(k) | Wave::Sin(k) => k,
                    })
                    .max()
                    .unwrap_or(0),
            ),
            _ => None,
        }
    }
}

impl fmt::Display for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialData::Zero => write!(f, "zero"),
            InitialData::Random => write!(f, "random"),
            InitialData::Peakon => write!(f, "peakon"),
            InitialData::Series(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    let c = if i == 0 {
                        format!("{:?}", t.coef)
                    } else if t.coef < 0.0 {
                        format!(" - {:?}", -t.coef)
                    } else {
                        format!(" + {:?}", t.coef)
                    };
                    match t.wave {
                        Wave::Const => write!(f, "{c}")?,
                        Wave::Cos(k) => write!(f, "{c}*cos({k}x)")?,
                        Wave::Sin(k) => write!(f, "{c}*sin({k}x)")?,
                    }
                }
                Ok(())
            }
        }
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(w.as_bytes()) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Option<f64> {
        self.skip_ws();
        let start = self.pos;
        let mut seen_digit = false;
        while self.pos < self.s.len() {
            let c = self.s[self.pos];
            let exp_sign = (c == b'+' || c == b'-')
                && self.pos > start
                && matches!(self.s[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() {
                seen_digit = true;
            } else if !(c == b'.' || exp_sign || ((c == b'e' || c == b'E') && seen_digit)) {
                break;
            }
            self.pos += 1;
        }
        if !seen_digit {
            self.pos = start;
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }
}

fn wave(cur: &mut Cursor<'_>) -> Result<Option<Wave>, String> {
    let is_cos = if cur.eat_word("cos") {
        true
    } else if cur.eat_word("sin") {
        false
    } else {
        return Ok(None);
    };
    if !cur.eat(b'(') {
        return Err("expected '(' after cos/sin".into());
    }
    let k = match cur.number() {
        Some(v) if v >= 0.0 && v.fract() == 0.0 => {
            cur.eat(b'*');
            v as u32
        }
        Some(v) => return Err(format!("wavenumber {v} must be a non-negative integer")),
        None => 1,
    };
    if !cur.eat(b'x') || !cur.eat(b')') {
        return Err("expected 'x)'".into());
    }
    Ok(Some(if is_cos { Wave::Cos(k) } else { Wave::Sin(k) }))
}

pub fn parse_initial(text: &str) -> Result<InitialData, String> {
    let t = text.trim();
    match t {
        "zero" | "0" => return Ok(InitialData::Zero),
        "random" => return Ok(InitialData::Random),
        "peakon" => return Ok(InitialData::Peakon),
        "" => return Err("empty expression".into()),
        _ => {}
    }
    let mut cur = Cursor { s: t.as_bytes(), pos: 0 };
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        let sign = if cur.eat(b'-') {
            -1.0
        } else if cur.eat(b'+') || first {
            1.0
        } else if cur.peek().is_none() {
            break;
        } else {
            return Err(format!("unexpected input at offset {}", cur.pos));
        };
        first = false;
        let coef = cur.number();
        if coef.is_some() {
            cur.eat(b'*');
        }
        let w = wave(&mut cur)?;
        let term = match (coef, w) {
            (None, None) => return Err(format!("expected a term at offset {}", cur.pos)),
            (Some(c), None) => Term { coef: c, wave: Wave::Const },
            (c, Some(w)) => Term { coef: c.unwrap_or(1.0), wave: w },
        };
        terms.push(Term { coef: sign * term.coef, ..term });
    }
    Ok(InitialData::Series(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_series() {
        let d = parse_initial("1 + 0.1cos(x) - 0.05*sin(2x)").unwrap();
        assert_eq!(
            d,
            InitialData::Series(vec![
                Term { coef: 1.0, wave: Wave::Const },
                Term { coef: 0.1, wave: Wave::Cos(1) },
                Term { coef: -0.05, wave: Wave::Sin(2) },
            ])
        );
        assert_eq!(d.top_mode(), Some(2));
        assert_eq!(parse_initial(&d.to_string()).unwrap(), d);
        assert_eq!(
            parse_initial("-2sin(x)").unwrap(),
            InitialData::Series(vec![Term { coef: -2.0, wave: Wave::Sin(1) }])
        );
        assert_eq!(
            parse_initial("1e-2 cos(3*x)").unwrap(),
            InitialData::Series(vec![Term { coef: 0.01, wave: Wave::Cos(3) }])
        );
    }

    #[test]
    fn keywords_and_errors() {
        assert_eq!(parse_initial("zero").unwrap(), InitialData::Zero);
        assert_eq!(parse_initial(" random ").unwrap(), InitialData::Random);
        for bad in ["", "cos(", "tan(x)", "1 + ", "cos(1.5x)", "2 3"] {
            assert!(parse_initial(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn builds_on_grid() {
        let g = TorusGrid::periodic(32).unwrap();
        let extras = Extras { amplitude: 0.5, kmax: 4, seed: 3, peakon_amplitude: 1.0 };
        let u = parse_initial("0.5 + cos(2x)").unwrap().build(g, extras);
        assert!((u.mean() - 0.5).abs() < 1e-15);
        assert!((u.coeff(2).re - 0.5).abs() < 1e-15);
        let r1 = InitialData::Random.build(g, extras);
        let r2 = InitialData::Random.build(g, extras);
        assert_eq!(r1, r2);
    }
}
