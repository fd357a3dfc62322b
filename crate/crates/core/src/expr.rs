//! Closed-form scalar expressions of chart coordinates.
//!
//! The grammar (see `docs/grammar.ebnf`) is standard infix arithmetic with
//! `^` binding tightest (right-associative, constant exponent only), then
//! unary minus, then `*` `/`, then `+` `-`. Identifiers must be declared
//! coordinates of the owning chart; the six supported functions are
//! `exp`, `ln`, `sin`, `cos`, `sqrt`, `abs`.
//!
//! Expressions are immutable after parse and evaluation is pure, so values
//! may be shared freely across threads.

use crate::error::{ExprError, GeomError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

/// Abstract syntax tree of a chart expression. Coordinates are positional
/// (index into the chart's coordinate list); user-facing names live on the
/// chart, not here.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Coord(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Base raised to a constant real exponent.
    Pow(Box<Expr>, f64),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(source: &str, coords: &[&str]) -> Result<Expr, ExprError> {
        Parser::new(source, coords)?.parse()
    }

    /// Exact recursive evaluation; non-finite intermediates are promoted to
    /// `GeomError::Domain`.
    pub fn eval(&self, p: &[f64]) -> Result<f64, GeomError> {
        let v = self.eval_inner(p)?;
        finite(v, || self.pretty(&[]))
    }

    fn eval_inner(&self, p: &[f64]) -> Result<f64, GeomError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Coord(i) => p[*i],
            Expr::Neg(a) => -a.eval_inner(p)?,
            Expr::Add(a, b) => a.eval_inner(p)? + b.eval_inner(p)?,
            Expr::Sub(a, b) => a.eval_inner(p)? - b.eval_inner(p)?,
            Expr::Mul(a, b) => a.eval_inner(p)? * b.eval_inner(p)?,
            Expr::Div(a, b) => {
                let d = b.eval_inner(p)?;
                if d == 0.0 {
                    return Err(GeomError::Domain {
                        context: "division by zero".into(),
                    });
                }
                a.eval_inner(p)? / d
            }
            Expr::Pow(a, e) => {
                let base = a.eval_inner(p)?;
                if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
                    if base == 0.0 && *e < 0.0 {
                        return Err(GeomError::Domain {
                            context: "zero raised to a negative power".into(),
                        });
                    }
                    base.powi(*e as i32)
                } else {
                    if base <= 0.0 {
                        return Err(GeomError::Domain {
                            context: format!(
                                "non-integer power of non-positive base {base}"
                            ),
                        });
                    }
                    base.powf(*e)
                }
            }
            Expr::Func(f, a) => {
                let x = a.eval_inner(p)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(GeomError::Domain {
                                context: format!("ln of non-positive value {x}"),
                            });
                        }
                        x.ln()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(GeomError::Domain {
                                context: format!("sqrt of negative value {x}"),
                            });
                        }
                        x.sqrt()
                    }
                    Func::Abs => x.abs(),
                }
            }
        };
        finite(v, || self.pretty(&[]))
    }

    /// True when no coordinate appears in the tree.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Coord(_) => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    /// Canonical rendering; `pretty ∘ parse` is a fixed point on its own
    /// output. Coordinates render as their chart names, or `x{i+1}` if no
    /// names are supplied.
    pub fn pretty(&self, names: &[String]) -> String {
        self.render(names, 0)
    }

    // Precedence levels: 0 add, 1 mul, 2 unary, 3 pow, 4 atom.
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 0,
            Expr::Mul(..) | Expr::Div(..) => 1,
            Expr::Neg(..) => 2,
            Expr::Pow(..) => 3,
            Expr::Const(c) if *c < 0.0 => 2,
            _ => 4,
        }
    }

    fn render(&self, names: &[String], min_prec: u8) -> String {
        let body = match self {
            Expr::Const(c) => format!("{c}"),
            Expr::Coord(i) => names
                .get(*i)
                .cloned()
                .unwrap_or_else(|| format!("x{}", i + 1)),
            Expr::Neg(a) => format!("-{}", a.render(names, 3)),
            Expr::Add(a, b) => {
                format!("{} + {}", a.render(names, 0), b.render(names, 1))
            }
            Expr::Sub(a, b) => {
                format!("{} - {}", a.render(names, 0), b.render(names, 1))
            }
            Expr::Mul(a, b) => {
                format!("{}*{}", a.render(names, 1), b.render(names, 2))
            }
            Expr::Div(a, b) => {
                format!("{}/{}", a.render(names, 1), b.render(names, 2))
            }
            Expr::Pow(a, e) => {
                let exp = if *e < 0.0 {
                    format!("(-{})", -e)
                } else {
                    format!("{e}")
                };
                format!("{}^{}", a.render(names, 4), exp)
            }
            Expr::Func(f, a) => format!("{}({})", f.name(), a.render(names, 0)),
        };
        if self.prec() < min_prec {
            format!("({body})")
        } else {
            body
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer / recursive descent parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    coords: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn new(source: &str, coords: &'a [&'a str]) -> Result<Self, ExprError> {
        if source.trim().is_empty() {
            return Err(ExprError::Syntax {
                position: 0,
                expected: "non-empty expression".into(),
            });
        }
        let toks = lex(source)?;
        Ok(Parser {
            toks,
            pos: 0,
            coords,
        })
    }

    fn parse(&mut self) -> Result<Expr, ExprError> {
        let e = self.expr()?;
        match self.peek() {
            (Tok::End, _) => Ok(e),
            (_, at) => Err(ExprError::Syntax {
                position: at,
                expected: "operator or end of input".into(),
            }),
        }
    }

    fn peek(&self) -> (Tok, usize) {
        self.toks[self.pos].clone()
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek().0 == Tok::Minus {
            self.bump();
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek().0 == Tok::Caret {
            self.bump();
            let e = self.exponent()?;
            Ok(Expr::Pow(Box::new(base), e))
        } else {
            Ok(base)
        }
    }

    /// Exponents must be constant: an optionally negated number or a
    /// parenthesized constant exponent.
    fn exponent(&mut self) -> Result<f64, ExprError> {
        match self.bump() {
            (Tok::Num(v), _) => Ok(v),
            (Tok::Minus, _) => Ok(-self.exponent()?),
            (Tok::LParen, _) => {
                let v = self.exponent()?;
                match self.bump() {
                    (Tok::RParen, _) => Ok(v),
                    (_, at) => Err(ExprError::Syntax {
                        position: at,
                        expected: "`)`".into(),
                    }),
                }
            }
            (_, at) => Err(ExprError::Syntax {
                position: at,
                expected: "constant exponent".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.bump() {
            (Tok::Num(v), _) => Ok(Expr::Const(v)),
            (Tok::LParen, _) => {
                let e = self.expr()?;
                match self.bump() {
                    (Tok::RParen, _) => Ok(e),
                    (_, at) => Err(ExprError::Syntax {
                        position: at,
                        expected: "`)`".into(),
                    }),
                }
            }
            (Tok::Ident(name), at) => {
                if let Some(f) = Func::from_name(&name) {
                    if self.peek().0 == Tok::LParen {
                        self.bump();
                        let arg = self.expr()?;
                        return match self.bump() {
                            (Tok::RParen, _) => Ok(Expr::Func(f, Box::new(arg))),
                            (_, p) => Err(ExprError::Syntax {
                                position: p,
                                expected: "`)`".into(),
                            }),
                        };
                    }
                }
                match self.coords.iter().position(|c| *c == name) {
                    Some(i) => Ok(Expr::Coord(i)),
                    None => Err(ExprError::UnknownIdentifier {
                        name,
                        position: at,
                    }),
                }
            }
            (_, at) => Err(ExprError::Syntax {
                position: at,
                expected: "number, coordinate, function call or `(`".into(),
            }),
        }
    }
}

fn lex(source: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = source.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                // scientific notation tail: e or E, optional sign, digits
                if i < bytes.len()
                    && matches!(bytes[i] as char, 'e' | 'E')
                    && i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_digit()
                        || (matches!(bytes[i + 1] as char, '+' | '-')
                            && i + 2 < bytes.len()
                            && bytes[i + 2].is_ascii_digit()))
                {
                    i += 2;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text = &source[start..i];
                let v: f64 = text.parse().map_err(|_| ExprError::Syntax {
                    position: start,
                    expected: "a number".into(),
                })?;
                toks.push((Tok::Num(v), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(source[start..i].to_string()), start));
            }
            _ => {
                return Err(ExprError::Syntax {
                    position: i,
                    expected: format!("a valid token, found `{c}`"),
                })
            }
        }
    }
    toks.push((Tok::End, source.len()));
    Ok(toks)
}

fn finite(v: f64, ctx: impl Fn() -> String) -> Result<f64, GeomError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(GeomError::Domain {
            context: format!("non-finite value in `{}`", ctx()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COORDS: &[&str] = &["x1", "x2", "y1", "y2"];

    fn ev(src: &str, p: &[f64]) -> f64 {
        Expr::parse(src, COORDS).unwrap().eval(p).unwrap()
    }

    #[test]
    fn parses_div_pow() {
        let e = Expr::parse("1/x2^2", COORDS).unwrap();
        assert_eq!(
            e,
            Expr::Div(
                Box::new(Expr::Const(1.0)),
                Box::new(Expr::Pow(Box::new(Expr::Coord(1)), 2.0))
            )
        );
    }

    #[test]
    fn parses_neg_ln() {
        let e = Expr::parse("-ln(x2)", COORDS).unwrap();
        assert_eq!(
            e,
            Expr::Neg(Box::new(Expr::Func(Func::Ln, Box::new(Expr::Coord(1)))))
        );
    }

    #[test]
    fn undeclared_coordinate_is_an_error() {
        match Expr::parse("x3", &["x1", "x2"]) {
            Err(ExprError::UnknownIdentifier { name, position }) => {
                assert_eq!(name, "x3");
                assert_eq!(position, 0);
            }
            other => panic!("expected UnknownIdentifier, got {other:?}"),
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ev("1/x2^2", &[0.0, 2.0, 0.0, 0.0]), 0.25);
        assert_eq!(ev("-ln(x2)", &[0.0, 1.0, 0.0, 0.0]), 0.0);
        assert!((ev("x2^6", &[0.0, 2.0, 0.0, 0.0]) - 64.0).abs() < 1e-15);
    }

    #[test]
    fn division_by_zero_is_domain_error() {
        let e = Expr::parse("1/x2", COORDS).unwrap();
        assert!(matches!(
            e.eval(&[0.0, 0.0, 0.0, 0.0]),
            Err(GeomError::Domain { .. })
        ));
    }

    #[test]
    fn ln_of_nonpositive_is_domain_error() {
        let e = Expr::parse("ln(x1)", COORDS).unwrap();
        assert!(e.eval(&[-1.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn pow_precedence_and_unary_minus() {
        // ^ binds tighter than unary minus: -x1^2 = -(x1^2)
        assert_eq!(ev("-x1^2", &[3.0, 0.0, 0.0, 0.0]), -9.0);
        // constant negative exponent
        assert_eq!(ev("x2^-2", &[0.0, 2.0, 0.0, 0.0]), 0.25);
    }

    #[test]
    fn non_constant_exponent_rejected() {
        assert!(matches!(
            Expr::parse("x1^x2", COORDS),
            Err(ExprError::Syntax { .. })
        ));
    }

    #[test]
    fn syntax_error_position() {
        match Expr::parse("1 + * 2", COORDS) {
            Err(ExprError::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn pretty_parse_is_fixed_point() {
        for src in [
            "1/x2^2",
            "-ln(x2)",
            "x1*x2 + sin(x1)/cos(x2) - sqrt(abs(y1))",
            "exp(-(x1 + x2))^2",
            "2*x1^-3*(y1 - y2)",
        ] {
            let names: Vec<String> = COORDS.iter().map(|s| s.to_string()).collect();
            let once = Expr::parse(src, COORDS).unwrap().pretty(&names);
            let twice = Expr::parse(&once, COORDS).unwrap().pretty(&names);
            assert_eq!(once, twice, "not a fixed point for `{src}`");
        }
    }
}
