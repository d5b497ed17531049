//! Text forms for expressions: a human-oriented `Display` and a fully
//! parenthesized prefix form with a deterministic factor order, suitable for
//! golden tests and diffing. Structured serialization is the serde `Expr`
//! derive (JSON through `serde_json`).

use super::coeff::Coeff;
use super::expr::{Atom, Expr, Monomial};
use std::fmt::{self, Write as _};

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            let body = display_term(m, c);
            if first {
                f.write_str(&body)?;
                first = false;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

fn display_term(m: &Monomial, c: &Coeff) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (a, e) in &m.factors {
        let base = display_atom(a);
        if e.is_integer() && e.to_integer() == 1 {
            parts.push(base);
        } else if *e.denom() == 1 {
            parts.push(format!("{base}^{}", e.numer()));
        } else {
            parts.push(format!("{base}^({e})"));
        }
    }
    let factors = parts.join("*");
    if factors.is_empty() {
        return format!("{c}");
    }
    if c.is_one() {
        factors
    } else if (&Coeff::zero() - c).is_one() {
        format!("-{factors}")
    } else {
        format!("{c}*{factors}")
    }
}

fn display_atom(a: &Atom) -> String {
    match a {
        Atom::Param(p) => p.to_string(),
        Atom::Coord(c) => c.name().to_string(),
        Atom::Fn { id, coord, order } => {
            let primes = match order {
                0 => String::new(),
                1 => "'".to_string(),
                2 => "''".to_string(),
                3 => "'''".to_string(),
                n => format!("^({n})"),
            };
            match coord {
                super::expr::Coord::X => format!("{id}{primes}"),
                super::expr::Coord::Y => format!("{id}[y]{primes}"),
            }
        }
        Atom::Pow { base } => format!("({base})"),
    }
}

impl Expr {
    /// Deterministic fully-parenthesized prefix form. Stable across runs and
    /// platforms; intended for golden files and report output.
    pub fn to_prefix(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut items: Vec<String> = Vec::new();
        for (m, c) in self.terms() {
            let mut s = String::new();
            write!(s, "(term {c}").unwrap();
            for (a, e) in &m.factors {
                write!(s, " (pow {} {e})", prefix_atom(a)).unwrap();
            }
            s.push(')');
            items.push(s);
        }
        format!("(sum {})", items.join(" "))
    }
}

fn prefix_atom(a: &Atom) -> String {
    match a {
        Atom::Param(p) => format!("(param {p})"),
        Atom::Coord(c) => format!("(coord {})", c.name()),
        Atom::Fn { id, coord, order } => {
            format!("(fn {id} {} {order})", coord.name())
        }
        Atom::Pow { base } => format!("(expr {})", base.to_prefix()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{Coord::X, Exp};

    #[test]
    fn display_forms() {
        let e = Expr::param("hbar")
            .pow_int(2)
            .mul(&Expr::unknown("V", X, 2))
            .scale(&Coeff::from_ratio(-1, 2))
            .add(&Expr::unknown("V", X, 0).mul(&Expr::x()));
        assert_eq!(format!("{e}"), "-1/2*hbar^2*V'' + x*V");
    }

    #[test]
    fn display_radical_and_rational() {
        let s = Expr::param("beta").mul(&Expr::x()).pow_rat(Exp::new(1, 2));
        assert_eq!(format!("{s}"), "beta^(1/2)*x^(1/2)");
    }

    #[test]
    fn prefix_is_deterministic() {
        let e = Expr::x().add(&Expr::param("a"));
        let f = Expr::param("a").add(&Expr::x());
        assert_eq!(e.to_prefix(), f.to_prefix());
        assert_eq!(
            e.to_prefix(),
            "(sum (term 1 (pow (param a) 1)) (term 1 (pow (coord x) 1)))"
        );
    }

    #[test]
    fn json_round_trip() {
        let e = Expr::param("hbar")
            .mul(&Expr::unknown("V", X, 1))
            .scale(&Coeff::i())
            .add(&Expr::x().pow_rat(Exp::new(3, 2)));
        let js = serde_json::to_string(&e).unwrap();
        let back: Expr = serde_json::from_str(&js).unwrap();
        assert_eq!(e, back);
    }
}
