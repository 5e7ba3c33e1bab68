//! Front end for the presentation language `F<p>[x,y,...]/(f1,...,fk)` and `Q[...]/(...)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::Field;

/// Polynomial with integer coefficients, keyed by exponent vectors.
pub type IntPoly = BTreeMap<Vec<u32>, BigInt>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedPresentation {
    pub field: Field,
    pub variables: Vec<String>,
    pub relations: Vec<IntPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = bytes[start..i].iter().collect();
            out.push((start, Tok::Int(s.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(bytes[start..i].iter().collect())));
        } else if "[]()/,^*+-".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                position: i,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.here(),
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(Tok::Sym(s)) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{c}`")),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn exponent(&mut self) -> Result<u32> {
        if !self.eat('^') {
            return Ok(1);
        }
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                u32::try_from(n).or_else(|_| self.err("exponent too large"))
            }
            _ => self.err("expected integer exponent"),
        }
    }

    fn poly(&mut self) -> Result<IntPoly> {
        let mut acc = IntPoly::new();
        let mut first = true;
        loop {
            let negate = if self.eat('-') {
                true
            } else if self.eat('+') || first {
                false
            } else {
                break;
            };
            first = false;
            let mut t = self.term()?;
            if negate {
                t.values_mut().for_each(|c| *c = -c.clone());
            }
            add_into(&mut acc, &t);
            if !matches!(self.peek(), Some(Tok::Sym('+')) | Some(Tok::Sym('-'))) {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<IntPoly> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            let f = self.factor()?;
            acc = mul_poly(&acc, &f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<IntPoly> {
        let e = self.vars.len();
        let base = match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                IntPoly::from([(vec![0; e], n)])
            }
            Some(Tok::Ident(name)) => {
                let position = self.here();
                let Some(idx) = self.vars.iter().position(|v| *v == name) else {
                    return Err(Error::UnknownVariable { name, position });
                };
                self.pos += 1;
                let mut m = vec![0; e];
                m[idx] = 1;
                IntPoly::from([(m, BigInt::one())])
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let p = self.poly()?;
                self.expect(')')?;
                p
            }
            _ => return self.err("expected coefficient, variable or `(`"),
        };
        let k = self.exponent()?;
        let mut acc = IntPoly::from([(vec![0; e], BigInt::one())]);
        for _ in 0..k {
            acc = mul_poly(&acc, &base);
        }
        Ok(acc)
    }

    fn poly_list(&mut self) -> Result<Vec<IntPoly>> {
        self.expect('(')?;
        let mut out = Vec::new();
        if self.eat(')') {
            return Ok(out);
        }
        loop {
            out.push(self.poly()?);
            if self.eat(')') {
                break;
            }
            self.expect(',')?;
        }
        Ok(out)
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            return self.err("unexpected trailing input");
        }
        Ok(())
    }
}

fn add_into(acc: &mut IntPoly, t: &IntPoly) {
    for (m, c) in t {
        let e = acc.entry(m.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            acc.remove(m);
        }
    }
}

fn mul_poly(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = IntPoly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            add_into(&mut out, &IntPoly::from([(m, ca * cb)]));
        }
    }
    out
}

pub fn parse_field(name: &str, position: usize) -> Result<Field> {
    if name == "Q" {
        return Ok(Field::Rational);
    }
    let digits = name
        .strip_prefix('F')
        .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()));
    let Some(digits) = digits else {
        return Err(Error::Parse {
            position,
            message: format!("unknown field `{name}`; expected Q or F<p>"),
        });
    };
    let p: u64 = digits.parse().map_err(|_| Error::Parse {
        position,
        message: "field characteristic too large".into(),
    })?;
    Field::prime(p)
}

/// Parses `FIELD[vars]/(polys)`; the quotient part may be omitted for a polynomial ring.
pub fn parse_presentation_text(text: &str) -> Result<ParsedPresentation> {
    let toks = tokenize(text)?;
    let (field_name, fpos) = match toks.first() {
        Some((p, Tok::Ident(s))) => (s.clone(), *p),
        _ => {
            return Err(Error::Parse {
                position: 0,
                message: "expected field name".into(),
            })
        }
    };
    let field = parse_field(&field_name, fpos)?;
    let mut p = Parser {
        toks,
        pos: 1,
        end: text.chars().count(),
        vars: &[],
    };
    p.expect('[')?;
    let mut variables = Vec::new();
    loop {
        match p.peek().cloned() {
            Some(Tok::Ident(v)) => {
                if variables.contains(&v) {
                    return p.err(format!("duplicate variable `{v}`"));
                }
                variables.push(v);
                p.pos += 1;
            }
            _ => return p.err("expected variable name"),
        }
        if p.eat(']') {
            break;
        }
        p.expect(',')?;
    }
    let relations = if p.eat('/') {
        let toks = std::mem::take(&mut p.toks);
        let mut q = Parser {
            toks,
            pos: p.pos,
            end: p.end,
            vars: &variables,
        };
        let rels = q.poly_list()?;
        q.finish()?;
        rels
    } else {
        p.finish()?;
        Vec::new()
    };
    Ok(ParsedPresentation {
        field,
        variables,
        relations,
    })
}

/// Parses a parenthesised generator list `(p1,...,pk)` over known variables.
pub fn parse_ideal_text(text: &str, variables: &[String]) -> Result<Vec<IntPoly>> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
        vars: variables,
    };
    let out = p.poly_list()?;
    p.finish()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_basic_presentation() {
        let p = parse_presentation_text("F101[x,y]/(x^3, y^3)").unwrap();
        assert_eq!(p.field, Field::Prime(101));
        assert_eq!(p.variables, vec!["x", "y"]);
        assert_eq!(p.relations.len(), 2);
        assert_eq!(p.relations[0], IntPoly::from([(vec![3, 0], BigInt::one())]));
    }

    #[test]
    fn expands_products_and_signs() {
        let p = parse_presentation_text("Q[a,b]/((a+b)^2 - 2*a*b)").unwrap();
        let expect = IntPoly::from([(vec![2, 0], BigInt::one()), (vec![0, 2], BigInt::one())]);
        assert_eq!(p.relations[0], expect);
    }

    #[test]
    fn reports_positions() {
        match parse_presentation_text("F101[x,y]/(x*z)") {
            Err(Error::UnknownVariable { name, position }) => {
                assert_eq!(name, "z");
                assert_eq!(position, 13);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_presentation_text("F101[x,y]/(x^2,"),
            Err(Error::Parse { position: 15, .. })
        ));
        assert!(matches!(
            parse_presentation_text("G7[x]/(x^2)"),
            Err(Error::Parse { position: 0, .. })
        ));
    }
}
