use super::{Cmp, Formula};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    Amp,
    Pipe,
    Le,
    Gt,
    End,
}

const KEYWORDS: [&str; 6] = ["exists", "forall", "in", "dist", "true", "false"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '>' => Tok::Gt,
            '<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    Tok::Le
                } else {
                    return Err(Error::Syntax { pos: i, msg: "expected `<=`".into() });
                }
            }
            c if c.is_ascii_digit() => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..=i]
                    .parse()
                    .map_err(|_| Error::Syntax { pos: start, msg: "number too large".into() })?;
                Tok::Num(n)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            other => return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{other}`") }),
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.fail("expected identifier"),
        }
    }

    fn var_list(&mut self) -> Result<Vec<String>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut vars = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            vars.push(self.ident()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(vars)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut left = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(k) if k == "exists" || k == "forall" => self.quantifier(k == "exists"),
            _ => self.primary(),
        }
    }

    fn quantifier(&mut self, existential: bool) -> Result<Formula> {
        self.bump();
        let at = self.pos();
        let var = self.ident()?;
        if self.bound.contains(&var) {
            return Err(Error::Syntax { pos: at, msg: format!("rebinding {var}") });
        }
        let mut relativized = None;
        if *self.peek() == Tok::Ident("in".into()) {
            self.bump();
            let radius = match self.peek().clone() {
                Tok::Ident(s) if s.starts_with("N_") && s.len() > 2 && s[2..].bytes().all(|b| b.is_ascii_digit()) => {
                    self.bump();
                    s[2..].parse::<u32>().map_err(|_| Error::Syntax { pos: at, msg: "radius too large".into() })?
                }
                _ => return self.fail("expected `N_r`"),
            };
            let centers = self.var_list()?;
            if centers.contains(&var) {
                return Err(Error::Syntax { pos: at, msg: format!("{var} cannot be its own center") });
            }
            relativized = Some((radius, centers));
        }
        self.expect(Tok::Dot, "`.`")?;
        self.bound.push(var.clone());
        let body = self.or();
        self.bound.pop();
        let body = body?;
        Ok(match (existential, relativized) {
            (true, None) => Formula::Exists(var, Box::new(body)),
            (false, None) => Formula::Forall(var, Box::new(body)),
            (true, Some((radius, centers))) => Formula::ExistsIn { var, radius, centers, body: Box::new(body) },
            (false, Some((radius, centers))) => Formula::not(Formula::ExistsIn {
                var,
                radius,
                centers,
                body: Box::new(Formula::not(body)),
            }),
        })
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.or()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(k) if k == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(k) if k == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(k) if k == "dist" => {
                self.bump();
                let vars = self.var_list()?;
                if vars.len() != 2 {
                    return self.fail("dist takes two variables");
                }
                let cmp = match self.bump() {
                    Tok::Le => Cmp::Le,
                    Tok::Gt => Cmp::Gt,
                    _ => return self.fail("expected `<=` or `>`"),
                };
                let c = match self.bump() {
                    Tok::Num(c) if c <= u32::MAX as u64 => c as u32,
                    _ => return self.fail("expected distance constant"),
                };
                Ok(Formula::Dist { x: vars[0].clone(), y: vars[1].clone(), cmp, c })
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                let args = self.var_list()?;
                Ok(Formula::Rel { name, args })
            }
            _ => self.fail("expected formula"),
        }
    }
}

/// Parses the query grammar. Quantifiers extend as far right as possible.
pub fn parse_query(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, at: 0, bound: Vec::new() };
    let f = p.or()?;
    if *p.peek() != Tok::End {
        return p.fail("unexpected trailing input");
    }
    Ok(f)
}
