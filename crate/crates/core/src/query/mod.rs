//! First-order query syntax: AST, parser, printer and conjunction rewrites.

mod conj;
mod parser;

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

pub use conj::{exclusive_dnf, query_graph, split_negated_binary, GeneralizedConjunction, Literal, QueryGraph};
pub use parser::parse_query;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cmp {
    Le,
    Gt,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Rel { name: String, args: Vec<String> },
    Dist { x: String, y: String, cmp: Cmp, c: u32 },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    /// `exists var in N_radius(centers). body`
    ExistsIn { var: String, radius: u32, centers: Vec<String>, body: Box<Formula> },
}

impl Formula {
    pub fn rel(name: &str, args: &[&str]) -> Formula {
        Formula::Rel { name: name.to_string(), args: args.iter().map(|s| s.to_string()).collect() }
    }

    pub fn dist(x: &str, y: &str, cmp: Cmp, c: u32) -> Formula {
        Formula::Dist { x: x.to_string(), y: y.to_string(), cmp, c }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    pub fn exists_in(v: &str, radius: u32, centers: &[&str], body: Formula) -> Formula {
        Formula::ExistsIn {
            var: v.to_string(),
            radius,
            centers: centers.iter().map(|s| s.to_string()).collect(),
            body: Box::new(body),
        }
    }

    /// Conjunction of a list, `True` when empty.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Disjunction of a list, `False` when empty.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    /// Free variables in order of first occurrence in the text.
    pub fn free_vars(&self) -> Vec<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, seen: &mut HashSet<String>, out: &mut Vec<String>) {
            let mut note = |v: &String, bound: &Vec<String>| {
                if !bound.contains(v) && seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            };
            match f {
                Formula::True | Formula::False => {}
                Formula::Rel { args, .. } => args.iter().for_each(|v| note(v, bound)),
                Formula::Dist { x, y, .. } => {
                    note(x, bound);
                    note(y, bound);
                }
                Formula::Not(a) => walk(a, bound, seen, out),
                Formula::And(a, b) | Formula::Or(a, b) => {
                    walk(a, bound, seen, out);
                    walk(b, bound, seen, out);
                }
                Formula::Exists(v, body) | Formula::Forall(v, body) => {
                    bound.push(v.clone());
                    walk(body, bound, seen, out);
                    bound.pop();
                }
                Formula::ExistsIn { var, centers, body, .. } => {
                    centers.iter().for_each(|c| note(c, bound));
                    bound.push(var.clone());
                    walk(body, bound, seen, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut HashSet::new(), &mut out);
        out
    }

    /// Relation symbols with their arities, in order of first occurrence.
    pub fn relations(&self) -> Result<Vec<(String, usize)>> {
        fn walk(f: &Formula, out: &mut Vec<(String, usize)>) -> Result<()> {
            match f {
                Formula::Rel { name, args } => match out.iter().find(|(n, _)| n == name) {
                    Some((_, a)) if *a != args.len() => {
                        Err(Error::Arity(format!("{name} used with arities {a} and {}", args.len())))
                    }
                    Some(_) => Ok(()),
                    None => {
                        out.push((name.clone(), args.len()));
                        Ok(())
                    }
                },
                Formula::True | Formula::False | Formula::Dist { .. } => Ok(()),
                Formula::Not(a) => walk(a, out),
                Formula::And(a, b) | Formula::Or(a, b) => {
                    walk(a, out)?;
                    walk(b, out)
                }
                Formula::Exists(_, b) | Formula::Forall(_, b) | Formula::ExistsIn { body: b, .. } => walk(b, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out)?;
        Ok(out)
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Rel { .. } | Formula::Dist { .. } => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            _ => false,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Rel { .. } | Formula::Dist { .. } => 1,
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::Exists(_, b) | Formula::Forall(_, b) | Formula::ExistsIn { body: b, .. } => 1 + b.size(),
        }
    }

    /// Renames free occurrences of variables according to `map`.
    pub fn rename_free(&self, map: &dyn Fn(&str) -> Option<String>) -> Formula {
        fn go(f: &Formula, map: &dyn Fn(&str) -> Option<String>, bound: &mut Vec<String>) -> Formula {
            let r = |v: &String, bound: &Vec<String>| {
                if bound.contains(v) {
                    v.clone()
                } else {
                    map(v).unwrap_or_else(|| v.clone())
                }
            };
            match f {
                Formula::True => Formula::True,
                Formula::False => Formula::False,
                Formula::Rel { name, args } => {
                    Formula::Rel { name: name.clone(), args: args.iter().map(|a| r(a, bound)).collect() }
                }
                Formula::Dist { x, y, cmp, c } => Formula::Dist { x: r(x, bound), y: r(y, bound), cmp: *cmp, c: *c },
                Formula::Not(a) => Formula::not(go(a, map, bound)),
                Formula::And(a, b) => Formula::and(go(a, map, bound), go(b, map, bound)),
                Formula::Or(a, b) => Formula::or(go(a, map, bound), go(b, map, bound)),
                Formula::Exists(v, body) => {
                    bound.push(v.clone());
                    let body = go(body, map, bound);
                    bound.pop();
                    Formula::Exists(v.clone(), Box::new(body))
                }
                Formula::Forall(v, body) => {
                    bound.push(v.clone());
                    let body = go(body, map, bound);
                    bound.pop();
                    Formula::Forall(v.clone(), Box::new(body))
                }
                Formula::ExistsIn { var, radius, centers, body } => {
                    let centers = centers.iter().map(|c| r(c, bound)).collect();
                    bound.push(var.clone());
                    let body = go(body, map, bound);
                    bound.pop();
                    Formula::ExistsIn { var: var.clone(), radius: *radius, centers, body: Box::new(body) }
                }
            }
        }
        go(self, map, &mut Vec::new())
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[String]) -> fmt::Result {
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        f.write_str(v)?;
    }
    Ok(())
}

/// Prints in the query grammar; the output parses back to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Rel { name, args } => {
                write!(f, "{name}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Formula::Dist { x, y, cmp, c } => {
                let op = match cmp {
                    Cmp::Le => "<=",
                    Cmp::Gt => ">",
                };
                write!(f, "(dist({x},{y}) {op} {c})")
            }
            Formula::Not(a) => write!(f, "!{a}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Exists(v, b) => write!(f, "(exists {v}. {b})"),
            Formula::Forall(v, b) => write!(f, "(forall {v}. {b})"),
            Formula::ExistsIn { var, radius, centers, body } => {
                write!(f, "(exists {var} in N_{radius}(")?;
                write_list(f, centers)?;
                write!(f, "). {body})")
            }
        }
    }
}
