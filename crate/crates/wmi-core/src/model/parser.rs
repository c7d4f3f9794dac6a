use std::collections::BTreeSet;
use std::str::FromStr;

use num::{BigInt, One, Zero};

use super::atom::{Atom, InputRel};
use super::formula::Formula;
use super::linear::LinearTerm;
use super::problem::Problem;
use super::vars::{BoolVar, RealVar};
use super::weight::{BinOp, WeightTerm};
use crate::error::{Result, WmiError};
use crate::Rat;

/// S-expression with source position, the shared surface syntax for problem
/// files and formula strings.
#[derive(Clone, Debug, PartialEq)]
pub enum Sexp {
    Sym(String, Pos),
    List(Vec<Sexp>, Pos),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Sym(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn err(pos: Pos, msg: impl Into<String>) -> WmiError {
    WmiError::Parse {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }
}

/// Parse all top-level s-expressions in `text`.
pub fn parse_sexps(text: &str) -> Result<Vec<Sexp>> {
    let mut lx = Lexer::new(text);
    let mut out = Vec::new();
    loop {
        lx.skip_trivia();
        if lx.chars.peek().is_none() {
            return Ok(out);
        }
        out.push(parse_sexp(&mut lx)?);
    }
}

fn parse_sexp(lx: &mut Lexer) -> Result<Sexp> {
    lx.skip_trivia();
    let pos = Pos {
        line: lx.line,
        col: lx.col,
    };
    match lx.chars.peek() {
        None => Err(err(pos, "unexpected end of input")),
        Some('(') => {
            lx.bump();
            let mut items = Vec::new();
            loop {
                lx.skip_trivia();
                match lx.chars.peek() {
                    None => return Err(err(pos, "unclosed '('")),
                    Some(')') => {
                        lx.bump();
                        return Ok(Sexp::List(items, pos));
                    }
                    Some(_) => items.push(parse_sexp(lx)?),
                }
            }
        }
        Some(')') => Err(err(pos, "unexpected ')'")),
        Some(_) => {
            let mut s = String::new();
            while let Some(&c) = lx.chars.peek() {
                if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                    break;
                }
                s.push(c);
                lx.bump();
            }
            Ok(Sexp::Sym(s, pos))
        }
    }
}

/// Parse a rational literal: integer, `p/q`, or decimal.
pub fn parse_rational(s: &str, pos: Pos) -> Result<Rat> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let value = if let Some((p, q)) = body.split_once('/') {
        let num = BigInt::from_str(p).map_err(|_| err(pos, format!("bad numerator in {s:?}")))?;
        let den = BigInt::from_str(q).map_err(|_| err(pos, format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(WmiError::ZeroDenominator(s.to_string()));
        }
        Rat::new(num, den)
    } else if let Some((int, frac)) = body.split_once('.') {
        let int = if int.is_empty() { "0" } else { int };
        let whole = BigInt::from_str(int).map_err(|_| err(pos, format!("bad number {s:?}")))?;
        let digits =
            BigInt::from_str(frac).map_err(|_| err(pos, format!("bad number {s:?}")))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        Rat::new(whole * &scale + digits, scale)
    } else {
        let n = BigInt::from_str(body).map_err(|_| err(pos, format!("bad number {s:?}")))?;
        Rat::from_integer(n)
    };
    Ok(if neg { -value } else { value })
}

fn looks_numeric(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    body.chars().next().map(|c| c.is_ascii_digit()).unwrap_or(false) || body.starts_with('.')
}

/// Declared-variable context shared by the formula and weight parsers.
pub struct VarContext {
    pub reals: BTreeSet<RealVar>,
    pub bools: BTreeSet<BoolVar>,
}

impl VarContext {
    fn classify(&self, name: &str, pos: Pos) -> Result<Either> {
        let rv = RealVar::new(name);
        if self.reals.contains(&rv) {
            return Ok(Either::Real(rv));
        }
        let bv = BoolVar::new(name);
        if self.bools.contains(&bv) {
            return Ok(Either::Bool(bv));
        }
        Err(err(pos, format!("undeclared identifier {name:?}")))
    }
}

enum Either {
    Real(RealVar),
    Bool(BoolVar),
}

/// Parse an arithmetic term into a linear form. Products of two non-constant
/// subterms and divisions by non-constants are rejected.
pub fn parse_linear(sx: &Sexp, ctx: &VarContext) -> Result<LinearTerm> {
    match sx {
        Sexp::Sym(s, pos) => {
            if looks_numeric(s) {
                return Ok(LinearTerm::constant(parse_rational(s, *pos)?));
            }
            match ctx.classify(s, *pos)? {
                Either::Real(v) => Ok(LinearTerm::var(v)),
                Either::Bool(_) => Err(err(
                    *pos,
                    format!("Boolean variable {s:?} in arithmetic position"),
                )),
            }
        }
        Sexp::List(items, pos) => {
            let (head, args) = split_head(items, *pos)?;
            match head {
                "+" => {
                    let mut acc = LinearTerm::constant(Rat::zero());
                    for a in args {
                        acc = &acc + &parse_linear(a, ctx)?;
                    }
                    Ok(acc)
                }
                "-" => {
                    if args.is_empty() {
                        return Err(err(*pos, "'-' needs at least one argument"));
                    }
                    let first = parse_linear(&args[0], ctx)?;
                    if args.len() == 1 {
                        return Ok(-&first);
                    }
                    let mut acc = first;
                    for a in &args[1..] {
                        acc = &acc - &parse_linear(a, ctx)?;
                    }
                    Ok(acc)
                }
                "*" => {
                    let mut acc = LinearTerm::constant(Rat::one());
                    for a in args {
                        let t = parse_linear(a, ctx)?;
                        acc = match (acc.is_constant(), t.is_constant()) {
                            (true, _) => t.scale(&acc.constant),
                            (_, true) => acc.scale(&t.constant),
                            _ => {
                                return Err(WmiError::NonLinearAtom(format!(
                                    "product of terms at {}:{}",
                                    pos.line, pos.col
                                )))
                            }
                        };
                    }
                    Ok(acc)
                }
                "/" => {
                    if args.len() != 2 {
                        return Err(err(*pos, "'/' needs exactly two arguments"));
                    }
                    let num = parse_linear(&args[0], ctx)?;
                    let den = parse_linear(&args[1], ctx)?;
                    if !den.is_constant() {
                        return Err(WmiError::NonLinearAtom(format!(
                            "division by a term at {}:{}",
                            pos.line, pos.col
                        )));
                    }
                    if den.constant.is_zero() {
                        return Err(WmiError::DivisionByZero);
                    }
                    Ok(num.scale(&den.constant.clone().recip()))
                }
                other => Err(err(*pos, format!("unknown term operator {other:?}"))),
            }
        }
    }
}

fn split_head(items: &[Sexp], pos: Pos) -> Result<(&str, &[Sexp])> {
    match items.split_first() {
        Some((Sexp::Sym(h, _), rest)) => Ok((h.as_str(), rest)),
        Some((Sexp::List(_, p), _)) => Err(err(*p, "expected an operator symbol")),
        None => Err(err(pos, "empty list")),
    }
}

fn input_rel(op: &str) -> Option<InputRel> {
    Some(match op {
        "<=" => InputRel::Le,
        "<" => InputRel::Lt,
        ">=" => InputRel::Ge,
        ">" => InputRel::Gt,
        "=" => InputRel::Eq,
        "!=" => InputRel::Ne,
        _ => None?,
    })
}

/// Parse a formula over the declared variables.
pub fn parse_formula(sx: &Sexp, ctx: &VarContext) -> Result<Formula> {
    match sx {
        Sexp::Sym(s, pos) => match s.as_str() {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            name => match ctx.classify(name, *pos)? {
                Either::Bool(v) => Ok(Formula::Atom(Atom::Bool(v))),
                Either::Real(_) => Err(err(
                    *pos,
                    format!("real variable {name:?} in formula position"),
                )),
            },
        },
        Sexp::List(items, pos) => {
            let (head, args) = split_head(items, *pos)?;
            if let Some(rel) = input_rel(head) {
                if args.len() != 2 {
                    return Err(err(*pos, format!("{head:?} needs exactly two arguments")));
                }
                let lhs = parse_linear(&args[0], ctx)?;
                let rhs = parse_linear(&args[1], ctx)?;
                return Ok(Formula::from_canon(Atom::lra(&lhs - &rhs, rel)));
            }
            match head {
                "and" => Ok(Formula::and(
                    args.iter()
                        .map(|a| parse_formula(a, ctx))
                        .collect::<Result<_>>()?,
                )),
                "or" => Ok(Formula::or(
                    args.iter()
                        .map(|a| parse_formula(a, ctx))
                        .collect::<Result<_>>()?,
                )),
                "not" => {
                    if args.len() != 1 {
                        return Err(err(*pos, "'not' needs exactly one argument"));
                    }
                    Ok(Formula::not(parse_formula(&args[0], ctx)?))
                }
                "->" => {
                    if args.len() != 2 {
                        return Err(err(*pos, "'->' needs exactly two arguments"));
                    }
                    Ok(Formula::implies(
                        parse_formula(&args[0], ctx)?,
                        parse_formula(&args[1], ctx)?,
                    ))
                }
                "<->" => {
                    if args.len() != 2 {
                        return Err(err(*pos, "'<->' needs exactly two arguments"));
                    }
                    Ok(Formula::iff(
                        parse_formula(&args[0], ctx)?,
                        parse_formula(&args[1], ctx)?,
                    ))
                }
                other => Err(err(*pos, format!("unknown formula operator {other:?}"))),
            }
        }
    }
}

/// Parse a weight term over the declared variables.
pub fn parse_weight(sx: &Sexp, ctx: &VarContext) -> Result<WeightTerm> {
    match sx {
        Sexp::Sym(s, pos) => {
            if looks_numeric(s) {
                return Ok(WeightTerm::constant(parse_rational(s, *pos)?));
            }
            match ctx.classify(s, *pos)? {
                Either::Real(v) => Ok(WeightTerm::var(v)),
                Either::Bool(_) => Err(err(
                    *pos,
                    format!("Boolean variable {s:?} in weight position"),
                )),
            }
        }
        Sexp::List(items, pos) => {
            let (head, args) = split_head(items, *pos)?;
            let binop = |op: BinOp, args: &[Sexp]| -> Result<WeightTerm> {
                if args.is_empty() {
                    return Err(err(*pos, format!("{:?} needs arguments", op.symbol())));
                }
                let mut acc = parse_weight(&args[0], ctx)?;
                for a in &args[1..] {
                    acc = WeightTerm::binop(op, acc, parse_weight(a, ctx)?);
                }
                Ok(acc)
            };
            match head {
                "+" => binop(BinOp::Add, args),
                "*" => binop(BinOp::Mul, args),
                "-" => {
                    if args.len() == 1 {
                        Ok(WeightTerm::binop(
                            BinOp::Sub,
                            WeightTerm::constant(Rat::zero()),
                            parse_weight(&args[0], ctx)?,
                        ))
                    } else {
                        binop(BinOp::Sub, args)
                    }
                }
                "/" => {
                    if args.len() != 2 {
                        return Err(err(*pos, "'/' needs exactly two arguments"));
                    }
                    Ok(WeightTerm::binop(
                        BinOp::Div,
                        parse_weight(&args[0], ctx)?,
                        parse_weight(&args[1], ctx)?,
                    ))
                }
                "ite" => {
                    if args.len() != 3 {
                        return Err(err(*pos, "'ite' needs exactly three arguments"));
                    }
                    Ok(WeightTerm::ite(
                        parse_formula(&args[0], ctx)?,
                        parse_weight(&args[1], ctx)?,
                        parse_weight(&args[2], ctx)?,
                    ))
                }
                "func" => {
                    let (name, rest) = match args.split_first() {
                        Some((Sexp::Sym(n, _), rest)) if !looks_numeric(n) => (n, rest),
                        _ => return Err(err(*pos, "'func' needs a symbol name")),
                    };
                    Ok(WeightTerm::Func(
                        name.as_str().into(),
                        rest.iter()
                            .map(|a| parse_weight(a, ctx))
                            .collect::<Result<_>>()?,
                    ))
                }
                other => Err(err(*pos, format!("unknown weight operator {other:?}"))),
            }
        }
    }
}

/// Parse a complete problem file.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let clauses = parse_sexps(text)?;

    // Declarations first, so later clauses can resolve identifiers.
    let mut reals = BTreeSet::new();
    let mut bools = BTreeSet::new();
    for c in &clauses {
        let (head, args, pos) = match c {
            Sexp::List(items, pos) => {
                let (h, a) = split_head(items, *pos)?;
                (h, a, *pos)
            }
            Sexp::Sym(_, pos) => return Err(err(*pos, "expected a top-level clause")),
        };
        match head {
            "declare-real" | "declare-bool" => {
                let name = match args {
                    [Sexp::Sym(n, _)] if !looks_numeric(n) => n.as_str(),
                    _ => return Err(err(pos, format!("{head:?} needs one identifier"))),
                };
                let fresh = if head == "declare-real" {
                    !bools.contains(&BoolVar::new(name)) && reals.insert(RealVar::new(name))
                } else {
                    !reals.contains(&RealVar::new(name)) && bools.insert(BoolVar::new(name))
                };
                if !fresh {
                    return Err(err(pos, format!("duplicate declaration of {name:?}")));
                }
            }
            "phi" | "chi" | "weight" => {}
            other => return Err(err(pos, format!("unknown clause {other:?}"))),
        }
    }

    let ctx = VarContext {
        reals: reals.clone(),
        bools: bools.clone(),
    };
    let mut phi = None;
    let mut chi = None;
    let mut weight = None;
    for c in &clauses {
        let (items, pos) = match c {
            Sexp::List(items, pos) => (items, *pos),
            Sexp::Sym(_, pos) => return Err(err(*pos, "expected a top-level clause")),
        };
        let (head, args) = split_head(items, pos)?;
        let one_arg = || -> Result<&Sexp> {
            match args {
                [a] => Ok(a),
                _ => Err(err(pos, format!("{head:?} needs exactly one body"))),
            }
        };
        match head {
            "phi" => {
                if phi.replace(parse_formula(one_arg()?, &ctx)?).is_some() {
                    return Err(err(pos, "duplicate 'phi' clause"));
                }
            }
            "chi" => {
                if chi.replace(parse_formula(one_arg()?, &ctx)?).is_some() {
                    return Err(err(pos, "duplicate 'chi' clause"));
                }
            }
            "weight" => {
                if weight.replace(parse_weight(one_arg()?, &ctx)?).is_some() {
                    return Err(err(pos, "duplicate 'weight' clause"));
                }
            }
            _ => {}
        }
    }

    let problem = Problem {
        phi: phi.unwrap_or(Formula::True),
        chi: chi.unwrap_or(Formula::True),
        weight: weight.unwrap_or_else(|| WeightTerm::constant(Rat::one())),
        reals,
        bools,
    };
    problem.validate()?;
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::atom::Relation;
    use crate::rint;

    #[test]
    fn minimal_problem_parses() {
        let p = parse_problem(
            "(declare-real x) (phi true) (chi (and (<= 0 x) (<= x 1))) (weight 1)",
        )
        .unwrap();
        assert_eq!(p.phi, Formula::True);
        assert_eq!(p.weight, WeightTerm::constant(rint(1)));
        assert_eq!(p.chi.atoms().len(), 2);
        assert!(p.chi.atoms().iter().all(|a| a.is_lra()));
    }

    #[test]
    fn relations_canonicalize_at_parse() {
        let p = parse_problem("(declare-real x) (chi (and (>= x 1) (not (< x 1))))").unwrap();
        // Both conjuncts canonicalize to the same literal; one survives.
        match &p.chi {
            Formula::And(cs) => {
                assert_eq!(cs.len(), 2);
                assert_eq!(cs[0], cs[1]);
            }
            other => panic!("unexpected {other}"),
        }
        let atom = p.chi.atoms().into_iter().next().unwrap();
        match atom {
            Atom::Lra { rel, .. } => assert_eq!(rel, Relation::Lt),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rationals_and_decimals() {
        let pos = Pos { line: 1, col: 1 };
        assert_eq!(parse_rational("3/4", pos).unwrap(), crate::rat(3, 4));
        assert_eq!(parse_rational("-1.25", pos).unwrap(), crate::rat(-5, 4));
        assert_eq!(parse_rational("2", pos).unwrap(), rint(2));
        assert!(matches!(
            parse_rational("1/0", pos),
            Err(WmiError::ZeroDenominator(_))
        ));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_problem("(declare-real x)\n(chi (<= x unknown))").unwrap_err();
        match e {
            WmiError::Parse { line, col, .. } => {
                assert_eq!(line, 2);
                assert!(col > 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_clause_is_an_error() {
        let e = parse_problem("(declare-real x) (phi true) (phi true)").unwrap_err();
        assert!(matches!(e, WmiError::Parse { .. }));
    }

    #[test]
    fn nonlinear_atom_rejected() {
        let e = parse_problem("(declare-real x) (chi (<= (* x x) 1))").unwrap_err();
        assert!(matches!(e, WmiError::NonLinearAtom(_)));
    }

    #[test]
    fn namespaces_are_disjoint() {
        let e = parse_problem("(declare-real x) (declare-bool x)").unwrap_err();
        assert!(matches!(e, WmiError::Parse { .. }));
    }

    #[test]
    fn weight_with_ite_and_func() {
        let p = parse_problem(
            "(declare-real x) (declare-bool a) \
             (chi (<= 0 x)) \
             (weight (ite a (* x x) (func g x)))",
        )
        .unwrap();
        assert_eq!(p.weight.count_ite(), 1);
        assert!(!p.weight.is_fi());
    }
}
