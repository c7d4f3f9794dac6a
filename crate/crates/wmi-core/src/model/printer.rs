use num::{One, Zero};

use super::atom::{Atom, Relation};
use super::formula::Formula;
use super::linear::LinearTerm;
use super::problem::Problem;
use super::weight::WeightTerm;

/// Render a problem in the text format accepted by the parser. Parsing the
/// output reproduces the problem structurally.
pub fn serialize_problem(p: &Problem) -> String {
    let mut out = String::new();
    for v in &p.reals {
        out.push_str(&format!("(declare-real {})\n", v));
    }
    for v in &p.bools {
        out.push_str(&format!("(declare-bool {})\n", v));
    }
    out.push_str(&format!("(phi {})\n", formula_sexp(&p.phi)));
    out.push_str(&format!("(chi {})\n", formula_sexp(&p.chi)));
    out.push_str(&format!("(weight {})\n", weight_sexp(&p.weight)));
    out
}

pub fn linear_sexp(t: &LinearTerm) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (v, c) in &t.coeffs {
        if c.is_one() {
            parts.push(v.to_string());
        } else {
            parts.push(format!("(* {} {})", c, v));
        }
    }
    if !t.constant.is_zero() || parts.is_empty() {
        parts.push(t.constant.to_string());
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        format!("(+ {})", parts.join(" "))
    }
}

pub fn atom_sexp(a: &Atom) -> String {
    match a {
        Atom::Bool(v) => v.to_string(),
        Atom::Lra { term, rel } => {
            let op = match rel {
                Relation::Le => "<=",
                Relation::Lt => "<",
                Relation::Eq => "=",
            };
            format!("({} {} 0)", op, linear_sexp(term))
        }
        // EUF atoms only exist inside the enumerator; they have no input
        // syntax and should never reach the printer.
        Atom::EufEq { lhs, rhs } => format!("(= {} {})", lhs, rhs),
    }
}

pub fn formula_sexp(f: &Formula) -> String {
    match f {
        Formula::True => "true".to_string(),
        Formula::False => "false".to_string(),
        Formula::Atom(a) => atom_sexp(a),
        Formula::Not(inner) => format!("(not {})", formula_sexp(inner)),
        Formula::And(fs) => format!(
            "(and {})",
            fs.iter().map(formula_sexp).collect::<Vec<_>>().join(" ")
        ),
        Formula::Or(fs) => format!(
            "(or {})",
            fs.iter().map(formula_sexp).collect::<Vec<_>>().join(" ")
        ),
        Formula::Implies(a, b) => format!("(-> {} {})", formula_sexp(a), formula_sexp(b)),
        Formula::Iff(a, b) => format!("(<-> {} {})", formula_sexp(a), formula_sexp(b)),
    }
}

pub fn weight_sexp(w: &WeightTerm) -> String {
    match w {
        WeightTerm::Const(c) => c.to_string(),
        WeightTerm::Var(v) => v.to_string(),
        WeightTerm::BinOp(op, l, r) => {
            format!("({} {} {})", op.symbol(), weight_sexp(l), weight_sexp(r))
        }
        WeightTerm::Func(name, args) => {
            let mut s = format!("(func {}", name);
            for a in args {
                s.push(' ');
                s.push_str(&weight_sexp(a));
            }
            s.push(')');
            s
        }
        WeightTerm::Ite(c, t, e) => format!(
            "(ite {} {} {})",
            formula_sexp(c),
            weight_sexp(t),
            weight_sexp(e)
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parser::parse_problem;

    fn roundtrip(text: &str) {
        let p = parse_problem(text).unwrap();
        let s = serialize_problem(&p);
        let q = parse_problem(&s).unwrap();
        assert_eq!(p, q, "serialized form:\n{s}");
    }

    #[test]
    fn parse_serialize_is_identity() {
        roundtrip("(declare-real x) (phi true) (chi (and (<= 0 x) (<= x 1))) (weight 1)");
        roundtrip(
            "(declare-real x1) (declare-real x2) (declare-bool a1) (declare-bool a2) \
             (phi (or a1 (-> a2 (< x1 x2)))) \
             (chi (and (<= 0 x1) (<= x1 2) (<= 0 x2) (<= x2 3))) \
             (weight (ite a1 (* x1 x2) (ite (>= x1 1) (+ x1 1/2) (func g x1 x2))))",
        );
        roundtrip(
            "(declare-real x) (chi (or (!= x 1) (> (* 2 x) 3))) (weight (/ (- x) 4))",
        );
    }
}
