use std::fmt::Write;

use crate::alphabet::{Alphabet, EPS};
use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::scalar::Rational;

use super::ast::*;

/// Canonical text form of a document: one blank line between items, two-space
/// indentation, weights as `p/q` and the fewest parentheses that preserve the
/// expression tree.
pub fn print_model(doc: &ModelDocument) -> String {
    let mut out = String::new();
    for (i, item) in doc.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match item {
            Item::Alphabet(a) => {
                let symbols: Vec<&str> = std::iter::once(EPS)
                    .chain(a.symbols.iter().map(|s| s.name.as_str()))
                    .collect();
                let _ = writeln!(out, "alphabet {} = {{ {} }};", a.name, symbols.join(", "));
            }
            Item::Automaton(a) => print_automaton(&mut out, a),
            Item::System(s) => {
                let _ = writeln!(out, "system {} = {};", s.name, print_expr(&s.expr));
            }
        }
    }
    out
}

fn print_automaton(out: &mut String, a: &AutomatonDecl) {
    let _ = writeln!(out, "automaton {} [{}, {}] {{", a.name, a.left, a.right);
    let states: Vec<&str> = a.states.iter().map(|s| s.name.as_str()).collect();
    let _ = writeln!(out, "  states: {};", states.join(" "));
    for t in &a.transitions {
        let _ = writeln!(
            out,
            "  {} -({}|{})-> {} : {};",
            t.from, t.left, t.right, t.to, t.weight
        );
    }
    out.push_str("}\n");
}

fn precedence(e: &Expr) -> u8 {
    match e.kind {
        ExprKind::Series(..) => 0,
        ExprKind::Parallel(..) => 1,
        ExprKind::Power(..) => 2,
        _ => 3,
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_operand(out: &mut String, e: &Expr, needs_parens: bool) {
    if needs_parens {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    let own = precedence(e);
    match &e.kind {
        ExprKind::Name(id) => out.push_str(&id.name),
        ExprKind::Series(a, b) | ExprKind::Parallel(a, b) => {
            // left-associative: a right operand at the same level keeps its parens
            write_operand(out, a, precedence(a) < own);
            out.push_str(if own == 0 { " . " } else { " x " });
            write_operand(out, b, precedence(b) <= own);
        }
        ExprKind::Power(a, k) => {
            write_operand(out, a, precedence(a) < own);
            let _ = write!(out, "^{k}");
        }
        ExprKind::Constant(kind, ids) => {
            let names: Vec<&str> = ids.iter().map(|i| i.name.as_str()).collect();
            let _ = write!(out, "{}({})", kind.keyword(), names.join(", "));
        }
        ExprKind::Relation { left, right, pairs } => {
            let pairs: Vec<String> = pairs.iter().map(|(a, b)| format!("({a}, {b})")).collect();
            let _ = write!(out, "rel({left}, {right}) {{ {} }}", pairs.join(", "));
        }
    }
}

fn atomic_names(alphabet: &Alphabet) -> Result<Vec<Ident>> {
    alphabet
        .symbols()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != alphabet.epsilon_index())
        .map(|(_, s)| match s.atoms() {
            [atom] => Ok(Ident::new(atom.clone())),
            _ => Err(Error::Invalid(format!(
                "symbol {s} of alphabet {} has no single-name form",
                alphabet.name()
            ))),
        })
        .collect()
}

impl AlphabetDecl {
    /// Declaration for an alphabet of atomic symbols whose null symbol is `eps`.
    pub fn from_alphabet(alphabet: &Alphabet) -> Result<Self> {
        if alphabet.epsilon().atoms() != [EPS] {
            return Err(Error::Invalid(format!(
                "alphabet {} must use `{EPS}` as its null symbol",
                alphabet.name()
            )));
        }
        Ok(Self {
            name: Ident::new(alphabet.name()),
            symbols: atomic_names(alphabet)?,
            span: Span::default(),
        })
    }
}

impl AutomatonDecl {
    /// Declaration listing every nonzero entry of `a`, in canonical order.
    /// The alphabets are referred to by their names, and states must carry
    /// single-part labels.
    pub fn from_automaton(name: &str, a: &WeightedAutomaton<Rational>) -> Result<Self> {
        let states = a
            .states()
            .iter()
            .map(|s| match s.parts() {
                [p] => Ok(Ident::new(p.clone())),
                _ => Err(Error::Invalid(format!("state {s} has no single-name form"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let sym = |alphabet: &Alphabet, i: usize| Ident::new(alphabet.symbol(i).atoms().join("_"));
        let mut entries = Vec::new();
        for ((l, r), m) in a.family() {
            for (q, q2, w) in m.iter() {
                entries.push(((q, l, r, q2), w.clone()));
            }
        }
        entries.sort_by_key(|e| e.0);
        let transitions = entries
            .into_iter()
            .map(|((q, l, r, q2), weight)| TransitionDecl {
                from: states[q].clone(),
                left: sym(a.left(), l),
                right: sym(a.right(), r),
                to: states[q2].clone(),
                weight,
                span: Span::default(),
            })
            .collect();
        Ok(Self {
            name: Ident::new(name),
            left: Ident::new(a.left().name()),
            right: Ident::new(a.right().name()),
            states,
            transitions,
            span: Span::default(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_model;

    fn roundtrip(src: &str) -> String {
        let doc = parse_model(src).unwrap();
        let printed = print_model(&doc);
        let again = parse_model(&printed).unwrap();
        assert_eq!(again, doc);
        assert_eq!(print_model(&again), printed);
        printed
    }

    #[test]
    fn minimal_parentheses() {
        let src = "alphabet A = {eps,t};\nautomaton P [A,A] { states: 1; 1 -(eps|eps)-> 1 : 1; }\n\
                   system S = P . (P . P);\nsystem T = (P x P) . P ^ 2;\nsystem U = (P . P) x (P x P);\n\
                   system V = (P . P)^3;";
        let printed = roundtrip(src);
        assert!(printed.contains("system S = P . (P . P);"));
        assert!(printed.contains("system T = P x P . P^2;"));
        assert!(printed.contains("system U = (P . P) x (P x P);"));
        assert!(printed.contains("system V = (P . P)^3;"));
    }

    #[test]
    fn weights_in_lowest_terms() {
        let src = "alphabet A = { eps };\nautomaton P [A, A] { states: a b;\n\
                   b -(eps|eps)-> b : 0.50; b -(eps|eps)-> a : 2/4; a -(eps|eps)-> a : 1; }";
        let printed = roundtrip(src);
        assert!(printed.contains("a -(eps|eps)-> a : 1;\n  b -(eps|eps)-> a : 1/2;\n  b -(eps|eps)-> b : 1/2;"));
    }

    #[test]
    fn constants_and_relations() {
        let src = "alphabet A = { eps, t };\nalphabet B = { eps, u };\n\
                   system S = swap(A, B) . rel(B, A) { (eps, eps), (u, t) } x copy(A);";
        roundtrip(src);
    }
}
