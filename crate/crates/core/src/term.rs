//! Terms over one ternary symbol `d` and the variables `x1, x2, x3`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::op::TernaryOp;
use crate::star::d_op;
use crate::universe::Universe;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Variable index in `1..=3`.
    Var(u8),
    Node(Box<[Term; 3]>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        assert!((1..=3).contains(&i), "variable index {i} not in 1..=3");
        Term::Var(i as u8)
    }

    pub fn node(a: Term, b: Term, c: Term) -> Term {
        Term::Node(Box::new([a, b, c]))
    }

    /// `d(x_a, x_b, x_c)`.
    pub fn flat(a: usize, b: usize, c: usize) -> Term {
        Term::node(Term::var(a), Term::var(b), Term::var(c))
    }

    /// Number of `d` occurrences.
    pub fn node_count(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Node(ch) => 1 + ch.iter().map(Term::node_count).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Node(ch) => 1 + ch.iter().map(Term::depth).max().unwrap(),
        }
    }

    /// `d(t2, t3, t1)` for `t = d(t1, t2, t3)`, applied `k` times at the root.
    pub fn rotate_root(&self, k: usize) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::Node(ch) => {
                let k = k % 3;
                Term::node(ch[k].clone(), ch[(k + 1) % 3].clone(), ch[(k + 2) % 3].clone())
            }
        }
    }

    /// The term function over `(A; f)`.
    pub fn eval(&self, f: &TernaryOp) -> TernaryOp {
        match self {
            Term::Var(i) => TernaryOp::projection(f.universe().clone(), *i as usize).unwrap(),
            Term::Node(ch) => {
                let [a, b, c] = [ch[0].eval(f), ch[1].eval(f), ch[2].eval(f)];
                TernaryOp::compose(f, &a, &b, &c).unwrap()
            }
        }
    }

    /// Substitutes the three argument terms for `x1, x2, x3`.
    pub fn substitute(&self, args: &[Term; 3]) -> Term {
        match self {
            Term::Var(i) => args[*i as usize - 1].clone(),
            Term::Node(ch) => Term::node(ch[0].substitute(args), ch[1].substitute(args), ch[2].substitute(args)),
        }
    }

    /// Whether `self ∈ CS(t)`, decided structurally.
    pub fn is_cyclic_shift_of(&self, t: &Term) -> bool {
        match (self, t) {
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Node(s), Term::Node(c)) => (0..3).any(|r| {
                s[0].is_cyclic_shift_of(&c[r])
                    && s[1].is_cyclic_shift_of(&c[(r + 1) % 3])
                    && s[2].is_cyclic_shift_of(&c[(r + 2) % 3])
            }),
            _ => false,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Node(ch) => write!(f, "d({},{},{})", ch[0], ch[1], ch[2]),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Term> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::TermSyntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let word = &self.src[start..self.pos];
        match word {
            b"x1" => Ok(Term::Var(1)),
            b"x2" => Ok(Term::Var(2)),
            b"x3" => Ok(Term::Var(3)),
            b"d" => {
                self.expect(b'(')?;
                let mut args = Vec::with_capacity(3);
                loop {
                    args.push(self.term()?);
                    self.skip_ws();
                    match self.src.get(self.pos) {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.error("expected ',' or ')'")),
                    }
                }
                let args: [Term; 3] = args.try_into().map_err(|a: Vec<Term>| Error::TermSyntax {
                    pos: start,
                    msg: format!("d takes 3 arguments, got {}", a.len()),
                })?;
                Ok(Term::Node(Box::new(args)))
            }
            [] => Err(self.error("expected a term")),
            other => Err(Error::TermSyntax {
                pos: start,
                msg: format!("unknown symbol {:?}", String::from_utf8_lossy(other)),
            }),
        }
    }
}

/// Default cap on `|CS(t)|`.
pub const DEFAULT_SHIFT_BUDGET: usize = 6561;

/// All terms reachable from `t` by rotating argument lists of `d`-nodes.
pub fn cyclic_shift_set(t: &Term, budget: usize) -> Result<Vec<Term>> {
    match t {
        Term::Var(_) => Ok(vec![t.clone()]),
        Term::Node(ch) => {
            let parts = [
                cyclic_shift_set(&ch[0], budget)?,
                cyclic_shift_set(&ch[1], budget)?,
                cyclic_shift_set(&ch[2], budget)?,
            ];
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for r in 0..3 {
                for a in &parts[0] {
                    for b in &parts[1] {
                        for c in &parts[2] {
                            let s = Term::node(a.clone(), b.clone(), c.clone()).rotate_root(r);
                            if seen.insert(s.clone()) {
                                if out.len() == budget {
                                    return Err(Error::ShiftBudgetExceeded { budget, partial: out.len() + 1 });
                                }
                                out.push(s);
                            }
                        }
                    }
                }
            }
            Ok(out)
        }
    }
}

/// What a term evaluates to over `(B; d1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum D1Class {
    /// The `i`-th projection.
    Projection(u8),
    /// The majority operation `d_i`.
    D(u8),
}

impl fmt::Display for D1Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            D1Class::Projection(i) => write!(f, "x{i}"),
            D1Class::D(i) => write!(f, "d{i}"),
        }
    }
}

/// Reference tables for classifying term functions over one universe.
pub struct D1Algebra {
    d1: TernaryOp,
    projections: [TernaryOp; 3],
    ds: [TernaryOp; 3],
}

impl D1Algebra {
    pub fn new(universe: Arc<Universe>) -> Result<Self> {
        if universe.size() < 3 {
            return Err(Error::InvalidUniverse("classification needs at least three elements".into()));
        }
        let p = |i| TernaryOp::projection(universe.clone(), i);
        let d = |i| d_op(universe.clone(), i);
        Ok(D1Algebra { d1: d(1)?, projections: [p(1)?, p(2)?, p(3)?], ds: [d(1)?, d(2)?, d(3)?] })
    }

    pub fn three() -> Self {
        Self::new(Universe::one_based(3).unwrap().shared()).unwrap()
    }

    pub fn classify(&self, t: &Term) -> Result<D1Class> {
        self.classify_op(&t.eval(&self.d1))
    }

    pub fn classify_op(&self, op: &TernaryOp) -> Result<D1Class> {
        if let Some(i) = self.projections.iter().position(|p| p == op) {
            return Ok(D1Class::Projection(i as u8 + 1));
        }
        if let Some(i) = self.ds.iter().position(|d| d == op) {
            return Ok(D1Class::D(i as u8 + 1));
        }
        Err(Error::Consistency("term function is neither a projection nor some d_i".into()))
    }

    /// Classification of a node whose children are already classified.
    fn classify_node(&self, ch: [D1Class; 3]) -> Result<D1Class> {
        let pick = |c: D1Class| match c {
            D1Class::Projection(i) => &self.projections[i as usize - 1],
            D1Class::D(i) => &self.ds[i as usize - 1],
        };
        self.classify_op(&TernaryOp::compose(&self.d1, pick(ch[0]), pick(ch[1]), pick(ch[2]))?)
    }
}

/// Classifies `t` over `(universe; d1)`.
pub fn classify_over_d1(t: &Term, universe: Arc<Universe>) -> Result<D1Class> {
    D1Algebra::new(universe)?.classify(t)
}

fn index_of(c: D1Class) -> u8 {
    match c {
        D1Class::Projection(i) | D1Class::D(i) => i,
    }
}

/// Three cyclic shifts of `t` evaluating to `d1`, `d2`, `d3` over `(B; d1)`,
/// returned in that order.
pub fn constructive_shift_triple(t: &Term) -> Result<[Term; 3]> {
    let alg = D1Algebra::three();
    let (class, triple) = shift_triple(&alg, t)?;
    match (class, triple) {
        (D1Class::D(_), Some(triple)) => Ok(triple),
        _ => Err(Error::ProjectionTerm),
    }
}

/// Returns the class of `t`, and for a non-projection `t` the three shifts.
fn shift_triple(alg: &D1Algebra, t: &Term) -> Result<(D1Class, Option<[Term; 3]>)> {
    let Term::Node(ch) = t else {
        let Term::Var(i) = t else { unreachable!() };
        return Ok((D1Class::Projection(*i), None));
    };
    let subs = [shift_triple(alg, &ch[0])?, shift_triple(alg, &ch[1])?, shift_triple(alg, &ch[2])?];
    let class = alg.classify_node([subs[0].0, subs[1].0, subs[2].0])?;
    if let D1Class::Projection(_) = class {
        return Ok((class, None));
    }

    let idx: [u8; 3] = [index_of(subs[0].0), index_of(subs[1].0), index_of(subs[2].0)];
    let is_d = |k: usize| matches!(subs[k].0, D1Class::D(_));
    // new children and their indices; rewriting child k to d_j uses its triple
    let mut children: [Term; 3] = [ch[0].clone(), ch[1].clone(), ch[2].clone()];
    let mut j = idx;
    let rewrite = |k: usize, target: u8, children: &mut [Term; 3], j: &mut [u8; 3]| {
        let triple = subs[k].1.as_ref().expect("rewritten child is a majority term");
        children[k] = triple[target as usize - 1].clone();
        j[k] = target;
    };

    if idx[0] != idx[1] && idx[1] != idx[2] && idx[0] != idx[2] {
        // already a permutation
    } else if idx[0] == idx[1] && idx[1] == idx[2] {
        // at most one child is a projection; keep it (or the first child) and move the others
        let keep = (0..3).find(|&k| !is_d(k)).unwrap_or(0);
        let mut free = (1..=3u8).filter(|&x| x != idx[keep]);
        for k in (0..3).filter(|&k| k != keep) {
            rewrite(k, free.next().unwrap(), &mut children, &mut j);
        }
    } else {
        // exactly two coincide: pair (k, l), odd one m
        let (k, l, m) = if idx[0] == idx[1] {
            (0, 1, 2)
        } else if idx[0] == idx[2] {
            (0, 2, 1)
        } else {
            (1, 2, 0)
        };
        let chosen = if is_d(k) {
            k
        } else if is_d(l) {
            l
        } else {
            return Err(Error::Consistency("projection pair inside a majority term".into()));
        };
        let other = if chosen == k { l } else { k };
        let target = (1..=3u8).find(|&x| x != idx[other] && x != idx[m]).unwrap();
        rewrite(chosen, target, &mut children, &mut j);
    }

    let mut out: [Option<Term>; 3] = [None, None, None];
    for r in 0..3 {
        let s = Term::node(children[r].clone(), children[(r + 1) % 3].clone(), children[(r + 2) % 3].clone());
        out[j[r] as usize - 1] = Some(s);
    }
    let triple = out.map(|s| s.expect("indices form a permutation"));
    Ok((class, Some(triple)))
}

/// Every term with exactly `nodes` occurrences of `d`.
pub fn terms_with_nodes(nodes: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![(1..=3).map(Term::var).collect()];
    for size in 1..=nodes {
        let mut level = Vec::new();
        for a in 0..size {
            for b in 0..size - a {
                let c = size - 1 - a - b;
                for ta in &by_size[a] {
                    for tb in &by_size[b] {
                        for tc in &by_size[c] {
                            level.push(Term::node(ta.clone(), tb.clone(), tc.clone()));
                        }
                    }
                }
            }
        }
        by_size.push(level);
    }
    by_size.swap_remove(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        let s = "d(x1,d(x2,x1,x3),x3)";
        assert_eq!(t(s).to_string(), s);
        assert_eq!(t(" d ( x1 , x2,x3 ) ").to_string(), "d(x1,x2,x3)");
        assert!("d(x1,x2)".parse::<Term>().is_err());
        assert!("d(x1,x2,x3,x1)".parse::<Term>().is_err());
        assert!("f(x1,x2,x3)".parse::<Term>().is_err());
        assert!("x4".parse::<Term>().is_err());
        assert!("d(x1,x2,x3))".parse::<Term>().is_err());
        assert!("".parse::<Term>().is_err());
    }

    #[test]
    fn shift_set_sizes() {
        assert_eq!(cyclic_shift_set(&t("x1"), 10).unwrap(), vec![t("x1")]);
        assert_eq!(cyclic_shift_set(&t("d(x1,x2,x3)"), 10).unwrap().len(), 3);
        assert_eq!(cyclic_shift_set(&t("d(d(x1,x2,x3),x2,x3)"), 100).unwrap().len(), 9);
        // structurally equal rotations collapse
        assert_eq!(cyclic_shift_set(&t("d(x1,x1,x1)"), 10).unwrap().len(), 1);
        let err = cyclic_shift_set(&t("d(d(x1,x2,x3),x2,x3)"), 5).unwrap_err();
        assert!(matches!(err, Error::ShiftBudgetExceeded { budget: 5, .. }));
    }

    #[test]
    fn shift_membership() {
        let base = t("d(d(x1,x2,x3),x2,x3)");
        for s in cyclic_shift_set(&base, 100).unwrap() {
            assert!(s.is_cyclic_shift_of(&base));
        }
        assert!(!t("d(d(x1,x3,x2),x2,x3)").is_cyclic_shift_of(&base));
    }

    #[test]
    fn classification_examples() {
        let u = Universe::one_based(3).unwrap().shared();
        assert_eq!(classify_over_d1(&t("d(x1,x2,x3)"), u.clone()).unwrap(), D1Class::D(1));
        assert_eq!(classify_over_d1(&t("d(x1,x1,x2)"), u.clone()).unwrap(), D1Class::Projection(1));
        assert_eq!(classify_over_d1(&t("d(x2,x3,x1)"), u.clone()).unwrap(), D1Class::D(2));
        assert_eq!(classify_over_d1(&t("x3"), u).unwrap(), D1Class::Projection(3));
        assert!(classify_over_d1(&t("x3"), Universe::numeric(2).unwrap().shared()).is_err());
    }

    #[test]
    fn constructive_triples() {
        let alg = D1Algebra::three();
        for src in ["d(x2,x3,x1)", "d(d(x2,x1,x3),x2,x3)", "d(d(x1,x2,x3),d(x1,x2,x3),d(x1,x2,x3))"] {
            let base = t(src);
            let triple = constructive_shift_triple(&base).unwrap();
            for (i, s) in triple.iter().enumerate() {
                assert!(s.is_cyclic_shift_of(&base), "{s} not a shift of {base}");
                assert_eq!(alg.classify(s).unwrap(), D1Class::D(i as u8 + 1));
            }
        }
        assert!(matches!(constructive_shift_triple(&t("d(x1,x1,x2)")), Err(Error::ProjectionTerm)));
        assert!(matches!(constructive_shift_triple(&t("x2")), Err(Error::ProjectionTerm)));
    }

    #[test]
    fn term_counts() {
        assert_eq!(terms_with_nodes(0).len(), 3);
        assert_eq!(terms_with_nodes(1).len(), 27);
        assert_eq!(terms_with_nodes(2).len(), 3 * 9 * 27);
    }
}
