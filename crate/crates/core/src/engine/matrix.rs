use crate::formula::{Formula, PrenexSentence, QuantKind, TypedVar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum AtomKind {
    Mem,
    Eq,
}

/// An atom over prefix positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Atom {
    pub kind: AtomKind,
    pub left: usize,
    pub right: usize,
}

#[derive(Clone, Debug)]
enum Node {
    Atom(usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
}

impl Node {
    fn eval(&self, truth: &[bool]) -> bool {
        match self {
            Node::Atom(i) => truth[*i],
            Node::Not(a) => !a.eval(truth),
            Node::And(a, b) => a.eval(truth) && b.eval(truth),
            Node::Or(a, b) => a.eval(truth) || b.eval(truth),
            Node::Implies(a, b) => !a.eval(truth) || b.eval(truth),
            Node::Iff(a, b) => a.eval(truth) == b.eval(truth),
        }
    }
}

/// A ∀*∃* sentence with its matrix compiled over deduplicated atoms.
#[derive(Clone, Debug)]
pub(crate) struct Matrix {
    pub vars: Vec<TypedVar>,
    pub universal: Vec<bool>,
    pub atoms: Vec<Atom>,
    root: Node,
}

impl Matrix {
    pub fn compile(p: &PrenexSentence) -> Matrix {
        let vars: Vec<TypedVar> = p.prefix.iter().map(|q| q.var.clone()).collect();
        let universal = p.prefix.iter().map(|q| q.kind == QuantKind::Forall).collect();
        let mut atoms = Vec::new();
        let root = Self::build(&p.matrix, &vars, &mut atoms);
        Matrix { vars, universal, atoms, root }
    }

    fn build(f: &Formula<TypedVar>, vars: &[TypedVar], atoms: &mut Vec<Atom>) -> Node {
        let pos = |v: &TypedVar| vars.iter().position(|w| w == v).expect("matrix variable bound in prefix");
        let mut atom = |kind, x: &TypedVar, y: &TypedVar| {
            let a = Atom { kind, left: pos(x), right: pos(y) };
            let i = atoms.iter().position(|b| *b == a).unwrap_or_else(|| {
                atoms.push(a);
                atoms.len() - 1
            });
            Node::Atom(i)
        };
        match f {
            Formula::Mem(x, y) => atom(AtomKind::Mem, x, y),
            Formula::Eq(x, y) => atom(AtomKind::Eq, x, y),
            Formula::Not(a) => Node::Not(Box::new(Self::build(a, vars, atoms))),
            Formula::And(a, b) => {
                Node::And(Box::new(Self::build(a, vars, atoms)), Box::new(Self::build(b, vars, atoms)))
            }
            Formula::Or(a, b) => Node::Or(Box::new(Self::build(a, vars, atoms)), Box::new(Self::build(b, vars, atoms))),
            Formula::Implies(a, b) => {
                Node::Implies(Box::new(Self::build(a, vars, atoms)), Box::new(Self::build(b, vars, atoms)))
            }
            Formula::Iff(a, b) => {
                Node::Iff(Box::new(Self::build(a, vars, atoms)), Box::new(Self::build(b, vars, atoms)))
            }
            Formula::Forall(..) | Formula::Exists(..) => unreachable!("prenex matrix is quantifier-free"),
        }
    }

    pub fn eval(&self, truth: &[bool]) -> bool {
        self.root.eval(truth)
    }

    pub fn level(&self, var: usize) -> u32 {
        self.vars[var].ty
    }

    /// Existential positions in prefix order.
    pub fn witnesses(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&v| !self.universal[v]).collect()
    }
}
