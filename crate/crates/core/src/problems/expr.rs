//! Expression-tree genomes: arithmetic over input variables and integer
//! constants with protected division.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    /// Protected: a denominator of exactly zero yields one.
    Div,
}

const OPS: [BinOp; 4] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expr {
    Const(i32),
    Var(usize),
    Op(BinOp, Box<Expr>, Box<Expr>),
}

/// Size and sampling limits for expression genomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExprParams {
    pub num_vars: usize,
    /// Depth of a leaf is 1; trees never exceed this depth.
    pub max_depth: usize,
    pub const_min: i32,
    pub const_max: i32,
}

impl Expr {
    pub fn eval(&self, inputs: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c as f64,
            Expr::Var(i) => inputs[*i],
            Expr::Op(op, a, b) => {
                let x = a.eval(inputs);
                let y = b.eval(inputs);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            1.0
                        } else {
                            x / y
                        }
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Op(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Op(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Grow-style sampling: interior nodes become leaves early with
    /// probability 0.3, and always at the depth limit.
    pub fn random(params: &ExprParams, rng: &mut impl Rng) -> Expr {
        Self::grow(params.max_depth, params, rng)
    }

    fn grow(depth_left: usize, params: &ExprParams, rng: &mut impl Rng) -> Expr {
        if depth_left <= 1 || rng.gen::<f64>() < 0.3 {
            return Self::random_leaf(params, rng);
        }
        let op = OPS[rng.gen_range(0..OPS.len())];
        Expr::Op(
            op,
            Box::new(Self::grow(depth_left - 1, params, rng)),
            Box::new(Self::grow(depth_left - 1, params, rng)),
        )
    }

    fn random_leaf(params: &ExprParams, rng: &mut impl Rng) -> Expr {
        if params.num_vars > 0 && rng.gen::<f64>() < 0.5 {
            Expr::Var(rng.gen_range(0..params.num_vars))
        } else {
            Expr::Const(rng.gen_range(params.const_min..=params.const_max))
        }
    }

    fn node(&self, index: usize) -> &Expr {
        self.walk(index).expect("node index in range")
    }

    fn walk(&self, index: usize) -> Result<&Expr, usize> {
        // Preorder; Err carries how many nodes this subtree consumed.
        if index == 0 {
            return Ok(self);
        }
        match self {
            Expr::Const(_) | Expr::Var(_) => Err(1),
            Expr::Op(_, a, b) => {
                let mut used = 1;
                for child in [a.as_ref(), b.as_ref()] {
                    match child.walk(index - used) {
                        Ok(found) => return Ok(found),
                        Err(n) => used += n,
                    }
                }
                Err(used)
            }
        }
    }

    fn replace(&self, index: usize, replacement: &Expr) -> Expr {
        match self.rebuild(index, replacement) {
            Ok(e) => e,
            Err(_) => unreachable!("node index in range"),
        }
    }

    fn rebuild(&self, index: usize, replacement: &Expr) -> Result<Expr, usize> {
        if index == 0 {
            return Ok(replacement.clone());
        }
        match self {
            Expr::Const(_) | Expr::Var(_) => Err(1),
            Expr::Op(op, a, b) => {
                let mut used = 1;
                match a.rebuild(index - used, replacement) {
                    Ok(na) => return Ok(Expr::Op(*op, Box::new(na), b.clone())),
                    Err(n) => used += n,
                }
                match b.rebuild(index - used, replacement) {
                    Ok(nb) => return Ok(Expr::Op(*op, a.clone(), Box::new(nb))),
                    Err(n) => used += n,
                }
                Err(used)
            }
        }
    }

    /// Depth of the node at preorder `index` (root is depth 1).
    fn depth_at(&self, index: usize) -> usize {
        fn go(e: &Expr, index: usize, depth: usize) -> Result<usize, usize> {
            if index == 0 {
                return Ok(depth);
            }
            match e {
                Expr::Const(_) | Expr::Var(_) => Err(1),
                Expr::Op(_, a, b) => {
                    let mut used = 1;
                    for child in [a.as_ref(), b.as_ref()] {
                        match go(child, index - used, depth + 1) {
                            Ok(d) => return Ok(d),
                            Err(n) => used += n,
                        }
                    }
                    Err(used)
                }
            }
        }
        go(self, index, 1).expect("node index in range")
    }

    /// Subtree crossover: replace a random node of `self` with a random
    /// subtree of `donor`. Retries a few times if the child would exceed the
    /// depth limit, then falls back to an unchanged clone.
    pub fn crossover(&self, donor: &Expr, params: &ExprParams, rng: &mut impl Rng) -> Expr {
        for _ in 0..4 {
            let target = rng.gen_range(0..self.size());
            let graft = donor.node(rng.gen_range(0..donor.size()));
            let child = self.replace(target, graft);
            if child.depth() <= params.max_depth {
                return child;
            }
        }
        self.clone()
    }

    /// Point mutation: re-draw one node in place, keeping its children
    /// (operators swap to another operator, leaves to another leaf).
    pub fn point_mutate(&self, params: &ExprParams, rng: &mut impl Rng) -> Expr {
        let target = rng.gen_range(0..self.size());
        match self.node(target) {
            Expr::Op(op, a, b) => {
                let mut new_op = OPS[rng.gen_range(0..OPS.len())];
                if OPS.len() > 1 {
                    while new_op == *op {
                        new_op = OPS[rng.gen_range(0..OPS.len())];
                    }
                }
                let replacement = Expr::Op(new_op, a.clone(), b.clone());
                self.replace(target, &replacement)
            }
            Expr::Const(_) | Expr::Var(_) => {
                let leaf = Self::random_leaf(params, rng);
                self.replace(target, &leaf)
            }
        }
    }

    /// Structural mutation: regrow the subtree at a random node, limited to
    /// the depth available at that point.
    pub fn structural_mutate(&self, params: &ExprParams, rng: &mut impl Rng) -> Expr {
        let target = rng.gen_range(0..self.size());
        let available = params.max_depth + 1 - self.depth_at(target);
        let sub = Self::grow(available.max(1), params, rng);
        self.replace(target, &sub)
    }
}
