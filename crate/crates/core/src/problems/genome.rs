//! The genome families evolved by the engine.

use super::expr::Expr;
use super::vm::MicroVmGenome;
use serde::{Deserialize, Serialize};

/// A program in one of the two representations: expression trees for the
/// regression tasks, micro-VM instruction sequences for the synthesis tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Genome {
    Expr(Expr),
    MicroVm(MicroVmGenome),
}

impl Genome {
    pub fn as_expr(&self) -> Option<&Expr> {
        match self {
            Genome::Expr(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_micro_vm(&self) -> Option<&MicroVmGenome> {
        match self {
            Genome::MicroVm(g) => Some(g),
            _ => None,
        }
    }

    /// An inert genome (empty program); handy for building populations from
    /// bare error matrices, as the oracle command and tests do.
    pub fn placeholder() -> Genome {
        Genome::MicroVm(MicroVmGenome { code: vec![] })
    }
}
