//! A three-stack micro virtual machine for program-synthesis tasks.
//!
//! State: an int stack, a bool stack, an int-vector stack, and the case's
//! input vector as a read-only register. Execution is deterministic and
//! total: every instruction with missing arguments is a no-op, loop counts
//! are clamped, and a step budget bounds runtime. A run that exceeds the
//! budget, or ends without a value of the required output type on top of
//! the corresponding stack, produces the failure marker.
//!
//! Opcode contract (pops happen only when every listed argument is present):
//!
//! | op              | pops            | pushes / effect                                  |
//! |-----------------|-----------------|--------------------------------------------------|
//! | `Const(k)`      | -               | int k                                            |
//! | `Input(j)`      | -               | int input[j]; no-op if j is out of range         |
//! | `InLen`         | -               | int input length                                 |
//! | `InGet`         | int i           | int input[clamp(i, 0, len-1)]; no-op on empty input |
//! | `InIndexOf`     | int x           | int index of the first x in the input, -1 if absent |
//! | `InRevIndexOf`  | int x           | int index of the first x scanning the input in   |
//! |                 |                 | reverse, counted from the back (0 = last element); -1 if absent |
//! | `Dup`           | int a (peeked)  | pushes a copy of the top int; no-op when empty   |
//! | `Add`           | int b, int a    | int a + b (wrapping)                             |
//! | `Sub`           | int b, int a    | int a - b (wrapping)                             |
//! | `Max`           | int b, int a    | int max(a, b)                                    |
//! | `Eq`            | int b, int a    | bool a == b                                      |
//! | `Lt`            | int b, int a    | bool a < b                                       |
//! | `Not`           | bool a          | bool !a                                          |
//! | `Xor`           | bool b, bool a  | bool a != b                                      |
//! | `Odd`           | int a           | bool (a & 1) != 0                                |
//! | `VecNew`        | -               | pushes an empty vector on the vector stack       |
//! | `VecPush`       | int a           | appends a to the top vector; no-op without one   |
//! | `VecLen`        | -               | int length of the top vector; no-op without one  |
//! | `SkipIfFalse(n)`| bool a          | if !a, skips n instructions (clamped to the      |
//! |                 |                 | enclosing loop body / program end)               |
//! | `LoopBegin(n)`  | int c           | runs the next n instructions c times (c clamped  |
//! |                 |                 | to [0, budget]); a missing count defaults to one |
//! |                 |                 | pass per input element                           |
//! | `LoopIndex`     | -               | int current iteration of the innermost loop;     |
//! |                 |                 | no-op outside a loop                             |

use crate::value::{Output, Value};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Op {
    Const(i64),
    Input(usize),
    InLen,
    InGet,
    InIndexOf,
    InRevIndexOf,
    Dup,
    Add,
    Sub,
    Max,
    Eq,
    Lt,
    Not,
    Xor,
    Odd,
    VecNew,
    VecPush,
    VecLen,
    SkipIfFalse(usize),
    LoopBegin(usize),
    LoopIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroVmGenome {
    pub code: Vec<Op>,
}

/// Which stack the problem reads its answer from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VmOutputKind {
    Int,
    Bool,
    IntVec,
}

/// Sampling and size limits for micro-VM genomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VmParams {
    /// Operand range for `Input`.
    pub input_slots: usize,
    pub init_len_min: usize,
    pub init_len_max: usize,
    pub max_len: usize,
    pub step_budget: usize,
    pub const_min: i64,
    pub const_max: i64,
}

struct Frame {
    start: usize,
    end: usize,
    count: usize,
    index: usize,
}

/// Executes `code` against one input vector.
pub fn run_micro_vm(code: &[Op], input: &[i64], budget: usize, output: VmOutputKind) -> Output {
    let mut ints: Vec<i64> = Vec::new();
    let mut bools: Vec<bool> = Vec::new();
    let mut vecs: Vec<Vec<i64>> = Vec::new();
    let mut frames: Vec<Frame> = Vec::new();
    let mut pc = 0usize;
    let mut steps = 0usize;

    loop {
        // Loop bookkeeping: when the head passes the innermost body end,
        // either rewind for the next iteration or pop the frame.
        while let Some(frame) = frames.last_mut() {
            if pc < frame.end {
                break;
            }
            if frame.index + 1 < frame.count {
                frame.index += 1;
                pc = frame.start;
            } else {
                let end = frame.end;
                frames.pop();
                pc = pc.max(end);
            }
        }
        if pc >= code.len() {
            break;
        }
        if steps >= budget {
            return Output::Failure;
        }
        steps += 1;

        let op = code[pc];
        pc += 1;
        let body_limit = |frames: &[Frame]| frames.last().map_or(code.len(), |f| f.end);
        match op {
            Op::Const(k) => ints.push(k),
            Op::Input(j) => {
                if let Some(&v) = input.get(j) {
                    ints.push(v);
                }
            }
            Op::InLen => ints.push(input.len() as i64),
            Op::InGet => {
                if let Some(i) = ints.pop() {
                    if !input.is_empty() {
                        let idx = (i.max(0) as usize).min(input.len() - 1);
                        ints.push(input[idx]);
                    }
                }
            }
            Op::InIndexOf => {
                if let Some(x) = ints.pop() {
                    let idx = input.iter().position(|&v| v == x);
                    ints.push(idx.map(|i| i as i64).unwrap_or(-1));
                }
            }
            Op::InRevIndexOf => {
                if let Some(x) = ints.pop() {
                    let idx = input.iter().rev().position(|&v| v == x);
                    ints.push(idx.map(|i| i as i64).unwrap_or(-1));
                }
            }
            Op::Dup => {
                if let Some(&top) = ints.last() {
                    ints.push(top);
                }
            }
            Op::Add => binary_int(&mut ints, |a, b| a.wrapping_add(b)),
            Op::Sub => binary_int(&mut ints, |a, b| a.wrapping_sub(b)),
            Op::Max => binary_int(&mut ints, i64::max),
            Op::Eq => binary_cmp(&mut ints, &mut bools, |a, b| a == b),
            Op::Lt => binary_cmp(&mut ints, &mut bools, |a, b| a < b),
            Op::Not => {
                if let Some(b) = bools.pop() {
                    bools.push(!b);
                }
            }
            Op::Xor => {
                if bools.len() >= 2 {
                    let b = bools.pop().unwrap();
                    let a = bools.pop().unwrap();
                    bools.push(a != b);
                }
            }
            Op::Odd => {
                if let Some(a) = ints.pop() {
                    bools.push(a & 1 != 0);
                }
            }
            Op::VecNew => vecs.push(Vec::new()),
            Op::VecPush => {
                if !ints.is_empty() && !vecs.is_empty() {
                    let x = ints.pop().unwrap();
                    vecs.last_mut().unwrap().push(x);
                }
            }
            Op::VecLen => {
                if let Some(v) = vecs.last() {
                    ints.push(v.len() as i64);
                }
            }
            Op::SkipIfFalse(n) => {
                if let Some(b) = bools.pop() {
                    if !b {
                        pc = (pc + n).min(body_limit(&frames));
                    }
                }
            }
            Op::LoopBegin(body) => {
                // An explicit count comes off the int stack; without one the
                // loop defaults to one pass per input element, the natural
                // bound for a machine that exists to walk its input.
                let c = ints.pop().unwrap_or(input.len() as i64);
                let end = (pc + body).min(body_limit(&frames));
                let count = c.clamp(0, budget as i64) as usize;
                if count == 0 || pc == end {
                    pc = end;
                } else {
                    frames.push(Frame {
                        start: pc,
                        end,
                        count,
                        index: 0,
                    });
                }
            }
            Op::LoopIndex => {
                if let Some(frame) = frames.last() {
                    ints.push(frame.index as i64);
                }
            }
        }
    }

    match output {
        VmOutputKind::Int => ints.last().map(|&v| Output::Value(Value::Int(v))),
        VmOutputKind::Bool => bools.last().map(|&v| Output::Value(Value::Bool(v))),
        VmOutputKind::IntVec => vecs.last().map(|v| Output::Value(Value::IntVec(v.clone()))),
    }
    .unwrap_or(Output::Failure)
}

fn binary_int(ints: &mut Vec<i64>, f: impl Fn(i64, i64) -> i64) {
    if ints.len() >= 2 {
        let b = ints.pop().unwrap();
        let a = ints.pop().unwrap();
        ints.push(f(a, b));
    }
}

fn binary_cmp(ints: &mut Vec<i64>, bools: &mut Vec<bool>, f: impl Fn(i64, i64) -> bool) {
    if ints.len() >= 2 {
        let b = ints.pop().unwrap();
        let a = ints.pop().unwrap();
        bools.push(f(a, b));
    }
}

impl MicroVmGenome {
    pub fn random(params: &VmParams, rng: &mut impl Rng) -> MicroVmGenome {
        let len = rng.gen_range(params.init_len_min..=params.init_len_max);
        MicroVmGenome {
            code: (0..len).map(|_| random_op(params, rng)).collect(),
        }
    }

    /// One-point crossover on instruction sequences, truncated to the length
    /// limit. Degenerate cuts fall back to a clone of the first parent.
    pub fn crossover(&self, other: &MicroVmGenome, params: &VmParams, rng: &mut impl Rng) -> MicroVmGenome {
        // Cutting both parents at the same index keeps positions aligned and
        // the child exactly as long as the second parent, so crossover alone
        // exerts no growth pressure on the population.
        let cut = rng.gen_range(0..=self.code.len().min(other.code.len()));
        let mut code: Vec<Op> = self.code[..cut]
            .iter()
            .chain(&other.code[cut..])
            .copied()
            .take(params.max_len)
            .collect();
        if code.is_empty() {
            code = self.code.clone();
        }
        MicroVmGenome { code }
    }

    /// Replaces each instruction independently with probability 1/len.
    pub fn point_mutate(&self, params: &VmParams, rng: &mut impl Rng) -> MicroVmGenome {
        let p = 1.0 / self.code.len().max(1) as f64;
        MicroVmGenome {
            code: self
                .code
                .iter()
                .map(|&op| {
                    if rng.gen::<f64>() >= p {
                        return op;
                    }
                    // Half the hits only re-draw the operand, leaving the
                    // opcode in place; the rest replace the gene outright.
                    if rng.gen_bool(0.5) {
                        match op {
                            Op::Const(_) => Op::Const(random_const(params, rng)),
                            Op::Input(_) => {
                                Op::Input(rng.gen_range(0..params.input_slots.max(1)))
                            }
                            Op::SkipIfFalse(_) => Op::SkipIfFalse(random_skip(rng)),
                            Op::LoopBegin(_) => Op::LoopBegin(rng.gen_range(2..=8)),
                            other => other,
                        }
                    } else {
                        random_op(params, rng)
                    }
                })
                .collect(),
        }
    }

    /// Inserts or deletes one instruction at a random position.
    /// Size-changing mutation: every position may gain a fresh neighbor,
    /// then every op faces a matched deletion rate, so expected length is
    /// preserved while material drifts in and out.
    pub fn structural_mutate(&self, params: &VmParams, rng: &mut impl Rng) -> MicroVmGenome {
        const ADD_RATE: f64 = 0.09;
        let del_rate = ADD_RATE / (1.0 + ADD_RATE);
        let mut grown = Vec::with_capacity(self.code.len() + 4);
        for &op in &self.code {
            if rng.gen::<f64>() < ADD_RATE {
                if rng.gen_bool(0.5) {
                    grown.push(random_op(params, rng));
                    grown.push(op);
                } else {
                    grown.push(op);
                    grown.push(random_op(params, rng));
                }
            } else {
                grown.push(op);
            }
        }
        let mut code: Vec<Op> = grown
            .into_iter()
            .filter(|_| rng.gen::<f64>() >= del_rate)
            .collect();
        code.truncate(params.max_len);
        if code.is_empty() {
            code.push(random_op(params, rng));
        }
        MicroVmGenome { code }
    }
}

// Ephemeral constants favor small magnitudes and skips favor single-op
// guards; both distributions still cover their full ranges.
fn random_const(params: &VmParams, rng: &mut impl Rng) -> i64 {
    if rng.gen_bool(0.5) {
        rng.gen_range(-1..=1)
    } else {
        rng.gen_range(params.const_min..=params.const_max)
    }
}

fn random_skip(rng: &mut impl Rng) -> usize {
    if rng.gen_bool(0.6) {
        1
    } else {
        rng.gen_range(2..=4)
    }
}

fn random_op(params: &VmParams, rng: &mut impl Rng) -> Op {
    match rng.gen_range(0..21) {
        0 => Op::Const(random_const(params, rng)),
        1 => Op::Input(rng.gen_range(0..params.input_slots.max(1))),
        2 => Op::InLen,
        3 => Op::InGet,
        4 => Op::InIndexOf,
        5 => Op::InRevIndexOf,
        6 => Op::Dup,
        7 => Op::Add,
        8 => Op::Sub,
        9 => Op::Max,
        10 => Op::Eq,
        11 => Op::Lt,
        12 => Op::Not,
        13 => Op::Xor,
        14 => Op::Odd,
        15 => Op::VecNew,
        16 => Op::VecPush,
        17 => Op::VecLen,
        18 => Op::SkipIfFalse(random_skip(rng)),
        19 => Op::LoopBegin(rng.gen_range(2..=8)),
        _ => Op::LoopIndex,
    }
}
