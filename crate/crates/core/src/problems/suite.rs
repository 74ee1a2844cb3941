//! The six built-in problems.
//!
//! Case distributions are desk-scale: small integer domains sized so runs
//! finish quickly while still separating selection methods. Every stochastic
//! choice derives from the spec's seed, so a spec reproduces its cases
//! exactly.

use super::{
    abs_diff_float, abs_diff_int, bool_mismatch, vec_l1, Problem, ProblemError, ProblemSpec,
};
use crate::individual::TrainingCase;
use crate::problems::expr::{Expr, ExprParams};
use crate::problems::genome::Genome;
use crate::problems::vm::{run_micro_vm, MicroVmGenome, VmOutputKind, VmParams};
use crate::rng::{self, tag};
use crate::value::{Output, Value};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

pub(super) fn build(spec: &ProblemSpec) -> Result<Box<dyn Problem>, ProblemError> {
    match spec.name.as_str() {
        "sr-paper-example" => Ok(Box::new(sr_paper_example(spec))),
        "sr-random-poly" => Ok(Box::new(sr_random_poly(spec)?)),
        "parity-4" => Ok(Box::new(parity_4(spec))),
        "multiplexer-6" => Ok(Box::new(multiplexer_6(spec)?)),
        "last-index-of-zero" => Ok(Box::new(last_index_of_zero(spec))),
        "negative-to-zero" => Ok(Box::new(negative_to_zero(spec))),
        other => Err(ProblemError::UnknownProblem(other.to_string())),
    }
}

fn case_stream(spec: &ProblemSpec) -> ChaCha8Rng {
    rng::stream(spec.seed, &[tag::PROBLEM, rng::hash_str(&spec.name)])
}

// ---------------------------------------------------------------- regression

struct ExprProblem {
    spec: ProblemSpec,
    train: Vec<TrainingCase>,
    test: Vec<TrainingCase>,
    params: ExprParams,
}

const EXPR_PARAMS: ExprParams = ExprParams {
    num_vars: 2,
    max_depth: 6,
    const_min: -5,
    const_max: 5,
};

impl Problem for ExprProblem {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }
    fn training_cases(&self) -> &[TrainingCase] {
        &self.train
    }
    fn test_cases(&self) -> &[TrainingCase] {
        &self.test
    }
    fn run(&self, genome: &Genome, inputs: &[Value]) -> Output {
        let expr = match genome.as_expr() {
            Some(e) => e,
            None => return Output::Failure,
        };
        let xs: Vec<f64> = inputs
            .iter()
            .map(|v| match v {
                Value::Float(f) => *f,
                _ => f64::NAN,
            })
            .collect();
        let y = expr.eval(&xs);
        // Unreachable with protected division at the default depth limit,
        // but a non-finite value must never leak into behaviors.
        if y.is_finite() {
            Output::Value(Value::Float(y))
        } else {
            Output::Failure
        }
    }
    fn case_error(&self, actual: &Value, expected: &Value) -> f64 {
        abs_diff_float(actual, expected).unwrap_or_else(|| self.failure_penalty())
    }
    fn random_genome(&self, rng: &mut ChaCha8Rng) -> Genome {
        Genome::Expr(Expr::random(&self.params, rng))
    }
    fn crossover(&self, a: &Genome, b: &Genome, rng: &mut ChaCha8Rng) -> Genome {
        match (a.as_expr(), b.as_expr()) {
            (Some(x), Some(y)) => Genome::Expr(x.crossover(y, &self.params, rng)),
            _ => a.clone(),
        }
    }
    fn point_mutate(&self, genome: &Genome, rng: &mut ChaCha8Rng) -> Genome {
        match genome.as_expr() {
            Some(e) => Genome::Expr(e.point_mutate(&self.params, rng)),
            None => genome.clone(),
        }
    }
    fn structural_mutate(&self, genome: &Genome, rng: &mut ChaCha8Rng) -> Genome {
        match genome.as_expr() {
            Some(e) => Genome::Expr(e.structural_mutate(&self.params, rng)),
            None => genome.clone(),
        }
    }
}

fn float_case(x1: i32, x2: i32, y: f64) -> TrainingCase {
    TrainingCase::new(
        vec![Value::Float(x1 as f64), Value::Float(x2 as f64)],
        Value::Float(y),
    )
}

/// Target x1^2 - x2 with three fixed training cases; the test set draws
/// fresh integer points that avoid the training inputs.
fn sr_paper_example(spec: &ProblemSpec) -> ExprProblem {
    let fixed = [(2, 1), (3, 5), (1, 3)];
    let train: Vec<TrainingCase> = fixed
        .iter()
        .map(|&(x1, x2)| float_case(x1, x2, (x1 * x1 - x2) as f64))
        .collect();
    let mut stream = case_stream(spec);
    let mut used: HashSet<(i32, i32)> = fixed.iter().copied().collect();
    let mut test = Vec::with_capacity(spec.test_size);
    while test.len() < spec.test_size && used.len() < 121 {
        let x1 = stream.gen_range(-5..=5);
        let x2 = stream.gen_range(-5..=5);
        if used.insert((x1, x2)) {
            test.push(float_case(x1, x2, (x1 * x1 - x2) as f64));
        }
    }
    ExprProblem {
        spec: spec.clone(),
        train,
        test,
        params: EXPR_PARAMS,
    }
}

/// A random polynomial c0 + c1*x1 + c2*x2 + c3*x1^2 + c4*x1*x2 + c5*x2^2
/// with integer coefficients in [-3, 3], sampled per seed.
fn sr_random_poly(spec: &ProblemSpec) -> Result<ExprProblem, ProblemError> {
    let domain = 121usize; // integer pairs in [-5, 5]^2
    if spec.train_size + spec.test_size > domain {
        return Err(ProblemError::BadSpec(format!(
            "sr-random-poly has {domain} distinct integer points, asked for {}",
            spec.train_size + spec.test_size
        )));
    }
    let mut stream = case_stream(spec);
    let coeffs: [i64; 6] = loop {
        let c: [i64; 6] = std::array::from_fn(|_| stream.gen_range(-3..=3));
        if c.iter().any(|&x| x != 0) {
            break c;
        }
    };
    let target = |x1: i64, x2: i64| -> f64 {
        (coeffs[0] + coeffs[1] * x1 + coeffs[2] * x2 + coeffs[3] * x1 * x1
            + coeffs[4] * x1 * x2
            + coeffs[5] * x2 * x2) as f64
    };
    let mut pairs: Vec<(i32, i32)> = (-5..=5)
        .flat_map(|a| (-5..=5).map(move |b| (a, b)))
        .collect();
    pairs.shuffle(&mut stream);
    let cases = |slice: &[(i32, i32)]| {
        slice
            .iter()
            .map(|&(x1, x2)| float_case(x1, x2, target(x1 as i64, x2 as i64)))
            .collect::<Vec<_>>()
    };
    Ok(ExprProblem {
        spec: spec.clone(),
        train: cases(&pairs[..spec.train_size]),
        test: cases(&pairs[spec.train_size..spec.train_size + spec.test_size]),
        params: EXPR_PARAMS,
    })
}

// ----------------------------------------------------------------- synthesis

enum VmMetric {
    Int,
    Bool,
    Vec,
}

struct VmProblem {
    spec: ProblemSpec,
    train: Vec<TrainingCase>,
    test: Vec<TrainingCase>,
    params: VmParams,
    output: VmOutputKind,
    metric: VmMetric,
}

fn vm_params(input_slots: usize) -> VmParams {
    VmParams {
        input_slots,
        init_len_min: 8,
        init_len_max: 24,
        max_len: 64,
        step_budget: 200,
        const_min: -5,
        const_max: 10,
    }
}

impl Problem for VmProblem {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }
    fn training_cases(&self) -> &[TrainingCase] {
        &self.train
    }
    fn test_cases(&self) -> &[TrainingCase] {
        &self.test
    }
    fn run(&self, genome: &Genome, inputs: &[Value]) -> Output {
        let program = match genome.as_micro_vm() {
            Some(g) => g,
            None => return Output::Failure,
        };
        let register = match inputs {
            [Value::IntVec(v)] => v,
            _ => return Output::Failure,
        };
        run_micro_vm(&program.code, register, self.params.step_budget, self.output)
    }
    fn case_error(&self, actual: &Value, expected: &Value) -> f64 {
        let d = match self.metric {
            VmMetric::Int => abs_diff_int(actual, expected),
            VmMetric::Bool => bool_mismatch(actual, expected),
            VmMetric::Vec => vec_l1(actual, expected),
        };
        d.unwrap_or_else(|| self.failure_penalty())
    }
    fn random_genome(&self, rng: &mut ChaCha8Rng) -> Genome {
        Genome::MicroVm(MicroVmGenome::random(&self.params, rng))
    }
    fn crossover(&self, a: &Genome, b: &Genome, rng: &mut ChaCha8Rng) -> Genome {
        match (a.as_micro_vm(), b.as_micro_vm()) {
            (Some(x), Some(y)) => Genome::MicroVm(x.crossover(y, &self.params, rng)),
            _ => a.clone(),
        }
    }
    fn point_mutate(&self, genome: &Genome, rng: &mut ChaCha8Rng) -> Genome {
        match genome.as_micro_vm() {
            Some(g) => Genome::MicroVm(g.point_mutate(&self.params, rng)),
            None => genome.clone(),
        }
    }
    fn structural_mutate(&self, genome: &Genome, rng: &mut ChaCha8Rng) -> Genome {
        match genome.as_micro_vm() {
            Some(g) => Genome::MicroVm(g.structural_mutate(&self.params, rng)),
            None => genome.clone(),
        }
    }
}

fn bits_case(bits: u32, width: usize, expected: bool) -> TrainingCase {
    let input: Vec<i64> = (0..width).map(|i| ((bits >> i) & 1) as i64).collect();
    TrainingCase::new(vec![Value::IntVec(input)], Value::Bool(expected))
}

/// Even-parity-complement over 4 bits (true when an odd number are set),
/// trained on the full 16-row truth table. Requested sizes are ignored: the
/// domain is exhausted, so no unseen test set can exist.
fn parity_4(spec: &ProblemSpec) -> VmProblem {
    let train: Vec<TrainingCase> = (0..16u32)
        .map(|bits| bits_case(bits, 4, bits.count_ones() % 2 == 1))
        .collect();
    VmProblem {
        spec: spec.clone(),
        train,
        test: vec![],
        params: vm_params(4),
        output: VmOutputKind::Bool,
        metric: VmMetric::Bool,
    }
}

/// 6-way multiplexer: bits [a0, a1, d0, d1, d2, d3], output d[a0 + 2*a1].
/// Trains on a random subset of the 64-row table, tests on disjoint rows.
fn multiplexer_6(spec: &ProblemSpec) -> Result<VmProblem, ProblemError> {
    if spec.train_size + spec.test_size > 64 {
        return Err(ProblemError::BadSpec(format!(
            "multiplexer-6 has 64 distinct rows, asked for {}",
            spec.train_size + spec.test_size
        )));
    }
    let mut stream = case_stream(spec);
    let mut rows: Vec<u32> = (0..64).collect();
    rows.shuffle(&mut stream);
    let make = |bits: u32| {
        let a0 = bits & 1;
        let a1 = (bits >> 1) & 1;
        let address = (a0 + 2 * a1) as usize;
        let data = (bits >> (2 + address)) & 1;
        bits_case(bits, 6, data == 1)
    };
    Ok(VmProblem {
        spec: spec.clone(),
        train: rows[..spec.train_size].iter().map(|&b| make(b)).collect(),
        test: rows[spec.train_size..spec.train_size + spec.test_size]
            .iter()
            .map(|&b| make(b))
            .collect(),
        params: vm_params(6),
        output: VmOutputKind::Bool,
        metric: VmMetric::Bool,
    })
}

/// Distinct random int vectors (length 1..=8, values -10..=10). `force_zero`
/// guarantees at least one zero element. `preset` vectors are taken first,
/// before the random fill.
fn distinct_vectors(
    stream: &mut ChaCha8Rng,
    count: usize,
    force_zero: bool,
    preset: &[Vec<i64>],
) -> Vec<Vec<i64>> {
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut out = Vec::with_capacity(count);
    for v in preset {
        if out.len() < count && seen.insert(v.clone()) {
            out.push(v.clone());
        }
    }
    while out.len() < count {
        let len = stream.gen_range(1..=8);
        let mut v: Vec<i64> = (0..len).map(|_| stream.gen_range(-10..=10)).collect();
        if force_zero {
            if !v.contains(&0) {
                let at = stream.gen_range(0..len);
                v[at] = 0;
            }
            // A third of the vectors get a second zero so that positional
            // heuristics (first occurrence, single occurrence) cannot pass.
            if len >= 2 && stream.gen_range(0..3) == 0 {
                let first = v.iter().position(|&x| x == 0).unwrap();
                let mut at = stream.gen_range(0..len);
                if at == first {
                    at = (at + 1) % len;
                }
                v[at] = 0;
            }
        }
        if seen.insert(v.clone()) {
            out.push(v);
        }
    }
    out
}

fn nonzero(stream: &mut ChaCha8Rng) -> i64 {
    loop {
        let x = stream.gen_range(-10..=10);
        if x != 0 {
            return x;
        }
    }
}

/// Hand-shaped zero placements that random fill covers too thinly: lone
/// zeros at either end, zero pairs at either end, all-zero vectors. These
/// are the cases where "index of the first zero" and "last index of zero"
/// disagree the most, so they anchor the training set.
fn zero_edge_cases(stream: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0], vec![0, 0]];
    out.push(vec![0; stream.gen_range(3..=8)]);
    // zero only at the end
    let len = stream.gen_range(2..=8);
    let mut v: Vec<i64> = (0..len - 1).map(|_| nonzero(stream)).collect();
    v.push(0);
    out.push(v);
    // zero only at the start
    let len = stream.gen_range(2..=8);
    let mut v = vec![0];
    v.extend((0..len - 1).map(|_| nonzero(stream)));
    out.push(v);
    // leading zero pair
    let len = stream.gen_range(3..=8);
    let mut v = vec![0, 0];
    v.extend((0..len - 2).map(|_| nonzero(stream)));
    out.push(v);
    // trailing zero pair
    let len = stream.gen_range(3..=8);
    let mut v: Vec<i64> = (0..len - 2).map(|_| nonzero(stream)).collect();
    v.extend([0, 0]);
    out.push(v);
    // zeros at both ends
    let len = stream.gen_range(3..=8);
    let mut v = vec![0];
    v.extend((0..len - 2).map(|_| nonzero(stream)));
    v.push(0);
    out.push(v);
    out
}

/// Index of the last zero in a vector guaranteed to contain one.
fn last_index_of_zero(spec: &ProblemSpec) -> VmProblem {
    let mut stream = case_stream(spec);
    let edges = zero_edge_cases(&mut stream);
    let vectors = distinct_vectors(&mut stream, spec.train_size + spec.test_size, true, &edges);
    let case = |v: &Vec<i64>| {
        let last = v.iter().rposition(|&x| x == 0).expect("a zero is forced") as i64;
        TrainingCase::new(vec![Value::IntVec(v.clone())], Value::Int(last))
    };
    let cases: Vec<TrainingCase> = vectors.iter().map(case).collect();
    let (train, test) = split(cases, spec.train_size);
    VmProblem {
        spec: spec.clone(),
        train,
        test,
        params: vm_params(8),
        output: VmOutputKind::Int,
        metric: VmMetric::Int,
    }
}

/// Clamp every negative element to zero, preserving length and order.
fn negative_to_zero(spec: &ProblemSpec) -> VmProblem {
    let mut stream = case_stream(spec);
    let vectors = distinct_vectors(&mut stream, spec.train_size + spec.test_size, false, &[]);
    let case = |v: &Vec<i64>| {
        let clamped: Vec<i64> = v.iter().map(|&x| x.max(0)).collect();
        TrainingCase::new(vec![Value::IntVec(v.clone())], Value::IntVec(clamped))
    };
    let cases: Vec<TrainingCase> = vectors.iter().map(case).collect();
    let (train, test) = split(cases, spec.train_size);
    VmProblem {
        spec: spec.clone(),
        train,
        test,
        params: vm_params(8),
        output: VmOutputKind::IntVec,
        metric: VmMetric::Vec,
    }
}

fn split(mut cases: Vec<TrainingCase>, at: usize) -> (Vec<TrainingCase>, Vec<TrainingCase>) {
    let rest = cases.split_off(at);
    (cases, rest)
}
