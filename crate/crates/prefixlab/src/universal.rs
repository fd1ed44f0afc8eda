//! A concrete universal interpreter with self-delimiting input.
//!
//! The interpreter reads its program one bit at a time on demand; a run
//! defines a value exactly when it halts within the step budget having
//! read exactly the program's length. This read-exactly discipline makes
//! the set of halting programs prefix-free by construction: a run never
//! sees bits beyond the ones it asked for, so it behaves identically on
//! every extension of a halting program and on none of them does it end
//! having read all its input.
//!
//! ## Program format
//!
//! The first bit selects a channel.
//!
//! * `1` — literal channel: `1 · γ(|s|+1) · s` outputs `s`, where `γ` is
//!   the Elias gamma code (`⌊log₂ n⌋` zeros, then `n` in binary). The
//!   whole program has length `|s| + 2⌊log₂(|s|+1)⌋ + 2`, so every
//!   string is reachable with logarithmic overhead.
//! * `0` — bytecode channel: the remaining bits are consumed three at a
//!   time as opcodes of a small stack machine whose stack holds bits.
//!   Opcodes are fetched lazily as the program counter first reaches
//!   them, so instruction bits and `READBIT` data bits interleave in the
//!   input stream. A backward jump re-executes already fetched opcodes
//!   without re-reading input.
//!
//! ## Bytecode opcodes
//!
//! | bits  | name     | effect                                                        |
//! |-------|----------|---------------------------------------------------------------|
//! | `000` | READBIT  | read one input bit and push it                                |
//! | `001` | OUT0     | append `0` to the output                                      |
//! | `010` | OUT1     | append `1` to the output                                      |
//! | `011` | PUSH0    | push `0`                                                      |
//! | `100` | DUPTOP   | push a copy of the top; an empty stack pushes `0`             |
//! | `101` | FLIPTOP  | toggle the top in place; an empty stack pushes `1`            |
//! | `110` | JNZBACK  | pop (an empty stack pops `0`); on `1` restart at the first opcode |
//! | `111` | HALT     | halt                                                          |
//!
//! A run costs one step per consumed input bit plus one step per
//! executed opcode; it halts within budget `T` when its total step
//! count is at most `T`. Exceeding the budget is non-halting at that
//! budget, exactly as in dovetailed simulation.

use std::collections::BTreeMap;
use std::fmt;

use crate::bitstring::{pair, BitString};
use crate::dyadic::Dyadic;
use crate::machine::MachineGraph;

/// Default cap on `2^{maxProgramLength+1}`, the candidate-program count
/// of an enumeration. Overridable per call (CLI: `--ceiling` or
/// `PREFIXLAB_CEILING`).
pub const DEFAULT_ENUMERATION_CEILING: u64 = 1 << 22;

/// Errors from budgeted enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UniversalError {
    /// `2^{maxProgramLength+1}` candidate programs exceed the ceiling.
    CeilingExceeded {
        max_program_length: u64,
        ceiling: u64,
    },
}

impl fmt::Display for UniversalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UniversalError::CeilingExceeded {
                max_program_length,
                ceiling,
            } => write!(
                f,
                "enumerating programs of up to {max_program_length} bits requires \
                 2^{} candidates, which exceeds the ceiling {ceiling}",
                max_program_length + 1
            ),
        }
    }
}

impl std::error::Error for UniversalError {}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Opcode {
    ReadBit,
    Out0,
    Out1,
    Push0,
    DupTop,
    FlipTop,
    JnzBack,
    Halt,
}

impl Opcode {
    fn decode(b0: bool, b1: bool, b2: bool) -> Opcode {
        match (b0, b1, b2) {
            (false, false, false) => Opcode::ReadBit,
            (false, false, true) => Opcode::Out0,
            (false, true, false) => Opcode::Out1,
            (false, true, true) => Opcode::Push0,
            (true, false, false) => Opcode::DupTop,
            (true, false, true) => Opcode::FlipTop,
            (true, true, false) => Opcode::JnzBack,
            (true, true, true) => Opcode::Halt,
        }
    }
}

#[derive(Clone)]
enum Phase {
    /// Awaiting the channel-select bit.
    Channel,
    /// Literal channel: counting the gamma code's leading zeros.
    LitZeros { zeros: u32 },
    /// Literal channel: reading the remaining gamma value bits.
    /// Saturating u128: a value too large to finish within any u64 step
    /// budget behaves identically whether or not it is exact.
    LitValue { remaining: u32, value: u128 },
    /// Literal channel: copying the announced body to the output.
    LitBody { remaining: u128 },
    /// Bytecode channel.
    Code,
}

enum RunStop {
    Halted,
    NeedBit,
    OutOfSteps,
}

#[derive(Clone)]
struct Vm {
    phase: Phase,
    stack: Vec<bool>,
    code: Vec<Opcode>,
    fetch: Vec<bool>,
    pc: usize,
    output: Vec<bool>,
    consumed: Vec<bool>,
    steps: u64,
    max_steps: u64,
    pending: Option<bool>,
}

impl Vm {
    fn new(max_steps: u64) -> Vm {
        Vm {
            phase: Phase::Channel,
            stack: Vec::new(),
            code: Vec::new(),
            fetch: Vec::new(),
            pc: 0,
            output: Vec::new(),
            consumed: Vec::new(),
            steps: 0,
            max_steps,
            pending: None,
        }
    }

    /// Supplies the demanded bit. Consuming a bit costs one step.
    fn feed(&mut self, bit: bool) {
        debug_assert!(self.pending.is_none(), "feed without a pending demand");
        self.pending = Some(bit);
        self.consumed.push(bit);
        self.steps += 1;
    }

    /// Runs until the machine halts, demands a bit, or exceeds its
    /// step budget.
    fn advance(&mut self) -> RunStop {
        loop {
            if self.steps > self.max_steps {
                return RunStop::OutOfSteps;
            }
            match self.phase {
                Phase::Channel => {
                    let Some(bit) = self.pending.take() else {
                        return RunStop::NeedBit;
                    };
                    self.phase = if bit {
                        Phase::LitZeros { zeros: 0 }
                    } else {
                        Phase::Code
                    };
                }
                Phase::LitZeros { zeros } => {
                    let Some(bit) = self.pending.take() else {
                        return RunStop::NeedBit;
                    };
                    if bit {
                        if zeros == 0 {
                            // γ(1): the announced body is empty.
                            return RunStop::Halted;
                        }
                        self.phase = Phase::LitValue {
                            remaining: zeros,
                            value: 1,
                        };
                    } else {
                        self.phase = Phase::LitZeros { zeros: zeros + 1 };
                    }
                }
                Phase::LitValue { remaining, value } => {
                    let Some(bit) = self.pending.take() else {
                        return RunStop::NeedBit;
                    };
                    let value = value.saturating_mul(2).saturating_add(bit as u128);
                    if remaining == 1 {
                        // Gamma decode complete; value >= 2 on this path,
                        // so the body has value - 1 >= 1 bits to copy.
                        self.phase = Phase::LitBody { remaining: value - 1 };
                    } else {
                        self.phase = Phase::LitValue {
                            remaining: remaining - 1,
                            value,
                        };
                    }
                }
                Phase::LitBody { remaining } => {
                    let Some(bit) = self.pending.take() else {
                        return RunStop::NeedBit;
                    };
                    self.output.push(bit);
                    if remaining == 1 {
                        return RunStop::Halted;
                    }
                    self.phase = Phase::LitBody {
                        remaining: remaining - 1,
                    };
                }
                Phase::Code => {
                    if self.pc == self.code.len() {
                        // Fetch the next opcode, one bit at a time.
                        let Some(bit) = self.pending.take() else {
                            return RunStop::NeedBit;
                        };
                        self.fetch.push(bit);
                        if self.fetch.len() == 3 {
                            self.code
                                .push(Opcode::decode(self.fetch[0], self.fetch[1], self.fetch[2]));
                            self.fetch.clear();
                        }
                        continue;
                    }
                    let op = self.code[self.pc];
                    if op == Opcode::ReadBit && self.pending.is_none() {
                        return RunStop::NeedBit;
                    }
                    // The opcode executes now; executing costs one step.
                    self.steps += 1;
                    if self.steps > self.max_steps {
                        return RunStop::OutOfSteps;
                    }
                    match op {
                        Opcode::ReadBit => {
                            let bit = self.pending.take().expect("checked above");
                            self.stack.push(bit);
                        }
                        Opcode::Out0 => self.output.push(false),
                        Opcode::Out1 => self.output.push(true),
                        Opcode::Push0 => self.stack.push(false),
                        Opcode::DupTop => {
                            let top = self.stack.last().copied().unwrap_or(false);
                            self.stack.push(top);
                        }
                        Opcode::FlipTop => match self.stack.last_mut() {
                            Some(top) => *top = !*top,
                            None => self.stack.push(true),
                        },
                        Opcode::JnzBack => {
                            if self.stack.pop().unwrap_or(false) {
                                self.pc = 0;
                                continue;
                            }
                        }
                        Opcode::Halt => return RunStop::Halted,
                    }
                    self.pc += 1;
                }
            }
        }
    }

    fn into_entry(self) -> (BitString, BitString, u64) {
        (
            BitString::from_bits(self.consumed),
            BitString::from_bits(self.output),
            self.steps,
        )
    }
}

/// Result of running the interpreter on a fixed program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    /// The interpreter reached a halt within the step budget.
    pub halted: bool,
    /// The defined value: present exactly when the run halted having
    /// read the whole program and nothing less.
    pub output: Option<BitString>,
    /// Bits consumed before the run ended.
    pub bits_read: u64,
}

/// Runs the interpreter on `p` with the given step budget. Deterministic;
/// all failure modes (halting early, demanding a bit past the end,
/// running out of steps) leave `output` undefined.
pub fn run_u(p: &BitString, max_steps: u64) -> RunOutcome {
    let mut vm = Vm::new(max_steps);
    let mut cursor = 0usize;
    loop {
        match vm.advance() {
            RunStop::NeedBit => {
                if cursor < p.len() {
                    vm.feed(p.bit(cursor));
                    cursor += 1;
                } else {
                    return RunOutcome {
                        halted: false,
                        output: None,
                        bits_read: cursor as u64,
                    };
                }
            }
            RunStop::Halted => {
                let exact = cursor == p.len();
                return RunOutcome {
                    halted: true,
                    output: exact.then(|| BitString::from_bits(vm.output.iter().copied())),
                    bits_read: cursor as u64,
                };
            }
            RunStop::OutOfSteps => {
                return RunOutcome {
                    halted: false,
                    output: None,
                    bits_read: cursor as u64,
                };
            }
        }
    }
}

/// The literal-channel program for `s`: `1 · γ(|s|+1) · s`. Always in
/// the interpreter's domain; length `|s| + 2⌊log₂(|s|+1)⌋ + 2`.
pub fn literal_program(s: &BitString) -> BitString {
    let n = s.len() as u64 + 1;
    let width = 64 - n.leading_zeros() as u64; // ⌊log₂ n⌋ + 1
    let mut p = BitString::empty();
    p.push(true);
    for _ in 0..width - 1 {
        p.push(false);
    }
    for i in (0..width).rev() {
        p.push((n >> i) & 1 == 1);
    }
    for bit in s.iter() {
        p.push(bit);
    }
    p
}

fn check_ceiling(max_program_length: u64, ceiling: u64) -> Result<(), UniversalError> {
    let fits = max_program_length
        .checked_add(1)
        .filter(|shift| *shift < 64)
        .map(|shift| 1u64 << shift)
        .is_some_and(|candidates| candidates <= ceiling);
    if fits {
        Ok(())
    } else {
        Err(UniversalError::CeilingExceeded {
            max_program_length,
            ceiling,
        })
    }
}

/// All `(p, U(p))` with `|p| ≤ max_program_length` halting within
/// `max_steps`, ordered by (steps to halt, then length-lexicographic
/// program). The search walks the tree of demanded bits, so runs that
/// share a prefix of demands are simulated once; the result is identical
/// to running every candidate string separately.
pub fn enumerate(
    max_program_length: u64,
    max_steps: u64,
    ceiling: u64,
) -> Result<MachineGraph, UniversalError> {
    check_ceiling(max_program_length, ceiling)?;
    let mut halting: Vec<(BitString, BitString, u64)> = Vec::new();
    let mut worklist = vec![Vm::new(max_steps)];
    while let Some(mut vm) = worklist.pop() {
        match vm.advance() {
            RunStop::Halted => halting.push(vm.into_entry()),
            RunStop::OutOfSteps => {}
            RunStop::NeedBit => {
                if (vm.consumed.len() as u64) < max_program_length {
                    let mut one = vm.clone();
                    one.feed(true);
                    worklist.push(one);
                    vm.feed(false);
                    worklist.push(vm);
                }
            }
        }
    }
    halting.sort_by(|a, b| a.2.cmp(&b.2).then_with(|| a.0.cmp(&b.0)));
    let entries = halting.into_iter().map(|(p, s, _)| (p, s)).collect();
    Ok(MachineGraph::new(entries)
        .expect("read-exactly discipline must yield a prefix-free domain"))
}

/// The universal interpreter materialized at fixed budgets: its finite
/// graph plus the budgets that produced it. Enlarging either budget only
/// ever adds entries.
#[derive(Debug, Clone)]
pub struct BudgetedUniversal {
    max_program_length: u64,
    max_steps: u64,
    graph: MachineGraph,
}

impl BudgetedUniversal {
    pub fn materialize(
        max_program_length: u64,
        max_steps: u64,
        ceiling: u64,
    ) -> Result<Self, UniversalError> {
        let graph = enumerate(max_program_length, max_steps, ceiling)?;
        Ok(BudgetedUniversal {
            max_program_length,
            max_steps,
            graph,
        })
    }

    pub fn max_program_length(&self) -> u64 {
        self.max_program_length
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }

    pub fn graph(&self) -> &MachineGraph {
        &self.graph
    }

    /// One-sided upper bound on the program-size complexity of `s` at
    /// these budgets: the shortest enumerated program producing `s`,
    /// with the length-lex least such program as witness. `None` bound
    /// means nothing at these budgets produces `s` (the bound is
    /// infinite). Never increases when budgets grow.
    pub fn approx_h(&self, s: &BitString) -> ComplexityEstimate {
        ComplexityEstimate {
            upper_bound: self.graph.complexity_of(s),
            witness: self.graph.canonical_program(s),
            max_program_length: self.max_program_length,
            max_steps: self.max_steps,
        }
    }

    /// Joint-complexity bound: [`BudgetedUniversal::approx_h`] of the
    /// paired string `pair(stringOf(n), s)`.
    pub fn approx_joint_h(&self, n: u64, s: &BitString) -> ComplexityEstimate {
        self.approx_h(&pair(&BitString::from_rank(&n.into()), s))
    }

    /// Lower bound on the universal semi-measure at these budgets:
    /// `mass(s) = Σ 2^{-|p|}` over enumerated programs producing `s`.
    /// Exact dyadics; the total over all symbols never exceeds one.
    pub fn approx_m(&self) -> SemiMeasureEstimate {
        let mut masses: BTreeMap<BitString, Dyadic> = BTreeMap::new();
        for (p, s) in self.graph.entries() {
            let term = Dyadic::pow2_neg(p.len() as u64);
            masses
                .entry(s.clone())
                .and_modify(|m| *m += &term)
                .or_insert(term);
        }
        SemiMeasureEstimate {
            masses,
            max_program_length: self.max_program_length,
            max_steps: self.max_steps,
        }
    }
}

/// Budget-stamped upper bound on program-size complexity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityEstimate {
    /// `None` = infinite (no witness at these budgets).
    pub upper_bound: Option<u64>,
    /// A shortest enumerated program for the symbol; running it within
    /// the budgets reproduces the symbol and its length equals
    /// `upper_bound`.
    pub witness: Option<BitString>,
    pub max_program_length: u64,
    pub max_steps: u64,
}

/// Budget-stamped lower bound on the universal semi-measure.
#[derive(Debug, Clone)]
pub struct SemiMeasureEstimate {
    masses: BTreeMap<BitString, Dyadic>,
    max_program_length: u64,
    max_steps: u64,
}

impl SemiMeasureEstimate {
    pub fn mass(&self, s: &BitString) -> Dyadic {
        self.masses.get(s).cloned().unwrap_or_else(Dyadic::zero)
    }

    pub fn masses(&self) -> &BTreeMap<BitString, Dyadic> {
        &self.masses
    }

    pub fn total(&self) -> Dyadic {
        self.masses.values().cloned().sum()
    }

    pub fn max_program_length(&self) -> u64 {
        self.max_program_length
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }
}
