//! Graph-to-graph constructions on finite machine presentations.
//!
//! All four constructions are sensitive to the presentation's entry
//! order, which stands in for the enumeration order of the machine's
//! graph; outputs are canonical relative to the input order and are
//! deterministic.
//!
//! * [`finite_preimage`] keeps, for each symbol, only the codewords no
//!   longer than the symbol's first-listed codeword. Minimal codeword
//!   lengths are preserved exactly while every preimage becomes finite
//!   with an explicit computable bound.
//! * [`infinite_preimage`] widens every preimage with a guarded family
//!   of fresh codewords grown off one sacrificed codeword, again
//!   preserving minimal lengths; the per-symbol budget is the finite
//!   stand-in for an unbounded family.
//! * [`dense_optimal`] pads a universal graph into a machine whose
//!   codeword census provably meets a per-(length, symbol) lower bound.
//! * [`semi_measure_of_census`] turns census counts into an exact
//!   semi-measure over paired keys, with a geometric tail that
//!   reconciles the truncated total against the Kraft sum, exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;

use crate::bitstring::{pair, unpair, BitString};
use crate::dyadic::Dyadic;
use crate::machine::MachineGraph;

/// Longest zero run the preimage-widening construction will materialize
/// in a single codeword (bits). Guards against symbol ranks large enough
/// to make the family physically unrepresentable.
pub const MAX_ZERO_RUN: u64 = 1 << 24;

/// Errors from the transforms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransformError {
    /// Preimage widening needs some symbol with at least two codewords.
    NoDuplicatePreimage,
    /// The padded codeword family would exceed the enumeration ceiling.
    CeilingExceeded { required: u128, ceiling: u64 },
    /// A widened codeword would need a zero run past [`MAX_ZERO_RUN`].
    ZeroRunTooLong { symbol: BitString, run: BigUint },
}

impl fmt::Display for TransformError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformError::NoDuplicatePreimage => write!(
                f,
                "every symbol has a single codeword; widening requires a symbol with at least two"
            ),
            TransformError::CeilingExceeded { required, ceiling } => write!(
                f,
                "construction would emit {required} codewords, which exceeds the ceiling {ceiling}"
            ),
            TransformError::ZeroRunTooLong { symbol, run } => write!(
                f,
                "codeword for symbol {symbol:?} would need a zero run of {run} bits \
                 (limit {MAX_ZERO_RUN})"
            ),
        }
    }
}

impl std::error::Error for TransformError {}

/// Output of [`finite_preimage`]: the restricted machine together with
/// the per-symbol bound `f(s) = 2^{L(s)+1} - 1`, where `L(s)` is the
/// length of the first-listed codeword for `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePreimageResult {
    pub machine: MachineGraph,
    pub bounds: BTreeMap<BitString, BigUint>,
}

impl FinitePreimageResult {
    /// JSON object keyed by the symbol's text encoding. Bounds are exact
    /// decimal numbers of any size; keys are emitted in length-lex order.
    pub fn bounds_json(&self) -> String {
        let mut out = String::from("{");
        for (i, (symbol, bound)) in self.bounds.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("\"{symbol}\":{bound}"));
        }
        out.push('}');
        out
    }
}

/// Restricts each symbol's preimage to codewords no longer than its
/// first-listed one. For every symbol the minimal codeword length is
/// unchanged, the output domain is a subset of the input domain (hence
/// prefix-free), and `|preimage(s)| ≤ f(s)` with `f` as returned.
/// Applying the transform twice equals applying it once.
pub fn finite_preimage(c: &MachineGraph) -> FinitePreimageResult {
    // Length of the first-listed codeword per symbol.
    let mut first_len: BTreeMap<&BitString, usize> = BTreeMap::new();
    for (codeword, symbol) in c.entries() {
        first_len.entry(symbol).or_insert(codeword.len());
    }
    let entries: Vec<_> = c
        .entries()
        .iter()
        .filter(|(codeword, symbol)| codeword.len() <= first_len[symbol])
        .cloned()
        .collect();
    let bounds = first_len
        .into_iter()
        .map(|(symbol, len)| {
            let bound = (BigUint::from(1u8) << (len + 1)) - 1u8;
            (symbol.clone(), bound)
        })
        .collect();
    let machine = MachineGraph::new(entries)
        .expect("a subset of a prefix-free domain stays prefix-free");
    FinitePreimageResult { machine, bounds }
}

/// Zero-run length for the widened codeword of `(s, i)`: the rank of
/// `pair(s, stringOf(i))`.
fn family_run(s: &BitString, i: u64) -> BigUint {
    pair(s, &BitString::from_rank(&i.into()))
        .rank()
        .into_inner()
}

fn family_codeword(stem: &BitString, run: &BigUint, symbol: &BitString) -> Result<BitString, TransformError> {
    let run_len = u64::try_from(run).ok().filter(|r| *r <= MAX_ZERO_RUN).ok_or(
        TransformError::ZeroRunTooLong {
            symbol: symbol.clone(),
            run: run.clone(),
        },
    )?;
    let mut word = stem.concat(&BitString::zeros(run_len as usize));
    word.push(true);
    Ok(word)
}

/// Widens every preimage of `v` while preserving each symbol's minimal
/// codeword length. Callers should pass `per_symbol_budget >= 1`; a zero
/// budget degenerates to dropping the sacrificed codeword.
///
/// The first symbol (in entry order) with two or more codewords is
/// sacrificed: its length-lex greatest codeword `q` is dropped and
/// replaced by the family `q·0^{b(s0,i)}·1` for `i` below the budget,
/// where `b` is the pairing rank. Every other range symbol `s` keeps its
/// codewords and gains the first `budget` family members `q·0^{b(s,i)}·1`
/// whose length is at least the symbol's current minimal codeword
/// length. Entry order: surviving originals first (input order), then
/// the sacrificed symbol's family, then the guarded families per symbol
/// in first-occurrence order. Raising the budget only appends codewords.
pub fn infinite_preimage(
    v: &MachineGraph,
    per_symbol_budget: u64,
) -> Result<MachineGraph, TransformError> {
    let symbols = v.range_symbols();
    let sacrificed = symbols
        .iter()
        .find(|s| v.preimage(s).len() >= 2)
        .cloned()
        .ok_or(TransformError::NoDuplicatePreimage)?;
    let stem = v
        .preimage(&sacrificed)
        .into_iter()
        .max()
        .expect("sacrificed symbol has a nonempty preimage");

    let mut entries: Vec<(BitString, BitString)> = v
        .entries()
        .iter()
        .filter(|(codeword, symbol)| !(*codeword == stem && *symbol == sacrificed))
        .cloned()
        .collect();

    for i in 0..per_symbol_budget {
        let run = family_run(&sacrificed, i);
        entries.push((family_codeword(&stem, &run, &sacrificed)?, sacrificed.clone()));
    }

    for symbol in &symbols {
        if *symbol == sacrificed {
            continue;
        }
        let min_len = v
            .complexity_of(symbol)
            .expect("range symbol has a preimage");
        let mut admitted = 0u64;
        let mut i = 0u64;
        while admitted < per_symbol_budget {
            let run = family_run(symbol, i);
            // Admission guard: the new codeword may not undercut the
            // symbol's minimal codeword length.
            if BigUint::from(stem.len() as u64) + &run + 1u8 >= BigUint::from(min_len) {
                entries.push((family_codeword(&stem, &run, symbol)?, symbol.clone()));
                admitted += 1;
            }
            i += 1;
        }
    }

    Ok(MachineGraph::new(entries)
        .expect("widened domain stays within a prefix-free superset"))
}

/// Pads a universal graph into a census-dense machine.
///
/// For every entry `(q, y)` of `u_graph` whose symbol decodes as
/// `unpair(y) = (stringOf(n), s)` with `|q| ≤ n ≤ max_codeword_length`,
/// emits `(q·t, s)` for every pad `t` of length `n - |q|` — `2^{n-|q|}`
/// codewords of length exactly `n` for `s` from that seed. Seeds are
/// visited in entry order, pads in numeric order. Fails when the padded
/// family would exceed `ceiling` entries.
pub fn dense_optimal(
    u_graph: &MachineGraph,
    max_codeword_length: u64,
    ceiling: u64,
) -> Result<MachineGraph, TransformError> {
    struct Seed<'a> {
        codeword: &'a BitString,
        symbol: BitString,
        pad_len: u64,
    }

    let mut seeds = Vec::new();
    let mut required: u128 = 0;
    for (codeword, packed) in u_graph.entries() {
        let (n_string, symbol) = unpair(packed);
        let Some(n) = n_string.rank().to_u64() else {
            continue; // target length beyond any representable codeword
        };
        if n < codeword.len() as u64 || n > max_codeword_length {
            continue;
        }
        let pad_len = n - codeword.len() as u64;
        required += 1u128 << pad_len.min(127);
        if required > ceiling as u128 {
            return Err(TransformError::CeilingExceeded {
                required,
                ceiling,
            });
        }
        seeds.push(Seed {
            codeword,
            symbol,
            pad_len,
        });
    }

    let mut entries = Vec::with_capacity(required as usize);
    for seed in seeds {
        for value in 0u64..(1 << seed.pad_len) {
            let pad = BitString::from_bits(
                (0..seed.pad_len).rev().map(|i| (value >> i) & 1 == 1),
            );
            entries.push((seed.codeword.concat(&pad), seed.symbol.clone()));
        }
    }
    Ok(MachineGraph::new(entries)
        .expect("padding a prefix-free domain to equal lengths stays prefix-free"))
}

/// The census-derived semi-measure of a machine: exact masses
/// `count(n, s) · 2^{-n-1}` keyed by `pair(stringOf(n), s)`, for every
/// `n ≤ max_n` and range symbol `s`, together with the geometric tail
/// that restores exact equality with the Kraft sum.
#[derive(Debug, Clone)]
pub struct CensusSemiMeasure {
    masses: BTreeMap<BitString, Dyadic>,
    tail: Dyadic,
    max_n: u64,
}

impl CensusSemiMeasure {
    pub fn masses(&self) -> &BTreeMap<BitString, Dyadic> {
        &self.masses
    }

    pub fn max_n(&self) -> u64 {
        self.max_n
    }

    /// Sum of the truncated masses.
    pub fn truncated_sum(&self) -> Dyadic {
        self.masses.values().cloned().sum()
    }

    /// `Σ_s count(max_n, s) · 2^{-max_n-1}`: the value of the discarded
    /// `n > max_n` terms when `max_n` reaches the longest codeword.
    pub fn tail(&self) -> &Dyadic {
        &self.tail
    }

    /// Truncated sum plus tail. Equals the source machine's Kraft sum
    /// exactly whenever `max_n ≥` its longest codeword length.
    pub fn reconciled_total(&self) -> Dyadic {
        &self.truncated_sum() + &self.tail
    }

    /// JSON object keyed by the paired key's text encoding, dyadics in
    /// the `{"num": string, "exp": number}` schema, keys in length-lex
    /// order.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{");
        for (i, (key, mass)) in self.masses.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("\"{key}\":{}", mass.to_json()));
        }
        out.push('}');
        out
    }
}

/// Builds the census semi-measure of `c` up to length `max_n`; see
/// [`CensusSemiMeasure`]. All values are exact dyadics and the
/// reconciliation identity holds with zero tolerance.
pub fn semi_measure_of_census(c: &MachineGraph, max_n: u64) -> CensusSemiMeasure {
    let symbols = c.range_symbols();
    let mut masses = BTreeMap::new();
    let mut tail = Dyadic::zero();
    for symbol in &symbols {
        let preimage = c.preimage(symbol);
        let count_up_to =
            |n: u64| preimage.iter().filter(|p| p.len() as u64 <= n).count() as u64;
        for n in 0..=max_n {
            let key = pair(&BitString::from_rank(&n.into()), symbol);
            masses.insert(key, Dyadic::count_times_pow2_neg(count_up_to(n), n + 1));
        }
        tail += &Dyadic::count_times_pow2_neg(count_up_to(max_n), max_n + 1);
    }
    CensusSemiMeasure {
        masses,
        tail,
        max_n,
    }
}

/// One row of the optimality-witness diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalityWitnessRow {
    pub symbol: BitString,
    /// Complexity bound of the symbol over the universal graph.
    pub h_tilde: Option<u64>,
    /// `h_tilde + slack`, when `h_tilde` is finite.
    pub target: Option<u64>,
    /// A codeword of `c` for the symbol within the target length.
    pub witness: Option<BitString>,
}

/// Diagnostic, not a pass/fail check: for each range symbol of `c`,
/// searches its preimage for a codeword of length at most
/// `h_tilde(s) + slack` where `h_tilde` is the complexity bound over
/// `u_graph`. The slack a machine needs in order to always succeed is
/// machine-dependent and unknowable here, so absence of a witness is
/// reported, never asserted against. Rows are sorted by symbol rank.
pub fn optimality_witness_report(
    c: &MachineGraph,
    u_graph: &MachineGraph,
    slack: u64,
) -> Vec<OptimalityWitnessRow> {
    let mut rows: Vec<OptimalityWitnessRow> = c
        .range_symbols()
        .into_iter()
        .map(|symbol| {
            let h_tilde = u_graph.complexity_of(&symbol);
            let target = h_tilde.map(|h| h + slack);
            let witness = target.and_then(|t| {
                c.preimage(&symbol)
                    .into_iter()
                    .filter(|p| p.len() as u64 <= t)
                    .min()
            });
            OptimalityWitnessRow {
                symbol,
                h_tilde,
                target,
                witness,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.symbol.cmp(&b.symbol));
    rows
}

/// TSV rendering of [`optimality_witness_report`] rows, headed by a
/// comment line marking the report non-normative.
pub fn optimality_witness_tsv(rows: &[OptimalityWitnessRow], machine_id: &str, slack: u64) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    out.push_str(
        "# non-normative: the slack a machine needs before every symbol gets a witness is \
         machine-dependent; a missing witness here asserts nothing\n",
    );
    writeln!(out, "# machine: {machine_id}\tslack: {slack}")
        .expect("writing to a String cannot fail");
    out.push_str("# symbol\th_tilde\ttarget\twitness\n");
    for row in rows {
        let fmt_opt = |v: &Option<u64>| v.map_or_else(|| "inf".to_string(), |x| x.to_string());
        let witness = row
            .witness
            .as_ref()
            .map_or_else(|| "none".to_string(), |w| w.to_string());
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            row.symbol,
            fmt_opt(&row.h_tilde),
            fmt_opt(&row.target),
            witness
        )
        .expect("writing to a String cannot fail");
    }
    out
}
