//! Acceptance suite: the project's verification gate.
//!
//! Each test is one gate criterion, checks exact properties on finite
//! presentations (no tolerances anywhere — every comparison is on exact
//! integers or dyadics), and prints one `[acceptance] PASS` line when it
//! holds. Run with `--nocapture` to see the lines:
//!
//! ```text
//! cargo test -p prefixlab --test acceptance -- --nocapture
//! ```
//!
//! Oracles here are deliberately independent of the implementation they
//! check: pairwise prefix scans instead of the trie, rational arithmetic
//! instead of dyadics, naive rescans instead of census tables.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prefixlab::bitstring::{BitString, Rank};
use prefixlab::census::{self, CensusTable};
use prefixlab::dyadic::Dyadic;
use prefixlab::machine::{self, CodewordTrie, MachineGraph};
use prefixlab::transform;
use prefixlab::universal::{
    enumerate, literal_program, run_u, BudgetedUniversal, DEFAULT_ENUMERATION_CEILING,
};

fn bs(text: &str) -> BitString {
    text.parse().expect("test literal must parse")
}

fn pass(name: &str, detail: String) {
    println!("[acceptance] PASS {name}: {detail}");
}

// ---------------------------------------------------------------------------
// Deterministic generators shared by the criteria
// ---------------------------------------------------------------------------

fn random_bitstring(rng: &mut ChaCha8Rng, len: usize) -> BitString {
    BitString::from_bits((0..len).map(|_| rng.gen::<bool>()))
}

/// Random prefix-free codebook grown by rejected sampling into a trie.
fn random_codebook(rng: &mut ChaCha8Rng, attempts: usize, max_len: usize) -> Vec<BitString> {
    let mut trie = CodewordTrie::new();
    let mut words = Vec::new();
    for _ in 0..attempts {
        let len = rng.gen_range(1..=max_len);
        let word = random_bitstring(rng, len);
        if trie.insert(&word).is_ok() {
            words.push(word);
        }
    }
    words
}

/// Breaks a valid codebook by extending, truncating, or duplicating a
/// member.
fn mutate_to_violate(rng: &mut ChaCha8Rng, words: &mut Vec<BitString>) {
    assert!(!words.is_empty(), "cannot mutate an empty codebook");
    let victim = words[rng.gen_range(0..words.len())].clone();
    match rng.gen_range(0..3) {
        0 => {
            let mut extended = victim;
            extended.push(rng.gen());
            words.push(extended);
        }
        1 => {
            let cut = rng.gen_range(0..victim.len());
            words.push(BitString::from_bits(victim.iter().take(cut)));
        }
        _ => words.push(victim),
    }
}

fn random_machine(
    rng: &mut ChaCha8Rng,
    attempts: usize,
    max_cw_len: usize,
    max_sym_len: usize,
) -> MachineGraph {
    let entries = random_codebook(rng, attempts, max_cw_len)
        .into_iter()
        .map(|w| {
            let sym_len = rng.gen_range(0..=max_sym_len);
            (w, random_bitstring(rng, sym_len))
        })
        .collect();
    MachineGraph::new(entries).expect("generator output must be a valid machine")
}

/// Random machine guaranteed to have at least one symbol with two
/// codewords.
fn random_machine_with_shared_symbol(
    rng: &mut ChaCha8Rng,
    attempts: usize,
    max_cw_len: usize,
    max_sym_len: usize,
) -> MachineGraph {
    loop {
        let m = random_machine(rng, attempts, max_cw_len, max_sym_len);
        if m.len() < 2 {
            continue;
        }
        let mut entries = m.entries().to_vec();
        let shared = entries[0].1.clone();
        let last = entries.len() - 1;
        entries[last].1 = shared;
        return MachineGraph::new(entries).expect("resymboling keeps the domain unchanged");
    }
}

/// Quadratic prefix-freeness oracle, independent of the trie checker.
fn pairwise_prefix_free(words: &[BitString]) -> bool {
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            if i != j && a.is_prefix_of(b) {
                return false;
            }
        }
    }
    true
}

fn as_rational(d: &Dyadic) -> BigRational {
    let denom = num_bigint::BigInt::from(1u8) << d.exponent();
    BigRational::new(d.numerator().clone().into(), denom)
}

/// Universal machine at the reference budgets, shared by the criteria
/// that query it without timing its construction.
fn reference_universal() -> &'static BudgetedUniversal {
    static U: OnceLock<BudgetedUniversal> = OnceLock::new();
    U.get_or_init(|| {
        BudgetedUniversal::materialize(14, 10_000, DEFAULT_ENUMERATION_CEILING)
            .expect("reference budgets are under the default ceiling")
    })
}

fn assert_within(elapsed: Duration, limit: Duration, what: &str) {
    assert!(
        elapsed <= limit,
        "{what} took {elapsed:.2?}, over the {limit:.2?} budget"
    );
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

#[test]
fn ordering_and_rank_bijection() {
    let start = Instant::now();
    for n in 0u64..(1 << 16) {
        let rank = Rank::from(n);
        assert_eq!(
            BitString::from_rank(&rank).rank(),
            rank,
            "round-trip failed at {n}"
        );
    }
    let listing = ["-", "0", "1", "00", "01", "10", "11", "000"];
    for (position, text) in listing.iter().enumerate() {
        assert_eq!(
            BitString::from_rank(&Rank::from(position as u64)),
            bs(text),
            "listing position {position}"
        );
        assert_eq!(bs(text).rank(), Rank::from(position as u64));
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(1), "ordering/bijection");
    pass(
        "ordering/bijection",
        format!("65536 rank round-trips and the first 8 listed positions, in {elapsed:.2?}"),
    );
}

#[test]
fn prefix_checker_agrees_with_pairwise_bruteforce() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0002);
    let mut disagreements = 0usize;
    let mut valid = 0usize;
    let mut mutated = 0usize;
    for case in 0..1000 {
        let mut words = random_codebook(&mut rng, 40, 16);
        if case % 2 == 1 {
            mutate_to_violate(&mut rng, &mut words);
            mutated += 1;
        } else {
            valid += 1;
        }
        if machine::is_prefix_free(&words) != pairwise_prefix_free(&words) {
            disagreements += 1;
        }
    }
    assert_eq!(disagreements, 0);
    assert_eq!((valid, mutated), (500, 500));
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(5), "prefix-freeness agreement");
    pass(
        "prefix-freeness",
        format!("trie checker matched the pairwise oracle on 500 valid + 500 mutated codebooks in {elapsed:.2?}"),
    );
}

#[test]
fn kraft_sums_never_exceed_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0002);
    let mut checked = 0usize;
    for _ in 0..500 {
        let words = random_codebook(&mut rng, 40, 16);
        assert!(
            machine::kraft_sum(words.iter()) <= Dyadic::one(),
            "Kraft sum above one for {words:?}"
        );
        checked += 1;
    }
    let u = reference_universal();
    assert!(u.graph().kraft_sum() <= Dyadic::one());
    let bounded = transform::finite_preimage(u.graph()).machine;
    assert!(bounded.kraft_sum() <= Dyadic::one());
    checked += 2;
    // The complete code attains the bound exactly.
    assert_eq!(
        machine::kraft_sum([bs("0"), bs("10"), bs("11")].iter()),
        Dyadic::one()
    );
    pass(
        "kraft-bound",
        format!("{checked} prefix-free sets at most one, with exact equality on the complete code {{0,10,11}}"),
    );
}

#[test]
fn preimage_bounding_preserves_complexity_with_certified_bounds() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0004);
    for case in 0..200 {
        let c = random_machine(&mut rng, 64, 12, 2);
        let result = transform::finite_preimage(&c);
        let d = &result.machine;

        let source_domain: BTreeSet<_> = c.codewords().cloned().collect();
        for codeword in d.codewords() {
            assert!(
                source_domain.contains(codeword),
                "case {case}: output domain escaped the input domain"
            );
        }
        assert_eq!(
            d.range_symbols(),
            c.range_symbols(),
            "case {case}: range must be unchanged"
        );
        for symbol in c.range_symbols() {
            assert_eq!(
                d.complexity_of(&symbol),
                c.complexity_of(&symbol),
                "case {case}: minimal codeword length changed for {symbol:?}"
            );
            let count = BigUint::from(d.preimage(&symbol).len() as u64);
            assert!(
                count <= result.bounds[&symbol],
                "case {case}: preimage of {symbol:?} exceeds its bound"
            );
        }
        let again = transform::finite_preimage(d);
        assert_eq!(
            again.machine.entries(),
            d.entries(),
            "case {case}: transform must be idempotent"
        );
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(10), "preimage bounding");
    pass(
        "preimage-bounding",
        format!("200 random machines: complexity preserved, domain shrunk, bounds certified, idempotent, in {elapsed:.2?}"),
    );
}

#[test]
fn census_semi_measure_reconciles_exactly_with_kraft() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0005);
    for case in 0..100 {
        let c = random_machine(&mut rng, 48, 10, 2);
        let max_n = c.max_codeword_len();
        let sm = transform::semi_measure_of_census(&c, max_n);
        let kraft = c.kraft_sum();
        assert_eq!(
            sm.reconciled_total(),
            kraft,
            "case {case}: dyadic identity failed"
        );
        // The same identity through independent rational arithmetic.
        let rational_total = sm
            .masses()
            .values()
            .map(as_rational)
            .fold(BigRational::from_integer(0.into()), |a, b| a + b)
            + as_rational(sm.tail());
        assert_eq!(
            rational_total,
            as_rational(&kraft),
            "case {case}: rational oracle disagrees"
        );
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(10), "semi-measure identity");
    pass(
        "census-semi-measure",
        format!("100 random machines: truncated mass plus geometric tail equals the Kraft sum exactly, in {elapsed:.2?}"),
    );
}

#[test]
fn densified_census_meets_its_lower_bound() {
    let start = Instant::now();
    let max_len = 14u64;
    let u = BudgetedUniversal::materialize(max_len, 10_000, DEFAULT_ENUMERATION_CEILING)
        .expect("reference budgets are under the default ceiling");
    let v = transform::dense_optimal(u.graph(), max_len, DEFAULT_ENUMERATION_CEILING)
        .expect("padded family fits the default ceiling");
    let table = CensusTable::build(&v, max_len);

    // Every (n, s) pair the universal graph can announce, via its range.
    let mut checked = 0usize;
    let mut planted = BTreeSet::new();
    for (_, packed) in u.graph().entries() {
        let (n_string, symbol) = prefixlab::bitstring::unpair(packed);
        if let Some(n) = n_string.rank().to_u64() {
            if n <= max_len {
                planted.insert((n, symbol));
            }
        }
    }
    for (n, symbol) in planted {
        let Some(h_joint) = u.approx_joint_h(n, &symbol).upper_bound else {
            continue;
        };
        if n < h_joint {
            continue;
        }
        let floor = 1u64 << (n - h_joint);
        let count = table.count(n, &symbol);
        assert!(
            count >= floor,
            "count({n}, {symbol:?}) = {count} below the floor {floor}"
        );
        checked += 1;
    }
    assert!(checked > 0, "the check must exercise at least one pair");
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(60), "densified census");
    pass(
        "densified-census",
        format!("{checked} (length, symbol) pairs meet the 2^(n - h_joint) floor on a {}-entry machine, in {elapsed:.2?}", v.len()),
    );
}

#[test]
fn preimage_widening_grows_monotonically_and_preserves_complexity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0007);
    let budget = 100u64;
    for case in 0..50 {
        let v = random_machine_with_shared_symbol(&mut rng, 24, 10, 3);
        let w = transform::infinite_preimage(&v, budget).expect("shared symbol guaranteed");

        let codewords: Vec<_> = w.codewords().cloned().collect();
        assert!(
            machine::is_prefix_free(&codewords),
            "case {case}: widened domain must stay prefix-free"
        );
        let sacrificed = v
            .range_symbols()
            .into_iter()
            .find(|s| v.preimage(s).len() >= 2)
            .expect("generator guarantees a shared symbol");
        assert!(
            w.preimage(&sacrificed).len() >= budget as usize,
            "case {case}: sacrificed symbol must reach the budget"
        );
        for symbol in v.range_symbols() {
            assert_eq!(
                w.complexity_of(&symbol),
                v.complexity_of(&symbol),
                "case {case}: minimal codeword length changed for {symbol:?}"
            );
        }
        let wider = transform::infinite_preimage(&v, budget * 2).expect("same machine");
        let wider_set: BTreeSet<_> = wider.entries().iter().cloned().collect();
        for entry in w.entries() {
            assert!(
                wider_set.contains(entry),
                "case {case}: doubling the budget lost {entry:?}"
            );
        }
    }
    pass(
        "preimage-widening",
        format!("50 random machines at budget {budget}: prefix-free, complexity preserved, budget monotone"),
    );
}

#[test]
fn counting_bound_holds_on_universal_and_transformed_graphs() {
    let u = reference_universal();
    let mut graphs: Vec<(String, MachineGraph)> =
        vec![("universal".into(), u.graph().clone())];
    graphs.push((
        "preimage-bounded".into(),
        transform::finite_preimage(u.graph()).machine,
    ));
    graphs.push((
        "densified".into(),
        transform::dense_optimal(u.graph(), 14, DEFAULT_ENUMERATION_CEILING)
            .expect("fits the default ceiling"),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0008);
    let sample = random_machine_with_shared_symbol(&mut rng, 24, 10, 2);
    graphs.push((
        "widened".into(),
        transform::infinite_preimage(&sample, 32).expect("shared symbol guaranteed"),
    ));

    for (name, graph) in &graphs {
        assert_eq!(
            graph.counting_bound_violation(16),
            None,
            "counting bound violated on the {name} graph"
        );
    }
    pass(
        "counting-bound",
        format!(
            "at most 2^n - 1 symbols below complexity n (n <= 16) on {} graphs",
            graphs.len()
        ),
    );
}

#[test]
fn universal_machine_discipline() {
    let u = reference_universal();

    // Every enumerated program halts reading exactly its own length and
    // reproduces its recorded symbol.
    for (program, symbol) in u.graph().entries() {
        let outcome = run_u(program, u.max_steps());
        assert!(outcome.halted, "{program:?} must halt within the budget");
        assert_eq!(
            outcome.bits_read,
            program.len() as u64,
            "{program:?} must read exactly its own length"
        );
        assert_eq!(outcome.output.as_ref(), Some(symbol));
    }

    // Budget growth only adds entries.
    let grid = [(10u64, 1_000u64), (12, 10_000), (14, 10_000)];
    let mut previous: Option<BTreeSet<(BitString, BitString)>> = None;
    for (len, steps) in grid {
        let g = enumerate(len, steps, DEFAULT_ENUMERATION_CEILING).unwrap();
        let set: BTreeSet<_> = g.entries().iter().cloned().collect();
        if let Some(smaller) = &previous {
            assert!(
                smaller.is_subset(&set),
                "budgets ({len},{steps}) lost entries of a smaller grid point"
            );
        }
        previous = Some(set);
    }

    // Bit-identical output across two runs.
    let again = enumerate(14, 10_000, DEFAULT_ENUMERATION_CEILING).unwrap();
    assert_eq!(u.graph().to_file_string(), again.to_file_string());

    // Literal-channel ceiling for every symbol of length at most 10.
    let wide = BudgetedUniversal::materialize(18, 64, DEFAULT_ENUMERATION_CEILING)
        .expect("18-bit budget is under the default ceiling");
    for len in 0usize..=10 {
        for value in 0u64..(1 << len) {
            let s = BitString::from_bits((0..len).rev().map(|i| (value >> i) & 1 == 1));
            let ceiling = s.len() as u64 + 2 * (s.len() as u64 + 1).ilog2() as u64 + 2;
            let bound = wide
                .approx_h(&s)
                .upper_bound
                .expect("literal channel reaches every short symbol");
            assert!(
                bound <= ceiling,
                "approx_h({s:?}) = {bound} above the literal ceiling {ceiling}"
            );
            assert_eq!(literal_program(&s).len() as u64, ceiling);
        }
    }

    pass(
        "universal-discipline",
        format!(
            "{} programs read-exact, budget grid monotone, byte-identical re-run, literal ceiling up to length 10",
            u.graph().len()
        ),
    );
}

#[test]
fn census_reconciles_with_rescan_kraft_and_marginals() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_000a);
    for case in 0..25 {
        let c = random_machine(&mut rng, 48, 12, 2);
        let max_n = 12u64;
        let table = CensusTable::build(&c, max_n);

        // Naive rescan: evaluate every string of length at most 12.
        let mut rescan: Vec<(BitString, Vec<u64>)> = c
            .range_symbols()
            .into_iter()
            .map(|s| (s, vec![0u64; max_n as usize + 1]))
            .collect();
        for len in 0..=max_n {
            for value in 0u64..(1 << len) {
                let p =
                    BitString::from_bits((0..len).rev().map(|i| (value >> i) & 1 == 1));
                if let Some(symbol) = c.evaluate(&p) {
                    let row = rescan
                        .iter_mut()
                        .find(|(s, _)| s == symbol)
                        .expect("evaluate output is a range symbol");
                    for n in len..=max_n {
                        row.1[n as usize] += 1;
                    }
                }
            }
        }
        for (symbol, counts) in &rescan {
            for n in 0..=max_n {
                assert_eq!(
                    table.count(n, symbol),
                    counts[n as usize],
                    "case {case}: census disagrees with rescan at ({n}, {symbol:?})"
                );
            }
        }

        // Exact Kraft reconciliation over length slices.
        let mut total = Dyadic::zero();
        for symbol in c.range_symbols() {
            for l in 0..=max_n {
                total += &Dyadic::count_times_pow2_neg(census::slice_count(&c, l, &symbol), l);
            }
        }
        assert_eq!(total, c.kraft_sum(), "case {case}: slice/Kraft identity");

        // Domain count marginalizes the table.
        for n in 0..=max_n {
            assert_eq!(
                census::domain_count(&c, n),
                table.domain_count(n),
                "case {case}: marginal mismatch at {n}"
            );
        }
    }
    pass(
        "census-reconciliation",
        "25 random machines: rescan agreement to length 12, exact slice/Kraft identity, marginals match".to_string(),
    );
}
