//! Codeword-distribution tables: how many codewords of each length a
//! machine assigns to each symbol.
//!
//! The table is sparse over symbols (only range symbols appear; an
//! absent symbol counts zero) and dense over lengths up to its `max_n`.
//! Tables carry a content hash of their source graph so downstream
//! reports can state their provenance without timestamps or randomness.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bitstring::BitString;
use crate::machine::MachineGraph;

/// Cumulative codeword counts per symbol: `count(n, s)` is the number of
/// codewords for `s` of length at most `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusTable {
    /// Per symbol, cumulative counts indexed by `n = 0..=max_n`.
    counts: BTreeMap<BitString, Vec<u64>>,
    max_n: u64,
    machine_id: String,
}

impl CensusTable {
    /// Exact counts for all `n ≤ max_n` and every range symbol of `c`.
    pub fn build(c: &MachineGraph, max_n: u64) -> CensusTable {
        let mut counts: BTreeMap<BitString, Vec<u64>> = BTreeMap::new();
        for symbol in c.range_symbols() {
            let preimage = c.preimage(&symbol);
            let cumulative = (0..=max_n)
                .map(|n| preimage.iter().filter(|p| p.len() as u64 <= n).count() as u64)
                .collect();
            counts.insert(symbol, cumulative);
        }
        CensusTable {
            counts,
            max_n,
            machine_id: c.content_hash(),
        }
    }

    /// `#{p : |p| ≤ n, p ↦ s}`. Symbols outside the table count zero.
    /// Panics when `n` exceeds the table's `max_n`.
    pub fn count(&self, n: u64, s: &BitString) -> u64 {
        assert!(n <= self.max_n, "count({n}) beyond table max_n {}", self.max_n);
        self.counts.get(s).map_or(0, |row| row[n as usize])
    }

    pub fn max_n(&self) -> u64 {
        self.max_n
    }

    /// Hex SHA-256 of the source graph's canonical file rendering.
    pub fn machine_id(&self) -> &str {
        &self.machine_id
    }

    pub fn symbols(&self) -> impl Iterator<Item = &BitString> {
        self.counts.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total codewords of length at most `n`, marginalized over symbols.
    pub fn domain_count(&self, n: u64) -> u64 {
        self.counts
            .keys()
            .map(|s| self.count(n, s))
            .sum()
    }

    /// JSON rendering: `{"machine": hash, "maxN": n, "rows": [...]}` with
    /// one `{"n":…,"s":…,"count":…}` row per `(n, symbol)` pair, rows
    /// sorted by `(n, rank(s))`.
    pub fn to_json(&self) -> String {
        let mut rows: Vec<&BitString> = self.counts.keys().collect();
        rows.sort(); // length-lex = rank order
        let mut out = String::new();
        write!(
            out,
            "{{\"machine\":\"{}\",\"maxN\":{},\"rows\":[",
            self.machine_id, self.max_n
        )
        .expect("writing to a String cannot fail");
        let mut first = true;
        for n in 0..=self.max_n {
            for symbol in &rows {
                if !first {
                    out.push(',');
                }
                first = false;
                write!(
                    out,
                    "{{\"n\":{n},\"s\":\"{symbol}\",\"count\":{}}}",
                    self.count(n, symbol)
                )
                .expect("writing to a String cannot fail");
            }
        }
        out.push_str("]}");
        out
    }
}

/// `#{p : |p| = l, p ↦ s}`: the exact-length slice count.
pub fn slice_count(c: &MachineGraph, l: u64, s: &BitString) -> u64 {
    c.entries()
        .iter()
        .filter(|(codeword, symbol)| symbol == s && codeword.len() as u64 == l)
        .count() as u64
}

/// `#{p ∈ Dom c : |p| ≤ n}`, counted directly off the entry list.
pub fn domain_count(c: &MachineGraph, n: u64) -> u64 {
    c.codewords().filter(|p| p.len() as u64 <= n).count() as u64
}

/// One row of the envelope report.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeRow {
    pub n: u64,
    pub symbol: BitString,
    pub count: u64,
    /// Joint-complexity bound of `(n, symbol)` over the universal graph;
    /// `None` when the paired string is outside its range.
    pub h_joint: Option<u64>,
    /// `log₂ count - (n - h_joint)`; `None` when `h_joint` is infinite
    /// (the gap is then minus infinity and the ratio unbounded).
    pub log_ratio: Option<f64>,
}

/// Empirical slack of the census against the count envelope
/// `2^{n - h_joint}`. Explicitly non-normative: `h_joint` is an upper
/// bound on the true complexity, so the computed gap underestimates the
/// true one and no row here can falsify the envelope. Rows cover every
/// `(n, s)` with a positive count, `n ≤ max_n`, sorted by `(n, rank(s))`.
pub fn envelope_report(u_graph: &MachineGraph, c: &MachineGraph, max_n: u64) -> Vec<EnvelopeRow> {
    let table = CensusTable::build(c, max_n);
    let mut symbols: Vec<BitString> = table.symbols().cloned().collect();
    symbols.sort();
    let mut rows = Vec::new();
    for n in 0..=max_n {
        for symbol in &symbols {
            let count = table.count(n, symbol);
            if count == 0 {
                continue;
            }
            let paired = crate::bitstring::pair(&BitString::from_rank(&n.into()), symbol);
            let h_joint = u_graph.complexity_of(&paired);
            let log_ratio = h_joint
                .map(|h| (count as f64).log2() - (n as f64 - h as f64));
            rows.push(EnvelopeRow {
                n,
                symbol: symbol.clone(),
                count,
                h_joint,
                log_ratio,
            });
        }
    }
    rows
}

/// TSV rendering of [`envelope_report`] rows, headed by a comment line
/// marking the report non-normative.
pub fn envelope_report_tsv(rows: &[EnvelopeRow], machine_id: &str) -> String {
    let mut out = String::new();
    out.push_str(
        "# non-normative: h_joint upper-bounds the true complexity, so the gap n - h_joint \
         is an underestimate; these rows cannot falsify the count envelope\n",
    );
    writeln!(out, "# machine: {machine_id}").expect("writing to a String cannot fail");
    out.push_str("# n\tsymbol\tcount\th_joint\tlog2_count_minus_gap\n");
    for row in rows {
        let h = row
            .h_joint
            .map_or_else(|| "inf".to_string(), |h| h.to_string());
        let ratio = row
            .log_ratio
            .map_or_else(|| "inf".to_string(), |r| format!("{r:.6}"));
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            row.n, row.symbol, row.count, h, ratio
        )
        .expect("writing to a String cannot fail");
    }
    out
}
