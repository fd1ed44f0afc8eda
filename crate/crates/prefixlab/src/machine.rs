//! Finite presentations of prefix-free machines.
//!
//! A [`MachineGraph`] is an ordered list of `(codeword, symbol)` entries.
//! The entry order is the presentation's enumeration order and is
//! significant: the transforms in [`crate::transform`] are defined
//! relative to it. Construction validates that codewords are pairwise
//! distinct and that the codeword set is prefix-free; every constructed
//! graph is therefore a well-formed machine.
//!
//! ## File format
//!
//! UTF-8 text, one entry per line, `<codeword><TAB><symbol>`, both sides
//! over `{0,1}` with `-` for the empty string. Lines beginning with `#`
//! are comments. Line order is the enumeration order. Writing a graph
//! emits exactly one `codeword\tsymbol\n` line per entry and nothing
//! else, so equal graphs produce byte-identical files.

use std::collections::BTreeSet;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::bitstring::BitString;
use crate::dyadic::Dyadic;

/// Violation of the machine-graph invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineError {
    /// The same codeword appears in two entries.
    DuplicateCodeword { codeword: BitString },
    /// One codeword is a proper prefix of another.
    PrefixViolation {
        prefix: BitString,
        extension: BitString,
    },
}

impl fmt::Display for MachineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MachineError::DuplicateCodeword { codeword } => {
                write!(f, "duplicate codeword {codeword:?}")
            }
            MachineError::PrefixViolation { prefix, extension } => {
                write!(f, "codeword {prefix:?} is a prefix of codeword {extension:?}")
            }
        }
    }
}

impl std::error::Error for MachineError {}

/// Error loading a machine-graph file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadError {
    /// Malformed line: wrong field count or a character outside `{0,1,-}`.
    Parse { line: usize, message: String },
    /// The entries parse but violate the machine invariants.
    Machine(MachineError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Parse { line, message } => write!(f, "line {line}: {message}"),
            LoadError::Machine(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for LoadError {}

impl From<MachineError> for LoadError {
    fn from(e: MachineError) -> Self {
        LoadError::Machine(e)
    }
}

/// Binary trie over codewords; rejects inserts that break prefix-freeness
/// and names the existing codeword they conflict with.
#[derive(Default)]
pub struct CodewordTrie {
    nodes: Vec<TrieNode>,
}

#[derive(Default, Clone)]
struct TrieNode {
    children: [Option<u32>; 2],
    terminal: bool,
}

impl CodewordTrie {
    pub fn new() -> Self {
        CodewordTrie {
            nodes: vec![TrieNode::default()],
        }
    }

    fn child(&mut self, node: usize, bit: bool) -> usize {
        if let Some(c) = self.nodes[node].children[bit as usize] {
            return c as usize;
        }
        let c = self.nodes.len();
        self.nodes.push(TrieNode::default());
        self.nodes[node].children[bit as usize] = Some(c as u32);
        c
    }

    /// Leftmost codeword stored strictly below `node`, rebuilt bit by bit
    /// onto `acc`.
    fn some_descendant(&self, mut node: usize, mut acc: BitString) -> BitString {
        loop {
            if self.nodes[node].terminal {
                return acc;
            }
            let bit = self.nodes[node].children[0].is_none();
            acc.push(bit);
            node = self.nodes[node].children[bit as usize]
                .expect("non-terminal trie node must have a child") as usize;
        }
    }

    /// Inserts `word`. On conflict returns the violated-pair error and
    /// leaves the stored codeword set unchanged.
    pub fn insert(&mut self, word: &BitString) -> Result<(), MachineError> {
        let mut node = 0usize;
        for (i, bit) in word.iter().enumerate() {
            if self.nodes[node].terminal {
                let existing = BitString::from_bits(word.iter().take(i));
                return Err(MachineError::PrefixViolation {
                    prefix: existing,
                    extension: word.clone(),
                });
            }
            node = self.child(node, bit);
        }
        if self.nodes[node].terminal {
            return Err(MachineError::DuplicateCodeword {
                codeword: word.clone(),
            });
        }
        if self.nodes[node].children.iter().any(Option::is_some) {
            let extension = self.some_descendant(node, word.clone());
            return Err(MachineError::PrefixViolation {
                prefix: word.clone(),
                extension,
            });
        }
        self.nodes[node].terminal = true;
        Ok(())
    }
}

/// First invariant violation in `codewords`, if any. Duplicates count as
/// (improper-prefix) violations.
pub fn find_violation(codewords: &[BitString]) -> Option<MachineError> {
    let mut trie = CodewordTrie::new();
    for word in codewords {
        if let Err(e) = trie.insert(word) {
            return Some(e);
        }
    }
    None
}

/// True iff no member is a prefix of a distinct member. Trie-based;
/// agrees with the quadratic pairwise definition.
pub fn is_prefix_free(codewords: &[BitString]) -> bool {
    find_violation(codewords).is_none()
}

/// Exact `Σ 2^{-|p|}` over the given codewords.
pub fn kraft_sum<'a, I: IntoIterator<Item = &'a BitString>>(codewords: I) -> Dyadic {
    let mut sum = Dyadic::zero();
    for word in codewords {
        sum += &Dyadic::pow2_neg(word.len() as u64);
    }
    sum
}

/// A finite presentation of a prefix-free machine: ordered entries with
/// pairwise-distinct, prefix-free codewords.
#[derive(Clone, PartialEq, Eq)]
pub struct MachineGraph {
    entries: Vec<(BitString, BitString)>,
}

impl MachineGraph {
    /// Validates distinctness and prefix-freeness; entry order is kept.
    pub fn new(entries: Vec<(BitString, BitString)>) -> Result<Self, MachineError> {
        let mut trie = CodewordTrie::new();
        for (codeword, _) in &entries {
            trie.insert(codeword)?;
        }
        Ok(MachineGraph { entries })
    }

    /// The machine with empty domain.
    pub fn empty() -> Self {
        MachineGraph { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[(BitString, BitString)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn codewords(&self) -> impl Iterator<Item = &BitString> {
        self.entries.iter().map(|(p, _)| p)
    }

    /// Length of the longest codeword; 0 for the empty machine.
    pub fn max_codeword_len(&self) -> u64 {
        self.codewords().map(|p| p.len() as u64).max().unwrap_or(0)
    }

    /// Range symbols in order of first occurrence, without repeats.
    pub fn range_symbols(&self) -> Vec<BitString> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (_, s) in &self.entries {
            if seen.insert(s.clone()) {
                out.push(s.clone());
            }
        }
        out
    }

    /// The symbol paired with `p`, or `None` when `p` is outside the
    /// domain. Absence is a value of the partial map, not a failure.
    pub fn evaluate(&self, p: &BitString) -> Option<&BitString> {
        self.entries
            .iter()
            .find(|(codeword, _)| codeword == p)
            .map(|(_, symbol)| symbol)
    }

    /// All codewords mapping to `s`, in presentation order.
    pub fn preimage(&self, s: &BitString) -> Vec<BitString> {
        self.entries
            .iter()
            .filter(|(_, symbol)| symbol == s)
            .map(|(codeword, _)| codeword.clone())
            .collect()
    }

    /// Minimum codeword length over the preimage of `s`; `None` means the
    /// preimage is empty (the minimum is infinite).
    pub fn complexity_of(&self, s: &BitString) -> Option<u64> {
        self.entries
            .iter()
            .filter(|(_, symbol)| symbol == s)
            .map(|(codeword, _)| codeword.len() as u64)
            .min()
    }

    /// Length-lexicographically least codeword mapping to `s`. Its length
    /// equals [`MachineGraph::complexity_of`] whenever defined.
    pub fn canonical_program(&self, s: &BitString) -> Option<BitString> {
        self.entries
            .iter()
            .filter(|(_, symbol)| symbol == s)
            .map(|(codeword, _)| codeword.clone())
            .min()
    }

    /// Exact Kraft sum of the domain.
    pub fn kraft_sum(&self) -> Dyadic {
        kraft_sum(self.codewords())
    }

    /// First `(n, count)` with `count = #{s : complexity < n} > 2^n - 1`
    /// for `n <= max_n`, or `None` when the counting bound holds. The
    /// bound holds for every valid graph; this is the runtime check.
    pub fn counting_bound_violation(&self, max_n: u64) -> Option<(u64, u64)> {
        let mut min_lens: Vec<u64> = self
            .range_symbols()
            .iter()
            .map(|s| self.complexity_of(s).expect("range symbol has a preimage"))
            .collect();
        min_lens.sort_unstable();
        for n in 0..=max_n {
            let count = min_lens.iter().take_while(|&&l| l < n).count() as u64;
            let limit = if n >= 63 { u64::MAX } else { (1u64 << n) - 1 };
            if count > limit {
                return Some((n, count));
            }
        }
        None
    }

    /// Parses and validates the machine-graph file format.
    pub fn from_text(text: &str) -> Result<Self, LoadError> {
        let entries = parse_entries(text)?;
        Ok(MachineGraph::new(entries)?)
    }

    /// Canonical file-format rendering: one `codeword\tsymbol\n` line per
    /// entry, in order. Bit-exact; used for hashing and all file output.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (codeword, symbol) in &self.entries {
            out.push_str(&codeword.to_string());
            out.push('\t');
            out.push_str(&symbol.to_string());
            out.push('\n');
        }
        out
    }

    /// Hex SHA-256 of the canonical file rendering; ties census tables
    /// and reports to their source graph.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_file_string().as_bytes());
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

impl fmt::Debug for MachineGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.iter()).finish()
    }
}

/// Parses entry lines without enforcing the machine invariants; the
/// `verify` workflow needs to inspect invalid presentations rather than
/// reject them at load time.
pub fn parse_entries(text: &str) -> Result<Vec<(BitString, BitString)>, LoadError> {
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.starts_with('#') {
            continue;
        }
        let Some((codeword, symbol)) = line.split_once('\t') else {
            return Err(LoadError::Parse {
                line: lineno,
                message: format!("expected <codeword><TAB><symbol>, got {line:?}"),
            });
        };
        let parse = |token: &str| {
            token.parse::<BitString>().map_err(|e| LoadError::Parse {
                line: lineno,
                message: e.to_string(),
            })
        };
        entries.push((parse(codeword)?, parse(symbol)?));
    }
    Ok(entries)
}
