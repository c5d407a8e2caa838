//! Deterministic finite automata over a universe alphabet.
//!
//! States are numbered `0..n`. The transition table is total and stored
//! row-major: `delta[state * k + symbol_rank]`.
//!
//! The text format is line oriented; `#` starts a comment:
//!
//! ```text
//! alphabet a b
//! states 2
//! start 0
//! accept 0
//! 0 a 1
//! 0 b 1
//! 1 a 0
//! 1 b 0
//! ```

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::DfaError;
use crate::universe::Alphabet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    start: usize,
    accepting: Vec<bool>,
    delta: Vec<usize>,
}

impl Dfa {
    /// Builds an automaton from an explicit transition list. Every state must
    /// have exactly one transition per symbol.
    pub fn new(
        alphabet: Alphabet,
        num_states: usize,
        start: usize,
        accepting: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = (usize, char, usize)>,
    ) -> Result<Self, DfaError> {
        if num_states == 0 {
            return Err(DfaError::NoStates);
        }
        if start >= num_states {
            return Err(DfaError::StateOutOfRange(start));
        }
        let k = alphabet.len();
        let mut acc = vec![false; num_states];
        for s in accepting {
            *acc.get_mut(s).ok_or(DfaError::StateOutOfRange(s))? = true;
        }
        let mut delta = vec![usize::MAX; num_states * k];
        for (from, symbol, to) in transitions {
            if from >= num_states {
                return Err(DfaError::StateOutOfRange(from));
            }
            if to >= num_states {
                return Err(DfaError::StateOutOfRange(to));
            }
            let sym = alphabet
                .rank(symbol)
                .ok_or(crate::error::UniverseError::BadSymbol(symbol))?;
            let slot = &mut delta[from * k + sym];
            if *slot != usize::MAX {
                return Err(DfaError::DuplicateTransition {
                    state: from,
                    symbol,
                });
            }
            *slot = to;
        }
        if let Some(pos) = delta.iter().position(|&d| d == usize::MAX) {
            return Err(DfaError::MissingTransition {
                state: pos / k,
                symbol: alphabet.symbol(pos % k),
            });
        }
        Ok(Dfa {
            alphabet,
            start,
            accepting: acc,
            delta,
        })
    }

    fn from_parts(
        alphabet: Alphabet,
        start: usize,
        accepting: Vec<bool>,
        delta: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(delta.len(), accepting.len() * alphabet.len());
        Dfa {
            alphabet,
            start,
            accepting,
            delta,
        }
    }

    /// Accepts every word.
    pub fn universal(alphabet: &Alphabet) -> Self {
        let k = alphabet.len();
        Dfa::from_parts(alphabet.clone(), 0, vec![true], vec![0; k])
    }

    /// Accepts exactly the words that begin with `prefix`.
    pub fn with_prefix(alphabet: &Alphabet, prefix: &str) -> Result<Self, DfaError> {
        let p = alphabet.encode(prefix)?;
        let k = alphabet.len();
        let n = p.len() + 2;
        let (done, sink) = (p.len(), p.len() + 1);
        let mut delta = vec![sink; n * k];
        for (i, &sym) in p.iter().enumerate() {
            delta[i * k + sym] = i + 1;
        }
        for sym in 0..k {
            delta[done * k + sym] = done;
        }
        let mut accepting = vec![false; n];
        accepting[done] = true;
        Ok(Dfa::from_parts(alphabet.clone(), 0, accepting, delta))
    }

    /// Accepts exactly the listed words.
    pub fn finite<'a>(
        alphabet: &Alphabet,
        words: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, DfaError> {
        let k = alphabet.len();
        // state 0 is the sink, state 1 the root of the trie
        let mut delta = vec![0; 2 * k];
        let mut accepting = vec![false, false];
        for word in words {
            let mut state = 1;
            for sym in alphabet.encode(word)? {
                if delta[state * k + sym] == 0 {
                    let fresh = accepting.len();
                    accepting.push(false);
                    delta.extend(std::iter::repeat_n(0, k));
                    delta[state * k + sym] = fresh;
                }
                state = delta[state * k + sym];
            }
            accepting[state] = true;
        }
        Ok(Dfa::from_parts(alphabet.clone(), 1, accepting, delta))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn next(&self, state: usize, symbol_rank: usize) -> usize {
        self.delta[state * self.alphabet.len() + symbol_rank]
    }

    pub fn accepts_ranks(&self, word: &[usize]) -> bool {
        let end = word.iter().fold(self.start, |s, &sym| self.next(s, sym));
        self.accepting[end]
    }

    /// Words with a symbol outside the alphabet are rejected.
    pub fn accepts(&self, word: &str) -> bool {
        self.alphabet
            .encode(word)
            .is_ok_and(|ranks| self.accepts_ranks(&ranks))
    }

    pub fn complement(&self) -> Self {
        let accepting = self.accepting.iter().map(|a| !a).collect();
        Dfa::from_parts(
            self.alphabet.clone(),
            self.start,
            accepting,
            self.delta.clone(),
        )
    }

    /// Product automaton for the intersection, restricted to reachable pairs.
    pub fn intersection(&self, other: &Dfa) -> Result<Self, DfaError> {
        if self.alphabet != other.alphabet {
            return Err(DfaError::AlphabetMismatch);
        }
        let k = self.alphabet.len();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(self.start, other.start)];
        index.insert((self.start, other.start), 0);
        let mut delta = Vec::new();
        let mut next = 0;
        while next < pairs.len() {
            let (p, q) = pairs[next];
            for sym in 0..k {
                let target = (self.next(p, sym), other.next(q, sym));
                let id = *index.entry(target).or_insert_with(|| {
                    pairs.push(target);
                    pairs.len() - 1
                });
                delta.push(id);
            }
            next += 1;
        }
        let accepting = pairs
            .iter()
            .map(|&(p, q)| self.accepting[p] && other.accepting[q])
            .collect();
        Ok(Dfa::from_parts(self.alphabet.clone(), 0, accepting, delta))
    }

    /// Language minus a finite set of words.
    pub fn excluding<'a>(
        &self,
        words: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, DfaError> {
        let removed = Dfa::finite(&self.alphabet, words)?;
        self.intersection(&removed.complement())
    }

    fn reachable(&self) -> Vec<bool> {
        let k = self.alphabet.len();
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.start];
        seen[self.start] = true;
        while let Some(s) = stack.pop() {
            for sym in 0..k {
                let t = self.next(s, sym);
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// States that lie on some path from the start state to an accepting state.
    pub fn useful_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let k = self.alphabet.len();
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
        for s in 0..n {
            for sym in 0..k {
                reverse[self.next(s, sym)].push(s);
            }
        }
        let mut coreach = self.accepting.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&s| coreach[s]).collect();
        while let Some(s) = stack.pop() {
            for &p in &reverse[s] {
                if !coreach[p] {
                    coreach[p] = true;
                    stack.push(p);
                }
            }
        }
        let reach = self.reachable();
        (0..n).map(|s| reach[s] && coreach[s]).collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.useful_states()[self.start]
    }

    /// True when the accepted language is infinite (a cycle through useful states).
    pub fn is_infinite(&self) -> bool {
        let useful = self.useful_states();
        if !useful[self.start] {
            return false;
        }
        let k = self.alphabet.len();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color = vec![0u8; self.num_states()];
        let mut stack: Vec<(usize, usize)> = vec![(self.start, 0)];
        color[self.start] = 1;
        while let Some(&mut (s, ref mut sym)) = stack.last_mut() {
            if *sym == k {
                color[s] = 2;
                stack.pop();
                continue;
            }
            let t = self.next(s, *sym);
            *sym += 1;
            if !useful[t] {
                continue;
            }
            match color[t] {
                0 => {
                    color[t] = 1;
                    stack.push((t, 0));
                }
                1 => return true,
                _ => {}
            }
        }
        false
    }

    /// Number of accepted words, or `None` when the language is infinite.
    pub fn finite_size(&self) -> Option<u128> {
        if self.is_infinite() {
            return None;
        }
        let useful = self.useful_states();
        if !useful[self.start] {
            return Some(0);
        }
        let k = self.alphabet.len();
        let mut memo: Vec<Option<u128>> = vec![None; self.num_states()];
        // useful subgraph is acyclic here, so a post-order walk terminates
        let mut stack = vec![(self.start, false)];
        while let Some((s, expanded)) = stack.pop() {
            if memo[s].is_some() {
                continue;
            }
            let succ = (0..k).map(|sym| self.next(s, sym)).filter(|&t| useful[t]);
            if expanded {
                let total = succ
                    .map(|t| memo[t].unwrap_or(0))
                    .fold(u128::from(self.accepting[s]), u128::saturating_add);
                memo[s] = Some(total);
            } else {
                stack.push((s, true));
                for t in succ {
                    if memo[t].is_none() {
                        stack.push((t, false));
                    }
                }
            }
        }
        memo[self.start]
    }

    /// Shortlex-least accepted word, as symbol ranks.
    pub fn shortlex_least_ranks(&self) -> Option<Vec<usize>> {
        let k = self.alphabet.len();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.num_states()];
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.start]);
        seen[self.start] = true;
        while let Some(s) = queue.pop_front() {
            if self.accepting[s] {
                let mut word = Vec::new();
                let mut cur = s;
                while let Some((p, sym)) = parent[cur] {
                    word.push(sym);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for sym in 0..k {
                let t = self.next(s, sym);
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((s, sym));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    pub fn shortlex_least(&self) -> Option<String> {
        self.shortlex_least_ranks()
            .map(|w| w.into_iter().map(|r| self.alphabet.symbol(r)).collect())
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self, DfaError> {
        text.parse()
    }
}

impl fmt::Display for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let symbols: Vec<String> = self
            .alphabet
            .symbols()
            .iter()
            .map(char::to_string)
            .collect();
        writeln!(f, "alphabet {}", symbols.join(" "))?;
        writeln!(f, "states {}", self.num_states())?;
        writeln!(f, "start {}", self.start)?;
        let acc: Vec<String> = (0..self.num_states())
            .filter(|&s| self.accepting[s])
            .map(|s| s.to_string())
            .collect();
        if acc.is_empty() {
            writeln!(f, "accept")?;
        } else {
            writeln!(f, "accept {}", acc.join(" "))?;
        }
        for s in 0..self.num_states() {
            for (r, c) in self.alphabet.symbols().iter().enumerate() {
                writeln!(f, "{s} {c} {}", self.next(s, r))?;
            }
        }
        Ok(())
    }
}

impl FromStr for Dfa {
    type Err = DfaError;

    fn from_str(text: &str) -> Result<Self, DfaError> {
        let mut alphabet: Option<Alphabet> = None;
        let mut states: Option<usize> = None;
        let mut start: Option<usize> = None;
        let mut accept: Option<BTreeSet<usize>> = None;
        let mut transitions = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let err = |msg: String| DfaError::Parse { line, msg };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut fields = content.split_whitespace();
            let head = fields.next().unwrap_or_default();
            let rest: Vec<&str> = fields.collect();
            let number = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(format!("expected a state number, found {s:?}")))
            };
            match head {
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(err("duplicate alphabet".into()));
                    }
                    let mut syms = Vec::new();
                    for tok in &rest {
                        let mut chars = tok.chars();
                        match (chars.next(), chars.next()) {
                            (Some(c), None) => syms.push(c),
                            _ => return Err(err(format!("symbol {tok:?} must be one character"))),
                        }
                    }
                    alphabet = Some(Alphabet::new(syms).map_err(|e| err(e.to_string()))?);
                }
                "states" => {
                    if states.is_some() || rest.len() != 1 {
                        return Err(err("expected one `states N` line".into()));
                    }
                    states = Some(number(rest[0])?);
                }
                "start" => {
                    if start.is_some() || rest.len() != 1 {
                        return Err(err("expected one `start S` line".into()));
                    }
                    start = Some(number(rest[0])?);
                }
                "accept" => {
                    if accept.is_some() {
                        return Err(err("duplicate accept line".into()));
                    }
                    accept = Some(rest.iter().map(|s| number(s)).collect::<Result<_, _>>()?);
                }
                _ => {
                    if rest.len() != 2 {
                        return Err(err(format!("unrecognised line {content:?}")));
                    }
                    let from = number(head)?;
                    let mut chars = rest[0].chars();
                    let symbol = match (chars.next(), chars.next()) {
                        (Some(c), None) => c,
                        _ => {
                            return Err(err(format!("symbol {:?} must be one character", rest[0])))
                        }
                    };
                    let to = number(rest[1])?;
                    transitions.push((from, symbol, to));
                }
            }
        }
        let missing = |what: &str| DfaError::Parse {
            line: 0,
            msg: format!("missing `{what}` line"),
        };
        let alphabet = alphabet.ok_or_else(|| missing("alphabet"))?;
        let states = states.ok_or_else(|| missing("states"))?;
        let start = start.ok_or_else(|| missing("start"))?;
        let accept = accept.ok_or_else(|| missing("accept"))?;
        // bound the table before allocating it
        if states.saturating_mul(alphabet.len()) > 1 << 24 {
            return Err(DfaError::Parse {
                line: 0,
                msg: "automaton too large".into(),
            });
        }
        Dfa::new(alphabet, states, start, accept, transitions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::ab()
    }

    /// (ab)*
    fn ab_star() -> Dfa {
        Dfa::new(
            ab(),
            3,
            0,
            [0],
            [
                (0, 'a', 1),
                (0, 'b', 2),
                (1, 'a', 2),
                (1, 'b', 0),
                (2, 'a', 2),
                (2, 'b', 2),
            ],
        )
        .unwrap()
    }

    fn even_length() -> Dfa {
        Dfa::new(
            ab(),
            2,
            0,
            [0],
            [(0, 'a', 1), (0, 'b', 1), (1, 'a', 0), (1, 'b', 0)],
        )
        .unwrap()
    }

    #[test]
    fn basic_membership() {
        let d = ab_star();
        assert!(d.accepts(""));
        assert!(d.accepts("abab"));
        assert!(!d.accepts("aba"));
        assert!(!d.accepts("abc"));
    }

    #[test]
    fn rejects_partial_or_duplicate_tables() {
        assert!(matches!(
            Dfa::new(ab(), 1, 0, [0], [(0, 'a', 0)]),
            Err(DfaError::MissingTransition {
                state: 0,
                symbol: 'b'
            })
        ));
        assert!(matches!(
            Dfa::new(ab(), 1, 0, [0], [(0, 'a', 0), (0, 'a', 0), (0, 'b', 0)]),
            Err(DfaError::DuplicateTransition { .. })
        ));
        assert!(matches!(
            Dfa::new(ab(), 1, 3, [0], []),
            Err(DfaError::StateOutOfRange(3))
        ));
    }

    #[test]
    fn prefix_automaton() {
        let d = Dfa::with_prefix(&ab(), "a").unwrap();
        assert!(d.accepts("a") && d.accepts("aa") && d.accepts("ab"));
        assert!(!d.accepts("") && !d.accepts("b"));
        let all = Dfa::with_prefix(&ab(), "").unwrap();
        assert!(all.accepts("") && all.accepts("bab"));
        let ex = Dfa::with_prefix(&ab(), "ab")
            .unwrap()
            .excluding(["ab"])
            .unwrap();
        assert!(!ex.accepts("ab"));
        assert!(ex.accepts("aba"));
    }

    #[test]
    fn finite_automaton_and_sizes() {
        let d = Dfa::finite(&ab(), ["", "ab", "ba", "ab"]).unwrap();
        assert!(d.accepts("") && d.accepts("ab") && d.accepts("ba"));
        assert!(!d.accepts("a"));
        assert_eq!(d.finite_size(), Some(3));
        assert!(!d.is_infinite());
        assert_eq!(ab_star().finite_size(), None);
        assert!(ab_star().is_infinite());
        let empty = ab_star()
            .intersection(&Dfa::with_prefix(&ab(), "b").unwrap())
            .unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.finite_size(), Some(0));
    }

    #[test]
    fn product_emptiness_subset() {
        // (ab)* ⊆ even length
        let diff = ab_star().intersection(&even_length().complement()).unwrap();
        assert!(diff.is_empty());
        let diff = even_length().intersection(&ab_star().complement()).unwrap();
        assert!(!diff.is_empty());
        assert_eq!(diff.shortlex_least().as_deref(), Some("aa"));
    }

    #[test]
    fn shortlex_least_is_bfs_minimum() {
        let d = Dfa::finite(&ab(), ["bb", "ab", "bab"]).unwrap();
        assert_eq!(d.shortlex_least().as_deref(), Some("ab"));
        assert_eq!(ab_star().shortlex_least().as_deref(), Some(""));
    }

    #[test]
    fn text_round_trip() {
        let d = ab_star();
        let text = d.to_text();
        assert_eq!(Dfa::parse(&text).unwrap(), d);
        let commented = format!("# (ab)*\n\n{text}# trailing\n");
        assert_eq!(Dfa::parse(&commented).unwrap(), d);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "alphabet a b\nstates 1\nstart 0\naccept 0\n0 a 0\n0 c 0\n";
        assert!(matches!(Dfa::parse(text), Err(DfaError::Universe(_))));
        let text = "alphabet a b\nstates x\n";
        assert!(matches!(
            Dfa::parse(text),
            Err(DfaError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Dfa::parse("states 1\n"),
            Err(DfaError::Parse { line: 0, .. })
        ));
        assert!(matches!(
            Dfa::parse("alphabet ab\n"),
            Err(DfaError::Parse { line: 1, .. })
        ));
    }
}
