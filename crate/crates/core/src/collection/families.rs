//! Automaton-backed and explicit-matrix collections, plus the small built-in
//! automata used by fixtures.

use std::collections::BTreeSet;

use super::{Capabilities, CollectionSize, Dfa, IntersectionSize, LanguageCollection};
use crate::error::{DfaError, Result};
use crate::universe::{Alphabet, Universe, UniverseId};

/// Finite collection of regular languages over one alphabet.
#[derive(Clone, Debug)]
pub struct DfaCollection {
    name: String,
    universe: Universe,
    langs: Vec<Dfa>,
    labels: Vec<String>,
}

impl DfaCollection {
    /// Rejects empty lists, mixed alphabets and finite languages.
    pub fn new(name: impl Into<String>, langs: Vec<Dfa>) -> Result<Self, DfaError> {
        let labels = (1..=langs.len()).map(|i| format!("L{i}")).collect();
        Self::labelled(name, langs, labels)
    }

    pub fn labelled(
        name: impl Into<String>,
        langs: Vec<Dfa>,
        labels: Vec<String>,
    ) -> Result<Self, DfaError> {
        let first = langs.first().ok_or(DfaError::NoStates)?;
        let alphabet = first.alphabet().clone();
        for d in &langs {
            if d.alphabet() != &alphabet {
                return Err(DfaError::AlphabetMismatch);
            }
            if !d.is_infinite() {
                return Err(DfaError::FiniteLanguage);
            }
        }
        Ok(DfaCollection {
            name: name.into(),
            universe: Universe::Strings(alphabet),
            langs,
            labels,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.universe.alphabet().expect("string universe")
    }

    pub fn languages(&self) -> &[Dfa] {
        &self.langs
    }
}

impl LanguageCollection for DfaCollection {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn universe(&self) -> &Universe {
        &self.universe
    }

    fn size(&self) -> CollectionSize {
        CollectionSize::Finite(self.langs.len())
    }

    fn contains(&self, lang: usize, w: UniverseId) -> bool {
        self.langs[lang - 1].accepts_ranks(&self.alphabet().ranks_of(w))
    }

    fn describe(&self, lang: usize) -> String {
        self.labels[lang - 1].clone()
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::all()
    }

    fn is_subset(&self, i: usize, j: usize) -> Option<bool> {
        let diff = self.langs[i - 1]
            .intersection(&self.langs[j - 1].complement())
            .ok()?;
        Some(diff.is_empty())
    }

    fn automaton(&self, i: usize) -> Option<&Dfa> {
        self.langs.get(i - 1)
    }

    fn intersection_size(&self, langs: &[usize]) -> Option<IntersectionSize> {
        let mut acc = Dfa::universal(self.alphabet());
        for &i in langs {
            acc = acc.intersection(&self.langs[i - 1]).ok()?;
        }
        Some(match acc.finite_size() {
            Some(n) => IntersectionSize::Finite(n),
            None => IntersectionSize::Infinite,
        })
    }
}

/// Languages given by explicit member sets up to a horizon; every id above
/// the horizon belongs to every language, so each language is infinite.
#[derive(Clone, Debug)]
pub struct MatrixCollection {
    name: String,
    universe: Universe,
    horizon: u64,
    rows: Vec<BTreeSet<u64>>,
}

impl MatrixCollection {
    pub fn new(
        name: impl Into<String>,
        universe: Universe,
        horizon: u64,
        rows: Vec<Vec<u64>>,
    ) -> Self {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().filter(|&w| w >= 1 && w <= horizon).collect())
            .collect();
        MatrixCollection {
            name: name.into(),
            universe,
            horizon,
            rows,
        }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn rows(&self) -> &[BTreeSet<u64>] {
        &self.rows
    }
}

impl LanguageCollection for MatrixCollection {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn universe(&self) -> &Universe {
        &self.universe
    }

    fn size(&self) -> CollectionSize {
        CollectionSize::Finite(self.rows.len())
    }

    fn contains(&self, lang: usize, w: UniverseId) -> bool {
        w.get() > self.horizon || self.rows[lang - 1].contains(&w.get())
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::SUBSET | Capabilities::INTERSECTIONS
    }

    fn is_subset(&self, i: usize, j: usize) -> Option<bool> {
        Some(self.rows[i - 1].is_subset(&self.rows[j - 1]))
    }

    fn intersection_size(&self, _langs: &[usize]) -> Option<IntersectionSize> {
        Some(IntersectionSize::Infinite)
    }
}

/// Horizon of the worked-example matrix.
pub const WORKED_HORIZON: u64 = 15;

/// Sample stream of the worked example, as universe ids.
pub const WORKED_STREAM: [u64; 5] = [2, 5, 8, 10, 12];

/// Index of the true language in the worked example.
pub const WORKED_TARGET: usize = 3;

/// Five languages whose prefixes drive the limit algorithm through the
/// worked example: outputs u7, u10, u12, u15 on steps 2 to 5 after a
/// fallback on step 1.
pub fn worked_matrix() -> MatrixCollection {
    worked_matrix_over(Universe::Integers)
}

/// Same membership matrix with the ids read in another universe.
pub fn worked_matrix_over(universe: Universe) -> MatrixCollection {
    MatrixCollection::new(
        "worked_example",
        universe,
        WORKED_HORIZON,
        vec![
            vec![1],
            vec![2, 5, 7, 8, 10, 12, 15],
            vec![2, 5, 8, 10, 12, 15],
            vec![1, 2, 5, 8, 10],
            vec![2, 5, 8, 10, 12, 14],
        ],
    )
}

fn table(alphabet: &Alphabet, start: usize, accepting: &[usize], rows: &[&[usize]]) -> Dfa {
    let transitions = rows.iter().enumerate().flat_map(|(s, row)| {
        row.iter()
            .enumerate()
            .map(move |(r, &t)| (s, alphabet.symbol(r), t))
    });
    Dfa::new(
        alphabet.clone(),
        rows.len(),
        start,
        accepting.iter().copied(),
        transitions,
    )
    .expect("built-in automaton")
}

/// Words of even length.
pub fn even_length(alphabet: &Alphabet) -> Dfa {
    let k = alphabet.len();
    table(alphabet, 0, &[0], &[&vec![1; k], &vec![0; k]])
}

/// Words containing `c` somewhere.
pub fn contains_symbol(alphabet: &Alphabet, c: char) -> Result<Dfa, DfaError> {
    let hit = alphabet
        .rank(c)
        .ok_or(crate::error::UniverseError::BadSymbol(c))?;
    let k = alphabet.len();
    let row0: Vec<usize> = (0..k).map(|r| usize::from(r == hit)).collect();
    Ok(table(alphabet, 0, &[1], &[&row0, &vec![1; k]]))
}

/// Words ending in `c`.
pub fn ends_with(alphabet: &Alphabet, c: char) -> Result<Dfa, DfaError> {
    let hit = alphabet
        .rank(c)
        .ok_or(crate::error::UniverseError::BadSymbol(c))?;
    let row: Vec<usize> = (0..alphabet.len()).map(|r| usize::from(r == hit)).collect();
    Ok(table(alphabet, 0, &[1], &[&row, &row]))
}

/// `word*`, for a nonempty word.
pub fn star_of(alphabet: &Alphabet, word: &str) -> Result<Dfa, DfaError> {
    let w = alphabet.encode(word)?;
    assert!(!w.is_empty(), "star of the empty word is finite");
    let k = alphabet.len();
    let n = w.len();
    let sink = n;
    // states 0..n track the position inside the current copy of `word`
    let mut rows = vec![vec![sink; k]; n + 1];
    for (i, &sym) in w.iter().enumerate() {
        rows[i][sym] = (i + 1) % n;
    }
    let refs: Vec<&[usize]> = rows.iter().map(Vec::as_slice).collect();
    Ok(table(alphabet, 0, &[0], &refs))
}

/// `x* y*` for two distinct symbols.
pub fn two_block(alphabet: &Alphabet, x: char, y: char) -> Result<Dfa, DfaError> {
    let (rx, ry) = (
        alphabet
            .rank(x)
            .ok_or(crate::error::UniverseError::BadSymbol(x))?,
        alphabet
            .rank(y)
            .ok_or(crate::error::UniverseError::BadSymbol(y))?,
    );
    let k = alphabet.len();
    let mut r0 = vec![2; k];
    r0[rx] = 0;
    r0[ry] = 1;
    let mut r1 = vec![2; k];
    r1[ry] = 1;
    Ok(table(alphabet, 0, &[0, 1], &[&r0, &r1, &vec![2; k]]))
}

/// Over `{a, b}`: every word starting with `a`, plus the `b`-words of odd
/// length (first language) or even length (second language).
pub fn parity_prefix_pair() -> DfaCollection {
    let ab = Alphabet::ab();
    // 0 start, 1 began with a, 2 began with b and odd so far, 3 even so far
    let rows: [&[usize]; 4] = [&[1, 2], &[1, 1], &[3, 3], &[2, 2]];
    let odd = table(&ab, 0, &[1, 2], &rows);
    let even = table(&ab, 0, &[1, 3], &rows);
    DfaCollection::labelled(
        "parity_prefix_pair",
        vec![odd, even],
        vec!["a·Σ* ∪ odd b-words".into(), "a·Σ* ∪ even b-words".into()],
    )
    .expect("built-in collection")
}

/// `L_1 = Σ*`, `L_2` = words of even length, over `{a, b}`.
pub fn evens_vs_all() -> DfaCollection {
    let ab = Alphabet::ab();
    DfaCollection::labelled(
        "evens_vs_all",
        vec![Dfa::universal(&ab), even_length(&ab)],
        vec!["Σ*".into(), "even length".into()],
    )
    .expect("built-in collection")
}
