//! Scenario files: JSON descriptions of one game.
//!
//! ```json
//! {
//!   "version": 1,
//!   "id": "arith_p35",
//!   "collection": { "family": "arith_progressions" },
//!   "target": { "language": { "kind": "P", "a": 3, "b": 5 } },
//!   "adversary": { "kind": "canonical" },
//!   "generator": "limit",
//!   "steps": 500
//! }
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::collection::families::{evens_vs_all, parity_prefix_pair, worked_matrix_over};
use crate::collection::{
    Dfa, DfaCollection, IntCollection, IntLanguage, LanguageCollection, MatrixCollection, Oracle,
};
use crate::error::{Error, Result};
use crate::game::adversary::{
    Canonical, DelayedCover, GoldAdversary, Repeating, Replay, WithholdPrefix,
};
use crate::game::{run_game, Adversary, GameTrace, Knowledge, PromptStrategy, Target};
use crate::generators::{by_name, Generator};
use crate::universe::{Element, Universe, UniverseId};

pub const SCENARIO_VERSION: u32 = 1;

/// Collection families a scenario can name, in listing order.
pub const FAMILIES: &[&str] = &[
    "arith_progressions",
    "obscured_progressions",
    "gold_progressions",
    "progression_list",
    "dfa",
    "parity_prefix_pair",
    "evens_vs_all",
    "worked_example",
    "matrix",
];

/// Adversary kinds a scenario can name, in listing order.
pub const ADVERSARIES: &[&str] = &[
    "canonical",
    "delayed",
    "gold",
    "replay",
    "withhold_prefix",
    "repeating",
];

/// Prompt strategy forms, in listing order.
pub const PROMPT_STRATEGIES: &[&str] =
    &["none", "constant:<word>", "cycle:[w1,w2,...]", "adaptive-b"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct UniverseSpec(pub Universe);

impl TryFrom<String> for UniverseSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        if s == "integers" {
            return Ok(UniverseSpec(Universe::Integers));
        }
        match s.strip_prefix("strings:") {
            Some(symbols) => Ok(UniverseSpec(Universe::strings(symbols)?)),
            None => Err(Error::Scenario(format!(
                "universe must be \"integers\" or \"strings:<symbols>\", got {s:?}"
            ))),
        }
    }
}

impl From<UniverseSpec> for String {
    fn from(u: UniverseSpec) -> String {
        match u.0 {
            Universe::Integers => "integers".into(),
            Universe::Strings(a) => format!("strings:{}", a.symbols().iter().collect::<String>()),
        }
    }
}

/// An automaton given inline or by a path relative to the scenario file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutomatonSource {
    File { file: PathBuf },
    Text { text: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CollectionSpec {
    ArithProgressions,
    ObscuredProgressions,
    GoldProgressions {
        depth: usize,
    },
    ProgressionList {
        languages: Vec<IntLanguage>,
    },
    Dfa {
        #[serde(default)]
        name: Option<String>,
        automata: Vec<AutomatonSource>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
    ParityPrefixPair,
    EvensVsAll,
    WorkedExample {
        #[serde(default)]
        universe: Option<UniverseSpec>,
    },
    Matrix {
        universe: UniverseSpec,
        horizon: u64,
        rows: Vec<Vec<u64>>,
    },
}

/// An element written as an integer, a word, or a raw universe id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Int(i64),
    Word(String),
    Id { id: u64 },
}

impl ElementSpec {
    pub fn resolve(&self, universe: &Universe) -> Result<UniverseId> {
        Ok(match self {
            ElementSpec::Int(x) => universe.index_of(&Element::Int(*x))?,
            ElementSpec::Word(w) => universe.parse_id(w)?,
            ElementSpec::Id { id } => {
                UniverseId::new(*id).ok_or(crate::error::UniverseError::ZeroIndex)?
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdversarySpec {
    Canonical,
    Delayed {
        holdback: Vec<ElementSpec>,
        release: usize,
    },
    Gold {
        stage_cap: usize,
    },
    Replay {
        stream: Vec<ElementSpec>,
    },
    WithholdPrefix {
        prefix: String,
        until: usize,
    },
    Repeating {
        inner: Box<AdversarySpec>,
        probability: f64,
    },
}

fn default_generator() -> String {
    "limit".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default)]
    pub id: String,
    pub collection: CollectionSpec,
    pub target: Target,
    #[serde(default = "default_adversary")]
    pub adversary: AdversarySpec,
    #[serde(default = "default_generator")]
    pub generator: String,
    #[serde(default)]
    pub prompts: PromptStrategy,
    pub steps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Iteration or closure ceiling handed to the generator.
    #[serde(default)]
    pub ceiling: Option<u64>,
}

fn default_adversary() -> AdversarySpec {
    AdversarySpec::Canonical
}

/// A scenario turned into live objects, ready to play.
pub struct Prepared {
    pub id: String,
    pub oracle: Oracle,
    pub knowledge: Knowledge,
    pub adversary: Box<dyn Adversary>,
    pub generator: Box<dyn Generator>,
    pub prompts: PromptStrategy,
    pub steps: usize,
}

impl Prepared {
    pub fn run(mut self) -> Result<GameTrace> {
        let mut trace = run_game(
            &self.oracle,
            &self.knowledge,
            self.adversary.as_mut(),
            self.generator.as_mut(),
            &self.prompts,
            self.steps,
        )?;
        trace.scenario = self.id;
        Ok(trace)
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.check()?;
        Ok(s)
    }

    /// Reads a scenario file. A missing `id` defaults to the file stem.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let mut s = Scenario::from_json(&fs::read_to_string(path)?)?;
        if s.id.is_empty() {
            s.id = path
                .file_stem()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((s, base))
    }

    pub fn check(&self) -> Result<()> {
        if self.version != SCENARIO_VERSION {
            return Err(Error::Scenario(format!(
                "unsupported version {} (expected {SCENARIO_VERSION})",
                self.version
            )));
        }
        if self.steps == 0 {
            return Err(Error::Scenario("steps must be at least 1".into()));
        }
        if let PromptStrategy::Cycle(ps) = &self.prompts {
            if ps.is_empty() {
                return Err(Error::Scenario("cycle prompts must not be empty".into()));
            }
        }
        Ok(())
    }

    /// Builds the collection. Automaton files are read relative to `base`;
    /// without a base only inline automata are allowed.
    pub fn collection(&self, base: Option<&Path>) -> Result<Arc<dyn LanguageCollection>> {
        Ok(match &self.collection {
            CollectionSpec::ArithProgressions => Arc::new(IntCollection::arith_progressions()),
            CollectionSpec::ObscuredProgressions => {
                Arc::new(IntCollection::obscured_progressions())
            }
            CollectionSpec::GoldProgressions { depth } => {
                Arc::new(IntCollection::gold_progressions(*depth))
            }
            CollectionSpec::ProgressionList { languages } => {
                if languages.is_empty() {
                    return Err(Error::Scenario(
                        "progression_list needs at least one language".into(),
                    ));
                }
                for l in languages {
                    IntLanguage::try_new(l.kind, l.start, l.step, l.extra.clone())?;
                }
                Arc::new(IntCollection::list(languages.clone()))
            }
            CollectionSpec::Dfa {
                name,
                automata,
                labels,
            } => {
                if automata.is_empty() {
                    return Err(Error::Scenario(
                        "dfa collection needs at least one automaton".into(),
                    ));
                }
                let dfas = automata
                    .iter()
                    .map(|src| read_automaton(src, base))
                    .collect::<Result<Vec<_>>>()?;
                let name = name.clone().unwrap_or_else(|| "dfa".into());
                Arc::new(match labels {
                    Some(l) if l.len() != dfas.len() => {
                        return Err(Error::Scenario("one label per automaton".into()))
                    }
                    Some(l) => DfaCollection::labelled(name, dfas, l.clone())?,
                    None => DfaCollection::new(name, dfas)?,
                })
            }
            CollectionSpec::ParityPrefixPair => Arc::new(parity_prefix_pair()),
            CollectionSpec::EvensVsAll => Arc::new(evens_vs_all()),
            CollectionSpec::WorkedExample { universe } => Arc::new(worked_matrix_over(
                universe.clone().map(|u| u.0).unwrap_or(Universe::Integers),
            )),
            CollectionSpec::Matrix {
                universe,
                horizon,
                rows,
            } => {
                if rows.is_empty() {
                    return Err(Error::Scenario("matrix needs at least one row".into()));
                }
                Arc::new(MatrixCollection::new(
                    "matrix",
                    universe.0.clone(),
                    *horizon,
                    rows.clone(),
                ))
            }
        })
    }

    /// Resolves the target, validating an explicit progression first.
    pub fn knowledge(&self, collection: &Arc<dyn LanguageCollection>) -> Result<Knowledge> {
        let target = match &self.target {
            Target::Language(l) => {
                IntLanguage::try_new(l.kind, l.start, l.step, l.extra.clone())?;
                Target::Language(l.clone())
            }
            t => t.clone(),
        };
        Knowledge::new(collection.clone(), target)
    }

    pub fn build_adversary(
        &self,
        spec: &AdversarySpec,
        k: &Knowledge,
    ) -> Result<Box<dyn Adversary>> {
        let universe = k.universe();
        Ok(match spec {
            AdversarySpec::Canonical => Box::new(Canonical::new(k.clone())),
            AdversarySpec::Delayed { holdback, release } => {
                let h = holdback
                    .iter()
                    .map(|e| e.resolve(universe))
                    .collect::<Result<BTreeSet<_>>>()?;
                Box::new(DelayedCover::new(k.clone(), h, *release)?)
            }
            AdversarySpec::Gold { stage_cap } => {
                Box::new(GoldAdversary::new(k.collection().clone(), *stage_cap)?)
            }
            AdversarySpec::Replay { stream } => Box::new(Replay::new(
                stream
                    .iter()
                    .map(|e| e.resolve(universe))
                    .collect::<Result<Vec<_>>>()?,
            )),
            AdversarySpec::WithholdPrefix { prefix, until } => {
                Box::new(WithholdPrefix::new(k.clone(), prefix.clone(), *until)?)
            }
            AdversarySpec::Repeating { inner, probability } => {
                if !(0.0..1.0).contains(probability) {
                    return Err(Error::Scenario(
                        "repeat probability must lie in [0, 1)".into(),
                    ));
                }
                Box::new(Repeating::new(
                    self.build_adversary(inner, k)?,
                    *probability,
                    self.seed,
                ))
            }
        })
    }

    pub fn build(&self, base: Option<&Path>) -> Result<Prepared> {
        self.check()?;
        let collection = self.collection(base)?;
        let knowledge = self.knowledge(&collection)?;
        let adversary = self.build_adversary(&self.adversary, &knowledge)?;
        let generator = by_name(&self.generator, self.ceiling)?;
        Ok(Prepared {
            id: self.id.clone(),
            oracle: Oracle::new(collection),
            knowledge,
            adversary,
            generator,
            prompts: self.prompts.clone(),
            steps: self.steps,
        })
    }
}

fn read_automaton(src: &AutomatonSource, base: Option<&Path>) -> Result<Dfa> {
    match src {
        AutomatonSource::Text { text } => Ok(text.parse()?),
        AutomatonSource::File { file } => {
            let base = base.ok_or_else(|| {
                Error::Scenario("automaton files need a scenario directory".into())
            })?;
            Ok(fs::read_to_string(base.join(file))?.parse()?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_scenario_defaults() {
        let s = Scenario::from_json(
            r#"{"version":1,"collection":{"family":"worked_example"},"target":{"index":3},
                "adversary":{"kind":"replay","stream":[{"id":2},{"id":5}]},"steps":2}"#,
        )
        .unwrap();
        assert_eq!(s.generator, "limit");
        assert!(s.prompts.is_none());
        let trace = s.build(None).unwrap().run().unwrap();
        assert_eq!(trace.outputs(), vec![1, 7]);
    }

    #[test]
    fn rejects_bad_input() {
        let base = r#""collection":{"family":"evens_vs_all"},"target":{"index":1}"#;
        for bad in [
            format!(r#"{{"version":1,{base},"steps":0}}"#),
            format!(r#"{{"version":2,{base},"steps":5}}"#),
            format!(r#"{{"version":1,{base},"steps":5,"colour":1}}"#),
            format!(r#"{{"version":1,{base},"steps":5,"prompts":"sometimes"}}"#),
        ] {
            assert!(Scenario::from_json(&bad).is_err(), "{bad}");
        }
        let s = Scenario::from_json(&format!(
            r#"{{"version":1,{base},"steps":5,"generator":"oracle"}}"#
        ))
        .unwrap();
        assert!(s.build(None).is_err());
        let s = Scenario::from_json(&format!(r#"{{"version":1,{base},"steps":5,"adversary":{{"kind":"delayed","holdback":["abc"],"release":3}}}}"#)).unwrap();
        assert!(s.build(None).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let s = Scenario {
            version: 1,
            id: "x".into(),
            collection: CollectionSpec::Matrix {
                universe: UniverseSpec(Universe::strings("ab").unwrap()),
                horizon: 4,
                rows: vec![vec![1, 2]],
            },
            target: Target::Index(1),
            adversary: AdversarySpec::Repeating {
                inner: Box::new(AdversarySpec::Delayed {
                    holdback: vec![ElementSpec::Word("a".into())],
                    release: 3,
                }),
                probability: 0.25,
            },
            generator: "limit".into(),
            prompts: "cycle:[ε,a]".parse().unwrap(),
            steps: 7,
            seed: 9,
            ceiling: Some(10),
        };
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(Scenario::from_json(&text).unwrap(), s);
    }
}
