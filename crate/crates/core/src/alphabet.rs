//! Action and percept alphabets.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, UaiError};

/// Index of an action symbol in its alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Action(pub u32);

/// Index of a percept symbol in its alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Percept(pub u32);

impl Action {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Percept {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Kind of the next symbol in an interleaved string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Action,
    Percept,
}

/// Finite, ordered action alphabet. Order is the tie-breaking order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ActionAlphabet {
    labels: Vec<String>,
}

impl ActionAlphabet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(UaiError::Alphabet("action alphabet is empty".into()));
        }
        let mut seen = labels.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != labels.len() {
            return Err(UaiError::Alphabet("duplicate action labels".into()));
        }
        Ok(ActionAlphabet { labels })
    }

    pub fn binary() -> Self {
        ActionAlphabet { labels: vec!["0".into(), "1".into()] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, a: Action) -> &str {
        &self.labels[a.index()]
    }

    pub fn symbols(&self) -> impl Iterator<Item = Action> + '_ {
        (0..self.labels.len() as u32).map(Action)
    }
}

/// One percept symbol: an opaque observation label and an exact reward.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerceptSymbol {
    pub observation: String,
    #[serde(with = "rational_str")]
    pub reward: BigRational,
}

/// Finite, ordered percept alphabet with a declared reward range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PerceptSymbol>", into = "Vec<PerceptSymbol>")]
pub struct PerceptAlphabet {
    symbols: Vec<PerceptSymbol>,
}

impl PerceptAlphabet {
    pub fn new(symbols: Vec<PerceptSymbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(UaiError::Alphabet("percept alphabet is empty".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i]
                .iter()
                .any(|o| o.observation == s.observation && o.reward == s.reward)
            {
                return Err(UaiError::Alphabet(format!("duplicate percept symbol {i}")));
            }
        }
        Ok(PerceptAlphabet { symbols })
    }

    /// Empty observation, binary reward: percept `i` has reward `i`.
    pub fn binary_reward() -> Self {
        PerceptAlphabet {
            symbols: vec![
                PerceptSymbol { observation: String::new(), reward: BigRational::zero() },
                PerceptSymbol { observation: String::new(), reward: BigRational::one() },
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn reward(&self, e: Percept) -> &BigRational {
        &self.symbols[e.index()].reward
    }

    pub fn symbol(&self, e: Percept) -> &PerceptSymbol {
        &self.symbols[e.index()]
    }

    pub fn symbols(&self) -> impl Iterator<Item = Percept> + '_ {
        (0..self.symbols.len() as u32).map(Percept)
    }

    /// `(min, max)` over the declared rewards.
    pub fn reward_range(&self) -> (BigRational, BigRational) {
        let mut it = self.symbols.iter().map(|s| s.reward.clone());
        let first = it.next().expect("non-empty alphabet");
        it.fold((first.clone(), first), |(lo, hi), r| {
            (if r < lo { r.clone() } else { lo }, if r > hi { r } else { hi })
        })
    }
}

impl TryFrom<Vec<String>> for ActionAlphabet {
    type Error = UaiError;
    fn try_from(labels: Vec<String>) -> Result<Self> {
        ActionAlphabet::new(labels)
    }
}

impl From<ActionAlphabet> for Vec<String> {
    fn from(a: ActionAlphabet) -> Self {
        a.labels
    }
}

impl TryFrom<Vec<PerceptSymbol>> for PerceptAlphabet {
    type Error = UaiError;
    fn try_from(symbols: Vec<PerceptSymbol>) -> Result<Self> {
        PerceptAlphabet::new(symbols)
    }
}

impl From<PerceptAlphabet> for Vec<PerceptSymbol> {
    fn from(p: PerceptAlphabet) -> Self {
        p.symbols
    }
}

/// The pair of alphabets an agent and its environment share.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interface {
    pub actions: ActionAlphabet,
    pub percepts: PerceptAlphabet,
}

impl Interface {
    pub fn binary() -> Self {
        Interface {
            actions: ActionAlphabet::binary(),
            percepts: PerceptAlphabet::binary_reward(),
        }
    }

    pub fn is_binary(&self) -> bool {
        self.actions.len() == 2 && self.percepts.len() == 2
    }

    pub fn size(&self, slot: Slot) -> usize {
        match slot {
            Slot::Action => self.actions.len(),
            Slot::Percept => self.percepts.len(),
        }
    }

    /// The same alphabet sizes, ignoring labels and rewards.
    pub fn same_shape(&self, other: &Interface) -> bool {
        self.actions.len() == other.actions.len() && self.percepts.len() == other.percepts.len()
    }
}

mod rational_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse().map_err(serde::de::Error::custom)
    }
}
