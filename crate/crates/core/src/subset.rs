use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest universe a [`Subset`] can index.
pub const MAX_UNIVERSE: usize = 64;

/// A subset of an indexed finite universe, stored as a bitmask.
///
/// Bit `i` set means the `i`-th universe element is a member. The canonical
/// order on subsets is the numeric order of the mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        debug_assert!(n <= MAX_UNIVERSE);
        if n == 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1u64 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Subset {
        Subset(it.into_iter().fold(0u64, |m, i| m | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn union(self, o: Subset) -> Subset {
        Subset(self.0 | o.0)
    }

    pub fn intersect(self, o: Subset) -> Subset {
        Subset(self.0 & o.0)
    }

    pub fn minus(self, o: Subset) -> Subset {
        Subset(self.0 & !o.0)
    }

    /// Complement relative to a universe of `n` elements.
    pub fn complement(self, n: usize) -> Subset {
        Subset::full(n).minus(self)
    }

    pub fn is_subset(self, o: Subset) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_proper_subset(self, o: Subset) -> bool {
        self.is_subset(o) && self != o
    }

    pub fn meets(self, o: Subset) -> bool {
        self.0 & o.0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }

    /// All subsets of a universe of `n` elements in canonical order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        assert!(n < 32, "powerset enumeration limited to universes below 32");
        (0u64..(1u64 << n)).map(Subset)
    }

    /// All subsets of `self`, in canonical order.
    pub fn subsets(self) -> Vec<Subset> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut s = 0u64;
        loop {
            out.push(Subset(s));
            if s == self.0 {
                break;
            }
            s = (s.wrapping_sub(self.0)) & self.0;
        }
        out
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<usize> = self.iter().collect();
        write!(f, "{v:?}")
    }
}

/// An ordered finite universe of labelled elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Universe {
    labels: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Universe {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(labels: I) -> Result<Universe> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() > MAX_UNIVERSE {
            return Err(Error::input(format!(
                "universe of {} elements exceeds the limit of {MAX_UNIVERSE}",
                labels.len()
            )));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::input("empty element id"));
            }
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate element id `{l}`")));
            }
        }
        Ok(Universe { labels, index })
    }

    /// Parses a comma-separated label list such as `"a,b,c"`.
    pub fn parse_list(s: &str) -> Result<Universe> {
        Universe::new(split_list(s))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown element id `{label}`")))
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<Subset> {
        let mut m = Subset::EMPTY;
        for l in labels {
            m = m.union(Subset::singleton(self.index_of(l.as_ref())?));
        }
        Ok(m)
    }

    /// Parses `"a,b"` (or the empty string) into a subset.
    pub fn parse_subset(&self, s: &str) -> Result<Subset> {
        self.subset(&split_list(s))
    }

    pub fn names(&self, s: Subset) -> Vec<String> {
        s.iter().map(|i| self.labels[i].clone()).collect()
    }

    /// Compact rendering: concatenated labels, or `∅`.
    pub fn show(&self, s: Subset) -> String {
        if s.is_empty() {
            return "∅".to_string();
        }
        let sep = if self.labels.iter().all(|l| l.chars().count() == 1) { "" } else { "," };
        self.names(s).join(sep)
    }
}

impl TryFrom<Vec<String>> for Universe {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Universe> {
        Universe::new(v)
    }
}

impl From<Universe> for Vec<String> {
    fn from(u: Universe) -> Vec<String> {
        u.labels
    }
}

pub(crate) fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
}
