use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported base set.
pub const MAX_SIZE: usize = 12;

/// A finite base set `{0, .., n-1}` with display labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "UniverseRepr", into = "UniverseRepr")]
pub struct Universe {
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct UniverseRepr {
    size: usize,
    labels: Vec<String>,
}

impl TryFrom<UniverseRepr> for Universe {
    type Error = Error;

    fn try_from(repr: UniverseRepr) -> Result<Self> {
        if repr.size != repr.labels.len() {
            return Err(Error::InvalidUniverse(format!(
                "size {} does not match {} labels",
                repr.size,
                repr.labels.len()
            )));
        }
        Universe::new(repr.labels)
    }
}

impl From<Universe> for UniverseRepr {
    fn from(u: Universe) -> Self {
        UniverseRepr { size: u.size(), labels: u.labels }
    }
}

impl Universe {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidUniverse("empty base set".into()));
        }
        if labels.len() > MAX_SIZE {
            return Err(Error::InvalidUniverse(format!(
                "size {} exceeds the supported maximum {MAX_SIZE}",
                labels.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidUniverse(format!("duplicate label {l:?}")));
            }
        }
        Ok(Universe { labels })
    }

    /// Labels `"0"`, `"1"`, ... `"n-1"`.
    pub fn numeric(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    /// Labels `"1"` .. `"n"`.
    pub fn one_based(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()))
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, element: u8) -> &str {
        &self.labels[element as usize]
    }

    pub fn index_of(&self, label: &str) -> Option<u8> {
        self.labels.iter().position(|l| l == label).map(|i| i as u8)
    }

    pub fn parse_element(&self, label: &str) -> Result<u8> {
        self.index_of(label.trim())
            .ok_or_else(|| Error::UnknownLabel(label.trim().to_string()))
    }

    /// The universe on the given elements, keeping their labels, in the given order.
    pub fn sub_universe(&self, elements: &[u8]) -> Result<Self> {
        Self::new(elements.iter().map(|&e| self.labels[e as usize].clone()))
    }

    pub fn contains(&self, element: u8) -> bool {
        (element as usize) < self.size()
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(","))
    }
}

/// A bijection of the base set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct Relabeling {
    image: Vec<u8>,
}

impl TryFrom<Vec<u8>> for Relabeling {
    type Error = Error;

    fn try_from(image: Vec<u8>) -> Result<Self> {
        Relabeling::new(image)
    }
}

impl From<Relabeling> for Vec<u8> {
    fn from(r: Relabeling) -> Self {
        r.image
    }
}

impl Relabeling {
    pub fn new(image: Vec<u8>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &x in &image {
            if x as usize >= n || seen[x as usize] {
                return Err(Error::NotBijective(format!("{image:?}")));
            }
            seen[x as usize] = true;
        }
        Ok(Relabeling { image })
    }

    pub fn identity(n: usize) -> Self {
        Relabeling { image: (0..n as u8).collect() }
    }

    /// The transposition of `a` and `b` on `n` elements.
    pub fn swap(n: usize, a: u8, b: u8) -> Self {
        let mut r = Self::identity(n);
        r.image.swap(a as usize, b as usize);
        r
    }

    pub fn size(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, x: u8) -> u8 {
        self.image[x as usize]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.image
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.image.len()];
        for (i, &x) in self.image.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Relabeling { image: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Relabeling) -> Self {
        Relabeling { image: other.image.iter().map(|&x| self.image[x as usize]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x as usize)
    }
}

/// Every permutation of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_universes() {
        assert!(Universe::new(Vec::<String>::new()).is_err());
        assert!(Universe::new(["a", "a"]).is_err());
        assert!(Universe::numeric(13).is_err());
        assert!(Universe::numeric(12).is_ok());
        assert_eq!(Universe::numeric(1).unwrap().size(), 1);
    }

    #[test]
    fn json_size_must_match_labels() {
        let bad = r#"{"size":3,"labels":["a","b"]}"#;
        assert!(serde_json::from_str::<Universe>(bad).is_err());
        let good = r#"{"size":2,"labels":["a","b"]}"#;
        assert_eq!(serde_json::from_str::<Universe>(good).unwrap().size(), 2);
    }

    #[test]
    fn permutations_are_complete_and_sorted() {
        let p = all_permutations(4);
        assert_eq!(p.len(), 24);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all_permutations(1), vec![vec![0]]);
    }

    #[test]
    fn relabeling_inverse() {
        let r = Relabeling::new(vec![2, 0, 3, 1]).unwrap();
        assert!(r.compose(&r.inverse()).is_identity());
        assert!(Relabeling::new(vec![0, 0]).is_err());
    }
}
