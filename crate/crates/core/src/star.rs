//! One-point extensions `h ∗ d_i`.
//!
//! The new element `*` is appended as the last index. On pairwise-distinct
//! triples inside the old set the extension agrees with `h`; on distinct
//! triples that involve `*` it returns the `i`-th argument. Everything else is
//! fixed by the majority rule.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::op::{repeated_element, triples, TernaryOp};
use crate::universe::Universe;

pub const STAR_LABEL: &str = "*";

fn check_position(i: usize) -> Result<()> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(Error::InvalidTable(format!("position {i} not in 1..=3")))
    }
}

/// The majority operation acting as the `i`-th projection on distinct triples.
pub fn d_op(universe: Arc<Universe>, i: usize) -> Result<TernaryOp> {
    check_position(i)?;
    TernaryOp::majority_from_fn(universe, |t| t[i - 1])
}

/// `A ∪ {*}` with the star as the last element.
pub fn star_universe(base: &Universe) -> Result<Universe> {
    if base.index_of(STAR_LABEL).is_some() {
        return Err(Error::InvalidUniverse(format!("base set already contains {STAR_LABEL:?}")));
    }
    Universe::new(base.labels().iter().cloned().chain([STAR_LABEL.to_string()]))
}

pub fn star_extend(h: &TernaryOp, i: usize) -> Result<TernaryOp> {
    check_position(i)?;
    if !h.is_majority() {
        return Err(Error::NotMajority);
    }
    let star = h.size() as u8;
    let universe = Arc::new(star_universe(h.universe())?);
    TernaryOp::majority_from_fn(universe, |t| {
        if t.contains(&star) {
            t[i - 1]
        } else {
            h.eval(t)
        }
    })
}

/// Splits an extension back into `(h, i)`, checking every three-element set
/// through `*` against the same `d_i`.
pub fn star_decompose(h_star: &TernaryOp, base: &Universe) -> Result<(TernaryOp, usize)> {
    let n = base.size();
    if h_star.size() != n + 1 {
        return Err(Error::NotStarExtension(format!(
            "size {} is not one more than the base size {n}",
            h_star.size()
        )));
    }
    if n < 2 {
        return Err(Error::NotStarExtension("no three-element set contains the star".into()));
    }
    if !h_star.is_majority() {
        return Err(Error::NotMajority);
    }
    let star = n as u8;
    let base_elems: Vec<u8> = (0..star).collect();
    let h = h_star
        .restrict(&base_elems)
        .map_err(|e| Error::NotStarExtension(format!("base set not preserved: {e}")))?
        .with_universe(Arc::new(base.clone()))?;

    // the lexicographically first set {0, 1, *} fixes i
    let probe = [0u8, 1, star];
    let value = h_star.eval(probe);
    let i = probe
        .iter()
        .position(|&x| x == value)
        .ok_or_else(|| Error::NotStarExtension("value on {0,1,*} leaves the set".into()))?
        + 1;

    for t in triples(n + 1) {
        if repeated_element(t).is_some() || !t.contains(&star) {
            continue;
        }
        if h_star.eval(t) != t[i - 1] {
            return Err(Error::NotStarExtension(format!(
                "value at {t:?} disagrees with d{i} chosen on {{0,1,*}}"
            )));
        }
    }
    Ok((h, i))
}
