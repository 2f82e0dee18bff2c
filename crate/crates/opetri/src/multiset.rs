//! Finite multisets over a fixed carrier set.
//!
//! A [`Carrier`] is a finite set of atom names; a [`Multiset`] assigns a
//! nonnegative count to every atom of one carrier. Multisets over a common
//! carrier form a commutative monoid under [`Multiset::add`] with
//! [`Multiset::empty`] as unit, and that monoid structure is what markings
//! and transition arities are built from.
//!
//! Operations that combine two multisets require them to share a carrier;
//! mixing carriers is a caller bug and panics. "Not enough tokens" is a
//! normal outcome, so [`Multiset::subtract`] returns `None` instead.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A finite, ordered set of atom names shared by a family of multisets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Carrier {
    atoms: Vec<String>,
}

impl Carrier {
    /// Builds a carrier from any collection of names; duplicates collapse.
    pub fn new<I, S>(atoms: I) -> Arc<Carrier>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        atoms.sort();
        atoms.dedup();
        Arc::new(Carrier { atoms })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, atom: &str) -> bool {
        self.index_of(atom).is_some()
    }

    /// Position of `atom` in the sorted atom list.
    pub fn index_of(&self, atom: &str) -> Option<usize> {
        self.atoms.binary_search_by(|a| a.as_str().cmp(atom)).ok()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MultisetError {
    #[error("atom `{atom}` is not in the carrier")]
    UnknownAtom { atom: String },
}

/// A multiset over one carrier: a count for every atom.
///
/// Equality, ordering, and hashing compare the carrier contents and the
/// counts, so structurally equal multisets behave identically as map keys
/// even when their carriers are separate allocations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset {
    carrier: Arc<Carrier>,
    counts: Vec<u64>,
}

impl Multiset {
    /// The monoid unit: every count zero.
    pub fn empty(carrier: &Arc<Carrier>) -> Multiset {
        Multiset {
            carrier: Arc::clone(carrier),
            counts: vec![0; carrier.len()],
        }
    }

    /// Builds a multiset from `(atom, count)` pairs; repeated atoms add up.
    pub fn from_pairs<I, S>(carrier: &Arc<Carrier>, pairs: I) -> Result<Multiset, MultisetError>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut out = Multiset::empty(carrier);
        for (atom, count) in pairs {
            let atom = atom.as_ref();
            let idx = carrier
                .index_of(atom)
                .ok_or_else(|| MultisetError::UnknownAtom {
                    atom: atom.to_owned(),
                })?;
            out.counts[idx] = out.counts[idx]
                .checked_add(count)
                .expect("multiset count overflow");
        }
        Ok(out)
    }

    /// One copy of a single atom.
    pub fn singleton(carrier: &Arc<Carrier>, atom: &str) -> Result<Multiset, MultisetError> {
        Multiset::from_pairs(carrier, [(atom, 1)])
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    /// Count of `atom`, which must belong to the carrier.
    pub fn count(&self, atom: &str) -> u64 {
        let idx = self
            .carrier
            .index_of(atom)
            .unwrap_or_else(|| panic!("atom `{atom}` is not in the carrier"));
        self.counts[idx]
    }

    pub(crate) fn raw_counts(&self) -> &[u64] {
        &self.counts
    }

    pub(crate) fn from_raw(carrier: &Arc<Carrier>, counts: Vec<u64>) -> Multiset {
        debug_assert_eq!(carrier.len(), counts.len());
        Multiset {
            carrier: Arc::clone(carrier),
            counts,
        }
    }

    /// Atoms with nonzero count, in carrier order.
    pub fn support(&self) -> impl Iterator<Item = (&str, u64)> {
        self.carrier
            .atoms()
            .iter()
            .zip(&self.counts)
            .filter(|(_, &c)| c > 0)
            .map(|(a, &c)| (a.as_str(), c))
    }

    /// Total number of copies across all atoms.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    fn assert_same_carrier(&self, other: &Multiset, op: &str) {
        assert!(
            Arc::ptr_eq(&self.carrier, &other.carrier) || self.carrier == other.carrier,
            "carrier mismatch in {op}",
        );
    }

    /// Pointwise sum. Panics if the carriers differ.
    #[must_use]
    pub fn add(&self, other: &Multiset) -> Multiset {
        self.assert_same_carrier(other, "add");
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a.checked_add(*b).expect("multiset count overflow"))
            .collect();
        Multiset {
            carrier: Arc::clone(&self.carrier),
            counts,
        }
    }

    /// Pointwise difference, or `None` when `other` is not contained in
    /// `self`. Panics if the carriers differ.
    #[must_use]
    pub fn subtract(&self, other: &Multiset) -> Option<Multiset> {
        self.assert_same_carrier(other, "subtract");
        let mut counts = Vec::with_capacity(self.counts.len());
        for (a, b) in self.counts.iter().zip(&other.counts) {
            counts.push(a.checked_sub(*b)?);
        }
        Some(Multiset {
            carrier: Arc::clone(&self.carrier),
            counts,
        })
    }

    /// Pointwise comparison: `self` contained in `other`. Panics if the
    /// carriers differ.
    pub fn leq(&self, other: &Multiset) -> bool {
        self.assert_same_carrier(other, "leq");
        self.counts.iter().zip(&other.counts).all(|(a, b)| a <= b)
    }

    /// All counts multiplied by `k`.
    #[must_use]
    pub fn scale(&self, k: u64) -> Multiset {
        let counts = self
            .counts
            .iter()
            .map(|c| c.checked_mul(k).expect("multiset count overflow"))
            .collect();
        Multiset {
            carrier: Arc::clone(&self.carrier),
            counts,
        }
    }

    /// Pushes the multiset forward along an atom map: the count of a target
    /// atom is the sum over its preimage. This is the action on multisets of
    /// a function between carriers, and it preserves `empty` and `add`.
    ///
    /// Panics if `f` misses an atom of the carrier or maps one outside
    /// `target`.
    #[must_use]
    pub fn map_atoms(&self, f: &BTreeMap<String, String>, target: &Arc<Carrier>) -> Multiset {
        let mut counts = vec![0u64; target.len()];
        for (atom, count) in self.carrier.atoms().iter().zip(&self.counts) {
            let image = f
                .get(atom)
                .unwrap_or_else(|| panic!("atom map is undefined on `{atom}`"));
            let idx = target
                .index_of(image)
                .unwrap_or_else(|| panic!("atom map sends `{atom}` outside the target carrier"));
            counts[idx] = counts[idx]
                .checked_add(*count)
                .expect("multiset count overflow");
        }
        Multiset {
            carrier: Arc::clone(target),
            counts,
        }
    }
}

impl fmt::Display for Multiset {
    /// Arithmetic form: `A + 2*B`, or `0` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (atom, count) in self.support() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if count == 1 {
                write!(f, "{atom}")?;
            } else {
                write!(f, "{count}*{atom}")?;
            }
        }
        Ok(())
    }
}

/// All multisets over `carrier` with total count at most `max_total`, in
/// lexicographic count order. The empty multiset always comes first.
pub fn enumerate_total_at_most(carrier: &Arc<Carrier>, max_total: u64) -> Vec<Multiset> {
    let mut out = Vec::new();
    let mut counts = vec![0u64; carrier.len()];
    enumerate_rec(carrier, &mut counts, 0, max_total, &mut out, true);
    out
}

/// All multisets over `carrier` with every count at most `max_coeff`, in
/// lexicographic count order. There are `(max_coeff + 1)^|carrier|` of them.
pub fn enumerate_coeff_at_most(carrier: &Arc<Carrier>, max_coeff: u64) -> Vec<Multiset> {
    let mut out = Vec::new();
    let mut counts = vec![0u64; carrier.len()];
    enumerate_rec(carrier, &mut counts, 0, max_coeff, &mut out, false);
    out
}

fn enumerate_rec(
    carrier: &Arc<Carrier>,
    counts: &mut Vec<u64>,
    pos: usize,
    budget: u64,
    out: &mut Vec<Multiset>,
    shared_budget: bool,
) {
    if pos == counts.len() {
        out.push(Multiset::from_raw(carrier, counts.clone()));
        return;
    }
    for c in 0..=budget {
        counts[pos] = c;
        let rest = if shared_budget { budget - c } else { budget };
        enumerate_rec(carrier, counts, pos + 1, rest, out, shared_budget);
    }
    counts[pos] = 0;
}
