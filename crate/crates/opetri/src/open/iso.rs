//! Isomorphism search between open nets.
//!
//! [`iso_open`] looks for an invertible square between two open nets: a
//! bijective net morphism together with bijective boundary maps. It is a
//! backtracking search over place pairings, pruned by local invariants, and
//! is meant as a test-side fallback for comparing nets whose construction
//! history is unknown. When the history is known, [`super::canonical_iso`]
//! is exact and cheap; use it instead.

use std::collections::BTreeMap;

use super::{OpenNetMorphism, OpenPetriNet};

/// Outcome of an isomorphism search.
#[derive(Debug, Clone)]
pub enum IsoSearch {
    /// An invertible square from the first net to the second.
    Found(Box<OpenNetMorphism>),
    /// The search space is exhausted; no isomorphism exists.
    NotIsomorphic,
    /// The step budget ran out before the search finished.
    Aborted,
}

impl IsoSearch {
    pub fn found(&self) -> Option<&OpenNetMorphism> {
        match self {
            IsoSearch::Found(m) => Some(m),
            _ => None,
        }
    }
}

/// Local profile of a place: boundary fiber sizes plus the unordered list of
/// per-transition (consumed, produced) counts. Isomorphisms preserve it.
type PlaceSignature = (usize, usize, Vec<(u64, u64)>);

fn place_signature(net: &OpenPetriNet, place: &str) -> PlaceSignature {
    let in_fiber = net
        .input_map()
        .values()
        .filter(|p| p.as_str() == place)
        .count();
    let out_fiber = net
        .output_map()
        .values()
        .filter(|p| p.as_str() == place)
        .count();
    let mut usage: Vec<(u64, u64)> = net
        .net()
        .transitions()
        .map(|(_, s, t)| (s.count(place), t.count(place)))
        .collect();
    usage.sort_unstable();
    (in_fiber, out_fiber, usage)
}

struct Search<'a> {
    a: &'a OpenPetriNet,
    b: &'a OpenPetriNet,
    sig_a: Vec<PlaceSignature>,
    sig_b: Vec<PlaceSignature>,
    steps_left: u64,
}

enum Outcome {
    Found(Box<OpenNetMorphism>),
    Exhausted,
    OutOfBudget,
}

impl Search<'_> {
    /// Extends the partial place bijection at position `depth`.
    fn assign(&mut self, depth: usize, chosen: &mut Vec<usize>, used: &mut Vec<bool>) -> Outcome {
        let places_a = self.a.net().places().atoms();
        if depth == places_a.len() {
            return match self.finish(chosen) {
                Some(m) => Outcome::Found(Box::new(m)),
                None => Outcome::Exhausted,
            };
        }
        for candidate in 0..used.len() {
            if used[candidate] || self.sig_a[depth] != self.sig_b[candidate] {
                continue;
            }
            if self.steps_left == 0 {
                return Outcome::OutOfBudget;
            }
            self.steps_left -= 1;
            chosen.push(candidate);
            used[candidate] = true;
            match self.assign(depth + 1, chosen, used) {
                Outcome::Exhausted => {}
                other => return other,
            }
            used[candidate] = false;
            chosen.pop();
        }
        Outcome::Exhausted
    }

    /// Given a full place bijection, tries to extend it to transitions and
    /// boundaries; every remaining choice is forced up to interchangeable
    /// elements, which are matched in sorted order.
    fn finish(&self, chosen: &[usize]) -> Option<OpenNetMorphism> {
        let places_b = self.b.net().places().atoms();
        let place_map: BTreeMap<String, String> = self
            .a
            .net()
            .places()
            .atoms()
            .iter()
            .zip(chosen)
            .map(|(p, &c)| (p.clone(), places_b[c].clone()))
            .collect();
        // transitions with equal mapped arities are interchangeable
        let mut wanted: BTreeMap<(String, String), Vec<&str>> = BTreeMap::new();
        for (name, s, t) in self.a.net().transitions() {
            let key = (
                s.map_atoms(&place_map, self.b.net().places()).to_string(),
                t.map_atoms(&place_map, self.b.net().places()).to_string(),
            );
            wanted.entry(key).or_default().push(name);
        }
        let mut offered: BTreeMap<(String, String), Vec<&str>> = BTreeMap::new();
        for (name, s, t) in self.b.net().transitions() {
            offered
                .entry((s.to_string(), t.to_string()))
                .or_default()
                .push(name);
        }
        let mut transition_map = BTreeMap::new();
        for (key, names) in &wanted {
            let partners = offered.get(key)?;
            if partners.len() != names.len() {
                return None;
            }
            for (n, p) in names.iter().zip(partners) {
                transition_map.insert((*n).to_owned(), (*p).to_owned());
            }
        }
        let input_map = match_boundary(self.a.input_map(), self.b.input_map(), &place_map)?;
        let output_map = match_boundary(self.a.output_map(), self.b.output_map(), &place_map)?;
        let net_morphism = crate::petri::PetriMorphism::new(
            self.a.net().clone(),
            self.b.net().clone(),
            transition_map,
            place_map,
        )
        .ok()?;
        OpenNetMorphism::new(
            self.a.clone(),
            self.b.clone(),
            input_map,
            output_map,
            net_morphism,
        )
        .ok()
        .filter(|m| m.inverse().is_some())
    }
}

/// Matches boundary points fiberwise over the place bijection: points
/// assigned to a place must go to points assigned to its image, and fibers
/// pair up in sorted order.
fn match_boundary(
    side_a: &BTreeMap<String, String>,
    side_b: &BTreeMap<String, String>,
    place_map: &BTreeMap<String, String>,
) -> Option<BTreeMap<String, String>> {
    let mut fibers_b: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (point, place) in side_b {
        fibers_b.entry(place).or_default().push(point);
    }
    let mut fibers_a: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (point, place) in side_a {
        fibers_a.entry(&place_map[place]).or_default().push(point);
    }
    let mut out = BTreeMap::new();
    for (place, points) in &fibers_a {
        let partners = fibers_b.get(place)?;
        if partners.len() != points.len() {
            return None;
        }
        for (a, b) in points.iter().zip(partners) {
            out.insert((*a).to_owned(), (*b).to_owned());
        }
    }
    if out.len() != side_a.len() || side_a.len() != side_b.len() {
        return None;
    }
    Some(out)
}

/// Searches for an isomorphism from `a` to `b`, spending at most
/// `max_steps` place-pairing attempts before giving up.
pub fn iso_open(a: &OpenPetriNet, b: &OpenPetriNet, max_steps: u64) -> IsoSearch {
    if a.net().places().len() != b.net().places().len()
        || a.net().transition_count() != b.net().transition_count()
        || a.inputs().count() != b.inputs().count()
        || a.outputs().count() != b.outputs().count()
    {
        return IsoSearch::NotIsomorphic;
    }
    let sig_a: Vec<_> = a
        .net()
        .places()
        .atoms()
        .iter()
        .map(|p| place_signature(a, p))
        .collect();
    let sig_b: Vec<_> = b
        .net()
        .places()
        .atoms()
        .iter()
        .map(|p| place_signature(b, p))
        .collect();
    let mut sorted_a = sig_a.clone();
    let mut sorted_b = sig_b.clone();
    sorted_a.sort();
    sorted_b.sort();
    if sorted_a != sorted_b {
        return IsoSearch::NotIsomorphic;
    }
    let total = b.net().places().len();
    let mut search = Search {
        a,
        b,
        sig_a,
        sig_b,
        steps_left: max_steps,
    };
    match search.assign(0, &mut Vec::new(), &mut vec![false; total]) {
        Outcome::Found(m) => IsoSearch::Found(m),
        Outcome::Exhausted => IsoSearch::NotIsomorphic,
        Outcome::OutOfBudget => IsoSearch::Aborted,
    }
}
