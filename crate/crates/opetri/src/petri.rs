//! Petri nets, net morphisms, and their colimits.
//!
//! A [`PetriNet`] is a finite set of places, a finite set of transitions,
//! and for every transition a source and a target multiset over the places.
//! A [`PetriMorphism`] maps transitions to transitions and places to places
//! so that sources and targets are preserved: the image of a transition must
//! consume and produce exactly the pushed-forward multisets.
//!
//! Nets are combined by [`coproduct`] (disjoint union) and [`pushout`]
//! (disjoint union followed by gluing along a shared subnet). Both operations
//! rename the combined atoms canonically: each quotient class is named after
//! its lexicographically least member, with `#2`, `#3`, ... suffixes breaking
//! collisions between distinct classes. The renaming is deterministic, so
//! equal inputs always produce byte-identical results.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::multiset::{Carrier, Multiset, MultisetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PetriError {
    #[error("duplicate transition `{name}`")]
    DuplicateTransition { name: String },
    #[error("transition `{transition}` has an arity over the wrong carrier")]
    ForeignArity { transition: String },
    #[error(transparent)]
    UnknownAtom(#[from] MultisetError),
    #[error("{kind} map is undefined on `{name}`")]
    MapNotTotal { kind: &'static str, name: String },
    #[error("{kind} map sends `{name}` to `{image}`, which the codomain lacks")]
    MapOutsideCodomain {
        kind: &'static str,
        name: String,
        image: String,
    },
    #[error("morphism breaks the {side} square at transition `{transition}`")]
    SquareViolation {
        side: &'static str,
        transition: String,
    },
    #[error("morphisms do not compose: first codomain differs from second domain")]
    ComposeMismatch,
    #[error("pushout legs have different domains")]
    LegDomainMismatch,
    #[error("cocone maps must share their codomain and start from the glued parts")]
    CoconeDomainMismatch,
    #[error("cocone maps disagree on the shared subnet at {kind} `{name}`")]
    CoconeMismatch { kind: &'static str, name: String },
}

/// A Petri net: places, transitions, and per-transition source and target
/// multisets over the places.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    places: Arc<Carrier>,
    transitions: Vec<String>,
    source: Vec<Multiset>,
    target: Vec<Multiset>,
}

impl PetriNet {
    /// Convenience constructor from string data; mostly useful in tests and
    /// parsers. Transition arities are `(place, count)` lists.
    #[allow(clippy::type_complexity)]
    pub fn new(
        places: &[&str],
        transitions: &[(&str, &[(&str, u64)], &[(&str, u64)])],
    ) -> Result<PetriNet, PetriError> {
        let carrier = Carrier::new(places.iter().copied());
        let mut map = BTreeMap::new();
        for (name, source, target) in transitions {
            let source = Multiset::from_pairs(&carrier, source.iter().copied())?;
            let target = Multiset::from_pairs(&carrier, target.iter().copied())?;
            if map.insert((*name).to_owned(), (source, target)).is_some() {
                return Err(PetriError::DuplicateTransition {
                    name: (*name).to_owned(),
                });
            }
        }
        PetriNet::from_parts(carrier, map)
    }

    /// Builds a net from a place carrier and a transition table.
    pub fn from_parts(
        places: Arc<Carrier>,
        transitions: BTreeMap<String, (Multiset, Multiset)>,
    ) -> Result<PetriNet, PetriError> {
        let mut names = Vec::with_capacity(transitions.len());
        let mut source = Vec::with_capacity(transitions.len());
        let mut target = Vec::with_capacity(transitions.len());
        for (name, (s, t)) in transitions {
            if s.carrier() != &places || t.carrier() != &places {
                return Err(PetriError::ForeignArity { transition: name });
            }
            names.push(name);
            source.push(s);
            target.push(t);
        }
        Ok(PetriNet {
            places,
            transitions: names,
            source,
            target,
        })
    }

    /// The net with the given places and no transitions.
    pub fn discrete<I, S>(places: I) -> PetriNet
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        PetriNet {
            places: Carrier::new(places),
            transitions: Vec::new(),
            source: Vec::new(),
            target: Vec::new(),
        }
    }

    pub fn places(&self) -> &Arc<Carrier> {
        &self.places
    }

    pub fn transition_names(&self) -> &[String] {
        &self.transitions
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn has_transition(&self, name: &str) -> bool {
        self.transition_index(name).is_some()
    }

    fn transition_index(&self, name: &str) -> Option<usize> {
        self.transitions
            .binary_search_by(|t| t.as_str().cmp(name))
            .ok()
    }

    /// Source multiset of a transition, which must exist.
    pub fn source(&self, transition: &str) -> &Multiset {
        let idx = self
            .transition_index(transition)
            .unwrap_or_else(|| panic!("no transition `{transition}`"));
        &self.source[idx]
    }

    /// Target multiset of a transition, which must exist.
    pub fn target(&self, transition: &str) -> &Multiset {
        let idx = self
            .transition_index(transition)
            .unwrap_or_else(|| panic!("no transition `{transition}`"));
        &self.target[idx]
    }

    /// Iterates `(name, source, target)` in name order.
    pub fn transitions(&self) -> impl Iterator<Item = (&str, &Multiset, &Multiset)> {
        self.transitions
            .iter()
            .zip(self.source.iter().zip(&self.target))
            .map(|(n, (s, t))| (n.as_str(), s, t))
    }
}

/// A morphism of Petri nets: a transition map and a place map under which
/// sources and targets are preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriMorphism {
    dom: PetriNet,
    cod: PetriNet,
    transition_map: BTreeMap<String, String>,
    place_map: BTreeMap<String, String>,
}

fn check_total(
    kind: &'static str,
    names: &[String],
    map: &BTreeMap<String, String>,
    cod_has: impl Fn(&str) -> bool,
) -> Result<(), PetriError> {
    for name in names {
        match map.get(name) {
            None => {
                return Err(PetriError::MapNotTotal {
                    kind,
                    name: name.clone(),
                })
            }
            Some(image) if !cod_has(image) => {
                return Err(PetriError::MapOutsideCodomain {
                    kind,
                    name: name.clone(),
                    image: image.clone(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

impl PetriMorphism {
    /// Validates totality of both maps and the source/target squares before
    /// accepting the morphism.
    pub fn new(
        dom: PetriNet,
        cod: PetriNet,
        transition_map: BTreeMap<String, String>,
        place_map: BTreeMap<String, String>,
    ) -> Result<PetriMorphism, PetriError> {
        check_total("transition", &dom.transitions, &transition_map, |t| {
            cod.has_transition(t)
        })?;
        check_total("place", dom.places.atoms(), &place_map, |p| {
            cod.places.contains(p)
        })?;
        for (name, s, t) in dom.transitions() {
            let image = &transition_map[name];
            if cod.source(image) != &s.map_atoms(&place_map, &cod.places) {
                return Err(PetriError::SquareViolation {
                    side: "source",
                    transition: name.to_owned(),
                });
            }
            if cod.target(image) != &t.map_atoms(&place_map, &cod.places) {
                return Err(PetriError::SquareViolation {
                    side: "target",
                    transition: name.to_owned(),
                });
            }
        }
        Ok(PetriMorphism {
            dom,
            cod,
            transition_map,
            place_map,
        })
    }

    /// Convenience constructor from string pairs.
    pub fn from_pairs(
        dom: &PetriNet,
        cod: &PetriNet,
        transitions: &[(&str, &str)],
        places: &[(&str, &str)],
    ) -> Result<PetriMorphism, PetriError> {
        let tmap = transitions
            .iter()
            .map(|(a, b)| ((*a).to_owned(), (*b).to_owned()))
            .collect();
        let pmap = places
            .iter()
            .map(|(a, b)| ((*a).to_owned(), (*b).to_owned()))
            .collect();
        PetriMorphism::new(dom.clone(), cod.clone(), tmap, pmap)
    }

    pub fn identity(net: &PetriNet) -> PetriMorphism {
        let transition_map = net
            .transitions
            .iter()
            .map(|t| (t.clone(), t.clone()))
            .collect();
        let place_map = net
            .places
            .atoms()
            .iter()
            .map(|p| (p.clone(), p.clone()))
            .collect();
        PetriMorphism {
            dom: net.clone(),
            cod: net.clone(),
            transition_map,
            place_map,
        }
    }

    pub fn dom(&self) -> &PetriNet {
        &self.dom
    }

    pub fn cod(&self) -> &PetriNet {
        &self.cod
    }

    pub fn transition_map(&self) -> &BTreeMap<String, String> {
        &self.transition_map
    }

    pub fn place_map(&self) -> &BTreeMap<String, String> {
        &self.place_map
    }

    pub fn transition_image(&self, transition: &str) -> &str {
        &self.transition_map[transition]
    }

    pub fn place_image(&self, place: &str) -> &str {
        &self.place_map[place]
    }

    /// Pushes a marking of the domain forward along the place map.
    pub fn map_marking(&self, marking: &Multiset) -> Multiset {
        marking.map_atoms(&self.place_map, &self.cod.places)
    }

    /// Diagram-order composition: `self` followed by `next`.
    pub fn then(&self, next: &PetriMorphism) -> Result<PetriMorphism, PetriError> {
        if self.cod != next.dom {
            return Err(PetriError::ComposeMismatch);
        }
        let transition_map = self
            .transition_map
            .iter()
            .map(|(a, b)| (a.clone(), next.transition_map[b].clone()))
            .collect();
        let place_map = self
            .place_map
            .iter()
            .map(|(a, b)| (a.clone(), next.place_map[b].clone()))
            .collect();
        // the squares of the two factors paste, but revalidate anyway
        PetriMorphism::new(
            self.dom.clone(),
            next.cod.clone(),
            transition_map,
            place_map,
        )
    }

    /// True when both maps are bijections onto the codomain.
    pub fn is_bijective(&self) -> bool {
        let distinct_t: std::collections::BTreeSet<_> = self.transition_map.values().collect();
        let distinct_p: std::collections::BTreeSet<_> = self.place_map.values().collect();
        distinct_t.len() == self.cod.transitions.len()
            && self.transition_map.len() == self.cod.transitions.len()
            && distinct_p.len() == self.cod.places.len()
            && self.place_map.len() == self.cod.places.len()
    }

    /// The inverse morphism, when both maps are bijective.
    pub fn inverse(&self) -> Option<PetriMorphism> {
        if !self.is_bijective() {
            return None;
        }
        let transition_map = self
            .transition_map
            .iter()
            .map(|(a, b)| (b.clone(), a.clone()))
            .collect();
        let place_map = self
            .place_map
            .iter()
            .map(|(a, b)| (b.clone(), a.clone()))
            .collect();
        PetriMorphism::new(
            self.cod.clone(),
            self.dom.clone(),
            transition_map,
            place_map,
        )
        .ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Side {
    Left,
    Right,
}

/// A name tagged with which operand of a union it came from.
type Tagged = (Side, String);

/// Canonical renaming of a disjoint union of two name lists, quotiented by
/// the given left/right identifications.
struct TaggedQuotient {
    /// canonical name of every quotient class
    names: Vec<String>,
    left_map: BTreeMap<String, String>,
    right_map: BTreeMap<String, String>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let ra = find(parent, a);
    let rb = find(parent, b);
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

fn tagged_quotient(
    left: &[String],
    right: &[String],
    identified: &[(String, String)],
) -> TaggedQuotient {
    let index_of = |names: &[String], name: &str| -> usize {
        names
            .iter()
            .position(|n| n == name)
            .unwrap_or_else(|| panic!("identification names unknown atom `{name}`"))
    };
    let mut parent: Vec<usize> = (0..left.len() + right.len()).collect();
    for (l, r) in identified {
        let li = index_of(left, l);
        let ri = left.len() + index_of(right, r);
        union(&mut parent, li, ri);
    }
    // collect the classes as lists of tagged members
    let mut classes: BTreeMap<usize, Vec<(Side, &str)>> = BTreeMap::new();
    for (i, name) in left.iter().enumerate() {
        classes
            .entry(find(&mut parent, i))
            .or_default()
            .push((Side::Left, name));
    }
    for (i, name) in right.iter().enumerate() {
        classes
            .entry(find(&mut parent, left.len() + i))
            .or_default()
            .push((Side::Right, name));
    }
    // each class is named after its lexicographically least member; classes
    // are processed in a fixed order so suffix assignment is deterministic
    let mut ordered: Vec<(String, Tagged, Vec<Tagged>)> = classes
        .into_values()
        .map(|members| {
            let members: Vec<Tagged> = members
                .into_iter()
                .map(|(s, n)| (s, n.to_owned()))
                .collect();
            let base = members.iter().map(|(_, n)| n.clone()).min().unwrap();
            let first = members.iter().min().cloned().unwrap();
            (base, first, members)
        })
        .collect();
    ordered.sort();
    let mut taken = std::collections::BTreeSet::new();
    let mut names = Vec::new();
    let mut left_map = BTreeMap::new();
    let mut right_map = BTreeMap::new();
    for (base, _, members) in ordered {
        let mut candidate = base.clone();
        let mut k = 1u64;
        while taken.contains(&candidate) {
            k += 1;
            candidate = format!("{base}#{k}");
        }
        taken.insert(candidate.clone());
        for (side, member) in members {
            match side {
                Side::Left => left_map.insert(member, candidate.clone()),
                Side::Right => right_map.insert(member, candidate.clone()),
            };
        }
        names.push(candidate);
    }
    TaggedQuotient {
        names,
        left_map,
        right_map,
    }
}

/// Canonical disjoint union of two name lists, renamed by the same scheme as
/// net gluing: left names win, colliding right names pick up suffixes.
/// Returns the union plus the per-side injections.
pub(crate) fn tagged_set_union(
    left: &[String],
    right: &[String],
) -> (
    Vec<String>,
    BTreeMap<String, String>,
    BTreeMap<String, String>,
) {
    let q = tagged_quotient(left, right, &[]);
    (q.names, q.left_map, q.right_map)
}

/// A disjoint union of two nets together with its injections.
#[derive(Debug, Clone)]
pub struct Coproduct {
    pub net: PetriNet,
    pub left: PetriMorphism,
    pub right: PetriMorphism,
}

/// Glues two nets along the quotients described by `place_q`/`trans_q`.
fn glue(
    a: &PetriNet,
    b: &PetriNet,
    place_q: &TaggedQuotient,
    trans_q: &TaggedQuotient,
) -> (PetriNet, PetriMorphism, PetriMorphism) {
    let places = Carrier::new(place_q.names.iter().cloned());
    let mut table: BTreeMap<String, (Multiset, Multiset)> = BTreeMap::new();
    for (name, s, t) in a.transitions() {
        let glued = (
            s.map_atoms(&place_q.left_map, &places),
            t.map_atoms(&place_q.left_map, &places),
        );
        table.insert(trans_q.left_map[name].clone(), glued);
    }
    for (name, s, t) in b.transitions() {
        let glued = (
            s.map_atoms(&place_q.right_map, &places),
            t.map_atoms(&place_q.right_map, &places),
        );
        match table.entry(trans_q.right_map[name].clone()) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(glued);
            }
            std::collections::btree_map::Entry::Occupied(e) => {
                // transitions merged by the gluing must already agree
                assert_eq!(e.get(), &glued, "glued transitions have unequal arities");
            }
        }
    }
    let net = PetriNet::from_parts(places, table).expect("glued net is well formed");
    let left = PetriMorphism::new(
        a.clone(),
        net.clone(),
        trans_q.left_map.clone(),
        place_q.left_map.clone(),
    )
    .expect("left injection is a morphism");
    let right = PetriMorphism::new(
        b.clone(),
        net.clone(),
        trans_q.right_map.clone(),
        place_q.right_map.clone(),
    )
    .expect("right injection is a morphism");
    (net, left, right)
}

/// Disjoint union of two nets. Atoms keep their names where possible; a name
/// occurring on both sides keeps the left copy and suffixes the right one.
pub fn coproduct(a: &PetriNet, b: &PetriNet) -> Coproduct {
    let place_q = tagged_quotient(a.places().atoms(), b.places().atoms(), &[]);
    let trans_q = tagged_quotient(a.transition_names(), b.transition_names(), &[]);
    let (net, left, right) = glue(a, b, &place_q, &trans_q);
    Coproduct { net, left, right }
}

/// A gluing of two nets along a shared subnet, with its injections and the
/// legs it was built from.
#[derive(Debug, Clone)]
pub struct Pushout {
    pub net: PetriNet,
    /// injection of the left leg's codomain
    pub left: PetriMorphism,
    /// injection of the right leg's codomain
    pub right: PetriMorphism,
    leg_left: PetriMorphism,
    leg_right: PetriMorphism,
}

/// Glues the codomains of two legs out of a common net: the disjoint union
/// quotiented by identifying the two images of every shared place and
/// transition.
pub fn pushout(leg_left: &PetriMorphism, leg_right: &PetriMorphism) -> Result<Pushout, PetriError> {
    if leg_left.dom() != leg_right.dom() {
        return Err(PetriError::LegDomainMismatch);
    }
    let shared = leg_left.dom();
    let a = leg_left.cod();
    let b = leg_right.cod();
    let place_pairs: Vec<(String, String)> = shared
        .places()
        .atoms()
        .iter()
        .map(|p| {
            (
                leg_left.place_image(p).to_owned(),
                leg_right.place_image(p).to_owned(),
            )
        })
        .collect();
    let trans_pairs: Vec<(String, String)> = shared
        .transition_names()
        .iter()
        .map(|t| {
            (
                leg_left.transition_image(t).to_owned(),
                leg_right.transition_image(t).to_owned(),
            )
        })
        .collect();
    let place_q = tagged_quotient(a.places().atoms(), b.places().atoms(), &place_pairs);
    let trans_q = tagged_quotient(a.transition_names(), b.transition_names(), &trans_pairs);
    let (net, left, right) = glue(a, b, &place_q, &trans_q);
    Ok(Pushout {
        net,
        left,
        right,
        leg_left: leg_left.clone(),
        leg_right: leg_right.clone(),
    })
}

impl Pushout {
    /// The mediating morphism out of the gluing: given a competing cocone
    /// (`from_left`, `from_right`) over the same legs, returns the unique
    /// morphism through which both injections factor.
    pub fn factor(
        &self,
        from_left: &PetriMorphism,
        from_right: &PetriMorphism,
    ) -> Result<PetriMorphism, PetriError> {
        if from_left.dom() != self.leg_left.cod()
            || from_right.dom() != self.leg_right.cod()
            || from_left.cod() != from_right.cod()
        {
            return Err(PetriError::CoconeDomainMismatch);
        }
        let shared = self.leg_left.dom();
        for p in shared.places().atoms() {
            if from_left.place_image(self.leg_left.place_image(p))
                != from_right.place_image(self.leg_right.place_image(p))
            {
                return Err(PetriError::CoconeMismatch {
                    kind: "place",
                    name: p.clone(),
                });
            }
        }
        for t in shared.transition_names() {
            if from_left.transition_image(self.leg_left.transition_image(t))
                != from_right.transition_image(self.leg_right.transition_image(t))
            {
                return Err(PetriError::CoconeMismatch {
                    kind: "transition",
                    name: t.clone(),
                });
            }
        }
        // the injections cover the gluing, so the mediating images are forced
        let mut place_map: BTreeMap<String, String> = BTreeMap::new();
        for (p, image) in self.left.place_map() {
            place_map.insert(image.clone(), from_left.place_image(p).to_owned());
        }
        for (p, image) in self.right.place_map() {
            let expected = from_right.place_image(p).to_owned();
            if let Some(prev) = place_map.insert(image.clone(), expected.clone()) {
                assert_eq!(prev, expected, "cocone is incoherent on glued places");
            }
        }
        let mut transition_map: BTreeMap<String, String> = BTreeMap::new();
        for (t, image) in self.left.transition_map() {
            transition_map.insert(image.clone(), from_left.transition_image(t).to_owned());
        }
        for (t, image) in self.right.transition_map() {
            let expected = from_right.transition_image(t).to_owned();
            if let Some(prev) = transition_map.insert(image.clone(), expected.clone()) {
                assert_eq!(prev, expected, "cocone is incoherent on glued transitions");
            }
        }
        PetriMorphism::new(
            self.net.clone(),
            from_left.cod().clone(),
            transition_map,
            place_map,
        )
    }
}
