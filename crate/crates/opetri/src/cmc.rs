//! Token-flow processes of a net.
//!
//! A [`Process`] is a run of the net presented sequentially: a start marking
//! and a list of firing events, each recording the transition fired and the
//! multiset of spectator tokens that sat idle during that step. Processes
//! compose by concatenation and combine in parallel by interleaving one
//! block after the other with enlarged contexts.
//!
//! Two presentations describe the same behaviour when they differ only in
//! the order of independent steps. [`process_equiv`] decides this (within a
//! state budget) by closing under adjacent swaps: step `k+1` may move before
//! step `k` exactly when its needs are covered by step `k`'s spectators.
//! Under that quotient, parallel composition is commutative and composition
//! and parallelism satisfy the interchange law, so processes form a
//! commutative monoidal structure on markings.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::multiset::{Carrier, Multiset};
use crate::petri::{PetriMorphism, PetriNet};
use crate::reach::{decide_backward, ExplorationCaps, Reachable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CmcError {
    #[error("no transition `{transition}` in the net")]
    UnknownTransition { transition: String },
    #[error("event {position} does not start at the marking the previous step left")]
    BrokenChain { position: usize },
    #[error("processes do not compose: first ends where the second does not begin")]
    EndpointMismatch,
}

/// One step of a process: a transition together with the tokens that were
/// present but not consumed by it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiringEvent {
    transition: String,
    context: Multiset,
}

impl FiringEvent {
    pub fn transition(&self) -> &str {
        &self.transition
    }

    pub fn context(&self) -> &Multiset {
        &self.context
    }
}

/// A sequential run of a net from one marking to another.
///
/// The marking before event `k` is `source(t_k) + context_k` and the marking
/// after it is `target(t_k) + context_k`; consecutive events agree on the
/// marking between them. Given the start marking and the transition
/// sequence, the contexts are forced, so a process is really a start marking
/// plus an order of firings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    net: PetriNet,
    dom: Multiset,
    cod: Multiset,
    events: Vec<FiringEvent>,
}

impl Process {
    /// The do-nothing process at a marking.
    pub fn identity(net: &PetriNet, marking: &Multiset) -> Process {
        assert!(
            marking.carrier() == net.places(),
            "marking carrier differs from the net's places"
        );
        Process {
            net: net.clone(),
            dom: marking.clone(),
            cod: marking.clone(),
            events: Vec::new(),
        }
    }

    /// Builds a process from explicit events, checking the chain condition.
    pub fn from_events<S>(
        net: &PetriNet,
        dom: Multiset,
        events: impl IntoIterator<Item = (S, Multiset)>,
    ) -> Result<Process, CmcError>
    where
        S: Into<String>,
    {
        assert!(
            dom.carrier() == net.places(),
            "marking carrier differs from the net's places"
        );
        let mut running = dom.clone();
        let mut checked = Vec::new();
        for (position, (transition, context)) in events.into_iter().enumerate() {
            let transition = transition.into();
            if !net.has_transition(&transition) {
                return Err(CmcError::UnknownTransition { transition });
            }
            if net.source(&transition).add(&context) != running {
                return Err(CmcError::BrokenChain { position });
            }
            running = net.target(&transition).add(&context);
            checked.push(FiringEvent {
                transition,
                context,
            });
        }
        Ok(Process {
            net: net.clone(),
            dom,
            cod: running,
            events: checked,
        })
    }

    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    pub fn dom(&self) -> &Multiset {
        &self.dom
    }

    pub fn cod(&self) -> &Multiset {
        &self.cod
    }

    pub fn events(&self) -> &[FiringEvent] {
        &self.events
    }

    /// The markings the process passes through: the start marking, then one
    /// marking per event.
    pub fn trajectory(&self) -> Vec<Multiset> {
        let mut markings = vec![self.dom.clone()];
        for event in &self.events {
            markings.push(self.net.target(&event.transition).add(&event.context));
        }
        markings
    }

    /// Extends the run by firing one more transition, if it is enabled at
    /// the end marking. The transition must exist.
    pub fn then_fire(&self, transition: &str) -> Option<Process> {
        let context = self.cod.subtract(self.net.source(transition))?;
        let mut extended = self.clone();
        extended.cod = self.net.target(transition).add(&context);
        extended.events.push(FiringEvent {
            transition: transition.to_owned(),
            context,
        });
        Some(extended)
    }

    /// Runs `self` and then `next`, which must start where `self` ends.
    /// Concatenation is strictly associative and the identity processes are
    /// strict units.
    pub fn compose(&self, next: &Process) -> Result<Process, CmcError> {
        assert!(self.net == next.net, "processes live over different nets");
        if self.cod != next.dom {
            return Err(CmcError::EndpointMismatch);
        }
        let mut events = self.events.clone();
        events.extend(next.events.iter().cloned());
        Ok(Process {
            net: self.net.clone(),
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            events,
        })
    }

    /// Runs `self` and `other` side by side, serialized as all of `self`'s
    /// steps (with `other`'s untouched start marking as extra spectators)
    /// followed by all of `other`'s steps (with `self`'s end marking as
    /// extra spectators). Up to [`process_equiv`] the order of the blocks
    /// does not matter.
    pub fn tensor(&self, other: &Process) -> Process {
        assert!(self.net == other.net, "processes live over different nets");
        let mut events = Vec::with_capacity(self.events.len() + other.events.len());
        for event in &self.events {
            events.push(FiringEvent {
                transition: event.transition.clone(),
                context: event.context.add(&other.dom),
            });
        }
        for event in &other.events {
            events.push(FiringEvent {
                transition: event.transition.clone(),
                context: event.context.add(&self.cod),
            });
        }
        Process {
            net: self.net.clone(),
            dom: self.dom.add(&other.dom),
            cod: self.cod.add(&other.cod),
            events,
        }
    }

    /// Transports the process along a net morphism: transitions map by the
    /// transition map and all markings by the place map. The commuting
    /// squares of the morphism keep the chain intact, and mapping preserves
    /// composition and parallelism.
    pub fn map_along(&self, morphism: &PetriMorphism) -> Process {
        assert!(
            morphism.dom() == &self.net,
            "morphism does not start at the process's net"
        );
        let events = self
            .events
            .iter()
            .map(|event| FiringEvent {
                transition: morphism.transition_image(&event.transition).to_owned(),
                context: morphism.map_marking(&event.context),
            })
            .collect();
        Process {
            net: morphism.cod().clone(),
            dom: morphism.map_marking(&self.dom),
            cod: morphism.map_marking(&self.cod),
            events,
        }
    }
}

/// The objects acted on by a net's processes: markings over this carrier.
pub fn objects_of(net: &PetriNet) -> Arc<Carrier> {
    Arc::clone(net.places())
}

/// Answer of a bounded equivalence search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivAnswer {
    Equivalent,
    Inequivalent,
    /// the swap closure was cut by the state budget before deciding
    Unknown,
}

/// Swaps events `k` and `k+1` if the later one is independent of the
/// earlier: its source must be covered by the earlier event's context. The
/// endpoints and the intermediate chain stay valid, only the marking between
/// the two events changes.
fn swap_at(net: &PetriNet, events: &[FiringEvent], k: usize) -> Option<Vec<FiringEvent>> {
    let first = &events[k];
    let second = &events[k + 1];
    let leftover = first.context.subtract(net.source(&second.transition))?;
    let mut swapped = events.to_vec();
    swapped[k] = FiringEvent {
        transition: second.transition.clone(),
        context: leftover.add(net.source(&first.transition)),
    };
    swapped[k + 1] = FiringEvent {
        transition: first.transition.clone(),
        context: leftover.add(net.target(&second.transition)),
    };
    Some(swapped)
}

/// Decides whether two processes over the same net differ only by
/// reordering independent steps, exploring at most `max_states` event lists.
///
/// Swapping is symmetric, so the search from one side covers the whole
/// orbit. Differing endpoints or differing multisets of fired transitions
/// settle the question immediately.
pub fn process_equiv(p: &Process, q: &Process, max_states: usize) -> EquivAnswer {
    assert!(p.net == q.net, "processes live over different nets");
    if p.dom != q.dom || p.cod != q.cod {
        return EquivAnswer::Inequivalent;
    }
    let multiset = |events: &[FiringEvent]| {
        let mut names: Vec<&str> = events.iter().map(|e| e.transition.as_str()).collect();
        names.sort_unstable();
        names.iter().map(|n| (*n).to_owned()).collect::<Vec<_>>()
    };
    if multiset(&p.events) != multiset(&q.events) {
        return EquivAnswer::Inequivalent;
    }
    if p.events == q.events {
        return EquivAnswer::Equivalent;
    }
    let mut visited: HashSet<Vec<FiringEvent>> = HashSet::new();
    visited.insert(p.events.clone());
    let mut queue = VecDeque::new();
    queue.push_back(p.events.clone());
    let mut truncated = false;
    while let Some(events) = queue.pop_front() {
        for k in 0..events.len().saturating_sub(1) {
            let Some(swapped) = swap_at(&p.net, &events, k) else {
                continue;
            };
            if swapped == q.events {
                return EquivAnswer::Equivalent;
            }
            if visited.contains(&swapped) {
                continue;
            }
            if visited.len() >= max_states {
                truncated = true;
                continue;
            }
            visited.insert(swapped.clone());
            queue.push_back(swapped);
        }
    }
    if truncated {
        EquivAnswer::Unknown
    } else {
        EquivAnswer::Inequivalent
    }
}

/// All processes from `dom` to `cod` with at most `max_events` steps, one
/// representative per equivalence class.
///
/// Candidates are generated exhaustively, ordered by event count and then
/// by the event lists themselves, and deduplicated with [`process_equiv`]
/// under the given state budget (a search that comes back undecided keeps
/// both candidates). The representative of each class is its least
/// presentation in that order.
pub fn enumerate_hom(
    net: &PetriNet,
    dom: &Multiset,
    cod: &Multiset,
    max_events: usize,
    swap_budget: usize,
) -> Vec<Process> {
    let mut candidates = Vec::new();
    let mut stack = vec![Process::identity(net, dom)];
    while let Some(current) = stack.pop() {
        if current.cod() == cod {
            candidates.push(current.clone());
        }
        if current.events.len() < max_events {
            for name in net.transition_names() {
                if let Some(extended) = current.then_fire(name) {
                    stack.push(extended);
                }
            }
        }
    }
    candidates.sort_by(|a, b| (a.events.len(), &a.events).cmp(&(b.events.len(), &b.events)));
    let mut representatives: Vec<Process> = Vec::new();
    for candidate in candidates {
        let seen = representatives
            .iter()
            .any(|rep| process_equiv(rep, &candidate, swap_budget) == EquivAnswer::Equivalent);
        if !seen {
            representatives.push(candidate);
        }
    }
    representatives
}

/// Answer of a bounded search for a process between two markings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomAnswer {
    /// A witnessing process of minimal length among those within the caps.
    Yes(Box<Process>),
    /// No process exists: a search closed without hitting any cap.
    No,
    /// Every search was cut by a cap before deciding.
    Unknown,
}

/// Searches for a process from `dom` to `cod`, growing runs step by step
/// within the caps: `max_tokens` bounds every visited marking, `max_depth`
/// bounds the number of events, and `max_states` bounds the distinct
/// markings stored. When the forward search is cut without finding `cod`,
/// the same question is retried backward from `cod` over the reversed net,
/// which often closes exactly when the forward run cannot.
pub fn hom_non_empty(
    net: &PetriNet,
    dom: &Multiset,
    cod: &Multiset,
    caps: &ExplorationCaps,
) -> HomAnswer {
    assert!(
        dom.carrier() == net.places() && cod.carrier() == net.places(),
        "marking carrier differs from the net's places"
    );
    if dom == cod {
        return HomAnswer::Yes(Box::new(Process::identity(net, dom)));
    }
    let mut parents: HashMap<Multiset, (Multiset, String)> = HashMap::new();
    let mut queue = VecDeque::new();
    queue.push_back((dom.clone(), 0u32));
    let mut stored = 1usize; // the start marking
    let mut truncated = false;
    let mut found = false;
    'outer: while let Some((marking, depth)) = queue.pop_front() {
        for (name, source, target) in net.transitions() {
            let Some(context) = marking.subtract(source) else {
                continue;
            };
            let next = target.add(&context);
            if next == *dom || parents.contains_key(&next) {
                continue;
            }
            if next.total() > caps.max_tokens() {
                truncated = true;
                continue;
            }
            if depth == caps.max_depth() {
                truncated = true;
                continue;
            }
            if stored >= caps.max_states() {
                truncated = true;
                break 'outer;
            }
            parents.insert(next.clone(), (marking.clone(), name.to_owned()));
            stored += 1;
            if next == *cod {
                found = true;
                break 'outer;
            }
            queue.push_back((next, depth + 1));
        }
    }
    if !found {
        if !truncated {
            return HomAnswer::No;
        }
        return match decide_backward(net, dom, cod, caps) {
            Reachable::Yes(names) => HomAnswer::Yes(Box::new(replay(net, dom, &names))),
            Reachable::No => HomAnswer::No,
            Reachable::Unknown => HomAnswer::Unknown,
        };
    }
    let mut names = Vec::new();
    let mut cursor = cod;
    while let Some((previous, name)) = parents.get(cursor) {
        names.push(name.clone());
        cursor = previous;
    }
    names.reverse();
    HomAnswer::Yes(Box::new(replay(net, dom, &names)))
}

/// Turns a firing sequence starting at `dom` back into a process.
fn replay(net: &PetriNet, dom: &Multiset, names: &[String]) -> Process {
    let mut process = Process::identity(net, dom);
    for name in names {
        process = process
            .then_fire(name)
            .expect("replaying a found path fires cleanly");
    }
    process
}
