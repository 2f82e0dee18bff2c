//! Reachability under explicit exploration caps, and the input/output
//! reachability relation of an open net.
//!
//! Every exploration is bounded by an [`ExplorationCaps`]: a token budget
//! per marking, a depth budget, and a state budget. Results carry an exact
//! flag; "yes" answers are always sound, while "no" is only claimed when an
//! exploration closed without pruning anything. [`BoundedRelation`] keeps
//! the same honesty per row: a row is complete when its exploration was
//! exact, and the relation-level checks only judge complete rows.
//!
//! Point-to-point queries get a second chance: when the forward closure is
//! cut, the same question is asked of the reversed net, working backwards
//! from the goal. A net that only grows shrinks in reverse, so one of the
//! two closures is often exact even when the other is not.
//!
//! When a row's exploration is exact, nothing beyond the token budget was
//! reachable at all, so the bounded row in fact lists every output marking
//! related to that input, not just the small ones.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::multiset::{enumerate_total_at_most, Carrier, Multiset};
use crate::open::{compose_open, OpenError, OpenPetriNet};
use crate::petri::{tagged_set_union, PetriNet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReachError {
    #[error("exploration caps must all be positive")]
    NonPositiveCap,
    #[error("transition `{transition}` is not enabled at the given marking")]
    NotEnabled { transition: String },
    #[error("relation carriers do not line up")]
    RelationCarrierMismatch,
    #[error("relations were computed at different bounds")]
    RelationBoundMismatch,
    #[error("boundary map is undefined on `{name}`")]
    MapNotTotal { name: String },
    #[error("boundary map sends `{name}` to `{image}`, which the target lacks")]
    MapOutsideTarget { name: String, image: String },
}

/// Budgets for a reachability exploration. All three are at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExplorationCaps {
    max_tokens: u64,
    max_depth: u32,
    max_states: usize,
}

impl ExplorationCaps {
    pub fn new(max_tokens: u64, max_depth: u32, max_states: usize) -> Result<Self, ReachError> {
        if max_tokens == 0 || max_depth == 0 || max_states == 0 {
            return Err(ReachError::NonPositiveCap);
        }
        Ok(ExplorationCaps {
            max_tokens,
            max_depth,
            max_states,
        })
    }

    pub fn max_tokens(&self) -> u64 {
        self.max_tokens
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn max_states(&self) -> usize {
        self.max_states
    }
}

/// Transitions enabled at `marking`, in name order.
pub fn enabled(net: &PetriNet, marking: &Multiset) -> Vec<String> {
    net.transitions()
        .filter(|(_, s, _)| s.leq(marking))
        .map(|(n, _, _)| n.to_owned())
        .collect()
}

/// Fires one transition: removes its source from the marking and adds its
/// target. The transition must exist; firing a disabled transition is a
/// normal error, not a panic.
pub fn fire(net: &PetriNet, transition: &str, marking: &Multiset) -> Result<Multiset, ReachError> {
    let after_take =
        marking
            .subtract(net.source(transition))
            .ok_or_else(|| ReachError::NotEnabled {
                transition: transition.to_owned(),
            })?;
    Ok(after_take.add(net.target(transition)))
}

/// Dense view of a net's transitions for the exploration inner loop.
struct DenseNet<'a> {
    names: &'a [String],
    sources: Vec<Vec<u64>>,
    targets: Vec<Vec<u64>>,
}

impl<'a> DenseNet<'a> {
    fn new(net: &'a PetriNet) -> DenseNet<'a> {
        DenseNet {
            names: net.transition_names(),
            sources: net
                .transitions()
                .map(|(_, s, _)| s.raw_counts().to_vec())
                .collect(),
            targets: net
                .transitions()
                .map(|(_, _, t)| t.raw_counts().to_vec())
                .collect(),
        }
    }
}

struct Exploration {
    /// marking -> parent marking and the transition index that reached it
    visited: HashMap<Vec<u64>, Option<(Vec<u64>, usize)>>,
    exact: bool,
    /// set when a target was requested and found
    witness: Option<Vec<String>>,
}

/// Breadth-first closure from `start`. Successors are expanded in transition
/// name order, so the first path to any marking is the shortest one and,
/// among shortest paths, the lexicographically least.
fn explore(
    net: &PetriNet,
    start: &Multiset,
    caps: &ExplorationCaps,
    target: Option<&Multiset>,
) -> Exploration {
    assert!(
        start.carrier() == net.places(),
        "marking carrier differs from the net's places"
    );
    let dense = DenseNet::new(net);
    let start_raw = start.raw_counts().to_vec();
    let target_raw = target.map(|t| {
        assert!(
            t.carrier() == net.places(),
            "marking carrier differs from the net's places"
        );
        t.raw_counts().to_vec()
    });
    let mut visited: HashMap<Vec<u64>, Option<(Vec<u64>, usize)>> = HashMap::new();
    visited.insert(start_raw.clone(), None);
    if target_raw.as_ref() == Some(&start_raw) {
        return Exploration {
            visited,
            exact: true,
            witness: Some(Vec::new()),
        };
    }
    let mut queue: VecDeque<(Vec<u64>, u32)> = VecDeque::new();
    queue.push_back((start_raw, 0));
    let mut exact = true;
    'outer: while let Some((marking, depth)) = queue.pop_front() {
        for ti in 0..dense.sources.len() {
            let source = &dense.sources[ti];
            if !source.iter().zip(&marking).all(|(s, m)| s <= m) {
                continue;
            }
            let next: Vec<u64> = marking
                .iter()
                .zip(source)
                .zip(&dense.targets[ti])
                .map(|((m, s), t)| m - s + t)
                .collect();
            if visited.contains_key(&next) {
                continue;
            }
            if next.iter().sum::<u64>() > caps.max_tokens {
                exact = false;
                continue;
            }
            if depth == caps.max_depth {
                exact = false;
                continue;
            }
            if visited.len() >= caps.max_states {
                exact = false;
                break 'outer;
            }
            visited.insert(next.clone(), Some((marking.clone(), ti)));
            if target_raw.as_ref() == Some(&next) {
                let mut path = Vec::new();
                let mut cursor = next;
                while let Some(Some((prev, ti))) = visited.get(&cursor) {
                    path.push(dense.names[*ti].clone());
                    cursor = prev.clone();
                }
                path.reverse();
                return Exploration {
                    visited,
                    exact,
                    witness: Some(path),
                };
            }
            queue.push_back((next, depth + 1));
        }
    }
    Exploration {
        visited,
        exact,
        witness: None,
    }
}

/// The set of markings reachable from `marking` within the caps, and
/// whether the closure is exact. The start marking is always included.
/// Enlarging any cap never removes markings and never turns an exact result
/// inexact.
pub fn reachable_set(
    net: &PetriNet,
    marking: &Multiset,
    caps: &ExplorationCaps,
) -> (BTreeSet<Multiset>, bool) {
    let exploration = explore(net, marking, caps, None);
    let set = exploration
        .visited
        .into_keys()
        .map(|raw| Multiset::from_raw(net.places(), raw))
        .collect();
    (set, exploration.exact)
}

/// Answer to a bounded reachability query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reachable {
    /// Reachable, with a shortest firing sequence (among those within the
    /// caps; ties broken by lexicographic transition names).
    Yes(Vec<String>),
    /// Certainly unreachable: a closure, forward or backward, completed
    /// without pruning.
    No,
    /// Both explorations were cut by a cap before deciding.
    Unknown,
}

/// The same net with every transition turned around. Firing a transition of
/// the reversal undoes firing it in the original, through the same pair of
/// markings, so paths of the reversal from `b` to `a` are exactly original
/// paths from `a` to `b` read backwards — and the token budget cuts both
/// readings identically.
fn reversed(net: &PetriNet) -> PetriNet {
    let table: BTreeMap<String, (Multiset, Multiset)> = net
        .transitions()
        .map(|(name, source, target)| (name.to_owned(), (target.clone(), source.clone())))
        .collect();
    PetriNet::from_parts(Arc::clone(net.places()), table)
        .expect("a reversal reuses the carrier and transition names unchanged")
}

/// Decides `from -->* to` by exploring the reversed net from `to`. Used as
/// a fallback when the forward closure is inexact; a witness comes back
/// already turned around into a forward firing sequence.
pub(crate) fn decide_backward(
    net: &PetriNet,
    from: &Multiset,
    to: &Multiset,
    caps: &ExplorationCaps,
) -> Reachable {
    let exploration = explore(&reversed(net), to, caps, Some(from));
    match exploration.witness {
        Some(mut path) => {
            path.reverse();
            Reachable::Yes(path)
        }
        None if exploration.exact => Reachable::No,
        None => Reachable::Unknown,
    }
}

/// Whether `to` is reachable from `from` by firing transitions, within the
/// caps. Reachability is reflexive: every marking reaches itself by the
/// empty sequence.
///
/// The query is tried forward from `from` and, if that closure was cut,
/// backward from `to` over the reversed net; `Unknown` means both
/// directions ran into a cap.
pub fn is_reachable(
    net: &PetriNet,
    from: &Multiset,
    to: &Multiset,
    caps: &ExplorationCaps,
) -> Reachable {
    let exploration = explore(net, from, caps, Some(to));
    match exploration.witness {
        Some(path) => Reachable::Yes(path),
        None if exploration.exact => Reachable::No,
        None => decide_backward(net, from, to, caps),
    }
}

/// One row of a [`BoundedRelation`].
#[derive(Debug, Clone, PartialEq, Eq)]
struct Row {
    complete: bool,
    cols: BTreeSet<Multiset>,
}

/// A relation between markings of two boundary carriers, tabulated for
/// every left marking with at most `bound` tokens.
///
/// Listed pairs are definite. A complete row additionally lists *every*
/// related right marking for its left marking; on incomplete rows absence
/// means nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedRelation {
    left: Arc<Carrier>,
    right: Arc<Carrier>,
    bound: u64,
    rows: BTreeMap<Multiset, Row>,
}

impl BoundedRelation {
    /// The identity relation on one carrier: exactly the diagonal pairs, all
    /// rows complete.
    pub fn identity(carrier: &Arc<Carrier>, bound: u64) -> BoundedRelation {
        let rows = enumerate_total_at_most(carrier, bound)
            .into_iter()
            .map(|m| {
                (
                    m.clone(),
                    Row {
                        complete: true,
                        cols: BTreeSet::from([m]),
                    },
                )
            })
            .collect();
        BoundedRelation {
            left: Arc::clone(carrier),
            right: Arc::clone(carrier),
            bound,
            rows,
        }
    }

    pub fn left_carrier(&self) -> &Arc<Carrier> {
        &self.left
    }

    pub fn right_carrier(&self) -> &Arc<Carrier> {
        &self.right
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn contains(&self, x: &Multiset, y: &Multiset) -> bool {
        self.rows.get(x).is_some_and(|row| row.cols.contains(y))
    }

    /// Whether the row for `x` is complete; `None` if `x` is out of bounds.
    pub fn row_complete(&self, x: &Multiset) -> Option<bool> {
        self.rows.get(x).map(|row| row.complete)
    }

    /// Iterates rows as `(left marking, complete, related right markings)`.
    pub fn rows(&self) -> impl Iterator<Item = (&Multiset, bool, &BTreeSet<Multiset>)> {
        self.rows
            .iter()
            .map(|(x, row)| (x, row.complete, &row.cols))
    }

    /// Iterates all listed pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (&Multiset, &Multiset)> {
        self.rows
            .iter()
            .flat_map(|(x, row)| row.cols.iter().map(move |y| (x, y)))
    }

    pub fn pair_count(&self) -> usize {
        self.rows.values().map(|row| row.cols.len()).sum()
    }

    pub fn fully_complete(&self) -> bool {
        self.rows.values().all(|row| row.complete)
    }
}

/// The reachability relation of an open net: an input marking `x` relates
/// to an output marking `y` when pushing `y` into the places is reachable
/// from pushing `x` in. Tabulated for all boundary markings within
/// `caps.max_tokens` tokens; each row is complete exactly when its
/// exploration was.
pub fn reach_relation(open: &OpenPetriNet, caps: &ExplorationCaps) -> BoundedRelation {
    let left = open.input_carrier();
    let right = open.output_carrier();
    let bound = caps.max_tokens;
    let outputs: Vec<(Multiset, Multiset)> = enumerate_total_at_most(&right, bound)
        .into_iter()
        .map(|y| {
            let placed = open.output_to_places(&y);
            (y, placed)
        })
        .collect();
    // distinct boundary markings can push to the same start marking
    let mut cache: HashMap<Multiset, (BTreeSet<Multiset>, bool)> = HashMap::new();
    let mut rows = BTreeMap::new();
    for x in enumerate_total_at_most(&left, bound) {
        let start = open.input_to_places(&x);
        let (set, exact) = cache
            .entry(start.clone())
            .or_insert_with(|| reachable_set(open.net(), &start, caps))
            .clone();
        let cols = outputs
            .iter()
            .filter(|(_, placed)| set.contains(placed))
            .map(|(y, _)| y.clone())
            .collect();
        rows.insert(
            x,
            Row {
                complete: exact,
                cols,
            },
        );
    }
    BoundedRelation {
        left,
        right,
        bound,
        rows,
    }
}

/// Relational composition `first` then `second`: `x` relates to `z` when
/// some listed middle marking connects them.
///
/// A result row is complete when the first row is complete and every listed
/// middle marking has a complete second row: exactness of the first row
/// confines all true middles to the tabulated range, so nothing escapes.
pub fn compose_relations(
    second: &BoundedRelation,
    first: &BoundedRelation,
) -> Result<BoundedRelation, ReachError> {
    if first.right != second.left {
        return Err(ReachError::RelationCarrierMismatch);
    }
    if first.bound != second.bound {
        return Err(ReachError::RelationBoundMismatch);
    }
    let rows = first
        .rows
        .iter()
        .map(|(x, row)| {
            let mut complete = row.complete;
            let mut cols = BTreeSet::new();
            for y in &row.cols {
                let mid = &second.rows[y];
                complete &= mid.complete;
                cols.extend(mid.cols.iter().cloned());
            }
            (x.clone(), Row { complete, cols })
        })
        .collect();
    Ok(BoundedRelation {
        left: Arc::clone(&first.left),
        right: Arc::clone(&second.right),
        bound: first.bound,
        rows,
    })
}

/// Pairwise product of two relations, living on the disjoint unions of the
/// carriers: a combined marking relates when both restrictions do. Combined
/// markings are still bounded by the shared bound in *total*, so the product
/// tabulates the same range a combined net's relation would.
pub fn product_relations(
    a: &BoundedRelation,
    b: &BoundedRelation,
) -> Result<BoundedRelation, ReachError> {
    if a.bound != b.bound {
        return Err(ReachError::RelationBoundMismatch);
    }
    let names = |c: &Arc<Carrier>| c.atoms().to_vec();
    let (left_names, left_a, left_b) = tagged_set_union(&names(&a.left), &names(&b.left));
    let (right_names, right_a, right_b) = tagged_set_union(&names(&a.right), &names(&b.right));
    let left = Carrier::new(left_names);
    let right = Carrier::new(right_names);
    let restrict = |m: &Multiset, inj: &BTreeMap<String, String>, to: &Arc<Carrier>| {
        Multiset::from_pairs(
            to,
            inj.iter()
                .map(|(orig, tagged)| (orig.clone(), m.count(tagged))),
        )
        .expect("restriction stays in the carrier")
    };
    let combine = |ya: &Multiset, yb: &Multiset| {
        let pairs = right_a
            .iter()
            .map(|(orig, tagged)| (tagged.clone(), ya.count(orig)))
            .chain(
                right_b
                    .iter()
                    .map(|(orig, tagged)| (tagged.clone(), yb.count(orig))),
            );
        Multiset::from_pairs(&right, pairs).expect("combination stays in the carrier")
    };
    let bound = a.bound;
    let mut rows = BTreeMap::new();
    for x in enumerate_total_at_most(&left, bound) {
        let xa = restrict(&x, &left_a, &a.left);
        let xb = restrict(&x, &left_b, &b.left);
        let row_a = &a.rows[&xa];
        let row_b = &b.rows[&xb];
        let mut cols = BTreeSet::new();
        for ya in &row_a.cols {
            for yb in &row_b.cols {
                if ya.total() + yb.total() <= bound {
                    cols.insert(combine(ya, yb));
                }
            }
        }
        rows.insert(
            x,
            Row {
                complete: row_a.complete && row_b.complete,
                cols,
            },
        );
    }
    Ok(BoundedRelation {
        left,
        right,
        bound,
        rows,
    })
}

/// Result of checking that a pair of boundary maps carries one relation
/// into another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapInclusion {
    pub holds: bool,
    /// pairs checked against a complete target row
    pub checked: usize,
    /// pairs skipped because the target row was incomplete
    pub skipped: usize,
    /// first violating pair of the source relation, if any
    pub violation: Option<(Multiset, Multiset)>,
}

/// Checks that mapping every listed pair of `r` along `f`/`g` lands in `s`.
/// Pairs whose image row in `s` is incomplete are skipped: absence there is
/// not meaningful. Reports the first violation encountered.
pub fn map_included(
    f: &BTreeMap<String, String>,
    g: &BTreeMap<String, String>,
    r: &BoundedRelation,
    s: &BoundedRelation,
) -> Result<MapInclusion, ReachError> {
    if r.bound != s.bound {
        return Err(ReachError::RelationBoundMismatch);
    }
    let check_map = |map: &BTreeMap<String, String>,
                     from: &Arc<Carrier>,
                     to: &Arc<Carrier>|
     -> Result<(), ReachError> {
        for name in from.atoms() {
            match map.get(name) {
                None => return Err(ReachError::MapNotTotal { name: name.clone() }),
                Some(image) if !to.contains(image) => {
                    return Err(ReachError::MapOutsideTarget {
                        name: name.clone(),
                        image: image.clone(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    };
    check_map(f, &r.left, &s.left)?;
    check_map(g, &r.right, &s.right)?;
    let mut checked = 0;
    let mut skipped = 0;
    for (x, y) in r.pairs() {
        let fx = x.map_atoms(f, &s.left);
        let gy = y.map_atoms(g, &s.right);
        if s.row_complete(&fx) != Some(true) {
            skipped += 1;
            continue;
        }
        checked += 1;
        if !s.contains(&fx, &gy) {
            return Ok(MapInclusion {
                holds: false,
                checked,
                skipped,
                violation: Some((x.clone(), y.clone())),
            });
        }
    }
    Ok(MapInclusion {
        holds: true,
        checked,
        skipped,
        violation: None,
    })
}

/// Outcome of comparing composed row contents on the rows where both sides
/// are complete.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaxCompositionReport {
    /// relation composition of the two part relations
    pub composed_relations: BoundedRelation,
    /// relation of the composed net
    pub relation_of_composite: BoundedRelation,
    /// rows where both sides are complete
    pub eligible_rows: usize,
    pub skipped_rows: usize,
    /// pairs listed by the composed relations but missing from the
    /// composite's relation, on eligible rows; inclusion fails if nonempty
    pub violations: Vec<(Multiset, Multiset)>,
    /// pairs the composite's relation has beyond the composed relations, on
    /// eligible rows; nonempty means the inclusion is strict
    pub extra_pairs: Vec<(Multiset, Multiset)>,
}

impl LaxCompositionReport {
    /// The inclusion direction: composing relations never invents pairs.
    pub fn inclusion_holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Whether the composite's relation is strictly larger somewhere.
    pub fn strict(&self) -> bool {
        !self.extra_pairs.is_empty()
    }

    /// Equality on the eligible rows.
    pub fn equality_holds(&self) -> bool {
        self.inclusion_holds() && !self.strict()
    }
}

/// Compares composing the reachability relations of `p` and `q` against the
/// reachability relation of their composite, on rows where all involved
/// explorations were exact.
pub fn check_lax_composition(
    p: &OpenPetriNet,
    q: &OpenPetriNet,
    caps: &ExplorationCaps,
) -> Result<LaxCompositionReport, OpenError> {
    let composite = compose_open(p, q)?;
    let rel_p = reach_relation(p, caps);
    let rel_q = reach_relation(q, caps);
    let composed_relations =
        compose_relations(&rel_q, &rel_p).expect("part relations share the middle boundary");
    let relation_of_composite = reach_relation(&composite, caps);
    let mut eligible_rows = 0;
    let mut skipped_rows = 0;
    let mut violations = Vec::new();
    let mut extra_pairs = Vec::new();
    for (x, complete, cols) in composed_relations.rows() {
        let composite_row = relation_of_composite
            .rows
            .get(x)
            .expect("both relations tabulate the same rows");
        if !(complete && composite_row.complete) {
            skipped_rows += 1;
            continue;
        }
        eligible_rows += 1;
        for y in cols {
            if !composite_row.cols.contains(y) {
                violations.push((x.clone(), y.clone()));
            }
        }
        for y in &composite_row.cols {
            if !cols.contains(y) {
                extra_pairs.push((x.clone(), y.clone()));
            }
        }
    }
    Ok(LaxCompositionReport {
        composed_relations,
        relation_of_composite,
        eligible_rows,
        skipped_rows,
        violations,
        extra_pairs,
    })
}

/// Outcome of comparing the relation of an identity open net against the
/// identity relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityComparisonReport {
    pub relation: BoundedRelation,
    pub expected: BoundedRelation,
    pub equal: bool,
}

/// The relation of an identity open net is the identity relation exactly:
/// a discrete net fires nothing, so every exploration is trivially exact.
pub fn check_identity_comparison<I, S>(
    points: I,
    caps: &ExplorationCaps,
) -> IdentityComparisonReport
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let unit = OpenPetriNet::identity(points);
    let relation = reach_relation(&unit, caps);
    let expected = BoundedRelation::identity(&unit.input_carrier(), caps.max_tokens);
    let equal = relation == expected;
    IdentityComparisonReport {
        relation,
        expected,
        equal,
    }
}

/// A net is one-way when tokens can only flow inward at inputs and outward
/// at outputs: no input place is ever produced into, and no output place is
/// ever consumed from.
pub fn is_one_way(open: &OpenPetriNet) -> bool {
    let inputs: BTreeSet<&String> = open.input_map().values().collect();
    let outputs: BTreeSet<&String> = open.output_map().values().collect();
    open.net().transitions().all(|(_, source, target)| {
        inputs.iter().all(|p| target.count(p) == 0) && outputs.iter().all(|p| source.count(p) == 0)
    })
}

/// One generated one-way instance with its full comparison data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneWayInstance {
    pub index: usize,
    pub first: OpenPetriNet,
    pub second: OpenPetriNet,
    pub report: LaxCompositionReport,
}

/// Outcome of [`one_way_experiment`]: per-instance comparisons plus tallies.
/// An instance counts as `equal` when both sides agree on every eligible
/// row, `unequal` when some eligible row differs, and `inconclusive` when
/// no row was complete on both sides. The experiment observes and reports;
/// it never asserts the compared sides agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneWayReport {
    pub seed: u64,
    pub caps: ExplorationCaps,
    pub instances: Vec<OneWayInstance>,
    pub equal: usize,
    pub unequal: usize,
    pub inconclusive: usize,
}

/// Generates `count` composable pairs of one-way open nets from the seed
/// and compares composing their relations against the relation of their
/// composite. Rerunning with the same inputs reproduces the report exactly.
pub fn one_way_experiment(
    seed: u64,
    count: usize,
    params: &crate::gen::GenParams,
    caps: &ExplorationCaps,
) -> OneWayReport {
    let mut rng = crate::gen::rng_from_seed(seed);
    let mut instances = Vec::with_capacity(count);
    let mut equal = 0;
    let mut unequal = 0;
    let mut inconclusive = 0;
    for index in 0..count {
        let (first, second) = crate::gen::one_way_pair(&mut rng, params);
        let report = check_lax_composition(&first, &second, caps).expect("generated pairs compose");
        if report.eligible_rows == 0 {
            inconclusive += 1;
        } else if report.equality_holds() {
            equal += 1;
        } else {
            unequal += 1;
        }
        instances.push(OneWayInstance {
            index,
            first,
            second,
            report,
        });
    }
    OneWayReport {
        seed,
        caps: *caps,
        instances,
        equal,
        unequal,
        inconclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::open::OpenPetriNet;

    fn caps(tokens: u64, depth: u32, states: usize) -> ExplorationCaps {
        ExplorationCaps::new(tokens, depth, states).unwrap()
    }

    fn chain_stage_one() -> OpenPetriNet {
        // A -> B and C -> D, with input on A and outputs on B, C, D
        let net = PetriNet::new(
            &["A", "B", "C", "D"],
            &[
                ("alpha", &[("A", 1)], &[("B", 1)]),
                ("beta", &[("C", 1)], &[("D", 1)]),
            ],
        )
        .unwrap();
        OpenPetriNet::from_pairs(net, &[("1", "A")], &[("2", "B"), ("3", "C"), ("4", "D")]).unwrap()
    }

    fn chain_stage_two() -> OpenPetriNet {
        // B -> C and D -> E, entered on B, C, D and left on E
        let net = PetriNet::new(
            &["B", "C", "D", "E"],
            &[
                ("gamma", &[("B", 1)], &[("C", 1)]),
                ("delta", &[("D", 1)], &[("E", 1)]),
            ],
        )
        .unwrap();
        OpenPetriNet::from_pairs(net, &[("2", "B"), ("3", "C"), ("4", "D")], &[("5", "E")]).unwrap()
    }

    #[test]
    fn caps_must_be_positive() {
        assert_eq!(
            ExplorationCaps::new(0, 1, 1).unwrap_err(),
            ReachError::NonPositiveCap
        );
    }

    #[test]
    fn firing_moves_tokens() {
        let stage = chain_stage_one();
        let net = stage.net();
        let m = Multiset::from_pairs(net.places(), [("A", 1), ("C", 1)]).unwrap();
        assert_eq!(
            enabled(net, &m),
            vec!["alpha".to_owned(), "beta".to_owned()]
        );
        let after = fire(net, "alpha", &m).unwrap();
        assert_eq!(
            after,
            Multiset::from_pairs(net.places(), [("B", 1), ("C", 1)]).unwrap()
        );
        // the firing balance: consumed plus produced accounts for everything
        assert_eq!(after.add(net.source("alpha")), m.add(net.target("alpha")));
        assert_eq!(
            fire(net, "alpha", &after).unwrap_err(),
            ReachError::NotEnabled {
                transition: "alpha".into()
            }
        );
    }

    #[test]
    fn reachability_is_reflexive_with_empty_witness() {
        let stage = chain_stage_one();
        let m = Multiset::from_pairs(stage.net().places(), [("A", 2)]).unwrap();
        let (set, exact) = reachable_set(stage.net(), &m, &caps(4, 8, 1000));
        assert!(set.contains(&m));
        assert!(exact);
        assert_eq!(
            is_reachable(stage.net(), &m, &m, &caps(4, 8, 1000)),
            Reachable::Yes(Vec::new())
        );
    }

    #[test]
    fn witnesses_are_shortest_then_lexicographic() {
        let net = PetriNet::new(
            &["A", "B", "X", "Y"],
            &[
                ("ta", &[("A", 1)], &[("X", 1)]),
                ("tb", &[("B", 1)], &[("Y", 1)]),
            ],
        )
        .unwrap();
        let from = Multiset::from_pairs(net.places(), [("A", 1), ("B", 1)]).unwrap();
        let to = Multiset::from_pairs(net.places(), [("X", 1), ("Y", 1)]).unwrap();
        // both orders reach the target; the reported witness is the lex-least
        match is_reachable(&net, &from, &to, &caps(4, 8, 1000)) {
            Reachable::Yes(path) => assert_eq!(path, vec!["ta".to_owned(), "tb".to_owned()]),
            other => panic!("expected reachable, got {other:?}"),
        }
    }

    #[test]
    fn token_cap_prunes_and_clears_exactness() {
        let net = PetriNet::new(&["A"], &[("dup", &[("A", 1)], &[("A", 2)])]).unwrap();
        let m = Multiset::singleton(net.places(), "A").unwrap();
        let (set, exact) = reachable_set(&net, &m, &caps(4, 32, 1000));
        assert!(!exact);
        let totals: Vec<u64> = set.iter().map(Multiset::total).collect();
        assert_eq!(totals, vec![1, 2, 3, 4]);
        // a bigger budget keeps everything it had
        let (bigger, exact_bigger) = reachable_set(&net, &m, &caps(6, 32, 1000));
        assert!(!exact_bigger);
        assert!(set.is_subset(&bigger));
    }

    #[test]
    fn definite_no_needs_an_exact_closure() {
        let stage = chain_stage_one();
        let net = stage.net();
        let b = Multiset::singleton(net.places(), "B").unwrap();
        let a = Multiset::singleton(net.places(), "A").unwrap();
        assert_eq!(is_reachable(net, &b, &a, &caps(4, 8, 1000)), Reachable::No);
        // with a one-state budget the closure is cut before it can say no
        assert_eq!(
            is_reachable(net, &a, &b.add(&b), &caps(4, 8, 1)),
            Reachable::Unknown
        );
    }

    #[test]
    fn relation_rows_follow_reachability() {
        let rel = reach_relation(&chain_stage_one(), &caps(3, 8, 1000));
        assert!(rel.fully_complete());
        let left = rel.left_carrier().clone();
        let right = rel.right_carrier().clone();
        // from n tokens on the input, only n tokens on output 2 or split to 4
        let x = Multiset::from_pairs(&left, [("1", 2)]).unwrap();
        let y = Multiset::from_pairs(&right, [("2", 2)]).unwrap();
        assert!(rel.contains(&x, &y));
        let y_via_c = Multiset::from_pairs(&right, [("2", 1), ("3", 1)]).unwrap();
        assert!(!rel.contains(&x, &y_via_c));
        // boundary point 3 sits on C, which input tokens never reach
        let y3 = Multiset::from_pairs(&right, [("3", 1)]).unwrap();
        assert!(!rel.contains(&Multiset::singleton(&left, "1").unwrap(), &y3));
    }

    #[test]
    fn composing_relations_loses_pairs_the_composite_keeps() {
        let p = chain_stage_one();
        let q = chain_stage_two();
        let report = check_lax_composition(&p, &q, &caps(2, 8, 10_000)).unwrap();
        assert!(report.inclusion_holds());
        assert!(report.strict());
        assert_eq!(report.skipped_rows, 0);
        // the composed relations only relate zero to zero
        let zero_pairs: Vec<_> = report.composed_relations.pairs().collect();
        assert_eq!(zero_pairs.len(), 1);
        assert!(zero_pairs[0].0.is_empty() && zero_pairs[0].1.is_empty());
        // while the glued net pipes n tokens straight through
        let left = report.relation_of_composite.left_carrier().clone();
        let right = report.relation_of_composite.right_carrier().clone();
        for n in 0..=2 {
            let x = Multiset::from_pairs(&left, [("1", n)]).unwrap();
            let y = Multiset::from_pairs(&right, [("5", n)]).unwrap();
            assert!(report.relation_of_composite.contains(&x, &y));
        }
        assert_eq!(report.relation_of_composite.pair_count(), 3);
    }

    #[test]
    fn identity_relation_matches_identity_net() {
        let report = check_identity_comparison(["u", "v"], &caps(3, 8, 1000));
        assert!(report.equal);
        // C(3 + 2, 2) markings, one diagonal pair each
        assert_eq!(report.relation.pair_count(), 10);
    }

    #[test]
    fn products_pair_rows_componentwise() {
        let rel = reach_relation(&chain_stage_one(), &caps(2, 8, 1000));
        let prod = product_relations(&rel, &rel).unwrap();
        assert_eq!(prod.bound(), 2);
        let left = prod.left_carrier().clone();
        let right = prod.right_carrier().clone();
        // one token into each copy comes out of each copy's first output
        let x = Multiset::from_pairs(&left, [("1", 1), ("1#2", 1)]).unwrap();
        let y = Multiset::from_pairs(&right, [("2", 1), ("2#2", 1)]).unwrap();
        assert!(prod.contains(&x, &y));
        // two tokens in one copy exceed nothing, but the pair bound holds
        let x2 = Multiset::from_pairs(&left, [("1", 2)]).unwrap();
        let y2 = Multiset::from_pairs(&right, [("2", 2)]).unwrap();
        assert!(prod.contains(&x2, &y2));
    }

    #[test]
    fn map_inclusion_sees_violations() {
        let rel = reach_relation(&chain_stage_one(), &caps(2, 8, 1000));
        let id_left: BTreeMap<String, String> = rel
            .left_carrier()
            .atoms()
            .iter()
            .map(|a| (a.clone(), a.clone()))
            .collect();
        let id_right: BTreeMap<String, String> = rel
            .right_carrier()
            .atoms()
            .iter()
            .map(|a| (a.clone(), a.clone()))
            .collect();
        let ok = map_included(&id_left, &id_right, &rel, &rel).unwrap();
        assert!(ok.holds);
        assert_eq!(ok.skipped, 0);
        // a duplicating net's relation cannot map into the diagonal
        let net = PetriNet::new(&["A", "B"], &[("dup", &[("A", 1)], &[("B", 2)])]).unwrap();
        let open = OpenPetriNet::from_pairs(net, &[("1", "A")], &[("2", "B")]).unwrap();
        let dup = reach_relation(&open, &caps(2, 8, 1000));
        let diag = BoundedRelation::identity(dup.left_carrier(), 2);
        let f: BTreeMap<String, String> = [("1".to_owned(), "1".to_owned())].into();
        let g: BTreeMap<String, String> = [("2".to_owned(), "1".to_owned())].into();
        let bad = map_included(&f, &g, &dup, &diag).unwrap();
        assert!(!bad.holds);
        let (x, y) = bad.violation.unwrap();
        assert_eq!((x.total(), y.total()), (1, 2));
    }

    #[test]
    fn one_way_experiment_is_reproducible_and_lax() {
        let params = crate::gen::GenParams::default();
        let caps = caps(3, 6, 2000);
        let report = one_way_experiment(11, 8, &params, &caps);
        assert_eq!(report.instances.len(), 8);
        assert_eq!(report.equal + report.unequal + report.inconclusive, 8);
        for instance in &report.instances {
            assert!(is_one_way(&instance.first));
            assert!(is_one_way(&instance.second));
            // inclusion is a theorem and must hold regardless of equality
            assert!(instance.report.inclusion_holds());
        }
        let again = one_way_experiment(11, 8, &params, &caps);
        assert_eq!(report, again);
        assert_ne!(one_way_experiment(12, 8, &params, &caps), report);
    }

    #[test]
    fn one_way_flags_backflow() {
        let net = PetriNet::new(&["A", "B"], &[("go", &[("A", 1)], &[("B", 1)])]).unwrap();
        let open = OpenPetriNet::from_pairs(net, &[("1", "A")], &[("2", "B")]).unwrap();
        assert!(is_one_way(&open));
        // an output place that some transition consumes from breaks it,
        // which is exactly how tokens reenter a stage after leaving
        assert!(!is_one_way(&chain_stage_one()));
        // as does an input place that some transition produces into
        let net = PetriNet::new(
            &["A", "B"],
            &[
                ("go", &[("A", 1)], &[("B", 1)]),
                ("back", &[("B", 1)], &[("A", 1)]),
            ],
        )
        .unwrap();
        let open = OpenPetriNet::from_pairs(net, &[("1", "A")], &[("2", "A")]).unwrap();
        assert!(!is_one_way(&open));
    }
}
