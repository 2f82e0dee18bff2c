//! Seeded random generation of nets, open nets, and valid squares between
//! them.
//!
//! Every generator takes an explicit RNG, so a fixed seed reproduces the
//! exact same values. Generators only produce structurally valid data:
//! boundary maps always hit existing places, composable pairs share their
//! middle boundary by construction, and squares are built as quotients so
//! their commuting conditions hold without search.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cmc::Process;
use crate::multiset::{Carrier, Multiset};
use crate::open::{OpenNetMorphism, OpenPetriNet};
use crate::petri::{PetriMorphism, PetriNet};
use crate::reach::enabled;

/// The RNG used throughout: small, fast, and stable across platforms.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size bounds for generated nets.
#[derive(Debug, Clone)]
pub struct GenParams {
    /// places per net, at least one
    pub max_places: usize,
    /// transitions per net
    pub max_transitions: usize,
    /// largest coefficient in a source or target, at least one
    pub max_coeff: u64,
    /// distinct places per source or target
    pub max_arity_support: usize,
    /// boundary points per side
    pub max_boundary: usize,
}

impl Default for GenParams {
    fn default() -> GenParams {
        GenParams {
            max_places: 4,
            max_transitions: 3,
            max_coeff: 2,
            max_arity_support: 2,
            max_boundary: 2,
        }
    }
}

/// A multiset over `places` drawn from `pool`, with bounded support and
/// coefficients. An empty pool yields the empty multiset.
fn arity_from_pool<R: Rng>(
    rng: &mut R,
    places: &Arc<Carrier>,
    pool: &[String],
    params: &GenParams,
) -> Multiset {
    let support = rng.gen_range(0..=params.max_arity_support.min(pool.len()));
    let chosen: Vec<String> = pool.choose_multiple(rng, support).cloned().collect();
    let pairs: Vec<(String, u64)> = chosen
        .into_iter()
        .map(|p| (p, rng.gen_range(1..=params.max_coeff)))
        .collect();
    Multiset::from_pairs(places, pairs).expect("pool atoms are in the carrier")
}

/// A random net with places `p0, p1, ...` and transitions `t0, t1, ...`.
pub fn net<R: Rng>(rng: &mut R, params: &GenParams) -> PetriNet {
    assert!(params.max_places >= 1 && params.max_coeff >= 1);
    let n_places = rng.gen_range(1..=params.max_places);
    let carrier = Carrier::new((0..n_places).map(|i| format!("p{i}")));
    let pool = carrier.atoms().to_vec();
    let n_transitions = rng.gen_range(0..=params.max_transitions);
    let mut transitions = BTreeMap::new();
    for i in 0..n_transitions {
        let source = arity_from_pool(rng, &carrier, &pool, params);
        let target = arity_from_pool(rng, &carrier, &pool, params);
        transitions.insert(format!("t{i}"), (source, target));
    }
    PetriNet::from_parts(carrier, transitions).expect("generated arities fit the carrier")
}

/// Boundary points `prefix0, prefix1, ...` assigned to random places.
fn boundary<R: Rng>(
    rng: &mut R,
    prefix: &str,
    count: usize,
    places: &Arc<Carrier>,
) -> BTreeMap<String, String> {
    (0..count)
        .map(|i| {
            let place = places.atoms().choose(rng).expect("carrier is nonempty");
            (format!("{prefix}{i}"), place.clone())
        })
        .collect()
}

/// A random open net with inputs `x…` and outputs `y…`.
pub fn open_net<R: Rng>(rng: &mut R, params: &GenParams) -> OpenPetriNet {
    let net = net(rng, params);
    let in_count = rng.gen_range(0..=params.max_boundary);
    let out_count = rng.gen_range(0..=params.max_boundary);
    let inputs = boundary(rng, "x", in_count, net.places());
    let outputs = boundary(rng, "y", out_count, net.places());
    OpenPetriNet::new(net, inputs, outputs).expect("boundaries hit existing places")
}

/// Two open nets `p : x… -> y…` and `q : y… -> z…` that share their middle
/// boundary and therefore compose.
pub fn composable_pair<R: Rng>(rng: &mut R, params: &GenParams) -> (OpenPetriNet, OpenPetriNet) {
    let mut chain = composable_chain(rng, params, 2);
    let q = chain.pop().expect("chain has two stages");
    let p = chain.pop().expect("chain has two stages");
    (p, q)
}

/// A chain of open nets in which each stage's outputs are the next stage's
/// inputs. The boundary between stage `k` and `k+1` uses points `b{k+1}n…`;
/// the chain starts on `b0n…` and ends on `b{stages}n…`.
pub fn composable_chain<R: Rng>(
    rng: &mut R,
    params: &GenParams,
    stages: usize,
) -> Vec<OpenPetriNet> {
    let counts: Vec<usize> = (0..=stages)
        .map(|_| rng.gen_range(0..=params.max_boundary))
        .collect();
    (0..stages)
        .map(|k| {
            let net = net(rng, params);
            let inputs = boundary(rng, &format!("b{k}n"), counts[k], net.places());
            let outputs = boundary(rng, &format!("b{}n", k + 1), counts[k + 1], net.places());
            OpenPetriNet::new(net, inputs, outputs).expect("boundaries hit existing places")
        })
        .collect()
}

/// A one-way open net: transitions never produce into input places and
/// never consume from output places.
fn one_way_open<R: Rng>(
    rng: &mut R,
    params: &GenParams,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
    carrier: Arc<Carrier>,
) -> OpenPetriNet {
    let source_pool: Vec<String> = carrier
        .atoms()
        .iter()
        .filter(|p| !outputs.values().any(|o| o == *p))
        .cloned()
        .collect();
    let target_pool: Vec<String> = carrier
        .atoms()
        .iter()
        .filter(|p| !inputs.values().any(|i| i == *p))
        .cloned()
        .collect();
    let n_transitions = rng.gen_range(0..=params.max_transitions);
    let mut transitions = BTreeMap::new();
    for i in 0..n_transitions {
        let source = arity_from_pool(rng, &carrier, &source_pool, params);
        let target = arity_from_pool(rng, &carrier, &target_pool, params);
        transitions.insert(format!("t{i}"), (source, target));
    }
    let net = PetriNet::from_parts(carrier, transitions).expect("arities fit the carrier");
    OpenPetriNet::new(net, inputs, outputs).expect("boundaries hit existing places")
}

/// A composable pair in which both stages are one-way.
pub fn one_way_pair<R: Rng>(rng: &mut R, params: &GenParams) -> (OpenPetriNet, OpenPetriNet) {
    let make_carrier = |rng: &mut R| {
        let n = rng.gen_range(1..=params.max_places);
        Carrier::new((0..n).map(|i| format!("p{i}")))
    };
    let left = make_carrier(rng);
    let right = make_carrier(rng);
    let x_count = rng.gen_range(0..=params.max_boundary);
    let y_count = rng.gen_range(0..=params.max_boundary);
    let z_count = rng.gen_range(0..=params.max_boundary);
    let xs = boundary(rng, "x", x_count, &left);
    let y_left = boundary(rng, "y", y_count, &left);
    let y_right = boundary(rng, "y", y_count, &right);
    let zs = boundary(rng, "z", z_count, &right);
    let p = one_way_open(rng, params, xs, y_left, left);
    let q = one_way_open(rng, params, y_right, zs, right);
    (p, q)
}

/// A random marking over a carrier with at most `max_total` tokens.
pub fn marking<R: Rng>(rng: &mut R, carrier: &Arc<Carrier>, max_total: u64) -> Multiset {
    if carrier.is_empty() {
        return Multiset::empty(carrier);
    }
    let mut counts = vec![0u64; carrier.len()];
    for _ in 0..rng.gen_range(0..=max_total) {
        counts[rng.gen_range(0..carrier.len())] += 1;
    }
    Multiset::from_raw(carrier, counts)
}

/// A random run of the net from `start`, firing up to `max_events` enabled
/// transitions.
pub fn process<R: Rng>(
    rng: &mut R,
    net: &PetriNet,
    start: &Multiset,
    max_events: usize,
) -> Process {
    let mut run = Process::identity(net, start);
    for _ in 0..max_events {
        let choices = enabled(net, run.cod());
        let Some(name) = choices.choose(rng) else {
            break;
        };
        run = run.then_fire(name).expect("chosen transition is enabled");
    }
    run
}

/// Union-find over indices; class representatives are least members.
struct Partition {
    parent: Vec<usize>,
}

impl Partition {
    fn new(size: usize) -> Partition {
        Partition {
            parent: (0..size).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Randomly merges some of the (sorted) names; each name maps to the least
/// member of its class.
fn random_partition<R: Rng>(rng: &mut R, names: &[String]) -> BTreeMap<String, String> {
    let mut partition = Partition::new(names.len());
    if names.len() >= 2 {
        for _ in 0..rng.gen_range(0..=names.len() / 2) {
            let a = rng.gen_range(0..names.len());
            let b = rng.gen_range(0..names.len());
            partition.union(a, b);
        }
    }
    (0..names.len())
        .map(|i| {
            let root = partition.find(i);
            (names[i].clone(), names[root].clone())
        })
        .collect()
}

/// A name not used by any existing atom.
fn fresh_name(base: &str, taken: &[String]) -> String {
    for k in 0.. {
        let candidate = format!("{base}{k}");
        if !taken.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

/// Builds a square out of `open` from prescribed boundary-point partitions:
/// places hit by merged points are merged too, transitions whose merged
/// arities coincide may merge, and the target sometimes gains an extra
/// place or transition. The prescribed maps become the square's boundary
/// components, so two squares given the same middle partition share it
/// exactly.
fn quotient_with_points<R: Rng>(
    rng: &mut R,
    params: &GenParams,
    open: &OpenPetriNet,
    input_points: BTreeMap<String, String>,
    output_points: BTreeMap<String, String>,
) -> OpenNetMorphism {
    let net = open.net();
    let places = net.places().atoms();
    let index = |name: &str| {
        places
            .binary_search_by(|p| p.as_str().cmp(name))
            .expect("boundary places exist")
    };
    let mut partition = Partition::new(places.len());
    // merged boundary points force their places to merge, keeping the
    // target assignment well defined
    for (points, assignment) in [
        (&input_points, open.input_map()),
        (&output_points, open.output_map()),
    ] {
        let mut first_in_class: BTreeMap<&String, &String> = BTreeMap::new();
        for (point, class) in points {
            let place = &assignment[point];
            match first_in_class.get(class) {
                Some(anchor) => partition.union(index(anchor), index(place)),
                None => {
                    first_in_class.insert(class, place);
                }
            }
        }
    }
    if places.len() >= 2 {
        for _ in 0..rng.gen_range(0..=places.len() / 2) {
            let a = rng.gen_range(0..places.len());
            let b = rng.gen_range(0..places.len());
            partition.union(a, b);
        }
    }
    let place_map: BTreeMap<String, String> = (0..places.len())
        .map(|i| {
            let root = partition.find(i);
            (places[i].clone(), places[root].clone())
        })
        .collect();
    let mut target_places: Vec<String> = place_map.values().cloned().collect();
    target_places.sort();
    target_places.dedup();
    if rng.gen_bool(1.0 / 3.0) {
        target_places.push(fresh_name("extra", &target_places));
    }
    let target_carrier = Carrier::new(target_places);
    // group transitions by their mapped arities; only matching ones merge
    let mut groups: BTreeMap<(Multiset, Multiset), Vec<String>> = BTreeMap::new();
    for (name, source, target) in net.transitions() {
        let key = (
            source.map_atoms(&place_map, &target_carrier),
            target.map_atoms(&place_map, &target_carrier),
        );
        groups.entry(key).or_default().push(name.to_owned());
    }
    let mut transition_map = BTreeMap::new();
    let mut target_transitions = BTreeMap::new();
    for ((source, target), members) in groups {
        for (member, class) in random_partition(rng, &members) {
            transition_map.insert(member, class.clone());
            target_transitions.insert(class, (source.clone(), target.clone()));
        }
    }
    if rng.gen_bool(1.0 / 3.0) {
        let taken: Vec<String> = target_transitions.keys().cloned().collect();
        let pool = target_carrier.atoms().to_vec();
        let source = arity_from_pool(rng, &target_carrier, &pool, params);
        let target = arity_from_pool(rng, &target_carrier, &pool, params);
        target_transitions.insert(fresh_name("textra", &taken), (source, target));
    }
    let target_net = PetriNet::from_parts(target_carrier, target_transitions)
        .expect("quotient arities fit the quotient carrier");
    let project = |points: &BTreeMap<String, String>, assignment: &BTreeMap<String, String>| {
        points
            .iter()
            .map(|(point, class)| (class.clone(), place_map[&assignment[point]].clone()))
            .collect::<BTreeMap<String, String>>()
    };
    let target_open = OpenPetriNet::new(
        target_net.clone(),
        project(&input_points, open.input_map()),
        project(&output_points, open.output_map()),
    )
    .expect("projected boundaries hit quotient places");
    let net_morphism = PetriMorphism::new(net.clone(), target_net, transition_map, place_map)
        .expect("quotients preserve sources and targets");
    OpenNetMorphism::new(
        open.clone(),
        target_open,
        input_points,
        output_points,
        net_morphism,
    )
    .expect("quotient squares commute by construction")
}

/// A random valid square out of `open`.
pub fn square<R: Rng>(rng: &mut R, params: &GenParams, open: &OpenPetriNet) -> OpenNetMorphism {
    let inputs: Vec<String> = open.inputs().map(str::to_owned).collect();
    let outputs: Vec<String> = open.outputs().map(str::to_owned).collect();
    let input_points = random_partition(rng, &inputs);
    let output_points = random_partition(rng, &outputs);
    quotient_with_points(rng, params, open, input_points, output_points)
}

/// Squares out of a composable pair that agree on the shared middle
/// boundary, so they compose horizontally.
pub fn square_pair<R: Rng>(
    rng: &mut R,
    params: &GenParams,
    p: &OpenPetriNet,
    q: &OpenPetriNet,
) -> (OpenNetMorphism, OpenNetMorphism) {
    let middle: Vec<String> = p.outputs().map(str::to_owned).collect();
    let shared = random_partition(rng, &middle);
    let p_inputs: Vec<String> = p.inputs().map(str::to_owned).collect();
    let q_outputs: Vec<String> = q.outputs().map(str::to_owned).collect();
    let left_inputs = random_partition(rng, &p_inputs);
    let right_outputs = random_partition(rng, &q_outputs);
    let left = quotient_with_points(rng, params, p, left_inputs, shared.clone());
    let right = quotient_with_points(rng, params, q, shared, right_outputs);
    (left, right)
}

/// Four squares arranged for the interchange law: two horizontal pairs
/// stacked vertically over a composable pair of open nets.
#[derive(Debug, Clone)]
pub struct InterchangeSquare {
    pub top_left: OpenNetMorphism,
    pub top_right: OpenNetMorphism,
    pub bottom_left: OpenNetMorphism,
    pub bottom_right: OpenNetMorphism,
}

pub fn interchange_square<R: Rng>(rng: &mut R, params: &GenParams) -> InterchangeSquare {
    let (p, q) = composable_pair(rng, params);
    let (top_left, top_right) = square_pair(rng, params, &p, &q);
    let (bottom_left, bottom_right) =
        square_pair(rng, params, top_left.target(), top_right.target());
    InterchangeSquare {
        top_left,
        top_right,
        bottom_left,
        bottom_right,
    }
}
