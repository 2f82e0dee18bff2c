//! Batched checks of the structural laws, run over seeded random data.
//!
//! Each check generates a batch of instances from a seed, verifies one law
//! on each, and returns a [`LawReport`] with per-instance tallies and the
//! first few rendered failures. Reports serialize to JSON, so the command
//! line can emit them directly. A fixed seed reproduces a report exactly.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::gen::{self, GenParams};
use crate::multiset::Carrier;
use crate::open::{
    canonical_iso, compose_open, iso_open, tensor_open, CoherenceWitness, OpenNetMorphism,
    OpenPetriNet,
};
use crate::petri::PetriNet;
use crate::reach::{
    check_identity_comparison, check_lax_composition, map_included, product_relations,
    reach_relation, ExplorationCaps,
};

/// Outcome of one batched law check.
#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub law: String,
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    /// rendered descriptions of the first few failures
    pub failures: Vec<String>,
    /// auxiliary counters accumulated across instances
    pub details: BTreeMap<String, u64>,
}

impl LawReport {
    pub fn holds(&self) -> bool {
        self.failed == 0 && self.instances > 0
    }
}

/// Runs `count` numbered instances of a check; the closure reports auxiliary
/// counters on success and a description on failure.
fn run_instances(
    law: &str,
    count: usize,
    mut instance: impl FnMut(usize) -> Result<Vec<(&'static str, u64)>, String>,
) -> LawReport {
    let mut report = LawReport {
        law: law.to_owned(),
        instances: 0,
        passed: 0,
        failed: 0,
        failures: Vec::new(),
        details: BTreeMap::new(),
    };
    for index in 0..count {
        report.instances += 1;
        match instance(index) {
            Ok(notes) => {
                report.passed += 1;
                for (key, amount) in notes {
                    *report.details.entry(key.to_owned()).or_default() += amount;
                }
            }
            Err(description) => {
                report.failed += 1;
                if report.failures.len() < 5 {
                    report
                        .failures
                        .push(format!("instance {index}: {description}"));
                }
            }
        }
    }
    report
}

fn err_str<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Composing with an identity on either side is canonically isomorphic to
/// the net itself.
pub fn check_unitors(seed: u64, count: usize, params: &GenParams) -> LawReport {
    let mut rng = gen::rng_from_seed(seed);
    run_instances("unitors", count, |_| {
        let p = gen::open_net(&mut rng, params);
        let after = compose_open(&p, &OpenPetriNet::identity(p.outputs())).map_err(err_str)?;
        let before = compose_open(&OpenPetriNet::identity(p.inputs()), &p).map_err(err_str)?;
        let left = canonical_iso(&after, &p, &CoherenceWitness::LeftUnitor { p: p.clone() })
            .map_err(err_str)?;
        let right = canonical_iso(&before, &p, &CoherenceWitness::RightUnitor { p: p.clone() })
            .map_err(err_str)?;
        if left.inverse().is_none() || right.inverse().is_none() {
            return Err("unitor square is not invertible".to_owned());
        }
        let strict = u64::from(after != p) + u64::from(before != p);
        Ok(vec![("nontrivial_renamings", strict)])
    })
}

/// The two ways of bracketing a triple composite are canonically
/// isomorphic.
pub fn check_associator(seed: u64, count: usize, params: &GenParams) -> LawReport {
    let mut rng = gen::rng_from_seed(seed);
    run_instances("associator", count, |_| {
        let chain = gen::composable_chain(&mut rng, params, 3);
        let (p, q, r) = (&chain[0], &chain[1], &chain[2]);
        let lhs = compose_open(&compose_open(p, q).map_err(err_str)?, r).map_err(err_str)?;
        let rhs = compose_open(p, &compose_open(q, r).map_err(err_str)?).map_err(err_str)?;
        let witness = CoherenceWitness::Associator {
            p: p.clone(),
            q: q.clone(),
            r: r.clone(),
        };
        let iso = canonical_iso(&lhs, &rhs, &witness).map_err(err_str)?;
        if iso.inverse().is_none() {
            return Err("associator square is not invertible".to_owned());
        }
        Ok(vec![("nontrivial_renamings", u64::from(lhs != rhs))])
    })
}

/// The two associator routes around a quadruple composite agree: the
/// pentagon identity.
pub fn check_pentagon(seed: u64, count: usize, params: &GenParams) -> LawReport {
    let mut rng = gen::rng_from_seed(seed);
    run_instances("pentagon", count, |_| {
        let chain = gen::composable_chain(&mut rng, params, 4);
        let (p, q, r, s) = (&chain[0], &chain[1], &chain[2], &chain[3]);
        let assoc = |a: &OpenPetriNet, b: &OpenPetriNet, c: &OpenPetriNet| {
            let lhs = compose_open(&compose_open(a, b)?, c)?;
            let rhs = compose_open(a, &compose_open(b, c)?)?;
            canonical_iso(
                &lhs,
                &rhs,
                &CoherenceWitness::Associator {
                    p: a.clone(),
                    q: b.clone(),
                    r: c.clone(),
                },
            )
        };
        let pq = compose_open(p, q).map_err(err_str)?;
        let qr = compose_open(q, r).map_err(err_str)?;
        let rs = compose_open(r, s).map_err(err_str)?;
        // ((pq)r)s => (pq)(rs) => p(q(rs))
        let route_a = assoc(&pq, r, s)
            .and_then(|first| first.v_comp(&assoc(p, q, &rs)?))
            .map_err(err_str)?;
        // ((pq)r)s => (p(qr))s => p((qr)s) => p(q(rs))
        let route_b = assoc(p, q, r)
            .and_then(|inner| inner.h_comp(&OpenNetMorphism::identity(s)))
            .and_then(|first| first.v_comp(&assoc(p, &qr, s)?))
            .and_then(|first_two| {
                let inner = assoc(q, r, s)?;
                first_two.v_comp(&OpenNetMorphism::identity(p).h_comp(&inner)?)
            })
            .map_err(err_str)?;
        if route_a != route_b {
            return Err("pentagon routes differ".to_owned());
        }
        Ok(vec![])
    })
}

/// The unitor and associator interact as the triangle identity demands.
pub fn check_triangle(seed: u64, count: usize, params: &GenParams) -> LawReport {
    let mut rng = gen::rng_from_seed(seed);
    run_instances("triangle", count, |_| {
        let chain = gen::composable_chain(&mut rng, params, 2);
        let (p, q) = (&chain[0], &chain[1]);
        let unit = OpenPetriNet::identity(p.outputs());
        let p_unit = compose_open(p, &unit).map_err(err_str)?;
        let unit_q = compose_open(&unit, q).map_err(err_str)?;
        let lhs = compose_open(&p_unit, q).map_err(err_str)?;
        // (p 1)q => pq directly
        let route_a = canonical_iso(&p_unit, p, &CoherenceWitness::LeftUnitor { p: p.clone() })
            .and_then(|unitor| unitor.h_comp(&OpenNetMorphism::identity(q)))
            .map_err(err_str)?;
        // (p 1)q => p(1 q) => pq
        let route_b = canonical_iso(
            &lhs,
            &compose_open(p, &unit_q).map_err(err_str)?,
            &CoherenceWitness::Associator {
                p: p.clone(),
                q: unit,
                r: q.clone(),
            },
        )
        .and_then(|assoc| {
            let unitor =
                canonical_iso(&unit_q, q, &CoherenceWitness::RightUnitor { p: q.clone() })?;
            assoc.v_comp(&OpenNetMorphism::identity(p).h_comp(&unitor)?)
        })
        .map_err(err_str)?;
        if route_a != route_b {
            return Err("triangle routes differ".to_owned());
        }
        Ok(vec![])
    })
}

/// The symmetry square followed by its reverse is the identity.
pub fn check_symmetry(seed: u64, count: usize, params: &GenParams) -> LawReport {
    let mut rng = gen::rng_from_seed(seed);
    run_instances("symmetry", count, |_| {
        let p = gen::open_net(&mut rng, params);
        let q = gen::open_net(&mut rng, params);
        let pq = tensor_open(&p, &q);
        let qp = tensor_open(&q, &p);
        let forward = canonical_iso(
            &pq,
            &qp,
            &CoherenceWitness::Symmetry {
                p: p.clone(),
                q: q.clone(),
            },
        )
        .map_err(err_str)?;
        let backward =
            canonical_iso(&qp, &pq, &CoherenceWitness::Symmetry { p: q, q: p }).map_err(err_str)?;
        let round_trip = forward.v_comp(&backward).map_err(err_str)?;
        if round_trip != OpenNetMorphism::identity(&pq) {
            return Err("symmetry round trip is not the identity".to_owned());
        }
        Ok(vec![])
    })
}

/// Horizontal-then-vertical composition of squares equals
/// vertical-then-horizontal.
pub fn check_interchange(seed: u64, count: usize, params: &GenParams) -> LawReport {
    let mut rng = gen::rng_from_seed(seed);
    run_instances("interchange", count, |_| {
        let square = gen::interchange_square(&mut rng, params);
        let horizontal_first = square
            .top_left
            .h_comp(&square.top_right)
            .and_then(|top| top.v_comp(&square.bottom_left.h_comp(&square.bottom_right)?))
            .map_err(err_str)?;
        let vertical_first = square
            .top_left
            .v_comp(&square.bottom_left)
            .and_then(|left| left.h_comp(&square.top_right.v_comp(&square.bottom_right)?))
            .map_err(err_str)?;
        if horizontal_first != vertical_first {
            return Err("interchange orders differ".to_owned());
        }
        Ok(vec![])
    })
}

/// Relabelling places is found by the isomorphism search and the found
/// square inverts.
pub fn check_iso_search(seed: u64, count: usize, params: &GenParams) -> LawReport {
    let mut rng = gen::rng_from_seed(seed);
    run_instances("iso-search", count, |_| {
        let p = gen::open_net(&mut rng, params);
        let renamed = rename_places(&p);
        match iso_open(&p, &renamed, 100_000) {
            crate::open::IsoSearch::Found(square) => {
                if square.inverse().is_none() {
                    return Err("found square does not invert".to_owned());
                }
                Ok(vec![])
            }
            other => Err(format!("search returned {other:?}")),
        }
    })
}

/// `open` with places renamed in reverse order, boundaries carried along.
fn rename_places(open: &OpenPetriNet) -> OpenPetriNet {
    let atoms = open.net().places().atoms();
    let map: BTreeMap<String, String> = atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), format!("n{}", atoms.len() - 1 - i)))
        .collect();
    let carrier = Carrier::new(map.values().cloned());
    let transitions = open
        .net()
        .transitions()
        .map(|(name, source, target)| {
            (
                name.to_owned(),
                (
                    source.map_atoms(&map, &carrier),
                    target.map_atoms(&map, &carrier),
                ),
            )
        })
        .collect();
    let net = PetriNet::from_parts(carrier, transitions).expect("renaming keeps arities valid");
    let carry = |side: &BTreeMap<String, String>| {
        side.iter()
            .map(|(point, place)| (point.clone(), map[place].clone()))
            .collect()
    };
    OpenPetriNet::new(net, carry(open.input_map()), carry(open.output_map()))
        .expect("renamed boundaries hit renamed places")
}

/// Composing reachability relations never claims more than the composite
/// net's relation, judged on rows complete on both sides.
pub fn check_lax_inclusion(
    seed: u64,
    count: usize,
    params: &GenParams,
    caps: &ExplorationCaps,
) -> LawReport {
    let mut rng = gen::rng_from_seed(seed);
    run_instances("lax-inclusion", count, |_| {
        let (p, q) = gen::composable_pair(&mut rng, params);
        let report = check_lax_composition(&p, &q, caps).map_err(err_str)?;
        if !report.inclusion_holds() {
            let (x, y) = &report.violations[0];
            return Err(format!(
                "composed relations claim ({x}, {y}) but the composite's relation lacks it"
            ));
        }
        Ok(vec![
            ("eligible_rows", report.eligible_rows as u64),
            ("skipped_rows", report.skipped_rows as u64),
            ("strict_instances", u64::from(report.strict())),
        ])
    })
}

/// The relation of an identity open net is exactly the identity relation.
pub fn check_identity_relation(seed: u64, count: usize, caps: &ExplorationCaps) -> LawReport {
    let mut rng = gen::rng_from_seed(seed);
    run_instances("identity-relation", count, |_| {
        let size = rand::Rng::gen_range(&mut rng, 0..=3usize);
        let points: Vec<String> = (0..size).map(|i| format!("u{i}")).collect();
        let report = check_identity_comparison(points, caps);
        if !report.equal {
            return Err("identity net relation differs from the identity relation".to_owned());
        }
        Ok(vec![])
    })
}

/// The relation of a side-by-side net is the product of the relations,
/// judged on rows complete on both sides.
pub fn check_monoidality(
    seed: u64,
    count: usize,
    params: &GenParams,
    caps: &ExplorationCaps,
) -> LawReport {
    let mut rng = gen::rng_from_seed(seed);
    run_instances("monoidality", count, |_| {
        let p1 = gen::open_net(&mut rng, params);
        let p2 = gen::open_net(&mut rng, params);
        let whole = reach_relation(&tensor_open(&p1, &p2), caps);
        let parts = product_relations(&reach_relation(&p1, caps), &reach_relation(&p2, caps))
            .map_err(err_str)?;
        if whole.left_carrier() != parts.left_carrier()
            || whole.right_carrier() != parts.right_carrier()
        {
            return Err("tensor and product tabulate different boundaries".to_owned());
        }
        let mut compared = 0u64;
        let mut skipped = 0u64;
        for ((x1, complete1, cols1), (x2, complete2, cols2)) in whole.rows().zip(parts.rows()) {
            debug_assert_eq!(x1, x2);
            if !(complete1 && complete2) {
                skipped += 1;
                continue;
            }
            compared += 1;
            if cols1 != cols2 {
                return Err(format!("rows at {x1} differ between tensor and product"));
            }
        }
        Ok(vec![("rows_compared", compared), ("rows_skipped", skipped)])
    })
}

/// A square between open nets carries each listed reachability pair of the
/// source into the target's relation.
pub fn check_square_inclusion(
    seed: u64,
    count: usize,
    params: &GenParams,
    caps: &ExplorationCaps,
) -> LawReport {
    let mut rng = gen::rng_from_seed(seed);
    run_instances("square-inclusion", count, |_| {
        let open = gen::open_net(&mut rng, params);
        let square = gen::square(&mut rng, params, &open);
        let source = reach_relation(square.source(), caps);
        let target = reach_relation(square.target(), caps);
        let inclusion = map_included(square.input_map(), square.output_map(), &source, &target)
            .map_err(err_str)?;
        if !inclusion.holds {
            let (x, y) = inclusion
                .violation
                .expect("failed inclusions carry a violation");
            return Err(format!(
                "pair ({x}, {y}) is not carried into the target relation"
            ));
        }
        Ok(vec![
            ("pairs_checked", inclusion.checked as u64),
            ("pairs_skipped", inclusion.skipped as u64),
        ])
    })
}

/// Runs the whole suite with one base seed, offsetting it per law.
pub fn run_all(
    seed: u64,
    count: usize,
    params: &GenParams,
    caps: &ExplorationCaps,
) -> Vec<LawReport> {
    vec![
        check_unitors(seed, count, params),
        check_associator(seed.wrapping_add(1), count, params),
        check_pentagon(seed.wrapping_add(2), count, params),
        check_triangle(seed.wrapping_add(3), count, params),
        check_symmetry(seed.wrapping_add(4), count, params),
        check_interchange(seed.wrapping_add(5), count, params),
        check_iso_search(seed.wrapping_add(6), count, params),
        check_lax_inclusion(seed.wrapping_add(7), count, params, caps),
        check_identity_relation(seed.wrapping_add(8), count, caps),
        check_monoidality(seed.wrapping_add(9), count, params, caps),
        check_square_inclusion(seed.wrapping_add(10), count, params, caps),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_whole_suite_holds_on_a_small_batch() {
        let params = GenParams::default();
        let caps = ExplorationCaps::new(3, 6, 2000).unwrap();
        for report in run_all(2024, 6, &params, &caps) {
            assert!(
                report.holds(),
                "law `{}` failed: {:?}",
                report.law,
                report.failures
            );
        }
    }

    #[test]
    fn reports_serialize_to_json() {
        let params = GenParams::default();
        let report = check_unitors(5, 2, &params);
        let rendered = serde_json::to_string(&report).unwrap();
        assert!(rendered.contains("\"law\":\"unitors\""));
    }
}
