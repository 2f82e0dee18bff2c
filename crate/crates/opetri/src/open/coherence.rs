//! Canonical coherence isomorphisms for composition and tensor of open nets.
//!
//! Gluing renames the identified places canonically, so differently
//! bracketed composites of the same constituents are usually distinct
//! values. They are always isomorphic, and the isomorphism is determined by
//! the gluing structure: each atom of one side is hit by an injection from a
//! constituent, and the corresponding injection on the other side says where
//! it must go. [`canonical_iso`] rebuilds both sides from the constituents
//! named in the witness, checks they match the given values, and reads the
//! isomorphism off the injections. No search is involved.

use std::collections::BTreeMap;

use crate::petri::{PetriError, PetriMorphism, PetriNet};

use super::{compose_open_parts, tensor_open_parts, OpenError, OpenNetMorphism, OpenPetriNet};

/// Which coherence law relates `lhs` to `rhs`, and out of which constituents
/// both sides were built.
///
/// Composition is written in diagram order throughout: `compose_open(p, q)`
/// runs `p` first. The unitor conventions follow that reading.
#[derive(Debug, Clone)]
pub enum CoherenceWitness {
    /// `compose(compose(p, q), r)` vs `compose(p, compose(q, r))`
    Associator {
        p: OpenPetriNet,
        q: OpenPetriNet,
        r: OpenPetriNet,
    },
    /// `compose(p, identity(outputs))` vs `p`
    LeftUnitor { p: OpenPetriNet },
    /// `compose(identity(inputs), p)` vs `p`
    RightUnitor { p: OpenPetriNet },
    /// `tensor(p, q)` vs `tensor(q, p)`
    Symmetry { p: OpenPetriNet, q: OpenPetriNet },
}

fn id_map<'a>(keys: impl Iterator<Item = &'a str>) -> BTreeMap<String, String> {
    keys.map(|k| (k.to_owned(), k.to_owned())).collect()
}

/// Builds the morphism `dom -> cod` determined by pairs of injections with
/// common domains: whatever `into_dom` hits goes where `into_cod` says. The
/// injections must jointly cover `dom` and agree on overlaps.
fn mediate(
    dom: &PetriNet,
    cod: &PetriNet,
    pairs: &[(&PetriMorphism, &PetriMorphism)],
) -> Result<PetriMorphism, PetriError> {
    let mut place_map: BTreeMap<String, String> = BTreeMap::new();
    let mut transition_map: BTreeMap<String, String> = BTreeMap::new();
    for (into_dom, into_cod) in pairs {
        debug_assert_eq!(into_dom.dom(), into_cod.dom());
        for (atom, image) in into_dom.place_map() {
            let forced = into_cod.place_image(atom).to_owned();
            if let Some(prev) = place_map.insert(image.clone(), forced.clone()) {
                assert_eq!(prev, forced, "injections disagree on place `{image}`");
            }
        }
        for (atom, image) in into_dom.transition_map() {
            let forced = into_cod.transition_image(atom).to_owned();
            if let Some(prev) = transition_map.insert(image.clone(), forced.clone()) {
                assert_eq!(prev, forced, "injections disagree on transition `{image}`");
            }
        }
    }
    PetriMorphism::new(dom.clone(), cod.clone(), transition_map, place_map)
}

/// The canonical isomorphism `lhs -> rhs` for the coherence case described
/// by `witness`. Both sides are reconstructed from the constituents; if
/// either differs from the given value the witness is rejected.
pub fn canonical_iso(
    lhs: &OpenPetriNet,
    rhs: &OpenPetriNet,
    witness: &CoherenceWitness,
) -> Result<OpenNetMorphism, OpenError> {
    match witness {
        CoherenceWitness::Associator { p, q, r } => {
            let pq = compose_open_parts(p, q)?;
            let lhs_built = compose_open_parts(&pq.result, r)?;
            if &lhs_built.result != lhs {
                return Err(OpenError::WitnessMismatch { side: "lhs" });
            }
            let qr = compose_open_parts(q, r)?;
            let rhs_built = compose_open_parts(p, &qr.result)?;
            if &rhs_built.result != rhs {
                return Err(OpenError::WitnessMismatch { side: "rhs" });
            }
            let u_p = pq.pushout.left.then(&lhs_built.pushout.left)?;
            let u_q = pq.pushout.right.then(&lhs_built.pushout.left)?;
            let u_r = lhs_built.pushout.right.clone();
            let v_p = rhs_built.pushout.left.clone();
            let v_q = qr.pushout.left.then(&rhs_built.pushout.right)?;
            let v_r = qr.pushout.right.then(&rhs_built.pushout.right)?;
            let net_morphism = mediate(
                lhs.net(),
                rhs.net(),
                &[(&u_p, &v_p), (&u_q, &v_q), (&u_r, &v_r)],
            )?;
            OpenNetMorphism::new(
                lhs.clone(),
                rhs.clone(),
                id_map(lhs.inputs()),
                id_map(lhs.outputs()),
                net_morphism,
            )
        }
        CoherenceWitness::LeftUnitor { p } => {
            let unit = OpenPetriNet::identity(p.outputs());
            let built = compose_open_parts(p, &unit)?;
            if &built.result != lhs {
                return Err(OpenError::WitnessMismatch { side: "lhs" });
            }
            if p != rhs {
                return Err(OpenError::WitnessMismatch { side: "rhs" });
            }
            let id_p = PetriMorphism::identity(p.net());
            // the unit's places land in p along the output assignment
            let unit_to_p = p.output_leg();
            let net_morphism = mediate(
                lhs.net(),
                p.net(),
                &[
                    (&built.pushout.left, &id_p),
                    (&built.pushout.right, &unit_to_p),
                ],
            )?;
            OpenNetMorphism::new(
                lhs.clone(),
                p.clone(),
                id_map(lhs.inputs()),
                id_map(lhs.outputs()),
                net_morphism,
            )
        }
        CoherenceWitness::RightUnitor { p } => {
            let unit = OpenPetriNet::identity(p.inputs());
            let built = compose_open_parts(&unit, p)?;
            if &built.result != lhs {
                return Err(OpenError::WitnessMismatch { side: "lhs" });
            }
            if p != rhs {
                return Err(OpenError::WitnessMismatch { side: "rhs" });
            }
            let id_p = PetriMorphism::identity(p.net());
            let unit_to_p = p.input_leg();
            let net_morphism = mediate(
                lhs.net(),
                p.net(),
                &[
                    (&built.pushout.left, &unit_to_p),
                    (&built.pushout.right, &id_p),
                ],
            )?;
            OpenNetMorphism::new(
                lhs.clone(),
                p.clone(),
                id_map(lhs.inputs()),
                id_map(lhs.outputs()),
                net_morphism,
            )
        }
        CoherenceWitness::Symmetry { p, q } => {
            let fwd = tensor_open_parts(p, q);
            let rev = tensor_open_parts(q, p);
            if &fwd.result != lhs {
                return Err(OpenError::WitnessMismatch { side: "lhs" });
            }
            if &rev.result != rhs {
                return Err(OpenError::WitnessMismatch { side: "rhs" });
            }
            let net_morphism = mediate(
                lhs.net(),
                rhs.net(),
                &[
                    (&fwd.coproduct.left, &rev.coproduct.right),
                    (&fwd.coproduct.right, &rev.coproduct.left),
                ],
            )?;
            // boundary points swap sides through the tagged injections
            let mut input_map = BTreeMap::new();
            for (x, tagged) in &fwd.input_left {
                input_map.insert(tagged.clone(), rev.input_right[x].clone());
            }
            for (x, tagged) in &fwd.input_right {
                input_map.insert(tagged.clone(), rev.input_left[x].clone());
            }
            let mut output_map = BTreeMap::new();
            for (y, tagged) in &fwd.output_left {
                output_map.insert(tagged.clone(), rev.output_right[y].clone());
            }
            for (y, tagged) in &fwd.output_right {
                output_map.insert(tagged.clone(), rev.output_left[y].clone());
            }
            OpenNetMorphism::new(
                lhs.clone(),
                rhs.clone(),
                input_map,
                output_map,
                net_morphism,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{compose_open, tensor_open};
    use super::*;

    /// Chain stage owning a private place `a` plus its handoff place. Every
    /// stage uses the boundary point `b` on both sides, so stages chain in
    /// any arrangement; the distinct target weights keep them
    /// distinguishable.
    fn stage(own_out: &str, weight: u64) -> OpenPetriNet {
        let net =
            PetriNet::new(&["a", own_out], &[("t", &[("a", 1)], &[(own_out, weight)])]).unwrap();
        OpenPetriNet::from_pairs(net, &[("b", "a")], &[("b", own_out)]).unwrap()
    }

    #[test]
    fn associator_relates_both_bracketings() {
        let p = stage("hand_p", 1);
        let q = stage("hand_q", 2);
        let r = stage("hand_r", 3);
        let lhs = compose_open(&compose_open(&p, &q).unwrap(), &r).unwrap();
        let rhs = compose_open(&p, &compose_open(&q, &r).unwrap()).unwrap();
        // bracketing shifts which collision suffix each glued class receives
        assert_ne!(lhs, rhs);
        let iso = canonical_iso(
            &lhs,
            &rhs,
            &CoherenceWitness::Associator {
                p: p.clone(),
                q: q.clone(),
                r: r.clone(),
            },
        )
        .unwrap();
        let inv = iso.inverse().expect("coherence isos are invertible");
        assert_eq!(iso.v_comp(&inv).unwrap(), OpenNetMorphism::identity(&lhs));
        assert_eq!(inv.v_comp(&iso).unwrap(), OpenNetMorphism::identity(&rhs));
    }

    #[test]
    fn unitors_strip_identity_composites() {
        let p = stage("hand", 2);
        let after = compose_open(&p, &OpenPetriNet::identity(p.outputs())).unwrap();
        assert_ne!(after, p, "gluing a unit still rebuilds the net value");
        let iso =
            canonical_iso(&after, &p, &CoherenceWitness::LeftUnitor { p: p.clone() }).unwrap();
        let inv = iso.inverse().unwrap();
        assert_eq!(iso.v_comp(&inv).unwrap(), OpenNetMorphism::identity(&after));

        let before = compose_open(&OpenPetriNet::identity(p.inputs()), &p).unwrap();
        let iso =
            canonical_iso(&before, &p, &CoherenceWitness::RightUnitor { p: p.clone() }).unwrap();
        assert!(iso.inverse().is_some());
    }

    #[test]
    fn symmetry_swaps_the_tagged_copies() {
        let p = stage("hand_p", 1);
        let q = stage("hand_q", 2);
        let lhs = tensor_open(&p, &q);
        let rhs = tensor_open(&q, &p);
        let iso = canonical_iso(
            &lhs,
            &rhs,
            &CoherenceWitness::Symmetry {
                p: p.clone(),
                q: q.clone(),
            },
        )
        .unwrap();
        // p's private place is `a` on the left and the suffixed copy on the right
        assert_eq!(iso.net_morphism().place_image("a"), "a#2");
        assert_eq!(iso.net_morphism().place_image("a#2"), "a");
        let back = canonical_iso(
            &rhs,
            &lhs,
            &CoherenceWitness::Symmetry {
                p: q.clone(),
                q: p.clone(),
            },
        )
        .unwrap();
        // the swap is self-inverse
        assert_eq!(iso.v_comp(&back).unwrap(), OpenNetMorphism::identity(&lhs));
    }

    #[test]
    fn witness_must_match_the_construction() {
        let p = stage("hand_p", 1);
        let q = stage("hand_q", 2);
        let glued = compose_open(&p, &q).unwrap();
        let err =
            canonical_iso(&glued, &p, &CoherenceWitness::LeftUnitor { p: p.clone() }).unwrap_err();
        assert_eq!(err, OpenError::WitnessMismatch { side: "lhs" });
    }
}
