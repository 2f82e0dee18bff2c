//! Petri nets with input and output boundaries.
//!
//! An [`OpenPetriNet`] is a net together with two finite boundary sets and a
//! place assignment for every boundary point. Open nets whose boundaries
//! match compose by gluing: the output places of the first are identified
//! with the input places of the second via a pushout of the underlying nets.
//! Independent nets combine side by side with [`tensor_open`].
//!
//! Composition is associative and unital only up to the canonical
//! isomorphisms constructed in [`coherence`]; the gluing renames places, so
//! strict equality of differently bracketed composites fails by design.
//!
//! An [`OpenNetMorphism`] is a square between open nets: boundary maps plus
//! a net morphism that agree on the boundary assignments. Squares compose
//! vertically (stacking) and horizontally (alongside a gluing, via the
//! mediating morphism out of the pushout).

mod coherence;
mod iso;

pub use coherence::{canonical_iso, CoherenceWitness};
pub use iso::{iso_open, IsoSearch};

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::multiset::{Carrier, Multiset};
use crate::petri::{
    coproduct, pushout, tagged_set_union, Coproduct, PetriError, PetriMorphism, PetriNet, Pushout,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpenError {
    #[error(transparent)]
    Petri(#[from] PetriError),
    #[error("{boundary} point `{point}` is assigned to `{place}`, which the net lacks")]
    BoundaryTargetMissing {
        boundary: &'static str,
        point: String,
        place: String,
    },
    #[error("outputs of the first net differ from inputs of the second")]
    BoundaryMismatch,
    #[error("net morphism endpoints differ from the open nets")]
    EndpointMismatch,
    #[error("{boundary} boundary map is undefined on `{point}`")]
    BoundaryMapNotTotal {
        boundary: &'static str,
        point: String,
    },
    #[error("{boundary} boundary map sends `{point}` to `{image}`, which the target lacks")]
    BoundaryMapOutside {
        boundary: &'static str,
        point: String,
        image: String,
    },
    #[error("{boundary} boundary square fails at `{point}`")]
    BoundarySquare {
        boundary: &'static str,
        point: String,
    },
    #[error("middle boundary maps of a horizontal composite disagree")]
    MiddleMismatch,
    #[error("vertical composite endpoints do not stack")]
    VerticalMismatch,
    #[error("{side} was not built by the stated coherence case")]
    WitnessMismatch { side: &'static str },
}

/// A net with named input and output boundary points, each assigned to a
/// place of the net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenPetriNet {
    net: PetriNet,
    input_map: BTreeMap<String, String>,
    output_map: BTreeMap<String, String>,
}

fn check_boundary(
    boundary: &'static str,
    map: &BTreeMap<String, String>,
    net: &PetriNet,
) -> Result<(), OpenError> {
    for (point, place) in map {
        if !net.places().contains(place) {
            return Err(OpenError::BoundaryTargetMissing {
                boundary,
                point: point.clone(),
                place: place.clone(),
            });
        }
    }
    Ok(())
}

impl OpenPetriNet {
    /// Wraps a net with boundaries. The boundary sets are the keys of the
    /// two maps; every assigned place must exist in the net.
    pub fn new(
        net: PetriNet,
        input_map: BTreeMap<String, String>,
        output_map: BTreeMap<String, String>,
    ) -> Result<OpenPetriNet, OpenError> {
        check_boundary("input", &input_map, &net)?;
        check_boundary("output", &output_map, &net)?;
        Ok(OpenPetriNet {
            net,
            input_map,
            output_map,
        })
    }

    /// Convenience constructor from string pairs.
    pub fn from_pairs(
        net: PetriNet,
        inputs: &[(&str, &str)],
        outputs: &[(&str, &str)],
    ) -> Result<OpenPetriNet, OpenError> {
        let to_map = |pairs: &[(&str, &str)]| {
            pairs
                .iter()
                .map(|(a, b)| ((*a).to_owned(), (*b).to_owned()))
                .collect()
        };
        OpenPetriNet::new(net, to_map(inputs), to_map(outputs))
    }

    /// The open net on a discrete net whose boundaries are both the given
    /// set, assigned identically: the unit for composition.
    pub fn identity<I, S>(points: I) -> OpenPetriNet
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let net = PetriNet::discrete(points);
        let id: BTreeMap<String, String> = net
            .places()
            .atoms()
            .iter()
            .map(|p| (p.clone(), p.clone()))
            .collect();
        OpenPetriNet {
            net,
            input_map: id.clone(),
            output_map: id,
        }
    }

    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    /// Input boundary point names, sorted.
    pub fn inputs(&self) -> impl Iterator<Item = &str> {
        self.input_map.keys().map(String::as_str)
    }

    /// Output boundary point names, sorted.
    pub fn outputs(&self) -> impl Iterator<Item = &str> {
        self.output_map.keys().map(String::as_str)
    }

    pub fn input_map(&self) -> &BTreeMap<String, String> {
        &self.input_map
    }

    pub fn output_map(&self) -> &BTreeMap<String, String> {
        &self.output_map
    }

    pub fn input_place(&self, point: &str) -> &str {
        &self.input_map[point]
    }

    pub fn output_place(&self, point: &str) -> &str {
        &self.output_map[point]
    }

    /// Carrier for markings of the input boundary.
    pub fn input_carrier(&self) -> Arc<Carrier> {
        Carrier::new(self.input_map.keys().cloned())
    }

    /// Carrier for markings of the output boundary.
    pub fn output_carrier(&self) -> Arc<Carrier> {
        Carrier::new(self.output_map.keys().cloned())
    }

    /// Pushes an input-boundary marking into the net's places.
    pub fn input_to_places(&self, marking: &Multiset) -> Multiset {
        marking.map_atoms(&self.input_map, self.net.places())
    }

    /// Pushes an output-boundary marking into the net's places.
    pub fn output_to_places(&self, marking: &Multiset) -> Multiset {
        marking.map_atoms(&self.output_map, self.net.places())
    }

    /// The output assignment as a morphism out of the discrete boundary net.
    pub(crate) fn output_leg(&self) -> PetriMorphism {
        let boundary = PetriNet::discrete(self.output_map.keys().cloned());
        PetriMorphism::new(
            boundary,
            self.net.clone(),
            BTreeMap::new(),
            self.output_map.clone(),
        )
        .expect("output assignment is a morphism")
    }

    /// The input assignment as a morphism out of the discrete boundary net.
    pub(crate) fn input_leg(&self) -> PetriMorphism {
        let boundary = PetriNet::discrete(self.input_map.keys().cloned());
        PetriMorphism::new(
            boundary,
            self.net.clone(),
            BTreeMap::new(),
            self.input_map.clone(),
        )
        .expect("input assignment is a morphism")
    }
}

/// A composite open net together with the pushout it was glued by.
#[derive(Debug, Clone)]
pub struct Composition {
    pub result: OpenPetriNet,
    /// gluing of the two underlying nets; `pushout.left` injects the first
    /// net, `pushout.right` the second
    pub pushout: Pushout,
}

/// Glues `p` then `q`: the outputs of `p` must be exactly the inputs of `q`,
/// and the places they name are identified.
pub fn compose_open(p: &OpenPetriNet, q: &OpenPetriNet) -> Result<OpenPetriNet, OpenError> {
    Ok(compose_open_parts(p, q)?.result)
}

/// As [`compose_open`], but keeps the pushout so callers can track where
/// places and transitions of the parts ended up.
pub fn compose_open_parts(p: &OpenPetriNet, q: &OpenPetriNet) -> Result<Composition, OpenError> {
    if !p.outputs().eq(q.inputs()) {
        return Err(OpenError::BoundaryMismatch);
    }
    let po = pushout(&p.output_leg(), &q.input_leg())?;
    let input_map = p
        .input_map
        .iter()
        .map(|(x, place)| (x.clone(), po.left.place_image(place).to_owned()))
        .collect();
    let output_map = q
        .output_map
        .iter()
        .map(|(z, place)| (z.clone(), po.right.place_image(place).to_owned()))
        .collect();
    let result = OpenPetriNet {
        net: po.net.clone(),
        input_map,
        output_map,
    };
    Ok(Composition {
        result,
        pushout: po,
    })
}

/// A side-by-side combination together with the coproduct and the boundary
/// injections.
#[derive(Debug, Clone)]
pub struct TensorParts {
    pub result: OpenPetriNet,
    pub coproduct: Coproduct,
    /// first net's input points into the combined input boundary
    pub input_left: BTreeMap<String, String>,
    pub input_right: BTreeMap<String, String>,
    pub output_left: BTreeMap<String, String>,
    pub output_right: BTreeMap<String, String>,
}

/// Disjoint union of two open nets: nets, inputs, and outputs all combine
/// side by side, with colliding names suffixed canonically.
pub fn tensor_open(p: &OpenPetriNet, q: &OpenPetriNet) -> OpenPetriNet {
    tensor_open_parts(p, q).result
}

/// As [`tensor_open`], but keeps the injections of both constituents.
pub fn tensor_open_parts(p: &OpenPetriNet, q: &OpenPetriNet) -> TensorParts {
    let cp = coproduct(&p.net, &q.net);
    let keys = |m: &BTreeMap<String, String>| m.keys().cloned().collect::<Vec<_>>();
    let (_, input_left, input_right) = tagged_set_union(&keys(&p.input_map), &keys(&q.input_map));
    let (_, output_left, output_right) =
        tagged_set_union(&keys(&p.output_map), &keys(&q.output_map));
    let mut input_map = BTreeMap::new();
    for (x, place) in &p.input_map {
        input_map.insert(input_left[x].clone(), cp.left.place_image(place).to_owned());
    }
    for (x, place) in &q.input_map {
        input_map.insert(
            input_right[x].clone(),
            cp.right.place_image(place).to_owned(),
        );
    }
    let mut output_map = BTreeMap::new();
    for (y, place) in &p.output_map {
        output_map.insert(
            output_left[y].clone(),
            cp.left.place_image(place).to_owned(),
        );
    }
    for (y, place) in &q.output_map {
        output_map.insert(
            output_right[y].clone(),
            cp.right.place_image(place).to_owned(),
        );
    }
    let result = OpenPetriNet {
        net: cp.net.clone(),
        input_map,
        output_map,
    };
    TensorParts {
        result,
        coproduct: cp,
        input_left,
        input_right,
        output_left,
        output_right,
    }
}

/// A square between two open nets: boundary maps and a net morphism that
/// restrict to each other on the boundary assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenNetMorphism {
    source: OpenPetriNet,
    target: OpenPetriNet,
    input_map: BTreeMap<String, String>,
    output_map: BTreeMap<String, String>,
    net_morphism: PetriMorphism,
}

fn check_boundary_map(
    boundary: &'static str,
    map: &BTreeMap<String, String>,
    source_side: &BTreeMap<String, String>,
    target_side: &BTreeMap<String, String>,
    net_morphism: &PetriMorphism,
) -> Result<(), OpenError> {
    for point in source_side.keys() {
        let image = map
            .get(point)
            .ok_or_else(|| OpenError::BoundaryMapNotTotal {
                boundary,
                point: point.clone(),
            })?;
        let target_place = target_side
            .get(image)
            .ok_or_else(|| OpenError::BoundaryMapOutside {
                boundary,
                point: point.clone(),
                image: image.clone(),
            })?;
        if net_morphism.place_image(&source_side[point]) != target_place {
            return Err(OpenError::BoundarySquare {
                boundary,
                point: point.clone(),
            });
        }
    }
    Ok(())
}

impl OpenNetMorphism {
    pub fn new(
        source: OpenPetriNet,
        target: OpenPetriNet,
        input_map: BTreeMap<String, String>,
        output_map: BTreeMap<String, String>,
        net_morphism: PetriMorphism,
    ) -> Result<OpenNetMorphism, OpenError> {
        if net_morphism.dom() != &source.net || net_morphism.cod() != &target.net {
            return Err(OpenError::EndpointMismatch);
        }
        check_boundary_map(
            "input",
            &input_map,
            &source.input_map,
            &target.input_map,
            &net_morphism,
        )?;
        check_boundary_map(
            "output",
            &output_map,
            &source.output_map,
            &target.output_map,
            &net_morphism,
        )?;
        Ok(OpenNetMorphism {
            source,
            target,
            input_map,
            output_map,
            net_morphism,
        })
    }

    pub fn identity(net: &OpenPetriNet) -> OpenNetMorphism {
        let id = |m: &BTreeMap<String, String>| {
            m.keys()
                .map(|k| (k.clone(), k.clone()))
                .collect::<BTreeMap<_, _>>()
        };
        OpenNetMorphism {
            source: net.clone(),
            target: net.clone(),
            input_map: id(&net.input_map),
            output_map: id(&net.output_map),
            net_morphism: PetriMorphism::identity(&net.net),
        }
    }

    pub fn source(&self) -> &OpenPetriNet {
        &self.source
    }

    pub fn target(&self) -> &OpenPetriNet {
        &self.target
    }

    pub fn input_map(&self) -> &BTreeMap<String, String> {
        &self.input_map
    }

    pub fn output_map(&self) -> &BTreeMap<String, String> {
        &self.output_map
    }

    pub fn net_morphism(&self) -> &PetriMorphism {
        &self.net_morphism
    }

    /// Vertical (stacking) composition: `self` then `below`.
    pub fn v_comp(&self, below: &OpenNetMorphism) -> Result<OpenNetMorphism, OpenError> {
        if self.target != below.source {
            return Err(OpenError::VerticalMismatch);
        }
        let chain = |first: &BTreeMap<String, String>, second: &BTreeMap<String, String>| {
            first
                .iter()
                .map(|(k, v)| (k.clone(), second[v].clone()))
                .collect::<BTreeMap<_, _>>()
        };
        OpenNetMorphism::new(
            self.source.clone(),
            below.target.clone(),
            chain(&self.input_map, &below.input_map),
            chain(&self.output_map, &below.output_map),
            self.net_morphism.then(&below.net_morphism)?,
        )
    }

    /// Horizontal composition alongside a gluing: `self : P => P'` next to
    /// `right : Q => Q'` gives a square between the two composites. The
    /// output boundary map of `self` must equal the input boundary map of
    /// `right`, and the net morphism is the mediating morphism out of the
    /// source gluing.
    pub fn h_comp(&self, right: &OpenNetMorphism) -> Result<OpenNetMorphism, OpenError> {
        if self.output_map != right.input_map {
            return Err(OpenError::MiddleMismatch);
        }
        let src = compose_open_parts(&self.source, &right.source)?;
        let tgt = compose_open_parts(&self.target, &right.target)?;
        let from_left = self.net_morphism.then(&tgt.pushout.left)?;
        let from_right = right.net_morphism.then(&tgt.pushout.right)?;
        let mediating = src.pushout.factor(&from_left, &from_right)?;
        OpenNetMorphism::new(
            src.result,
            tgt.result,
            self.input_map.clone(),
            right.output_map.clone(),
            mediating,
        )
    }

    /// The inverse square, when every component is bijective.
    pub fn inverse(&self) -> Option<OpenNetMorphism> {
        let invert =
            |m: &BTreeMap<String, String>, total: usize| -> Option<BTreeMap<String, String>> {
                let inv: BTreeMap<String, String> =
                    m.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
                (inv.len() == m.len() && inv.len() == total).then_some(inv)
            };
        let input_map = invert(&self.input_map, self.target.input_map.len())?;
        let output_map = invert(&self.output_map, self.target.output_map.len())?;
        let net_morphism = self.net_morphism.inverse()?;
        OpenNetMorphism::new(
            self.target.clone(),
            self.source.clone(),
            input_map,
            output_map,
            net_morphism,
        )
        .ok()
    }
}
