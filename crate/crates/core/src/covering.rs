//! Coalgebra coverings: lifted subcoalgebras of smash quivers, the
//! homogeneity/covering equivalence, relators from minimal elements and the
//! universal grading group.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::coalgebra::{
    is_homogeneous, lift_vector, Coalgebra, minimal_partition, verify_coalgebra_map, CoalgebraError, LinearMap, MapCheck, PathIndex,
    SubcoalgebraBasis,
};
use crate::exactlin::{rref, SparseVector};
use crate::groups::{abelianize, GroupDescriptor, GroupElement, Word};
use crate::quiver::{walk_to_word, Pi1Presentation, Quiver, Step, Walk};
use crate::voltage::{ArrowWeighting, SmashQuiver, VertexWeighting};

/// A subcoalgebra `B` of `kQ`, a grading, and a lift of `B` into the path
/// coalgebra of a window of `Q x| G`.
#[derive(Clone, Debug)]
pub struct CoalgebraCovering {
    pub base: SubcoalgebraBasis,
    pub weighting: ArrowWeighting,
    pub quiver: SmashQuiver,
    pub lifted: SubcoalgebraBasis,
    /// Lifted basis element to base coordinates.
    pub projection: LinearMap,
}

fn project_vector(sq: &SmashQuiver, from: &PathIndex, to: &PathIndex, v: &SparseVector) -> Option<SparseVector> {
    let f = &sq.morphism;
    let mut out = SparseVector::new();
    for (i, c) in v.iter() {
        let p = &from.paths[i];
        let arrows: Vec<usize> = p.arrows.iter().map(|&a| f.arrow_map[a]).collect();
        out.add_at(to.find(f.vertex_map[p.source], &arrows)?, c);
    }
    Some(out)
}

impl CoalgebraCovering {
    fn assemble(base: &SubcoalgebraBasis, delta: &ArrowWeighting, sq: SmashQuiver, lifts: Vec<SparseVector>) -> Result<Self, CoalgebraError> {
        let index = PathIndex::new(sq.quiver(), base.truncation());
        let lifted = SubcoalgebraBasis::from_space(sq.quiver(), index, rref(lifts))?;
        let projection = lifted
            .space
            .rows()
            .iter()
            .map(|r| base.coordinates(&project_vector(&sq, &lifted.index, &base.index, r)?))
            .collect();
        Ok(CoalgebraCovering { base: base.clone(), weighting: delta.clone(), quiver: sq, lifted, projection })
    }

    /// `B x| kG` realised inside `k(Q x| G)`: the span of the lifts of every
    /// homogeneous basis element from every window point where it fits.
    pub fn build(base: &SubcoalgebraBasis, delta: &ArrowWeighting, window: Vec<GroupElement>) -> Result<Self, CoalgebraError> {
        let report = is_homogeneous(base, delta)?;
        if !report.homogeneous {
            let w = report.witness.map(|w| base.format_element(&w)).unwrap_or_default();
            return Err(CoalgebraError::Inhomogeneous(w));
        }
        let sq = SmashQuiver::new(&base.quiver, delta, window)?;
        let index = PathIndex::new(sq.quiver(), base.truncation());
        let mut lifts = Vec::new();
        for g in &sq.window {
            for k in 0..base.dim() {
                lifts.extend(lift_vector(&sq, &index, &base.index, base.row(k), g));
            }
        }
        Self::assemble(base, delta, sq, lifts)
    }

    /// The span of the lifts of the individual paths of `B` (and of its
    /// minimal elements, path by path). Defined for any weighting.
    pub fn build_by_paths(base: &SubcoalgebraBasis, delta: &ArrowWeighting, window: Vec<GroupElement>) -> Result<Self, CoalgebraError> {
        let sq = SmashQuiver::new(&base.quiver, delta, window)?;
        let index = PathIndex::new(sq.quiver(), base.truncation());
        let mut lifts = Vec::new();
        for g in &sq.window {
            for i in base.space.support() {
                lifts.extend(lift_vector(&sq, &index, &base.index, &SparseVector::unit(i), g));
            }
        }
        Self::assemble(base, delta, sq, lifts)
    }

    pub fn with_radius(base: &SubcoalgebraBasis, delta: &ArrowWeighting, radius: usize) -> Result<Self, CoalgebraError> {
        let w = delta.group.ball(radius)?;
        Self::build(base, delta, w)
    }

    /// `F: lifted -> B` checked as a coalgebra map.
    pub fn verify_projection(&self) -> MapCheck {
        verify_coalgebra_map(&self.projection, &self.lifted, &self.base)
    }

    /// Lifts `b` from `start` path by path; `None` if a lift leaves the window.
    pub fn lift_from(&self, b: &SparseVector, start: usize) -> Option<SparseVector> {
        let f = &self.quiver.morphism;
        let mut out = SparseVector::new();
        for (i, c) in b.iter() {
            let p = &self.base.index.paths[i];
            let w = Walk { start: p.source, steps: p.arrows.iter().map(|&a| Step::fwd(a)).collect() };
            let lift = f.lift_walk(&w, start).ok()?;
            let arrows: Vec<usize> = lift.steps.iter().map(|s| s.arrow).collect();
            out.add_at(self.lifted.index.find(start, &arrows)?, c);
        }
        Some(out)
    }

    /// No proper nonempty part of the support of `v` lies in the lifted span.
    pub fn is_minimal_in_lifted(&self, v: &SparseVector) -> bool {
        let support: Vec<usize> = v.support().collect();
        let n = support.len();
        if n > 20 {
            return false;
        }
        (1..(1u64 << n) - 1).all(|mask| {
            let keep: BTreeSet<usize> = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| support[k]).collect();
            !self.lifted.contains(&v.restrict(&keep))
        })
    }

    /// Every minimal element of `B` lifts, from every interior point of its
    /// source fiber, to a minimal element of the lift with one endpoint.
    pub fn is_coalgebra_covering(&self) -> CoveringReport {
        let mut checked = 0;
        for blk in minimal_partition(&self.base) {
            let Some(b) = blk.representative else { continue };
            for gi in 0..self.quiver.window.len() {
                let start = gi * self.base.quiver.vertex_count() + blk.source;
                if !self.quiver.interior[start] {
                    continue;
                }
                let Some(lift) = self.lift_from(&b, start) else { continue };
                checked += 1;
                let ok = self.lifted.index.endpoints(&lift).is_some()
                    && self.lifted.contains(&lift)
                    && self.is_minimal_in_lifted(&lift);
                if !ok {
                    return CoveringReport {
                        ok: false,
                        checked,
                        witness: Some(CoveringWitness {
                            element: self.base.format_element(&b),
                            vertex: self.quiver.quiver().vertices[start].clone(),
                        }),
                    };
                }
            }
        }
        CoveringReport { ok: true, checked, witness: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoveringWitness {
    pub element: String,
    pub vertex: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoveringReport {
    pub ok: bool,
    pub checked: usize,
    pub witness: Option<CoveringWitness>,
}

/// Evaluation of the homogeneity, connectedness and covering conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub homogeneous: bool,
    pub connected: bool,
    #[serde(rename = "coveringOK")]
    pub covering_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CrossCheck {
    /// Homogeneity and the covering property agree.
    pub fn consistent(&self) -> bool {
        self.homogeneous == self.covering_ok
    }
}

/// When `B` is homogeneous the covering is the lift of `B x| kG`; otherwise
/// the only candidate is the span of path lifts, which is then tested.
pub fn theorem_cov_crosscheck(
    b: &SubcoalgebraBasis,
    delta: &ArrowWeighting,
    pres: &Pi1Presentation,
    window: Vec<GroupElement>,
) -> Result<CrossCheck, CoalgebraError> {
    let h = is_homogeneous(b, delta)?;
    let connected = delta.is_connected(&b.quiver, pres)?;
    let cov = if h.homogeneous {
        CoalgebraCovering::build(b, delta, window)?
    } else {
        CoalgebraCovering::build_by_paths(b, delta, window)?
    };
    let report = cov.is_coalgebra_covering();
    let witness = h
        .witness
        .map(|w| b.format_element(&w))
        .or_else(|| report.witness.as_ref().map(|w| w.element.clone()));
    Ok(CrossCheck { homogeneous: h.homogeneous, connected, covering_ok: report.ok, witness })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relator {
    /// The closed walk `w^-1 p1^-1 pj w` at the base vertex.
    pub walk: Walk,
    pub word: Word,
    pub first: usize,
    pub other: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelatorSet {
    pub presentation: Pi1Presentation,
    pub relators: Vec<Relator>,
}

impl RelatorSet {
    pub fn words(&self) -> Vec<Word> {
        self.relators.iter().map(|r| r.word.clone()).collect()
    }
}

fn path_walk(index: &PathIndex, i: usize) -> Walk {
    let p = &index.paths[i];
    Walk { start: p.source, steps: p.arrows.iter().map(|&a| Step::fwd(a)).collect() }
}

/// One relator per pair `(p1, pj)`, `j >= 2`, in each nontrivial block of
/// the minimal partition.
pub fn extract_relators(b: &SubcoalgebraBasis, pres: &Pi1Presentation) -> RelatorSet {
    let q = &b.quiver;
    let mut relators = Vec::new();
    for blk in minimal_partition(b) {
        if blk.paths.len() < 2 {
            continue;
        }
        let p1 = path_walk(&b.index, blk.paths[0]);
        let w = &pres.geodesics[blk.source];
        for &j in &blk.paths[1..] {
            let pj = path_walk(&b.index, j);
            let mut steps = w.steps.clone();
            steps.extend(pj.steps.iter().copied());
            steps.extend(p1.inverse(q).steps);
            steps.extend(w.inverse(q).steps);
            let walk = Walk { start: pres.base, steps };
            let word = walk_to_word(q, pres, &walk).expect("closed at the base");
            relators.push(Relator { walk, word, first: blk.paths[0], other: j });
        }
    }
    RelatorSet { presentation: pres.clone(), relators }
}

/// The quotient of the fundamental group by the relators, in a computable
/// backend, and the universal weighting into it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalGradingGroup {
    pub presentation: Pi1Presentation,
    pub relators: Vec<Word>,
    pub backend: GroupDescriptor,
    /// False when the backend is the abelianization of a quotient that may
    /// not be abelian.
    pub exact: bool,
    pub generator_images: Vec<GroupElement>,
    /// Backend coordinate to exponent vector over the generators (abelian
    /// backends only).
    pub coordinate_preimages: Vec<Vec<i64>>,
    pub weighting: ArrowWeighting,
}

impl UniversalGradingGroup {
    pub fn label(&self) -> String {
        let name = match &self.backend {
            GroupDescriptor::Free { rank: 0 } => "1".to_string(),
            GroupDescriptor::Free { rank: 1 } => "Z".to_string(),
            g => g.to_string(),
        };
        if self.exact {
            name
        } else {
            format!("{name} (abelianized)")
        }
    }

    /// Free rank of the backend.
    pub fn rank(&self) -> usize {
        match &self.backend {
            GroupDescriptor::Free { rank } => *rank,
            GroupDescriptor::FgAbelian { free_rank, .. } => *free_rank,
            _ => 0,
        }
    }

    /// Image of a backend element under the homomorphism sending generator
    /// `i` to `images[i]` in `target`. For abelian backends `target` must be
    /// abelian on the images.
    pub fn map_element(&self, h: &GroupElement, target: &GroupDescriptor, images: &[GroupElement]) -> Option<GroupElement> {
        match h {
            GroupElement::Free(w) => w.letters().iter().try_fold(target.identity(), |acc, l| {
                let g = &images[l.generator];
                let g = if l.inverse { target.inverse(g).ok()? } else { g.clone() };
                target.multiply(&acc, &g).ok()
            }),
            GroupElement::Abelian(coords) => {
                let mut acc = target.identity();
                for (c, &e) in coords.iter().enumerate() {
                    for (gen, &m) in self.coordinate_preimages[c].iter().enumerate() {
                        acc = target.multiply(&acc, &target.pow(&images[gen], m * e).ok()?).ok()?;
                    }
                }
                Some(acc)
            }
            GroupElement::Finite(_) => None,
        }
    }
}

/// Relators that are not the identity word determine the quotient. With no
/// relators the backend is free; otherwise it is the abelianization, exact
/// when the fundamental group has rank at most one.
pub fn universal_grading_group(b: &SubcoalgebraBasis, pres: &Pi1Presentation) -> UniversalGradingGroup {
    let rank = pres.rank();
    let relators: Vec<Word> = extract_relators(b, pres).words().into_iter().filter(|w| !w.is_empty()).collect();
    let (backend, exact, generator_images, coordinate_preimages) = if relators.is_empty() {
        let images = (0..rank).map(|i| GroupElement::Free(Word::generator(i))).collect();
        (GroupDescriptor::Free { rank }, true, images, Vec::new())
    } else {
        let ab = abelianize(rank, &relators);
        (ab.group, rank <= 1, ab.generator_images, ab.coordinate_preimages)
    };
    let values = (0..b.quiver.arrow_count())
        .map(|a| match pres.generator_of_arrow(a) {
            Some(i) => generator_images[i].clone(),
            None => backend.identity(),
        })
        .collect();
    let weighting = ArrowWeighting { group: backend.clone(), values };
    UniversalGradingGroup { presentation: pres.clone(), relators, backend, exact, generator_images, coordinate_preimages, weighting }
}

/// The universal covering coalgebra over a window of the given radius.
pub fn universal_cover(b: &SubcoalgebraBasis, pres: &Pi1Presentation, radius: usize) -> Result<(UniversalGradingGroup, CoalgebraCovering), CoalgebraError> {
    let u = universal_grading_group(b, pres);
    let cov = CoalgebraCovering::with_radius(b, &u.weighting, radius)?;
    Ok((u, cov))
}

/// The map of smash quivers `x x| h -> x x| gamma(x) phi(h)` from the
/// universal cover to the cover of another grading, with
/// `gamma(x) = delta'(geodesic to x)` and `phi` sending each generator to the
/// weight of its fundamental cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorMap {
    pub gamma: VertexWeighting,
    pub generator_images: Vec<GroupElement>,
    pub vertex_map: Vec<Option<usize>>,
    pub arrow_map: Vec<Option<usize>>,
    /// Arrows whose image was checked to respect incidence.
    pub checked: usize,
    pub ok: bool,
}

pub fn factor_map(u: &UniversalGradingGroup, from: &SmashQuiver, to: &SmashQuiver) -> FactorMap {
    let q = &from.base;
    let target = &to.weighting;
    let pres = &u.presentation;
    let gamma = VertexWeighting {
        group: target.group.clone(),
        values: pres.geodesics.iter().map(|w| target.weight_walk(w)).collect(),
    };
    let images: Vec<GroupElement> = (0..pres.rank()).map(|i| target.weight_walk(&pres.fundamental_cycle(q, i))).collect();
    let image_of = |x: usize, h: &GroupElement| -> Option<GroupElement> {
        let ph = u.map_element(h, &target.group, &images)?;
        target.group.multiply(&gamma.values[x], &ph).ok()
    };
    let vertex_map: Vec<Option<usize>> = (0..from.quiver().vertex_count())
        .map(|v| {
            let (x, gi) = from.vertex_coords(v);
            to.vertex(x, &image_of(x, &from.window[gi])?)
        })
        .collect();
    let mut ok = true;
    let mut checked = 0;
    let arrow_map: Vec<Option<usize>> = from
        .arrow_coords
        .iter()
        .enumerate()
        .map(|(i, &(a, gi))| {
            let s = q.arrows[a].source;
            let img = to.arrow(a, &image_of(s, &from.window[gi])?)?;
            let fa = &from.quiver().arrows[i];
            let ta = &to.quiver().arrows[img];
            if let (Some(vs), Some(vt)) = (vertex_map[fa.source], vertex_map[fa.target]) {
                checked += 1;
                ok &= vs == ta.source && vt == ta.target;
            }
            Some(img)
        })
        .collect();
    FactorMap { gamma, generator_images: images, vertex_map, arrow_map, checked, ok }
}

/// Relator walks have identity weight.
pub fn relators_vanish(rel: &RelatorSet, delta: &ArrowWeighting) -> bool {
    rel.relators.iter().all(|r| delta.group.is_identity(&delta.weight_walk(&r.walk)))
}

/// The vertex weighting relating the universal weightings of two spanning
/// trees: `twist(delta_2, gamma) = phi o delta_1` with `gamma(x)` the
/// `delta_2`-weight of the first tree's geodesic to `x`.
pub fn tree_change(q: &Quiver, u1: &UniversalGradingGroup, u2: &UniversalGradingGroup) -> Option<(VertexWeighting, ArrowWeighting)> {
    let target = &u2.weighting;
    let pres = &u1.presentation;
    let gamma = VertexWeighting { group: target.group.clone(), values: pres.geodesics.iter().map(|w| target.weight_walk(w)).collect() };
    let images: Vec<GroupElement> = (0..pres.rank()).map(|i| target.weight_walk(&pres.fundamental_cycle(q, i))).collect();
    let pushed = u1
        .weighting
        .values
        .iter()
        .map(|h| u1.map_element(h, &target.group, &images))
        .collect::<Option<Vec<_>>>()?;
    Some((gamma, ArrowWeighting { group: target.group.clone(), values: pushed }))
}
