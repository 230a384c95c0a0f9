//! Quivers, walks, fundamental-group presentations and quiver coverings.
//!
//! Walks store their steps in the order they are traversed. The algebraic
//! notation composes right to left, so the walk written `b a` (first `a`, then
//! `b`) has steps `[a, b]`, and `concat(later, earlier)` mirrors that notation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{GroupDescriptor, GroupElement, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuiverError {
    #[error("unknown vertex index {0}")]
    UnknownVertex(usize),
    #[error("unknown arrow index {0}")]
    UnknownArrow(usize),
    #[error("walk steps do not compose at step {0}")]
    Broken(usize),
    #[error("endpoint mismatch: cannot follow a walk ending at {end} by one starting at {start}")]
    EndpointMismatch { end: usize, start: usize },
    #[error("the quiver is not connected")]
    Disconnected,
    #[error("walk is not closed at the base vertex {0}")]
    NotClosedAtBase(usize),
    #[error("morphism does not preserve incidence at arrow {0}")]
    NotAMorphism(usize),
    #[error("no unique lift of step {step} from vertex {vertex}")]
    NoLift { step: usize, vertex: usize },
    #[error("start vertex does not lie over the start of the walk")]
    WrongFiber,
    #[error("the covering quiver is too large to analyse exhaustively")]
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A finite directed multigraph; loops and parallel arrows allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<Arrow>) -> Result<Self, QuiverError> {
        for (i, a) in arrows.iter().enumerate() {
            if a.source >= vertices.len() || a.target >= vertices.len() {
                return Err(QuiverError::UnknownArrow(i));
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    /// Convenience constructor from names: `(arrow, source, target)`.
    pub fn from_names(vertices: &[&str], arrows: &[(&str, &str, &str)]) -> Self {
        let idx = |n: &str| vertices.iter().position(|v| *v == n).unwrap_or_else(|| panic!("unknown vertex {n}"));
        Quiver {
            vertices: vertices.iter().map(|s| s.to_string()).collect(),
            arrows: arrows
                .iter()
                .map(|(n, s, t)| Arrow { name: n.to_string(), source: idx(s), target: idx(t) })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn out_arrows(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows.iter().enumerate().filter(move |(_, a)| a.source == v).map(|(i, _)| i)
    }

    pub fn in_arrows(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows.iter().enumerate().filter(move |(_, a)| a.target == v).map(|(i, _)| i)
    }

    /// Connectivity of the underlying undirected graph.
    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        self.component_of(0).len() == self.vertices.len()
    }

    pub fn component_of(&self, v: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([v]);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for a in &self.arrows {
                let other = if a.source == u {
                    a.target
                } else if a.target == u {
                    a.source
                } else {
                    continue;
                };
                if seen.insert(other) {
                    queue.push_back(other);
                }
            }
        }
        seen
    }

    /// Graphviz rendering; vertices by label, arrows labelled by name.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph {} {{\n", dot_id(name));
        for v in &self.vertices {
            s.push_str(&format!("  {};\n", dot_id(v)));
        }
        for a in &self.arrows {
            s.push_str(&format!(
                "  {} -> {} [label={}];\n",
                dot_id(&self.vertices[a.source]),
                dot_id(&self.vertices[a.target]),
                dot_id(&a.name)
            ));
        }
        s.push_str("}\n");
        s
    }
}

/// Quoted Graphviz identifier.
pub fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Step {
    pub arrow: usize,
    /// `false` traverses the arrow backwards (a formal inverse).
    pub forward: bool,
}

impl Step {
    pub fn fwd(arrow: usize) -> Self {
        Step { arrow, forward: true }
    }

    pub fn back(arrow: usize) -> Self {
        Step { arrow, forward: false }
    }

    pub fn start(&self, q: &Quiver) -> usize {
        let a = &q.arrows[self.arrow];
        if self.forward {
            a.source
        } else {
            a.target
        }
    }

    pub fn end(&self, q: &Quiver) -> usize {
        let a = &q.arrows[self.arrow];
        if self.forward {
            a.target
        } else {
            a.source
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Walk {
    pub start: usize,
    /// In traversal order.
    pub steps: Vec<Step>,
}

impl Walk {
    pub fn trivial(v: usize) -> Self {
        Walk { start: v, steps: Vec::new() }
    }

    pub fn new(q: &Quiver, start: usize, steps: Vec<Step>) -> Result<Self, QuiverError> {
        if start >= q.vertex_count() {
            return Err(QuiverError::UnknownVertex(start));
        }
        let mut cur = start;
        for (i, s) in steps.iter().enumerate() {
            if s.arrow >= q.arrow_count() {
                return Err(QuiverError::UnknownArrow(s.arrow));
            }
            if s.start(q) != cur {
                return Err(QuiverError::Broken(i));
            }
            cur = s.end(q);
        }
        Ok(Walk { start, steps })
    }

    /// A directed path given by arrows in traversal order.
    pub fn path(q: &Quiver, arrows: &[usize]) -> Result<Self, QuiverError> {
        let start = match arrows.first() {
            Some(&a) => q.arrows.get(a).ok_or(QuiverError::UnknownArrow(a))?.source,
            None => return Err(QuiverError::Broken(0)),
        };
        Walk::new(q, start, arrows.iter().map(|&a| Step::fwd(a)).collect())
    }

    pub fn end(&self, q: &Quiver) -> usize {
        self.steps.last().map_or(self.start, |s| s.end(q))
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_path(&self) -> bool {
        self.steps.iter().all(|s| s.forward)
    }

    pub fn is_closed(&self, q: &Quiver) -> bool {
        self.end(q) == self.start
    }

    pub fn inverse(&self, q: &Quiver) -> Walk {
        Walk {
            start: self.end(q),
            steps: self.steps.iter().rev().map(|s| Step { arrow: s.arrow, forward: !s.forward }).collect(),
        }
    }

    /// The walk `later * earlier`: traverse `earlier`, then `later`.
    pub fn concat(q: &Quiver, later: &Walk, earlier: &Walk) -> Result<Walk, QuiverError> {
        let end = earlier.end(q);
        if later.start != end {
            return Err(QuiverError::EndpointMismatch { end, start: later.start });
        }
        let mut steps = earlier.steps.clone();
        steps.extend(later.steps.iter().copied());
        Ok(Walk { start: earlier.start, steps })
    }

    /// Removes adjacent `a a^-1` pairs.
    pub fn reduced(&self) -> Walk {
        let mut steps: Vec<Step> = Vec::new();
        for s in &self.steps {
            if steps.last().map_or(false, |l| l.arrow == s.arrow && l.forward != s.forward) {
                steps.pop();
            } else {
                steps.push(*s);
            }
        }
        Walk { start: self.start, steps }
    }

    /// Right-to-left notation such as `b^-1 a`.
    pub fn describe(&self, q: &Quiver) -> String {
        if self.steps.is_empty() {
            return q.vertices[self.start].clone();
        }
        self.steps
            .iter()
            .rev()
            .map(|s| {
                let n = &q.arrows[s.arrow].name;
                if s.forward {
                    n.clone()
                } else {
                    format!("{n}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Spanning tree and free basis of the fundamental group at a base vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pi1Presentation {
    pub base: usize,
    pub tree_arrows: BTreeSet<usize>,
    /// Generator `i` corresponds to co-tree arrow `generators[i]`.
    pub generators: Vec<usize>,
    /// Tree walk from the base to each vertex.
    pub geodesics: Vec<Walk>,
}

impl Pi1Presentation {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_of_arrow(&self, arrow: usize) -> Option<usize> {
        self.generators.iter().position(|&a| a == arrow)
    }

    /// The closed walk at the base representing generator `i`:
    /// geodesic to the source, the co-tree arrow, geodesic back from the target.
    pub fn fundamental_cycle(&self, q: &Quiver, i: usize) -> Walk {
        let a = self.generators[i];
        let arrow = &q.arrows[a];
        let mut steps = self.geodesics[arrow.source].steps.clone();
        steps.push(Step::fwd(a));
        steps.extend(self.geodesics[arrow.target].inverse(q).steps);
        Walk { start: self.base, steps }
    }
}

/// Breadth-first spanning tree from `base`, ties broken by arrow index.
pub fn spanning_tree_and_pi1(q: &Quiver, base: usize) -> Result<Pi1Presentation, QuiverError> {
    if base >= q.vertex_count() {
        return Err(QuiverError::UnknownVertex(base));
    }
    let mut geodesics: Vec<Option<Walk>> = vec![None; q.vertex_count()];
    geodesics[base] = Some(Walk::trivial(base));
    let mut tree = BTreeSet::new();
    let mut queue = VecDeque::from([base]);
    while let Some(u) = queue.pop_front() {
        for (i, a) in q.arrows.iter().enumerate() {
            let step = if a.source == u {
                Step::fwd(i)
            } else if a.target == u {
                Step::back(i)
            } else {
                continue;
            };
            let v = step.end(q);
            if geodesics[v].is_none() {
                let mut w = geodesics[u].clone().expect("visited");
                w.steps.push(step);
                geodesics[v] = Some(w);
                tree.insert(i);
                queue.push_back(v);
            }
        }
    }
    let geodesics: Vec<Walk> = geodesics.into_iter().collect::<Option<_>>().ok_or(QuiverError::Disconnected)?;
    let generators = (0..q.arrow_count()).filter(|i| !tree.contains(i)).collect();
    Ok(Pi1Presentation { base, tree_arrows: tree, generators, geodesics })
}

/// Reduced free word of a closed walk at the base: tree arrows vanish, each
/// co-tree arrow contributes its generator with the step's sign.
pub fn walk_to_word(q: &Quiver, pres: &Pi1Presentation, w: &Walk) -> Result<Word, QuiverError> {
    if w.start != pres.base || !w.is_closed(q) {
        return Err(QuiverError::NotClosedAtBase(pres.base));
    }
    // Right-to-left: the last step is the leftmost letter.
    Ok(Word::from_letters(w.steps.iter().rev().filter_map(|s| {
        pres.generator_of_arrow(s.arrow).map(|g| Letter::new(g, !s.forward))
    })))
}

/// A structure-preserving map between two quivers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverMorphism {
    pub domain: Quiver,
    pub codomain: Quiver,
    pub vertex_map: Vec<usize>,
    pub arrow_map: Vec<usize>,
}

/// Result of a covering check, with a failing covering-side vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoveringCheck {
    pub ok: bool,
    pub witness: Option<usize>,
}

impl QuiverMorphism {
    pub fn new(domain: Quiver, codomain: Quiver, vertex_map: Vec<usize>, arrow_map: Vec<usize>) -> Result<Self, QuiverError> {
        if vertex_map.len() != domain.vertex_count() {
            return Err(QuiverError::UnknownVertex(vertex_map.len()));
        }
        if arrow_map.len() != domain.arrow_count() {
            return Err(QuiverError::UnknownArrow(arrow_map.len()));
        }
        for (i, a) in domain.arrows.iter().enumerate() {
            let img = codomain.arrows.get(arrow_map[i]).ok_or(QuiverError::UnknownArrow(arrow_map[i]))?;
            if vertex_map[a.source] != img.source || vertex_map[a.target] != img.target {
                return Err(QuiverError::NotAMorphism(i));
            }
        }
        Ok(QuiverMorphism { domain, codomain, vertex_map, arrow_map })
    }

    pub fn identity(q: &Quiver) -> Self {
        QuiverMorphism {
            domain: q.clone(),
            codomain: q.clone(),
            vertex_map: (0..q.vertex_count()).collect(),
            arrow_map: (0..q.arrow_count()).collect(),
        }
    }

    pub fn is_surjective(&self) -> bool {
        let vs: BTreeSet<usize> = self.vertex_map.iter().copied().collect();
        let as_: BTreeSet<usize> = self.arrow_map.iter().copied().collect();
        vs.len() == self.codomain.vertex_count() && as_.len() == self.codomain.arrow_count()
    }

    /// Local bijection of in- and out-arrows at one covering-side vertex.
    pub fn is_local_bijection_at(&self, v: usize) -> bool {
        let image = self.vertex_map[v];
        let check = |ours: Vec<usize>, theirs: Vec<usize>| {
            let mapped: BTreeSet<usize> = ours.iter().map(|&a| self.arrow_map[a]).collect();
            mapped.len() == ours.len() && mapped == theirs.into_iter().collect::<BTreeSet<_>>()
        };
        check(self.domain.out_arrows(v).collect(), self.codomain.out_arrows(image).collect())
            && check(self.domain.in_arrows(v).collect(), self.codomain.in_arrows(image).collect())
    }

    /// Covering test at every covering-side vertex (and surjectivity).
    pub fn is_covering(&self) -> CoveringCheck {
        self.is_covering_on(0..self.domain.vertex_count())
    }

    /// Covering test restricted to the given covering-side vertices, for
    /// finite windows of infinite covers.
    pub fn is_covering_on<I: IntoIterator<Item = usize>>(&self, vertices: I) -> CoveringCheck {
        for v in vertices {
            if !self.is_local_bijection_at(v) {
                return CoveringCheck { ok: false, witness: Some(v) };
            }
        }
        CoveringCheck { ok: self.is_surjective(), witness: None }
    }

    pub fn map_walk(&self, w: &Walk) -> Walk {
        Walk {
            start: self.vertex_map[w.start],
            steps: w.steps.iter().map(|s| Step { arrow: self.arrow_map[s.arrow], forward: s.forward }).collect(),
        }
    }

    /// Lifts one step from a covering-side vertex.
    pub fn lift_step(&self, from: usize, step: Step) -> Option<usize> {
        let mut candidates = if step.forward {
            self.domain.out_arrows(from).filter(|&a| self.arrow_map[a] == step.arrow).collect::<Vec<_>>()
        } else {
            self.domain.in_arrows(from).filter(|&a| self.arrow_map[a] == step.arrow).collect::<Vec<_>>()
        };
        if candidates.len() == 1 {
            candidates.pop()
        } else {
            None
        }
    }

    /// The unique lift of `w` starting at `start`.
    pub fn lift_walk(&self, w: &Walk, start: usize) -> Result<Walk, QuiverError> {
        if start >= self.domain.vertex_count() || self.vertex_map[start] != w.start {
            return Err(QuiverError::WrongFiber);
        }
        let mut cur = start;
        let mut steps = Vec::with_capacity(w.steps.len());
        for (i, s) in w.steps.iter().enumerate() {
            let a = self.lift_step(cur, *s).ok_or(QuiverError::NoLift { step: i, vertex: cur })?;
            let lifted = Step { arrow: a, forward: s.forward };
            cur = lifted.end(&self.domain);
            steps.push(lifted);
        }
        Ok(Walk { start, steps })
    }

    pub fn fiber(&self, v: usize) -> Vec<usize> {
        (0..self.domain.vertex_count()).filter(|&u| self.vertex_map[u] == v).collect()
    }

    /// The covering automorphism sending `from` to `to`, if one exists.
    ///
    /// Built by propagating along arrows from `from`; any clash or a
    /// non-bijective result means there is none.
    pub fn deck_transformation(&self, from: usize, to: usize) -> Option<Automorphism> {
        let q = &self.domain;
        if self.vertex_map[from] != self.vertex_map[to] {
            return None;
        }
        let mut vmap: Vec<Option<usize>> = vec![None; q.vertex_count()];
        let mut amap: Vec<Option<usize>> = vec![None; q.arrow_count()];
        vmap[from] = Some(to);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            let image = vmap[u].expect("queued vertices are mapped");
            for a in q.out_arrows(u).map(Step::fwd).chain(q.in_arrows(u).map(Step::back)) {
                let target_arrow = self.lift_step(image, Step { arrow: self.arrow_map[a.arrow], forward: a.forward })?;
                match amap[a.arrow] {
                    Some(prev) if prev != target_arrow => return None,
                    _ => amap[a.arrow] = Some(target_arrow),
                }
                let v = a.end(q);
                let v_img = Step { arrow: target_arrow, forward: a.forward }.end(q);
                match vmap[v] {
                    Some(prev) if prev != v_img => return None,
                    Some(_) => {}
                    None => {
                        vmap[v] = Some(v_img);
                        queue.push_back(v);
                    }
                }
            }
        }
        let vertex_map: Vec<usize> = vmap.into_iter().collect::<Option<_>>()?;
        let arrow_map: Vec<usize> = amap.into_iter().collect::<Option<_>>()?;
        let distinct_v: BTreeSet<_> = vertex_map.iter().collect();
        let distinct_a: BTreeSet<_> = arrow_map.iter().collect();
        if distinct_v.len() != vertex_map.len() || distinct_a.len() != arrow_map.len() {
            return None;
        }
        Some(Automorphism { vertex_map, arrow_map })
    }

    /// Transitivity of the deck group on the fiber over `x0`.
    pub fn is_galois_on_fiber(&self, x0: usize) -> Result<bool, QuiverError> {
        if !self.domain.is_connected() || !self.codomain.is_connected() {
            return Err(QuiverError::Disconnected);
        }
        let fiber = self.fiber(x0);
        let Some(&first) = fiber.first() else { return Ok(false) };
        Ok(fiber.iter().all(|&b| self.deck_transformation(first, b).is_some()))
    }

    /// All covering automorphisms, one per point of the fiber over vertex 0
    /// that admits one.
    pub fn deck_transformations(&self) -> Vec<Automorphism> {
        let fiber = self.fiber(self.domain.vertices.first().map_or(0, |_| self.vertex_map[0]));
        fiber.iter().filter_map(|&b| self.deck_transformation(0, b)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Automorphism {
    pub vertex_map: Vec<usize>,
    pub arrow_map: Vec<usize>,
}

impl Automorphism {
    /// `self` after `other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            vertex_map: other.vertex_map.iter().map(|&v| self.vertex_map[v]).collect(),
            arrow_map: other.arrow_map.iter().map(|&a| self.arrow_map[a]).collect(),
        }
    }
}

/// A Galois covering whose group acts on the right on covering-side
/// vertices and arrows. Implemented by finite covers (through their deck
/// group) and by windowed smash-coproduct covers.
pub trait GaloisCovering {
    fn morphism(&self) -> &QuiverMorphism;
    fn group(&self) -> &GroupDescriptor;
    /// `v^g`, when it lies in the materialised quiver.
    fn act_vertex(&self, v: usize, g: &GroupElement) -> Option<usize>;
    fn act_arrow(&self, a: usize, g: &GroupElement) -> Option<usize>;
    /// The group element `g` with `from^g = to`.
    fn deck_element(&self, from: usize, to: usize) -> Option<GroupElement>;
}

/// A finite connected Galois covering with its deck group realised as a
/// multiplication table. The right action is `v^g = theta_g(v)` with
/// `theta_{gh} = theta_h o theta_g`.
#[derive(Clone, Debug)]
pub struct FiniteGaloisCover {
    pub morphism: QuiverMorphism,
    pub deck: Vec<Automorphism>,
    pub group: GroupDescriptor,
}

impl FiniteGaloisCover {
    pub fn new(morphism: QuiverMorphism) -> Result<Self, QuiverError> {
        if !morphism.is_covering().ok {
            return Err(QuiverError::NotAMorphism(0));
        }
        if morphism.domain.vertex_count() == 0 {
            return Err(QuiverError::UnknownVertex(0));
        }
        if !morphism.is_galois_on_fiber(morphism.vertex_map[0])? {
            return Err(QuiverError::WrongFiber);
        }
        // Identity first: the automorphism fixing vertex 0.
        let mut deck = morphism.deck_transformations();
        deck.sort_by_key(|t| t.vertex_map[0]);
        let idx_of: BTreeMap<Vec<usize>, usize> = deck.iter().enumerate().map(|(i, t)| (t.vertex_map.clone(), i)).collect();
        let n = deck.len();
        let mut table = vec![vec![0; n]; n];
        for g in 0..n {
            for h in 0..n {
                table[g][h] = idx_of[&deck[h].compose(&deck[g]).vertex_map];
            }
        }
        let group = GroupDescriptor::finite_table(table).map_err(|_| QuiverError::WrongFiber)?;
        Ok(FiniteGaloisCover { morphism, deck, group })
    }
}

impl GaloisCovering for FiniteGaloisCover {
    fn morphism(&self) -> &QuiverMorphism {
        &self.morphism
    }

    fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    fn act_vertex(&self, v: usize, g: &GroupElement) -> Option<usize> {
        match g {
            GroupElement::Finite(i) => self.deck.get(*i).map(|t| t.vertex_map[v]),
            _ => None,
        }
    }

    fn act_arrow(&self, a: usize, g: &GroupElement) -> Option<usize> {
        match g {
            GroupElement::Finite(i) => self.deck.get(*i).map(|t| t.arrow_map[a]),
            _ => None,
        }
    }

    fn deck_element(&self, from: usize, to: usize) -> Option<GroupElement> {
        self.deck.iter().position(|t| t.vertex_map[from] == to).map(GroupElement::Finite)
    }
}

/// The cyclic quiver `0 -> 1 -> ... -> n-1 -> 0` with arrows `c0..c{n-1}`.
pub fn cyclic_quiver(n: usize) -> Quiver {
    Quiver {
        vertices: (0..n).map(|i| i.to_string()).collect(),
        arrows: (0..n).map(|i| Arrow { name: format!("c{i}"), source: i, target: (i + 1) % n }).collect(),
    }
}

/// `cyclic(m) -> cyclic(n)` by reduction mod `n`, for `n | m`.
pub fn cyclic_cover(m: usize, n: usize) -> QuiverMorphism {
    QuiverMorphism::new(cyclic_quiver(m), cyclic_quiver(n), (0..m).map(|i| i % n).collect(), (0..m).map(|i| i % n).collect())
        .expect("reduction mod n is a quiver morphism")
}
