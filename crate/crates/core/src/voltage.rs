//! Arrow and vertex weightings (voltages) and the smash coproduct quiver.
//!
//! Infinite groups are handled through finite windows of group elements.
//! Vertices of the smash quiver whose every in- and out-lift stays inside the
//! window are called interior; covering statements are only made there.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::groups::{GroupDescriptor, GroupElement, GroupError};
use crate::quiver::{dot_id, Arrow, GaloisCovering, Pi1Presentation, Quiver, QuiverError, QuiverMorphism, Walk};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VoltageError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("the window does not contain the identity")]
    WindowWithoutIdentity,
    #[error("the window has no interior vertices")]
    EmptyInterior,
    #[error("lifting sends vertex {0} outside its fiber")]
    NotASection(usize),
    #[error("lift of arrow {0} leaves the window")]
    OutsideWindow(usize),
    #[error("no deck transformation relates the endpoints of the lift of arrow {0}")]
    NotGalois(usize),
}

/// `delta: Q1 -> G`, extended to walks multiplicatively.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrowWeighting {
    pub group: GroupDescriptor,
    pub values: Vec<GroupElement>,
}

impl ArrowWeighting {
    pub fn new(group: GroupDescriptor, values: Vec<GroupElement>) -> Result<Self, VoltageError> {
        for v in &values {
            group.check(v)?;
        }
        Ok(ArrowWeighting { group, values })
    }

    pub fn trivial(group: GroupDescriptor, arrows: usize) -> Self {
        let id = group.identity();
        ArrowWeighting { values: vec![id; arrows], group }
    }

    /// Integer weights into `Z`.
    pub fn integers(values: &[i64]) -> Self {
        ArrowWeighting {
            group: GroupDescriptor::integers(),
            values: values.iter().map(|&v| GroupElement::Abelian(vec![v])).collect(),
        }
    }

    pub fn check_quiver(&self, q: &Quiver) -> Result<(), VoltageError> {
        if self.values.len() != q.arrow_count() {
            return Err(VoltageError::WrongLength { expected: q.arrow_count(), got: self.values.len() });
        }
        Ok(())
    }

    pub fn of_arrow(&self, a: usize) -> &GroupElement {
        &self.values[a]
    }

    /// `delta(a_n^e_n ... a_1^e_1) = delta(a_n)^e_n ... delta(a_1)^e_1`.
    pub fn weight_walk(&self, w: &Walk) -> GroupElement {
        let g = &self.group;
        w.steps.iter().fold(g.identity(), |acc, s| {
            let d = &self.values[s.arrow];
            let d = if s.forward { d.clone() } else { g.inverse(d).expect("validated") };
            g.multiply(&d, &acc).expect("validated")
        })
    }

    /// Weight of a directed path given as arrows in traversal order.
    pub fn weight_arrows(&self, arrows: &[usize]) -> GroupElement {
        let g = &self.group;
        arrows
            .iter()
            .fold(g.identity(), |acc, &a| g.multiply(&self.values[a], &acc).expect("validated"))
    }

    /// Whether the weights of the fundamental cycles generate the group.
    pub fn is_connected(&self, q: &Quiver, pres: &Pi1Presentation) -> Result<bool, VoltageError> {
        self.check_quiver(q)?;
        let gens: Vec<GroupElement> = (0..pres.rank()).map(|i| self.weight_walk(&pres.fundamental_cycle(q, i))).collect();
        Ok(self.group.generates(&gens)?)
    }

    /// `delta^gamma(a) = gamma(t(a))^-1 delta(a) gamma(s(a))`.
    pub fn twist(&self, q: &Quiver, gamma: &VertexWeighting) -> Result<ArrowWeighting, VoltageError> {
        self.check_quiver(q)?;
        gamma.check_quiver(q)?;
        if gamma.group != self.group {
            return Err(GroupError::BackendMismatch { group: self.group.to_string(), element: gamma.group.to_string() }.into());
        }
        let g = &self.group;
        let values = q
            .arrows
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let left = g.inverse(&gamma.values[a.target])?;
                g.multiply(&g.multiply(&left, &self.values[i])?, &gamma.values[a.source])
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ArrowWeighting { group: g.clone(), values })
    }

    pub fn describe(&self, q: &Quiver) -> BTreeMap<String, String> {
        q.arrows.iter().zip(&self.values).map(|(a, v)| (a.name.clone(), self.group.format(v))).collect()
    }
}

/// `gamma: Q0 -> G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexWeighting {
    pub group: GroupDescriptor,
    pub values: Vec<GroupElement>,
}

impl VertexWeighting {
    pub fn new(group: GroupDescriptor, values: Vec<GroupElement>) -> Result<Self, VoltageError> {
        for v in &values {
            group.check(v)?;
        }
        Ok(VertexWeighting { group, values })
    }

    pub fn trivial(group: GroupDescriptor, vertices: usize) -> Self {
        let id = group.identity();
        VertexWeighting { values: vec![id; vertices], group }
    }

    pub fn check_quiver(&self, q: &Quiver) -> Result<(), VoltageError> {
        if self.values.len() != q.vertex_count() {
            return Err(VoltageError::WrongLength { expected: q.vertex_count(), got: self.values.len() });
        }
        Ok(())
    }

    /// Pointwise product `x -> self(x) other(x)`.
    pub fn product(&self, other: &VertexWeighting) -> Result<VertexWeighting, VoltageError> {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| self.group.multiply(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VertexWeighting { group: self.group.clone(), values })
    }
}

/// A materialised window of the smash coproduct quiver `Q x| G`.
///
/// Vertex `(x, g)` has index `g_index * |Q0| + x`; arrow `a x| g` runs from
/// `s(a) x| g` to `t(a) x| delta(a) g` and exists only if the target is in
/// the window.
#[derive(Clone, Debug)]
pub struct SmashQuiver {
    pub base: Quiver,
    pub weighting: ArrowWeighting,
    pub window: Vec<GroupElement>,
    window_index: BTreeMap<GroupElement, usize>,
    pub morphism: QuiverMorphism,
    /// Smash arrow index to `(base arrow, window index of g)`.
    pub arrow_coords: Vec<(usize, usize)>,
    arrow_index: BTreeMap<(usize, usize), usize>,
    pub interior: Vec<bool>,
}

impl SmashQuiver {
    pub fn new(base: &Quiver, weighting: &ArrowWeighting, window: Vec<GroupElement>) -> Result<Self, VoltageError> {
        weighting.check_quiver(base)?;
        let group = &weighting.group;
        let mut window_index = BTreeMap::new();
        let mut uniq = Vec::new();
        for g in window {
            group.check(&g)?;
            if !window_index.contains_key(&g) {
                window_index.insert(g.clone(), uniq.len());
                uniq.push(g);
            }
        }
        if !window_index.contains_key(&group.identity()) {
            return Err(VoltageError::WindowWithoutIdentity);
        }
        let n = base.vertex_count();
        let vertices: Vec<String> = uniq
            .iter()
            .flat_map(|g| base.vertices.iter().map(move |x| format!("{x}[{}]", group.format(g))))
            .collect();
        let mut arrows = Vec::new();
        let mut arrow_coords = Vec::new();
        let mut arrow_index = BTreeMap::new();
        for (gi, g) in uniq.iter().enumerate() {
            for (ai, a) in base.arrows.iter().enumerate() {
                let shifted = group.multiply(&weighting.values[ai], g)?;
                if let Some(&ti) = window_index.get(&shifted) {
                    arrow_index.insert((ai, gi), arrows.len());
                    arrow_coords.push((ai, gi));
                    arrows.push(Arrow {
                        name: format!("{}[{}]", a.name, group.format(g)),
                        source: gi * n + a.source,
                        target: ti * n + a.target,
                    });
                }
            }
        }
        let quiver = Quiver { vertices, arrows };
        let vertex_map = (0..quiver.vertex_count()).map(|v| v % n).collect();
        let arrow_map = arrow_coords.iter().map(|&(a, _)| a).collect();
        let morphism = QuiverMorphism::new(quiver, base.clone(), vertex_map, arrow_map)?;
        let mut s = SmashQuiver {
            base: base.clone(),
            weighting: weighting.clone(),
            window: uniq,
            window_index,
            morphism,
            arrow_coords,
            arrow_index,
            interior: Vec::new(),
        };
        s.interior = (0..s.quiver().vertex_count()).map(|v| s.compute_interior(v)).collect();
        if !s.interior.iter().any(|&b| b) {
            return Err(VoltageError::EmptyInterior);
        }
        Ok(s)
    }

    /// Window given by the ball of the given radius.
    pub fn with_radius(base: &Quiver, weighting: &ArrowWeighting, radius: usize) -> Result<Self, VoltageError> {
        let window = weighting.group.ball(radius)?;
        SmashQuiver::new(base, weighting, window)
    }

    fn compute_interior(&self, v: usize) -> bool {
        let (x, gi) = self.vertex_coords(v);
        let g = &self.window[gi];
        let group = &self.weighting.group;
        let outs_ok = self.base.out_arrows(x).all(|a| self.arrow_index.contains_key(&(a, gi)));
        let ins_ok = self.base.in_arrows(x).all(|a| {
            let pre = group.multiply(&group.inverse(&self.weighting.values[a]).expect("validated"), g).expect("validated");
            self.window_index.get(&pre).map_or(false, |&hi| self.arrow_index.contains_key(&(a, hi)))
        });
        outs_ok && ins_ok
    }

    pub fn quiver(&self) -> &Quiver {
        &self.morphism.domain
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.weighting.group
    }

    pub fn window_position(&self, g: &GroupElement) -> Option<usize> {
        self.window_index.get(g).copied()
    }

    pub fn vertex_coords(&self, v: usize) -> (usize, usize) {
        let n = self.base.vertex_count();
        (v % n, v / n)
    }

    pub fn vertex(&self, x: usize, g: &GroupElement) -> Option<usize> {
        self.window_position(g).map(|gi| gi * self.base.vertex_count() + x)
    }

    pub fn arrow(&self, a: usize, g: &GroupElement) -> Option<usize> {
        let gi = self.window_position(g)?;
        self.arrow_index.get(&(a, gi)).copied()
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.interior.len()).filter(|&v| self.interior[v]).collect()
    }

    /// Covering test restricted to interior vertices.
    pub fn is_covering_on_interior(&self) -> bool {
        self.morphism.is_covering_on(self.interior_vertices()).ok
    }

    /// Right translation `(u, g) -> (u, g h)` where both ends are in the window.
    pub fn deck_action(&self, h: &GroupElement) -> Result<DeckAction, VoltageError> {
        self.group().check(h)?;
        let q = self.quiver();
        let vertex_map = (0..q.vertex_count()).map(|v| self.act_vertex(v, h)).collect();
        let arrow_map = (0..q.arrow_count()).map(|a| self.act_arrow(a, h)).collect();
        Ok(DeckAction { vertex_map, arrow_map })
    }

    /// The canonical lifting `x -> x x| 1`.
    pub fn canonical_lifting(&self) -> Vec<usize> {
        (0..self.base.vertex_count()).collect()
    }

    /// The lifting `x -> x x| gamma(x)`.
    pub fn lifting_of(&self, gamma: &VertexWeighting) -> Result<Vec<usize>, VoltageError> {
        gamma
            .values
            .iter()
            .enumerate()
            .map(|(x, g)| self.vertex(x, g).ok_or(VoltageError::NotASection(x)))
            .collect()
    }

    /// Graphviz rendering with one `rank=same` group per fiber.
    pub fn to_dot(&self, name: &str) -> String {
        let q = self.quiver();
        let mut s = format!("digraph {} {{\n  rankdir=LR;\n", dot_id(name));
        for x in 0..self.base.vertex_count() {
            s.push_str("  { rank=same;");
            for gi in 0..self.window.len() {
                s.push_str(&format!(" {};", dot_id(&q.vertices[gi * self.base.vertex_count() + x])));
            }
            s.push_str(" }\n");
        }
        for (v, label) in q.vertices.iter().enumerate() {
            let style = if self.interior[v] { "" } else { " [style=dashed]" };
            s.push_str(&format!("  {}{};\n", dot_id(label), style));
        }
        for a in &q.arrows {
            s.push_str(&format!(
                "  {} -> {} [label={}];\n",
                dot_id(&q.vertices[a.source]),
                dot_id(&q.vertices[a.target]),
                dot_id(&a.name)
            ));
        }
        s.push_str("}\n");
        s
    }
}

impl GaloisCovering for SmashQuiver {
    fn morphism(&self) -> &QuiverMorphism {
        &self.morphism
    }

    fn group(&self) -> &GroupDescriptor {
        &self.weighting.group
    }

    fn act_vertex(&self, v: usize, g: &GroupElement) -> Option<usize> {
        let (x, ki) = self.vertex_coords(v);
        let kg = self.group().multiply(&self.window[ki], g).ok()?;
        self.vertex(x, &kg)
    }

    fn act_arrow(&self, a: usize, g: &GroupElement) -> Option<usize> {
        let (b, ki) = self.arrow_coords[a];
        let kg = self.group().multiply(&self.window[ki], g).ok()?;
        self.arrow(b, &kg)
    }

    fn deck_element(&self, from: usize, to: usize) -> Option<GroupElement> {
        let (x, ki) = self.vertex_coords(from);
        let (y, li) = self.vertex_coords(to);
        if x != y {
            return None;
        }
        let g = self.group();
        g.multiply(&g.inverse(&self.window[ki]).ok()?, &self.window[li]).ok()
    }
}

/// A partial automorphism of a windowed smash quiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeckAction {
    pub vertex_map: Vec<Option<usize>>,
    pub arrow_map: Vec<Option<usize>>,
}

/// `delta_L(a)`: the deck element `g` with `L(t(a))^g` the end of the lift of
/// `a` starting at `L(s(a))`.
pub fn weighting_from_lifting<C: GaloisCovering + ?Sized>(cover: &C, lifting: &[usize]) -> Result<ArrowWeighting, VoltageError> {
    let f = cover.morphism();
    let base = &f.codomain;
    if lifting.len() != base.vertex_count() {
        return Err(VoltageError::WrongLength { expected: base.vertex_count(), got: lifting.len() });
    }
    for (x, &l) in lifting.iter().enumerate() {
        if l >= f.domain.vertex_count() || f.vertex_map[l] != x {
            return Err(VoltageError::NotASection(x));
        }
    }
    let mut values = Vec::with_capacity(base.arrow_count());
    for (i, a) in base.arrows.iter().enumerate() {
        let lift = f
            .lift_walk(&Walk::path(base, &[i])?, lifting[a.source])
            .map_err(|_| VoltageError::OutsideWindow(i))?;
        let end = lift.end(&f.domain);
        values.push(cover.deck_element(lifting[a.target], end).ok_or(VoltageError::NotGalois(i))?);
    }
    Ok(ArrowWeighting { group: cover.group().clone(), values })
}

/// Summary of a windowed smash quiver for reports.
#[derive(Clone, Debug, Serialize)]
pub struct SmashSummary {
    pub vertices: usize,
    pub arrows: usize,
    pub interior: usize,
    #[serde(rename = "coveringOnInterior")]
    pub covering_on_interior: bool,
}

impl SmashQuiver {
    pub fn summary(&self) -> SmashSummary {
        SmashSummary {
            vertices: self.quiver().vertex_count(),
            arrows: self.quiver().arrow_count(),
            interior: self.interior_vertices().len(),
            covering_on_interior: self.is_covering_on_interior(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{spanning_tree_and_pi1, FiniteGaloisCover, Step};

    fn z(n: i64) -> GroupElement {
        GroupElement::Abelian(vec![n])
    }

    fn loop_q() -> Quiver {
        Quiver::from_names(&["x"], &[("a", "x", "x")])
    }

    fn kron() -> Quiver {
        Quiver::from_names(&["x", "y"], &[("a", "x", "y"), ("b", "x", "y")])
    }

    #[test]
    fn walk_weights() {
        let q = kron();
        let d = ArrowWeighting::integers(&[0, 1]);
        assert_eq!(d.weight_walk(&Walk::trivial(0)), z(0));
        let w = Walk::new(&q, 0, vec![Step::fwd(0), Step::back(1)]).unwrap();
        assert_eq!(d.weight_walk(&w), z(-1));
        let l = loop_q();
        let g = ArrowWeighting::integers(&[1]);
        assert_eq!(g.weight_walk(&Walk::path(&l, &[0, 0, 0]).unwrap()), z(3));
    }

    #[test]
    fn nonabelian_order_of_multiplication() {
        let l = Quiver::from_names(&["x"], &[("a", "x", "x"), ("b", "x", "x")]);
        let f2 = GroupDescriptor::Free { rank: 2 };
        let d = ArrowWeighting::new(
            f2,
            vec![GroupElement::Free(crate::groups::Word::generator(0)), GroupElement::Free(crate::groups::Word::generator(1))],
        )
        .unwrap();
        // walk b a: first a, then b; weight delta(b) delta(a) = y x
        let w = Walk::path(&l, &[0, 1]).unwrap();
        assert_eq!(d.weight_walk(&w), GroupElement::Free(crate::groups::Word::from_signed(&[2, 1])));
    }

    #[test]
    fn connectedness() {
        let l = loop_q();
        let p = spanning_tree_and_pi1(&l, 0).unwrap();
        assert!(ArrowWeighting::integers(&[1]).is_connected(&l, &p).unwrap());
        assert!(!ArrowWeighting::integers(&[2]).is_connected(&l, &p).unwrap());
        assert!(ArrowWeighting::trivial(GroupDescriptor::trivial(), 1).is_connected(&l, &p).unwrap());
    }

    #[test]
    fn cyclic_smash_quivers() {
        for n in 2..=6 {
            let g = GroupDescriptor::cyclic(n).unwrap();
            let d = ArrowWeighting::new(g.clone(), vec![GroupElement::Abelian(vec![1])]).unwrap();
            let s = SmashQuiver::new(&loop_q(), &d, g.elements().unwrap()).unwrap();
            let q = s.quiver();
            assert_eq!(q.vertex_count(), n as usize);
            assert_eq!(q.arrow_count(), n as usize);
            assert!(q.is_connected());
            assert!(q.vertices.iter().all(|v| q.out_arrows(s.quiver().vertex_index(v).unwrap()).count() == 1));
            assert!(s.morphism.is_covering().ok);
            assert!(s.morphism.is_galois_on_fiber(0).unwrap());
        }
    }

    #[test]
    fn zigzag_window() {
        let d = ArrowWeighting::integers(&[0, 1]);
        let s = SmashQuiver::with_radius(&kron(), &d, 3).unwrap();
        let q = s.quiver();
        assert_eq!(q.vertex_count(), 14);
        // a[g]: x[g] -> y[g], b[g]: x[g] -> y[g+1]; b[3] drops out.
        assert_eq!(q.arrow_count(), 13);
        let x0 = s.vertex(0, &z(0)).unwrap();
        let y1 = s.vertex(1, &z(1)).unwrap();
        let b0 = s.arrow(1, &z(0)).unwrap();
        assert_eq!((q.arrows[b0].source, q.arrows[b0].target), (x0, y1));
        assert!(s.interior[x0]);
        assert!(!s.interior[s.vertex(0, &z(3)).unwrap()]);
        assert!(!s.interior[s.vertex(1, &z(-3)).unwrap()]);
        assert!(s.is_covering_on_interior());
        // every vertex has total degree 2 in the interior: a zig-zag line
        for v in s.interior_vertices() {
            assert_eq!(q.out_arrows(v).count() + q.in_arrows(v).count(), 2);
        }
    }

    #[test]
    fn directed_line_window() {
        let d = ArrowWeighting::integers(&[1]);
        let s = SmashQuiver::with_radius(&loop_q(), &d, 3).unwrap();
        assert_eq!(s.quiver().vertex_count(), 7);
        assert_eq!(s.quiver().arrow_count(), 6);
        assert_eq!(s.interior_vertices().len(), 5);
        assert!(s.quiver().is_connected());
    }

    #[test]
    fn window_errors() {
        let d = ArrowWeighting::integers(&[1]);
        assert_eq!(SmashQuiver::new(&loop_q(), &d, vec![z(1)]).unwrap_err(), VoltageError::WindowWithoutIdentity);
        assert_eq!(SmashQuiver::new(&loop_q(), &d, vec![z(0)]).unwrap_err(), VoltageError::EmptyInterior);
    }

    #[test]
    fn deck_actions() {
        let g = GroupDescriptor::cyclic(4).unwrap();
        let d = ArrowWeighting::new(g.clone(), vec![GroupElement::Abelian(vec![1])]).unwrap();
        let s = SmashQuiver::new(&loop_q(), &d, g.elements().unwrap()).unwrap();
        let id = s.deck_action(&g.identity()).unwrap();
        assert!(id.vertex_map.iter().enumerate().all(|(v, m)| *m == Some(v)));
        let one = s.deck_action(&GroupElement::Abelian(vec![1])).unwrap();
        let v0 = s.vertex(0, &GroupElement::Abelian(vec![0])).unwrap();
        assert_eq!(one.vertex_map[v0], s.vertex(0, &GroupElement::Abelian(vec![1])));
        for (v, img) in one.vertex_map.iter().enumerate() {
            assert_eq!(s.morphism.vertex_map[img.unwrap()], s.morphism.vertex_map[v]);
        }
    }

    #[test]
    fn twists() {
        let q = kron();
        let d = ArrowWeighting::integers(&[0, 1]);
        let id = VertexWeighting::trivial(GroupDescriptor::integers(), 2);
        assert_eq!(d.twist(&q, &id).unwrap(), d);
        let gamma = VertexWeighting::new(GroupDescriptor::integers(), vec![z(0), z(1)]).unwrap();
        assert_eq!(d.twist(&q, &gamma).unwrap(), ArrowWeighting::integers(&[-1, 0]));
        let l = loop_q();
        let lg = VertexWeighting::new(GroupDescriptor::integers(), vec![z(5)]).unwrap();
        assert_eq!(ArrowWeighting::integers(&[1]).twist(&l, &lg).unwrap(), ArrowWeighting::integers(&[1]));
    }

    #[test]
    fn liftings() {
        let q = kron();
        let d = ArrowWeighting::integers(&[0, 1]);
        let s = SmashQuiver::with_radius(&q, &d, 3).unwrap();
        assert_eq!(weighting_from_lifting(&s, &s.canonical_lifting()).unwrap(), d);
        let gamma = VertexWeighting::new(GroupDescriptor::integers(), vec![z(0), z(1)]).unwrap();
        let l = s.lifting_of(&gamma).unwrap();
        assert_eq!(weighting_from_lifting(&s, &l).unwrap(), ArrowWeighting::integers(&[-1, 0]));

        let lq = loop_q();
        let dl = ArrowWeighting::integers(&[1]);
        let sl = SmashQuiver::with_radius(&lq, &dl, 3).unwrap();
        let shifted = sl.lifting_of(&VertexWeighting::new(GroupDescriptor::integers(), vec![z(-2)]).unwrap()).unwrap();
        assert_eq!(weighting_from_lifting(&sl, &shifted).unwrap(), dl);
    }

    #[test]
    fn lifting_on_finite_cover() {
        let cov = FiniteGaloisCover::new(crate::quiver::cyclic_cover(6, 3)).unwrap();
        let d = weighting_from_lifting(&cov, &[0, 1, 2]).unwrap();
        assert_eq!(d.values, vec![GroupElement::Finite(0), GroupElement::Finite(0), GroupElement::Finite(1)]);
        assert!(weighting_from_lifting(&cov, &[0, 1, 0]).is_err());
    }

    #[test]
    fn dot_has_fiber_ranks() {
        let d = ArrowWeighting::integers(&[1]);
        let s = SmashQuiver::with_radius(&loop_q(), &d, 1).unwrap();
        let dot = s.to_dot("S");
        assert!(dot.contains("rank=same"));
        assert!(dot.contains("\"x[0]\" -> \"x[1]\" [label=\"a[0]\"];"));
    }
}
