//! Group arithmetic for the supported backends.
//!
//! Three concrete backends carry elements: a finite multiplication table,
//! finitely generated abelian groups `Z^r + Z/t1 + ... + Z/tk`, and free
//! groups on `rank` letters. A finitely presented descriptor exists only to be
//! abelianized (or recognised as free when it has no relators); its word
//! problem is not attempted.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::{smith_normal_form, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element {element} does not belong to group {group}")]
    BackendMismatch { group: String, element: String },
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    #[error("torsion orders must be at least 2, got {0}")]
    InvalidTorsion(i64),
    #[error("operation not supported for a finitely presented group")]
    Unsupported,
}

/// A letter of a free word: generator index with an inversion flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }
}

/// A freely reduced word; letters are read left to right as a product.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(g: usize) -> Self {
        Word(vec![Letter::new(g, false)])
    }

    /// Builds a word from raw letters, freely reducing them.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Signed generator notation: `+k` is generator `k-1`, `-k` its inverse.
    pub fn from_signed(letters: &[i32]) -> Self {
        Self::from_letters(letters.iter().map(|&s| {
            assert!(s != 0);
            Letter::new(s.unsigned_abs() as usize - 1, s < 0)
        }))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// Exponent sum of each generator, for abelianization.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for l in &self.0 {
            v[l.generator] += if l.inverse { -1 } else { 1 };
        }
        v
    }

    pub fn format_with(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        // Collapse runs into powers.
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == l {
                run += 1;
            }
            let name = names.get(l.generator).cloned().unwrap_or_else(|| format!("g{}", l.generator + 1));
            let exp = if l.inverse { -(run as i64) } else { run as i64 };
            parts.push(if exp == 1 { name } else { format!("{name}^{exp}") });
            i += run;
        }
        parts.join("*")
    }
}

/// Default letter names for a free group: `x, y, z` up to rank 3, else `g1..gr`.
pub fn free_generator_names(rank: usize) -> Vec<String> {
    if rank <= 3 {
        ["x", "y", "z"][..rank].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=rank).map(|i| format!("g{i}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupElement {
    /// Index into a finite multiplication table.
    Finite(usize),
    /// Free coordinates followed by torsion residues in `[0, order)`.
    Abelian(Vec<i64>),
    Free(Word),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupDescriptor {
    FiniteTable {
        table: Vec<Vec<usize>>,
        inverse: Vec<usize>,
        identity: usize,
    },
    FgAbelian {
        free_rank: usize,
        torsion: Vec<i64>,
    },
    Free {
        rank: usize,
    },
    FinitelyPresented {
        generators: usize,
        relators: Vec<Word>,
    },
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::FiniteTable { table, .. } => write!(f, "finite group of order {}", table.len()),
            GroupDescriptor::FgAbelian { free_rank, torsion } => {
                let mut parts = Vec::new();
                match free_rank {
                    0 => {}
                    1 => parts.push("Z".to_string()),
                    r => parts.push(format!("Z^{r}")),
                }
                parts.extend(torsion.iter().map(|t| format!("Z/{t}")));
                if parts.is_empty() {
                    write!(f, "1")
                } else {
                    write!(f, "{}", parts.join(" x "))
                }
            }
            GroupDescriptor::Free { rank } => write!(f, "F{rank}"),
            GroupDescriptor::FinitelyPresented { generators, relators } => {
                write!(f, "<{} generators | {} relators>", generators, relators.len())
            }
        }
    }
}

impl GroupDescriptor {
    pub fn integers() -> Self {
        GroupDescriptor::FgAbelian { free_rank: 1, torsion: vec![] }
    }

    pub fn trivial() -> Self {
        GroupDescriptor::FgAbelian { free_rank: 0, torsion: vec![] }
    }

    /// `Z/n` in the abelian backend; `n = 1` gives the trivial group.
    pub fn cyclic(n: i64) -> Result<Self, GroupError> {
        match n {
            1 => Ok(Self::trivial()),
            n if n >= 2 => Ok(GroupDescriptor::FgAbelian { free_rank: 0, torsion: vec![n] }),
            n => Err(GroupError::InvalidTorsion(n)),
        }
    }

    pub fn fg_abelian(free_rank: usize, torsion: Vec<i64>) -> Result<Self, GroupError> {
        if let Some(&t) = torsion.iter().find(|&&t| t < 2) {
            return Err(GroupError::InvalidTorsion(t));
        }
        Ok(GroupDescriptor::FgAbelian { free_rank, torsion })
    }

    /// `Z/n` as an explicit multiplication table.
    pub fn cyclic_table(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let inverse = (0..n).map(|a| (n - a) % n).collect();
        GroupDescriptor::FiniteTable { table, inverse, identity: 0 }
    }

    /// Validates the group axioms before accepting a table.
    pub fn finite_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(GroupError::InvalidTable("table must be square with entries in range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| GroupError::InvalidTable("no identity element".into()))?;
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| GroupError::InvalidTable(format!("element {a} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::InvalidTable(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(GroupDescriptor::FiniteTable { table, inverse, identity })
    }

    pub fn is_abelian_backend(&self) -> bool {
        matches!(self, GroupDescriptor::FgAbelian { .. })
    }

    /// Number of coordinates of an abelian element.
    fn abelian_width(&self) -> usize {
        match self {
            GroupDescriptor::FgAbelian { free_rank, torsion } => free_rank + torsion.len(),
            _ => 0,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupDescriptor::FiniteTable { identity, .. } => GroupElement::Finite(*identity),
            GroupDescriptor::FgAbelian { .. } => GroupElement::Abelian(vec![0; self.abelian_width()]),
            GroupDescriptor::Free { .. } | GroupDescriptor::FinitelyPresented { .. } => {
                GroupElement::Free(Word::identity())
            }
        }
    }

    /// Checks that an element is well formed for this group.
    pub fn check(&self, a: &GroupElement) -> Result<(), GroupError> {
        let ok = match (self, a) {
            (GroupDescriptor::FiniteTable { table, .. }, GroupElement::Finite(i)) => *i < table.len(),
            (GroupDescriptor::FgAbelian { free_rank, torsion }, GroupElement::Abelian(v)) => {
                v.len() == free_rank + torsion.len()
                    && torsion.iter().zip(&v[*free_rank..]).all(|(t, r)| (0..*t).contains(r))
            }
            (GroupDescriptor::Free { rank }, GroupElement::Free(w)) => {
                w.letters().iter().all(|l| l.generator < *rank) && Word::from_letters(w.letters().iter().copied()) == *w
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(GroupError::BackendMismatch { group: self.to_string(), element: format!("{a:?}") })
        }
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (self, a, b) {
            (GroupDescriptor::FiniteTable { table, .. }, GroupElement::Finite(x), GroupElement::Finite(y)) => {
                GroupElement::Finite(table[*x][*y])
            }
            (GroupDescriptor::FgAbelian { free_rank, torsion }, GroupElement::Abelian(x), GroupElement::Abelian(y)) => {
                let mut v: Vec<i64> = x.iter().zip(y).map(|(p, q)| p + q).collect();
                for (k, t) in torsion.iter().enumerate() {
                    v[free_rank + k] = v[free_rank + k].rem_euclid(*t);
                }
                GroupElement::Abelian(v)
            }
            (GroupDescriptor::Free { .. }, GroupElement::Free(x), GroupElement::Free(y)) => GroupElement::Free(x.mul(y)),
            _ => unreachable!("checked above"),
        })
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(a)?;
        Ok(match (self, a) {
            (GroupDescriptor::FiniteTable { inverse, .. }, GroupElement::Finite(x)) => GroupElement::Finite(inverse[*x]),
            (GroupDescriptor::FgAbelian { free_rank, torsion }, GroupElement::Abelian(x)) => {
                let mut v: Vec<i64> = x.iter().map(|p| -p).collect();
                for (k, t) in torsion.iter().enumerate() {
                    v[free_rank + k] = v[free_rank + k].rem_euclid(*t);
                }
                GroupElement::Abelian(v)
            }
            (GroupDescriptor::Free { .. }, GroupElement::Free(w)) => GroupElement::Free(w.inverse()),
            _ => unreachable!("checked above"),
        })
    }

    /// Integer power, negative exponents allowed.
    pub fn pow(&self, a: &GroupElement, e: i64) -> Result<GroupElement, GroupError> {
        let base = if e < 0 { self.inverse(a)? } else { a.clone() };
        let mut acc = self.identity();
        for _ in 0..e.unsigned_abs() {
            acc = self.multiply(&acc, &base)?;
        }
        Ok(acc)
    }

    pub fn equal(&self, a: &GroupElement, b: &GroupElement) -> Result<bool, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(a == b)
    }

    pub fn is_identity(&self, a: &GroupElement) -> bool {
        *a == self.identity()
    }

    /// Abelian element from raw coordinates, reducing torsion residues.
    pub fn abelian_element(&self, coords: &[i64]) -> Result<GroupElement, GroupError> {
        match self {
            GroupDescriptor::FgAbelian { free_rank, torsion } if coords.len() == free_rank + torsion.len() => {
                let mut v = coords.to_vec();
                for (k, t) in torsion.iter().enumerate() {
                    v[free_rank + k] = v[free_rank + k].rem_euclid(*t);
                }
                Ok(GroupElement::Abelian(v))
            }
            _ => Err(GroupError::BackendMismatch { group: self.to_string(), element: format!("{coords:?}") }),
        }
    }

    /// Finite order of the group, if finite.
    pub fn order(&self) -> Option<usize> {
        match self {
            GroupDescriptor::FiniteTable { table, .. } => Some(table.len()),
            GroupDescriptor::FgAbelian { free_rank: 0, torsion } => Some(torsion.iter().product::<i64>() as usize),
            GroupDescriptor::Free { rank: 0 } => Some(1),
            _ => None,
        }
    }

    /// Deterministic finite window around the identity: all elements for
    /// finite groups, the box `[-radius, radius]^r` (times all torsion) for
    /// abelian groups, and the word-length ball for free groups. The identity
    /// always comes first.
    pub fn ball(&self, radius: usize) -> Result<Vec<GroupElement>, GroupError> {
        let mut out: Vec<GroupElement> = match self {
            GroupDescriptor::FiniteTable { table, .. } => (0..table.len()).map(GroupElement::Finite).collect(),
            GroupDescriptor::FgAbelian { free_rank, torsion } => {
                let r = radius as i64;
                let mut ranges: Vec<Vec<i64>> = (0..*free_rank).map(|_| (-r..=r).collect()).collect();
                ranges.extend(torsion.iter().map(|&t| (0..t).collect()));
                let mut acc: Vec<Vec<i64>> = vec![vec![]];
                for range in ranges {
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix| {
                            range.iter().map(move |&x| {
                                let mut p = prefix.clone();
                                p.push(x);
                                p
                            })
                        })
                        .collect();
                }
                acc.into_iter().map(GroupElement::Abelian).collect()
            }
            GroupDescriptor::Free { rank } => {
                let mut layer = vec![Word::identity()];
                let mut all = layer.clone();
                for _ in 0..radius {
                    let mut next = Vec::new();
                    for w in &layer {
                        for g in 0..*rank {
                            for inv in [false, true] {
                                let l = Letter::new(g, inv);
                                if w.letters().last() == Some(&l.inv()) {
                                    continue;
                                }
                                next.push(w.mul(&Word(vec![l])));
                            }
                        }
                    }
                    all.extend(next.iter().cloned());
                    layer = next;
                }
                all.into_iter().map(GroupElement::Free).collect()
            }
            GroupDescriptor::FinitelyPresented { .. } => return Err(GroupError::Unsupported),
        };
        let id = self.identity();
        out.sort_by_key(|g| (*g != id, self.word_length(g), g.clone()));
        Ok(out)
    }

    /// Size of an element for window bookkeeping: max-norm on free
    /// coordinates, word length for free groups, zero for finite groups.
    pub fn word_length(&self, g: &GroupElement) -> usize {
        match (self, g) {
            (GroupDescriptor::FgAbelian { free_rank, .. }, GroupElement::Abelian(v)) => {
                v[..*free_rank].iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0)
            }
            (_, GroupElement::Free(w)) => w.len(),
            _ => 0,
        }
    }

    /// Human-readable element, additive for abelian groups.
    pub fn format(&self, g: &GroupElement) -> String {
        match (self, g) {
            (GroupDescriptor::FgAbelian { .. }, GroupElement::Abelian(v)) => {
                if v.is_empty() {
                    "0".to_string()
                } else if v.len() == 1 {
                    v[0].to_string()
                } else {
                    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    format!("({})", parts.join(","))
                }
            }
            (GroupDescriptor::Free { rank }, GroupElement::Free(w)) => w.format_with(&free_generator_names(*rank)),
            (_, GroupElement::Finite(i)) => i.to_string(),
            (_, other) => format!("{other:?}"),
        }
    }

    /// All elements, when the group is finite.
    pub fn elements(&self) -> Option<Vec<GroupElement>> {
        self.order()?;
        self.ball(0).ok()
    }

    /// Whether `gens` generate the whole group.
    pub fn generates(&self, gens: &[GroupElement]) -> Result<bool, GroupError> {
        for g in gens {
            self.check(g)?;
        }
        match self {
            GroupDescriptor::FiniteTable { table, .. } => {
                let mut seen = BTreeSet::new();
                let mut queue = VecDeque::new();
                let id = self.identity();
                seen.insert(id.clone());
                queue.push_back(id);
                while let Some(x) = queue.pop_front() {
                    for g in gens {
                        let y = self.multiply(&x, g)?;
                        if seen.insert(y.clone()) {
                            queue.push_back(y);
                        }
                    }
                }
                Ok(seen.len() == table.len())
            }
            GroupDescriptor::FgAbelian { free_rank, torsion } => {
                let width = free_rank + torsion.len();
                if width == 0 {
                    return Ok(true);
                }
                // Lattice spanned by the generators and the torsion relations
                // must be all of Z^width.
                let mut rows: IntMatrix = gens
                    .iter()
                    .map(|g| match g {
                        GroupElement::Abelian(v) => v.iter().map(|&x| BigInt::from(x)).collect(),
                        _ => unreachable!(),
                    })
                    .collect();
                for (k, &t) in torsion.iter().enumerate() {
                    let mut r = vec![BigInt::zero(); width];
                    r[free_rank + k] = BigInt::from(t);
                    rows.push(r);
                }
                let snf = smith_normal_form(&rows);
                Ok(snf.diagonal.len() == width && snf.diagonal.iter().all(|d| d.is_one()))
            }
            GroupDescriptor::Free { rank } => {
                let words: Vec<Word> = gens
                    .iter()
                    .map(|g| match g {
                        GroupElement::Free(w) => w.clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                let folded = StallingsGraph::fold(&words);
                Ok((0..*rank).all(|g| folded.accepts(&Word::generator(g))))
            }
            GroupDescriptor::FinitelyPresented { .. } => Err(GroupError::Unsupported),
        }
    }
}

/// The folded core graph of a finitely generated subgroup of a free group.
///
/// Vertex 0 is the base point. Edges are labelled by generators and read
/// backwards for inverse letters. After folding the graph is deterministic,
/// so subgroup membership is decided by reading a word from the base.
#[derive(Clone, Debug)]
pub struct StallingsGraph {
    /// `out[v][(generator, inverse)] = w`
    out: Vec<BTreeMap<(usize, bool), usize>>,
}

impl StallingsGraph {
    pub fn fold(words: &[Word]) -> Self {
        // Petal graph: one closed loop per nontrivial word.
        let mut edges: Vec<(usize, usize, usize)> = Vec::new();
        let mut vertex_count = 1;
        for w in words {
            let letters = w.letters();
            if letters.is_empty() {
                continue;
            }
            let mut current = 0;
            for (k, l) in letters.iter().enumerate() {
                let next = if k + 1 == letters.len() {
                    0
                } else {
                    vertex_count += 1;
                    vertex_count - 1
                };
                if l.inverse {
                    edges.push((next, l.generator, current));
                } else {
                    edges.push((current, l.generator, next));
                }
                current = next;
            }
        }
        let mut parent: Vec<usize> = (0..vertex_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        // Repeatedly identify endpoints of equally labelled edges leaving or
        // entering a common vertex.
        loop {
            let mut merged = false;
            let mut seen: BTreeMap<(usize, usize, bool), usize> = BTreeMap::new();
            for &(s, g, t) in &edges {
                let (s, t) = (find(&mut parent, s), find(&mut parent, t));
                for (key, other) in [((s, g, false), t), ((t, g, true), s)] {
                    match seen.get(&key) {
                        Some(&prev) => {
                            let (a, b) = (find(&mut parent, prev), find(&mut parent, other));
                            if a != b {
                                parent[a.max(b)] = a.min(b);
                                merged = true;
                            }
                        }
                        None => {
                            seen.insert(key, other);
                        }
                    }
                }
                if merged {
                    break;
                }
            }
            if !merged {
                break;
            }
        }
        let roots: BTreeSet<usize> = (0..vertex_count).map(|v| find(&mut parent, v)).collect();
        let relabel: BTreeMap<usize, usize> = roots.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let mut out = vec![BTreeMap::new(); roots.len()];
        for &(s, g, t) in &edges {
            let s = relabel[&find(&mut parent, s)];
            let t = relabel[&find(&mut parent, t)];
            out[s].insert((g, false), t);
            out[t].insert((g, true), s);
        }
        StallingsGraph { out }
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    /// Membership: the word reads as a closed path at the base.
    pub fn accepts(&self, w: &Word) -> bool {
        let mut v = 0;
        for l in w.letters() {
            match self.out[v].get(&(l.generator, l.inverse)) {
                Some(&next) => v = next,
                None => return false,
            }
        }
        v == 0
    }
}

/// The abelianization of a finitely presented group in SNF coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abelianization {
    pub group: GroupDescriptor,
    /// Image of each original generator.
    pub generator_images: Vec<GroupElement>,
    /// For each coordinate of the abelian group, an exponent vector over the
    /// original generators mapping onto that coordinate's unit element.
    pub coordinate_preimages: Vec<Vec<i64>>,
}

/// `Z^generators` modulo the exponent-sum vectors of the relators, normalised
/// by Smith normal form into free rank and torsion orders.
pub fn abelianize(generators: usize, relators: &[Word]) -> Abelianization {
    let rows: IntMatrix = relators
        .iter()
        .map(|r| r.exponent_sums(generators).into_iter().map(BigInt::from).collect())
        .collect();
    // x -> x * right carries the relation lattice onto the diagonal lattice.
    let (diagonal, right, right_inv) = if rows.is_empty() || generators == 0 {
        let id = crate::exactlin::int_identity(generators);
        (Vec::new(), id.clone(), id)
    } else {
        let snf = smith_normal_form(&rows);
        (snf.diagonal, snf.right, snf.right_inverse)
    };
    let d_at = |i: usize| diagonal.get(i).cloned().unwrap_or_else(BigInt::zero);
    let mut torsion_coords = Vec::new();
    let mut free_coords = Vec::new();
    for i in 0..generators {
        let d = d_at(i);
        if d.is_zero() {
            free_coords.push(i);
        } else if !d.is_one() {
            torsion_coords.push((i, d.to_i64().expect("torsion order fits in i64")));
        }
    }
    let group = GroupDescriptor::FgAbelian {
        free_rank: free_coords.len(),
        torsion: torsion_coords.iter().map(|&(_, t)| t).collect(),
    };
    let coords: Vec<usize> = free_coords.iter().copied().chain(torsion_coords.iter().map(|&(i, _)| i)).collect();
    let generator_images = (0..generators)
        .map(|g| {
            let raw: Vec<i64> = coords.iter().map(|&c| right[g][c].to_i64().expect("small entries")).collect();
            group.abelian_element(&raw).expect("width matches")
        })
        .collect();
    let coordinate_preimages = coords
        .iter()
        .map(|&c| (0..generators).map(|g| right_inv[c][g].to_i64().expect("small entries")).collect())
        .collect();
    Abelianization { group, generator_images, coordinate_preimages }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> GroupDescriptor {
        GroupDescriptor::integers()
    }

    fn zi(n: i64) -> GroupElement {
        GroupElement::Abelian(vec![n])
    }

    #[test]
    fn free_reduction_on_multiply() {
        let f2 = GroupDescriptor::Free { rank: 2 };
        let a = GroupElement::Free(Word::from_signed(&[1, -2]));
        let b = GroupElement::Free(Word::from_signed(&[2, 1]));
        assert_eq!(f2.multiply(&a, &b).unwrap(), GroupElement::Free(Word::from_signed(&[1, 1])));
        assert_eq!(f2.format(&f2.multiply(&a, &b).unwrap()), "x^2");
    }

    #[test]
    fn abelian_and_table_arithmetic() {
        assert_eq!(z().multiply(&zi(3), &zi(-3)).unwrap(), z().identity());
        let c5 = GroupDescriptor::cyclic_table(5);
        assert_eq!(c5.multiply(&GroupElement::Finite(3), &GroupElement::Finite(4)).unwrap(), GroupElement::Finite(2));
        let z5 = GroupDescriptor::cyclic(5).unwrap();
        assert_eq!(z5.multiply(&GroupElement::Abelian(vec![3]), &GroupElement::Abelian(vec![4])).unwrap(), GroupElement::Abelian(vec![2]));
    }

    #[test]
    fn backend_mismatch_is_reported() {
        let f2 = GroupDescriptor::Free { rank: 2 };
        assert!(matches!(f2.multiply(&zi(1), &zi(2)), Err(GroupError::BackendMismatch { .. })));
        let z3 = GroupDescriptor::cyclic(3).unwrap();
        assert!(z3.check(&GroupElement::Abelian(vec![3])).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(GroupDescriptor::finite_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(GroupDescriptor::finite_table(vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(GroupDescriptor::fg_abelian(0, vec![1]).is_err());
    }

    #[test]
    fn generation_examples() {
        assert!(z().generates(&[zi(2), zi(3)]).unwrap());
        assert!(!z().generates(&[zi(2)]).unwrap());
        let f2 = GroupDescriptor::Free { rank: 2 };
        let x = GroupElement::Free(Word::generator(0));
        let y = GroupElement::Free(Word::generator(1));
        assert!(f2.generates(&[x.clone(), y.clone()]).unwrap());
        assert!(!f2.generates(&[x.clone()]).unwrap());
        // <xy, y> = F2
        let xy = GroupElement::Free(Word::from_signed(&[1, 2]));
        assert!(f2.generates(&[xy, y.clone()]).unwrap());
        // <x^2, y, xyx^-1> has index 2
        let sq = GroupElement::Free(Word::from_signed(&[1, 1]));
        let conj = GroupElement::Free(Word::from_signed(&[1, 2, -1]));
        assert!(!f2.generates(&[sq, y, conj]).unwrap());
        assert!(GroupDescriptor::trivial().generates(&[]).unwrap());
    }

    #[test]
    fn stallings_index_two_subgroup_has_two_vertices() {
        let g = StallingsGraph::fold(&[Word::from_signed(&[1, 1]), Word::from_signed(&[2]), Word::from_signed(&[1, 2, -1])]);
        assert_eq!(g.vertex_count(), 2);
        assert!(g.accepts(&Word::from_signed(&[1, 2, 2, -1])));
        assert!(!g.accepts(&Word::from_signed(&[1])));
    }

    #[test]
    fn abelianization_examples() {
        let a = abelianize(2, &[]);
        assert_eq!(a.group, GroupDescriptor::FgAbelian { free_rank: 2, torsion: vec![] });
        let comm = Word::from_signed(&[1, 2, -1, -2]);
        assert_eq!(abelianize(2, &[comm]).group, GroupDescriptor::FgAbelian { free_rank: 2, torsion: vec![] });
        // <a | a^6>, <a, b | a^2 b^-2, a^4>
        assert_eq!(abelianize(1, &[Word::from_signed(&[1; 6])]).group, GroupDescriptor::FgAbelian { free_rank: 0, torsion: vec![6] });
        let ab = abelianize(1, &[Word::from_signed(&[1])]);
        assert_eq!(ab.group, GroupDescriptor::trivial());
    }

    #[test]
    fn abelianization_images_kill_relators() {
        let rels = vec![Word::from_signed(&[1, 1, -2, -2]), Word::from_signed(&[1, 1, 1, 1]), Word::from_signed(&[3, -1])];
        let ab = abelianize(3, &rels);
        for r in &rels {
            let mut acc = ab.group.identity();
            for l in r.letters() {
                let img = &ab.generator_images[l.generator];
                let img = if l.inverse { ab.group.inverse(img).unwrap() } else { img.clone() };
                acc = ab.group.multiply(&acc, &img).unwrap();
            }
            assert!(ab.group.is_identity(&acc));
        }
        // Coordinate preimages map back onto unit coordinates.
        for (c, pre) in ab.coordinate_preimages.iter().enumerate() {
            let mut acc = ab.group.identity();
            for (g, &e) in pre.iter().enumerate() {
                acc = ab.group.multiply(&acc, &ab.group.pow(&ab.generator_images[g], e).unwrap()).unwrap();
            }
            let mut unit = vec![0; ab.coordinate_preimages.len()];
            unit[c] = 1;
            assert_eq!(acc, ab.group.abelian_element(&unit).unwrap());
        }
    }

    #[test]
    fn balls() {
        assert_eq!(z().ball(2).unwrap().len(), 5);
        assert_eq!(z().ball(2).unwrap()[0], zi(0));
        // free group of rank 2: 1 + 4 + 12
        assert_eq!(GroupDescriptor::Free { rank: 2 }.ball(2).unwrap().len(), 17);
        assert_eq!(GroupDescriptor::cyclic(4).unwrap().ball(0).unwrap().len(), 4);
    }

    #[test]
    fn display() {
        assert_eq!(z().to_string(), "Z");
        assert_eq!(GroupDescriptor::trivial().to_string(), "1");
        assert_eq!(GroupDescriptor::fg_abelian(2, vec![2, 4]).unwrap().to_string(), "Z^2 x Z/2 x Z/4");
    }
}
