//! Words and canonical normal forms in a graph product of cyclic groups.
//!
//! A presentation fixes a simplicial graph and one cyclic group per vertex;
//! the group it presents is generated by the vertex groups, with adjacent
//! vertex groups commuting elementwise. Elements are represented by words in
//! syllables `v^e`. Three moves preserve the element:
//!
//! * drop a syllable with exponent zero,
//! * merge two syllables at the same vertex when every syllable between them
//!   commutes with that vertex,
//! * swap two adjacent syllables whose vertices are joined by an edge.
//!
//! A word admitting no drop or merge is reduced; reduced words representing
//! the same element differ only by swaps, and their common length is minimal.
//! [`Presentation::reduce`] computes the canonical representative of the swap
//! class: among the syllables currently movable to the front, the one at the
//! smallest vertex id is emitted first, repeatedly. Two elements are equal
//! exactly when their canonical forms are equal as sequences.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::graph::{GraphError, SimplicialGraph, VertexId, VertexSet};

/// The cyclic group attached to a vertex: infinite, or of finite order >= 2.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CyclicGroup {
    Infinite,
    Finite(u64),
}

impl CyclicGroup {
    pub fn finite(n: u64) -> Result<Self, GroupError> {
        if n < 2 {
            Err(GroupError::OrderTooSmall(n))
        } else {
            Ok(CyclicGroup::Finite(n))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, CyclicGroup::Finite(_))
    }
}

impl fmt::Display for CyclicGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CyclicGroup::Infinite => write!(f, "Z"),
            CyclicGroup::Finite(n) => write!(f, "Z/{n}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("finite vertex group needs order >= 2, got {0}")]
    OrderTooSmall(u64),
    #[error("duplicate vertex label `{0}`")]
    DuplicateLabel(String),
    #[error("graph has {graph} vertices but {given} vertex descriptions were given")]
    VertexCountMismatch { graph: usize, given: usize },
    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),
    #[error("word does not belong to this presentation: {0}")]
    PresentationMismatch(String),
    #[error("element lies outside the retraction kernel: {0}")]
    OutsideKernel(String),
    #[error("vertex {0} is not in the base set")]
    VertexOutsideBase(String),
    #[error("{0}")]
    Unsupported(String),
}

/// A graph of cyclic groups: the ambient data every operation works over.
#[derive(Clone, PartialEq, Eq)]
pub struct Presentation {
    graph: SimplicialGraph,
    groups: Vec<CyclicGroup>,
    labels: Vec<String>,
}

impl Presentation {
    pub fn new(
        graph: SimplicialGraph,
        vertices: Vec<(String, CyclicGroup)>,
    ) -> Result<Self, GroupError> {
        if graph.vertex_count() != vertices.len() {
            return Err(GroupError::VertexCountMismatch {
                graph: graph.vertex_count(),
                given: vertices.len(),
            });
        }
        let mut labels = Vec::with_capacity(vertices.len());
        let mut groups = Vec::with_capacity(vertices.len());
        for (label, group) in vertices {
            if labels.contains(&label) {
                return Err(GroupError::DuplicateLabel(label));
            }
            if let CyclicGroup::Finite(n) = group {
                if n < 2 {
                    return Err(GroupError::OrderTooSmall(n));
                }
            }
            labels.push(label);
            groups.push(group);
        }
        Ok(Presentation { graph, groups, labels })
    }

    /// Convenience constructor from labelled vertices and labelled edges.
    pub fn from_desc(
        vertices: &[(&str, CyclicGroup)],
        edges: &[(&str, &str)],
    ) -> Result<Self, GroupError> {
        let mut graph = SimplicialGraph::new(vertices.len())?;
        let find = |l: &str| -> Result<VertexId, GroupError> {
            vertices
                .iter()
                .position(|(label, _)| *label == l)
                .map(VertexId)
                .ok_or_else(|| GroupError::UnknownLabel(l.to_string()))
        };
        for (a, b) in edges {
            graph.add_edge(find(a)?, find(b)?)?;
        }
        Presentation::new(
            graph,
            vertices
                .iter()
                .map(|(l, g)| (l.to_string(), *g))
                .collect(),
        )
    }

    #[inline]
    pub fn graph(&self) -> &SimplicialGraph {
        &self.graph
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    #[inline]
    pub fn group(&self, v: VertexId) -> CyclicGroup {
        self.groups[v.0]
    }

    #[inline]
    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.0]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.labels.iter().position(|l| l == label).map(VertexId)
    }

    pub fn set_to_labels(&self, s: VertexSet) -> Vec<String> {
        s.iter().map(|v| self.label(v).to_string()).collect()
    }

    /// Appends a fresh isolated vertex. Existing vertex ids, and therefore
    /// existing normal forms, stay valid.
    pub(crate) fn push_vertex(
        &mut self,
        label: String,
        group: CyclicGroup,
    ) -> Result<VertexId, GroupError> {
        if self.labels.contains(&label) {
            return Err(GroupError::DuplicateLabel(label));
        }
        if let CyclicGroup::Finite(n) = group {
            if n < 2 {
                return Err(GroupError::OrderTooSmall(n));
            }
        }
        let v = self.graph.push_vertex()?;
        self.labels.push(label);
        self.groups.push(group);
        Ok(v)
    }

    pub(crate) fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<bool, GroupError> {
        Ok(self.graph.add_edge(u, v)?)
    }

    /// The presentation of the full subgroup G_S, vertices renumbered to
    /// 0..|S| in ascending order of their old ids. Returns the new
    /// presentation together with the new-to-old vertex map.
    pub fn restrict(&self, s: VertexSet) -> (Presentation, Vec<VertexId>) {
        let (graph, old_ids) = self.graph.full_subgraph(s);
        let groups = old_ids.iter().map(|v| self.groups[v.0]).collect();
        let labels = old_ids.iter().map(|v| self.labels[v.0].clone()).collect();
        (
            Presentation { graph, groups, labels },
            old_ids,
        )
    }

    /// Exponent of `v^e` in canonical range: any nonzero integer for infinite
    /// vertices, a representative in 1..n for finite ones. None when trivial.
    fn normalize_exp(&self, v: VertexId, e: &BigInt) -> Option<BigInt> {
        match self.groups[v.0] {
            CyclicGroup::Infinite => {
                if e.is_zero() {
                    None
                } else {
                    Some(e.clone())
                }
            }
            CyclicGroup::Finite(n) => {
                let m = e.mod_floor(&BigInt::from(n));
                if m.is_zero() {
                    None
                } else {
                    Some(m)
                }
            }
        }
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presentation(")?;
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} {}", l, self.groups[i])?;
        }
        write!(f, "; edges ")?;
        f.debug_list()
            .entries(
                self.graph
                    .edges()
                    .iter()
                    .map(|(u, v)| (self.label(*u), self.label(*v))),
            )
            .finish()?;
        write!(f, ")")
    }
}

/// One syllable `v^e` of a word. Exponents are arbitrary-precision and, in a
/// normal form, always in the canonical range for the vertex group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    vertex: VertexId,
    exp: BigInt,
}

impl Syllable {
    #[inline]
    pub fn vertex(&self) -> VertexId {
        self.vertex
    }

    #[inline]
    pub fn exponent(&self) -> &BigInt {
        &self.exp
    }
}

impl fmt::Debug for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}^{}", self.vertex.0, self.exp)
    }
}

/// An unreduced word: any finite sequence of syllables, zero exponents
/// allowed. This is what parsers and generators produce.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word {
    syllables: Vec<(VertexId, BigInt)>,
}

impl Word {
    pub fn new() -> Self {
        Word { syllables: Vec::new() }
    }

    pub fn push(&mut self, v: VertexId, e: BigInt) {
        self.syllables.push((v, e));
    }

    pub fn from_pairs(pairs: Vec<(VertexId, BigInt)>) -> Self {
        Word { syllables: pairs }
    }

    pub fn syllables(&self) -> &[(VertexId, BigInt)] {
        &self.syllables
    }

    pub fn concat(mut self, other: Word) -> Word {
        self.syllables.extend(other.syllables);
        self
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|(v, e)| (*v, -e))
                .collect(),
        }
    }
}

impl From<NormalForm> for Word {
    fn from(nf: NormalForm) -> Word {
        Word {
            syllables: nf.sylls.into_iter().map(|s| (s.vertex, s.exp)).collect(),
        }
    }
}

impl From<&NormalForm> for Word {
    fn from(nf: &NormalForm) -> Word {
        Word {
            syllables: nf.sylls.iter().map(|s| (s.vertex, s.exp.clone())).collect(),
        }
    }
}

/// Canonical reduced word. Two normal forms over the same presentation are
/// equal as sequences exactly when they represent the same group element.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct NormalForm {
    sylls: Vec<Syllable>,
}

impl NormalForm {
    pub fn identity() -> Self {
        NormalForm { sylls: Vec::new() }
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.sylls.is_empty()
    }

    /// Number of syllables; the minimal word length representing the element.
    #[inline]
    pub fn len(&self) -> usize {
        self.sylls.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sylls.is_empty()
    }

    #[inline]
    pub fn syllables(&self) -> &[Syllable] {
        &self.sylls
    }

    /// Set of vertices whose syllables occur in the word.
    pub fn support(&self) -> VertexSet {
        self.sylls.iter().map(|s| s.vertex).collect()
    }
}

impl fmt::Debug for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sylls.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.sylls.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{s:?}")?;
        }
        Ok(())
    }
}

impl Presentation {
    fn check_vertex(&self, v: VertexId) -> Result<(), GroupError> {
        if v.0 >= self.vertex_count() {
            return Err(GroupError::PresentationMismatch(format!(
                "vertex index {} out of range ({} vertices)",
                v.0,
                self.vertex_count()
            )));
        }
        Ok(())
    }

    /// Verifies that a normal form is valid over this presentation: vertex
    /// ids in range and exponents in canonical range.
    pub fn validate(&self, x: &NormalForm) -> Result<(), GroupError> {
        for s in &x.sylls {
            self.check_vertex(s.vertex)?;
            match self.normalize_exp(s.vertex, &s.exp) {
                Some(e) if e == s.exp => {}
                _ => {
                    return Err(GroupError::PresentationMismatch(format!(
                        "syllable {}^{} has a non-canonical exponent",
                        self.label(s.vertex),
                        s.exp
                    )))
                }
            }
        }
        Ok(())
    }

    /// Appends one syllable to a reduced word, merging it with a matching
    /// syllable across a commuting gap when possible. Keeps the word reduced:
    /// a merge that cancels to zero removes the target, and removing a
    /// syllable whose whole right context commutes with it can never make a
    /// previously unjoinable pair joinable.
    fn push_syllable(&self, acc: &mut Vec<Syllable>, v: VertexId, e: &BigInt) {
        if self.normalize_exp(v, e).is_none() {
            return;
        }
        let mut j = acc.len();
        while j > 0 {
            j -= 1;
            let u = acc[j].vertex;
            if u == v {
                let merged = &acc[j].exp + e;
                match self.normalize_exp(v, &merged) {
                    Some(ne) => acc[j].exp = ne,
                    None => {
                        acc.remove(j);
                    }
                }
                return;
            }
            if !self.graph.adjacent(u, v) {
                break;
            }
        }
        acc.push(Syllable {
            vertex: v,
            exp: self.normalize_exp(v, e).expect("nonzero checked above"),
        });
    }

    /// Reorders a reduced word into the canonical representative of its swap
    /// class: repeatedly emit the front-movable syllable with the smallest
    /// vertex id. Two front-movable syllables never share a vertex in a
    /// reduced word, so the choice is unambiguous.
    fn canonical_order(&self, mut rest: Vec<Syllable>) -> Vec<Syllable> {
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut blocked = 0u64;
            let mut best: Option<usize> = None;
            for (i, s) in rest.iter().enumerate() {
                let vbit = 1u64 << s.vertex.0;
                if blocked & vbit == 0 && best.map_or(true, |b: usize| s.vertex < rest[b].vertex) {
                    best = Some(i);
                }
                // Everything after position i must commute with s to get in
                // front of it; s's own vertex is blocked too.
                blocked |= !self.graph.link(s.vertex).bits() | vbit;
            }
            out.push(rest.remove(best.expect("nonempty word has a front syllable")));
        }
        out
    }

    fn reduce_unchecked(&self, syllables: impl Iterator<Item = (VertexId, BigInt)>) -> NormalForm {
        let mut acc: Vec<Syllable> = Vec::new();
        for (v, e) in syllables {
            self.push_syllable(&mut acc, v, &e);
        }
        NormalForm {
            sylls: self.canonical_order(acc),
        }
    }

    /// Canonical normal form of an arbitrary word.
    pub fn reduce(&self, w: &Word) -> Result<NormalForm, GroupError> {
        for (v, _) in &w.syllables {
            self.check_vertex(*v)?;
        }
        Ok(self.reduce_unchecked(w.syllables.iter().map(|(v, e)| (*v, e.clone()))))
    }

    pub fn identity(&self) -> NormalForm {
        NormalForm::identity()
    }

    /// The generator `v^1` as a normal form.
    pub fn generator(&self, v: VertexId) -> NormalForm {
        NormalForm {
            sylls: vec![Syllable {
                vertex: v,
                exp: BigInt::from(1),
            }],
        }
    }

    /// Builds a normal form from (label, exponent) pairs; test and fixture
    /// convenience.
    pub fn element(&self, pairs: &[(&str, i64)]) -> Result<NormalForm, GroupError> {
        let mut w = Word::new();
        for (label, e) in pairs {
            let v = self
                .vertex_by_label(label)
                .ok_or_else(|| GroupError::UnknownLabel(label.to_string()))?;
            w.push(v, BigInt::from(*e));
        }
        self.reduce(&w)
    }

    pub(crate) fn mul_nf(&self, x: &NormalForm, y: &NormalForm) -> NormalForm {
        let mut acc: Vec<Syllable> = x.sylls.clone();
        for s in &y.sylls {
            self.push_syllable(&mut acc, s.vertex, &s.exp);
        }
        NormalForm {
            sylls: self.canonical_order(acc),
        }
    }

    pub fn multiply(&self, x: &NormalForm, y: &NormalForm) -> Result<NormalForm, GroupError> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(self.mul_nf(x, y))
    }

    pub(crate) fn inv_nf(&self, x: &NormalForm) -> NormalForm {
        // The reversed, exponent-negated sequence is already reduced; it only
        // needs canonical reordering.
        let rev: Vec<Syllable> = x
            .sylls
            .iter()
            .rev()
            .map(|s| Syllable {
                vertex: s.vertex,
                exp: self
                    .normalize_exp(s.vertex, &(-&s.exp))
                    .expect("inverse of a nonzero syllable is nonzero"),
            })
            .collect();
        NormalForm {
            sylls: self.canonical_order(rev),
        }
    }

    pub fn invert(&self, x: &NormalForm) -> Result<NormalForm, GroupError> {
        self.validate(x)?;
        Ok(self.inv_nf(x))
    }

    /// g^-1 x g.
    pub(crate) fn conj_nf(&self, x: &NormalForm, g: &NormalForm) -> NormalForm {
        let gi = self.inv_nf(g);
        self.mul_nf(&self.mul_nf(&gi, x), g)
    }

    pub fn conjugate(&self, x: &NormalForm, g: &NormalForm) -> Result<NormalForm, GroupError> {
        self.validate(x)?;
        self.validate(g)?;
        Ok(self.conj_nf(x, g))
    }

    /// x^k by binary exponentiation.
    pub fn power(&self, x: &NormalForm, k: &BigInt) -> Result<NormalForm, GroupError> {
        self.validate(x)?;
        let mut base = if k.is_negative() {
            self.inv_nf(x)
        } else {
            x.clone()
        };
        let mut k = k.abs();
        let mut out = NormalForm::identity();
        while !k.is_zero() {
            if k.is_odd() {
                out = self.mul_nf(&out, &base);
            }
            k >>= 1u32;
            if !k.is_zero() {
                base = self.mul_nf(&base, &base);
            }
        }
        Ok(out)
    }

    /// Vertices that can start a reduced word for x: v is in the set when the
    /// leftmost v-syllable commutes past everything before it.
    pub fn first_vertices(&self, x: &NormalForm) -> VertexSet {
        let mut blocked = 0u64;
        let mut fv = 0u64;
        for s in &x.sylls {
            let vbit = 1u64 << s.vertex.0;
            if blocked & vbit == 0 {
                fv |= vbit;
            }
            blocked |= !self.graph.link(s.vertex).bits() | vbit;
        }
        VertexSet::from_bits(fv)
    }

    /// Vertices that can end a reduced word for x; equals the first vertices
    /// of the inverse.
    pub fn last_vertices(&self, x: &NormalForm) -> VertexSet {
        let mut blocked = 0u64;
        let mut lv = 0u64;
        for s in x.sylls.iter().rev() {
            let vbit = 1u64 << s.vertex.0;
            if blocked & vbit == 0 {
                lv |= vbit;
            }
            blocked |= !self.graph.link(s.vertex).bits() | vbit;
        }
        VertexSet::from_bits(lv)
    }

    /// Removes the leftmost v-syllable when it is front-movable, returning it
    /// and the canonical rest: x = syllable * rest.
    pub(crate) fn extract_front(&self, x: &NormalForm, v: VertexId) -> Option<(Syllable, NormalForm)> {
        let mut blocked = 0u64;
        for (i, s) in x.sylls.iter().enumerate() {
            if s.vertex == v {
                if blocked & (1u64 << v.0) != 0 {
                    return None;
                }
                let mut rest = x.sylls.clone();
                let s = rest.remove(i);
                return Some((
                    s,
                    NormalForm {
                        sylls: self.canonical_order(rest),
                    },
                ));
            }
            blocked |= !self.graph.link(s.vertex).bits() | (1u64 << s.vertex.0);
        }
        None
    }

    /// Removes the rightmost v-syllable when it is end-movable, returning the
    /// canonical rest and the syllable: x = rest * syllable.
    pub(crate) fn extract_back(&self, x: &NormalForm, v: VertexId) -> Option<(NormalForm, Syllable)> {
        let mut blocked = 0u64;
        for (i, s) in x.sylls.iter().enumerate().rev() {
            if s.vertex == v {
                if blocked & (1u64 << v.0) != 0 {
                    return None;
                }
                let mut rest = x.sylls.clone();
                let s = rest.remove(i);
                return Some((
                    NormalForm {
                        sylls: self.canonical_order(rest),
                    },
                    s,
                ));
            }
            blocked |= !self.graph.link(s.vertex).bits() | (1u64 << s.vertex.0);
        }
        None
    }

    pub(crate) fn syllable_nf(&self, s: &Syllable) -> NormalForm {
        NormalForm {
            sylls: vec![s.clone()],
        }
    }

    /// Writes x = h * core * h^-1 with the core of minimal length among
    /// single-syllable conjugation descents. In each round the front-movable
    /// syllable with the smallest vertex id whose conjugation strictly
    /// shortens the word is stripped.
    pub fn cyclically_reduce(&self, x: &NormalForm) -> Result<(NormalForm, NormalForm), GroupError> {
        self.validate(x)?;
        let mut h = NormalForm::identity();
        let mut core = x.clone();
        loop {
            let mut stripped = false;
            for v in self.first_vertices(&core).iter() {
                let (s, _) = self
                    .extract_front(&core, v)
                    .expect("front vertex has a front-movable syllable");
                let snf = self.syllable_nf(&s);
                let cand = self.conj_nf(&core, &snf);
                if cand.len() < core.len() {
                    h = self.mul_nf(&h, &snf);
                    core = cand;
                    stripped = true;
                    break;
                }
            }
            if !stripped {
                return Ok((h, core));
            }
        }
    }

    /// Minimal representative of the coset x G_S: greedily strips
    /// end-movable syllables whose vertex lies in S.
    pub(crate) fn coset_rep(&self, x: &NormalForm, s: VertexSet) -> NormalForm {
        let mut g = x.clone();
        'strip: loop {
            for v in self.last_vertices(&g).iter() {
                if s.contains(v) {
                    let (rest, _) = self
                        .extract_back(&g, v)
                        .expect("last vertex has an end-movable syllable");
                    g = rest;
                    continue 'strip;
                }
            }
            return g;
        }
    }

    /// Order of the element: None when infinite. Finite exactly when the
    /// cyclically reduced core is supported on a clique of finite vertices;
    /// the core then lives in a direct product of finite cyclic groups and
    /// its order is the lcm of the syllable orders.
    pub fn order(&self, x: &NormalForm) -> Result<Option<BigInt>, GroupError> {
        let (_, core) = self.cyclically_reduce(x)?;
        if core.is_identity() {
            return Ok(Some(BigInt::from(1)));
        }
        let supp: Vec<VertexId> = core.support().iter().collect();
        for (i, &u) in supp.iter().enumerate() {
            for &v in supp.iter().skip(i + 1) {
                if !self.graph.adjacent(u, v) {
                    return Ok(None);
                }
            }
        }
        let mut order = BigInt::from(1);
        for s in core.syllables() {
            match self.group(s.vertex) {
                CyclicGroup::Infinite => return Ok(None),
                CyclicGroup::Finite(n) => {
                    let n = BigInt::from(n);
                    let g = s.exp.gcd(&n);
                    order = order.lcm(&(n / g));
                }
            }
        }
        Ok(Some(order))
    }

    /// Total syllable length of a family of elements.
    pub fn total_length(&self, xs: &[NormalForm]) -> usize {
        xs.iter().map(|x| x.len()).sum()
    }

    /// Canonical text for an element: `label^exp` syllables joined by `*`,
    /// identity printed as `1`.
    pub fn format_word(&self, x: &NormalForm) -> String {
        if x.is_identity() {
            return "1".to_string();
        }
        x.sylls
            .iter()
            .map(|s| format!("{}^{}", self.label(s.vertex), s.exp))
            .collect::<Vec<_>>()
            .join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn racg_pair(adjacent: bool) -> Presentation {
        let edges: &[(&str, &str)] = if adjacent { &[("u", "w")] } else { &[] };
        Presentation::from_desc(
            &[("u", CyclicGroup::Finite(2)), ("w", CyclicGroup::Finite(2))],
            edges,
        )
        .unwrap()
    }

    fn raag_path() -> Presentation {
        // a - b - c with all vertex groups Z
        Presentation::from_desc(
            &[
                ("a", CyclicGroup::Infinite),
                ("b", CyclicGroup::Infinite),
                ("c", CyclicGroup::Infinite),
            ],
            &[("a", "b"), ("b", "c")],
        )
        .unwrap()
    }

    fn ex1() -> Presentation {
        // v1 - v2 - v3 with Z/3 at v1, labels chosen as generators a, c, b
        Presentation::from_desc(
            &[
                ("a", CyclicGroup::Finite(3)),
                ("c", CyclicGroup::Infinite),
                ("b", CyclicGroup::Infinite),
            ],
            &[("a", "c"), ("c", "b")],
        )
        .unwrap()
    }

    #[test]
    fn free_product_of_involutions_does_not_collapse() {
        let p = racg_pair(false);
        let x = p.element(&[("u", 1), ("w", 1), ("u", 1), ("w", 1)]).unwrap();
        assert_eq!(x.len(), 4);
    }

    #[test]
    fn commuting_involutions_collapse() {
        let p = racg_pair(true);
        let x = p.element(&[("u", 1), ("w", 1), ("u", 1), ("w", 1)]).unwrap();
        assert!(x.is_identity());
        let y = p.element(&[("u", 1), ("w", 1)]).unwrap();
        assert_eq!(y.len(), 2);
    }

    #[test]
    fn merge_across_commuting_gap() {
        // acacac with a, c adjacent and a of order 3: collapses to c^3.
        let p = ex1();
        let x = p
            .element(&[("a", 1), ("c", 1), ("a", 1), ("c", 1), ("a", 1), ("c", 1)])
            .unwrap();
        assert_eq!(p.format_word(&x), "c^3");
    }

    #[test]
    fn canonical_order_prefers_small_vertex_ids() {
        let p = raag_path();
        // b*a with edge a-b: canonical order lists a first.
        let x = p.element(&[("b", 1), ("a", 1)]).unwrap();
        assert_eq!(p.format_word(&x), "a^1*b^1");
        // c*a with no edge: order as written.
        let y = p.element(&[("c", 1), ("a", 1)]).unwrap();
        assert_eq!(p.format_word(&y), "c^1*a^1");
    }

    #[test]
    fn finite_exponents_are_reduced_mod_order() {
        let p = ex1();
        let x = p.element(&[("a", -1)]).unwrap();
        assert_eq!(p.format_word(&x), "a^2");
        let y = p.element(&[("a", 3)]).unwrap();
        assert!(y.is_identity());
    }

    #[test]
    fn inverse_and_multiply_are_consistent() {
        let p = raag_path();
        let x = p.element(&[("a", 2), ("c", -1), ("b", 3)]).unwrap();
        let xi = p.invert(&x).unwrap();
        assert!(p.multiply(&x, &xi).unwrap().is_identity());
        assert!(p.multiply(&xi, &x).unwrap().is_identity());
    }

    #[test]
    fn power_matches_repeated_multiplication() {
        let p = raag_path();
        let x = p.element(&[("a", 1), ("c", 1)]).unwrap();
        let mut acc = NormalForm::identity();
        for _ in 0..5 {
            acc = p.multiply(&acc, &x).unwrap();
        }
        assert_eq!(p.power(&x, &BigInt::from(5)).unwrap(), acc);
        assert_eq!(p.power(&x, &BigInt::from(-5)).unwrap(), p.invert(&acc).unwrap());
        assert!(p.power(&x, &BigInt::from(0)).unwrap().is_identity());
    }

    #[test]
    fn first_and_last_vertices() {
        let p = raag_path();
        let x = p.element(&[("a", 1), ("b", 1), ("c", 1)]).unwrap();
        let a = p.vertex_by_label("a").unwrap();
        let b = p.vertex_by_label("b").unwrap();
        let c = p.vertex_by_label("c").unwrap();
        assert_eq!(p.first_vertices(&x), [a, b].into_iter().collect());
        assert_eq!(p.last_vertices(&x), [b, c].into_iter().collect());
        // fv(x^-1) = lv(x)
        let xi = p.invert(&x).unwrap();
        assert_eq!(p.first_vertices(&xi), p.last_vertices(&x));
    }

    #[test]
    fn support_tracks_vertices() {
        let p = raag_path();
        let x = p.element(&[("a", 1), ("c", 2), ("a", -1)]).unwrap();
        let a = p.vertex_by_label("a").unwrap();
        let c = p.vertex_by_label("c").unwrap();
        assert_eq!(x.support(), [a, c].into_iter().collect());
    }

    #[test]
    fn cyclic_reduction_strips_conjugating_shell() {
        let p = raag_path();
        // a c a^-1 with a, c non-adjacent: core c, shell a.
        let x = p.element(&[("a", 1), ("c", 1), ("a", -1)]).unwrap();
        let (h, core) = p.cyclically_reduce(&x).unwrap();
        assert_eq!(p.format_word(&core), "c^1");
        assert_eq!(p.format_word(&h), "a^1");
        let back = p
            .multiply(&p.multiply(&h, &core).unwrap(), &p.invert(&h).unwrap())
            .unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn orders_follow_clique_structure() {
        // Non-adjacent involutions: u*w has infinite order.
        let p = racg_pair(false);
        let x = p.element(&[("u", 1), ("w", 1)]).unwrap();
        assert_eq!(p.order(&x).unwrap(), None);
        // Adjacent involutions: u*w has order 2.
        let p = racg_pair(true);
        let x = p.element(&[("u", 1), ("w", 1)]).unwrap();
        assert_eq!(p.order(&x).unwrap(), Some(BigInt::from(2)));
        // Conjugate of a torsion generator keeps its order.
        let p = ex1();
        let x = p.element(&[("b", 1), ("a", 1), ("b", -1)]).unwrap();
        assert_eq!(p.order(&x).unwrap(), Some(BigInt::from(3)));
        // Identity.
        assert_eq!(
            p.order(&NormalForm::identity()).unwrap(),
            Some(BigInt::from(1))
        );
        // Infinite vertex generator.
        let c = p.element(&[("c", 5)]).unwrap();
        assert_eq!(p.order(&c).unwrap(), None);
    }

    #[test]
    fn validate_rejects_foreign_words() {
        let p = ex1();
        let q = raag_path();
        // a^2 is canonical for ex1 (order 3) but for raag_path the same
        // syllable is fine too; build something genuinely invalid instead.
        let x = p.element(&[("a", 2)]).unwrap();
        assert!(q.validate(&x).is_ok());
        let big = q.element(&[("c", 1)]).unwrap();
        let tiny = Presentation::from_desc(&[("a", CyclicGroup::Infinite)], &[]).unwrap();
        assert!(matches!(
            tiny.validate(&big),
            Err(GroupError::PresentationMismatch(_))
        ));
    }
}
