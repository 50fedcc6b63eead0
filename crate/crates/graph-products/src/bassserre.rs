//! Amalgam splittings over vertex stars and the action on the associated
//! tree.
//!
//! Removing one vertex v splits the group as an amalgamated product: the
//! subgroup avoiding v and the subgroup on star(v) = {v} ∪ link(v) glue
//! along the subgroup on link(v). The splitting is degenerate exactly when
//! v is adjacent to everything else, in which case the second factor is the
//! whole group and [`split_at`] refuses it.
//!
//! [`split_at`]: Presentation::split_at
//!
//! Elements factor canonically along the splitting: a link-supported prefix
//! followed by factors strictly alternating between the two sides, none of
//! them inside the edge subgroup. Greedy maximal extraction computes this,
//! and the number of factors is an invariant of the element. On the tree
//! whose vertices are cosets of the two sides, an element either fixes a
//! vertex (it conjugates into one side) or translates along an axis; the
//! two cases fall out of cyclically reducing the factor sequence, and in
//! the second the factor count that remains is the translation length.

use std::fmt;

use crate::graph::{VertexId, VertexSet};
use crate::words::{GroupError, NormalForm, Presentation};

/// Which side of the splitting a factor belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The subgroup avoiding the apex vertex.
    A,
    /// The subgroup on the star of the apex.
    B,
}

/// An amalgam splitting of the group over the link of one vertex.
#[derive(Clone)]
pub struct Splitting {
    pres: Presentation,
    apex: VertexId,
    a_side: VertexSet,
    b_side: VertexSet,
    edge: VertexSet,
}

/// Canonical factorization of an element along a splitting: an
/// edge-supported prefix, then factors alternating between the sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingForm {
    /// Maximal leading part supported in the edge set.
    pub prefix: NormalForm,
    /// Alternating factors; each contains a syllable outside the edge set.
    pub factors: Vec<(Side, NormalForm)>,
}

impl AlternatingForm {
    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }
}

/// How an element acts on the tree of the splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeAction {
    /// Fixes a tree vertex: the conjugated element lies in one side (or in
    /// the edge subgroup itself).
    Elliptic {
        conjugator: NormalForm,
        fixed: FixedPoint,
    },
    /// Translates along an axis by the given amount.
    Hyperbolic { translation_length: usize },
}

/// Where an elliptic element lands after conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixedPoint {
    SideA,
    SideB,
    Edge,
}

impl fmt::Debug for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Splitting(apex={}, A={:?}, B={:?}, edge={:?})",
            self.pres.label(self.apex),
            self.a_side,
            self.b_side,
            self.edge
        )
    }
}

impl Presentation {
    /// Splits the group over the link of `v`: the side avoiding `v` and the
    /// side on star(v), glued along G_link(v). Fails when `v` is adjacent
    /// to every other vertex, since the star side is then everything.
    pub fn split_at(&self, v: VertexId) -> Result<Splitting, GroupError> {
        if v.index() >= self.vertex_count() {
            return Err(GroupError::Graph(crate::graph::GraphError::OutOfRange(
                v.index(),
                self.vertex_count(),
            )));
        }
        let edge = self.graph().link(v);
        let a_side = self.graph().vertices().minus(VertexSet::singleton(v));
        if edge == a_side {
            return Err(GroupError::Unsupported(format!(
                "vertex {} is adjacent to every other vertex; the splitting at it is degenerate",
                self.label(v)
            )));
        }
        Ok(Splitting {
            pres: self.clone(),
            apex: v,
            a_side,
            b_side: edge.union(VertexSet::singleton(v)),
            edge,
        })
    }

    /// Maximal prefix of x supported in s, with the remainder.
    fn extract_left(&self, x: &NormalForm, s: VertexSet) -> (NormalForm, NormalForm) {
        let mut prefix = NormalForm::identity();
        let mut rest = x.clone();
        'outer: loop {
            for v in self.first_vertices(&rest).iter() {
                if s.contains(v) {
                    let (syll, r) = self
                        .extract_front(&rest, v)
                        .expect("front vertex has a front-movable syllable");
                    prefix = self.mul_nf(&prefix, &self.syllable_nf(&syll));
                    rest = r;
                    continue 'outer;
                }
            }
            return (prefix, rest);
        }
    }
}

impl Splitting {
    #[inline]
    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    #[inline]
    pub fn apex(&self) -> VertexId {
        self.apex
    }

    /// Vertex set of the side avoiding the apex.
    #[inline]
    pub fn a_side(&self) -> VertexSet {
        self.a_side
    }

    /// Vertex set of the star side.
    #[inline]
    pub fn b_side(&self) -> VertexSet {
        self.b_side
    }

    /// Vertex set of the edge subgroup, the link of the apex.
    #[inline]
    pub fn edge_set(&self) -> VertexSet {
        self.edge
    }

    /// Canonical alternating factorization. Maximal extraction alternates by
    /// itself: a factor entirely inside the edge subgroup would have been
    /// absorbed by the previous pass, so every factor is genuine.
    pub fn alternating_form(&self, x: &NormalForm) -> Result<AlternatingForm, GroupError> {
        self.pres.validate(x)?;
        Ok(self.alternating_form_nf(x))
    }

    fn alternating_form_nf(&self, x: &NormalForm) -> AlternatingForm {
        let (prefix, mut rest) = self.pres.extract_left(x, self.edge);
        let mut factors = Vec::new();
        while !rest.is_empty() {
            let (fa, r) = self.pres.extract_left(&rest, self.a_side);
            if !fa.is_empty() {
                factors.push((Side::A, fa));
                rest = r;
                continue;
            }
            let (fb, r) = self.pres.extract_left(&rest, self.b_side);
            debug_assert!(!fb.is_empty(), "some side must always make progress");
            factors.push((Side::B, fb));
            rest = r;
        }
        AlternatingForm { prefix, factors }
    }

    /// Puts the factorization back together; inverse of
    /// [`alternating_form`](Splitting::alternating_form).
    pub fn reassemble(&self, form: &AlternatingForm) -> NormalForm {
        let mut acc = form.prefix.clone();
        for (_, f) in &form.factors {
            acc = self.pres.mul_nf(&acc, f);
        }
        acc
    }

    /// Classifies the action of x on the tree of the splitting. The factor
    /// sequence is cyclically reduced by conjugating the first factor away
    /// whenever the outer factors lie on the same side; each round shortens
    /// the sequence, and the element is elliptic exactly when at most one
    /// factor survives.
    pub fn classify(&self, x: &NormalForm) -> Result<TreeAction, GroupError> {
        self.pres.validate(x)?;
        let mut conj = NormalForm::identity();
        let mut current = x.clone();
        let mut form = self.alternating_form_nf(&current);
        loop {
            let count = form.factor_count();
            if count == 0 {
                return Ok(TreeAction::Elliptic {
                    conjugator: conj,
                    fixed: FixedPoint::Edge,
                });
            }
            if count == 1 {
                let fixed = match form.factors[0].0 {
                    Side::A => FixedPoint::SideA,
                    Side::B => FixedPoint::SideB,
                };
                return Ok(TreeAction::Elliptic {
                    conjugator: conj,
                    fixed,
                });
            }
            let first = form.factors[0].0;
            let last = form.factors[count - 1].0;
            if first != last {
                return Ok(TreeAction::Hyperbolic {
                    translation_length: count,
                });
            }
            // Outer factors on the same side: rotate the leading factor
            // (with the prefix attached) to the back.
            let lead = self.pres.mul_nf(&form.prefix, &form.factors[0].1);
            current = self
                .pres
                .conj_nf(&current, &lead);
            conj = self.pres.mul_nf(&conj, &lead);
            let next = self.alternating_form_nf(&current);
            debug_assert!(
                next.factor_count() < count,
                "cyclic reduction must shorten the factor sequence"
            );
            form = next;
        }
    }
}
