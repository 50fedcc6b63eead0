//! The kernel of a vertex retraction, presented as a graph product again.
//!
//! Fix an axis vertex a and retract onto its vertex group by killing every
//! other syllable. The kernel K of that retraction is itself a graph product:
//! its vertices are the vertices of link(a), kept once, together with one
//! copy of every remaining vertex u for every a-exponent g, standing for the
//! conjugate a^g u a^-g. Two copies commute exactly when their underlying
//! vertices do and their a-exponents agree (link vertices commute with a and
//! carry no exponent).
//!
//! [`KernelPresentation`] materializes this product. When the axis group is
//! finite and the whole vertex set fits, every copy is realized up front in
//! a fixed order; otherwise copies are created on demand as elements are
//! rewritten, so the infinite presentation stays usable. [`project`] rewrites
//! a kernel element over the new vertices by walking its syllables and
//! tracking the running a-exponent; [`lift`] substitutes the conjugates back.
//! The two maps are mutually inverse, and projection never lengthens a word:
//! it drops all axis syllables, so elements actually involving the axis lose
//! at least two syllables.
//!
//! [`project`]: KernelPresentation::project
//! [`lift`]: KernelPresentation::lift
//!
//! On top of the rewriting sits [`compress`]: alternately shrink a family to
//! the presentation of its essential support and, whenever some vertex group
//! sees the whole family in its retraction kernel, pass to that kernel. The
//! result is a family that fills its presentation: every vertex is essential
//! and every vertex retraction is nontrivial somewhere.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::graph::{SimplicialGraph, VertexId, VertexSet};
use crate::parabolic::{ClosureFlag, SearchBudget};
use crate::words::{CyclicGroup, GroupError, NormalForm, Presentation, Word};

/// A vertex of the kernel presentation, described through the ambient group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeltaVertex {
    /// A link vertex, shared by all conjugates: commutes with the axis.
    Shared(VertexId),
    /// The conjugate a^g u a^-g of a non-link vertex u.
    Offset(BigInt, VertexId),
}

impl fmt::Debug for DeltaVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaVertex::Shared(u) => write!(f, "Shared({u:?})"),
            DeltaVertex::Offset(g, u) => write!(f, "Offset({g}, {u:?})"),
        }
    }
}

/// The kernel of the retraction onto one vertex group, as a graph product.
pub struct KernelPresentation {
    ambient: Presentation,
    axis: VertexId,
    shared: VertexSet,
    offsets: VertexSet,
    delta: Presentation,
    descriptors: Vec<DeltaVertex>,
    lookup: HashMap<DeltaVertex, VertexId>,
    eager: bool,
}

impl KernelPresentation {
    /// Sets up the kernel of the retraction onto the vertex group at `axis`.
    /// With a finite axis group and few enough copies the presentation is
    /// realized completely; otherwise vertices appear as elements need them.
    pub fn new(ambient: &Presentation, axis: VertexId) -> Result<Self, GroupError> {
        if axis.index() >= ambient.vertex_count() {
            return Err(GroupError::Graph(crate::graph::GraphError::OutOfRange(
                axis.index(),
                ambient.vertex_count(),
            )));
        }
        let shared = ambient.graph().link(axis);
        let offsets = ambient
            .graph()
            .vertices()
            .minus(shared)
            .minus(VertexSet::singleton(axis));
        let delta = Presentation::new(SimplicialGraph::new(0)?, Vec::new())?;
        let mut kp = KernelPresentation {
            ambient: ambient.clone(),
            axis,
            shared,
            offsets,
            delta,
            descriptors: Vec::new(),
            lookup: HashMap::new(),
            eager: false,
        };
        for u in shared.iter() {
            kp.realize(DeltaVertex::Shared(u))?;
        }
        if let CyclicGroup::Finite(n) = ambient.group(axis) {
            let total = shared.len() as u128 + n as u128 * offsets.len() as u128;
            if total <= 64 {
                for g in 0..n {
                    for u in offsets.iter() {
                        kp.realize(DeltaVertex::Offset(BigInt::from(g), u))?;
                    }
                }
                kp.eager = true;
            }
        } else if offsets.is_empty() {
            kp.eager = true;
        }
        Ok(kp)
    }

    #[inline]
    pub fn ambient(&self) -> &Presentation {
        &self.ambient
    }

    #[inline]
    pub fn axis(&self) -> VertexId {
        self.axis
    }

    /// Link vertices of the axis, kept as single kernel vertices.
    #[inline]
    pub fn shared(&self) -> VertexSet {
        self.shared
    }

    /// Vertices that split into one copy per axis exponent.
    #[inline]
    pub fn offset_vertices(&self) -> VertexSet {
        self.offsets
    }

    /// The kernel presentation over the vertices realized so far.
    #[inline]
    pub fn delta(&self) -> &Presentation {
        &self.delta
    }

    /// True when every kernel vertex is already realized.
    #[inline]
    pub fn fully_realized(&self) -> bool {
        self.eager
    }

    /// Description of a realized kernel vertex.
    pub fn descriptor(&self, v: VertexId) -> &DeltaVertex {
        &self.descriptors[v.index()]
    }

    /// Total number of kernel vertices; None when the axis group is infinite
    /// and at least one vertex splits into infinitely many copies.
    pub fn expected_vertex_count(&self) -> Option<BigInt> {
        let b = BigInt::from(self.shared.len());
        if self.offsets.is_empty() {
            return Some(b);
        }
        match self.ambient.group(self.axis) {
            CyclicGroup::Finite(n) => Some(b + BigInt::from(n) * BigInt::from(self.offsets.len())),
            CyclicGroup::Infinite => None,
        }
    }

    /// Total number of kernel edges, on the same terms.
    pub fn expected_edge_count(&self) -> Option<BigInt> {
        let mut within_shared = 0u64;
        let mut split = 0u64;
        for (u, v) in self.ambient.graph().edges() {
            if u == self.axis || v == self.axis {
                continue;
            }
            if self.shared.contains(u) && self.shared.contains(v) {
                within_shared += 1;
            } else {
                split += 1;
            }
        }
        if split == 0 {
            return Some(BigInt::from(within_shared));
        }
        match self.ambient.group(self.axis) {
            CyclicGroup::Finite(n) => {
                Some(BigInt::from(within_shared) + BigInt::from(n) * BigInt::from(split))
            }
            CyclicGroup::Infinite => None,
        }
    }

    fn commuting(&self, d1: &DeltaVertex, d2: &DeltaVertex) -> bool {
        let (u, v) = match (d1, d2) {
            (DeltaVertex::Shared(u), DeltaVertex::Shared(v)) => (*u, *v),
            (DeltaVertex::Shared(u), DeltaVertex::Offset(_, v)) => (*u, *v),
            (DeltaVertex::Offset(_, u), DeltaVertex::Shared(v)) => (*u, *v),
            (DeltaVertex::Offset(g, u), DeltaVertex::Offset(h, v)) => {
                if g != h {
                    return false;
                }
                (*u, *v)
            }
        };
        self.ambient.graph().adjacent(u, v)
    }

    /// Realizes a kernel vertex (an existing one is just returned) and wires
    /// its commutation edges to everything realized before it.
    pub fn realize(&mut self, d: DeltaVertex) -> Result<VertexId, GroupError> {
        if let Some(&id) = self.lookup.get(&d) {
            return Ok(id);
        }
        let (label, group) = match &d {
            DeltaVertex::Shared(u) => (
                self.ambient.label(*u).to_string(),
                self.ambient.group(*u),
            ),
            DeltaVertex::Offset(g, u) => (
                format!("{}@{}", self.ambient.label(*u), g),
                self.ambient.group(*u),
            ),
        };
        let id = self.delta.push_vertex(label, group)?;
        for (i, other) in self.descriptors.iter().enumerate() {
            if self.commuting(&d, other) {
                self.delta.add_edge(id, VertexId(i))?;
            }
        }
        self.descriptors.push(d.clone());
        self.lookup.insert(d, id);
        Ok(id)
    }

    fn offset_class(&self, h: &BigInt) -> BigInt {
        match self.ambient.group(self.axis) {
            CyclicGroup::Finite(n) => h.mod_floor(&BigInt::from(n)),
            CyclicGroup::Infinite => h.clone(),
        }
    }

    /// Rewrites a kernel element over the kernel vertices: axis syllables
    /// are absorbed into a running exponent, everything else becomes the
    /// current conjugate copy. Rejects elements with a nontrivial axis
    /// retraction, which lie outside the kernel.
    pub fn project(&mut self, x: &NormalForm) -> Result<NormalForm, GroupError> {
        self.ambient.validate(x)?;
        if self.ambient.vertex_projection_nontrivial(x, self.axis) {
            return Err(GroupError::OutsideKernel(self.ambient.format_word(x)));
        }
        let mut h = BigInt::zero();
        let mut out = Word::new();
        for s in x.syllables() {
            if s.vertex() == self.axis {
                h += s.exponent();
                continue;
            }
            let d = if self.shared.contains(s.vertex()) {
                DeltaVertex::Shared(s.vertex())
            } else {
                DeltaVertex::Offset(self.offset_class(&h), s.vertex())
            };
            let id = self.realize(d)?;
            out.push(id, s.exponent().clone());
        }
        self.delta.reduce(&out)
    }

    /// Substitutes each kernel vertex by the ambient element it stands for.
    /// Inverse to [`project`] on both sides.
    ///
    /// [`project`]: KernelPresentation::project
    pub fn lift(&self, x: &NormalForm) -> Result<NormalForm, GroupError> {
        self.delta.validate(x)?;
        let mut out = Word::new();
        for s in x.syllables() {
            match &self.descriptors[s.vertex().index()] {
                DeltaVertex::Shared(u) => out.push(*u, s.exponent().clone()),
                DeltaVertex::Offset(g, u) => {
                    out.push(self.axis, g.clone());
                    out.push(*u, s.exponent().clone());
                    out.push(self.axis, -g.clone());
                }
            }
        }
        self.ambient.reduce(&out)
    }
}

/// One step of the compression loop, recorded for display.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompressStep {
    /// Conjugated the family into the full subgroup on `kept` and restricted
    /// the presentation to it.
    Project { conjugator: String, kept: Vec<String> },
    /// Rewrote the family over the kernel of the retraction at `axis`.
    Rewrite { axis: String },
}

/// Inverse of one compression step, enough to carry elements back.
enum BackStep {
    /// Embed the restricted word into the earlier presentation and undo the
    /// conjugation.
    Embed {
        pres: Presentation,
        conjugator: NormalForm,
        old_ids: Vec<VertexId>,
    },
    /// Substitute kernel vertices by the conjugates they stand for.
    Lift { kp: KernelPresentation },
}

/// A family rewritten until it fills its presentation.
pub struct Compressed {
    /// Presentation the rewritten family lives in.
    pub presentation: Presentation,
    /// The rewritten family, in order.
    pub elements: Vec<NormalForm>,
    /// Steps taken, oldest first.
    pub steps: Vec<CompressStep>,
    /// Whether every intermediate closure was certified minimal.
    pub flag: ClosureFlag,
    back: Vec<BackStep>,
}

impl Compressed {
    /// Presentations the family passed through, oldest first: entry i is
    /// the presentation before step i, and the final presentation closes
    /// the list. With no steps this is just the final presentation.
    pub fn stages(&self) -> Vec<&Presentation> {
        let mut out: Vec<&Presentation> = self
            .back
            .iter()
            .map(|s| match s {
                BackStep::Embed { pres, .. } => pres,
                BackStep::Lift { kp } => kp.ambient(),
            })
            .collect();
        out.push(&self.presentation);
        out
    }

    /// Carries an element of the compressed presentation back to the
    /// original one, undoing every step. On the rewritten family this
    /// recovers the input elements exactly.
    pub fn lift_to_original(&self, y: &NormalForm) -> Result<NormalForm, GroupError> {
        self.presentation.validate(y)?;
        let mut cur = y.clone();
        for step in self.back.iter().rev() {
            cur = match step {
                BackStep::Embed {
                    pres,
                    conjugator,
                    old_ids,
                } => {
                    let mut w = Word::new();
                    for s in cur.syllables() {
                        w.push(old_ids[s.vertex().index()], s.exponent().clone());
                    }
                    let embedded = pres.reduce(&w)?;
                    let gi = pres.invert(conjugator)?;
                    pres.multiply(&pres.multiply(conjugator, &embedded)?, &gi)?
                }
                BackStep::Lift { kp } => kp.lift(&cur)?,
            };
        }
        Ok(cur)
    }
}

/// Alternately projects a family onto its essential support and passes to
/// retraction kernels until neither applies: in the result, the essential
/// support is the whole vertex set and every vertex group sees some element
/// of the family. Nontrivial elements stay nontrivial throughout, since each
/// step is injective on the subgroup the family generates.
pub fn compress(p: &Presentation, xs: &[NormalForm]) -> Result<Compressed, GroupError> {
    for x in xs {
        p.validate(x)?;
    }
    let mut pres = p.clone();
    let mut ys: Vec<NormalForm> = xs.to_vec();
    let mut steps = Vec::new();
    let mut back = Vec::new();
    let mut flag = ClosureFlag::Exact;
    // Every kernel rewrite shortens the family and projections only trim it,
    // so this bound is far beyond anything a terminating run uses.
    let step_cap = 200 + 4 * p.total_length(xs);
    loop {
        if steps.len() > step_cap {
            return Err(GroupError::Unsupported(
                "compression did not stabilize within its step bound".to_string(),
            ));
        }
        // Shrink to the essential support.
        let budget = SearchBudget::default_for(&pres, &ys);
        let (closure, cflag) = pres.parabolic_closure_with(&ys, budget)?;
        if cflag == ClosureFlag::BudgetLimited {
            flag = ClosureFlag::BudgetLimited;
        }
        if closure.base() != pres.graph().vertices() {
            let g = closure.conjugator();
            let gi = pres.invert(g)?;
            let conjugated: Vec<NormalForm> = ys
                .iter()
                .map(|y| pres.multiply(&pres.multiply(&gi, y).unwrap(), g).unwrap())
                .collect();
            let (sub, old_ids) = pres.restrict(closure.base());
            let new_of: HashMap<VertexId, VertexId> = old_ids
                .iter()
                .enumerate()
                .map(|(new, old)| (*old, VertexId(new)))
                .collect();
            ys = conjugated
                .iter()
                .map(|y| {
                    let mut w = Word::new();
                    for s in y.syllables() {
                        w.push(new_of[&s.vertex()], s.exponent().clone());
                    }
                    sub.reduce(&w).expect("restricted word stays valid")
                })
                .collect();
            steps.push(CompressStep::Project {
                conjugator: pres.format_word(g),
                kept: pres.set_to_labels(closure.base()),
            });
            back.push(BackStep::Embed {
                pres: pres.clone(),
                conjugator: g.clone(),
                old_ids,
            });
            pres = sub;
            continue;
        }
        // Look for a vertex whose retraction kills the whole family.
        let axis = pres.graph().vertices().iter().find(|&v| {
            ys.iter().all(|y| !pres.vertex_projection_nontrivial(y, v))
        });
        let Some(axis) = axis else { break };
        let mut kp = KernelPresentation::new(&pres, axis)?;
        let mut rewritten = Vec::with_capacity(ys.len());
        for y in &ys {
            rewritten.push(kp.project(y)?);
        }
        steps.push(CompressStep::Rewrite {
            axis: pres.label(axis).to_string(),
        });
        pres = kp.delta().clone();
        back.push(BackStep::Lift { kp });
        ys = rewritten;
    }
    Ok(Compressed {
        presentation: pres,
        elements: ys,
        steps,
        flag,
        back,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_ball;

    /// Path a - c - b with a of order three; the axis of interest is a.
    fn mixed_path() -> Presentation {
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

    fn free_pair() -> Presentation {
        Presentation::from_desc(
            &[("a", CyclicGroup::Infinite), ("b", CyclicGroup::Infinite)],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn finite_axis_realizes_the_whole_kernel() {
        let p = mixed_path();
        let a = p.vertex_by_label("a").unwrap();
        let kp = KernelPresentation::new(&p, a).unwrap();
        assert!(kp.fully_realized());
        assert_eq!(kp.delta().vertex_count(), 4);
        assert_eq!(kp.delta().graph().edge_count(), 3);
        assert_eq!(kp.expected_vertex_count(), Some(BigInt::from(4)));
        assert_eq!(kp.expected_edge_count(), Some(BigInt::from(3)));
        let labels: Vec<&str> = (0..4)
            .map(|i| kp.delta().label(VertexId(i)))
            .collect();
        assert_eq!(labels, vec!["c", "b@0", "b@1", "b@2"]);
        // The shared c commutes with every copy of b; distinct copies of b
        // do not commute with each other.
        let g = kp.delta().graph();
        assert!(g.adjacent(VertexId(0), VertexId(1)));
        assert!(g.adjacent(VertexId(0), VertexId(2)));
        assert!(g.adjacent(VertexId(0), VertexId(3)));
        assert!(!g.adjacent(VertexId(1), VertexId(2)));
    }

    #[test]
    fn projection_tracks_the_axis_exponent() {
        let p = mixed_path();
        let a = p.vertex_by_label("a").unwrap();
        let mut kp = KernelPresentation::new(&p, a).unwrap();
        let x = p.element(&[("a", 1), ("b", 1), ("a", -1)]).unwrap();
        let d = kp.project(&x).unwrap();
        assert_eq!(kp.delta().format_word(&d), "b@1^1");
        let x = p.element(&[("b", 1)]).unwrap();
        let d = kp.project(&x).unwrap();
        assert_eq!(kp.delta().format_word(&d), "b@0^1");
        let x = p.element(&[("c", 2)]).unwrap();
        let d = kp.project(&x).unwrap();
        assert_eq!(kp.delta().format_word(&d), "c^2");
        // a b a b a b: exponents wrap around the order of a.
        let x = p
            .element(&[("a", 1), ("b", 1), ("a", 1), ("b", 1), ("a", 1), ("b", 1)])
            .unwrap();
        let d = kp.project(&x).unwrap();
        assert_eq!(kp.delta().format_word(&d), "b@1^1*b@2^1*b@0^1");
        assert_eq!(d.len(), x.len() - 3);
    }

    #[test]
    fn projection_rejects_elements_outside_the_kernel() {
        let p = mixed_path();
        let a = p.vertex_by_label("a").unwrap();
        let mut kp = KernelPresentation::new(&p, a).unwrap();
        let x = p.element(&[("a", 1), ("b", 2)]).unwrap();
        assert!(matches!(
            kp.project(&x),
            Err(GroupError::OutsideKernel(_))
        ));
    }

    #[test]
    fn lift_inverts_projection_on_kernel_elements() {
        let p = mixed_path();
        let a = p.vertex_by_label("a").unwrap();
        let mut kp = KernelPresentation::new(&p, a).unwrap();
        let ball = enumerate_ball(&p, 3, 1).unwrap();
        let mut seen = 0;
        for x in ball.iter() {
            if p.vertex_projection_nontrivial(x, a) {
                continue;
            }
            let d = kp.project(x).unwrap();
            assert!(d.len() <= x.len());
            if x.support().contains(a) {
                assert!(d.len() + 2 <= x.len());
            }
            assert_eq!(&kp.lift(&d).unwrap(), x);
            seen += 1;
        }
        assert!(seen > 10);
    }

    #[test]
    fn projection_inverts_lift_on_delta_words() {
        let p = mixed_path();
        let a = p.vertex_by_label("a").unwrap();
        let mut kp = KernelPresentation::new(&p, a).unwrap();
        let delta = kp.delta().clone();
        let ball = enumerate_ball(&delta, 2, 1).unwrap();
        for d in ball.iter() {
            let up = kp.lift(d).unwrap();
            assert_eq!(&kp.project(&up).unwrap(), d);
        }
    }

    #[test]
    fn infinite_axis_realizes_lazily() {
        let p = free_pair();
        let a = p.vertex_by_label("a").unwrap();
        let mut kp = KernelPresentation::new(&p, a).unwrap();
        assert!(!kp.fully_realized());
        assert_eq!(kp.expected_vertex_count(), None);
        assert_eq!(kp.delta().vertex_count(), 0);
        let x = p
            .element(&[("a", 1), ("b", 1), ("a", -1), ("b", -1)])
            .unwrap();
        let d = kp.project(&x).unwrap();
        assert_eq!(kp.delta().vertex_count(), 2);
        assert_eq!(kp.delta().format_word(&d), "b@1^1*b@0^-1");
        assert_eq!(kp.lift(&d).unwrap(), x);
        // Copies at distinct exponents are free from each other.
        assert_eq!(kp.delta().graph().edge_count(), 0);
    }

    #[test]
    fn link_only_kernel_stays_finite_for_infinite_axis() {
        let p = Presentation::from_desc(
            &[
                ("a", CyclicGroup::Infinite),
                ("b", CyclicGroup::Infinite),
                ("c", CyclicGroup::Infinite),
            ],
            &[("a", "b"), ("b", "c")],
        )
        .unwrap();
        let b = p.vertex_by_label("b").unwrap();
        let kp = KernelPresentation::new(&p, b).unwrap();
        // link(b) = {a, c} and nothing splits: the kernel is the free group
        // on the two shared vertices.
        assert!(kp.fully_realized());
        assert_eq!(kp.expected_vertex_count(), Some(BigInt::from(2)));
        assert_eq!(kp.expected_edge_count(), Some(BigInt::from(0)));
    }

    #[test]
    fn compress_commutator_to_two_free_letters() {
        let p = free_pair();
        let x = p
            .element(&[("a", -1), ("b", -1), ("a", 1), ("b", 1)])
            .unwrap();
        let out = compress(&p, &[x]).unwrap();
        assert_eq!(out.flag, ClosureFlag::Exact);
        assert_eq!(out.presentation.vertex_count(), 2);
        assert_eq!(out.presentation.graph().edge_count(), 0);
        assert_eq!(out.elements.len(), 1);
        assert_eq!(out.elements[0].len(), 2);
        assert_eq!(out.steps.len(), 1);
        assert!(matches!(out.steps[0], CompressStep::Rewrite { .. }));
        // Fully compressed: every vertex projection is nontrivial.
        for v in out.presentation.graph().vertices().iter() {
            assert!(out
                .elements
                .iter()
                .any(|y| out.presentation.vertex_projection_nontrivial(y, v)));
        }
    }

    #[test]
    fn compress_strips_conjugation_and_restricts() {
        let p = Presentation::from_desc(
            &[
                ("a", CyclicGroup::Infinite),
                ("b", CyclicGroup::Infinite),
                ("c", CyclicGroup::Infinite),
            ],
            &[("a", "b"), ("b", "c")],
        )
        .unwrap();
        let x = p.element(&[("c", 1), ("a", 2), ("c", -1)]).unwrap();
        let out = compress(&p, &[x]).unwrap();
        assert_eq!(out.presentation.vertex_count(), 1);
        assert_eq!(out.presentation.label(VertexId(0)), "a");
        assert_eq!(out.presentation.format_word(&out.elements[0]), "a^2");
        assert_eq!(
            out.steps,
            vec![CompressStep::Project {
                conjugator: "c^1".to_string(),
                kept: vec!["a".to_string()],
            }]
        );
    }

    #[test]
    fn compress_of_identities_empties_the_presentation() {
        let p = mixed_path();
        let out = compress(&p, &[p.identity(), p.identity()]).unwrap();
        assert_eq!(out.presentation.vertex_count(), 0);
        assert!(out.elements.iter().all(|y| y.is_identity()));
    }

    #[test]
    fn compress_result_fills_its_presentation() {
        let p = mixed_path();
        let xs = vec![
            p.element(&[("b", 1), ("a", 1), ("b", -1), ("a", -1)]).unwrap(),
            p.element(&[("c", 3)]).unwrap(),
        ];
        let out = compress(&p, &xs).unwrap();
        assert_eq!(out.flag, ClosureFlag::Exact);
        // Essential support of the result is everything.
        let (esupp, _) = out.presentation.essential_support(&out.elements).unwrap();
        assert_eq!(esupp, out.presentation.graph().vertices());
        // Nontrivial elements stayed nontrivial.
        assert!(out.elements.iter().all(|y| !y.is_identity()));
        // Undoing the steps recovers the inputs exactly.
        for (x, y) in xs.iter().zip(&out.elements) {
            assert_eq!(&out.lift_to_original(y).unwrap(), x);
        }
    }

    #[test]
    fn lift_to_original_round_trips_through_both_step_kinds() {
        let p = mixed_path();
        // Conjugated commutator: compression needs a projection step and a
        // kernel rewrite.
        let xs = vec![p
            .element(&[("c", 1), ("b", 1), ("a", 1), ("b", -1), ("a", -1), ("c", -1)])
            .unwrap()];
        let out = compress(&p, &xs).unwrap();
        assert!(out.steps.len() >= 1);
        for (x, y) in xs.iter().zip(&out.elements) {
            assert_eq!(&out.lift_to_original(y).unwrap(), x);
        }
    }
}
