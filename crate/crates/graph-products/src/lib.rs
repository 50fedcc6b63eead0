//! Exact computation in graph products of cyclic groups.
//!
//! A *graph product* is built from a finite simplicial graph with a cyclic
//! group attached to each vertex (infinite, or finite of order at least two):
//! the free product of the vertex groups, with adjacent vertex groups made to
//! commute. Right-angled Artin groups (all vertices infinite) and right-angled
//! Coxeter groups (all vertices of order two) are the extreme cases.
//!
//! What the crate offers:
//!
//! * [`words`] — canonical normal forms and the word problem: reduction,
//!   multiplication, inversion, supports, cyclic reduction, element orders.
//! * [`parabolic`] — conjugates of full subgroups: canonical description,
//!   membership, intersections, normalizers, and the parabolic closure of a
//!   finite set (the smallest parabolic subgroup containing it).
//! * [`kernel`] — the kernel of the retraction onto a vertex group is itself
//!   a graph product; this module realizes that presentation and rewrites
//!   kernel elements into it, which strictly shortens any word that actually
//!   uses the vertex. Iterating projection and rewriting compresses a finite
//!   family into a presentation where it is essentially supported everywhere.
//! * [`bassserre`] — the splitting of the group over the star of a vertex as
//!   an amalgam, alternating normal forms in the amalgam, and the
//!   elliptic/hyperbolic classification with translation lengths for the
//!   action on the associated tree.
//! * [`classify`] — a classifier for finitely generated subgroups given by
//!   generators: trivial, finite or infinite cyclic, free abelian, infinite
//!   dihedral, contains a nonabelian free subgroup, or honestly unknown.
//! * [`oracle`] — brute-force reference implementations (word rewriting
//!   closure, ball enumeration, coset trees) plus seeded randomized check
//!   suites that compare the fast implementations against them.
//! * [`frontend`] — a small text format for presentations, a word expression
//!   parser, and the `gpcalc` command line tool.
//!
//! The companion book under `book/` walks through each of these with runnable
//! examples; its chapters are doc-tested alongside this crate.

pub mod bassserre;
pub mod classify;
pub mod frontend;
pub mod graph;
pub mod kernel;
pub mod oracle;
pub mod parabolic;
pub mod words;

pub use graph::{GraphError, SimplicialGraph, VertexId, VertexSet};
pub use words::{CyclicGroup, GroupError, NormalForm, Presentation, Syllable, Word};
