//! Brute-force reference implementations and seeded check suites.
//!
//! The implementations in the other modules are meant to be fast and clever;
//! everything in this module is meant to be obviously correct and slow. The
//! rewriting closure explores single rewrite moves exhaustively instead of
//! reducing greedily, the ball enumerator materializes every short element,
//! and the coset tree in the splitting checks walks the tree vertex by
//! vertex. Check suites (registered at the bottom of this file) generate
//! random instances from a seed and compare the two routes; any disagreement
//! is reported with a shrunken counterexample.
//!
//! Oracle internals deliberately avoid the incremental reduction code in
//! [`crate::words`]: exponent arithmetic is redone locally on machine
//! integers, which is safe because oracle inputs are short words with small
//! exponents.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bassserre::TreeAction;
use crate::classify::{classify, Verdict};
use crate::graph::{SimplicialGraph, VertexId, VertexSet};
use crate::kernel::{compress, DeltaVertex, KernelPresentation};
use crate::parabolic::{ClosureFlag, ConjugationOutcome, SearchBudget};
use crate::words::{CyclicGroup, GroupError, NormalForm, Presentation, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("ball enumeration aborted: more than {cap} elements")]
    BallTooLarge { cap: usize },
    #[error("oracle words must have machine-size exponents")]
    ExponentOverflow,
    #[error("unknown check suite `{0}`")]
    UnknownSuite(String),
}

/// A raw oracle word: vertex index and exponent, no invariants enforced.
pub type RawWord = Vec<(usize, i64)>;

fn raw_from_word(w: &Word) -> Result<RawWord, OracleError> {
    w.syllables()
        .iter()
        .map(|(v, e)| e.to_i64().map(|e| (v.0, e)).ok_or(OracleError::ExponentOverflow))
        .collect()
}

fn raw_from_nf(nf: &NormalForm) -> Result<RawWord, OracleError> {
    nf.syllables()
        .iter()
        .map(|s| {
            s.exponent()
                .to_i64()
                .map(|e| (s.vertex().0, e))
                .ok_or(OracleError::ExponentOverflow)
        })
        .collect()
}

/// Canonical exponent representative: 0..n for finite vertices, exact for
/// infinite ones. Zero marks a trivial syllable.
fn norm_exp(p: &Presentation, v: usize, e: i64) -> i64 {
    match p.group(VertexId(v)) {
        CyclicGroup::Infinite => e,
        CyclicGroup::Finite(n) => e.rem_euclid(n as i64),
    }
}

fn normalize_raw(p: &Presentation, w: &[(usize, i64)]) -> RawWord {
    w.iter().map(|&(v, e)| (v, norm_exp(p, v, e))).collect()
}

/// Exhaustive closure of a word under single rewrite moves: dropping a
/// trivial syllable, merging two consecutive syllables at the same vertex,
/// and swapping consecutive syllables at adjacent vertices. Returns the
/// minimal length over the closure and the lexicographically least word of
/// that length. By the normal form theorem the minimal-length words are
/// exactly the reduced words of the element, and they form one swap class,
/// so the lexicographic least of them is the same canonical representative
/// that [`Presentation::reduce`] constructs greedily.
pub fn rewrite_closure_canonical(p: &Presentation, word: &Word) -> Result<(RawWord, usize), OracleError> {
    let start = normalize_raw(p, &raw_from_word(word)?);
    let graph = p.graph();
    let mut seen: HashSet<RawWord> = HashSet::new();
    let mut queue: VecDeque<RawWord> = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    let mut best_len = usize::MAX;
    let mut best: Option<RawWord> = None;

    let consider = |w: &RawWord, best_len: &mut usize, best: &mut Option<RawWord>| {
        // Only fully nontrivial words count as candidate reduced words.
        if w.iter().any(|&(_, e)| e == 0) {
            return;
        }
        if w.len() < *best_len || (w.len() == *best_len && best.as_ref().map_or(true, |b| w < b)) {
            *best_len = w.len();
            *best = Some(w.clone());
        }
    };

    while let Some(w) = queue.pop_front() {
        consider(&w, &mut best_len, &mut best);
        let push = |next: RawWord, seen: &mut HashSet<RawWord>, queue: &mut VecDeque<RawWord>| {
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        };
        for i in 0..w.len() {
            // T1: drop a trivial syllable.
            if w[i].1 == 0 {
                let mut next = w.clone();
                next.remove(i);
                push(next, &mut seen, &mut queue);
            }
            if i + 1 < w.len() {
                let (u, e1) = w[i];
                let (v, e2) = w[i + 1];
                if u == v {
                    // T2: merge consecutive syllables at one vertex.
                    let mut next = w.clone();
                    next[i] = (u, norm_exp(p, u, e1.checked_add(e2).expect("small exponents")));
                    next.remove(i + 1);
                    push(next, &mut seen, &mut queue);
                } else if graph.adjacent(VertexId(u), VertexId(v)) {
                    // T3: swap adjacent commuting syllables.
                    let mut next = w.clone();
                    next.swap(i, i + 1);
                    push(next, &mut seen, &mut queue);
                }
            }
        }
    }
    let best = best.unwrap_or_default();
    let len = best.len();
    Ok((best, len))
}

/// Convenience: the oracle's canonical word for comparison against a normal
/// form produced by the fast path.
pub fn oracle_agrees_with(p: &Presentation, word: &Word, nf: &NormalForm) -> Result<bool, OracleError> {
    let (canon, len) = rewrite_closure_canonical(p, word)?;
    let fast = raw_from_nf(nf)?;
    Ok(fast == canon && nf.len() == len)
}

/// The syllable alphabet used for balls and searches: for each vertex, all
/// nontrivial canonical exponents, capped at |e| <= e_max on infinite
/// vertices.
pub fn syllable_alphabet(p: &Presentation, e_max: u64) -> Vec<(VertexId, BigInt)> {
    let mut out = Vec::new();
    for v in 0..p.vertex_count() {
        match p.group(VertexId(v)) {
            CyclicGroup::Finite(n) => {
                for e in 1..n {
                    out.push((VertexId(v), BigInt::from(e)));
                }
            }
            CyclicGroup::Infinite => {
                for e in -(e_max as i64)..=(e_max as i64) {
                    if e != 0 {
                        out.push((VertexId(v), BigInt::from(e)));
                    }
                }
            }
        }
    }
    out
}

pub const DEFAULT_E_MAX: u64 = 2;
pub const BALL_ELEMENT_CAP: usize = 1_000_000;

/// All elements of syllable length <= radius whose normal forms use only
/// exponents |e| <= e_max on infinite vertices. Closed under inversion, and
/// every prefix of a member is a member.
pub struct Ball {
    pub radius: usize,
    pub e_max: u64,
    pub elements: Vec<NormalForm>,
    index: HashMap<NormalForm, usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &NormalForm) -> bool {
        self.index.contains_key(x)
    }

    pub fn index_of(&self, x: &NormalForm) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &NormalForm> {
        self.elements.iter()
    }
}

/// Breadth-first enumeration by right multiplication with the syllable
/// alphabet. Every length-k element is a length-(k-1) element times one
/// syllable, and prefixes of bounded-exponent normal forms keep the bound,
/// so the enumeration is complete for the stated element set.
pub fn enumerate_ball(p: &Presentation, radius: usize, e_max: u64) -> Result<Ball, OracleError> {
    enumerate_ball_capped(p, radius, e_max, BALL_ELEMENT_CAP)
}

pub fn enumerate_ball_capped(
    p: &Presentation,
    radius: usize,
    e_max: u64,
    cap: usize,
) -> Result<Ball, OracleError> {
    let alphabet = syllable_alphabet(p, e_max);
    let mut elements = vec![NormalForm::identity()];
    let mut index = HashMap::new();
    index.insert(NormalForm::identity(), 0);
    let mut layer = vec![NormalForm::identity()];
    for target_len in 1..=radius {
        let mut next_layer = Vec::new();
        for x in &layer {
            for (v, e) in &alphabet {
                let mut w = Word::from(x);
                w.push(*v, e.clone());
                let y = p.reduce(&w).expect("alphabet syllables are in range");
                if y.len() != target_len {
                    continue;
                }
                let bound = BigInt::from(e_max);
                if y.syllables().iter().any(|s| {
                    matches!(p.group(s.vertex()), CyclicGroup::Infinite) && s.exponent().abs() > bound
                }) {
                    continue;
                }
                if !index.contains_key(&y) {
                    index.insert(y.clone(), elements.len());
                    elements.push(y.clone());
                    next_layer.push(y);
                    if elements.len() > cap {
                        return Err(OracleError::BallTooLarge { cap });
                    }
                }
            }
        }
        layer = next_layer;
        if layer.is_empty() {
            break;
        }
    }
    Ok(Ball {
        radius,
        e_max,
        elements,
        index,
    })
}

/// Seeded generator of random presentations and words. Deterministic for a
/// fixed seed: same stream of instances on every platform.
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
    pub max_vertices: usize,
    pub max_word_len: usize,
    pub e_max: u64,
    /// None = infinite; used with uniform choice.
    pub orders: Vec<Option<u64>>,
    pub edge_probability: f64,
}

impl InstanceGenerator {
    pub fn new(seed: u64) -> Self {
        InstanceGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_vertices: 5,
            max_word_len: 8,
            e_max: 2,
            orders: vec![Some(2), Some(3), None],
            edge_probability: 0.5,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Random presentation on 1..=max_vertices vertices with labels v0, v1, ..
    pub fn presentation(&mut self) -> Presentation {
        let n = self.rng.gen_range(1..=self.max_vertices);
        self.presentation_with(n, None)
    }

    /// Random presentation with a fixed vertex count; `force_order` pins all
    /// vertex groups (used for all-Z or all-Z/2 families).
    pub fn presentation_with(&mut self, n: usize, force_order: Option<Option<u64>>) -> Presentation {
        let mut graph = SimplicialGraph::new(n).expect("small graph");
        for u in 0..n {
            for v in (u + 1)..n {
                if self.rng.gen_bool(self.edge_probability) {
                    graph.add_edge(VertexId(u), VertexId(v)).expect("valid edge");
                }
            }
        }
        let vertices = (0..n)
            .map(|i| {
                let order = force_order.unwrap_or_else(|| {
                    *self.orders.choose(&mut self.rng).expect("nonempty orders")
                });
                let group = match order {
                    None => CyclicGroup::Infinite,
                    Some(k) => CyclicGroup::Finite(k),
                };
                (format!("v{i}"), group)
            })
            .collect();
        Presentation::new(graph, vertices).expect("labels are distinct")
    }

    /// Random unreduced word of exactly the given syllable count, exponents
    /// nonzero and bounded.
    pub fn word(&mut self, p: &Presentation, len: usize) -> Word {
        let mut w = Word::new();
        for _ in 0..len {
            let v = VertexId(self.rng.gen_range(0..p.vertex_count()));
            let e = match p.group(v) {
                CyclicGroup::Finite(n) => self.rng.gen_range(1..n) as i64,
                CyclicGroup::Infinite => {
                    let mag = self.rng.gen_range(1..=self.e_max) as i64;
                    if self.rng.gen_bool(0.5) {
                        mag
                    } else {
                        -mag
                    }
                }
            };
            w.push(v, BigInt::from(e));
        }
        w
    }

    /// Random reduced element, at most max_len syllables.
    pub fn normal_form(&mut self, p: &Presentation, max_len: usize) -> NormalForm {
        let len = self.rng.gen_range(0..=max_len);
        let w = self.word(p, len);
        p.reduce(&w).expect("generated in range")
    }
}

/// An explicitly built piece of a splitting tree: vertices are the cosets
/// of the two sides met by a ball, edges come from shared ball elements.
/// The group acts by left multiplication; [`min_displacement`] measures how
/// far an element moves the realized vertices. Zero means elliptic; a
/// hyperbolic element realizes its translation length at vertices near its
/// axis, so a ball slightly larger than the element suffices in practice.
///
/// [`min_displacement`]: CosetTree::min_displacement
pub struct CosetTree {
    pres: Presentation,
    sides: [crate::graph::VertexSet; 2],
    ids: HashMap<(usize, NormalForm), usize>,
    nodes: Vec<(usize, NormalForm)>,
    depth: Vec<usize>,
    parent: Vec<usize>,
}

impl CosetTree {
    pub fn build(p: &Presentation, split: &crate::bassserre::Splitting, ball: &Ball) -> CosetTree {
        let sides = [split.a_side(), split.b_side()];
        let mut ids: HashMap<(usize, NormalForm), usize> = HashMap::new();
        let mut nodes: Vec<(usize, NormalForm)> = Vec::new();
        let mut adj: Vec<Vec<usize>> = Vec::new();
        let mut intern = |key: (usize, NormalForm), adj: &mut Vec<Vec<usize>>| -> usize {
            if let Some(&i) = ids.get(&key) {
                return i;
            }
            ids.insert(key.clone(), nodes.len());
            nodes.push(key);
            adj.push(Vec::new());
            nodes.len() - 1
        };
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for g in ball.iter() {
            let na = intern((0, p.coset_rep(g, sides[0])), &mut adj);
            let nb = intern((1, p.coset_rep(g, sides[1])), &mut adj);
            if edges.insert((na, nb)) {
                adj[na].push(nb);
                adj[nb].push(na);
            }
        }
        // Root the tree to answer distance queries through depths and a
        // parent walk; the realized piece is connected because coset
        // prefixes of a ball element are again ball elements.
        let mut depth = vec![usize::MAX; nodes.len()];
        let mut parent = vec![usize::MAX; nodes.len()];
        if !nodes.is_empty() {
            let mut queue = VecDeque::new();
            depth[0] = 0;
            parent[0] = 0;
            queue.push_back(0);
            while let Some(i) = queue.pop_front() {
                for &j in &adj[i] {
                    if depth[j] == usize::MAX {
                        depth[j] = depth[i] + 1;
                        parent[j] = i;
                        queue.push_back(j);
                    }
                }
            }
        }
        CosetTree {
            pres: p.clone(),
            sides,
            ids,
            nodes,
            depth,
            parent,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn distance(&self, mut i: usize, mut j: usize) -> Option<usize> {
        if self.depth[i] == usize::MAX || self.depth[j] == usize::MAX {
            return None;
        }
        let mut d = 0;
        while self.depth[i] > self.depth[j] {
            i = self.parent[i];
            d += 1;
        }
        while self.depth[j] > self.depth[i] {
            j = self.parent[j];
            d += 1;
        }
        while i != j {
            i = self.parent[i];
            j = self.parent[j];
            d += 2;
        }
        Some(d)
    }

    /// Smallest tree distance from a realized vertex to its image under x,
    /// or None when no image lands inside the realized piece.
    pub fn min_displacement(&self, x: &NormalForm) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, (side, rep)) in self.nodes.iter().enumerate() {
            let moved = self.pres.coset_rep(
                &self.pres.multiply(x, rep).expect("tree nodes are valid"),
                self.sides[*side],
            );
            let Some(&j) = self.ids.get(&(*side, moved)) else {
                continue;
            };
            if let Some(d) = self.distance(i, j) {
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best
    }
}

// ---------------------------------------------------------------------------
// Check suites
// ---------------------------------------------------------------------------

/// At most this many counterexamples are recorded per suite; further
/// failures are counted but not described.
pub const FAILURE_RECORD_CAP: usize = 5;

/// Result of one named check suite run. The rendering contains no timing
/// information, so two runs with the same seed and case count produce
/// byte-identical output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub seed: u64,
    /// Instances generated.
    pub cases: usize,
    /// Individual assertions evaluated.
    pub checks: usize,
    /// Instances (or sub-checks) set aside because a budget refused them
    /// or no verdict was available; skips are not failures.
    pub skipped: usize,
    pub failure_count: usize,
    /// Descriptions of the first few failures, shrunken where supported.
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn render(&self) -> String {
        let mut line = format!(
            "{}: {} (cases={} checks={}",
            self.name,
            if self.passed() { "ok" } else { "FAILED" },
            self.cases,
            self.checks
        );
        if self.skipped > 0 {
            line.push_str(&format!(" skipped={}", self.skipped));
        }
        if !self.passed() {
            line.push_str(&format!(" failures={}", self.failure_count));
        }
        line.push(')');
        for f in &self.failures {
            line.push_str("\n  counterexample: ");
            line.push_str(f);
        }
        line
    }
}

/// All suites run against one seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub seed: u64,
    pub outcomes: Vec<SuiteOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(SuiteOutcome::passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!("check suites, seed {}\n", self.seed);
        for o in &self.outcomes {
            for (i, line) in o.render().lines().enumerate() {
                out.push_str(if i == 0 { "  " } else { "  " });
                out.push_str(line);
                out.push('\n');
            }
        }
        let failures: usize = self.outcomes.iter().map(|o| o.failure_count).sum();
        out.push_str(&format!(
            "overall: {} ({} suites, {} failures)",
            if self.passed() { "ok" } else { "FAILED" },
            self.outcomes.len(),
            failures
        ));
        out
    }
}

struct SuiteCtx {
    gen: InstanceGenerator,
    seed: u64,
    cases: usize,
    checks: usize,
    skipped: usize,
    failure_count: usize,
    failures: Vec<String>,
}

impl SuiteCtx {
    fn new(seed: u64) -> SuiteCtx {
        SuiteCtx {
            gen: InstanceGenerator::new(seed),
            seed,
            cases: 0,
            checks: 0,
            skipped: 0,
            failure_count: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) -> bool {
        self.checks += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < FAILURE_RECORD_CAP {
                self.failures.push(detail());
            }
        }
        ok
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }

    fn finish(self, name: &'static str) -> SuiteOutcome {
        SuiteOutcome {
            name,
            seed: self.seed,
            cases: self.cases,
            checks: self.checks,
            skipped: self.skipped,
            failure_count: self.failure_count,
            failures: self.failures,
        }
    }
}

type SuiteFn = fn(&mut SuiteCtx, usize);

/// Registered suites with their default case counts. The defaults aim for
/// a few seconds total; callers scale them up for longer soak runs.
const SUITES: &[(&str, usize, SuiteFn)] = &[
    ("normal-forms", 200, suite_normal_forms),
    ("group-ops", 120, suite_group_ops),
    ("parabolic-membership", 80, suite_parabolic_membership),
    ("parabolic-intersection", 25, suite_parabolic_intersection),
    ("normalizers", 25, suite_normalizers),
    ("conjugation-search", 40, suite_conjugation_search),
    ("parabolic-closure", 30, suite_parabolic_closure),
    ("kernel-roundtrip", 60, suite_kernel_roundtrip),
    ("compression", 40, suite_compression),
    ("splittings", 20, suite_splittings),
    ("free-pairs", 100, suite_free_pairs),
    ("raag-dichotomy", 100, suite_raag_dichotomy),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _, _)| *n).collect()
}

/// Runs one suite at its default size.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteOutcome, OracleError> {
    let &(n, cases, f) = SUITES
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| OracleError::UnknownSuite(name.to_string()))?;
    let mut ctx = SuiteCtx::new(seed);
    f(&mut ctx, cases);
    Ok(ctx.finish(n))
}

/// Runs one suite with an explicit case count.
pub fn run_suite_scaled(name: &str, seed: u64, cases: usize) -> Result<SuiteOutcome, OracleError> {
    let &(n, _, f) = SUITES
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| OracleError::UnknownSuite(name.to_string()))?;
    let mut ctx = SuiteCtx::new(seed);
    f(&mut ctx, cases);
    Ok(ctx.finish(n))
}

/// Runs every suite at its default size. Each suite gets its own generator
/// seeded from the given seed, so suites are independent of each other.
pub fn run_all(seed: u64) -> SuiteReport {
    let outcomes = SUITES
        .iter()
        .map(|&(n, cases, f)| {
            let mut ctx = SuiteCtx::new(seed);
            f(&mut ctx, cases);
            ctx.finish(n)
        })
        .collect();
    SuiteReport { seed, outcomes }
}

fn describe_presentation(p: &Presentation) -> String {
    let vertices: Vec<String> = (0..p.vertex_count())
        .map(|i| {
            let v = VertexId(i);
            match p.group(v) {
                CyclicGroup::Infinite => format!("{}:Z", p.label(v)),
                CyclicGroup::Finite(n) => format!("{}:Z/{}", p.label(v), n),
            }
        })
        .collect();
    let mut edges = Vec::new();
    for u in 0..p.vertex_count() {
        for v in (u + 1)..p.vertex_count() {
            if p.graph().adjacent(VertexId(u), VertexId(v)) {
                edges.push(format!("{}-{}", p.label(VertexId(u)), p.label(VertexId(v))));
            }
        }
    }
    if edges.is_empty() {
        vertices.join(" ")
    } else {
        format!("{} | {}", vertices.join(" "), edges.join(" "))
    }
}

fn describe_raw_word(p: &Presentation, w: &Word) -> String {
    if w.syllables().is_empty() {
        return "1".to_string();
    }
    w.syllables()
        .iter()
        .map(|(v, e)| format!("{}^{}", p.label(*v), e))
        .collect::<Vec<_>>()
        .join("*")
}

fn inverse_word(w: &Word) -> Word {
    let mut out = Word::new();
    for (v, e) in w.syllables().iter().rev() {
        out.push(*v, -e.clone());
    }
    out
}

fn concat_words(parts: &[&Word]) -> Word {
    let mut out = Word::new();
    for part in parts {
        for (v, e) in part.syllables() {
            out.push(*v, e.clone());
        }
    }
    out
}

/// Greedily deletes syllables while the word keeps failing, so reported
/// counterexamples are locally minimal.
fn shrink_failing_word(
    p: &Presentation,
    w: &Word,
    fails: &dyn Fn(&Presentation, &Word) -> bool,
) -> Word {
    let mut cur = w.clone();
    loop {
        let mut improved = false;
        for i in 0..cur.syllables().len() {
            let mut cand = Word::new();
            for (j, (v, e)) in cur.syllables().iter().enumerate() {
                if j != i {
                    cand.push(*v, e.clone());
                }
            }
            if fails(p, &cand) {
                cur = cand;
                improved = true;
                break;
            }
        }
        if !improved {
            return cur;
        }
    }
}

fn random_subset(ctx: &mut SuiteCtx, p: &Presentation) -> VertexSet {
    let n = p.vertex_count();
    VertexSet::from_bits(ctx.gen.rng().gen_range(0..(1u64 << n)))
}

/// Random unreduced word supported in the given vertex set.
fn supported_word(ctx: &mut SuiteCtx, p: &Presentation, s: VertexSet, max_len: usize) -> Word {
    let vs: Vec<VertexId> = s.iter().collect();
    let mut w = Word::new();
    if vs.is_empty() {
        return w;
    }
    let len = ctx.gen.rng().gen_range(0..=max_len);
    for _ in 0..len {
        let v = *vs.choose(ctx.gen.rng()).expect("nonempty support");
        let e = match p.group(v) {
            CyclicGroup::Finite(n) => ctx.gen.rng().gen_range(1..n) as i64,
            CyclicGroup::Infinite => {
                let mag = ctx.gen.rng().gen_range(1..=2i64);
                if ctx.gen.rng().gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            }
        };
        w.push(v, BigInt::from(e));
    }
    w
}

/// Canonical forms against the exhaustive rewriting closure.
fn suite_normal_forms(ctx: &mut SuiteCtx, cases: usize) {
    ctx.gen.max_vertices = 4;
    for _ in 0..cases {
        ctx.cases += 1;
        let p = ctx.gen.presentation();
        let len = ctx.gen.rng().gen_range(0..=6);
        let w = ctx.gen.word(&p, len);
        let nf = p.reduce(&w).expect("generated words are valid");
        let ok = oracle_agrees_with(&p, &w, &nf).expect("small exponents");
        ctx.check(ok, || {
            let fails = |p: &Presentation, cand: &Word| {
                let nf = p.reduce(cand).expect("valid word");
                !oracle_agrees_with(p, cand, &nf).unwrap_or(true)
            };
            let small = shrink_failing_word(&p, &w, &fails);
            let nf = p.reduce(&small).expect("valid word");
            format!(
                "canonical form mismatch over [{}]: word {} reduced to {}, rewriting closure disagrees",
                describe_presentation(&p),
                describe_raw_word(&p, &small),
                p.format_word(&nf)
            )
        });
    }
}

/// Products and inverses against the closure on concatenated words.
fn suite_group_ops(ctx: &mut SuiteCtx, cases: usize) {
    ctx.gen.max_vertices = 4;
    for _ in 0..cases {
        ctx.cases += 1;
        let p = ctx.gen.presentation();
        let x = ctx.gen.normal_form(&p, 3);
        let y = ctx.gen.normal_form(&p, 3);
        let prod = p.multiply(&x, &y).expect("valid inputs");
        let wxy = concat_words(&[&Word::from(&x), &Word::from(&y)]);
        ctx.check(
            oracle_agrees_with(&p, &wxy, &prod).expect("small exponents"),
            || {
                format!(
                    "product mismatch over [{}]: ({}) * ({}) gave {}",
                    describe_presentation(&p),
                    p.format_word(&x),
                    p.format_word(&y),
                    p.format_word(&prod)
                )
            },
        );
        let inv = p.invert(&x).expect("valid input");
        let winv = inverse_word(&Word::from(&x));
        ctx.check(
            oracle_agrees_with(&p, &winv, &inv).expect("small exponents"),
            || {
                format!(
                    "inverse mismatch over [{}]: ({})^-1 gave {}",
                    describe_presentation(&p),
                    p.format_word(&x),
                    p.format_word(&inv)
                )
            },
        );
        let wcancel = concat_words(&[&Word::from(&x), &winv]);
        let (canon, len) = rewrite_closure_canonical(&p, &wcancel).expect("small exponents");
        ctx.check(canon.is_empty() && len == 0, || {
            format!(
                "x * x^-1 did not collapse over [{}]: x={}",
                describe_presentation(&p),
                p.format_word(&x)
            )
        });
    }
}

/// Parabolic membership against support of the exhaustively conjugated word.
fn suite_parabolic_membership(ctx: &mut SuiteCtx, cases: usize) {
    ctx.gen.max_vertices = 4;
    for i in 0..cases {
        ctx.cases += 1;
        let p = ctx.gen.presentation();
        let base = random_subset(ctx, &p);
        let h = ctx.gen.normal_form(&p, 2);
        let parab = p.parabolic(&h, base).expect("base is a vertex subset");
        let x = if i % 2 == 0 {
            // Planted member: h w h^-1 with w supported in the base.
            let w = supported_word(ctx, &p, base, 3);
            let wr = p.reduce(&w).expect("valid word");
            let hw = p.multiply(&h, &wr).expect("valid inputs");
            p.multiply(&hw, &p.invert(&h).expect("valid input")).expect("valid inputs")
        } else {
            ctx.gen.normal_form(&p, 3)
        };
        let fast = p.parabolic_member(&parab, &x).expect("valid input");
        let w = concat_words(&[&inverse_word(&Word::from(&h)), &Word::from(&x), &Word::from(&h)]);
        let (canon, _) = rewrite_closure_canonical(&p, &w).expect("small exponents");
        let oracle = canon.iter().all(|&(v, _)| base.contains(VertexId(v)));
        ctx.check(fast == oracle, || {
            format!(
                "membership mismatch over [{}]: x={} conjugator={} base={{{}}} fast={} oracle={}",
                describe_presentation(&p),
                p.format_word(&x),
                p.format_word(&h),
                p.set_to_labels(base).join(","),
                fast,
                oracle
            )
        });
    }
}

fn describe_parabolic(p: &Presentation, parab: &crate::parabolic::ParabolicSubgroup) -> String {
    format!(
        "({}, {{{}}})",
        p.format_word(parab.conjugator()),
        p.set_to_labels(parab.base()).join(",")
    )
}

/// Intersection of two parabolics against pointwise membership on a ball.
fn suite_parabolic_intersection(ctx: &mut SuiteCtx, cases: usize) {
    ctx.gen.max_vertices = 4;
    for _ in 0..cases {
        ctx.cases += 1;
        let p = ctx.gen.presentation();
        let b1 = random_subset(ctx, &p);
        let g1 = ctx.gen.normal_form(&p, 2);
        let p1 = p.parabolic(&g1, b1).expect("base is a vertex subset");
        let b2 = random_subset(ctx, &p);
        let g2 = ctx.gen.normal_form(&p, 2);
        let p2 = p.parabolic(&g2, b2).expect("base is a vertex subset");
        let q = p.parabolic_intersect(&p1, &p2);
        let contained = p.parabolic_contains(&p1, &q) && p.parabolic_contains(&p2, &q);
        ctx.check(contained, || {
            format!(
                "intersection not contained in both over [{}]: P1={} P2={} got {}",
                describe_presentation(&p),
                describe_parabolic(&p, &p1),
                describe_parabolic(&p, &p2),
                describe_parabolic(&p, &q)
            )
        });
        let ball = match enumerate_ball_capped(&p, 3, 1, 30_000) {
            Ok(b) => b,
            Err(_) => {
                ctx.skip();
                continue;
            }
        };
        let mut bad = None;
        for z in ball.iter() {
            let lhs = p.parabolic_member(&p1, z).expect("valid")
                && p.parabolic_member(&p2, z).expect("valid");
            let rhs = p.parabolic_member(&q, z).expect("valid");
            if lhs != rhs {
                bad = Some((z.clone(), lhs, rhs));
                break;
            }
        }
        ctx.check(bad.is_none(), || {
            let (z, lhs, rhs) = bad.as_ref().expect("failure recorded");
            format!(
                "intersection disagrees at {} over [{}]: P1={} P2={} got {} (both={} intersection={})",
                p.format_word(z),
                describe_presentation(&p),
                describe_parabolic(&p, &p1),
                describe_parabolic(&p, &p2),
                describe_parabolic(&p, &q),
                lhs,
                rhs
            )
        });
    }
}

/// Normalizer membership against conjugating the base generators directly.
fn suite_normalizers(ctx: &mut SuiteCtx, cases: usize) {
    ctx.gen.max_vertices = 4;
    for _ in 0..cases {
        ctx.cases += 1;
        let p = ctx.gen.presentation();
        let base = random_subset(ctx, &p);
        let g = ctx.gen.normal_form(&p, 2);
        let parab = p.parabolic(&g, base).expect("base is a vertex subset");
        let nrm = p.parabolic_normalizer(&parab);
        let ball = match enumerate_ball_capped(&p, 3, 1, 30_000) {
            Ok(b) => b,
            Err(_) => {
                ctx.skip();
                continue;
            }
        };
        let mut bad = None;
        for z in ball.iter() {
            let fast = p.parabolic_member(&nrm, z).expect("valid");
            // z normalizes gG_Sg^-1 iff y = g^-1 z g carries every
            // generator of G_S into G_S in both directions.
            let y = p.conjugate(z, parab.conjugator()).expect("valid");
            let yi = p.invert(&y).expect("valid");
            let mut oracle = true;
            for v in parab.base().iter() {
                let gen_v = p.generator(v);
                let fwd = p.conjugate(&gen_v, &yi).expect("valid");
                let bwd = p.conjugate(&gen_v, &y).expect("valid");
                if !fwd.support().is_subset_of(parab.base())
                    || !bwd.support().is_subset_of(parab.base())
                {
                    oracle = false;
                    break;
                }
            }
            if fast != oracle {
                bad = Some((z.clone(), fast, oracle));
                break;
            }
        }
        ctx.check(bad.is_none(), || {
            let (z, fast, oracle) = bad.as_ref().expect("failure recorded");
            format!(
                "normalizer disagrees at {} over [{}]: P={} N={} fast={} oracle={}",
                p.format_word(z),
                describe_presentation(&p),
                describe_parabolic(&p, &parab),
                describe_parabolic(&p, &nrm),
                fast,
                oracle
            )
        });
    }
}

/// Conjugation search outcomes: certificates are checked directly,
/// impossibility claims are challenged with a ball of conjugators.
fn suite_conjugation_search(ctx: &mut SuiteCtx, cases: usize) {
    ctx.gen.max_vertices = 4;
    for _ in 0..cases {
        ctx.cases += 1;
        let p = ctx.gen.presentation();
        let base = random_subset(ctx, &p);
        let k = ctx.gen.rng().gen_range(1..=2);
        let xs: Vec<NormalForm> = (0..k).map(|_| ctx.gen.normal_form(&p, 3)).collect();
        let budget = SearchBudget::default_for(&p, &xs);
        let outcome = p.conjugate_into_full(&xs, base, budget).expect("valid inputs");
        let family = || {
            xs.iter()
                .map(|x| p.format_word(x))
                .collect::<Vec<_>>()
                .join(", ")
        };
        match outcome {
            ConjugationOutcome::Conjugator(c) => {
                let works = xs.iter().all(|x| {
                    p.conjugate(x, &c).expect("valid").support().is_subset_of(base)
                });
                ctx.check(works, || {
                    format!(
                        "reported conjugator {} fails over [{}]: family [{}] base {{{}}}",
                        p.format_word(&c),
                        describe_presentation(&p),
                        family(),
                        p.set_to_labels(base).join(",")
                    )
                });
            }
            ConjugationOutcome::Impossible => {
                let ball = match enumerate_ball_capped(&p, 3, 1, 30_000) {
                    Ok(b) => b,
                    Err(_) => {
                        ctx.skip();
                        continue;
                    }
                };
                let refuted = ball.iter().find(|h| {
                    xs.iter().all(|x| {
                        p.conjugate(x, h).expect("valid").support().is_subset_of(base)
                    })
                });
                ctx.check(refuted.is_none(), || {
                    format!(
                        "impossibility refuted by conjugator {} over [{}]: family [{}] base {{{}}}",
                        p.format_word(refuted.expect("failure recorded")),
                        describe_presentation(&p),
                        family(),
                        p.set_to_labels(base).join(",")
                    )
                });
            }
            ConjugationOutcome::BudgetExhausted => {
                ctx.check(false, || {
                    format!(
                        "search gave up over [{}]: family [{}] base {{{}}}; the closure fallback must decide",
                        describe_presentation(&p),
                        family(),
                        p.set_to_labels(base).join(",")
                    )
                });
            }
        }
    }
}

/// Closure contains the family; dropping any base vertex must make the
/// family impossible to conjugate in, up to the ball searched.
fn suite_parabolic_closure(ctx: &mut SuiteCtx, cases: usize) {
    ctx.gen.max_vertices = 4;
    for _ in 0..cases {
        ctx.cases += 1;
        let p = ctx.gen.presentation();
        let k = ctx.gen.rng().gen_range(1..=2);
        let xs: Vec<NormalForm> = (0..k).map(|_| ctx.gen.normal_form(&p, 3)).collect();
        let (parab, flag) = p.parabolic_closure(&xs).expect("valid inputs");
        let family = || {
            xs.iter()
                .map(|x| p.format_word(x))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let all_member = xs
            .iter()
            .all(|x| p.parabolic_member(&parab, x).expect("valid"));
        ctx.check(all_member, || {
            format!(
                "closure misses its own family over [{}]: [{}] closure {}",
                describe_presentation(&p),
                family(),
                describe_parabolic(&p, &parab)
            )
        });
        ctx.check(flag == ClosureFlag::Exact, || {
            format!(
                "closure reported an inexact flag over [{}]: [{}]",
                describe_presentation(&p),
                family()
            )
        });
        if flag != ClosureFlag::Exact {
            continue;
        }
        let ball = match enumerate_ball_capped(&p, 3, 1, 30_000) {
            Ok(b) => b,
            Err(_) => {
                ctx.skip();
                continue;
            }
        };
        let mut shrinkable = None;
        'outer: for v in parab.base().iter() {
            let smaller = parab.base().minus(VertexSet::singleton(v));
            for h in ball.iter() {
                if xs.iter().all(|x| {
                    p.conjugate(x, h).expect("valid").support().is_subset_of(smaller)
                }) {
                    shrinkable = Some((v, h.clone()));
                    break 'outer;
                }
            }
        }
        ctx.check(shrinkable.is_none(), || {
            let (v, h) = shrinkable.as_ref().expect("failure recorded");
            format!(
                "closure base not minimal over [{}]: [{}] closure {} but conjugator {} avoids {}",
                describe_presentation(&p),
                family(),
                describe_parabolic(&p, &parab),
                p.format_word(h),
                p.label(*v)
            )
        });
    }
}

/// Kernel rewriting: projection is a homomorphism, the lift undoes it,
/// lengths drop, and realized kernels match the census formulas.
fn suite_kernel_roundtrip(ctx: &mut SuiteCtx, cases: usize) {
    ctx.gen.max_vertices = 4;
    for _ in 0..cases {
        ctx.cases += 1;
        let p = ctx.gen.presentation();
        let axis = VertexId(ctx.gen.rng().gen_range(0..p.vertex_count()));
        let mut kp = KernelPresentation::new(&p, axis).expect("axis is a vertex");
        let raw1 = ctx.gen.normal_form(&p, 4);
        let x1 = drop_retraction(&p, &raw1, axis);
        let raw2 = ctx.gen.normal_form(&p, 3);
        let x2 = drop_retraction(&p, &raw2, axis);
        let y1 = kp.project(&x1).expect("retraction is trivial");
        let y2 = kp.project(&x2).expect("retraction is trivial");
        let prod = p.multiply(&x1, &x2).expect("valid inputs");
        let y_prod = kp.project(&prod).expect("kernel is a subgroup");
        let delta_prod = kp.delta().multiply(&y1, &y2).expect("valid inputs");
        let place = || {
            format!(
                "axis {} over [{}]: x1={} x2={}",
                p.label(axis),
                describe_presentation(&p),
                p.format_word(&x1),
                p.format_word(&x2)
            )
        };
        ctx.check(y_prod == delta_prod, || {
            format!("projection is not multiplicative at {}", place())
        });
        let back = kp.lift(&y1).expect("valid input");
        ctx.check(back == x1, || format!("lift does not undo projection at {}", place()));
        ctx.check(y1.len() <= x1.len(), || {
            format!("projection grew a word at {}", place())
        });
        if x1.support().contains(axis) {
            ctx.check(y1.len() + 2 <= x1.len(), || {
                format!("axis cancellation did not shorten at {}", place())
            });
        }
        if kp.fully_realized() {
            check_kernel_census(ctx, &p, &kp, axis);
        }
    }
}

fn drop_retraction(p: &Presentation, x: &NormalForm, axis: VertexId) -> NormalForm {
    let s = p.exponent_sum(x, axis);
    let shift = p.power(&p.generator(axis), &(-s)).expect("valid input");
    p.multiply(x, &shift).expect("valid inputs")
}

fn check_kernel_census(ctx: &mut SuiteCtx, p: &Presentation, kp: &KernelPresentation, axis: VertexId) {
    let delta = kp.delta();
    let place = || format!("axis {} over [{}]", p.label(axis), describe_presentation(p));
    let expected_v = kp.expected_vertex_count().expect("finite kernel graph");
    ctx.check(expected_v == BigInt::from(delta.vertex_count()), || {
        format!(
            "vertex census mismatch at {}: expected {} found {}",
            place(),
            expected_v,
            delta.vertex_count()
        )
    });
    let mut actual_edges: u64 = 0;
    let mut rule_ok = true;
    for u in 0..delta.vertex_count() {
        for v in (u + 1)..delta.vertex_count() {
            let adj = delta.graph().adjacent(VertexId(u), VertexId(v));
            if adj {
                actual_edges += 1;
            }
            let du = kp.descriptor(VertexId(u));
            let dv = kp.descriptor(VertexId(v));
            let (off_u, under_u) = match du {
                DeltaVertex::Shared(w) => (None, *w),
                DeltaVertex::Offset(g, w) => (Some(g.clone()), *w),
            };
            let (off_v, under_v) = match dv {
                DeltaVertex::Shared(w) => (None, *w),
                DeltaVertex::Offset(g, w) => (Some(g.clone()), *w),
            };
            let want = p.graph().adjacent(under_u, under_v)
                && match (&off_u, &off_v) {
                    (Some(a), Some(b)) => a == b,
                    _ => true,
                };
            if adj != want {
                rule_ok = false;
            }
        }
    }
    let expected_e = kp.expected_edge_count().expect("finite kernel graph");
    ctx.check(expected_e == BigInt::from(actual_edges), || {
        format!(
            "edge census mismatch at {}: expected {} found {}",
            place(),
            expected_e,
            actual_edges
        )
    });
    ctx.check(rule_ok, || {
        format!("kernel adjacency deviates from the descriptor rule at {}", place())
    });
}

/// Compression reaches its fixed point and lifts back exactly.
fn suite_compression(ctx: &mut SuiteCtx, cases: usize) {
    ctx.gen.max_vertices = 3;
    for _ in 0..cases {
        ctx.cases += 1;
        let p = ctx.gen.presentation();
        let k = ctx.gen.rng().gen_range(1..=2);
        let xs: Vec<NormalForm> = (0..k).map(|_| ctx.gen.normal_form(&p, 3)).collect();
        let family = || {
            xs.iter()
                .map(|x| p.format_word(x))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let comp = match compress(&p, &xs) {
            Ok(c) => c,
            Err(GroupError::Unsupported(_)) => {
                ctx.skip();
                continue;
            }
            Err(e) => {
                ctx.check(false, || {
                    format!(
                        "compression failed over [{}] on [{}]: {e}",
                        describe_presentation(&p),
                        family()
                    )
                });
                continue;
            }
        };
        let q = &comp.presentation;
        // Every vertex group of the result is used by some element. This
        // holds whenever compression terminates normally.
        let all_used = (0..q.vertex_count()).all(|i| {
            comp.elements
                .iter()
                .any(|y| q.vertex_projection_nontrivial(y, VertexId(i)))
        });
        ctx.check(all_used, || {
            format!(
                "compressed presentation keeps an unused vertex over [{}] on [{}]",
                describe_presentation(&p),
                family()
            )
        });
        // Fixed point of the support projection: re-computing the
        // essential support of the output changes nothing.
        ctx.check(comp.flag == ClosureFlag::Exact, || {
            format!(
                "compression reported an inexact closure over [{}] on [{}]",
                describe_presentation(&p),
                family()
            )
        });
        let (es, es_flag) = q.essential_support(&comp.elements).expect("valid input");
        ctx.check(es_flag == ClosureFlag::Exact && es == q.graph().vertices(), || {
            format!(
                "compressed family does not fill its presentation over [{}] on [{}]",
                describe_presentation(&p),
                family()
            )
        });
        // Exact roundtrip through all recorded steps.
        let mut roundtrip_ok = true;
        for (x, y) in xs.iter().zip(&comp.elements) {
            if comp.lift_to_original(y).expect("valid input") != *x {
                roundtrip_ok = false;
            }
        }
        ctx.check(roundtrip_ok, || {
            format!(
                "lift does not recover the family over [{}] on [{}]",
                describe_presentation(&p),
                family()
            )
        });
        // Lifting respects products.
        if comp.elements.len() == 2 {
            let prod = q
                .multiply(&comp.elements[0], &comp.elements[1])
                .expect("valid inputs");
            let lifted = comp.lift_to_original(&prod).expect("valid input");
            let direct = p.multiply(&xs[0], &xs[1]).expect("valid inputs");
            ctx.check(lifted == direct, || {
                format!(
                    "lift is not multiplicative over [{}] on [{}]",
                    describe_presentation(&p),
                    family()
                )
            });
        }
    }
}

/// Splittings: factorizations reassemble, and the classified tree action
/// matches displacements measured on an explicit coset tree.
fn suite_splittings(ctx: &mut SuiteCtx, cases: usize) {
    for _ in 0..cases {
        ctx.cases += 1;
        let n = ctx.gen.rng().gen_range(2..=4);
        let p = ctx.gen.presentation_with(n, None);
        let split = match (0..p.vertex_count()).find_map(|i| p.split_at(VertexId(i)).ok()) {
            Some(s) => s,
            None => {
                // Complete graph: every vertex is adjacent to all others.
                ctx.skip();
                continue;
            }
        };
        let x = ctx.gen.normal_form(&p, 3);
        let place = || {
            format!(
                "x={} apex {} over [{}]",
                p.format_word(&x),
                p.label(split.apex()),
                describe_presentation(&p)
            )
        };
        let form = split.alternating_form(&x).expect("valid input");
        ctx.check(split.reassemble(&form) == x, || {
            format!("alternating form does not reassemble at {}", place())
        });
        let alternates = form.factors.windows(2).all(|w| w[0].0 != w[1].0);
        let genuine = form
            .factors
            .iter()
            .all(|(_, f)| !f.support().is_subset_of(split.edge_set()));
        let prefix_ok = form.prefix.support().is_subset_of(split.edge_set());
        ctx.check(alternates && genuine && prefix_ok, || {
            format!("alternating form is degenerate at {}", place())
        });
        let action = split.classify(&x).expect("valid input");
        if let TreeAction::Elliptic { conjugator, fixed } = &action {
            let moved = p.conjugate(&x, conjugator).expect("valid");
            let target = match fixed {
                crate::bassserre::FixedPoint::SideA => split.a_side(),
                crate::bassserre::FixedPoint::SideB => split.b_side(),
                crate::bassserre::FixedPoint::Edge => split.edge_set(),
            };
            ctx.check(moved.support().is_subset_of(target), || {
                format!("elliptic conjugator misses its side at {}", place())
            });
        }
        let radius = (x.len() + 2).max(3);
        let ball = match enumerate_ball_capped(&p, radius, 1, 30_000) {
            Ok(b) => b,
            Err(_) => {
                ctx.skip();
                continue;
            }
        };
        let tree = CosetTree::build(&p, &split, &ball);
        match tree.min_displacement(&x) {
            None => ctx.skip(),
            Some(d) => {
                let expected = match &action {
                    TreeAction::Elliptic { .. } => 0,
                    TreeAction::Hyperbolic { translation_length } => *translation_length,
                };
                ctx.check(d == expected, || {
                    format!(
                        "tree action mismatch at {}: classified {:?} but the coset tree moves a vertex by {}",
                        place(),
                        action,
                        d
                    )
                });
            }
        }
    }
}

/// A relation scan independent of the classifier: breadth-first over freely
/// reduced words in two letters, evaluated with the word arithmetic that
/// the earlier suites validate. Returns the length of the shortest relation
/// within the bound.
pub fn short_relation_scan(
    p: &Presentation,
    u: &NormalForm,
    v: &NormalForm,
    max_len: usize,
) -> Option<usize> {
    let letters = [
        u.clone(),
        p.invert(u).expect("valid input"),
        v.clone(),
        p.invert(v).expect("valid input"),
    ];
    let inverse_of = [1usize, 0, 3, 2];
    let mut queue: VecDeque<(NormalForm, usize, usize)> = VecDeque::new();
    for (code, letter) in letters.iter().enumerate() {
        queue.push_back((letter.clone(), code, 1));
    }
    while let Some((val, last, len)) = queue.pop_front() {
        if val.is_empty() {
            return Some(len);
        }
        if len == max_len {
            continue;
        }
        for (code, letter) in letters.iter().enumerate() {
            if code == inverse_of[last] {
                continue;
            }
            let next = p.multiply(&val, letter).expect("valid inputs");
            queue.push_back((next, code, len + 1));
        }
    }
    None
}

/// Non-commuting pairs over torsion-free vertices must come back certified
/// free, and certified witnesses must survive an independent relation scan.
fn suite_free_pairs(ctx: &mut SuiteCtx, cases: usize) {
    for _ in 0..cases {
        ctx.cases += 1;
        let n = ctx.gen.rng().gen_range(2..=4);
        let p = ctx.gen.presentation_with(n, Some(None));
        let mut pair = None;
        for _ in 0..20 {
            let x = ctx.gen.normal_form(&p, 3);
            let y = ctx.gen.normal_form(&p, 3);
            let xy = p.multiply(&x, &y).expect("valid inputs");
            let yx = p.multiply(&y, &x).expect("valid inputs");
            if xy != yx {
                pair = Some((x, y));
                break;
            }
        }
        let Some((x, y)) = pair else {
            // Abelian or near-abelian graph; nothing to certify here.
            ctx.skip();
            continue;
        };
        let place = || {
            format!(
                "x={} y={} over [{}]",
                p.format_word(&x),
                p.format_word(&y),
                describe_presentation(&p)
            )
        };
        let c = classify(&p, &[x.clone(), y.clone()]).expect("valid inputs");
        match c.verdict {
            Verdict::ContainsNonabelianFree {
                witness,
                free_certified,
            } => {
                ctx.check(free_certified, || {
                    format!("torsion-free pair was not certified at {}", place())
                });
                let rel = short_relation_scan(&p, &witness.0, &witness.1, 6);
                ctx.check(rel.is_none(), || {
                    format!(
                        "certified witnesses ({}, {}) satisfy a relation of length {} at {}",
                        p.format_word(&witness.0),
                        p.format_word(&witness.1),
                        rel.expect("failure recorded"),
                        place()
                    )
                });
            }
            other => {
                ctx.check(false, || {
                    format!("expected a free verdict, got `{other}` at {}", place())
                });
            }
        }
    }
}

/// Over all-infinite vertex groups every family must classify definitely:
/// trivial, cyclic, free abelian, or provably containing a free pair.
fn suite_raag_dichotomy(ctx: &mut SuiteCtx, cases: usize) {
    for _ in 0..cases {
        ctx.cases += 1;
        let n = ctx.gen.rng().gen_range(1..=4);
        let p = ctx.gen.presentation_with(n, Some(None));
        let k = ctx.gen.rng().gen_range(0..=3);
        let xs: Vec<NormalForm> = (0..k).map(|_| ctx.gen.normal_form(&p, 3)).collect();
        let family = || {
            if xs.is_empty() {
                "<empty>".to_string()
            } else {
                xs.iter()
                    .map(|x| p.format_word(x))
                    .collect::<Vec<_>>()
                    .join(", ")
            }
        };
        let c = classify(&p, &xs).expect("valid inputs");
        let place = || format!("[{}] over [{}]", family(), describe_presentation(&p));
        match &c.verdict {
            Verdict::Unknown(reason) => {
                ctx.check(false, || {
                    format!("family classified unknown ({reason}) at {}", place())
                });
            }
            Verdict::FiniteCyclic(_) | Verdict::InfiniteDihedral => {
                ctx.check(false, || {
                    format!("torsion verdict `{}` in a torsion-free group at {}", c.verdict, place())
                });
            }
            Verdict::Trivial => {
                ctx.check(xs.iter().all(NormalForm::is_identity), || {
                    format!("nontrivial family classified trivial at {}", place())
                });
            }
            Verdict::InfiniteCyclic | Verdict::FreeAbelian(_) => {
                let abelian = crate::classify::is_abelian(&p, &xs).expect("valid inputs");
                ctx.check(abelian, || {
                    format!("abelian verdict for a non-commuting family at {}", place())
                });
                if let Verdict::FreeAbelian(r) = &c.verdict {
                    ctx.check(*r >= 2, || {
                        format!("free abelian rank below two at {}", place())
                    });
                }
            }
            Verdict::ContainsNonabelianFree { witness, free_certified } => {
                ctx.check(*free_certified, || {
                    format!("uncertified free pair in a torsion-free group at {}", place())
                });
                let rel = short_relation_scan(&p, &witness.0, &witness.1, 4);
                ctx.check(rel.is_none(), || {
                    format!("free witnesses satisfy a short relation at {}", place())
                });
            }
        }
    }
}

#[cfg(test)]
mod core_tests {
    use super::*;

    fn racg_pair(adjacent: bool) -> Presentation {
        let edges: &[(&str, &str)] = if adjacent { &[("u", "w")] } else { &[] };
        Presentation::from_desc(
            &[("u", CyclicGroup::Finite(2)), ("w", CyclicGroup::Finite(2))],
            edges,
        )
        .unwrap()
    }

    fn word_of(p: &Presentation, pairs: &[(&str, i64)]) -> Word {
        let mut w = Word::new();
        for (l, e) in pairs {
            w.push(p.vertex_by_label(l).unwrap(), BigInt::from(*e));
        }
        w
    }

    #[test]
    fn closure_finds_minimal_words() {
        let p = racg_pair(false);
        let w = word_of(&p, &[("u", 1), ("w", 1), ("u", 1), ("w", 1)]);
        let (canon, len) = rewrite_closure_canonical(&p, &w).unwrap();
        assert_eq!(len, 4);
        assert_eq!(canon, vec![(0, 1), (1, 1), (0, 1), (1, 1)]);

        let p = racg_pair(true);
        let w = word_of(&p, &[("u", 1), ("w", 1), ("u", 1), ("w", 1)]);
        let (canon, len) = rewrite_closure_canonical(&p, &w).unwrap();
        assert_eq!(len, 0);
        assert!(canon.is_empty());
    }

    #[test]
    fn closure_matches_fast_reduction_on_fixed_cases() {
        // Frozen canonical forms, derived from the rewriting closure.
        let p = Presentation::from_desc(
            &[
                ("a", CyclicGroup::Finite(3)),
                ("c", CyclicGroup::Infinite),
                ("b", CyclicGroup::Infinite),
            ],
            &[("a", "c"), ("c", "b")],
        )
        .unwrap();
        let cases: Vec<(Vec<(&str, i64)>, &str)> = vec![
            (vec![("a", 1), ("c", 1), ("a", 1), ("c", 1), ("a", 1), ("c", 1)], "c^3"),
            (vec![("c", 1), ("a", 1), ("c", -1)], "a^1"),
            (vec![("b", 1), ("a", 1), ("b", -1)], "b^1*a^1*b^-1"),
            (vec![("a", 2), ("a", 2)], "a^1"),
            (vec![("b", 2), ("c", 1), ("b", -2)], "c^1"),
        ];
        for (pairs, expected) in cases {
            let w = word_of(&p, &pairs);
            let nf = p.reduce(&w).unwrap();
            assert_eq!(p.format_word(&nf), expected);
            assert!(oracle_agrees_with(&p, &w, &nf).unwrap());
        }
    }

    #[test]
    fn random_words_agree_with_closure() {
        let mut gen = InstanceGenerator::new(0xBA5E);
        gen.max_vertices = 4;
        for _ in 0..300 {
            let p = gen.presentation();
            let len = gen.rng().gen_range(0..=6);
            let w = gen.word(&p, len);
            let nf = p.reduce(&w).unwrap();
            assert!(
                oracle_agrees_with(&p, &w, &nf).unwrap(),
                "disagreement on {:?} over {:?}",
                w,
                p
            );
        }
    }

    #[test]
    fn ball_sizes_on_known_groups() {
        // Infinite dihedral: exactly two elements per positive length.
        let p = racg_pair(false);
        let ball = enumerate_ball(&p, 3, 2).unwrap();
        assert_eq!(ball.len(), 7);
        // Z x Z with exponents capped at 2: {a^i b^j}, i, j in -2..=2.
        let p = Presentation::from_desc(
            &[("a", CyclicGroup::Infinite), ("b", CyclicGroup::Infinite)],
            &[("a", "b")],
        )
        .unwrap();
        let ball = enumerate_ball(&p, 2, 2).unwrap();
        assert_eq!(ball.len(), 25);
        // Ball is closed under inversion.
        for x in ball.iter() {
            assert!(ball.contains(&p.invert(x).unwrap()));
        }
    }

    #[test]
    fn ball_respects_cap() {
        let p = Presentation::from_desc(
            &[("a", CyclicGroup::Infinite), ("b", CyclicGroup::Infinite)],
            &[],
        )
        .unwrap();
        match enumerate_ball_capped(&p, 4, 2, 100) {
            Err(OracleError::BallTooLarge { cap }) => assert_eq!(cap, 100),
            Ok(b) => panic!("expected abort, got {} elements", b.len()),
            Err(e) => panic!("unexpected error: {e}"),
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let mut g1 = InstanceGenerator::new(42);
        let mut g2 = InstanceGenerator::new(42);
        for _ in 0..10 {
            let p1 = g1.presentation();
            let p2 = g2.presentation();
            assert_eq!(format!("{p1:?}"), format!("{p2:?}"));
            let w1 = g1.word(&p1, 5);
            let w2 = g2.word(&p2, 5);
            assert_eq!(w1, w2);
        }
    }
}

#[cfg(test)]
mod suite_tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        match run_suite("no-such-suite", 1) {
            Err(OracleError::UnknownSuite(n)) => assert_eq!(n, "no-such-suite"),
            other => panic!("expected an unknown-suite error, got {other:?}"),
        }
    }

    #[test]
    fn reports_are_byte_identical_per_seed() {
        for name in suite_names() {
            let a = run_suite_scaled(name, 7, 4).unwrap();
            let b = run_suite_scaled(name, 7, 4).unwrap();
            assert_eq!(a.render(), b.render(), "suite {name} is not deterministic");
        }
    }

    #[test]
    fn small_runs_of_every_suite_pass() {
        for name in suite_names() {
            let out = run_suite_scaled(name, 0xC0FFEE, 6).unwrap();
            assert!(
                out.passed(),
                "suite {name} failed:\n{}",
                out.render()
            );
            assert!(out.cases > 0);
        }
    }

    #[test]
    fn report_rendering_is_stable() {
        let outcome = SuiteOutcome {
            name: "normal-forms",
            seed: 3,
            cases: 10,
            checks: 30,
            skipped: 1,
            failure_count: 0,
            failures: Vec::new(),
        };
        assert_eq!(outcome.render(), "normal-forms: ok (cases=10 checks=30 skipped=1)");
        let report = SuiteReport { seed: 3, outcomes: vec![outcome] };
        assert_eq!(
            report.render(),
            "check suites, seed 3\n  normal-forms: ok (cases=10 checks=30 skipped=1)\noverall: ok (1 suites, 0 failures)"
        );
        assert!(report.passed());
    }
}

#[cfg(test)]
mod suite_soak {
    use super::*;

    /// Default-size run of every suite; this is what `selftest` executes.
    /// Slowish, so kept out of the default test pass.
    #[test]
    #[ignore]
    fn default_run_passes() {
        let report = run_all(42);
        assert!(report.passed(), "{}", report.render());
        println!("{}", report.render());
    }
}
