//! Single-pair shortest path: array-based Dijkstra, a relaxation fault
//! that overwrites labels instead of taking the minimum, a brute-force
//! all-paths oracle, and distance-additivity relations.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::engine::{
    BuiltinFixture, CampaignSubject, CostMeter, EngineError, ExecutionOf, FixtureOrigin, Outcome,
    Relation, RelationDescriptor, SourceOverrides, Subject, Variant,
};

const INF: u64 = u64::MAX / 4;

/// Weighted graph with 1-based vertices, positive weights, no self loops,
/// and at most one edge per (ordered, or unordered when undirected) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    pub vertex_count: usize,
    pub directed: bool,
    pub edges: Vec<(usize, usize, u64)>,
    /// Optional display names, one per vertex.
    pub labels: Option<Vec<String>>,
}

impl WeightedGraph {
    pub fn undirected(vertex_count: usize, edges: Vec<(usize, usize, u64)>) -> Self {
        Self {
            vertex_count,
            directed: false,
            edges,
            labels: None,
        }
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<u64> {
        self.edges
            .iter()
            .find(|&&(a, b, _)| (a, b) == (u, v) || (!self.directed && (b, a) == (u, v)))
            .map(|&(_, _, w)| w)
    }

    /// Adjacency matrix view, `None` for absent edges.
    fn matrix(&self) -> Vec<Vec<Option<u64>>> {
        let n = self.vertex_count;
        let mut m = vec![vec![None; n + 1]; n + 1];
        for &(u, v, w) in &self.edges {
            m[u][v] = Some(w);
            if !self.directed {
                m[v][u] = Some(w);
            }
        }
        m
    }

    /// Resolves a vertex given as a label or a 1-based number.
    pub fn resolve_vertex(&self, name: &str) -> Option<usize> {
        if let Some(labels) = &self.labels {
            if let Some(idx) = labels.iter().position(|l| l == name) {
                return Some(idx + 1);
            }
        }
        name.parse::<usize>()
            .ok()
            .filter(|&v| v >= 1 && v <= self.vertex_count)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.vertex_count == 0 {
            return Err(EngineError::input("graph needs at least one vertex"));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.vertex_count {
                return Err(EngineError::input("labels must cover every vertex"));
            }
        }
        let mut seen = Vec::with_capacity(self.edges.len());
        for &(u, v, w) in &self.edges {
            if u == v {
                return Err(EngineError::input(format!("self loop at vertex {u}")));
            }
            if u < 1 || u > self.vertex_count || v < 1 || v > self.vertex_count {
                return Err(EngineError::input(format!("edge ({u},{v}) out of range")));
            }
            if w == 0 {
                return Err(EngineError::input(format!(
                    "edge ({u},{v}) has zero weight"
                )));
            }
            let key = if self.directed || u < v {
                (u, v)
            } else {
                (v, u)
            };
            if seen.contains(&key) {
                return Err(EngineError::input(format!("duplicate edge ({u},{v})")));
            }
            seen.push(key);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathQuery {
    pub src: usize,
    pub dst: usize,
    pub graph: WeightedGraph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathResult {
    /// Vertex sequence from source to destination; empty when unreachable.
    pub path: Vec<usize>,
    pub distance: u64,
    pub reachable: bool,
}

impl PathResult {
    fn unreachable() -> Self {
        Self {
            path: Vec::new(),
            distance: 0,
            reachable: false,
        }
    }
}

pub struct ShortestPath;

impl Subject for ShortestPath {
    type Input = PathQuery;
    type Output = PathResult;

    fn name() -> &'static str {
        "shortest-path"
    }

    fn validate(input: &Self::Input) -> Result<(), EngineError> {
        input.graph.validate()?;
        let n = input.graph.vertex_count;
        if input.src < 1 || input.src > n || input.dst < 1 || input.dst > n {
            return Err(EngineError::input("query vertex out of range"));
        }
        if input.src == input.dst {
            return Err(EngineError::input("source and destination must differ"));
        }
        Ok(())
    }
}

/// Array-based Dijkstra over the adjacency matrix. With `overwrite_relax`
/// every settling round replaces each unvisited label by (settled label +
/// edge weight), absent edge acting as infinity, instead of keeping the
/// minimum; predecessors then follow the listing's `<=` update.
fn run_dijkstra(query: &PathQuery, overwrite_relax: bool, meter: &mut CostMeter) -> PathResult {
    let n = query.graph.vertex_count;
    let adj = query.graph.matrix();
    let mut dist = vec![INF; n + 1];
    let mut pred = vec![query.src; n + 1];
    let mut settled = vec![false; n + 1];
    settled[query.src] = true;
    dist[query.src] = 0;
    for v in 1..=n {
        meter.tick(); // initial label read
        if v != query.src {
            if let Some(w) = adj[query.src][v] {
                dist[v] = w;
            }
        }
    }

    loop {
        let mut k = 0;
        let mut best = INF;
        for v in 1..=n {
            if !settled[v] {
                meter.tick(); // extraction comparison
                if dist[v] < best {
                    best = dist[v];
                    k = v;
                }
            }
        }
        if k == 0 {
            return PathResult::unreachable();
        }
        settled[k] = true;
        if k == query.dst {
            break;
        }
        for v in 1..=n {
            if settled[v] {
                continue;
            }
            meter.tick(); // relaxation
            let via = match adj[k][v] {
                Some(w) => dist[k].saturating_add(w),
                None => INF,
            };
            if overwrite_relax || via < dist[v] {
                dist[v] = via;
            }
            if via <= dist[v] {
                pred[v] = k;
            }
        }
    }

    let mut path = vec![query.dst];
    let mut cur = query.dst;
    while cur != query.src {
        cur = pred[cur];
        path.push(cur);
        debug_assert!(path.len() <= n + 1, "predecessor chain is acyclic");
    }
    path.reverse();
    PathResult {
        path,
        distance: dist[query.dst],
        reachable: true,
    }
}

pub struct Correct;

impl Variant<ShortestPath> for Correct {
    fn id(&self) -> &'static str {
        "correct"
    }

    fn execute(&self, input: &mut PathQuery, meter: &mut CostMeter) -> (PathResult, bool) {
        (run_dijkstra(input, false, meter), false)
    }
}

/// Relaxation fault: labels of unvisited vertices are overwritten rather
/// than minimized, so earlier, better labels are lost.
pub struct MutantRelax;

impl Variant<ShortestPath> for MutantRelax {
    fn id(&self) -> &'static str {
        "mutant-relax"
    }

    fn execute(&self, input: &mut PathQuery, meter: &mut CostMeter) -> (PathResult, bool) {
        (run_dijkstra(input, true, meter), false)
    }
}

/// Exhaustive simple-path enumeration; the independent ground truth for
/// small graphs.
pub fn oracle_all_paths(query: &PathQuery) -> Result<PathResult, EngineError> {
    let n = query.graph.vertex_count;
    if n > 12 {
        return Err(EngineError::OracleScope(format!(
            "all-paths oracle handles at most 12 vertices, got {n}"
        )));
    }
    let adj = query.graph.matrix();
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut on_path = vec![false; n + 1];
    let mut stack = vec![query.src];
    on_path[query.src] = true;

    fn dfs(
        at: usize,
        dst: usize,
        dist: u64,
        adj: &[Vec<Option<u64>>],
        on_path: &mut Vec<bool>,
        stack: &mut Vec<usize>,
        best: &mut Option<(u64, Vec<usize>)>,
    ) {
        if at == dst {
            if best.as_ref().is_none_or(|(d, _)| dist < *d) {
                *best = Some((dist, stack.clone()));
            }
            return;
        }
        for v in 1..adj.len() {
            if on_path[v] {
                continue;
            }
            if let Some(w) = adj[at][v] {
                on_path[v] = true;
                stack.push(v);
                dfs(v, dst, dist + w, adj, on_path, stack, best);
                stack.pop();
                on_path[v] = false;
            }
        }
    }

    dfs(
        query.src,
        query.dst,
        0,
        &adj,
        &mut on_path,
        &mut stack,
        &mut best,
    );
    Ok(match best {
        Some((distance, path)) => PathResult {
            path,
            distance,
            reachable: true,
        },
        None => PathResult::unreachable(),
    })
}

// ---------------------------------------------------------------------------
// Relations
// ---------------------------------------------------------------------------

type Ctx<'a> = crate::engine::ApplyCtx<'a, ShortestPath>;
type Source = ExecutionOf<ShortestPath>;

const UPDATE_FAULT: &str = "Minimum distances to unvisited vertices not correctly updated";

fn reachable_guard(source: &Source) -> Result<(), Outcome> {
    if source.output.reachable {
        Ok(())
    } else {
        Err(Outcome::Inapplicable(
            "source reported the pair unreachable".into(),
        ))
    }
}

/// Intermediate vertices the split/trim probes work on.
fn intermediates(source: &Source) -> Vec<usize> {
    let path = &source.output.path;
    if path.len() < 3 {
        Vec::new()
    } else {
        path[1..path.len() - 1].to_vec()
    }
}

/// Picks probe vertices: all of them when few, a uniform sample otherwise.
fn choose_intermediates(ctx: &mut Ctx<'_>, all: &[usize]) -> Vec<usize> {
    if all.len() <= 4 {
        return all.to_vec();
    }
    let mut picked: Vec<usize> = all.choose_multiple(ctx.rng(), 3).copied().collect();
    ctx.charge_derive(picked.len() as u64);
    picked.sort_unstable();
    picked.dedup();
    picked
}

/// The cheap feasibility check: the returned vertices form an edge path
/// whose weights sum to the returned distance.
pub struct EdgeCheck {
    desc: RelationDescriptor,
}

impl EdgeCheck {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "edge-check",
                subject: "shortest-path",
                suspected_error: "Infeasible path returned",
                production_safe: true,
            },
        }
    }
}

impl Default for EdgeCheck {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<ShortestPath> for EdgeCheck {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        if let Err(outcome) = reachable_guard(source) {
            return outcome;
        }
        let path = &source.output.path;
        let query = &source.input;
        ctx.charge_check(2);
        if path.first() != Some(&query.src) || path.last() != Some(&query.dst) {
            return Outcome::Fail(format!(
                "path endpoints {:?} do not match query ({}, {})",
                (path.first(), path.last()),
                query.src,
                query.dst
            ));
        }
        let mut sum = 0u64;
        for pair in path.windows(2) {
            ctx.charge_check(2); // edge lookup + accumulation
            match query.graph.weight(pair[0], pair[1]) {
                Some(w) => sum += w,
                None => {
                    return Outcome::Fail(format!(
                        "path edge ({}, {}) missing from the graph",
                        pair[0], pair[1]
                    ))
                }
            }
        }
        ctx.charge_check(1);
        if sum != source.output.distance {
            return Outcome::Fail(format!(
                "path weights sum to {sum}, distance is {}",
                source.output.distance
            ));
        }
        Outcome::Pass
    }
}

/// Queries the pair in the opposite direction; an undirected graph must
/// report the same distance (the path may differ).
pub struct ReversePath {
    desc: RelationDescriptor,
}

impl ReversePath {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "reverse-path",
                subject: "shortest-path",
                suspected_error: UPDATE_FAULT,
                production_safe: true,
            },
        }
    }
}

impl Default for ReversePath {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<ShortestPath> for ReversePath {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        if source.input.graph.directed {
            return Outcome::Inapplicable("not applicable on a directed graph".into());
        }
        if let Err(outcome) = reachable_guard(source) {
            return outcome;
        }
        let query = &source.input;
        ctx.charge_derive(1);
        let followup = match ctx.run_followup(PathQuery {
            src: query.dst,
            dst: query.src,
            graph: query.graph.clone(),
        }) {
            Ok(idx) => idx,
            Err(e) => return Outcome::Fail(format!("follow-up rejected: {e}")),
        };
        let reverse = ctx.followup(followup).output.clone();
        ctx.charge_check(2);
        if !reverse.reachable {
            return Outcome::Fail("follow-up reported unreachable".into());
        }
        if reverse.distance != source.output.distance {
            return Outcome::Fail(format!(
                "expected {} got {}",
                source.output.distance, reverse.distance
            ));
        }
        Outcome::Pass
    }
}

/// Distances through an on-path vertex must add up to the full distance.
pub struct Split {
    desc: RelationDescriptor,
    reversed: bool,
}

impl Split {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "split",
                subject: "shortest-path",
                suspected_error: UPDATE_FAULT,
                production_safe: true,
            },
            reversed: false,
        }
    }

    /// The mirrored probe pair (dst -> vi, vi -> src); undirected only.
    pub fn reversed() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "split-reversed",
                subject: "shortest-path",
                suspected_error: UPDATE_FAULT,
                production_safe: true,
            },
            reversed: true,
        }
    }
}

impl Default for Split {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<ShortestPath> for Split {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        if self.reversed && source.input.graph.directed {
            return Outcome::Inapplicable("not applicable on a directed graph".into());
        }
        if let Err(outcome) = reachable_guard(source) {
            return outcome;
        }
        let all = intermediates(source);
        if all.is_empty() {
            return Outcome::Inapplicable("no intermediate vertex on the path".into());
        }
        let query = &source.input;
        let total = source.output.distance;
        for vi in choose_intermediates(ctx, &all) {
            let legs = if self.reversed {
                [(query.dst, vi), (vi, query.src)]
            } else {
                [(query.src, vi), (vi, query.dst)]
            };
            let mut sum = 0u64;
            for (src, dst) in legs {
                ctx.charge_derive(1);
                let followup = match ctx.run_followup(PathQuery {
                    src,
                    dst,
                    graph: query.graph.clone(),
                }) {
                    Ok(idx) => idx,
                    Err(e) => return Outcome::Fail(format!("follow-up rejected: {e}")),
                };
                let leg = ctx.followup(followup).output.clone();
                ctx.charge_check(1);
                if !leg.reachable {
                    return Outcome::Fail(format!("follow-up ({src}, {dst}) reported unreachable"));
                }
                sum += leg.distance;
            }
            ctx.charge_check(1);
            if sum != total {
                return Outcome::Fail(format!("legs through {vi} sum to {sum}, expected {total}"));
            }
        }
        Outcome::Pass
    }
}

/// Drops the endpoints: the distance between the first and last
/// intermediate plus the two trimmed edge weights must equal the full
/// distance. On undirected graphs the mirrored query is probed as well.
pub struct Trim {
    desc: RelationDescriptor,
}

impl Trim {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "trim",
                subject: "shortest-path",
                suspected_error: UPDATE_FAULT,
                production_safe: true,
            },
        }
    }
}

impl Default for Trim {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<ShortestPath> for Trim {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        if let Err(outcome) = reachable_guard(source) {
            return outcome;
        }
        let all = intermediates(source);
        if all.is_empty() {
            return Outcome::Inapplicable("no intermediate vertex on the path".into());
        }
        let (first, last) = (all[0], all[all.len() - 1]);
        if first == last {
            return Outcome::Inapplicable("single intermediate vertex".into());
        }
        let query = &source.input;
        ctx.charge_derive(2);
        let lead = query
            .graph
            .weight(query.src, first)
            .expect("path edge checked by construction");
        let tail = query
            .graph
            .weight(last, query.dst)
            .expect("path edge checked by construction");

        let mut legs = vec![(first, last)];
        if !query.graph.directed {
            legs.push((last, first));
        }
        let total = source.output.distance;
        for (src, dst) in legs {
            ctx.charge_derive(1);
            let followup = match ctx.run_followup(PathQuery {
                src,
                dst,
                graph: query.graph.clone(),
            }) {
                Ok(idx) => idx,
                Err(e) => return Outcome::Fail(format!("follow-up rejected: {e}")),
            };
            let inner = ctx.followup(followup).output.clone();
            ctx.charge_check(2);
            if !inner.reachable {
                return Outcome::Fail(format!("follow-up ({src}, {dst}) reported unreachable"));
            }
            let sum = inner.distance + lead + tail;
            if sum != total {
                return Outcome::Fail(format!(
                    "trimmed distance plus end edges is {sum}, expected {total}"
                ));
            }
        }
        Outcome::Pass
    }
}

// ---------------------------------------------------------------------------
// Campaign wiring
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct FixtureDoc {
    n: usize,
    directed: bool,
    edges: Vec<(usize, usize, u64)>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// Derived 4-vertex fixture standing in for the unpublished worked-example
/// graph: the overwrite fault detours (c, a) through c-d-b-a at distance 10
/// where the true shortest path is c-b-a at distance 6.
pub fn fig1_like_fixture() -> WeightedGraph {
    WeightedGraph {
        vertex_count: 4,
        directed: false,
        edges: vec![(1, 2, 3), (2, 3, 3), (3, 4, 2), (2, 4, 5), (1, 4, 20)],
        labels: Some(vec![
            "a".to_string(),
            "b".to_string(),
            "c".to_string(),
            "d".to_string(),
        ]),
    }
}

impl CampaignSubject for ShortestPath {
    type Fixture = WeightedGraph;

    fn variants() -> Vec<Box<dyn Variant<Self>>> {
        vec![Box::new(Correct), Box::new(MutantRelax)]
    }

    fn relations() -> Vec<Box<dyn Relation<Self>>> {
        vec![
            Box::new(EdgeCheck::new()),
            Box::new(ReversePath::new()),
            Box::new(Split::new()),
            Box::new(Split::reversed()),
            Box::new(Trim::new()),
        ]
    }

    fn builtin_fixtures() -> Vec<BuiltinFixture<WeightedGraph>> {
        let fx = fig1_like_fixture();
        vec![BuiltinFixture {
            id: "fig1-like",
            origin: FixtureOrigin::Derived,
            summary: format!(
                "undirected graph on a..d with edges {:?}",
                fx.edges
                    .iter()
                    .map(|&(u, v, w)| format!("{}-{}:{w}", label_of(&fx, u), label_of(&fx, v)))
                    .collect::<Vec<_>>()
            ),
            value: fx,
        }]
    }

    fn parse_fixture(value: &serde_json::Value) -> Result<WeightedGraph, EngineError> {
        let doc: FixtureDoc = serde_json::from_value(value.clone())
            .map_err(|e| EngineError::input(format!("bad shortest-path fixture: {e}")))?;
        let graph = WeightedGraph {
            vertex_count: doc.n,
            directed: doc.directed,
            edges: doc.edges,
            labels: doc.labels,
        };
        graph.validate()?;
        Ok(graph)
    }

    fn generate_input(rng: &mut ChaCha8Rng, fixture: Option<&WeightedGraph>) -> PathQuery {
        let graph = match fixture {
            Some(fx) => fx.clone(),
            None => random_graph(rng),
        };
        let n = graph.vertex_count;
        let src = rng.gen_range(1..=n);
        let mut dst = rng.gen_range(1..=n);
        while dst == src {
            dst = rng.gen_range(1..=n);
        }
        PathQuery { src, dst, graph }
    }

    fn input_from_overrides(
        fixture: &WeightedGraph,
        overrides: &SourceOverrides,
    ) -> Result<PathQuery, EngineError> {
        for (flag, set) in [
            ("--key", overrides.key.is_some()),
            ("--k", overrides.k.is_some()),
        ] {
            if set {
                return Err(EngineError::config(format!(
                    "override {flag} does not apply to subject 'shortest-path'"
                )));
            }
        }
        let (src_name, dst_name) = match (&overrides.src, &overrides.dst) {
            (Some(s), Some(d)) => (s, d),
            _ => {
                return Err(EngineError::config(
                    "subject 'shortest-path' needs --src and --dst",
                ))
            }
        };
        let src = fixture
            .resolve_vertex(src_name)
            .ok_or_else(|| EngineError::config(format!("unknown vertex '{src_name}'")))?;
        let dst = fixture
            .resolve_vertex(dst_name)
            .ok_or_else(|| EngineError::config(format!("unknown vertex '{dst_name}'")))?;
        Ok(PathQuery {
            src,
            dst,
            graph: fixture.clone(),
        })
    }
}

fn label_of(graph: &WeightedGraph, v: usize) -> String {
    graph
        .labels
        .as_ref()
        .map(|l| l[v - 1].clone())
        .unwrap_or_else(|| v.to_string())
}

/// Random small graph: a shuffled chain for connectivity plus extra edges
/// at moderate density. One in four graphs is directed.
fn random_graph(rng: &mut ChaCha8Rng) -> WeightedGraph {
    let n = rng.gen_range(4..=8usize);
    let directed = rng.gen_bool(0.25);
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    let has_edge = |edges: &[(usize, usize, u64)], u: usize, v: usize| {
        edges
            .iter()
            .any(|&(a, b, _)| (a, b) == (u, v) || (!directed && (b, a) == (u, v)))
    };
    for pair in order.windows(2) {
        edges.push((pair[0], pair[1], rng.gen_range(1..=20)));
    }
    for u in 1..=n {
        for v in 1..=n {
            if u == v || (!directed && u > v) {
                continue;
            }
            if !has_edge(&edges, u, v) && rng.gen_bool(0.3) {
                edges.push((u, v, rng.gen_range(1..=20)));
            }
        }
    }
    WeightedGraph {
        vertex_count: n,
        directed,
        edges,
        labels: None,
    }
}
