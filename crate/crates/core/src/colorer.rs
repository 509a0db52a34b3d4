//! Hypergraph-level algorithms: an exhaustive 2-coloring search with
//! propagation, a two-free-vertex procedure for sparse 3-uniform
//! hypergraphs, and the full free-vertex construction for 4-regular
//! 4-uniform hypergraphs.
//!
//! The free-vertex construction works per component. A base 2-coloring
//! either leaves some vertex non-fixed, which can simply be uncolored,
//! or it fixes every vertex, in which case the edges split into two
//! 3-regular 3-uniform derived hypergraphs, one per color class. An
//! alternating walk across their components, deleting one derived edge
//! per step and recoloring with the two-free-vertex procedure, closes
//! into a cycle; stitching the per-component colorings back together and
//! absorbing the remaining components yields a coloring with exactly one
//! uncolored vertex.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::convert::{coloring_from_assignment, instance_from_hypergraph};
use crate::hypergraph::{
    edge_bichromatic, Color, ColoringCertificate, EdgeId, Hypergraph, HypergraphComponent,
    PartialColoring, VertexId,
};
use crate::oracle;
use crate::solver::{self, CaseLabel, ReductionTrace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColorerError {
    #[error("no 2-coloring without a monochromatic edge exists")]
    NotTwoColorable,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

fn internal<T>(msg: impl Into<String>) -> Result<T, ColorerError> {
    Err(ColorerError::Internal(msg.into()))
}

fn require(cond: bool, msg: &str) -> Result<(), ColorerError> {
    if cond {
        Ok(())
    } else {
        internal(msg)
    }
}

fn precondition(cond: bool, msg: &str) -> Result<(), ColorerError> {
    if cond {
        Ok(())
    } else {
        Err(ColorerError::Precondition(msg.into()))
    }
}

/// Finds a total coloring with no monochromatic edge by backtracking:
/// lowest-index uncolored vertex first, color 1 before color 2, with
/// forced-vertex propagation (an edge whose other vertices all share one
/// color forces the last one). Exhaustive, so a `NotTwoColorable` answer
/// is a proof that none exists.
pub fn two_color(h: &Hypergraph) -> Result<PartialColoring, ColorerError> {
    if h.edges().iter().any(|e| e.len() < 2) {
        return Err(ColorerError::NotTwoColorable);
    }
    let mut colors = PartialColoring::uncolored(h.vertex_count());
    if search(h, &mut colors) {
        Ok(colors)
    } else {
        Err(ColorerError::NotTwoColorable)
    }
}

fn search(h: &Hypergraph, colors: &mut PartialColoring) -> bool {
    let mut trail: Vec<VertexId> = Vec::new();
    if !propagate(h, colors, &mut trail) {
        for v in trail {
            colors.set(v, None);
        }
        return false;
    }
    let branch = (0..h.vertex_count()).find(|&v| colors.get(v).is_none());
    let Some(v) = branch else {
        return true;
    };
    for color in [Color::One, Color::Two] {
        colors.set(v, Some(color));
        if search(h, colors) {
            return true;
        }
        colors.set(v, None);
    }
    for v in trail {
        colors.set(v, None);
    }
    false
}

/// Repeatedly forces vertices until a fixpoint; returns false on a
/// conflict. Forced vertices are recorded on the trail for undo.
fn propagate(h: &Hypergraph, colors: &mut PartialColoring, trail: &mut Vec<VertexId>) -> bool {
    loop {
        let mut changed = false;
        for edge in h.edges() {
            let mut ones = 0usize;
            let mut twos = 0usize;
            let mut open = None;
            let mut open_count = 0usize;
            for &v in edge {
                match colors.get(v) {
                    Some(Color::One) => ones += 1,
                    Some(Color::Two) => twos += 1,
                    None => {
                        open = Some(v);
                        open_count += 1;
                    }
                }
            }
            if open_count == 0 && (ones == 0 || twos == 0) {
                return false;
            }
            if open_count == 1 && (ones == 0 || twos == 0) {
                let v = open.expect("one open vertex");
                let forced = if ones == 0 { Color::One } else { Color::Two };
                colors.set(v, Some(forced));
                trail.push(v);
                changed = true;
            }
        }
        if !changed {
            return true;
        }
    }
}

/// Outcome of the two-free-vertex procedure: the solver's coloring with
/// its free vertex, and the alternate coloring freeing a second vertex.
#[derive(Clone, Debug)]
pub struct TwoFreeOutcome {
    pub primary: ColoringCertificate,
    pub alternate_vertex: VertexId,
    pub alternate: ColoringCertificate,
    pub solver_trace: ReductionTrace,
}

/// For a connected 3-uniform hypergraph with no isolated vertex, fewer
/// edges than vertices and maximum degree 3, produces two distinct free
/// vertices with verifying certificates.
///
/// The first comes from the free-variable solver on the corresponding
/// instance. Scanning the edges away from it, each contributes exactly
/// one vertex that is the unique one of its color, so at least two
/// vertices are never unique; un-coloring such a vertex and giving the
/// first one its color is again a valid coloring.
pub fn lemma_two_free(h: &Hypergraph) -> Result<TwoFreeOutcome, ColorerError> {
    precondition(h.is_uniform(3), "hypergraph must be 3-uniform")?;
    precondition(h.is_connected(), "hypergraph must be connected")?;
    precondition(
        h.degrees().iter().all(|&d| d >= 1),
        "no isolated vertices allowed",
    )?;
    precondition(
        h.edge_count() < h.vertex_count(),
        "need fewer edges than vertices",
    )?;
    precondition(h.max_degree() <= 3, "maximum degree must be at most 3")?;

    let instance = instance_from_hypergraph(h, true)
        .map_err(|e| ColorerError::Internal(format!("conversion failed: {e}")))?;
    let solved = solver::solve_free(&instance)
        .map_err(|e| ColorerError::Internal(format!("free-variable solve failed: {e}")))?;
    let coloring = coloring_from_assignment(&solved.certificate.assignment);
    let v = solved
        .certificate
        .free_var
        .expect("solver designates a free variable");

    let excluded = h.edges_with(v);
    let fixed = oracle::fixed_vertices(h, &coloring, &excluded)
        .map_err(|e| ColorerError::Internal(format!("fixed-vertex scan failed: {e}")))?;
    let non_fixed: Vec<VertexId> = (0..h.vertex_count())
        .filter(|w| !fixed.contains(w))
        .collect();
    require(
        non_fixed.len() >= 2,
        "at most |E| vertices are fixed, leaving two non-fixed",
    )?;
    let u = non_fixed
        .iter()
        .copied()
        .find(|&w| w != v)
        .expect("two non-fixed vertices include one besides the free one");

    let u_color = coloring.get(u).expect("the second free vertex is colored");
    let mut alternate = coloring.clone();
    alternate.set(u, None);
    alternate.set(v, Some(u_color));

    let primary = ColoringCertificate {
        coloring,
        free_vertex: Some(v),
    };
    let alternate = ColoringCertificate {
        coloring: alternate,
        free_vertex: Some(u),
    };
    for (name, cert) in [("primary", &primary), ("alternate", &alternate)] {
        let verdict = oracle::verify_coloring_certificate(h, cert);
        if !verdict.ok {
            return internal(format!("{name} certificate failed verification"));
        }
    }
    Ok(TwoFreeOutcome {
        primary,
        alternate_vertex: u,
        alternate,
        solver_trace: solved.trace,
    })
}

/// Per-edge unique-color vertex and its per-vertex inverse. Both maps
/// are total bijections exactly when the coloring fixes every vertex.
#[derive(Clone, Debug)]
pub struct StarMaps {
    pub v_star: Vec<Option<VertexId>>,
    pub e_star: Vec<Option<EdgeId>>,
}

impl StarMaps {
    pub fn is_total(&self) -> bool {
        self.v_star.iter().all(|x| x.is_some()) && self.e_star.iter().all(|x| x.is_some())
    }
}

pub fn build_star_maps(h: &Hypergraph, c: &PartialColoring) -> StarMaps {
    let mut v_star = Vec::with_capacity(h.edge_count());
    for edge in h.edges() {
        let mut ones = Vec::new();
        let mut twos = Vec::new();
        for &v in edge {
            match c.get(v) {
                Some(Color::One) => ones.push(v),
                Some(Color::Two) => twos.push(v),
                None => {}
            }
        }
        let mut unique = Vec::new();
        if ones.len() == 1 {
            unique.push(ones[0]);
        }
        if twos.len() == 1 {
            unique.push(twos[0]);
        }
        v_star.push(if unique.len() == 1 {
            Some(unique[0])
        } else {
            None
        });
    }
    let mut owners: Vec<Vec<EdgeId>> = vec![Vec::new(); h.vertex_count()];
    for (e, &vs) in v_star.iter().enumerate() {
        if let Some(u) = vs {
            owners[u].push(e);
        }
    }
    let e_star = owners
        .into_iter()
        .map(|es| if es.len() == 1 { Some(es[0]) } else { None })
        .collect();
    StarMaps { v_star, e_star }
}

/// Which of the two derived hypergraphs a component or edge belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    fn idx(self) -> usize {
        match self {
            Side::One => 0,
            Side::Two => 1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.idx() + 1)
    }
}

/// Where a derived edge came from: the 4-edge of the original hypergraph
/// and the apex vertex removed from it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DerivedEdgeOrigin {
    pub source_edge: EdgeId,
    pub apex: VertexId,
}

/// The two derived 3-regular 3-uniform hypergraphs living on the color
/// classes of an all-fixed coloring, with provenance back to the 4-edges.
#[derive(Clone, Debug)]
pub struct DerivedPair {
    pub h1: Hypergraph,
    pub h2: Hypergraph,
    /// Vertex of `h1` at index i is this vertex of the original.
    pub v1: Vec<VertexId>,
    pub v2: Vec<VertexId>,
    /// Per `h1` edge, its source in the original hypergraph.
    pub origins1: Vec<DerivedEdgeOrigin>,
    pub origins2: Vec<DerivedEdgeOrigin>,
}

impl DerivedPair {
    pub fn side_hypergraph(&self, side: Side) -> &Hypergraph {
        match side {
            Side::One => &self.h1,
            Side::Two => &self.h2,
        }
    }

    pub fn side_vertices(&self, side: Side) -> &[VertexId] {
        match side {
            Side::One => &self.v1,
            Side::Two => &self.v2,
        }
    }

    pub fn origin(&self, side: Side, e: EdgeId) -> DerivedEdgeOrigin {
        match side {
            Side::One => self.origins1[e],
            Side::Two => self.origins2[e],
        }
    }

    /// The derived edge obtained by removing `u` from its unique-color
    /// edge. A color-2 vertex yields an edge of `h1` and vice versa.
    pub fn derived_edge_of(&self, u: VertexId) -> Option<(Side, EdgeId)> {
        if let Ok(rank) = self.v2.binary_search(&u) {
            return Some((Side::One, rank));
        }
        if let Ok(rank) = self.v1.binary_search(&u) {
            return Some((Side::Two, rank));
        }
        None
    }
}

/// Builds the derived pair for an all-fixed total coloring of a
/// 4-regular 4-uniform hypergraph.
pub fn derive_pair(
    h: &Hypergraph,
    c: &PartialColoring,
    maps: &StarMaps,
) -> Result<DerivedPair, ColorerError> {
    precondition(
        h.is_uniform(4) && h.is_regular(4),
        "hypergraph must be 4-regular 4-uniform",
    )?;
    precondition(c.is_total(), "coloring must be total")?;
    precondition(
        h.all_edges_bichromatic(c),
        "coloring must leave no edge monochromatic",
    )?;
    precondition(
        maps.is_total(),
        "every vertex must be fixed, with total star maps",
    )?;

    let v1: Vec<VertexId> = (0..h.vertex_count())
        .filter(|&v| c.get(v) == Some(Color::One))
        .collect();
    let v2: Vec<VertexId> = (0..h.vertex_count())
        .filter(|&v| c.get(v) == Some(Color::Two))
        .collect();
    // Counting degrees over one color class forces the classes to have
    // equal size in a 4-regular 4-uniform hypergraph with all vertices
    // fixed.
    require(
        v1.len() == v2.len(),
        "color classes of an all-fixed coloring have equal size",
    )?;

    let build = |class: &[VertexId],
                 apexes: &[VertexId]|
     -> Result<(Hypergraph, Vec<DerivedEdgeOrigin>), ColorerError> {
        let mut edges = Vec::with_capacity(apexes.len());
        let mut origins = Vec::with_capacity(apexes.len());
        for &u in apexes {
            let e = maps.e_star[u].expect("maps are total");
            let mut derived = Vec::with_capacity(3);
            for &w in h.edge(e) {
                if w == u {
                    continue;
                }
                match class.binary_search(&w) {
                    Ok(rank) => derived.push(rank),
                    Err(_) => {
                        return internal("derived edge leaves its color class");
                    }
                }
            }
            require(derived.len() == 3, "removing the apex leaves a 3-edge")?;
            edges.push(derived);
            origins.push(DerivedEdgeOrigin {
                source_edge: e,
                apex: u,
            });
        }
        let hg = Hypergraph::new(class.len(), edges)
            .map_err(|e| ColorerError::Internal(format!("derived hypergraph invalid: {e}")))?;
        require(
            hg.is_uniform(3) && hg.is_regular(3),
            "derived hypergraph must be 3-regular 3-uniform",
        )?;
        Ok((hg, origins))
    };

    let (h1, origins1) = build(&v1, &v2)?;
    let (h2, origins2) = build(&v2, &v1)?;
    Ok(DerivedPair {
        h1,
        h2,
        v1,
        v2,
        origins1,
        origins2,
    })
}

/// One step of the alternating component walk.
#[derive(Clone, Debug)]
pub struct WalkEntry {
    pub side: Side,
    pub component: usize,
    pub free_vertex: VertexId,
    /// The derived edge of `free_vertex`, deleted from the component the
    /// next entry lives in.
    pub removed_edge: (Side, EdgeId),
}

/// The walk taken while stitching one all-fixed component: the visited
/// sequence and the positions (l, k) where the component sequence first
/// repeats a (side, component) pair.
#[derive(Clone, Debug)]
pub struct WalkState {
    pub entries: Vec<WalkEntry>,
    pub cycle: (usize, usize),
}

/// Aggregate counters for one free-vertex solve.
#[derive(Clone, Debug, Default)]
pub struct ColorerStats {
    pub components: usize,
    pub early_exits: usize,
    pub walks: Vec<WalkState>,
    pub absorbed_components: usize,
    pub nae_solves: usize,
    pub nae_max_depth: usize,
    pub nae_cases: BTreeMap<CaseLabel, usize>,
}

impl ColorerStats {
    fn absorb_trace(&mut self, trace: &ReductionTrace) {
        self.nae_solves += 1;
        self.nae_max_depth = self.nae_max_depth.max(trace.max_depth);
        for (case, count) in trace.case_histogram() {
            *self.nae_cases.entry(case).or_insert(0) += count;
        }
    }
}

/// Produces a verified coloring certificate with exactly one uncolored
/// vertex for a 4-regular 4-uniform hypergraph.
pub fn solve_free_vertex(h: &Hypergraph) -> Result<ColoringCertificate, ColorerError> {
    solve_free_vertex_detailed(h).map(|(cert, _)| cert)
}

/// Like [`solve_free_vertex`], additionally reporting solve statistics.
pub fn solve_free_vertex_detailed(
    h: &Hypergraph,
) -> Result<(ColoringCertificate, ColorerStats), ColorerError> {
    precondition(h.is_uniform(4), "hypergraph must be 4-uniform")?;
    precondition(h.is_regular(4), "hypergraph must be 4-regular")?;
    let mut stats = ColorerStats::default();
    let comps = h.components();
    stats.components = comps.len();

    let mut work = PartialColoring::uncolored(h.vertex_count());
    let mut frees: Vec<VertexId> = Vec::new();
    for comp in &comps {
        let (sub, translation) = h.induced(comp);
        let base = match two_color(&sub) {
            Ok(base) => base,
            Err(ColorerError::NotTwoColorable) => {
                // Every 4-regular 4-uniform hypergraph is 2-colorable, so
                // an exhaustive miss means a broken input check.
                return internal("component of a 4-regular 4-uniform hypergraph not 2-colorable");
            }
            Err(e) => return Err(e),
        };
        let cert = free_vertex_connected(&sub, &base, &mut stats)?;
        for (cv, &pv) in translation.vertices().iter().enumerate() {
            work.set(pv, cert.coloring.get(cv));
        }
        frees.push(translation.parent_vertex(cert.free_vertex.expect("one free per component")));
    }
    frees.sort_unstable();
    // Keep the smallest free vertex. The others are free in their own
    // components, so any color keeps their edges bichromatic.
    for &f in &frees[1..] {
        work.set(f, Some(Color::One));
    }
    let certificate = ColoringCertificate {
        coloring: work,
        free_vertex: Some(frees[0]),
    };
    let verdict = oracle::verify_coloring_certificate(h, &certificate);
    if !verdict.ok {
        return internal(format!(
            "produced certificate failed verification: {}",
            verdict
                .reasons
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        ));
    }
    Ok((certificate, stats))
}

/// Runs the free-vertex construction for a connected 4-regular 4-uniform
/// hypergraph starting from the given total proper coloring.
pub fn free_vertex_from_coloring(
    h: &Hypergraph,
    base: &PartialColoring,
) -> Result<ColoringCertificate, ColorerError> {
    let mut stats = ColorerStats::default();
    free_vertex_from_coloring_detailed(h, base, &mut stats)
}

/// Detailed variant of [`free_vertex_from_coloring`] that accumulates
/// statistics into `stats`.
pub fn free_vertex_from_coloring_detailed(
    h: &Hypergraph,
    base: &PartialColoring,
    stats: &mut ColorerStats,
) -> Result<ColoringCertificate, ColorerError> {
    precondition(
        h.is_uniform(4) && h.is_regular(4),
        "hypergraph must be 4-regular 4-uniform",
    )?;
    precondition(h.is_connected(), "hypergraph must be connected")?;
    let cert = free_vertex_connected(h, base, stats)?;
    let verdict = oracle::verify_coloring_certificate(h, &cert);
    if !verdict.ok {
        return internal("produced certificate failed verification");
    }
    Ok(cert)
}

fn free_vertex_connected(
    h: &Hypergraph,
    base: &PartialColoring,
    stats: &mut ColorerStats,
) -> Result<ColoringCertificate, ColorerError> {
    precondition(base.is_total(), "base coloring must be total")?;
    precondition(
        h.all_edges_bichromatic(base),
        "base coloring must leave no edge monochromatic",
    )?;

    let fixed = oracle::fixed_vertices(h, base, &[])
        .map_err(|e| ColorerError::Internal(format!("fixed-vertex scan failed: {e}")))?;
    if let Some(v) = (0..h.vertex_count()).find(|v| !fixed.contains(v)) {
        // A vertex that is never the unique one of its color in any edge
        // can simply be uncolored.
        stats.early_exits += 1;
        let mut coloring = base.clone();
        coloring.set(v, None);
        return Ok(ColoringCertificate {
            coloring,
            free_vertex: Some(v),
        });
    }

    let maps = build_star_maps(h, base);
    require(
        maps.is_total(),
        "an all-fixed coloring forces total star maps",
    )?;
    let pair = derive_pair(h, base, &maps)?;
    let mut stitcher = Stitcher::new(h, &pair, stats);
    stitcher.run()
}

/// Working state for the walk-and-stitch phase of one component.
struct Stitcher<'a> {
    h: &'a Hypergraph,
    pair: &'a DerivedPair,
    comps: [Vec<HypergraphComponent>; 2],
    /// Per side, derived edge id to component index.
    edge_comp: [Vec<usize>; 2],
    /// Per side, derived vertex id to component index.
    vertex_comp: [Vec<usize>; 2],
    processed: [Vec<bool>; 2],
    work: PartialColoring,
    stats: &'a mut ColorerStats,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pick {
    Primary,
    Alternate,
}

/// Color assignments in original vertex space, applied in order.
type ColorWrites = Vec<(VertexId, Option<Color>)>;

impl<'a> Stitcher<'a> {
    fn new(h: &'a Hypergraph, pair: &'a DerivedPair, stats: &'a mut ColorerStats) -> Self {
        let comps = [pair.h1.components(), pair.h2.components()];
        let mut edge_comp = [vec![0; pair.h1.edge_count()], vec![0; pair.h2.edge_count()]];
        let mut vertex_comp = [
            vec![0; pair.h1.vertex_count()],
            vec![0; pair.h2.vertex_count()],
        ];
        for side in 0..2 {
            for (ci, comp) in comps[side].iter().enumerate() {
                for &e in &comp.edges {
                    edge_comp[side][e] = ci;
                }
                for &v in &comp.vertices {
                    vertex_comp[side][v] = ci;
                }
            }
        }
        let processed = [vec![false; comps[0].len()], vec![false; comps[1].len()]];
        Stitcher {
            h,
            pair,
            comps,
            edge_comp,
            vertex_comp,
            processed,
            work: PartialColoring::uncolored(h.vertex_count()),
            stats,
        }
    }

    fn derived_edge_of(&self, u: VertexId) -> Result<(Side, EdgeId), ColorerError> {
        self.pair
            .derived_edge_of(u)
            .ok_or_else(|| ColorerError::Internal(format!("vertex {u} is in neither color class")))
    }

    fn component_of_edge(&self, side: Side, e: EdgeId) -> usize {
        self.edge_comp[side.idx()][e]
    }

    /// Solves one derived component minus one of its edges by applying
    /// the two-free-vertex procedure to every resulting sub-component.
    /// Returns the smallest admissible free vertex (skipping `forbidden`
    /// if given) together with the color writes, in original vertex
    /// space, that realize it; the free vertices of the other
    /// sub-components are colored away in those writes.
    fn solve_component_minus_edge(
        &mut self,
        side: Side,
        comp_idx: usize,
        removed: EdgeId,
        forbidden: Option<VertexId>,
    ) -> Result<(VertexId, ColorWrites), ColorerError> {
        let side_h = self.pair.side_hypergraph(side);
        let side_vertices = self.pair.side_vertices(side);
        let comp = &self.comps[side.idx()][comp_idx];
        require(
            comp.edges.contains(&removed),
            "the deleted derived edge must lie in the target component",
        )?;
        let remaining = HypergraphComponent {
            vertices: comp.vertices.clone(),
            edges: comp
                .edges
                .iter()
                .copied()
                .filter(|&e| e != removed)
                .collect(),
        };
        let (sub, sub_t) = side_h.induced(&remaining);
        let sub_comps = sub.components();

        struct SubSolve {
            primary: VertexId,
            alternate: VertexId,
            primary_colors: Vec<(VertexId, Option<Color>)>,
            alternate_colors: Vec<(VertexId, Option<Color>)>,
        }
        let mut solves = Vec::with_capacity(sub_comps.len());
        for sc in &sub_comps {
            let (piece, piece_t) = sub.induced(sc);
            // Each sub-component keeps all degrees between 1 and 3 and,
            // containing a vertex of the deleted edge, has a vertex of
            // degree at most 2, hence fewer edges than vertices.
            let outcome = match lemma_two_free(&piece) {
                Ok(outcome) => outcome,
                Err(e) => {
                    return internal(format!("derived sub-component rejected: {e}"));
                }
            };
            self.stats.absorb_trace(&outcome.solver_trace);
            let to_original =
                |v: VertexId| side_vertices[sub_t.parent_vertex(piece_t.parent_vertex(v))];
            let lift = |cert: &ColoringCertificate| {
                cert.coloring
                    .colors()
                    .iter()
                    .enumerate()
                    .map(|(v, &c)| (to_original(v), c))
                    .collect::<Vec<_>>()
            };
            solves.push(SubSolve {
                primary: to_original(outcome.primary.free_vertex.expect("primary free")),
                alternate: to_original(outcome.alternate_vertex),
                primary_colors: lift(&outcome.primary),
                alternate_colors: lift(&outcome.alternate),
            });
        }

        let mut chosen: Option<(VertexId, usize, Pick)> = None;
        for (idx, solve) in solves.iter().enumerate() {
            for (vertex, pick) in [
                (solve.primary, Pick::Primary),
                (solve.alternate, Pick::Alternate),
            ] {
                if Some(vertex) == forbidden {
                    continue;
                }
                if chosen.is_none_or(|(best, _, _)| vertex < best) {
                    chosen = Some((vertex, idx, pick));
                }
            }
        }
        let Some((free, chosen_idx, pick)) = chosen else {
            return internal("no admissible free vertex in the recolored component");
        };
        let mut writes = Vec::new();
        for (idx, solve) in solves.into_iter().enumerate() {
            let not_picked = idx != chosen_idx;
            let primary = solve.primary;
            let colors = if idx == chosen_idx && pick == Pick::Alternate {
                solve.alternate_colors
            } else {
                solve.primary_colors
            };
            writes.extend(colors);
            if not_picked {
                // This sub-component's free vertex is not the step's
                // pick; being free, any color keeps its edges bichromatic.
                writes.push((primary, Some(Color::One)));
            }
        }
        Ok((free, writes))
    }

    fn apply_writes(&mut self, writes: &[(VertexId, Option<Color>)]) {
        for &(vertex, color) in writes {
            self.work.set(vertex, color);
        }
    }

    /// Colors the vertex so the given original 4-edge sees both colors
    /// among currently colored vertices.
    fn color_to_fix(&self, work: &PartialColoring, e4: EdgeId) -> Color {
        let mut one = false;
        let mut two = false;
        for &w in self.h.edge(e4) {
            match work.get(w) {
                Some(Color::One) => one = true,
                Some(Color::Two) => two = true,
                None => {}
            }
        }
        if one && !two {
            Color::Two
        } else {
            Color::One
        }
    }

    fn mark_processed(&mut self, side: Side, comp: usize) {
        self.processed[side.idx()][comp] = true;
    }

    fn run(&mut self) -> Result<ColoringCertificate, ColorerError> {
        let free = self.walk()?;
        let free = self.absorb_all(free)?;
        let uncolored = self.work.uncolored_vertices();
        require(
            uncolored.len() == 1 && uncolored[0] == free,
            "stitching must leave exactly the free vertex uncolored",
        )?;
        Ok(ColoringCertificate {
            coloring: self.work.clone(),
            free_vertex: Some(free),
        })
    }

    /// Explores the alternating component walk until a (side, component)
    /// pair repeats, then commits the cycle part: each component is
    /// colored without the derived edge of the previous step's free
    /// vertex, the starting component last and with a free vertex
    /// different from the anchor. Returns the final free vertex.
    fn walk(&mut self) -> Result<VertexId, ColorerError> {
        let anchor = self.pair.side_vertices(Side::One)[self.comps[0][0].vertices[0]];
        let mut seq: Vec<(Side, usize, VertexId)> = vec![(Side::One, 0, anchor)];
        let mut seen: std::collections::HashMap<(Side, usize), usize> =
            std::collections::HashMap::new();
        seen.insert((Side::One, 0), 0);

        let cycle_start;
        loop {
            let (side, _, u) = *seq.last().expect("walk is never empty");
            let (eside, eid) = self.derived_edge_of(u)?;
            require(eside == side.other(), "derived edges alternate sides")?;
            let ecomp = self.component_of_edge(eside, eid);
            if let Some(&pos) = seen.get(&(eside, ecomp)) {
                cycle_start = pos;
                break;
            }
            require(
                seq.len() <= self.comps[0].len() + self.comps[1].len(),
                "walk length is bounded by the number of derived components",
            )?;
            // Exploration only: the writes are discarded.
            let (next, _) = self.solve_component_minus_edge(eside, ecomp, eid, None)?;
            seen.insert((eside, ecomp), seq.len());
            seq.push((eside, ecomp, next));
        }

        let entries: Vec<WalkEntry> = seq
            .iter()
            .map(|&(side, component, free_vertex)| {
                Ok(WalkEntry {
                    side,
                    component,
                    free_vertex,
                    removed_edge: self.derived_edge_of(free_vertex)?,
                })
            })
            .collect::<Result<_, ColorerError>>()?;
        self.stats.walks.push(WalkState {
            entries,
            cycle: (cycle_start, seq.len()),
        });

        // Commit from the cycle start; everything before it was only
        // exploration.
        for t in cycle_start + 1..seq.len() {
            let (side_t, comp_t, expected) = seq[t];
            let (eside, eid) = self.derived_edge_of(seq[t - 1].2)?;
            require(
                eside == side_t && self.component_of_edge(eside, eid) == comp_t,
                "walk step must recolor the component of the removed edge",
            )?;
            let (got, writes) = self.solve_component_minus_edge(side_t, comp_t, eid, None)?;
            self.apply_writes(&writes);
            require(
                got == expected,
                "committed walk step must match the exploration",
            )?;
            self.mark_processed(side_t, comp_t);
        }

        let (start_side, start_comp, anchor_vertex) = seq[cycle_start];
        let last_vertex = seq.last().expect("walk is never empty").2;
        let (eside, eid) = self.derived_edge_of(last_vertex)?;
        require(
            eside == start_side && self.component_of_edge(eside, eid) == start_comp,
            "cycle must close on the starting component",
        )?;
        let (final_free, writes) =
            self.solve_component_minus_edge(start_side, start_comp, eid, Some(anchor_vertex))?;
        self.apply_writes(&writes);
        require(
            final_free != anchor_vertex,
            "the closing free vertex must differ from the anchor",
        )?;
        self.mark_processed(start_side, start_comp);
        require(
            self.work.get(anchor_vertex).is_some(),
            "the closing step must color the anchor",
        )?;

        // The anchor's own 4-edge is the one edge not yet accounted for;
        // interchanging the colors of the starting component fixes it
        // without disturbing anything already settled.
        let (aside, aeid) = self.derived_edge_of(anchor_vertex)?;
        let anchor_e4 = self.pair.origin(aside, aeid).source_edge;
        if !edge_bichromatic(self.h.edge(anchor_e4), &self.work) {
            let vertices: Vec<VertexId> = self.comps[start_side.idx()][start_comp]
                .vertices
                .iter()
                .map(|&cv| self.pair.side_vertices(start_side)[cv])
                .collect();
            for v in vertices {
                if let Some(c) = self.work.get(v) {
                    self.work.set(v, Some(c.other()));
                }
            }
            require(
                edge_bichromatic(self.h.edge(anchor_e4), &self.work),
                "interchanging the starting component fixes the anchor edge",
            )?;
        }

        // Color the intermediate free vertices so each of their original
        // 4-edges sees both colors.
        for &(_, _, u) in &seq[cycle_start + 1..] {
            let (uside, ueid) = self.derived_edge_of(u)?;
            let e4 = self.pair.origin(uside, ueid).source_edge;
            let color = self.color_to_fix(&self.work, e4);
            self.work.set(u, Some(color));
        }
        Ok(final_free)
    }

    /// Brings in the remaining derived components one at a time through a
    /// connecting vertex whose derived edge leaves the processed region,
    /// superseding the current free vertex whenever a new one appears.
    fn absorb_all(&mut self, mut free: VertexId) -> Result<VertexId, ColorerError> {
        loop {
            if self.processed.iter().all(|side| side.iter().all(|&p| p)) {
                return Ok(free);
            }
            let mut connector = None;
            for v in 0..self.h.vertex_count() {
                let Some((vside, _)) = self.pair.derived_edge_of(v) else {
                    continue;
                };
                // The vertex belongs to the derived hypergraph of its own
                // color, the opposite of its derived edge's side.
                let own_side = vside.other();
                let child = self
                    .pair
                    .side_vertices(own_side)
                    .binary_search(&v)
                    .map_err(|_| ColorerError::Internal("vertex missing from its class".into()))?;
                if !self.processed[own_side.idx()][self.vertex_comp[own_side.idx()][child]] {
                    continue;
                }
                let (eside, eid) = self.derived_edge_of(v)?;
                let ecomp = self.component_of_edge(eside, eid);
                if self.processed[eside.idx()][ecomp] {
                    continue;
                }
                connector = Some((v, eside, eid, ecomp));
                break;
            }
            let Some((v, eside, eid, ecomp)) = connector else {
                return internal("no connecting vertex despite unprocessed components");
            };

            self.stats.absorbed_components += 1;
            let (new_free, writes) = self.solve_component_minus_edge(eside, ecomp, eid, None)?;
            self.apply_writes(&writes);

            let e4 = self.pair.origin(eside, eid).source_edge;
            if self.work.get(v).is_some() {
                if !edge_bichromatic(self.h.edge(e4), &self.work) {
                    self.interchange_processed();
                    require(
                        edge_bichromatic(self.h.edge(e4), &self.work),
                        "interchanging the processed region fixes the connecting edge",
                    )?;
                }
            } else {
                require(
                    v == free,
                    "the only uncolorable connector is the current free vertex",
                )?;
                let color = self.color_to_fix(&self.work, e4);
                self.work.set(v, Some(color));
            }

            // The previous free vertex is superseded; color it too.
            if free != new_free && self.work.get(free).is_none() {
                let (fside, feid) = self.derived_edge_of(free)?;
                let fe4 = self.pair.origin(fside, feid).source_edge;
                let color = self.color_to_fix(&self.work, fe4);
                self.work.set(free, Some(color));
            }
            free = new_free;
            self.mark_processed(eside, ecomp);
        }
    }

    /// Swaps the two colors on every colored vertex of every processed
    /// component, leaving fresh components untouched.
    fn interchange_processed(&mut self) {
        for side in [Side::One, Side::Two] {
            for (ci, comp) in self.comps[side.idx()].iter().enumerate() {
                if !self.processed[side.idx()][ci] {
                    continue;
                }
                for &cv in &comp.vertices {
                    let v = self.pair.side_vertices(side)[cv];
                    if let Some(c) = self.work.get(v) {
                        self.work.set(v, Some(c.other()));
                    }
                }
            }
        }
    }
}
