//! Hypergraphs as a vertex count plus a multiset of vertex-set edges,
//! partial 2-colorings, and the structural queries the colorer needs.

use std::fmt;

use crate::error::ModelError;
use crate::union_find::UnionFind;

/// Dense vertex identifier, `0..vertex_count`.
pub type VertexId = usize;
/// Position of an edge within a hypergraph's edge list.
pub type EdgeId = usize;

/// One of the two colors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Color {
    One,
    Two,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::One => Color::Two,
            Color::Two => Color::One,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Color::One => 1,
            Color::Two => 2,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Colors with an explicit uncolored state, one slot per vertex.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PartialColoring {
    colors: Vec<Option<Color>>,
}

impl PartialColoring {
    pub fn uncolored(vertex_count: usize) -> Self {
        PartialColoring {
            colors: vec![None; vertex_count],
        }
    }

    pub fn from_colors(colors: Vec<Option<Color>>) -> Self {
        PartialColoring { colors }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn get(&self, v: VertexId) -> Option<Color> {
        self.colors[v]
    }

    pub fn set(&mut self, v: VertexId, color: Option<Color>) {
        self.colors[v] = color;
    }

    pub fn colors(&self) -> &[Option<Color>] {
        &self.colors
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(|c| c.is_some())
    }

    pub fn uncolored_vertices(&self) -> Vec<VertexId> {
        (0..self.colors.len())
            .filter(|&v| self.colors[v].is_none())
            .collect()
    }

    /// Swaps the two colors everywhere; uncolored slots stay uncolored.
    pub fn interchange(&mut self) {
        for c in &mut self.colors {
            *c = c.map(Color::other);
        }
    }
}

/// A 2-coloring with its designated free vertex. With `free_vertex`
/// present, that vertex is the only uncolored one and every edge still
/// sees both colors; absent, the coloring is total.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ColoringCertificate {
    pub coloring: PartialColoring,
    pub free_vertex: Option<VertexId>,
}

/// A component of a hypergraph: one connectivity class of vertices plus
/// the edges lying inside it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HypergraphComponent {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

/// Maps vertex and edge indices of a derived hypergraph back to its
/// parent. Mirrors [`crate::nae::InstanceTranslation`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HypergraphTranslation {
    vertex_to_parent: Vec<VertexId>,
    edge_to_parent: Vec<Option<EdgeId>>,
}

impl HypergraphTranslation {
    pub fn new(vertex_to_parent: Vec<VertexId>, edge_to_parent: Vec<Option<EdgeId>>) -> Self {
        debug_assert!(vertex_to_parent.windows(2).all(|w| w[0] < w[1]));
        HypergraphTranslation {
            vertex_to_parent,
            edge_to_parent,
        }
    }

    pub fn parent_vertex(&self, v: VertexId) -> VertexId {
        self.vertex_to_parent[v]
    }

    pub fn parent_edge(&self, e: EdgeId) -> Option<EdgeId> {
        self.edge_to_parent[e]
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertex_to_parent
    }

    pub fn child_vertex(&self, parent: VertexId) -> Option<VertexId> {
        self.vertex_to_parent.binary_search(&parent).ok()
    }

    pub fn compose(&self, inner: &HypergraphTranslation) -> HypergraphTranslation {
        HypergraphTranslation {
            vertex_to_parent: inner
                .vertex_to_parent
                .iter()
                .map(|&v| self.vertex_to_parent[v])
                .collect(),
            edge_to_parent: inner
                .edge_to_parent
                .iter()
                .map(|&e| e.and_then(|e| self.edge_to_parent[e]))
                .collect(),
        }
    }

    pub fn lift_coloring(
        &self,
        child: &PartialColoring,
        parent_vertex_count: usize,
    ) -> PartialColoring {
        let mut out = PartialColoring::uncolored(parent_vertex_count);
        for (v, &parent) in self.vertex_to_parent.iter().enumerate() {
            out.set(parent, child.get(v));
        }
        out
    }
}

/// A finite vertex set together with a multiset of edges. Every edge is a
/// set: its stored vertex list is sorted and repetition-free. Duplicate
/// edges across the multiset are permitted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Hypergraph {
    vertex_count: usize,
    edges: Vec<Vec<VertexId>>,
}

impl Hypergraph {
    pub fn new(vertex_count: usize, edges: Vec<Vec<VertexId>>) -> Result<Self, ModelError> {
        let mut normalized = Vec::with_capacity(edges.len());
        for edge in edges {
            let mut edge = edge;
            edge.sort_unstable();
            for pair in edge.windows(2) {
                if pair[0] == pair[1] {
                    return Err(ModelError::RepeatedVertex { vertex: pair[0] });
                }
            }
            if let Some(&v) = edge.last() {
                if v >= vertex_count {
                    return Err(ModelError::VertexOutOfRange {
                        vertex: v,
                        count: vertex_count,
                    });
                }
            }
            normalized.push(edge);
        }
        Ok(Hypergraph {
            vertex_count,
            edges: normalized,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<VertexId>] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &[VertexId] {
        &self.edges[e]
    }

    /// Number of edges containing the vertex; duplicate edges each count.
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .filter(|e| e.binary_search(&v).is_ok())
            .count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut out = vec![0; self.vertex_count];
        for edge in &self.edges {
            for &v in edge {
                out[v] += 1;
            }
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn is_uniform(&self, k: usize) -> bool {
        self.edges.iter().all(|e| e.len() == k)
    }

    pub fn is_regular(&self, k: usize) -> bool {
        self.degrees().into_iter().all(|d| d == k)
    }

    pub fn edges_with(&self, v: VertexId) -> Vec<EdgeId> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].binary_search(&v).is_ok())
            .collect()
    }

    /// Connectivity classes (adjacency through shared edges), ordered by
    /// smallest contained vertex. Isolated vertices form edge-free
    /// singletons.
    pub fn components(&self) -> Vec<HypergraphComponent> {
        let mut uf = UnionFind::new(self.vertex_count);
        for edge in &self.edges {
            for pair in edge.windows(2) {
                uf.union(pair[0], pair[1]);
            }
        }
        let mut comp_vertices: Vec<Vec<VertexId>> = Vec::new();
        let mut root_to_comp = vec![usize::MAX; self.vertex_count];
        for v in 0..self.vertex_count {
            let root = uf.find(v);
            if root_to_comp[root] == usize::MAX {
                root_to_comp[root] = comp_vertices.len();
                comp_vertices.push(Vec::new());
            }
            comp_vertices[root_to_comp[root]].push(v);
        }
        let mut components: Vec<HypergraphComponent> = comp_vertices
            .into_iter()
            .map(|vertices| HypergraphComponent {
                vertices,
                edges: Vec::new(),
            })
            .collect();
        let mut vertex_to_comp = vec![usize::MAX; self.vertex_count];
        for (idx, comp) in components.iter().enumerate() {
            for &v in &comp.vertices {
                vertex_to_comp[v] = idx;
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            if let Some(&v) = edge.first() {
                components[vertex_to_comp[v]].edges.push(e);
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    pub fn delete_edge(&self, e: EdgeId) -> (Hypergraph, HypergraphTranslation) {
        let mut edges = self.edges.clone();
        edges.remove(e);
        let edge_to_parent = (0..self.edges.len())
            .filter(|&i| i != e)
            .map(Some)
            .collect();
        (
            Hypergraph {
                vertex_count: self.vertex_count,
                edges,
            },
            HypergraphTranslation::new((0..self.vertex_count).collect(), edge_to_parent),
        )
    }

    pub fn add_edge(
        &self,
        edge: Vec<VertexId>,
    ) -> Result<(Hypergraph, HypergraphTranslation), ModelError> {
        let mut with = self.edges.clone();
        with.push(edge);
        let h = Hypergraph::new(self.vertex_count, with)?;
        let mut edge_to_parent: Vec<Option<EdgeId>> = (0..self.edges.len()).map(Some).collect();
        edge_to_parent.push(None);
        Ok((
            h,
            HypergraphTranslation::new((0..self.vertex_count).collect(), edge_to_parent),
        ))
    }

    /// The sub-hypergraph induced by a component, with dense re-indexing.
    pub fn induced(&self, comp: &HypergraphComponent) -> (Hypergraph, HypergraphTranslation) {
        let mut child_of = vec![usize::MAX; self.vertex_count];
        for (i, &v) in comp.vertices.iter().enumerate() {
            child_of[v] = i;
        }
        let edges = comp
            .edges
            .iter()
            .map(|&e| self.edges[e].iter().map(|&v| child_of[v]).collect())
            .collect();
        (
            Hypergraph {
                vertex_count: comp.vertices.len(),
                edges,
            },
            HypergraphTranslation::new(
                comp.vertices.clone(),
                comp.edges.iter().map(|&e| Some(e)).collect(),
            ),
        )
    }

    /// True when every edge sees both colors among its colored vertices.
    pub fn all_edges_bichromatic(&self, c: &PartialColoring) -> bool {
        self.edges.iter().all(|edge| edge_bichromatic(edge, c))
    }
}

/// True when the edge has at least one colored vertex of each color.
pub fn edge_bichromatic(edge: &[VertexId], c: &PartialColoring) -> bool {
    let mut one = false;
    let mut two = false;
    for &v in edge {
        match c.get(v) {
            Some(Color::One) => one = true,
            Some(Color::Two) => two = true,
            None => {}
        }
    }
    one && two
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_are_normalized_sets() {
        let h = Hypergraph::new(4, vec![vec![2, 0, 3]]).unwrap();
        assert_eq!(h.edge(0), &[0, 2, 3]);
        let err = Hypergraph::new(4, vec![vec![1, 1, 2]]).unwrap_err();
        assert!(matches!(err, ModelError::RepeatedVertex { vertex: 1 }));
        let err = Hypergraph::new(2, vec![vec![0, 5]]).unwrap_err();
        assert!(matches!(
            err,
            ModelError::VertexOutOfRange { vertex: 5, .. }
        ));
    }

    #[test]
    fn duplicate_edges_both_count() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.degree(0), 2);
    }

    #[test]
    fn components_partition_vertices_and_edges() {
        let h = Hypergraph::new(7, vec![vec![0, 1, 2], vec![2, 3, 4], vec![5, 6]]).unwrap();
        let comps = h.components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].vertices, vec![0, 1, 2, 3, 4]);
        assert_eq!(comps[0].edges, vec![0, 1]);
        assert_eq!(comps[1].vertices, vec![5, 6]);
    }

    #[test]
    fn delete_then_add_restores_edge_multiset() {
        let h = Hypergraph::new(5, vec![vec![0, 1, 2], vec![1, 3, 4]]).unwrap();
        let (h2, _) = h.delete_edge(0);
        let (h3, _) = h2.add_edge(vec![0, 1, 2]).unwrap();
        let mut a = h.edges().to_vec();
        let mut b = h3.edges().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn induced_reindexes() {
        let h = Hypergraph::new(6, vec![vec![1, 3, 5]]).unwrap();
        let comps = h.components();
        let comp = comps.iter().find(|c| !c.edges.is_empty()).unwrap();
        let (sub, t) = h.induced(comp);
        assert_eq!(sub.vertex_count(), 3);
        assert_eq!(sub.edge(0), &[0, 1, 2]);
        assert_eq!(t.parent_vertex(2), 5);
    }
}
