//! Colored trivalent spines of a once-punctured genus `g` surface.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recoupling::{Color, Triple};

/// A trivalent graph with `4g - 2` vertices and `6g - 3` colored edges.
///
/// `vertices[v]` lists the three edge indices meeting at `v`; a loop appears
/// twice at its vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredSpine {
    genus: u32,
    #[serde(rename = "edges")]
    edge_colors: Vec<Color>,
    vertices: Vec<[usize; 3]>,
}

impl ColoredSpine {
    /// Validates and builds a spine.
    pub fn new(genus: u32, edge_colors: Vec<Color>, vertices: Vec<[usize; 3]>) -> Result<Self> {
        let spine = ColoredSpine { genus, edge_colors, vertices };
        spine.validate()?;
        Ok(spine)
    }

    fn validate(&self) -> Result<()> {
        let g = self.genus as usize;
        if g == 0 {
            return Err(Error::Spine("genus must be at least 1".into()));
        }
        if self.edge_colors.len() != 6 * g - 3 {
            return Err(Error::Spine(format!(
                "genus {g} needs {} edges, got {}",
                6 * g - 3,
                self.edge_colors.len()
            )));
        }
        if self.vertices.len() != 4 * g - 2 {
            return Err(Error::Spine(format!(
                "genus {g} needs {} vertices, got {}",
                4 * g - 2,
                self.vertices.len()
            )));
        }
        let mut seen = vec![0u32; self.edge_colors.len()];
        for (v, slots) in self.vertices.iter().enumerate() {
            for &e in slots {
                let count = seen.get_mut(e).ok_or_else(|| {
                    Error::Spine(format!("vertex {v} refers to missing edge {e}"))
                })?;
                *count += 1;
            }
        }
        if let Some(e) = seen.iter().position(|&c| c != 2) {
            return Err(Error::Spine(format!(
                "edge {e} appears at {} vertex slots instead of 2",
                seen[e]
            )));
        }
        if !self.is_connected() {
            return Err(Error::Spine("graph is not connected".into()));
        }
        for tr in self.vertex_colors() {
            if !tr.is_admissible() {
                return Err(Error::Admissibility(tr.a, tr.b, tr.c));
            }
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut ends: Vec<Vec<usize>> = vec![Vec::new(); self.edge_colors.len()];
        for (v, slots) in self.vertices.iter().enumerate() {
            for &e in slots {
                ends[e].push(v);
            }
        }
        let mut reached = vec![false; n];
        let mut stack = vec![0];
        reached[0] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.vertices[v] {
                for &w in &ends[e] {
                    if !reached[w] {
                        reached[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        reached.into_iter().all(|r| r)
    }

    /// Builds the vertex table from edge endpoints, all colors 0.
    fn from_endpoints(genus: u32, ends: &[(usize, usize)], n_vertices: usize) -> Self {
        let mut slots: Vec<Vec<usize>> = vec![Vec::new(); n_vertices];
        for (e, &(x, y)) in ends.iter().enumerate() {
            slots[x].push(e);
            slots[y].push(e);
        }
        let vertices = slots
            .into_iter()
            .map(|s| <[usize; 3]>::try_from(s).expect("trivalent by construction"))
            .collect();
        let spine = ColoredSpine { genus, edge_colors: vec![0; ends.len()], vertices };
        debug_assert!(spine.validate().is_ok());
        spine
    }

    /// The theta-chain: `g` theta graphs in a row, each consecutive pair joined
    /// by a bridge whose ends subdivide one edge of each theta.
    pub fn canonical(genus: u32) -> Result<Self> {
        if genus == 0 {
            return Err(Error::Genus(0, "a spine needs genus at least 1".into()));
        }
        let g = genus as usize;
        let mut ends = Vec::with_capacity(6 * g - 3);
        // theta j has vertices 2j, 2j+1; junction j has vertices 2g+2j (on theta j), 2g+2j+1 (on theta j+1)
        for j in 0..g {
            let (a, b) = (2 * j, 2 * j + 1);
            let right = (j + 1 < g).then(|| 2 * g + 2 * j);
            let left = (j > 0).then(|| 2 * g + 2 * (j - 1) + 1);
            ends.push((a, b));
            match left {
                Some(m) => ends.extend([(a, m), (m, b)]),
                None => ends.push((a, b)),
            }
            match right {
                Some(m) => ends.extend([(a, m), (m, b)]),
                None => ends.push((a, b)),
            }
        }
        for j in 0..g - 1 {
            ends.push((2 * g + 2 * j, 2 * g + 2 * j + 1));
        }
        Ok(Self::from_endpoints(genus, &ends, 4 * g - 2))
    }

    /// A cycle on `4g - 2` vertices plus the `2g - 1` chords joining opposite
    /// vertices. For `g = 2` this is the complete bipartite graph `K_{3,3}`.
    pub fn ring(genus: u32) -> Result<Self> {
        if genus == 0 {
            return Err(Error::Genus(0, "a spine needs genus at least 1".into()));
        }
        let n = 4 * genus as usize - 2;
        let mut ends: Vec<(usize, usize)> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        ends.extend((0..n / 2).map(|v| (v, v + n / 2)));
        Ok(Self::from_endpoints(genus, &ends, n))
    }

    /// The same graph with new edge colors.
    pub fn with_colors(&self, colors: Vec<Color>) -> Result<Self> {
        Self::new(self.genus, colors, self.vertices.clone())
    }

    /// The same graph with every edge colored `k`.
    pub fn with_uniform_color(&self, k: Color) -> Result<Self> {
        self.with_colors(vec![k; self.edge_colors.len()])
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn edge_colors(&self) -> &[Color] {
        &self.edge_colors
    }

    pub fn vertices(&self) -> &[[usize; 3]] {
        &self.vertices
    }

    /// Color triples at the vertices, in slot order.
    pub fn vertex_colors(&self) -> impl Iterator<Item = Triple> + '_ {
        self.vertices.iter().map(|s| {
            Triple::new(self.edge_colors[s[0]], self.edge_colors[s[1]], self.edge_colors[s[2]])
        })
    }

    /// Multiplicity of each edge color.
    pub fn color_counts(&self) -> BTreeMap<Color, u32> {
        let mut out = BTreeMap::new();
        for &k in &self.edge_colors {
            *out.entry(k).or_insert(0) += 1;
        }
        out
    }

    /// Multiplicity of each vertex color triple, sorted ascending within the triple.
    pub fn vertex_counts(&self) -> BTreeMap<[Color; 3], u32> {
        let mut out = BTreeMap::new();
        for tr in self.vertex_colors() {
            let mut key = [tr.a, tr.b, tr.c];
            key.sort_unstable();
            *out.entry(key).or_insert(0) += 1;
        }
        out
    }

    pub fn max_color(&self) -> Color {
        self.edge_colors.iter().copied().max().unwrap_or(0)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ColoredSpine =
            serde_json::from_str(text).map_err(|e| Error::Spine(format!("bad spine file: {e}")))?;
        raw.validate()?;
        Ok(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spine serializes")
    }
}
