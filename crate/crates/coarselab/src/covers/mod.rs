//! Covers and coloured decompositions of a space window.
//!
//! Pieces are sorted lists of point indices into a [`SpaceGraph`]. The space
//! itself is passed alongside to every operation.

mod amplify;
mod disjoint;
mod greedy;
mod neighborhood;
mod product;
mod pullback;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::SpaceGraph;

pub use amplify::kolmogorov_amplify;
pub use disjoint::{check_disjointness, min_same_colour_distance, r_multiplicity, Metric, Multiplicity, Violation};
pub use greedy::greedy_decomposition;
pub use neighborhood::{iterated_neighborhood, NeighborhoodChain};
pub use product::product_decomposition;
pub use pullback::{ball_cover, connected_components, pullback_cover, pullback_decomposition, refine_connected};

/// A family of non-empty point sets whose union is the whole window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub pieces: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

/// Pieces with colours in `0..=d`; same-colour pieces are meant to be at
/// model distance at least `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColoredDecomposition {
    pub pieces: Vec<Vec<u32>>,
    pub colour: Vec<u32>,
    pub r: f64,
    pub d: u32,
    /// True when pieces are pairwise disjoint.
    pub partition: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    /// Index of the input piece each piece was derived from, when the
    /// decomposition was produced from another cover.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub origin: Vec<usize>,
}

/// Which pieces contain each point, in CSR form.
#[derive(Clone, Debug)]
pub struct Membership {
    offsets: Vec<u32>,
    pieces: Vec<u32>,
}

impl Membership {
    pub fn new(n_points: usize, pieces: &[Vec<u32>]) -> Self {
        let mut count = vec![0u32; n_points + 1];
        for p in pieces {
            for &x in p {
                count[x as usize + 1] += 1;
            }
        }
        for i in 0..n_points {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut out = vec![0u32; count[n_points] as usize];
        for (k, p) in pieces.iter().enumerate() {
            for &x in p {
                out[fill[x as usize] as usize] = k as u32;
                fill[x as usize] += 1;
            }
        }
        Membership {
            offsets: count,
            pieces: out,
        }
    }

    /// Pieces containing point `p`, in increasing order.
    pub fn of(&self, p: usize) -> &[u32] {
        &self.pieces[self.offsets[p] as usize..self.offsets[p + 1] as usize]
    }
}

fn normalize(piece: &mut Vec<u32>) {
    piece.sort_unstable();
    piece.dedup();
}

impl Cover {
    pub fn new(mut pieces: Vec<Vec<u32>>) -> Self {
        pieces.iter_mut().for_each(normalize);
        Cover {
            pieces,
            labels: Vec::new(),
        }
    }

    /// The cover with the whole window as its only piece.
    pub fn whole(space: &SpaceGraph) -> Self {
        Cover::new(vec![(0..space.len() as u32).collect()])
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn membership(&self, space: &SpaceGraph) -> Membership {
        Membership::new(space.len(), &self.pieces)
    }

    /// Checks that pieces are non-empty, in range and cover the window.
    pub fn validate(&self, space: &SpaceGraph) -> Result<()> {
        let n = space.len();
        let mut seen = vec![false; n];
        for (k, p) in self.pieces.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::precondition(format!("piece {k} is empty"), vec![]));
            }
            for &x in p {
                space.check_index(x as usize)?;
                seen[x as usize] = true;
            }
        }
        match seen.iter().position(|s| !s) {
            Some(x) => Err(Error::precondition(format!("point {x} is not covered"), vec![x])),
            None => Ok(()),
        }
    }
}

impl ColoredDecomposition {
    pub fn new(pieces: Vec<Vec<u32>>, colour: Vec<u32>, r: f64) -> Self {
        let mut pieces = pieces;
        pieces.iter_mut().for_each(normalize);
        let d = colour.iter().copied().max().unwrap_or(0);
        let mut dec = ColoredDecomposition {
            pieces,
            colour,
            r,
            d,
            partition: true,
            labels: Vec::new(),
            origin: Vec::new(),
        };
        dec.partition = dec.is_disjoint_family();
        dec
    }

    fn is_disjoint_family(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.pieces.iter().flatten().all(|&x| seen.insert(x))
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn colours(&self) -> usize {
        self.d as usize + 1
    }

    pub fn membership(&self, space: &SpaceGraph) -> Membership {
        Membership::new(space.len(), &self.pieces)
    }

    /// The cover underlying the decomposition, forgetting colours.
    pub fn to_cover(&self) -> Cover {
        Cover {
            pieces: self.pieces.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Colour classes `X_i` as indicator vectors over the window.
    pub fn class_indicators(&self, n_points: usize) -> Vec<Vec<bool>> {
        let mut out = vec![vec![false; n_points]; self.colours()];
        for (k, p) in self.pieces.iter().enumerate() {
            let c = self.colour[k] as usize;
            for &x in p {
                out[c][x as usize] = true;
            }
        }
        out
    }

    /// Number of colour classes containing each point.
    pub fn coverage_counts(&self, n_points: usize) -> Vec<u32> {
        let cls = self.class_indicators(n_points);
        (0..n_points)
            .map(|x| cls.iter().filter(|c| c[x]).count() as u32)
            .collect()
    }

    /// Pieces of one colour.
    pub fn pieces_of_colour(&self, c: u32) -> impl Iterator<Item = usize> + '_ {
        (0..self.pieces.len()).filter(move |&k| self.colour[k] == c)
    }
}
