//! Explicit objects: the tiling of ℍ², the walk `ℤ → T₃`, the map
//! `ℍ^d → (ℍ²)^{d−1}` with its cover, `D`-combs, and nerves.

pub mod brady_farb;
pub mod dcomb;
mod map;
pub mod nerve;
pub mod tiling;
pub mod walk;

pub use crate::spaces::build_comb;
pub use brady_farb::{brady_farb, hd_cover, HdCover, HdCoverParams};
pub use dcomb::{level_bound, DComb, Spine};
pub use map::{compose, product_map, MapRecord, Provenance};
pub use nerve::{nerve_map, NerveComplex};
pub use tiling::{build_h2_tiling, tiling_to_decomposition, Tile, TileKey, TileKind, Tiling, TilingWindow};
pub use walk::{tree_walk, tree_walk_window, TreeWalk, WalkVertex};
