use super::ColoredDecomposition;
use crate::error::{Error, Result};
use crate::spaces::SpaceGraph;

/// Product decomposition with classes `Z_i = X_i × Y_i`: the pieces of colour
/// `i` are the products of colour-`i` pieces of the two factors.
///
/// `product` must be the two-factor product of the spaces `dx` and `dy` live
/// on. Coverage of the product requires every factor point to miss at most
/// `m` and `n` of the `m + n + 1` colours respectively; this is checked by
/// the caller, not assumed.
pub fn product_decomposition(
    dx: &ColoredDecomposition,
    dy: &ColoredDecomposition,
    product: &SpaceGraph,
) -> Result<ColoredDecomposition> {
    if dx.d != dy.d {
        return Err(Error::Arity(format!(
            "factor decompositions have {} and {} colours",
            dx.d + 1,
            dy.d + 1
        )));
    }
    let Some(factors) = product.factors() else {
        return Err(Error::Arity("target space is not a product".into()));
    };
    if factors.len() != 2 {
        return Err(Error::Arity(format!("product has {} factors, expected 2", factors.len())));
    }
    let mut pieces = Vec::new();
    let mut colour = Vec::new();
    let mut labels = Vec::new();
    for c in 0..=dx.d {
        for a in dx.pieces_of_colour(c) {
            for b in dy.pieces_of_colour(c) {
                let mut pts = Vec::with_capacity(dx.pieces[a].len() * dy.pieces[b].len());
                for &x in &dx.pieces[a] {
                    for &y in &dy.pieces[b] {
                        pts.push(product.tuple_index(&[x as usize, y as usize]) as u32);
                    }
                }
                pieces.push(pts);
                colour.push(c);
                labels.push(format!("{a}x{b}"));
            }
        }
    }
    let mut out = ColoredDecomposition::new(pieces, colour, dx.r.min(dy.r));
    out.d = dx.d;
    out.labels = labels;
    Ok(out)
}
