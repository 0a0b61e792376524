//! The 3-regular tree T₃ as the Cayley graph of Z/2 * Z/2 * Z/2.
//!
//! Vertices are reduced words over `{0, 1, 2}` with no letter repeated twice
//! in a row; the root is the empty word.

pub type Word = Box<[u8]>;

pub fn is_reduced(w: &[u8]) -> bool {
    w.iter().all(|&a| a < 3) && w.windows(2).all(|p| p[0] != p[1])
}

pub fn common_prefix(u: &[u8], v: &[u8]) -> usize {
    u.iter().zip(v).take_while(|(a, b)| a == b).count()
}

/// Tree distance `|u| + |v| − 2·lcp(u, v)`.
pub fn word_distance(u: &[u8], v: &[u8]) -> usize {
    u.len() + v.len() - 2 * common_prefix(u, v)
}

/// All reduced words of length at most `radius`, in breadth-first order with
/// children in increasing letter order.
pub fn ball_words(radius: u32) -> Vec<Word> {
    let mut out: Vec<Word> = vec![Vec::new().into_boxed_slice()];
    let mut start = 0;
    for _ in 0..radius {
        let end = out.len();
        for i in start..end {
            let last = out[i].last().copied();
            for a in 0..3u8 {
                if Some(a) != last {
                    let mut w = out[i].to_vec();
                    w.push(a);
                    out.push(w.into_boxed_slice());
                }
            }
        }
        start = end;
    }
    out
}

/// Number of vertices of T₃ within distance `n` of a vertex.
pub fn ball_count(n: u32) -> u64 {
    if n == 0 {
        1
    } else {
        3 * (1u64 << n) - 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_sizes() {
        for n in 0..8 {
            let b = ball_words(n);
            assert_eq!(b.len() as u64, ball_count(n));
            assert!(b.iter().all(|w| is_reduced(w)));
        }
    }

    #[test]
    fn distance_examples() {
        assert_eq!(word_distance(&[0, 1], &[0, 2]), 2);
        assert_eq!(word_distance(&[], &[1, 0, 1]), 3);
        assert_eq!(word_distance(&[1, 0], &[2]), 3);
    }
}
