//! Fixed-width bitset rows used for adjacency matrices and search domains.
//!
//! A "row" is a `&[u64]` of `words_for(n)` words holding `n` bits. Rows are
//! kept in flat `Vec<u64>` buffers (one row per vertex) so graphs are a
//! single allocation per direction.

/// Number of 64-bit words needed for `n` bits.
pub fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

pub fn get(row: &[u64], i: usize) -> bool {
    row[i / 64] >> (i % 64) & 1 == 1
}

pub fn set(row: &mut [u64], i: usize) {
    row[i / 64] |= 1 << (i % 64);
}

pub fn clear(row: &mut [u64], i: usize) {
    row[i / 64] &= !(1 << (i % 64));
}

pub fn count(row: &[u64]) -> usize {
    row.iter().map(|w| w.count_ones() as usize).sum()
}

pub fn is_empty(row: &[u64]) -> bool {
    row.iter().all(|&w| w == 0)
}

/// True if `a` and `b` share a set bit.
pub fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

/// True if every bit of `a` is set in `b`.
pub fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

pub fn intersect_in_place(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x &= y;
    }
}

/// Index of the lowest set bit, if any.
pub fn first(row: &[u64]) -> Option<usize> {
    for (k, &w) in row.iter().enumerate() {
        if w != 0 {
            return Some(k * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

/// Iterate set bits in increasing order.
pub fn iter_ones(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(k * 64 + b)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_roundtrip() {
        let mut row = vec![0u64; words_for(130)];
        for i in [0, 1, 63, 64, 65, 127, 128, 129] {
            assert!(!get(&row, i));
            set(&mut row, i);
            assert!(get(&row, i));
        }
        assert_eq!(count(&row), 8);
        assert_eq!(iter_ones(&row).collect::<Vec<_>>(), vec![0, 1, 63, 64, 65, 127, 128, 129]);
        clear(&mut row, 64);
        assert!(!get(&row, 64));
        assert_eq!(first(&row), Some(0));
    }

    #[test]
    fn subset_and_intersection() {
        let mut a = vec![0u64; 2];
        let mut b = vec![0u64; 2];
        set(&mut a, 3);
        set(&mut a, 70);
        set(&mut b, 3);
        set(&mut b, 70);
        set(&mut b, 100);
        assert!(subset(&a, &b));
        assert!(!subset(&b, &a));
        assert!(intersects(&a, &b));
        intersect_in_place(&mut b, &a);
        assert_eq!(count(&b), 2);
    }
}
