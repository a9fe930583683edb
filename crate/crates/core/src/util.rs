//! Small shared helpers: bit math, a reproducible PRNG, and mixed-radix
//! indexing of product domains.

/// Number of bits needed to write one of `n` distinct values in fixed width.
/// `ceil_log2(1) == 0`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// SplitMix64: 64-bit state, stable output across platforms and versions.
/// Used wherever a seeded random stream must be reproducible bit-for-bit.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

/// Algorithm identifier recorded next to any seed we persist.
pub const RNG_ALGORITHM: &str = "splitmix64";

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound` (bound > 0) by rejection.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return v % bound;
            }
        }
    }
}

/// Mixed-radix view of a product domain X_1 x ... x X_k. Point ids are
/// row-major with coordinate 1 slowest, matching the truth-table layout
/// used by the JSON function format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductDomain {
    sizes: Vec<usize>,
}

impl ProductDomain {
    pub fn new(sizes: Vec<usize>) -> Self {
        assert!(!sizes.is_empty() && sizes.iter().all(|&d| d > 0));
        ProductDomain { sizes }
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Total number of points, or None on overflow.
    pub fn len_checked(&self) -> Option<u64> {
        let mut total: u64 = 1;
        for &d in &self.sizes {
            total = total.checked_mul(d as u64)?;
        }
        Some(total)
    }

    /// Total number of points; panics on overflow.
    pub fn len(&self) -> u64 {
        self.len_checked().expect("product domain size overflow")
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, coords: &[usize]) -> u64 {
        debug_assert_eq!(coords.len(), self.sizes.len());
        let mut id: u64 = 0;
        for (&c, &d) in coords.iter().zip(&self.sizes) {
            debug_assert!(c < d);
            id = id * d as u64 + c as u64;
        }
        id
    }

    pub fn coords_of(&self, mut id: u64) -> Vec<usize> {
        let mut coords = vec![0usize; self.sizes.len()];
        for i in (0..self.sizes.len()).rev() {
            let d = self.sizes[i] as u64;
            coords[i] = (id % d) as usize;
            id /= d;
        }
        debug_assert_eq!(id, 0);
        coords
    }

    /// Iterate all points in ascending id order.
    pub fn iter(&self) -> ProductIter<'_> {
        ProductIter {
            domain: self,
            next: Some(vec![0; self.sizes.len()]),
        }
    }
}

pub struct ProductIter<'a> {
    domain: &'a ProductDomain,
    next: Option<Vec<usize>>,
}

impl<'a> Iterator for ProductIter<'a> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                self.next = None;
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.domain.sizes[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_small_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
    }

    #[test]
    fn splitmix_is_reproducible() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn product_roundtrip() {
        let d = ProductDomain::new(vec![3, 2, 4]);
        assert_eq!(d.len(), 24);
        for id in 0..24 {
            assert_eq!(d.index_of(&d.coords_of(id)), id);
        }
        let points: Vec<_> = d.iter().collect();
        assert_eq!(points.len(), 24);
        assert_eq!(points[0], vec![0, 0, 0]);
        assert_eq!(points[23], vec![2, 1, 3]);
        // coordinate 1 slowest
        assert_eq!(points[8], vec![1, 0, 0]);
    }
}
