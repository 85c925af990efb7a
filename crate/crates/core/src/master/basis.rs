//! Independent sets of the blockade graph as `u64` occupation masks.

use crate::geometry::ArrayGeometry;
use crate::{within_radius, Error, Result};
use std::collections::HashMap;

pub const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct BlockadeBasis {
    pub n_atoms: usize,
    /// Sorted by excitation number, then by mask value.
    pub states: Vec<u64>,
    pub index: HashMap<u64, usize>,
    /// `lower[s]` lists `(j, index of s without j)` for each excited `j`.
    pub lower: Vec<Vec<(usize, usize)>>,
}

impl BlockadeBasis {
    pub fn enumerate(geometry: &ArrayGeometry, r_b: f64, max_states: usize) -> Result<Self> {
        let n = geometry.n_atoms();
        if n > 64 {
            return Err(Error::invalid("n_atoms", "blockade basis supports at most 64 atoms"));
        }
        let adjacency: Vec<u64> = (0..n)
            .map(|j| {
                (0..n)
                    .filter(|&k| k != j && within_radius(geometry.distance(j, k), r_b))
                    .fold(0u64, |m, k| m | (1 << k))
            })
            .collect();
        Self::from_adjacency(&adjacency, max_states)
    }

    pub fn from_adjacency(adjacency: &[u64], max_states: usize) -> Result<Self> {
        let n = adjacency.len();
        let mut states = Vec::new();
        // Depth-first over atoms: include atom `j` only if no earlier
        // included atom blockades it.
        let mut stack: Vec<(usize, u64)> = vec![(0, 0)];
        while let Some((j, mask)) = stack.pop() {
            if j == n {
                states.push(mask);
                if states.len() > max_states {
                    return Err(Error::BasisTooLarge { count: states.len(), cap: max_states });
                }
                continue;
            }
            stack.push((j + 1, mask));
            if adjacency[j] & mask == 0 {
                stack.push((j + 1, mask | (1 << j)));
            }
        }
        states.sort_unstable_by_key(|&m| (m.count_ones(), m));
        let index: HashMap<u64, usize> = states.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let lower = states
            .iter()
            .map(|&m| (0..n).filter(|&j| m & (1 << j) != 0).map(|j| (j, index[&(m & !(1 << j))])).collect())
            .collect();
        Ok(BlockadeBasis { n_atoms: n, states, index, lower })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn lookup(&self, mask: u64) -> usize {
        self.index.get(&mask).copied().unwrap_or(NONE)
    }

    pub fn max_excitations(&self) -> u32 {
        self.states.last().map(|m| m.count_ones()).unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DipoleAxis;
    use proptest::prelude::*;

    fn count(n: usize, rb_over_d: f64) -> usize {
        let g = ArrayGeometry::square(n, 0.5, DipoleAxis::X).unwrap();
        BlockadeBasis::enumerate(&g, rb_over_d * 0.5, 1 << 20).unwrap().dim()
    }

    #[test]
    fn two_by_two_nearest_neighbours() {
        let g = ArrayGeometry::square(2, 0.5, DipoleAxis::X).unwrap();
        let b = BlockadeBasis::enumerate(&g, 0.5, 100).unwrap();
        assert_eq!(b.dim(), 7);
        assert_eq!(b.states[0], 0);
        assert_eq!(b.states[5..], [0b0110, 0b1001]);
    }

    #[test]
    fn limits() {
        assert_eq!(count(3, 0.0), 512);
        assert_eq!(count(3, 3.0), 10);
        assert_eq!(count(4, 18f64.sqrt()), 17);
    }

    #[test]
    fn four_by_four_counts() {
        // Independent-set counts of the 4×4 grid with Θ(0) = 1.
        assert_eq!(count(4, 1.0), 1234);
        assert_eq!(count(4, 2f64.sqrt()), 314);
        assert_eq!(count(4, 2.0), 146);
        assert_eq!(count(4, 5f64.sqrt()), 72);
        assert_eq!(count(4, 3.0), 39);
    }

    #[test]
    fn cap_enforced() {
        let g = ArrayGeometry::square(4, 0.5, DipoleAxis::X).unwrap();
        assert!(matches!(BlockadeBasis::enumerate(&g, 0.0, 1000), Err(Error::BasisTooLarge { cap: 1000, .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn closed_under_lowering(n in 1usize..5, rb in 0.0f64..2.0) {
            let g = ArrayGeometry::square(n, 0.5, DipoleAxis::X).unwrap();
            let b = BlockadeBasis::enumerate(&g, rb, 1 << 17).unwrap();
            prop_assert_eq!(b.states[0], 0);
            for (s, &m) in b.states.iter().enumerate() {
                prop_assert_eq!(b.lower[s].len() as u32, m.count_ones());
                for &(j, t) in &b.lower[s] {
                    prop_assert_eq!(b.states[t], m & !(1 << j));
                }
                for j in 0..g.n_atoms() {
                    for k in j + 1..g.n_atoms() {
                        if m & (1 << j) != 0 && m & (1 << k) != 0 {
                            prop_assert!(!within_radius(g.distance(j, k), rb));
                        }
                    }
                }
            }
        }
    }
}
