//! Sobol' low-discrepancy points with fixed direction numbers.

const BITS: usize = 32;

/// `(degree s, coefficient a, initial m_1..m_s)` for dimensions 2..=8
/// (Joe–Kuo primitive-polynomial table). Dimension 1 is van der Corput.
const DIRECTIONS: [(u32, u32, &[u32]); 7] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
];

/// Largest supported dimension.
pub const MAX_DIM: usize = DIRECTIONS.len() + 1;

fn direction_numbers(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = 1 << (BITS - 1 - i);
        }
        return v;
    }
    let (s, a, m) = DIRECTIONS[dim - 1];
    let s = s as usize;
    for i in 0..s.min(BITS) {
        v[i] = m[i] << (BITS - 1 - i);
    }
    for i in s..BITS {
        let mut x = v[i - s] ^ (v[i - s] >> s);
        for k in 1..s {
            if (a >> (s - 1 - k)) & 1 == 1 {
                x ^= v[i - k];
            }
        }
        v[i] = x;
    }
    v
}

/// First `n` points of the `dim`-dimensional sequence in `[0,1)^dim`,
/// skipping the origin. Gray-code order.
pub fn sobol_points(dim: usize, n: usize) -> Vec<Vec<f64>> {
    assert!((1..=MAX_DIM).contains(&dim), "Sobol dimension {dim} outside 1..={MAX_DIM}");
    let dirs: Vec<[u32; BITS]> = (0..dim).map(direction_numbers).collect();
    let mut x = vec![0u32; dim];
    let mut out = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let c = (!i).trailing_zeros() as usize;
        for (xj, d) in x.iter_mut().zip(&dirs) {
            *xj ^= d[c];
        }
        out.push(x.iter().map(|&b| b as f64 / (1u64 << BITS) as f64).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_prefix() {
        let p = sobol_points(2, 7);
        let want = [[0.5, 0.5], [0.75, 0.25], [0.25, 0.75], [0.375, 0.375], [0.875, 0.875], [0.625, 0.125], [0.125, 0.625]];
        for (a, b) in p.iter().zip(want) {
            assert_eq!(a[..], b[..]);
        }
    }

    #[test]
    fn stratified_in_each_dimension() {
        for dim in 1..=MAX_DIM {
            let p = sobol_points(dim, 31);
            for j in 0..dim {
                // points 1..=31 plus the skipped origin fill every 1/32 cell once
                let mut cells: Vec<usize> = p.iter().map(|x| (x[j] * 32.0) as usize).collect();
                cells.push(0);
                cells.sort();
                assert_eq!(cells, (0..32).collect::<Vec<_>>(), "dim {j}");
            }
        }
    }
}
