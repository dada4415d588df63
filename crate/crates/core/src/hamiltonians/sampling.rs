//! Deterministic quasi-random samples used by the checkers and the cut-off.

const PRIMES: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

/// The van der Corput radical inverse of `index` in `base`.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Point `index` of the Halton sequence in `[0,1)^dim`.
pub(crate) fn halton_point(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "Halton dimension {dim} too large");
    PRIMES[..dim].iter().map(|&b| halton(index, b)).collect()
}

/// `count` unit directions in `R^dim` and times in `[0, period)`.
///
/// Directions are normalized points of `[−1,1]^dim`, skipping near-zero ones;
/// the first `2·dim` are the signed coordinate axes.
pub(crate) fn directions(dim: usize, count: usize, period: f64) -> Vec<(f64, Vec<f64>)> {
    let mut out = Vec::with_capacity(count);
    for j in 0..(2 * dim).min(count) {
        let mut v = vec![0.0; dim];
        v[j % dim] = if j < dim { 1.0 } else { -1.0 };
        out.push((period * halton(j as u64 + 1, 2), v));
    }
    let mut idx = 1u64;
    while out.len() < count {
        let u = halton_point(idx, dim + 1);
        idx += 1;
        let v: Vec<f64> = u[1..].iter().map(|x| 2.0 * x - 1.0).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        out.push((period * u[0], v.into_iter().map(|x| x / norm).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(6, 2), 0.375);
        assert!((halton(5, 3) - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn directions_are_unit() {
        for (t, v) in directions(4, 50, 2.0) {
            assert!((0.0..2.0).contains(&t));
            assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
