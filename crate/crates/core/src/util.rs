use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Splits `total` into integer parts proportional to `weights` with the
/// largest-remainder method. Ties in the remainder go to the lower index.
pub(crate) fn largest_remainder(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || sum <= 0.0 {
        return alloc::vec![0; weights.len()];
    }
    let exact: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| libm::floor(*e) as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    // stable sort keeps lower indices first among equal remainders
    order.sort_by(|&a, &b| {
        let ra = exact[a] - libm::floor(exact[a]);
        let rb = exact[b] - libm::floor(exact[b]);
        rb.total_cmp(&ra)
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// `ceil(fraction * n)`, tolerant of representation error such as
/// `0.3 * 70 = 21.000000000000004`.
pub(crate) fn ceil_fraction(fraction: f64, n: usize) -> usize {
    let raw = fraction * n as f64;
    let rounded = libm::round(raw);
    if libm::fabs(raw - rounded) < 1e-9 {
        rounded as usize
    } else {
        libm::ceil(raw) as usize
    }
}

pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn largest_remainder_blsd_priors() {
        assert_eq!(largest_remainder(1000, &[0.7748, 0.2252]), vec![775, 225]);
    }

    #[test]
    fn largest_remainder_tie_goes_to_lower_index() {
        assert_eq!(largest_remainder(3, &[0.5, 0.5]), vec![2, 1]);
        assert_eq!(largest_remainder(5, &[1.0, 1.0, 1.0]), vec![2, 2, 1]);
    }

    #[test]
    fn ceil_fraction_absorbs_rounding_noise() {
        assert_eq!(ceil_fraction(0.3, 100), 30);
        assert_eq!(ceil_fraction(0.3, 70), 21);
        assert_eq!(ceil_fraction(0.3, 49), 15);
        assert_eq!(ceil_fraction(0.3, 1), 1);
    }
}
