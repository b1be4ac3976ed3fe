//! Divisor arithmetic.

/// Divisors of `n` in increasing order. `divisors(0)` is empty.
pub fn divisors(n: u32) -> Vec<u32> {
    if n == 0 {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u32;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Divisor power sum `sigma_p(n) = sum_{d | n} d^p`.
pub fn sigma(p: u32, n: u32) -> u128 {
    divisors(n).into_iter().map(|d| (d as u128).pow(p)).sum()
}

pub fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_sigma(p: u32, n: u32) -> u128 {
        (1..=n).filter(|m| n % m == 0).map(|m| (m as u128).pow(p)).sum()
    }

    #[test]
    fn divisors_of_small_numbers() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(16), vec![1, 2, 4, 8, 16]);
        assert!(divisors(0).is_empty());
    }

    #[test]
    fn sigma_matches_trial_division() {
        for p in [0, 1, 3, 5] {
            for n in 1..=50 {
                assert_eq!(sigma(p, n), trial_division_sigma(p, n), "sigma_{p}({n})");
            }
        }
        assert_eq!(sigma(1, 6), 12);
    }
}
