//! Binomial coefficients and colexicographic unranking of small subsets.

/// `C(n, k)` as `u64`, or `None` on overflow.
pub fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * u128::from(n - j) / u128::from(j + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// `C(n, k)` in floating point.
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc *= (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    use statrs::function::gamma::ln_gamma;
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn choose2(b: u64) -> u64 {
    b * b.saturating_sub(1) / 2
}

fn choose3(c: u64) -> u128 {
    let c = u128::from(c);
    if c < 3 {
        0
    } else {
        c * (c - 1) * (c - 2) / 6
    }
}

/// Largest `b` with `C(b, 2) <= rank`.
fn top_of_pair(rank: u64) -> u64 {
    let mut b = ((1.0 + (1.0 + 8.0 * rank as f64).sqrt()) / 2.0).floor() as u64;
    while b > 1 && choose2(b) > rank {
        b -= 1;
    }
    while choose2(b + 1) <= rank {
        b += 1;
    }
    b
}

/// Colex unranking of 2-subsets: rank `C(b,2) + a` maps to `{a, b}`, `a < b`.
pub fn unrank_pair(rank: u64) -> [usize; 2] {
    let b = top_of_pair(rank);
    let a = rank - choose2(b);
    [a as usize, b as usize]
}

/// Colex unranking of 3-subsets: rank `C(c,3) + C(b,2) + a` maps to
/// `{a, b, c}`, `a < b < c`.
pub fn unrank_triple(rank: u64) -> [usize; 3] {
    let r = u128::from(rank);
    let mut c = (6.0 * rank as f64).cbrt().floor() as u64 + 1;
    while c > 2 && choose3(c) > r {
        c -= 1;
    }
    while choose3(c + 1) <= r {
        c += 1;
    }
    let rest = (r - choose3(c)) as u64;
    let [a, b] = unrank_pair(rest);
    [a, b, c as usize]
}
