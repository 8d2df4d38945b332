use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PassAtKError {
    #[error("pass@k needs 0 <= c <= n and 1 <= k <= n (got n={n}, c={c}, k={k})")]
    Bounds { n: u64, c: u64, k: u64 },
    #[error("exact fraction does not fit in 128 bits")]
    Overflow,
}

fn check(n: u64, c: u64, k: u64) -> Result<(), PassAtKError> {
    if c > n || k == 0 || k > n {
        return Err(PassAtKError::Bounds { n, c, k });
    }
    Ok(())
}

/// Probability that at least one of `k` samples drawn without replacement
/// from `n` candidates, `c` of them correct, is correct:
/// 1 - C(n-c, k) / C(n, k), evaluated as 1 - prod_{i=n-c+1}^{n} (1 - k/i).
pub fn pass_at_k(n: u64, c: u64, k: u64) -> Result<f64, PassAtKError> {
    check(n, c, k)?;
    if n - c < k {
        return Ok(1.0);
    }
    let miss: f64 = (n - c + 1..=n).map(|i| 1.0 - k as f64 / i as f64).product();
    Ok(1.0 - miss)
}

const fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// [`pass_at_k`] as a reduced fraction `(numerator, denominator)`.
pub fn pass_at_k_exact(n: u64, c: u64, k: u64) -> Result<(u128, u128), PassAtKError> {
    check(n, c, k)?;
    if n - c < k {
        return Ok((1, 1));
    }
    // C(n-c, k) / C(n, k) = prod_{i<k} (n-c-i) / (n-i).
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..k {
        let a = u128::from(n - c - i);
        let b = u128::from(n - i);
        let g1 = gcd(a, den);
        let g2 = gcd(b, num);
        num = (num / g2)
            .checked_mul(a / g1)
            .ok_or(PassAtKError::Overflow)?;
        den = (den / g1)
            .checked_mul(b / g2)
            .ok_or(PassAtKError::Overflow)?;
    }
    let g = gcd(den - num, den);
    Ok(((den - num) / g, den / g))
}
