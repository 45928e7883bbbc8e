//! Small integer helpers shared across the crate.

/// Deterministic primality by trial division; inputs here stay far below
/// the range where this is slow.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs in increasing order.
pub(crate) fn factor(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factor needs a positive integer");
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Primes <= n in increasing order.
pub(crate) fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    out
}

/// base^exp mod m for m >= 1.
#[cfg(test)]
pub(crate) fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    assert!(m >= 1);
    let m = m as u128;
    let mut b = base as u128 % m;
    let mut acc: u128 = 1 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// All positive divisors of n, increasing.
pub(crate) fn divisors(n: u64) -> Vec<u64> {
    assert!(n > 0, "divisors needs a positive integer");
    let mut out = vec![1u64];
    for (p, e) in factor(n) {
        let prev = out.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// Index mu(N) = [SL2(Z) : Gamma0(N)] = N * prod_{p | N} (1 + 1/p).
pub(crate) fn psi_index(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in factor(n) {
        out = out / p * (p + 1);
    }
    out
}

/// Euler totient.
#[cfg(test)]
pub(crate) fn euler_phi(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in factor(n) {
        out = out / p * (p - 1);
    }
    out
}

pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_of_small_integers() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(!is_prime(1));
        assert!(is_prime(7919));
        assert!(!is_prime(7917));
    }

    #[test]
    fn factorization_round_trips() {
        assert_eq!(factor(1), vec![]);
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factor(97), vec![(97, 1)]);
        for n in 1..200u64 {
            let back: u64 = factor(n).iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
        }
    }

    #[test]
    fn sieve_matches_trial_division() {
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        let sieved = primes_up_to(500);
        let slow: Vec<u64> = (0..=500).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, slow);
    }

    #[test]
    fn totient_agrees_with_coprime_counting() {
        for n in 1..120u64 {
            let direct = (1..=n).filter(|&a| gcd_u64(a, n) == 1).count() as u64;
            assert_eq!(euler_phi(n), direct, "n = {n}");
        }
    }

    #[test]
    fn pow_mod_small_cases() {
        assert_eq!(pow_mod(2, 10, 1000), 24);
        assert_eq!(pow_mod(3, 0, 7), 1);
        assert_eq!(pow_mod(5, 3, 1), 0);
        assert_eq!(pow_mod(7, 100, 13), pow_mod(7, 100 % 12, 13));
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(27), vec![1, 3, 9, 27]);
    }

    #[test]
    fn index_values() {
        assert_eq!(psi_index(1), 1);
        assert_eq!(psi_index(2), 3);
        assert_eq!(psi_index(4), 6);
        assert_eq!(psi_index(9), 12);
        assert_eq!(psi_index(11), 12);
        assert_eq!(psi_index(27), 36);
        assert_eq!(psi_index(30), 72);
    }
}
