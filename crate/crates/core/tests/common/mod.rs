//! Brute-force reference values, written from the formulas directly and
//! sharing no code with the library.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;

pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

fn cdiv(a: i64, b: i64) -> i64 {
    (a + b - 1) / b
}

fn plus(x: i64) -> i64 {
    x.max(0)
}

fn mu(n: i64, k: i64, l: i64, s: i64, ell: i64) -> i64 {
    cdiv(n, l * ell).min(k) - s
}

fn penalty(n: i64, k: i64, l: i64, s: i64, ell: i64) -> Q {
    let mu = mu(n, k, l, s, ell);
    int(mu) * int(plus(n - l * ell * s)) / int(s + mu)
}

pub fn cen_term(n: i64, k: i64, l: i64, s: i64, ell: i64, m: &Q) -> Q {
    (int(n) - int(s) * m - penalty(n, k, l, s, ell) - int(plus(n - k * l * ell))) / int(ell)
}

pub fn d2d_term(n: i64, k: i64, l: i64, s: i64, ell: i64, m: &Q) -> Q {
    (int(n) - int(s) * m - penalty(n, k, l, s, ell)) * int(k) / int(ell * (k - s))
}

fn clamp_max(values: impl Iterator<Item = Q>) -> Q {
    values.fold(int(0), |a, b| if b > a { b } else { a })
}

pub fn cen_lb(n: i64, k: i64, l: i64, m: &Q) -> Q {
    let s_max = cdiv(n, l).min(k);
    clamp_max((1..=s_max).flat_map(|s| (1..=cdiv(n, l * s)).map(move |ell| cen_term(n, k, l, s, ell, m))))
}

pub fn d2d_lb(n: i64, k: i64, l: i64, m: &Q) -> Q {
    let s_max = cdiv(n, l).min(k - 1);
    clamp_max((1..=s_max).flat_map(|s| (1..=cdiv(n, l * s)).map(move |ell| d2d_term(n, k, l, s, ell, m))))
}

/// Single-demand centralized bound in its specialized form, where
/// `mu = min(ceil(N/ell), K) - s` and the last penalty is `(N - K ell)^+`.
pub fn cen_lb_single(n: i64, k: i64, m: &Q) -> Q {
    let mut best = int(0);
    for s in 1..=n.min(k) {
        for ell in 1..=cdiv(n, s) {
            let mu = cdiv(n, ell).min(k) - s;
            let v = (int(n) - int(s) * m
                - int(mu) * int(plus(n - ell * s)) / int(s + mu)
                - int(plus(n - k * ell)))
                / int(ell);
            if v > best {
                best = v;
            }
        }
    }
    best
}

pub fn cen_cutset(n: i64, k: i64, l: i64, m: &Q) -> Q {
    if l == 1 {
        clamp_max((1..=n.min(k)).map(|s| int(s) - int(s) * m / int(n / s)))
    } else {
        let s_max = cdiv(n, l).min(k);
        clamp_max((1..=s_max).map(|s| cen_term(n, k, l, s, cdiv(n, l * s), m)))
    }
}

pub fn d2d_cutset(n: i64, k: i64, l: i64, m: &Q) -> Q {
    let s_max = cdiv(n, l).min(k - 1);
    clamp_max((1..=s_max).map(|s| d2d_term(n, k, l, s, cdiv(n, l * s), m)))
}

fn min(a: Q, b: Q) -> Q {
    if a < b {
        a
    } else {
        b
    }
}

pub fn cen_rate(n: i64, k: i64, l: i64, m: &Q) -> Q {
    let kl = int(k * l);
    let coded = int(1) / (int(1) + int(k) * m / int(n));
    kl.clone() * (int(1) - m / int(n)) * min(coded, int(n) / kl)
}

pub fn d2d_rate(n: i64, l: i64, m: &Q) -> Q {
    min(int(l * n) / m * (int(1) - m / int(n)), int(n))
}

/// Memory sharing between corners: the smallest chord value over all pairs
/// of corners that straddle `m`.
pub fn chord_min(corners: &[(Q, Q)], m: &Q) -> Q {
    let mut best: Option<Q> = None;
    for (a, ra) in corners {
        for (b, rb) in corners {
            let v = if a == m {
                ra.clone()
            } else if a < m && m < b {
                ra + (m - a) * (rb - ra) / (b - a)
            } else {
                continue;
            };
            if best.as_ref().is_none_or(|x| v < *x) {
                best = Some(v);
            }
        }
    }
    best.expect("m inside the corner range")
}

pub fn cen_envelope(n: i64, k: i64, l: i64, m: &Q) -> Q {
    let corners: Vec<(Q, Q)> = (0..=k)
        .map(|t| {
            let mt = frac(n * t, k);
            let r = cen_rate(n, k, l, &mt);
            (mt, r)
        })
        .collect();
    chord_min(&corners, m)
}

pub fn d2d_envelope(n: i64, k: i64, l: i64, m: &Q) -> Q {
    let corners: Vec<(Q, Q)> = (1..=k)
        .map(|t| {
            let mt = frac(n * t, k);
            let r = d2d_rate(n, l, &mt);
            (mt, r)
        })
        .collect();
    chord_min(&corners, m)
}

/// Cache sizes used for cross-checks: every corner plus `steps` uniform
/// points of `[lo, N]`.
pub fn sample_m(n: i64, k: i64, d2d: bool, steps: i64) -> Vec<Q> {
    let lo = if d2d { frac(n, k) } else { int(0) };
    let mut out: Vec<Q> = (0..=k).map(|t| frac(n * t, k)).filter(|m| *m >= lo).collect();
    for i in 0..=steps {
        out.push(lo.clone() + (int(n) - lo.clone()) * frac(i, steps));
    }
    out.sort();
    out.dedup();
    out
}
