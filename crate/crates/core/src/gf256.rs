//! Arithmetic in GF(2^8) (polynomial `x^8 + x^4 + x^3 + x^2 + 1`), Cauchy
//! matrices, and Gaussian elimination over byte vectors.
//!
//! Used by the centralized library-parity delivery, where every square
//! sub-block of the coefficient matrix has to be invertible.

const POLY: u16 = 0x11d;

struct Tables {
    exp: [u8; 512],
    log: [u8; 256],
}

const fn build_tables() -> Tables {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= POLY;
        }
        i += 1;
    }
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    Tables { exp, log }
}

static TABLES: Tables = build_tables();

pub fn mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        return 0;
    }
    TABLES.exp[TABLES.log[a as usize] as usize + TABLES.log[b as usize] as usize]
}

pub fn inv(a: u8) -> u8 {
    assert!(a != 0, "inverse of zero in GF(256)");
    TABLES.exp[255 - TABLES.log[a as usize] as usize]
}

/// `dst += coef * src`, bytewise.
pub fn axpy(dst: &mut [u8], coef: u8, src: &[u8]) {
    debug_assert_eq!(dst.len(), src.len());
    match coef {
        0 => {}
        1 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s),
        c => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= mul(c, *s)),
    }
}

pub fn scale(dst: &mut [u8], coef: u8) {
    dst.iter_mut().for_each(|d| *d = mul(coef, *d));
}

/// Entry `(row, col)` of the `rows x cols` Cauchy matrix `1/(x_row + y_col)`
/// with `x_row = row`, `y_col = rows + col`. Every square submatrix is
/// nonsingular provided `rows + cols <= 256`.
pub fn cauchy(rows: usize, row: usize, col: usize) -> u8 {
    let x = row;
    let y = rows + col;
    debug_assert!(x < 256 && y < 256);
    inv((x ^ y) as u8)
}

/// Solves `A z = b` for a square `A`; each right-hand side is a byte vector.
/// Returns `None` when `A` is singular.
pub fn solve(mut a: Vec<Vec<u8>>, mut b: Vec<Vec<u8>>) -> Option<Vec<Vec<u8>>> {
    let n = a.len();
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p_inv = inv(a[col][col]);
        scale(&mut a[col], p_inv);
        scale(&mut b[col], p_inv);
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                let (pivot_row, pivot_rhs) = (a[col].clone(), b[col].clone());
                axpy(&mut a[r], f, &pivot_row);
                axpy(&mut b[r], f, &pivot_rhs);
            }
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Carry-less shift-and-add multiplication, reduced by the field polynomial.
    fn slow_mul(mut a: u8, mut b: u8) -> u8 {
        let mut acc = 0u8;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            let carry = a & 0x80 != 0;
            a <<= 1;
            if carry {
                a ^= (POLY & 0xff) as u8;
            }
            b >>= 1;
        }
        acc
    }

    #[test]
    fn table_multiplication_matches_shift_and_add() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!(mul(a, b), slow_mul(a, b));
            }
        }
    }

    #[test]
    fn inverses() {
        for a in 1..=255u8 {
            assert_eq!(mul(a, inv(a)), 1);
        }
    }

    #[test]
    fn cauchy_blocks_are_invertible() {
        let (rows, cols) = (4, 10);
        // every choice of 4 columns out of 10
        for chosen in crate::combin::subsets(cols, rows) {
            let a: Vec<Vec<u8>> = (0..rows)
                .map(|r| chosen.iter().map(|&c| cauchy(rows, r, c - 1)).collect())
                .collect();
            let b: Vec<Vec<u8>> = (0..rows).map(|r| vec![r as u8]).collect();
            assert!(solve(a, b).is_some(), "columns {chosen:?}");
        }
    }

    #[test]
    fn singular_matrix_detected() {
        let a = vec![vec![1, 2], vec![1, 2]];
        assert!(solve(a, vec![vec![0], vec![0]]).is_none());
    }

    proptest! {
        #[test]
        fn solve_recovers_unknowns(xs in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 3), 5)) {
            let n = xs.len();
            let a: Vec<Vec<u8>> = (0..n).map(|r| (0..n).map(|c| cauchy(n, r, c)).collect()).collect();
            let b: Vec<Vec<u8>> = a.iter().map(|row| {
                let mut acc = vec![0u8; 3];
                for (c, x) in row.iter().zip(&xs) {
                    axpy(&mut acc, *c, x);
                }
                acc
            }).collect();
            prop_assert_eq!(solve(a, b).unwrap(), xs);
        }
    }
}
