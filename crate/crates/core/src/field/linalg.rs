//! Small exact integer linear algebra: Hermite normal form of rank-2
//! lattices and Smith normal form with transform tracking. Everything is
//! BigInt; matrices here never exceed a handful of rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// HNF of the lattice spanned by the given coordinate columns (x, y):
/// returns (a, b, c) with basis {(a, 0), (b, c)}, a > 0, c > 0,
/// 0 <= b < a. None when the columns do not span a rank-2 lattice.
pub fn hnf_rank2(cols: &[(BigInt, BigInt)]) -> Option<(BigInt, BigInt, BigInt)> {
    let mut cols: Vec<(BigInt, BigInt)> = cols
        .iter()
        .filter(|(x, y)| !x.is_zero() || !y.is_zero())
        .cloned()
        .collect();
    if cols.is_empty() {
        return None;
    }
    // reduce the y-row to a single nonzero entry by column gcd steps
    loop {
        let mut nz: Vec<usize> = (0..cols.len())
            .filter(|&i| !cols[i].1.is_zero())
            .collect();
        if nz.len() <= 1 {
            break;
        }
        nz.sort_by_key(|&i| cols[i].1.abs());
        let (i, j) = (nz[0], nz[1]);
        let q = &cols[j].1 / &cols[i].1;
        let xi = cols[i].0.clone();
        let yi = cols[i].1.clone();
        cols[j].0 -= &q * xi;
        cols[j].1 -= &q * yi;
    }
    let pivot = (0..cols.len()).find(|&i| !cols[i].1.is_zero())?;
    let (mut bx, mut by) = cols[pivot].clone();
    if by.is_negative() {
        bx = -bx;
        by = -by;
    }
    // gcd of the remaining x entries
    let mut a = BigInt::zero();
    for (i, (x, _)) in cols.iter().enumerate() {
        if i != pivot {
            a = a.gcd(x);
        }
    }
    if a.is_zero() {
        return None;
    }
    let b = bx.mod_floor(&a);
    Some((a, b, by))
}

/// Smith normal form of a 2x2 integer matrix: returns (u, d, v) with
/// u m v = diag(d0, d1), d0 | d1, d_i >= 0, and u, v unimodular.
pub fn snf_2x2(m: [[BigInt; 2]; 2]) -> ([[BigInt; 2]; 2], [BigInt; 2], [[BigInt; 2]; 2]) {
    let mut a = m;
    let mut u = identity2();
    let mut v = identity2();
    loop {
        // euclid down the first column (row ops)
        while !a[1][0].is_zero() {
            if a[0][0].is_zero() {
                swap_rows(&mut a, &mut u);
                continue;
            }
            let q = &a[1][0] / &a[0][0];
            row_sub(&mut a, &mut u, 1, 0, &q);
            if !a[1][0].is_zero() {
                swap_rows(&mut a, &mut u);
            }
        }
        // euclid across the first row (col ops)
        while !a[0][1].is_zero() {
            if a[0][0].is_zero() {
                swap_cols(&mut a, &mut v);
                continue;
            }
            let q = &a[0][1] / &a[0][0];
            col_sub(&mut a, &mut v, 1, 0, &q);
            if !a[0][1].is_zero() {
                swap_cols(&mut a, &mut v);
            }
        }
        if !a[1][0].is_zero() || !a[0][1].is_zero() {
            continue;
        }
        // enforce divisibility d0 | d1
        if !a[0][0].is_zero() && !(&a[1][1] % &a[0][0]).is_zero() {
            // add col 1 to col 0 and rerun
            let t0 = a[0][1].clone();
            let t1 = a[1][1].clone();
            a[0][0] += t0;
            a[1][0] += t1;
            for r in &mut v {
                let t = r[1].clone();
                r[0] += t;
            }
            continue;
        }
        break;
    }
    for i in 0..2 {
        if a[i][i].is_negative() {
            for j in 0..2 {
                a[i][j] = -a[i][j].clone();
                u[i][j] = -u[i][j].clone();
            }
        }
    }
    (u, [a[0][0].clone(), a[1][1].clone()], v)
}

/// Inverse of a unimodular 2x2 matrix.
pub fn inv_unimodular2(m: &[[BigInt; 2]; 2]) -> [[BigInt; 2]; 2] {
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    assert!(det.abs().is_one(), "matrix is not unimodular");
    let s = det; // +-1
    [
        [&m[1][1] / &s, -(&m[0][1] / &s)],
        [-(&m[1][0] / &s), &m[0][0] / &s],
    ]
}

fn identity2() -> [[BigInt; 2]; 2] {
    [
        [BigInt::one(), BigInt::zero()],
        [BigInt::zero(), BigInt::one()],
    ]
}

fn swap_rows(a: &mut [[BigInt; 2]; 2], u: &mut [[BigInt; 2]; 2]) {
    a.swap(0, 1);
    u.swap(0, 1);
}

fn swap_cols(a: &mut [[BigInt; 2]; 2], v: &mut [[BigInt; 2]; 2]) {
    for r in a.iter_mut() {
        r.swap(0, 1);
    }
    for r in v.iter_mut() {
        r.swap(0, 1);
    }
}

fn row_sub(a: &mut [[BigInt; 2]; 2], u: &mut [[BigInt; 2]; 2], dst: usize, src: usize, q: &BigInt) {
    for j in 0..2 {
        let t = q * &a[src][j];
        a[dst][j] -= t;
        let t = q * &u[src][j];
        u[dst][j] -= t;
    }
}

fn col_sub(a: &mut [[BigInt; 2]; 2], v: &mut [[BigInt; 2]; 2], dst: usize, src: usize, q: &BigInt) {
    for r in a.iter_mut() {
        let t = q * &r[src];
        r[dst] -= t;
    }
    for r in v.iter_mut() {
        let t = q * &r[src];
        r[dst] -= t;
    }
}

/// Diagonalization of a k x m integer matrix given as columns, tracking
/// only the left transform: returns (u, d) with u unimodular k x k such
/// that u * R * V = diag(d) for some unimodular V. The diagonal need not
/// satisfy the divisibility chain; any diagonal presentation identifies
/// Z^k / colspace(R) with the product of Z/d_i via x -> u x.
pub fn snf_left(k: usize, columns: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut cols: Vec<Vec<BigInt>> = columns
        .iter()
        .filter(|c| c.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let mut u: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut d = vec![BigInt::zero(); k];
    for row in 0..k {
        loop {
            // smallest-magnitude nonzero entry in rows >= row
            let mut best: Option<(usize, usize)> = None;
            for (ci, col) in cols.iter().enumerate() {
                for ri in row..k {
                    if !col[ri].is_zero()
                        && best
                            .map(|(bc, br): (usize, usize)| col[ri].abs() < cols[bc][br].abs())
                            .unwrap_or(true)
                    {
                        best = Some((ci, ri));
                    }
                }
            }
            let Some((ci, ri)) = best else {
                break;
            };
            cols.swap(0, ci);
            if ri != row {
                for col in cols.iter_mut() {
                    col.swap(row, ri);
                }
                u.swap(row, ri);
            }
            let pivot = cols[0][row].clone();
            let mut clean = true;
            // column ops clear the rest of this row (not tracked)
            for ci in 1..cols.len() {
                if !cols[ci][row].is_zero() {
                    let q = &cols[ci][row] / &pivot;
                    for ri2 in 0..k {
                        let t = &q * &cols[0][ri2];
                        cols[ci][ri2] -= t;
                    }
                    if !cols[ci][row].is_zero() {
                        clean = false;
                    }
                }
            }
            // row ops clear the pivot column below (tracked in u)
            for ri2 in row + 1..k {
                if !cols[0][ri2].is_zero() {
                    let q = &cols[0][ri2] / &pivot;
                    for col in cols.iter_mut() {
                        let t = &q * &col[row];
                        col[ri2] -= t;
                    }
                    let urow: Vec<BigInt> = u[row].clone();
                    for (jj, val) in u[ri2].iter_mut().enumerate() {
                        *val -= &q * &urow[jj];
                    }
                    if !cols[0][ri2].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                d[row] = pivot.abs();
                cols.remove(0);
                cols.retain(|c| c.iter().any(|x| !x.is_zero()));
                break;
            }
        }
    }
    (u, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn hnf_simple() {
        let (a, b, c) = hnf_rank2(&[(bi(2), bi(0)), (bi(1), bi(3))]).unwrap();
        assert_eq!((a, b, c), (bi(2), bi(1), bi(3)));
        // order of columns must not matter for the lattice
        let (a, b, c) = hnf_rank2(&[(bi(1), bi(3)), (bi(2), bi(0)), (bi(3), bi(3))]).unwrap();
        assert_eq!((a.clone(), c.clone()), (bi(2), bi(3)));
        assert!(b >= bi(0) && b < a);
    }

    #[test]
    fn snf_2x2_diag() {
        let m = [[bi(2), bi(4)], [bi(6), bi(8)]];
        let (u, d, v) = snf_2x2(m.clone());
        // check u m v = diag(d)
        let mut prod = [[bi(0), bi(0)], [bi(0), bi(0)]];
        for i in 0..2 {
            for j in 0..2 {
                let mut s = bi(0);
                for t in 0..2 {
                    for w in 0..2 {
                        s += &u[i][t] * &m[t][w] * &v[w][j];
                    }
                }
                prod[i][j] = s;
            }
        }
        assert_eq!(prod[0][1], bi(0));
        assert_eq!(prod[1][0], bi(0));
        assert_eq!(prod[0][0], d[0]);
        assert_eq!(prod[1][1], d[1]);
        assert!((&d[1] % &d[0]).is_zero());
        assert_eq!(&d[0] * &d[1], bi(8)); // |det| = 8
    }

    #[test]
    fn snf_left_cyclic_presentation() {
        // Z^2 / <(4,0),(0,2),(2,1)> : relations give a group of order 8 / ...
        let cols = vec![vec![bi(4), bi(0)], vec![bi(0), bi(2)], vec![bi(2), bi(1)]];
        let (_u, d) = snf_left(2, &cols);
        let order: BigInt = d.iter().filter(|x| !x.is_zero()).product();
        // index of the lattice spanned by those columns in Z^2 is 4
        assert_eq!(order, bi(4));
    }
}
