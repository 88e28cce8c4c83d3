//! Exact Gaussian elimination over the rationals.

use num_traits::Zero;

use crate::exactnum::Rational;

/// Solves `rows * x = rhs`. Returns one solution (free variables set to 0)
/// or `None` if the system is inconsistent.
pub fn solve(rows: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(rows.len(), rhs.len());
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            assert_eq!(r.len(), ncols, "ragged system");
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(sel) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, sel);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut().skip(col) {
            *v *= &inv;
        }
        let pivot_row = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i != row && !r[col].is_zero() {
                let factor = r[col].clone();
                for (x, pv) in r.iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &factor * pv;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    if m[row..].iter().any(|r| !r[ncols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][ncols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, ratio};

    #[test]
    fn consistent_and_inconsistent() {
        let a = vec![vec![rat(1), rat(1)], vec![rat(1), rat(-1)]];
        assert_eq!(solve(&a, &[rat(3), rat(1)]), Some(vec![rat(2), rat(1)]));
        let b = vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]];
        assert_eq!(solve(&b, &[rat(1), rat(3)]), None);
        assert_eq!(solve(&b, &[rat(1), rat(2)]), Some(vec![rat(1), rat(0)]));
        let c = vec![vec![rat(3)]];
        assert_eq!(solve(&c, &[rat(1)]), Some(vec![ratio(1, 3)]));
        // zero columns
        let d: Vec<Vec<Rational>> = vec![vec![], vec![]];
        assert_eq!(solve(&d, &[rat(0), rat(0)]), Some(vec![]));
        assert_eq!(solve(&d, &[rat(0), rat(1)]), None);
    }
}
