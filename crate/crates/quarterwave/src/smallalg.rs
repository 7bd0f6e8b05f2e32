//! Tiny dense complex linear algebra for the fitting steps: Gaussian
//! elimination with partial pivoting and least squares via normal equations.
//! Systems here are at most a few hundred rows by six columns.

use crate::model::C;

/// Solve the square system `a x = b` in place copies.
pub fn solve(a: &[Vec<C>], b: &[C]) -> Vec<C> {
    let n = b.len();
    let mut m: Vec<Vec<C>> = a.iter().cloned().collect();
    let mut r = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if m[row][col].norm() > m[piv][col].norm() {
                piv = row;
            }
        }
        m.swap(col, piv);
        r.swap(col, piv);
        let d = m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / d;
            for k in col..n {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
            let rv = r[col];
            r[row] -= f * rv;
        }
    }
    let mut x = vec![C::new(0.0, 0.0); n];
    for col in (0..n).rev() {
        let mut s = r[col];
        for k in col + 1..n {
            s -= m[col][k] * x[k];
        }
        x[col] = s / m[col][col];
    }
    x
}

/// Least squares for the overdetermined system with the given rows: minimizes
/// ||A x - b|| through the normal equations A^H A x = A^H b.
pub fn lstsq(rows: &[Vec<C>], rhs: &[C]) -> Vec<C> {
    let n = rows[0].len();
    let mut ata = vec![vec![C::new(0.0, 0.0); n]; n];
    let mut atb = vec![C::new(0.0, 0.0); n];
    for (row, &b) in rows.iter().zip(rhs) {
        for i in 0..n {
            let ci = row[i].conj();
            for j in 0..n {
                ata[i][j] += ci * row[j];
            }
            atb[i] += ci * b;
        }
    }
    solve(&ata, &atb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::I;

    #[test]
    fn solve_small() {
        let a = vec![
            vec![C::new(2.0, 0.0), I],
            vec![C::new(1.0, 0.0), C::new(-1.0, 1.0)],
        ];
        let x_true = vec![C::new(0.5, -0.25), C::new(1.0, 2.0)];
        let b: Vec<C> = (0..2).map(|i| a[i][0] * x_true[0] + a[i][1] * x_true[1]).collect();
        let x = solve(&a, &b);
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).norm() < 1e-12);
        }
    }

    #[test]
    fn lstsq_exact_fit() {
        // overdetermined but consistent system recovers coefficients
        let xs = [0.5, 1.0, 1.5, 2.0, 3.0];
        let c0 = C::new(0.3, -0.7);
        let c1 = C::new(-1.2, 0.4);
        let rows: Vec<Vec<C>> = xs.iter().map(|&x| vec![C::new(1.0, 0.0), C::new(x, 0.0)]).collect();
        let rhs: Vec<C> = xs.iter().map(|&x| c0 + c1 * x).collect();
        let c = lstsq(&rows, &rhs);
        assert!((c[0] - c0).norm() < 1e-12 && (c[1] - c1).norm() < 1e-12);
    }
}
