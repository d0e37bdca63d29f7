//! Dense complex least squares.
//!
//! Householder QR with column pivoting determines the numerical rank; a
//! second QR of the trapezoidal factor gives the minimum-norm solution
//! when the system is rank deficient.

use num_complex::Complex64;

/// Relative rank tolerance, scaled by the largest column norm.
pub const RANK_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn from_columns(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_columns(rows, cols, vec![ZERO; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[c * self.rows + r]
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[c * self.rows + r] = v;
    }

    fn column(&self, c: usize) -> &[Complex64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    fn adjoint(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for c in 0..self.cols {
            for r in 0..self.rows {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        let mut out = vec![ZERO; self.rows];
        for (c, &xc) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.column(c)) {
                *o += a * xc;
            }
        }
        out
    }

    pub fn adjoint_mul_vec(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.rows);
        (0..self.cols)
            .map(|c| self.column(c).iter().zip(y).map(|(a, b)| a.conj() * b).sum())
            .collect()
    }
}

/// One Householder reflector `H = I − τ v vᴴ` acting on rows `start..`.
#[derive(Debug, Clone)]
struct Reflector {
    start: usize,
    v: Vec<Complex64>,
    tau: f64,
}

impl Reflector {
    /// Reflector mapping `x` onto a multiple of `e_0`, and that multiple.
    fn annihilating(start: usize, x: &[Complex64]) -> (Self, Complex64) {
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return (
                Reflector {
                    start,
                    v: vec![ZERO; x.len()],
                    tau: 0.0,
                },
                ZERO,
            );
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        (
            Reflector {
                start,
                v,
                tau: 2.0 / vnorm_sq,
            },
            alpha,
        )
    }

    fn apply(&self, y: &mut [Complex64]) {
        if self.tau == 0.0 {
            return;
        }
        let seg = &mut y[self.start..self.start + self.v.len()];
        let dot: Complex64 = self.v.iter().zip(seg.iter()).map(|(v, s)| v.conj() * s).sum();
        let k = dot * self.tau;
        for (s, v) in seg.iter_mut().zip(&self.v) {
            *s -= v * k;
        }
    }
}

/// Householder QR, optionally with column pivoting. Leaves `R` in the
/// upper triangle of `a`.
fn householder_qr(a: &mut Matrix, pivot: bool) -> (Vec<Reflector>, Vec<usize>) {
    let (m, n) = (a.rows, a.cols);
    let steps = m.min(n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors = Vec::with_capacity(steps);
    for k in 0..steps {
        if pivot {
            let (best, _) = (k..n)
                .map(|c| (c, a.column(c)[k..].iter().map(|z| z.norm_sqr()).sum::<f64>()))
                .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if best != k {
                for r in 0..m {
                    a.data.swap(k * m + r, best * m + r);
                }
                perm.swap(k, best);
            }
        }
        let (h, alpha) = Reflector::annihilating(k, &a.column(k)[k..]);
        a.set(k, k, alpha);
        for r in k + 1..m {
            a.set(r, k, ZERO);
        }
        for c in k + 1..n {
            h.apply(&mut a.data[c * m..(c + 1) * m]);
        }
        reflectors.push(h);
    }
    (reflectors, perm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub solution: Vec<Complex64>,
    pub rank: usize,
}

impl LeastSquares {
    pub fn rank_deficient(&self) -> bool {
        self.rank < self.solution.len()
    }
}

/// Minimum-norm minimizer of `‖A x − b‖`, i.e. `A† b`.
pub fn least_squares(a: &Matrix, b: &[Complex64]) -> LeastSquares {
    assert_eq!(b.len(), a.rows);
    let (m, n) = (a.rows, a.cols);
    if n == 0 {
        return LeastSquares {
            solution: Vec::new(),
            rank: 0,
        };
    }
    let max_col = (0..n)
        .map(|c| a.column(c).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let tol = RANK_TOLERANCE * max_col;

    let mut r = a.clone();
    let (reflectors, perm) = householder_qr(&mut r, true);
    let rank = (0..m.min(n)).take_while(|&k| r.get(k, k).norm() > tol).count();

    let mut qb = b.to_vec();
    for h in &reflectors {
        h.apply(&mut qb);
    }
    let c = &qb[..rank];

    let w: Vec<Complex64> = if rank == n {
        back_substitute(&r, c)
    } else if rank == 0 {
        vec![ZERO; n]
    } else {
        // [R11 R12] = T (rank × n). With Tᴴ = Z S, the minimum-norm
        // solution of T w = c is w = Z S⁻ᴴ c.
        let mut t = Matrix::zeros(rank, n);
        for col in 0..n {
            for row in 0..rank.min(col + 1) {
                t.set(row, col, r.get(row, col));
            }
        }
        let mut th = t.adjoint();
        let (z_reflectors, _) = householder_qr(&mut th, false);
        let u = forward_substitute_adjoint(&th, c);
        let mut w = vec![ZERO; n];
        w[..rank].copy_from_slice(&u);
        for h in z_reflectors.iter().rev() {
            h.apply(&mut w);
        }
        w
    };

    let mut solution = vec![ZERO; n];
    for (k, &p) in perm.iter().enumerate() {
        solution[p] = w[k];
    }
    LeastSquares { solution, rank }
}

/// Solves `R x = c` for the leading square upper-triangular block of `r`.
fn back_substitute(r: &Matrix, c: &[Complex64]) -> Vec<Complex64> {
    let k = c.len();
    let mut x = vec![ZERO; k];
    for i in (0..k).rev() {
        let mut acc = c[i];
        for (j, &xj) in x.iter().enumerate().skip(i + 1) {
            acc -= r.get(i, j) * xj;
        }
        x[i] = acc / r.get(i, i);
    }
    x
}

/// Solves `Sᴴ u = c` where `S` is the leading square upper-triangular block of `s`.
fn forward_substitute_adjoint(s: &Matrix, c: &[Complex64]) -> Vec<Complex64> {
    let k = c.len();
    let mut u = vec![ZERO; k];
    for i in 0..k {
        let mut acc = c[i];
        for (j, &uj) in u[..i].iter().enumerate() {
            acc -= s.get(j, i).conj() * uj;
        }
        u[i] = acc / s.get(i, i).conj();
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual_orthogonality(a: &Matrix, b: &[Complex64], x: &[Complex64]) -> f64 {
        let ax = a.mul_vec(x);
        let r: Vec<Complex64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        a.adjoint_mul_vec(&r).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn square_system_is_solved_exactly() {
        let a = Matrix::from_columns(2, 2, vec![c(2.0, 0.0), c(0.0, 1.0), c(1.0, 1.0), c(3.0, 0.0)]);
        let x = vec![c(1.0, -2.0), c(0.5, 0.5)];
        let b = a.mul_vec(&x);
        let ls = least_squares(&a, &b);
        assert_eq!(ls.rank, 2);
        for (u, v) in ls.solution.iter().zip(&x) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn overdetermined_residual_is_orthogonal() {
        let a = Matrix::from_columns(
            4,
            2,
            vec![
                c(1.0, 0.0),
                c(1.0, 0.0),
                c(1.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.5),
                c(2.0, -1.0),
                c(3.0, 0.0),
            ],
        );
        let b = vec![c(1.0, 0.0), c(2.0, 1.0), c(2.0, 0.0), c(5.0, -1.0)];
        let ls = least_squares(&a, &b);
        assert_eq!(ls.rank, 2);
        assert!(residual_orthogonality(&a, &b, &ls.solution) < 1e-12);
    }

    #[test]
    fn rank_deficient_gives_minimum_norm() {
        // Two identical columns: the min-norm solution splits the weight evenly.
        let col = [c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)];
        let a = Matrix::from_columns(3, 2, [col, col].concat());
        let b: Vec<Complex64> = col.iter().map(|z| z * 2.0).collect();
        let ls = least_squares(&a, &b);
        assert_eq!(ls.rank, 1);
        assert!(ls.rank_deficient());
        for z in &ls.solution {
            assert!((z - c(1.0, 0.0)).norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn rank_deficient_wide_matches_pseudo_inverse() {
        // A = [1 1 0; 1 1 0] has rank 1; A† b for b = (1, 3) is (1, 1, 0).
        let a = Matrix::from_columns(
            2,
            3,
            vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), ZERO, ZERO],
        );
        let ls = least_squares(&a, &[c(1.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(ls.rank, 1);
        let want = [c(1.0, 0.0), c(1.0, 0.0), ZERO];
        for (u, v) in ls.solution.iter().zip(&want) {
            assert!((u - v).norm() < 1e-12, "{u} vs {v}");
        }
    }

    #[test]
    fn empty_system() {
        let a = Matrix::zeros(3, 0);
        assert!(least_squares(&a, &[ZERO; 3]).solution.is_empty());
    }
}
