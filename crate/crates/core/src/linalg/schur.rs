use nalgebra::linalg::Schur;
use num_complex::Complex64;

use super::sylvester::solve_small_sylvester;
use super::{check_finite, check_square, complete_orthonormal, Matrix};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Real Schur factorization `A = U T Uᵀ` whose diagonal blocks appear in
/// non-decreasing order of eigenvalue modulus.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub u: Matrix,
    pub t: Matrix,
    /// Number of eigenvalues strictly inside the unit disc; these occupy
    /// the leading `split_index` rows and columns of `t`.
    pub split_index: usize,
    blocks: Vec<Block>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Block {
    pub start: usize,
    pub size: usize,
}

impl SchurForm {
    /// Eigenvalues in the order of the diagonal blocks.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.blocks.iter().flat_map(|b| block_eigenvalues(&self.t, *b)).collect()
    }

    /// `(start, size)` of each diagonal block.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.start, b.size)).collect()
    }
}

/// Unordered real Schur form with standardized blocks: every 2×2 block
/// carries a complex-conjugate pair.
pub fn real_schur(a: &Matrix) -> Result<SchurForm> {
    check_square(a, "matrix")?;
    check_finite(a, "matrix")?;
    let (u, t, blocks) = decompose(a)?;
    Ok(SchurForm { u, t, split_index: 0, blocks })
}

/// Schur form with blocks sorted by eigenvalue modulus and the unit-circle
/// split recorded.
pub fn ordered_schur(a: &Matrix, tol: &Tolerances) -> Result<SchurForm> {
    let n = check_square(a, "matrix")?;
    check_finite(a, "matrix")?;
    let (mut u, mut t, mut blocks) = decompose(a)?;
    for &b in &blocks {
        let m = block_modulus(&t, b);
        if (m - 1.0).abs() <= tol.circle {
            return Err(Error::EigenvalueOnCircle { modulus: m });
        }
    }

    // Bubble passes; ties within rounding are left in place so that no
    // swap is attempted between (nearly) equal eigenvalues.
    let mut moduli: Vec<f64> = blocks.iter().map(|&b| block_modulus(&t, b)).collect();
    let scale = moduli.iter().copied().fold(1.0_f64, f64::max);
    loop {
        let mut swapped = false;
        for j in 0..blocks.len().saturating_sub(1) {
            if moduli[j] - moduli[j + 1] > 1e-12 * scale {
                let (b1, b2) = swap_blocks(&mut t, &mut u, blocks[j], blocks[j + 1]);
                blocks[j] = b1;
                blocks[j + 1] = b2;
                moduli.swap(j, j + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }

    let split_index = blocks.iter().zip(&moduli).filter(|(_, &m)| m < 1.0).map(|(b, _)| b.size).sum();
    debug_assert!(split_index <= n);
    Ok(SchurForm { u, t, split_index, blocks })
}

/// Eigenvalues of a square matrix, conjugate pairs adjacent.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    Ok(real_schur(a)?.eigenvalues())
}

/// Largest eigenvalue modulus. Returns NaN for non-finite input or if the
/// Schur iteration fails.
pub fn spectral_radius(a: &Matrix) -> f64 {
    match eigenvalues(a) {
        Ok(ev) => ev.iter().map(|z| z.norm()).fold(0.0, f64::max),
        Err(_) => f64::NAN,
    }
}

fn decompose(a: &Matrix) -> Result<(Matrix, Matrix, Vec<Block>)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Matrix::zeros(0, 0), Matrix::zeros(0, 0), Vec::new()));
    }
    if n == 1 {
        return Ok((Matrix::identity(1, 1), a.clone(), vec![Block { start: 0, size: 1 }]));
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 1000 * n).ok_or(Error::SchurNotConverged)?;
    let (mut u, mut t) = schur.unpack();

    for j in 0..n {
        for i in j + 2..n {
            t[(i, j)] = 0.0;
        }
    }
    for i in 0..n - 1 {
        let sub = t[(i + 1, i)].abs();
        if sub <= f64::EPSILON * (t[(i, i)].abs() + t[(i + 1, i + 1)].abs()) {
            t[(i + 1, i)] = 0.0;
        }
    }

    let mut blocks = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            if i + 2 < n && t[(i + 2, i + 1)] != 0.0 {
                return Err(Error::SchurNotConverged);
            }
            if has_real_eigenvalues(&t, i) {
                triangularize_pair(&mut t, &mut u, i);
                blocks.push(Block { start: i, size: 1 });
                blocks.push(Block { start: i + 1, size: 1 });
            } else {
                blocks.push(Block { start: i, size: 2 });
            }
            i += 2;
        } else {
            blocks.push(Block { start: i, size: 1 });
            i += 1;
        }
    }
    Ok((u, t, blocks))
}

fn pair_discriminant(t: &Matrix, i: usize) -> f64 {
    let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
    let p = 0.5 * (a - d);
    p * p + b * c
}

fn has_real_eigenvalues(t: &Matrix, i: usize) -> bool {
    pair_discriminant(t, i) >= 0.0
}

/// Rotates a 2×2 diagonal block with real eigenvalues to upper triangular.
fn triangularize_pair(t: &mut Matrix, u: &mut Matrix, i: usize) {
    let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
    let p = 0.5 * (a - d);
    let disc = (p * p + b * c).max(0.0).sqrt();
    let mid = 0.5 * (a + d);
    let lambda = if mid >= 0.0 { mid + disc } else { mid - disc };
    // Eigenvector from whichever row of (M - λ) is better conditioned.
    let v1 = (b, lambda - a);
    let v2 = (lambda - d, c);
    let (x, y) = if v1.0.hypot(v1.1) >= v2.0.hypot(v2.1) { v1 } else { v2 };
    let r = x.hypot(y);
    if r == 0.0 {
        return;
    }
    let q = Matrix::from_row_slice(2, 2, &[x / r, -y / r, y / r, x / r]);
    apply_orthogonal(t, u, i, &q);
    t[(i + 1, i)] = 0.0;
}

/// `t <- diag(1, qᵀ, 1) t diag(1, q, 1)` and `u <- u diag(1, q, 1)`, with `q`
/// acting on rows/columns `i..i+q.nrows()`.
fn apply_orthogonal(t: &mut Matrix, u: &mut Matrix, i: usize, q: &Matrix) {
    let m = q.nrows();
    let n = t.nrows();
    let rows = q.transpose() * t.view((i, 0), (m, n));
    t.view_mut((i, 0), (m, n)).copy_from(&rows);
    let cols = t.view((0, i), (n, m)) * q;
    t.view_mut((0, i), (n, m)).copy_from(&cols);
    let ucols = u.view((0, i), (n, m)) * q;
    u.view_mut((0, i), (n, m)).copy_from(&ucols);
}

/// Exchanges two adjacent diagonal blocks by an orthogonal similarity.
fn swap_blocks(t: &mut Matrix, u: &mut Matrix, first: Block, second: Block) -> (Block, Block) {
    let i = first.start;
    let (p, q) = (first.size, second.size);
    let m = p + q;
    let t11 = t.view((i, i), (p, p)).into_owned();
    let t22 = t.view((i + p, i + p), (q, q)).into_owned();
    let t12 = t.view((i, i + p), (p, q)).into_owned();
    // Columns of [-X; I] span the invariant subspace of the second block.
    let x = solve_small_sylvester(&t11, &t22, &t12).expect("blocks with distinct moduli have disjoint spectra");
    let mut basis = Matrix::zeros(m, q);
    basis.view_mut((0, 0), (p, q)).copy_from(&(-x));
    basis.view_mut((p, 0), (q, q)).fill_with_identity();
    let thin = basis.qr().q();
    let full = complete_orthonormal(&thin);
    apply_orthogonal(t, u, i, &full);
    t.view_mut((i + q, i), (p, q)).fill(0.0);

    let b1 = Block { start: i, size: q };
    let b2 = Block { start: i + q, size: p };
    (b1, b2)
}

fn block_eigenvalues(t: &Matrix, b: Block) -> Vec<Complex64> {
    let i = b.start;
    if b.size == 1 {
        return vec![Complex64::new(t[(i, i)], 0.0)];
    }
    let mid = 0.5 * (t[(i, i)] + t[(i + 1, i + 1)]);
    let disc = pair_discriminant(t, i);
    if disc >= 0.0 {
        let s = disc.sqrt();
        vec![Complex64::new(mid + s, 0.0), Complex64::new(mid - s, 0.0)]
    } else {
        let s = (-disc).sqrt();
        vec![Complex64::new(mid, s), Complex64::new(mid, -s)]
    }
}

fn block_modulus(t: &Matrix, b: Block) -> f64 {
    block_eigenvalues(t, b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
