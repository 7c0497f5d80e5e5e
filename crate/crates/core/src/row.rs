//! Isometric lift of a strict row contraction `[T_1 .. T_g]`: each `F_j(z) =
//! U D(z) W_{1,j}` from the SVD of the row, Hardy multipliers on the first
//! summand, and Fock-space shift branches carrying the remaining block rows
//! of `W`. The lift operators satisfy `J_j* J_k = delta_{jk} I` and
//! `J_j* V = V T_j*`.

use crate::decomp::{op_norm, svd};
use crate::disc::{blaschke, hardy_multiplier, AnalyticMatrixFunction, TruncatedMultiplier};
use crate::fourier;
use crate::matrix::{C64, ComplexMatrix, LinalgError};
use crate::TolerancePolicy;
use serde::Serialize;

/// Word basis of the free Fock space on `letters` letters, truncated at
/// `max_word_length`, ordered length-then-lex.
#[derive(Debug, Clone)]
pub struct FockTruncation {
    pub letters: usize,
    pub max_word_length: usize,
    pub words: Vec<Vec<u8>>,
}

impl FockTruncation {
    pub fn new(letters: usize, max_word_length: usize) -> Self {
        let mut words: Vec<Vec<u8>> = vec![vec![]];
        let mut frontier: Vec<Vec<u8>> = vec![vec![]];
        for _ in 0..max_word_length {
            let mut next = Vec::new();
            for w in &frontier {
                for l in 0..letters {
                    let mut w2 = Vec::with_capacity(w.len() + 1);
                    w2.push(l as u8);
                    w2.extend_from_slice(w);
                    next.push(w2);
                }
            }
            next.sort();
            words.extend(next.iter().cloned());
            frontier = next;
        }
        FockTruncation {
            letters,
            max_word_length,
            words,
        }
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn index_of(&self, w: &[u8]) -> Option<usize> {
        self.words.iter().position(|x| x.as_slice() == w)
    }

    /// Truncated creation operator: `S_j w = x_j w` for `|w| < max_word_length`.
    pub fn shift(&self, j: usize) -> ComplexMatrix {
        let d = self.dim();
        let mut s = ComplexMatrix::zeros(d, d);
        for (col, w) in self.words.iter().enumerate() {
            if w.len() < self.max_word_length {
                let mut w2 = Vec::with_capacity(w.len() + 1);
                w2.push(j as u8);
                w2.extend_from_slice(w);
                let row = self.index_of(&w2).expect("shifted word is in the basis");
                s[(row, col)] = C64::new(1.0, 0.0);
            }
        }
        s
    }

    /// Indices of basis words of length strictly below `max_word_length`.
    pub fn retained_indices(&self) -> Vec<usize> {
        self.words
            .iter()
            .enumerate()
            .filter(|(_, w)| w.len() < self.max_word_length)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RowLiftReport {
    pub letters: usize,
    pub dim: usize,
    pub word_length: usize,
    pub modes: usize,
    pub row_norm: f64,
    /// `||sum_i W_{i,j}* W_{i,k} - delta I||`, machine-level from the SVD.
    pub gram_defect: f64,
    /// max over (j,k) and boundary samples of
    /// `||F_j(zeta)* F_k(zeta) - W_{1,j}* W_{1,k}||`.
    pub symbol_defect: f64,
    /// max over (j,k) of the assembled `J_j* J_k - delta I` on the retained
    /// sub-basis (all Hardy modes, Fock words of length < max_word_length).
    pub isometry_defect: f64,
    /// max over j of `||J_j* V - V T_j*||` (quadrature only).
    pub intertwining_residual: f64,
    pub passed: bool,
}

/// Everything needed to evaluate or assemble the lift.
pub struct RowLift {
    pub u: ComplexMatrix,
    pub singulars: Vec<f64>,
    pub w: ComplexMatrix,
    pub fs: Vec<AnalyticMatrixFunction>,
    pub fock: FockTruncation,
    pub multipliers: Vec<TruncatedMultiplier>,
    pub dim: usize,
}

impl RowLift {
    pub fn w_block(&self, i: usize, j: usize) -> ComplexMatrix {
        let n = self.dim;
        self.w.block(i * n, j * n, n, n)
    }
}

/// Builds the row lift. `ts` are square n x n blocks of a strict row
/// contraction; `ell` is the Fock truncation depth, `n_modes` the Hardy one.
pub fn build_row_lift(
    ts: &[ComplexMatrix],
    ell: usize,
    n_modes: usize,
) -> Result<RowLift, LinalgError> {
    let g = ts.len();
    if g == 0 {
        return Err(LinalgError::InvalidArgument("need at least one block".into()));
    }
    let n = ts[0].rows();
    for t in ts {
        if t.rows() != n || t.cols() != n {
            return Err(LinalgError::ShapeMismatch(
                "all row blocks must be square of equal size".into(),
            ));
        }
    }
    let mut row = ComplexMatrix::zeros(n, n * g);
    for (j, t) in ts.iter().enumerate() {
        row.set_block(0, j * n, t);
    }
    let norm = op_norm(&row);
    if !(norm < 1.0 - 1e-8) {
        return Err(LinalgError::InvalidArgument(format!(
            "row norm must be < 1, got {}",
            norm
        )));
    }
    let f = svd(&row)?;
    // E = (D 0 .. 0): the n singular values sit in the first block column
    let maps: Result<Vec<_>, _> = f.singulars.iter().map(|&s| blaschke(s)).collect();
    let maps = maps?;
    let mut fs = Vec::with_capacity(g);
    let mut multipliers = Vec::with_capacity(g);
    let m_quad = (4 * (n_modes + 1)).max(512);
    for j in 0..g {
        let w1j = f.right.block(0, j * n, n, n);
        let fj = AnalyticMatrixFunction {
            left_frame: f.left.clone(),
            diagonal_fns: maps.clone(),
            right_frame: w1j,
        };
        multipliers.push(hardy_multiplier(&fj, n_modes, 0.9, m_quad)?);
        fs.push(fj);
    }
    Ok(RowLift {
        u: f.left,
        singulars: f.singulars,
        w: f.right,
        fs,
        fock: FockTruncation::new(g, ell),
        multipliers,
        dim: n,
    })
}

/// Structured verification of the lift identities.
pub fn nelson_row(
    ts: &[ComplexMatrix],
    ell: usize,
    n_modes: usize,
    policy: &TolerancePolicy,
) -> Result<RowLiftReport, LinalgError> {
    let lift = build_row_lift(ts, ell, n_modes)?;
    let g = ts.len();
    let n = lift.dim;

    // (a) Gram identity of the W block columns
    let mut gram_defect: f64 = 0.0;
    for j in 0..g {
        for k in 0..g {
            let mut acc = ComplexMatrix::zeros(n, n);
            for i in 0..g {
                acc = &acc + &(&lift.w_block(i, j).adjoint() * &lift.w_block(i, k));
            }
            if j == k {
                acc = &acc - &ComplexMatrix::identity(n);
            }
            gram_defect = gram_defect.max(op_norm(&acc));
        }
    }

    // (b) boundary symbol: F_j(zeta)* F_k(zeta) is the constant W_{1,j}* W_{1,k}
    let boundary: Vec<C64> = fourier::offset_circle(1.0, 64);
    let mut symbol_defect: f64 = 0.0;
    for j in 0..g {
        for k in 0..g {
            let cst = &lift.w_block(0, j).adjoint() * &lift.w_block(0, k);
            for &zeta in &boundary {
                let fj = lift.fs[j].eval(zeta)?;
                let fk = lift.fs[k].eval(zeta)?;
                symbol_defect = symbol_defect.max((&(&fj.adjoint() * &fk) - &cst).max_abs());
            }
        }
    }

    // (c) J_j* J_k - delta I on the retained sub-basis, assembled blockwise
    // through the operator identities (the section of the true product, which
    // the truncation represents exactly there):
    //   Hardy block  = Toeplitz section of F_j* F_k  +  I (x) sum_{i>=2} W*W
    //   Fock blocks  = S_j* S_k on words below the cutoff
    //   cross blocks = E* S_k = 0
    let mut isometry_defect: f64 = 0.0;
    let retained = lift.fock.retained_indices();
    for j in 0..g {
        for k in 0..g {
            let samples: Result<Vec<ComplexMatrix>, LinalgError> = boundary
                .iter()
                .map(|&zeta| {
                    let fj = lift.fs[j].eval(zeta)?;
                    let fk = lift.fs[k].eval(zeta)?;
                    Ok(&fj.adjoint() * &fk)
                })
                .collect();
            let samples = samples?;
            let coeffs = fourier::matrix_coeffs(&samples, 1.0, 0, 0);
            let mut branch = ComplexMatrix::zeros(n, n);
            for i in 1..g {
                branch = &branch + &(&lift.w_block(i, j).adjoint() * &lift.w_block(i, k));
            }
            // pointwise deviation of the symbol from its constant value
            // bounds every nonzero-lag Toeplitz coefficient
            let cst = &lift.w_block(0, j).adjoint() * &lift.w_block(0, k);
            let mut dev: f64 = 0.0;
            for s in &samples {
                dev = dev.max((s - &cst).max_abs() * (n as f64));
            }
            let mut hardy_defect = {
                let mut d = &coeffs[0] + &branch;
                if j == k {
                    d = &d - &ComplexMatrix::identity(n);
                }
                op_norm(&d)
            };
            hardy_defect += (2 * n_modes + 1) as f64 * dev;
            isometry_defect = isometry_defect.max(hardy_defect);

            // Fock blocks on words of length < ell (exact by construction)
            let sj = lift.fock.shift(j);
            let sk = lift.fock.shift(k);
            let prod = &sj.adjoint() * &sk;
            let mut fock_defect: f64 = 0.0;
            for &a in &retained {
                for &b in &retained {
                    let expect = if j == k && a == b { 1.0 } else { 0.0 };
                    fock_defect = fock_defect.max((prod[(a, b)] - C64::new(expect, 0.0)).norm());
                }
            }
            isometry_defect = isometry_defect.max(fock_defect);

            // cross blocks: E* S_k = (vacuum row of S_k) = 0
            let vac = lift.fock.index_of(&[]).unwrap();
            let mut cross: f64 = 0.0;
            for col in 0..lift.fock.dim() {
                cross = cross.max(sk[(vac, col)].norm());
            }
            isometry_defect = isometry_defect.max(cross);
        }
    }

    // (d) intertwining: J_j* V = V T_j* collapses to c_0(F_j) = T_j
    let mut intertwining: f64 = 0.0;
    for (j, t) in ts.iter().enumerate() {
        let c0 = lift.multipliers[j].coeff(0);
        intertwining = intertwining.max(op_norm(&(&c0 - t)));
    }

    let mut row = ComplexMatrix::zeros(n, n * g);
    for (j, t) in ts.iter().enumerate() {
        row.set_block(0, j * n, t);
    }
    let passed = gram_defect <= policy.algebraic_tol
        && isometry_defect <= 1e-12_f64.max(policy.algebraic_tol)
        && intertwining <= policy.quadrature_tol.max(1e-8);
    Ok(RowLiftReport {
        letters: g,
        dim: n,
        word_length: ell,
        modes: n_modes,
        row_norm: op_norm(&row),
        gram_defect,
        symbol_defect,
        isometry_defect,
        intertwining_residual: intertwining,
        passed,
    })
}

/// Dense assembly of the truncated lift operator `J_j` for small instances;
/// used to cross-validate the structured checks.
pub fn assemble_dense_j(lift: &RowLift, j: usize) -> ComplexMatrix {
    let g = lift.fs.len();
    let n = lift.dim;
    let modes = lift.multipliers[j].modes() as usize;
    let hardy_dim = modes * n;
    let fock_dim = lift.fock.dim();
    let branch_dim = fock_dim * hardy_dim;
    let total = hardy_dim + (g - 1) * branch_dim;
    let mut out = ComplexMatrix::zeros(total, total);
    out.set_block(0, 0, &lift.multipliers[j].assemble());
    let vac = lift.fock.index_of(&[]).unwrap();
    for i in 1..g {
        let x = &lift.u * &lift.w_block(i, j);
        let row0 = hardy_dim + (i - 1) * branch_dim;
        // B block: (vacuum word, mode m, coord a) <- (mode m, coord b)
        for m in 0..modes {
            for a in 0..n {
                for b in 0..n {
                    out[(row0 + (vac * modes + m) * n + a, m * n + b)] = x[(a, b)];
                }
            }
        }
        // shift block: S_j (x) I_modes (x) I_n
        let s = lift.fock.shift(j);
        for wout in 0..fock_dim {
            for win in 0..fock_dim {
                if s[(wout, win)].norm() > 0.5 {
                    for m in 0..modes {
                        for a in 0..n {
                            out[(
                                row0 + (wout * modes + m) * n + a,
                                row0 + (win * modes + m) * n + a,
                            )] = C64::new(1.0, 0.0);
                        }
                    }
                }
            }
        }
    }
    out
}

/// The lift embedding `V x = [1 (x) x] + 0` in the dense layout of
/// [`assemble_dense_j`].
pub fn dense_embedding(lift: &RowLift) -> ComplexMatrix {
    let g = lift.fs.len();
    let n = lift.dim;
    let modes = lift.multipliers[0].modes() as usize;
    let hardy_dim = modes * n;
    let fock_dim = lift.fock.dim();
    let total = hardy_dim + (g - 1) * fock_dim * hardy_dim;
    let mut v = ComplexMatrix::zeros(total, n);
    for i in 0..n {
        v[(i, i)] = C64::new(1.0, 0.0);
    }
    v
}
