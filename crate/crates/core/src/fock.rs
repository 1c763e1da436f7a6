//! Brute-force reference states in a truncated Fock basis.
//!
//! States are built from their number-basis expansions, the loss channel is
//! applied through its Kraus operators, and error probabilities come from
//! an eigendecomposition of the Helstrom matrix. Nothing here relies on the
//! Gaussian closed forms, which is what makes it usable as an oracle for
//! them.
//!
//! Two-mode basis states `|m⟩_S ⊗ |n⟩_R` are indexed `m * cutoff + n`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{check_unit_interval, ReadingError, Result};
use crate::gaussian::TwoModeCovariance;

/// Default bound on the probability mass discarded by truncation.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Eigenvalues below this magnitude do not count towards a trace norm.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Completeness tolerance for the Kraus set on its protected sub-basis.
pub const KRAUS_COMPLETENESS_TOLERANCE: f64 = 1e-12;

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const NEGATIVITY_TOLERANCE: f64 = 1e-10;

/// Default tolerance on residuals from the block standard form.
pub const MOMENT_STRUCTURE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modes {
    One,
    Two,
}

/// Truncated pure state with the norm it is missing.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    modes: Modes,
    cutoff: usize,
    amplitudes: Vec<Complex64>,
    tail: f64,
    tolerance: f64,
}

impl StateVector {
    /// Wraps explicit amplitudes. The tail is taken as `1 - ‖ψ‖²`.
    pub fn from_amplitudes(modes: Modes, cutoff: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_cutoff(cutoff)?;
        let dim = match modes {
            Modes::One => cutoff,
            Modes::Two => cutoff * cutoff,
        };
        if amplitudes.len() != dim {
            return Err(ReadingError::DimensionMismatch {
                left: format!("{} amplitudes", amplitudes.len()),
                right: format!("dimension {dim}"),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm > 1.0 + 1e-12 {
            return Err(ReadingError::Configuration(format!(
                "state norm {norm} exceeds 1"
            )));
        }
        Ok(Self {
            modes,
            cutoff,
            amplitudes,
            tail: (1.0 - norm).max(0.0),
            tolerance: DEFAULT_TAIL_TOLERANCE,
        })
    }

    pub fn modes(&self) -> Modes {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `1 - ‖ψ‖²` of the untruncated state, computed from the exact tail of
    /// its number distribution.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Mean photon number of `mode` (0 = signal, 1 = reference),
    /// normalised to the truncated norm.
    pub fn mean_photons(&self, mode: usize) -> f64 {
        let n = self.cutoff;
        let weighted: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let count = match (self.modes, mode) {
                    (Modes::One, _) => i,
                    (Modes::Two, 0) => i / n,
                    (Modes::Two, _) => i % n,
                };
                count as f64 * a.norm_sqr()
            })
            .sum();
        weighted / self.norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_same_space(self.modes, self.cutoff, other.modes, other.cutoff)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// The projector `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> FockDensity {
        let support: Vec<(usize, Complex64)> = self
            .amplitudes
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, a)| *a != Complex64::new(0.0, 0.0))
            .collect();
        let mut matrix = SparseHermitian::new(self.dim());
        for &(i, a) in &support {
            for &(j, b) in &support {
                matrix.add(i, j, a * b.conj());
            }
        }
        FockDensity {
            matrix,
            modes: self.modes,
            cutoff: self.cutoff,
            tail: self.tail,
            tolerance: self.tolerance,
        }
    }
}

/// Hermitian matrix stored by its nonzero entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseHermitian {
    dim: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl SparseHermitian {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries
            .get(&(row, col))
            .copied()
            .unwrap_or_default()
    }

    pub fn add(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(row < self.dim && col < self.dim, "index out of range");
        *self.entries.entry((row, col)).or_default() += value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.entries.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn trace(&self) -> f64 {
        self.entries
            .iter()
            .filter(|((i, j), _)| i == j)
            .map(|(_, v)| v.re)
            .sum()
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &SparseHermitian, beta: f64) -> SparseHermitian {
        let mut out = SparseHermitian::new(self.dim);
        for (i, j, v) in self.iter() {
            out.add(i, j, v * alpha);
        }
        for (i, j, v) in other.iter() {
            out.add(i, j, v * beta);
        }
        out
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.iter()
            .map(|(i, j, v)| (v - self.get(j, i).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Index sets of the connected components of the sparsity graph. The
    /// matrix is block diagonal over them, so each block can be
    /// diagonalised on its own.
    fn blocks(&self) -> Vec<Vec<usize>> {
        let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
        fn find(parent: &mut BTreeMap<usize, usize>, x: usize) -> usize {
            let mut root = x;
            while let Some(&p) = parent.get(&root) {
                if p == root {
                    break;
                }
                root = p;
            }
            let mut node = x;
            while node != root {
                let next = parent[&node];
                parent.insert(node, root);
                node = next;
            }
            root
        }
        for (i, j, v) in self.iter() {
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            parent.entry(i).or_insert(i);
            parent.entry(j).or_insert(j);
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent.insert(ri.max(rj), ri.min(rj));
            }
        }
        let nodes: Vec<usize> = parent.keys().copied().collect();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for node in nodes {
            let root = find(&mut parent, node);
            groups.entry(root).or_default().push(node);
        }
        groups.into_values().collect()
    }

    /// All eigenvalues on the support of the matrix, ascending. Indices
    /// outside every block contribute exact zeros and are omitted.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values = Vec::new();
        for block in self.blocks() {
            if block.len() == 1 {
                values.push(self.get(block[0], block[0]).re);
                continue;
            }
            let local: BTreeMap<usize, usize> =
                block.iter().enumerate().map(|(k, &g)| (g, k)).collect();
            let mut dense = DMatrix::<Complex64>::zeros(block.len(), block.len());
            for &g in &block {
                for (&(_, j), &v) in self.entries.range((g, 0)..=(g, usize::MAX)) {
                    dense[(local[&g], local[&j])] = v;
                }
            }
            // Symmetrise away rounding-level anti-Hermitian parts.
            let herm = (&dense + dense.adjoint()) * Complex64::new(0.5, 0.0);
            values.extend(SymmetricEigen::new(herm).eigenvalues.iter().copied());
        }
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|v| v.abs() >= EIGENVALUE_FLOOR)
            .map(f64::abs)
            .sum()
    }
}

/// Truncated density matrix with the probability mass it is missing.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    matrix: SparseHermitian,
    modes: Modes,
    cutoff: usize,
    tail: f64,
    tolerance: f64,
}

impl FockDensity {
    pub fn matrix(&self) -> &SparseHermitian {
        &self.matrix
    }

    pub fn modes(&self) -> Modes {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Tail tolerance this density was built under.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// `⟨ψ|ρ|ψ⟩`; the fidelity with `ψ` when this state is normalised.
    pub fn expectation_pure(&self, psi: &StateVector) -> Result<f64> {
        check_same_space(self.modes, self.cutoff, psi.modes, psi.cutoff)?;
        let a = psi.amplitudes();
        Ok(self
            .matrix
            .iter()
            .map(|(i, j, v)| (a[i].conj() * v * a[j]).re)
            .sum())
    }

    /// Reduced state of the signal mode.
    pub fn partial_trace_reference(&self) -> Result<FockDensity> {
        if self.modes != Modes::Two {
            return Err(ReadingError::DimensionMismatch {
                left: "single-mode density".into(),
                right: "two-mode density".into(),
            });
        }
        let n = self.cutoff;
        let mut reduced = SparseHermitian::new(n);
        for (i, j, v) in self.matrix.iter() {
            if i % n == j % n {
                reduced.add(i / n, j / n, v);
            }
        }
        Ok(FockDensity {
            matrix: reduced,
            modes: Modes::One,
            cutoff: n,
            tail: self.tail,
            tolerance: self.tolerance,
        })
    }

    /// Checks the density-matrix invariants: Hermitian, no eigenvalue below
    /// `-1e-10`, and `trace + tail = 1`.
    pub fn validate(&self) -> Result<()> {
        let defect = self.matrix.hermiticity_defect();
        if defect > HERMITIAN_TOLERANCE {
            return Err(ReadingError::Configuration(format!(
                "density is not Hermitian (defect {defect:e})"
            )));
        }
        let lowest = self.matrix.eigenvalues().first().copied().unwrap_or(0.0);
        if lowest < -NEGATIVITY_TOLERANCE {
            return Err(ReadingError::Configuration(format!(
                "density has negative eigenvalue {lowest:e}"
            )));
        }
        let mass = self.trace() + self.tail;
        if (mass - 1.0).abs() > 1e-10 {
            return Err(ReadingError::Configuration(format!(
                "trace + tail = {mass} differs from 1"
            )));
        }
        if self.tail > self.tolerance {
            return Err(ReadingError::InsufficientCutoff {
                cutoff: self.cutoff,
                tail: self.tail,
                tolerance: self.tolerance,
            });
        }
        Ok(())
    }
}

fn check_same_space(m1: Modes, c1: usize, m2: Modes, c2: usize) -> Result<()> {
    if m1 == m2 && c1 == c2 {
        Ok(())
    } else {
        Err(ReadingError::DimensionMismatch {
            left: format!("{m1:?} mode(s), cutoff {c1}"),
            right: format!("{m2:?} mode(s), cutoff {c2}"),
        })
    }
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff == 0 {
        Err(ReadingError::Configuration("cutoff must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Poisson weights `e^{-n̄} n̄^k / k!` from 0 until the remainder is
/// negligible, together with their suffix sums.
fn poisson_suffix_sums(nbar: f64, min_len: usize) -> Vec<f64> {
    let len = min_len.max((nbar + 40.0 * nbar.sqrt() + 60.0).ceil() as usize);
    let mut weights = Vec::with_capacity(len + 1);
    let mut w = (-nbar).exp();
    for k in 0..len {
        weights.push(w);
        w *= nbar / (k + 1) as f64;
    }
    let mut suffix = vec![0.0; len + 1];
    for k in (0..len).rev() {
        suffix[k] = suffix[k + 1] + weights[k];
    }
    suffix
}

/// Smallest cutoff whose Poisson tail for `n̄` photons is below `tolerance`.
pub fn coherent_cutoff(nbar: f64, tolerance: f64) -> usize {
    if nbar == 0.0 {
        return 1;
    }
    let suffix = poisson_suffix_sums(nbar, 0);
    (1..suffix.len())
        .find(|&n| suffix[n] < tolerance)
        .unwrap_or(suffix.len())
}

/// Coherent state `|α⟩` with real `α ≥ 0`, truncated to `cutoff` levels.
pub fn coherent_state_vector(
    alpha_magnitude: f64,
    cutoff: usize,
    tolerance: f64,
) -> Result<StateVector> {
    check_cutoff(cutoff)?;
    if !(alpha_magnitude >= 0.0 && alpha_magnitude.is_finite()) {
        return Err(ReadingError::Domain {
            name: "alpha",
            value: alpha_magnitude,
            expected: ">= 0",
        });
    }
    let nbar = alpha_magnitude * alpha_magnitude;
    let mut amplitudes = Vec::with_capacity(cutoff);
    let mut c = (-nbar / 2.0).exp();
    for k in 0..cutoff {
        amplitudes.push(Complex64::new(c, 0.0));
        c *= alpha_magnitude / ((k + 1) as f64).sqrt();
    }
    let tail = if nbar == 0.0 {
        0.0
    } else {
        poisson_suffix_sums(nbar, cutoff + 1)[cutoff]
    };
    if tail > tolerance {
        return Err(ReadingError::InsufficientCutoff {
            cutoff,
            tail,
            tolerance,
        });
    }
    Ok(StateVector {
        modes: Modes::One,
        cutoff,
        amplitudes,
        tail,
        tolerance,
    })
}

/// Schmidt coefficient ratio `λ` of the two-mode squeezed vacuum.
fn tmsv_lambda(mu: f64) -> Result<f64> {
    if !(mu >= 1.0 && mu.is_finite()) {
        return Err(ReadingError::Domain {
            name: "mu",
            value: mu,
            expected: ">= 1",
        });
    }
    Ok(((mu - 1.0) / (mu + 1.0)).sqrt())
}

/// Smallest cutoff with geometric tail `λ^{2N}` below `tolerance`.
pub fn tmsv_cutoff(mu: f64, tolerance: f64) -> Result<usize> {
    let lambda_sq = tmsv_lambda(mu)?.powi(2);
    if lambda_sq == 0.0 {
        return Ok(1);
    }
    let mut n = (tolerance.ln() / lambda_sq.ln()).floor().max(1.0) as usize;
    while lambda_sq.powi(n as i32) >= tolerance {
        n += 1;
    }
    while n > 1 && lambda_sq.powi((n - 1) as i32) < tolerance {
        n -= 1;
    }
    Ok(n)
}

/// Two-mode squeezed vacuum `√(1-λ²) Σ λⁿ |n, n⟩`, `λ = √((μ-1)/(μ+1))`.
pub fn tmsv_state_vector(mu: f64, cutoff: usize, tolerance: f64) -> Result<StateVector> {
    check_cutoff(cutoff)?;
    let lambda = tmsv_lambda(mu)?;
    let norm = (1.0 - lambda * lambda).sqrt();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); cutoff * cutoff];
    let mut c = norm;
    for n in 0..cutoff {
        amplitudes[n * cutoff + n] = Complex64::new(c, 0.0);
        c *= lambda;
    }
    let tail = (lambda * lambda).powi(cutoff as i32);
    if tail > tolerance {
        return Err(ReadingError::InsufficientCutoff {
            cutoff,
            tail,
            tolerance,
        });
    }
    Ok(StateVector {
        modes: Modes::Two,
        cutoff,
        amplitudes,
        tail,
        tolerance,
    })
}

/// Kraus decomposition of the pure-loss channel of transmissivity `r`:
/// `K_l = Σ_n √C(n,l) r^{(n-l)/2} (1-r)^{l/2} |n-l⟩⟨n|`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossChannel {
    r: f64,
    cutoff: usize,
    max_loss: usize,
    operators: Vec<DMatrix<f64>>,
}

impl LossChannel {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn max_loss(&self) -> usize {
        self.max_loss
    }

    pub fn operators(&self) -> &[DMatrix<f64>] {
        &self.operators
    }

    /// `Σ_l K_l† K_l`, which is diagonal for this channel.
    pub fn completeness(&self) -> DMatrix<f64> {
        self.operators
            .iter()
            .fold(DMatrix::zeros(self.cutoff, self.cutoff), |acc, k| {
                acc + k.transpose() * k
            })
    }

    /// Largest deviation of `Σ K†K` from the identity on the levels
    /// `n ≤ max_loss`, where no loss event is cut off.
    pub fn completeness_defect(&self) -> f64 {
        let sum = self.completeness();
        let protected = (self.max_loss + 1).min(self.cutoff);
        let mut worst = 0.0f64;
        for i in 0..protected {
            for j in 0..protected {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((sum[(i, j)] - target).abs());
            }
        }
        worst
    }
}

/// Builds the loss channel with loss events `0..=max_loss`. Completeness
/// holds exactly on the levels `n ≤ max_loss`; `max_loss = cutoff - 1`
/// makes the channel trace preserving on the whole truncated space.
pub fn loss_channel_kraus(r: f64, max_loss: usize, cutoff: usize) -> Result<LossChannel> {
    check_unit_interval("r", r)?;
    check_cutoff(cutoff)?;
    if max_loss > cutoff {
        return Err(ReadingError::Configuration(format!(
            "max_loss {max_loss} exceeds cutoff {cutoff}"
        )));
    }
    let top = max_loss.min(cutoff - 1);
    let last = if r == 1.0 { 0 } else { top };
    let (amp_keep, amp_lose) = (r.sqrt(), (1.0 - r).sqrt());
    let operators = (0..=last)
        .map(|l| {
            let mut k = DMatrix::zeros(cutoff, cutoff);
            // C(n, l) built up along n.
            let mut binom = 1.0f64;
            for n in l..cutoff {
                if n > l {
                    binom = binom * n as f64 / (n - l) as f64;
                }
                k[(n - l, n)] =
                    binom.sqrt() * amp_keep.powi((n - l) as i32) * amp_lose.powi(l as i32);
            }
            k
        })
        .collect();
    let channel = LossChannel {
        r,
        cutoff,
        max_loss: top,
        operators,
    };
    let defect = channel.completeness_defect();
    if defect > KRAUS_COMPLETENESS_TOLERANCE {
        return Err(ReadingError::Configuration(format!(
            "Kraus completeness violated by {defect:e} on the protected sub-basis"
        )));
    }
    Ok(channel)
}

/// `(E_r ⊗ I)(|ψ⟩⟨ψ|)` with the loss acting on the signal mode. Single-mode
/// inputs are treated as a bare signal.
pub fn apply_channel_to_signal(state: &StateVector, channel: &LossChannel) -> Result<FockDensity> {
    if channel.cutoff != state.cutoff {
        return Err(ReadingError::DimensionMismatch {
            left: format!("state cutoff {}", state.cutoff),
            right: format!("channel cutoff {}", channel.cutoff),
        });
    }
    let n = state.cutoff;
    let cols = match state.modes {
        Modes::One => 1,
        Modes::Two => n,
    };
    // Rows index the signal, columns the reference.
    let psi = DMatrix::from_fn(n, cols, |s, r| state.amplitudes[s * cols + r]);
    let mut matrix = SparseHermitian::new(state.dim());
    for k in &channel.operators {
        let kc = k.map(|x| Complex64::new(x, 0.0));
        let phi = kc * &psi;
        let support: Vec<(usize, Complex64)> = phi
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
            // nalgebra is column-major: flat index = r * n + s.
            .map(|(flat, &v)| ((flat % n) * cols + flat / n, v))
            .collect();
        for &(i, a) in &support {
            for &(j, b) in &support {
                matrix.add(i, j, a * b.conj());
            }
        }
    }
    // Mass carried by levels whose loss events were not all kept.
    let completeness = channel.completeness();
    let lost: f64 = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let deficit = 1.0 - completeness[(i / cols, i / cols)];
            if deficit > KRAUS_COMPLETENESS_TOLERANCE {
                a.norm_sqr() * deficit
            } else {
                0.0
            }
        })
        .sum();
    Ok(FockDensity {
        matrix,
        modes: state.modes,
        cutoff: n,
        tail: state.tail + lost,
        tolerance: state.tolerance,
    })
}

/// Lossy output `σ₀` for a memory cell of reflectivity `r`. `max_loss`
/// defaults to `cutoff - 1`.
pub fn apply_loss_to_signal_fock(
    state: &StateVector,
    r: f64,
    max_loss: Option<usize>,
) -> Result<FockDensity> {
    let channel = loss_channel_kraus(r, max_loss.unwrap_or(state.cutoff - 1), state.cutoff)?;
    apply_channel_to_signal(state, &channel)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelstromOutcome {
    /// Minimum error probability on the truncated space.
    pub p_bar: f64,
    /// Truncation tails of both states plus an eigensolver rounding floor.
    pub error_bar: f64,
    /// `‖p₁ρ₁ - p₀ρ₀‖₁`.
    pub trace_norm: f64,
}

/// Minimum error `[1 - ‖p₁ρ₁ - p₀ρ₀‖₁]/2` from an eigendecomposition of the
/// Helstrom matrix, with `p₁ = 1 - p₀`.
pub fn helstrom_exact(rho0: &FockDensity, rho1: &FockDensity, p0: f64) -> Result<HelstromOutcome> {
    check_unit_interval("p0", p0)?;
    check_same_space(rho0.modes, rho0.cutoff, rho1.modes, rho1.cutoff)?;
    for rho in [rho0, rho1] {
        if rho.tail > rho.tolerance {
            return Err(ReadingError::InsufficientCutoff {
                cutoff: rho.cutoff,
                tail: rho.tail,
                tolerance: rho.tolerance,
            });
        }
    }
    let helstrom = rho1.matrix.combine(1.0 - p0, &rho0.matrix, -p0);
    let trace_norm = helstrom.trace_norm();
    let roundoff = 16.0 * f64::EPSILON * rho0.dim() as f64;
    Ok(HelstromOutcome {
        p_bar: ((1.0 - trace_norm) / 2.0).clamp(0.0, 1.0),
        error_bar: rho0.tail + rho1.tail + roundoff,
        trace_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ladder {
    Lower(usize),
    Raise(usize),
}

/// `O|m, n⟩ = coef |m', n'⟩` for a product of ladder operators, applied
/// right to left. Occupations are not capped, so the result is exact.
fn apply_ladders(ops: &[Ladder], occupation: [usize; 2]) -> Option<(f64, [usize; 2])> {
    let mut occ = occupation;
    let mut coef = 1.0;
    for op in ops.iter().rev() {
        match *op {
            Ladder::Lower(m) => {
                if occ[m] == 0 {
                    return None;
                }
                coef *= (occ[m] as f64).sqrt();
                occ[m] -= 1;
            }
            Ladder::Raise(m) => {
                occ[m] += 1;
                coef *= (occ[m] as f64).sqrt();
            }
        }
    }
    Some((coef, occ))
}

/// Quadrature moments of a two-mode density fitted to block standard form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub covariance: TwoModeCovariance,
    /// Full 4×4 symmetrised covariance in order `(q_S, p_S, q_R, p_R)`.
    pub matrix: [[f64; 4]; 4],
    pub first_moments: [f64; 4],
    /// Largest deviation of the moments from the `(aI, bI, cZ)` pattern,
    /// including any nonzero first moment.
    pub residual: f64,
}

/// Second moments `V_jk = ⟨{ΔX_j, ΔX_k}⟩/2` with `q = a + a†`,
/// `p = i(a† - a)`, normalised by the truncated trace.
pub fn moments_from_density(rho: &FockDensity, tolerance: f64) -> Result<MomentEstimate> {
    if rho.modes != Modes::Two {
        return Err(ReadingError::DimensionMismatch {
            left: "single-mode density".into(),
            right: "two-mode density".into(),
        });
    }
    let n = rho.cutoff;
    let trace = rho.trace();
    let expect = |ops: &[Ladder]| -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for col in 0..rho.dim() {
            if let Some((coef, [s, r])) = apply_ladders(ops, [col / n, col % n]) {
                if s < n && r < n {
                    total += rho.matrix.get(col, s * n + r) * coef;
                }
            }
        }
        total / trace
    };
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    // Each quadrature as a combination of one lowering and one raising op.
    let quad = |mode: usize, momentum: bool| -> [(Complex64, Ladder); 2] {
        if momentum {
            [(-i, Ladder::Lower(mode)), (i, Ladder::Raise(mode))]
        } else {
            [(one, Ladder::Lower(mode)), (one, Ladder::Raise(mode))]
        }
    };
    let quads = [quad(0, false), quad(0, true), quad(1, false), quad(1, true)];

    let mut first = [0.0; 4];
    for (k, q) in quads.iter().enumerate() {
        first[k] = q.iter().map(|(c, op)| c * expect(&[*op])).sum::<Complex64>().re;
    }
    let mut second = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (j, qj) in quads.iter().enumerate() {
        for (k, qk) in quads.iter().enumerate() {
            second[j][k] = qj
                .iter()
                .flat_map(|(cj, oj)| qk.iter().map(move |(ck, ok)| (cj * ck, [*oj, *ok])))
                .map(|(c, ops)| c * expect(&ops))
                .sum();
        }
    }
    let mut v = [[0.0; 4]; 4];
    for j in 0..4 {
        for k in 0..4 {
            v[j][k] = (second[j][k] + second[k][j]).re / 2.0 - first[j] * first[k];
        }
    }

    let a = (v[0][0] + v[1][1]) / 2.0;
    let b = (v[2][2] + v[3][3]) / 2.0;
    let c = (v[0][2] - v[1][3]) / 2.0;
    let pattern = [
        [a, 0.0, c, 0.0],
        [0.0, a, 0.0, -c],
        [c, 0.0, b, 0.0],
        [0.0, -c, 0.0, b],
    ];
    let mut residual = first.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for j in 0..4 {
        for k in 0..4 {
            residual = residual.max((v[j][k] - pattern[j][k]).abs());
        }
    }
    if residual > tolerance {
        return Err(ReadingError::Structure {
            residual,
            tolerance,
        });
    }
    Ok(MomentEstimate {
        covariance: TwoModeCovariance::new(a, b, c)?,
        matrix: v,
        first_moments: first,
        residual,
    })
}

/// Dense copy of a density, for small-cutoff inspection.
pub fn to_dense(rho: &FockDensity) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(rho.dim(), rho.dim());
    for (i, j, v) in rho.matrix.iter() {
        m[(i, j)] = v;
    }
    m
}

/// Dense amplitude vector of a state.
pub fn to_dense_vector(state: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(state.amplitudes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TOL: f64 = DEFAULT_TAIL_TOLERANCE;

    fn fock_number(cutoff: usize, n: usize) -> StateVector {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); cutoff];
        amplitudes[n] = Complex64::new(1.0, 0.0);
        StateVector {
            modes: Modes::One,
            cutoff,
            amplitudes,
            tail: 0.0,
            tolerance: TOL,
        }
    }

    #[test]
    fn coherent_vacuum() {
        let v = coherent_state_vector(0.0, 5, TOL).unwrap();
        assert_eq!(v.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(v.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
        assert_eq!(v.tail(), 0.0);
    }

    #[test]
    fn coherent_tail_is_exact_poisson_remainder() {
        let v = coherent_state_vector(1.0, 30, TOL).unwrap();
        assert!(v.tail() < 1e-30 && v.tail() > 0.0, "{}", v.tail());
        // e^{-1}/30! dominates the remainder.
        let leading = (-1f64).exp() / (1..=30).map(|k| k as f64).product::<f64>();
        assert_relative_eq!(v.tail(), leading, max_relative = 0.05);
    }

    #[test]
    fn coherent_insufficient_cutoff() {
        let err = coherent_state_vector(2.0, 5, TOL).unwrap_err();
        assert!(matches!(err, ReadingError::InsufficientCutoff { cutoff: 5, .. }));
    }

    #[test]
    fn coherent_overlap_is_gaussian_fidelity() {
        let (nbar, r) = (1.5f64, 0.4f64);
        let n = coherent_cutoff(nbar, TOL);
        let a = coherent_state_vector(nbar.sqrt(), n, TOL).unwrap();
        let b = coherent_state_vector((r * nbar).sqrt(), n, TOL).unwrap();
        let overlap = a.inner(&b).unwrap().norm_sqr();
        let expected = (-nbar * (1.0 - r.sqrt()).powi(2)).exp();
        assert!((overlap - expected).abs() < 1e-12);
    }

    #[test]
    fn coherent_cutoff_meets_tolerance() {
        for nbar in [0.5, 1.0, 2.0, 5.0] {
            let n = coherent_cutoff(nbar, TOL);
            let v = coherent_state_vector(nbar.sqrt(), n, TOL).unwrap();
            assert!(v.tail() < TOL);
            assert!(coherent_state_vector(nbar.sqrt(), n - 1, TOL).is_err());
        }
    }

    #[test]
    fn tmsv_examples() {
        let vac = tmsv_state_vector(1.0, 3, TOL).unwrap();
        assert_eq!(vac.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert_eq!(vac.tail(), 0.0);

        let v = tmsv_state_vector(3.0, 60, TOL).unwrap();
        assert_relative_eq!(v.tail(), 0.5f64.powi(60), max_relative = 1e-12);
        assert_relative_eq!(v.mean_photons(0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(v.mean_photons(1), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn tmsv_reduced_state_is_thermal() {
        let v = tmsv_state_vector(3.0, 60, TOL).unwrap();
        let reduced = v.density().partial_trace_reference().unwrap();
        for m in 0..60 {
            for k in 0..60 {
                let expected = if m == k { 0.5f64.powi(m as i32 + 1) } else { 0.0 };
                assert!((reduced.matrix().get(m, k).re - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tmsv_cutoff_policy() {
        assert_eq!(tmsv_cutoff(1.0, TOL).unwrap(), 1);
        // λ² = 2/3 for n̄ = 2: (2/3)^68 > 1e-12 > (2/3)^69.
        assert_eq!(tmsv_cutoff(5.0, TOL).unwrap(), 69);
        let n = tmsv_cutoff(3.0, TOL).unwrap();
        assert!(0.5f64.powi(n as i32) < TOL && 0.5f64.powi(n as i32 - 1) >= TOL);
        assert!(tmsv_state_vector(5.0, 68, TOL).is_err());
    }

    #[test]
    fn kraus_identity_at_unit_reflectivity() {
        let ch = loss_channel_kraus(1.0, 7, 8).unwrap();
        assert_eq!(ch.operators().len(), 1);
        assert_eq!(ch.operators()[0], DMatrix::identity(8, 8));
    }

    #[test]
    fn kraus_full_loss_sends_to_vacuum() {
        let rho = apply_loss_to_signal_fock(&fock_number(4, 2), 0.0, None).unwrap();
        let dense = to_dense(&rho);
        assert_relative_eq!(dense[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert!((dense.norm_squared() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kraus_single_photon_quarter_reflectivity() {
        let rho = apply_loss_to_signal_fock(&fock_number(2, 1), 0.25, None).unwrap();
        let dense = to_dense(&rho);
        assert_relative_eq!(dense[(0, 0)].re, 0.75, epsilon = 1e-15);
        assert_relative_eq!(dense[(1, 1)].re, 0.25, epsilon = 1e-15);
        assert_eq!(dense[(0, 1)].norm(), 0.0);
    }

    #[test]
    fn kraus_completeness_on_protected_levels() {
        for r in [0.0, 0.1, 0.25, 0.5, 0.9, 0.999] {
            let ch = loss_channel_kraus(r, 39, 40).unwrap();
            assert!(ch.completeness_defect() <= 1e-12, "r = {r}");
        }
        // Fewer loss events only protect the low levels.
        let ch = loss_channel_kraus(0.5, 3, 10).unwrap();
        assert!(ch.completeness_defect() <= 1e-12);
        assert!(ch.completeness()[(9, 9)] < 1.0 - 1e-3);
        assert!(loss_channel_kraus(0.5, 11, 10).is_err());
    }

    #[test]
    fn loss_on_coherent_state_scales_amplitude() {
        let (nbar, r) = (1.0f64, 0.3f64);
        let n = coherent_cutoff(nbar, TOL) + 10;
        let a = coherent_state_vector(nbar.sqrt(), n, TOL).unwrap();
        let out = apply_loss_to_signal_fock(&a, r, None).unwrap();
        let expected = coherent_state_vector((r * nbar).sqrt(), n, TOL).unwrap();
        assert!((out.expectation_pure(&expected).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lossy_tmsv_identity_channel_returns_projector() {
        let psi = tmsv_state_vector(3.0, 40, TOL).unwrap();
        let out = apply_loss_to_signal_fock(&psi, 1.0, None).unwrap();
        assert_eq!(out, psi.density());
    }

    #[test]
    fn lossy_tmsv_fidelity_and_moments() {
        let psi = tmsv_state_vector(3.0, 60, TOL).unwrap();
        let sigma0 = apply_loss_to_signal_fock(&psi, 0.25, None).unwrap();
        sigma0.validate().unwrap();
        assert!((sigma0.expectation_pure(&psi).unwrap() - 4.0 / 9.0).abs() < 1e-12);
        let m = moments_from_density(&sigma0, MOMENT_STRUCTURE_TOLERANCE).unwrap();
        assert!((m.covariance.a() - 1.5).abs() < 1e-10);
        assert!((m.covariance.b() - 3.0).abs() < 1e-10);
        assert!((m.covariance.c() - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn moments_of_vacuum_and_tmsv() {
        let vac = tmsv_state_vector(1.0, 4, TOL).unwrap().density();
        let m = moments_from_density(&vac, 1e-12).unwrap();
        assert_eq!((m.covariance.a(), m.covariance.b(), m.covariance.c()), (1.0, 1.0, 0.0));

        let tmsv = tmsv_state_vector(3.0, 60, TOL).unwrap().density();
        let m = moments_from_density(&tmsv, 1e-10).unwrap();
        assert!((m.covariance.a() - 3.0).abs() < 1e-10);
        assert!((m.covariance.b() - 3.0).abs() < 1e-10);
        assert!((m.covariance.c() - 8f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn moments_reject_non_block_structure() {
        // (|0,0⟩ + |1,0⟩)/√2 is displaced, so first moments are nonzero.
        let n = 3;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n * n];
        amplitudes[0] = Complex64::new(0.5f64.sqrt(), 0.0);
        amplitudes[n] = Complex64::new(0.5f64.sqrt(), 0.0);
        let s = StateVector {
            modes: Modes::Two,
            cutoff: n,
            amplitudes,
            tail: 0.0,
            tolerance: TOL,
        };
        assert!(matches!(
            moments_from_density(&s.density(), 1e-8),
            Err(ReadingError::Structure { .. })
        ));
    }

    #[test]
    fn helstrom_identical_and_orthogonal() {
        let a = fock_number(3, 0).density();
        let b = fock_number(3, 2).density();
        assert_relative_eq!(helstrom_exact(&a, &a, 0.5).unwrap().p_bar, 0.5, epsilon = 1e-15);
        assert!(helstrom_exact(&a, &b, 0.5).unwrap().p_bar.abs() < 1e-15);
        // Unequal priors: guessing the likelier state errs with the smaller prior.
        assert_relative_eq!(helstrom_exact(&a, &a, 0.2).unwrap().p_bar, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn helstrom_coherent_pair_matches_closed_form() {
        let (nbar, r) = (1.0f64, 0.0f64);
        let n = coherent_cutoff(nbar, TOL);
        let rho1 = coherent_state_vector(nbar.sqrt(), n, TOL).unwrap().density();
        let rho0 = coherent_state_vector((r * nbar).sqrt(), n, TOL).unwrap().density();
        let out = helstrom_exact(&rho0, &rho1, 0.5).unwrap();
        assert!((out.p_bar - 0.1024699512).abs() < 1e-9);
        let closed = (1.0 - (1.0 - (-1f64).exp()).sqrt()) / 2.0;
        assert!((out.p_bar - closed).abs() < 1e-8);
    }

    #[test]
    fn helstrom_dimension_mismatch() {
        let a = fock_number(3, 0).density();
        let b = fock_number(4, 0).density();
        assert!(matches!(
            helstrom_exact(&a, &b, 0.5),
            Err(ReadingError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn helstrom_rejects_large_tail() {
        let mut a = fock_number(3, 0).density();
        a.tail = 1e-6;
        let b = fock_number(3, 1).density();
        assert!(matches!(
            helstrom_exact(&a, &b, 0.5),
            Err(ReadingError::InsufficientCutoff { .. })
        ));
    }

    #[test]
    fn block_eigenvalues_match_dense_solver() {
        let psi = tmsv_state_vector(2.0, 8, 1e-3).unwrap();
        let sigma0 = apply_loss_to_signal_fock(&psi, 0.6, None).unwrap();
        let diff = psi.density().matrix().combine(0.5, sigma0.matrix(), -0.5);
        let mut dense = DMatrix::<Complex64>::zeros(diff.dim(), diff.dim());
        for (i, j, v) in diff.iter() {
            dense[(i, j)] = v;
        }
        let full: f64 = SymmetricEigen::new(dense).eigenvalues.iter().map(|x| x.abs()).sum();
        assert!((full - diff.trace_norm()).abs() < 1e-13);
    }

    #[test]
    fn validate_flags_bad_densities() {
        let mut rho = fock_number(3, 1).density();
        rho.matrix.add(0, 1, Complex64::new(0.1, 0.0));
        assert!(rho.validate().is_err());

        let mut neg = SparseHermitian::new(2);
        neg.add(0, 0, Complex64::new(1.1, 0.0));
        neg.add(1, 1, Complex64::new(-0.1, 0.0));
        let rho = FockDensity {
            matrix: neg,
            modes: Modes::One,
            cutoff: 2,
            tail: 0.0,
            tolerance: TOL,
        };
        assert!(rho.validate().is_err());
    }
}
