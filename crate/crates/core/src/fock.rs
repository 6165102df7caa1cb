//! Truncated two-mode Fock-space simulation used as an independent check on
//! the Gaussian model.

use nalgebra::{DMatrix, Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_transmission, Error, Result};
use crate::gaussian::{GaussianState, Mode};

pub const DEFAULT_CUTOFF: usize = 40;
pub const PREPARE_TOLERANCE: f64 = 1e-8;
pub const SQUEEZE_TOLERANCE: f64 = 1e-6;
/// Largest cutoff accepted by the dense density-matrix path.
pub const DENSE_MAX_CUTOFF: usize = 15;
/// Loss branches with a smaller squared norm are dropped.
const BRANCH_FLOOR: f64 = 1e-30;

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff == 0 {
        return Err(Error::param("cutoff", "must be >= 1"));
    }
    Ok(())
}

/// Pure two-mode state, amplitudes indexed `(n_probe, n_conjugate)` row-major,
/// each index in `0..=cutoff`. Not renormalized after truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    cutoff: usize,
    amplitudes: Vec<Complex64>,
}

impl FockState {
    pub fn vacuum(cutoff: usize) -> Result<Self> {
        check_cutoff(cutoff)?;
        let dim = cutoff + 1;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim * dim];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { cutoff, amplitudes })
    }

    /// Coherent state `alpha` on the probe, vacuum on the conjugate.
    pub fn prepare(alpha: Complex64, cutoff: usize) -> Result<Self> {
        let mut state = Self::vacuum(cutoff)?;
        let dim = cutoff + 1;
        let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        for n in 0..dim {
            if n > 0 {
                c *= alpha / (n as f64).sqrt();
            }
            state.amplitudes[n * dim] = c;
        }
        state.check(PREPARE_TOLERANCE)?;
        Ok(state)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn amplitude(&self, n_probe: usize, n_conj: usize) -> Complex64 {
        self.amplitudes[n_probe * self.dim() + n_conj]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm_deficit(&self) -> f64 {
        1.0 - self.norm()
    }

    fn check(&self, tolerance: f64) -> Result<()> {
        let deficit = self.norm_deficit();
        if deficit > tolerance {
            return Err(Error::TruncationInadequate {
                cutoff: self.cutoff,
                deficit,
                tolerance,
            });
        }
        Ok(())
    }

    pub fn probability(&self, n_probe: usize, n_conj: usize) -> f64 {
        self.amplitude(n_probe, n_conj).norm_sqr()
    }

    pub fn two_mode_squeeze(&self, r: f64) -> Result<Self> {
        Squeezer::new(r, self.cutoff)?.apply(self)
    }

    /// `exp(iφ n)` on one mode, so that `a → e^{iφ} a`.
    pub fn phase_shift(&self, mode: Mode, phi: f64) -> Self {
        let dim = self.dim();
        let mut out = self.clone();
        for (idx, a) in out.amplitudes.iter_mut().enumerate() {
            let n = match mode {
                Mode::Probe => idx / dim,
                Mode::Conjugate => idx % dim,
            };
            *a *= Complex64::from_polar(1.0, phi * n as f64);
        }
        out
    }

    pub fn moments(&self) -> FockMoments {
        let mut raw = RawMoments::default();
        raw.accumulate(self);
        raw.finish()
    }

    pub fn into_mixture(self) -> FockMixture {
        FockMixture {
            cutoff: self.cutoff,
            branches: vec![self],
        }
    }
}

/// `exp[r(a†b† - ab)]` restricted to the truncated space. The generator
/// conserves `n_p - n_c`, so each difference sector is exponentiated on its
/// own in a padded basis and cut back to the cutoff.
#[derive(Debug, Clone)]
pub struct Squeezer {
    r: f64,
    cutoff: usize,
    /// `(d, U)` with `U[k][k']` between `(k + d, k)` (or `(k, k - d)`) states.
    blocks: Vec<(isize, DMatrix<f64>)>,
}

impl Squeezer {
    pub fn new(r: f64, cutoff: usize) -> Result<Self> {
        check_cutoff(cutoff)?;
        if !r.is_finite() {
            return Err(Error::param("r", format!("must be finite, got {r}")));
        }
        let pad = cutoff.max(20);
        let c = cutoff as isize;
        let blocks = (-c..=c)
            .map(|d| {
                let off = d.unsigned_abs();
                let work = cutoff + pad - off + 1;
                let keep = cutoff - off + 1;
                let mut g = DMatrix::<f64>::zeros(work, work);
                for k in 0..work - 1 {
                    let gk = (((k + off + 1) * (k + 1)) as f64).sqrt();
                    g[(k + 1, k)] = r * gk;
                    g[(k, k + 1)] = -r * gk;
                }
                let u = g.exp();
                (d, u.view((0, 0), (keep, keep)).into_owned())
            })
            .collect();
        Ok(Self { r, cutoff, blocks })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        if state.cutoff != self.cutoff {
            return Err(Error::param("cutoff", "state and squeezer cutoffs differ"));
        }
        let dim = state.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        let index = |d: isize, k: usize| {
            let off = d.unsigned_abs();
            if d >= 0 {
                (k + off) * dim + k
            } else {
                k * dim + k + off
            }
        };
        for (d, u) in &self.blocks {
            let n = u.nrows();
            let input: Vec<Complex64> = (0..n).map(|k| state.amplitudes[index(*d, k)]).collect();
            for k in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (kp, a) in input.iter().enumerate() {
                    acc += a * u[(k, kp)];
                }
                out[index(*d, k)] = acc;
            }
        }
        let before = state.norm();
        let out = FockState {
            cutoff: state.cutoff,
            amplitudes: out,
        };
        let deficit = before - out.norm();
        if deficit > SQUEEZE_TOLERANCE || out.norm_deficit() > SQUEEZE_TOLERANCE {
            return Err(Error::TruncationInadequate {
                cutoff: self.cutoff,
                deficit: deficit.max(out.norm_deficit()),
                tolerance: SQUEEZE_TOLERANCE,
            });
        }
        Ok(out)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Amplitude of the `k`-photon loss branch on `n` photons.
fn kraus_coefficient(n: usize, k: usize, eta: f64) -> f64 {
    (binomial(n, k) * eta.powi((n - k) as i32) * (1.0 - eta).powi(k as i32)).sqrt()
}

/// Mixed state kept as a sum of unnormalized pure branches.
#[derive(Debug, Clone)]
pub struct FockMixture {
    cutoff: usize,
    branches: Vec<FockState>,
}

impl FockMixture {
    pub fn branches(&self) -> &[FockState] {
        &self.branches
    }

    pub fn trace(&self) -> f64 {
        self.branches.iter().map(FockState::norm).sum()
    }

    /// Beamsplitter loss with transmission `eta`, one Kraus branch per number
    /// of lost photons.
    pub fn loss(&self, mode: Mode, eta: f64) -> Result<Self> {
        check_transmission(eta)?;
        let dim = self.cutoff + 1;
        let mut branches = Vec::new();
        for b in &self.branches {
            for k in 0..dim {
                let mut amp = vec![Complex64::new(0.0, 0.0); dim * dim];
                for (idx, a) in b.amplitudes.iter().enumerate() {
                    let (i, j) = (idx / dim, idx % dim);
                    let n = if mode == Mode::Probe { i } else { j };
                    if n < k {
                        continue;
                    }
                    let target = if mode == Mode::Probe { (i - k) * dim + j } else { i * dim + j - k };
                    amp[target] = a * kraus_coefficient(n, k, eta);
                }
                let branch = FockState {
                    cutoff: self.cutoff,
                    amplitudes: amp,
                };
                if branch.norm() >= BRANCH_FLOOR {
                    branches.push(branch);
                }
            }
        }
        Ok(Self {
            cutoff: self.cutoff,
            branches,
        })
    }

    pub fn moments(&self) -> FockMoments {
        let mut raw = RawMoments::default();
        for b in &self.branches {
            raw.accumulate(b);
        }
        raw.finish()
    }
}

/// Moments of `state` after loss `eta` on `mode`.
pub fn fock_loss(state: &FockState, mode: Mode, eta: f64) -> Result<FockMoments> {
    Ok(state.clone().into_mixture().loss(mode, eta)?.moments())
}

/// Dense density operator, for small cutoffs only.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    cutoff: usize,
    rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_state(state: &FockState) -> Result<Self> {
        if state.cutoff > DENSE_MAX_CUTOFF {
            return Err(Error::param(
                "cutoff",
                format!("dense path supports cutoff <= {DENSE_MAX_CUTOFF}, got {}", state.cutoff),
            ));
        }
        let n = state.amplitudes.len();
        let rho = DMatrix::from_fn(n, n, |m, k| state.amplitudes[m] * state.amplitudes[k].conj());
        Ok(Self {
            cutoff: state.cutoff,
            rho,
        })
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn loss(&self, mode: Mode, eta: f64) -> Result<Self> {
        check_transmission(eta)?;
        let dim = self.cutoff + 1;
        let n = dim * dim;
        let count = |idx: usize| if mode == Mode::Probe { idx / dim } else { idx % dim };
        let lower = |idx: usize, k: usize| if mode == Mode::Probe { idx - k * dim } else { idx - k };
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for m in 0..n {
            for q in 0..n {
                let (nm, nq) = (count(m), count(q));
                for k in 0..=nm.min(nq) {
                    let w = kraus_coefficient(nm, k, eta) * kraus_coefficient(nq, k, eta);
                    out[(lower(m, k), lower(q, k))] += self.rho[(m, q)] * w;
                }
            }
        }
        Ok(Self {
            cutoff: self.cutoff,
            rho: out,
        })
    }

    pub fn moments(&self) -> FockMoments {
        let mut raw = RawMoments::default();
        raw.add(self.cutoff, |m, n| self.rho[(m, n)]);
        raw.finish()
    }
}

/// Unnormalized `tr(ρ O)` for the ladder-operator products needed.
#[derive(Debug, Default, Clone, Copy)]
struct RawMoments {
    trace: Complex64,
    a: Complex64,
    b: Complex64,
    a2: Complex64,
    b2: Complex64,
    ab: Complex64,
    adag_b: Complex64,
    bdag_a: Complex64,
    na: Complex64,
    nb: Complex64,
    na2: Complex64,
    nb2: Complex64,
    nanb: Complex64,
}

impl RawMoments {
    fn accumulate(&mut self, s: &FockState) {
        let amp = &s.amplitudes;
        self.add(s.cutoff, |m, n| amp[m] * amp[n].conj());
    }

    /// `rho(m, n) = ⟨m|ρ|n⟩`; `tr(ρO) = Σ_m Σ_n ⟨n|O|m⟩ ρ(m, n)`.
    fn add(&mut self, cutoff: usize, rho: impl Fn(usize, usize) -> Complex64) {
        let dim = cutoff + 1;
        let at = |i: usize, j: usize| i * dim + j;
        for i in 0..dim {
            for j in 0..dim {
                let m = at(i, j);
                let (fi, fj) = (i as f64, j as f64);
                let diag = rho(m, m);
                self.trace += diag;
                self.na += diag * fi;
                self.nb += diag * fj;
                self.na2 += diag * fi * fi;
                self.nb2 += diag * fj * fj;
                self.nanb += diag * fi * fj;
                if i >= 1 {
                    self.a += rho(m, at(i - 1, j)) * fi.sqrt();
                }
                if j >= 1 {
                    self.b += rho(m, at(i, j - 1)) * fj.sqrt();
                }
                if i >= 2 {
                    self.a2 += rho(m, at(i - 2, j)) * (fi * (fi - 1.0)).sqrt();
                }
                if j >= 2 {
                    self.b2 += rho(m, at(i, j - 2)) * (fj * (fj - 1.0)).sqrt();
                }
                if i >= 1 && j >= 1 {
                    self.ab += rho(m, at(i - 1, j - 1)) * (fi * fj).sqrt();
                }
                if i + 1 < dim && j >= 1 {
                    self.adag_b += rho(m, at(i + 1, j - 1)) * ((fi + 1.0) * fj).sqrt();
                }
                if i >= 1 && j + 1 < dim {
                    self.bdag_a += rho(m, at(i - 1, j + 1)) * (fi * (fj + 1.0)).sqrt();
                }
            }
        }
    }

    fn finish(self) -> FockMoments {
        let t = self.trace.re;
        let [a, b, a2, b2, ab, adb] = [self.a, self.b, self.a2, self.b2, self.ab, self.adag_b].map(|z| z / t);
        let [na, nb, na2, nb2, nanb] = [self.na, self.nb, self.na2, self.nb2, self.nanb].map(|z| z.re / t);
        let residue = [
            self.trace.im,
            self.na.im,
            self.nb.im,
            self.na2.im,
            self.nb2.im,
            self.nanb.im,
            (self.adag_b + self.bdag_a).im,
        ]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs() / t));

        let mean = Vector4::new(2.0 * a.re, 2.0 * a.im, 2.0 * b.re, 2.0 * b.im);
        let mut second = Matrix4::zeros();
        second[(0, 0)] = 2.0 * a2.re + 2.0 * na + 1.0;
        second[(1, 1)] = -2.0 * a2.re + 2.0 * na + 1.0;
        second[(0, 1)] = 2.0 * a2.im;
        second[(2, 2)] = 2.0 * b2.re + 2.0 * nb + 1.0;
        second[(3, 3)] = -2.0 * b2.re + 2.0 * nb + 1.0;
        second[(2, 3)] = 2.0 * b2.im;
        second[(0, 2)] = 2.0 * ab.re + 2.0 * adb.re;
        second[(0, 3)] = 2.0 * ab.im + 2.0 * adb.im;
        second[(1, 2)] = 2.0 * ab.im - 2.0 * adb.im;
        second[(1, 3)] = -2.0 * ab.re + 2.0 * adb.re;
        for i in 0..4 {
            for j in 0..i {
                second[(i, j)] = second[(j, i)];
            }
        }
        let cov = second - mean * mean.transpose();
        FockMoments {
            mean,
            cov,
            number_mean: [na, nb],
            number_variance: [na2 - na * na, nb2 - nb * nb],
            number_covariance: nanb - na * nb,
            trace: t,
            imaginary_residue: residue,
        }
    }
}

/// First and second moments in the quadrature convention of the Gaussian
/// model (vacuum covariance = identity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockMoments {
    pub mean: Vector4<f64>,
    pub cov: Matrix4<f64>,
    pub number_mean: [f64; 2],
    pub number_variance: [f64; 2],
    pub number_covariance: f64,
    pub trace: f64,
    pub imaginary_residue: f64,
}

/// Grid for the Gaussian-vs-Fock comparison. Each point runs seed `alpha`,
/// squeeze `r`, phase `phi` on the probe, then loss `eta` on both modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleGrid {
    pub r: Vec<f64>,
    pub alpha: Vec<f64>,
    pub eta: Vec<f64>,
    pub phi: f64,
    pub cutoff: usize,
    /// Also run the dense density-matrix path (cutoff <= 15).
    pub dense: bool,
    pub tolerance: f64,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self {
            r: vec![0.1, 0.3, 0.6],
            alpha: vec![0.0, 0.5, 1.0],
            eta: vec![1.0, 0.7],
            phi: 0.4,
            cutoff: DEFAULT_CUTOFF,
            dense: false,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub r: f64,
    pub alpha: f64,
    pub eta: f64,
    pub quantity: String,
    pub gaussian: f64,
    pub fock: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub cutoff: usize,
    pub tolerance: f64,
    pub max_discrepancy: f64,
    pub max_norm_deficit: f64,
    pub max_imaginary_residue: f64,
    pub pass: bool,
    pub entries: Vec<Discrepancy>,
}

const QUADRATURES: [&str; 4] = ["x_p", "p_p", "x_c", "p_c"];

fn compare_moments(g: &GaussianState, f: &FockMoments, point: (f64, f64, f64), out: &mut Vec<Discrepancy>) {
    let (r, alpha, eta) = point;
    let mut push = |quantity: String, gaussian: f64, fock: f64| {
        out.push(Discrepancy {
            r,
            alpha,
            eta,
            quantity,
            gaussian,
            fock,
            difference: (gaussian - fock).abs(),
        })
    };
    for (i, qi) in QUADRATURES.iter().enumerate() {
        push(format!("mean {qi}"), g.mean()[i], f.mean[i]);
    }
    for (i, qi) in QUADRATURES.iter().enumerate() {
        for (j, qj) in QUADRATURES.iter().enumerate().skip(i) {
            push(format!("cov {qi} {qj}"), g.cov()[(i, j)], f.cov[(i, j)]);
        }
    }
    for (k, mode) in [Mode::Probe, Mode::Conjugate].into_iter().enumerate() {
        let (mean, var) = g.number_stats(mode);
        let name = if k == 0 { "probe" } else { "conjugate" };
        push(format!("n_{name} mean"), mean, f.number_mean[k]);
        push(format!("n_{name} variance"), var, f.number_variance[k]);
    }
    push("n_probe n_conjugate covariance".into(), g.number_covariance(), f.number_covariance);
}

struct PointResult {
    entries: Vec<Discrepancy>,
    deficit: f64,
    residue: f64,
}

fn run_point(grid: &OracleGrid, squeezer: &Squeezer, alpha: f64, eta: f64) -> Result<PointResult> {
    let r = squeezer.r();
    let seed = Complex64::new(alpha, 0.0);
    let gaussian = GaussianState::coherent_seed(seed)
        .two_mode_squeeze(r)
        .phase_shift(Mode::Probe, grid.phi)
        .loss(Mode::Probe, eta)?
        .loss(Mode::Conjugate, eta)?;

    let pure = squeezer
        .apply(&FockState::prepare(seed, grid.cutoff)?)?
        .phase_shift(Mode::Probe, grid.phi);
    let deficit = pure.norm_deficit();
    let mixed = pure.clone().into_mixture().loss(Mode::Probe, eta)?.loss(Mode::Conjugate, eta)?;
    let moments = mixed.moments();

    let mut entries = Vec::new();
    compare_moments(&gaussian, &moments, (r, alpha, eta), &mut entries);
    let mut residue = moments.imaginary_residue;
    if grid.dense {
        let dense = DensityMatrix::from_state(&pure)?
            .loss(Mode::Probe, eta)?
            .loss(Mode::Conjugate, eta)?
            .moments();
        let mut dense_entries = Vec::new();
        compare_moments(&gaussian, &dense, (r, alpha, eta), &mut dense_entries);
        for e in &mut dense_entries {
            e.quantity = format!("dense {}", e.quantity);
        }
        entries.extend(dense_entries);
        residue = residue.max(dense.imaginary_residue);
    }
    Ok(PointResult {
        entries,
        deficit,
        residue,
    })
}

/// Runs every grid point through both pipelines and reports the largest
/// moment discrepancy.
pub fn compare_to_gaussian(grid: &OracleGrid) -> Result<DiscrepancyReport> {
    check_cutoff(grid.cutoff)?;
    if grid.dense && grid.cutoff > DENSE_MAX_CUTOFF {
        return Err(Error::param(
            "cutoff",
            format!("dense path supports cutoff <= {DENSE_MAX_CUTOFF}, got {}", grid.cutoff),
        ));
    }
    for &eta in &grid.eta {
        check_transmission(eta)?;
    }
    let squeezers = grid
        .r
        .par_iter()
        .map(|&r| Squeezer::new(r, grid.cutoff))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(&Squeezer, f64, f64)> = squeezers
        .iter()
        .flat_map(|s| {
            grid.alpha
                .iter()
                .flat_map(move |&a| grid.eta.iter().map(move |&e| (s, a, e)))
        })
        .collect();
    let results = points
        .par_iter()
        .map(|&(s, a, e)| run_point(grid, s, a, e))
        .collect::<Result<Vec<_>>>()?;

    let mut report = DiscrepancyReport {
        cutoff: grid.cutoff,
        tolerance: grid.tolerance,
        max_discrepancy: 0.0,
        max_norm_deficit: 0.0,
        max_imaginary_residue: 0.0,
        pass: false,
        entries: Vec::new(),
    };
    for p in results {
        report.max_norm_deficit = report.max_norm_deficit.max(p.deficit);
        report.max_imaginary_residue = report.max_imaginary_residue.max(p.residue);
        for e in &p.entries {
            report.max_discrepancy = report.max_discrepancy.max(e.difference);
        }
        report.entries.extend(p.entries);
    }
    report.pass = report.max_discrepancy < grid.tolerance;
    Ok(report)
}

/// Probability of `n` pairs in two-mode squeezed vacuum, `sech²r tanh^{2n} r`.
pub fn squeezed_vacuum_pair_probability(r: f64, n: usize) -> f64 {
    let t = r.tanh();
    t.powi(2 * n as i32) / r.cosh().powi(2)
}
