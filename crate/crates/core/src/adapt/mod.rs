//! ADAPT-VQE driver: screening, selection, variational re-optimization and
//! trace recording over exact statevectors.

pub mod bfgs;
pub mod expm;
pub mod sobol;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fcidump::{IrrepLabel, MolecularIntegrals};
use crate::fock::{
    build_hamiltonian, enumerate_sector, matrix_rep_closed, CsrMatrix, Determinant, FermionPolynomial, SectorBasis,
    SectorConstraints, StateVector,
};
use crate::pools::{realize_on_sector, PoolSpec, SectorElement};
use crate::symmetry::{csf_count, SymmetryObservables, SymmetryReport};

pub use bfgs::{minimize, minimize_from, BfgsOptions, Minimum};
pub use expm::Generator;

/// Occupation lists of a restricted (closed- or open-shell) reference.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceSpec {
    pub doubly_occupied: Vec<usize>,
    pub singly_occupied_up: Vec<usize>,
    pub singly_occupied_down: Vec<usize>,
}

impl ReferenceSpec {
    pub fn closed_shell(n_occ: usize) -> Self {
        ReferenceSpec { doubly_occupied: (0..n_occ).collect(), ..Default::default() }
    }

    pub fn n_electrons(&self) -> usize {
        2 * self.doubly_occupied.len() + self.singly_occupied_up.len() + self.singly_occupied_down.len()
    }

    pub fn determinant(&self) -> Result<Determinant> {
        Determinant::from_occupations(&self.doubly_occupied, &self.singly_occupied_up, &self.singly_occupied_down)
    }
}

/// `D…[;U…][;W…]`: comma-separated doubly, up and down occupied orbitals.
impl FromStr for ReferenceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(';').collect();
        if parts.len() > 3 {
            return Err(Error::InvalidInput(format!("reference `{s}` has more than three groups")));
        }
        let list = |i: usize| -> Result<Vec<usize>> {
            parts
                .get(i)
                .map_or("", |p| p.trim())
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| Error::InvalidInput(format!("bad orbital index `{t}` in reference"))))
                .collect()
        };
        Ok(ReferenceSpec { doubly_occupied: list(0)?, singly_occupied_up: list(1)?, singly_occupied_down: list(2)? })
    }
}

impl fmt::Display for ReferenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[usize]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}", j(&self.doubly_occupied))?;
        if !self.singly_occupied_up.is_empty() || !self.singly_occupied_down.is_empty() {
            write!(f, ";{}", j(&self.singly_occupied_up))?;
        }
        if !self.singly_occupied_down.is_empty() {
            write!(f, ";{}", j(&self.singly_occupied_down))?;
        }
        Ok(())
    }
}

/// One-hot state on the reference determinant.
pub fn build_reference(spec: &ReferenceSpec, basis: Arc<SectorBasis>) -> Result<StateVector> {
    let d = spec.determinant()?;
    if let Some(n) = basis.n_electrons() {
        if spec.n_electrons() != n {
            return Err(Error::InvalidInput(format!(
                "reference holds {} electrons, the sector {n}",
                spec.n_electrons()
            )));
        }
    }
    if let Some(p) = d.0.checked_ilog2().filter(|&b| b as usize >= 2 * basis.n_spatial()) {
        return Err(Error::InvalidInput(format!("reference occupies spinorbital {p} beyond the active space")));
    }
    StateVector::basis_state(basis, d)
}

/// `exp(θG)|v⟩`.
pub fn apply_unitary(g: &FermionPolynomial, theta: f64, v: &StateVector) -> Result<StateVector> {
    let m = matrix_rep_closed(g, &v.basis)?;
    let mut amps = v.amps.clone();
    Generator::new(&m).exp_apply(theta, &mut amps);
    Ok(StateVector { basis: v.basis.clone(), amps })
}

/// `dE/dθ` at θ = 0 for an appended `exp(θG)`: `2⟨ψ|HG|ψ⟩`.
pub fn pool_gradient(h: &CsrMatrix, state: &StateVector, e: &SectorElement) -> Result<f64> {
    if e.matrices.len() != 1 {
        return Err(Error::InvalidInput(format!("{} is a tuple; score it with scan_select", e.element.id)));
    }
    let hpsi = h.matvec(&state.amps);
    Ok(gradient_with(&Generator::new(&e.matrices[0]), &hpsi, &state.amps))
}

fn gradient_with(g: &Generator, hpsi: &[f64], psi: &[f64]) -> f64 {
    2.0 * g.bilinear(hpsi, psi)
}

fn expectation(h: &CsrMatrix, v: &[f64]) -> f64 {
    h.bilinear(v, v)
}

/// Outcome of a global scan over one candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    /// Energy lowering `E_ref − min E` over the sampled points.
    pub score: f64,
    pub theta: Vec<f64>,
}

/// Sample `exp(θ_k G_k)…exp(θ_1 G_1)|ψ⟩` on a Sobol' set over `[−π, π]^k`.
pub fn scan_candidate(h: &CsrMatrix, psi: &[f64], e_ref: f64, gens: &[Generator], points: usize) -> ScanResult {
    let mut best = ScanResult { score: f64::NEG_INFINITY, theta: vec![0.0; gens.len()] };
    for u in sobol::sobol_points(gens.len(), points) {
        let theta: Vec<f64> = u.iter().map(|x| -PI + 2.0 * PI * x).collect();
        let mut v = psi.to_vec();
        for (g, &t) in gens.iter().zip(&theta) {
            g.exp_apply(t, &mut v);
        }
        let score = e_ref - expectation(h, &v);
        if score > best.score {
            best = ScanResult { score, theta };
        }
    }
    best
}

/// Best candidate by scanned energy lowering; ties go to the smaller id.
pub fn scan_select(
    h: &CsrMatrix,
    state: &StateVector,
    candidates: &[SectorElement],
    scan_points: usize,
) -> Result<(usize, Vec<f64>, f64)> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("no candidates to scan".into()));
    }
    let e_ref = expectation(h, &state.amps);
    let scored: Vec<(f64, Vec<f64>)> = candidates
        .par_iter()
        .map(|c| {
            let gens: Vec<Generator> = c.matrices.iter().map(Generator::new).collect();
            let r = scan_candidate(h, &state.amps, e_ref, &gens, scan_points);
            (r.score, r.theta)
        })
        .collect();
    let ids: Vec<&str> = candidates.iter().map(|c| c.element.id.as_str()).collect();
    let scores: Vec<f64> = scored.iter().map(|s| s.0).collect();
    let i = argmax(&scores, &ids);
    Ok((i, scored[i].1.clone(), scored[i].0))
}

/// Index of the largest score; near-equal scores (relative 1e-12) go to the
/// lexicographically smallest id.
fn argmax(scores: &[f64], ids: &[&str]) -> usize {
    let mut best = 0;
    for i in 1..scores.len() {
        let (a, b) = (scores[i], scores[best]);
        let tie = (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        if (!tie && a > b) || (tie && ids[i] < ids[best]) {
            best = i;
        }
    }
    best
}

/// Parameter cap of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ParamBudget {
    /// Symmetry-adapted problem dimension minus one.
    #[default]
    Auto,
    Fixed(usize),
}

impl FromStr for ParamBudget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(ParamBudget::Auto),
            n => n
                .parse()
                .map(ParamBudget::Fixed)
                .map_err(|_| Error::InvalidInput(format!("parameter budget `{s}` is neither `auto` nor a count"))),
        }
    }
}

impl Serialize for ParamBudget {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ParamBudget::Auto => s.serialize_str("auto"),
            ParamBudget::Fixed(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for ParamBudget {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(usize),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(ParamBudget::Fixed(n)),
            Raw::S(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptConfig {
    pub pool: PoolSpec,
    /// Working sector; derived from the fixture and pool when absent.
    pub sector: Option<SectorConstraints>,
    pub vqe_grad_tol: f64,
    pub vqe_max_micro: usize,
    pub stagnation_repeats: usize,
    /// Energy change below which a repeated selection counts as stagnant.
    pub stagnation_tol: f64,
    pub param_budget: ParamBudget,
    pub scan_points: usize,
    pub restarts: usize,
    /// Selection scores below this end the run.
    pub score_tol: f64,
    pub max_iters: usize,
}

impl AdaptConfig {
    pub fn new(pool: PoolSpec) -> Self {
        AdaptConfig {
            pool,
            sector: None,
            vqe_grad_tol: 1e-6,
            vqe_max_micro: 2000,
            stagnation_repeats: 3,
            stagnation_tol: 1e-9,
            param_budget: ParamBudget::Auto,
            scan_points: 32,
            restarts: 1,
            score_tol: 1e-8,
            max_iters: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("{what} must be positive")));
        if !(self.vqe_grad_tol > 0.0) {
            return bad("vqe_grad_tol");
        }
        if !(self.stagnation_tol > 0.0) {
            return bad("stagnation_tol");
        }
        if !(self.score_tol > 0.0) {
            return bad("score_tol");
        }
        for (name, v) in [
            ("vqe_max_micro", self.vqe_max_micro),
            ("stagnation_repeats", self.stagnation_repeats),
            ("scan_points", self.scan_points),
            ("restarts", self.restarts),
            ("max_iters", self.max_iters),
        ] {
            if v == 0 {
                return bad(name);
            }
        }
        Ok(())
    }
}

/// Sector kept by a pool: N and S_z always, Γ only if every unitary conserves it.
pub fn working_sector(m: &MolecularIntegrals, pool: &PoolSpec) -> SectorConstraints {
    SectorConstraints {
        n_electrons: Some(m.n_electrons()),
        sz2: Some(m.ms2()),
        irrep: pool.conserves_gamma().then(|| m.target_irrep()),
    }
}

/// One factor group of the ansatz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzStep {
    pub element_id: String,
    pub thetas: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    ParamBudget,
    Stagnation,
    GradVanished,
    MaxIters,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub selected_id: Option<String>,
    pub selection_score: Option<f64>,
    pub n_params: usize,
    pub energy: f64,
    pub symmetry: SymmetryReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptTrace {
    pub iterations: Vec<IterationRecord>,
    pub termination_reason: TerminationReason,
}

impl AdaptTrace {
    pub fn final_energy(&self) -> f64 {
        self.iterations.last().expect("trace holds the reference record").energy
    }

    pub fn max_s2(&self) -> f64 {
        self.iterations.iter().map(|r| r.symmetry.s2_expect).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Energy functional of a fixed operator sequence.
pub struct VqeProblem<'a> {
    pub h: &'a CsrMatrix,
    /// Applied first to last.
    pub factors: Vec<&'a Generator>,
    pub reference: &'a [f64],
}

impl VqeProblem<'_> {
    pub fn state(&self, theta: &[f64]) -> Vec<f64> {
        let mut v = self.reference.to_vec();
        for (g, &t) in self.factors.iter().zip(theta) {
            g.exp_apply(t, &mut v);
        }
        v
    }

    pub fn energy(&self, theta: &[f64]) -> f64 {
        expectation(self.h, &self.state(theta))
    }

    /// Energy and analytic gradient by a reverse sweep over the product.
    pub fn energy_and_gradient(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let mut states = Vec::with_capacity(self.factors.len());
        let mut psi = self.reference.to_vec();
        for (g, &t) in self.factors.iter().zip(theta) {
            g.exp_apply(t, &mut psi);
            states.push(psi.clone());
        }
        let mut lam = self.h.matvec(&psi);
        let e: f64 = psi.iter().zip(&lam).map(|(a, b)| a * b).sum();
        let mut grad = vec![0.0; theta.len()];
        for k in (0..self.factors.len()).rev() {
            let g = self.factors[k];
            grad[k] = 2.0 * g.bilinear(&lam, &states[k]);
            g.exp_apply(-theta[k], &mut lam);
        }
        (e, grad)
    }
}

/// Fixed offsets for restarts beyond the first.
const PERTURBATION: [f64; 7] = [0.31, -0.17, 0.23, -0.41, 0.11, -0.29, 0.37];

/// Quasi-Newton minimization from `init`, plus `cfg.restarts − 1` restarts
/// from deterministic perturbations of it. Returns the best point seen.
pub fn vqe_optimize(p: &VqeProblem<'_>, init: &[f64], cfg: &AdaptConfig) -> Result<(Vec<f64>, f64)> {
    let m = vqe_minimize(p, init, None, cfg)?;
    Ok((m.x, m.f))
}

fn vqe_minimize(p: &VqeProblem<'_>, init: &[f64], hinv: Option<&DMatrix<f64>>, cfg: &AdaptConfig) -> Result<Minimum> {
    if p.factors.len() != init.len() {
        return Err(Error::InvalidInput("parameter count does not match the ansatz".into()));
    }
    let opts = BfgsOptions { grad_tol: cfg.vqe_grad_tol, max_iters: cfg.vqe_max_micro };
    let mut best: Option<Minimum> = None;
    for r in 0..cfg.restarts {
        let x0: Vec<f64> = init
            .iter()
            .enumerate()
            .map(|(i, &t)| if r == 0 { t } else { t + PERTURBATION[(i + 3 * r) % PERTURBATION.len()] })
            .collect();
        // perturbed restarts begin without curvature information
        let h0 = if r == 0 { hinv.cloned() } else { None };
        let m = minimize_from(|x| p.energy_and_gradient(x), &x0, h0, &opts)?;
        if best.as_ref().is_none_or(|b| m.f < b.f) {
            best = Some(m);
        }
    }
    Ok(best.expect("restarts ≥ 1"))
}

/// Embed an inverse-Hessian estimate in a larger parameter space, with an
/// identity block for the new parameters.
fn extend_inverse_hessian(h: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(n, n);
    let k = h.nrows().min(n);
    out.view_mut((0, 0), (k, k)).copy_from(&h.view((0, 0), (k, k)));
    out
}

/// Everything prepared once per (fixture, pool, sector).
pub struct AdaptProblem {
    pub basis: Arc<SectorBasis>,
    pub hamiltonian: CsrMatrix,
    pub pool: Vec<SectorElement>,
    generators: Vec<Vec<Generator>>,
    observables: SymmetryObservables,
    pool_spec: PoolSpec,
}

/// Final state of a run alongside its trace.
#[derive(Clone, Debug)]
pub struct AdaptResult {
    pub trace: AdaptTrace,
    pub ansatz: Vec<AnsatzStep>,
    pub state: StateVector,
    pub param_budget: usize,
}

impl AdaptProblem {
    pub fn new(m: &MolecularIntegrals, cfg: &AdaptConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.pool.orbital_irreps.len() != m.n_spatial() {
            return Err(Error::InvalidInput("pool orbital count differs from the fixture".into()));
        }
        let sector = cfg.sector.unwrap_or_else(|| working_sector(m, &cfg.pool));
        let n = sector.n_electrons.unwrap_or(m.n_electrons());
        let basis =
            Arc::new(enumerate_sector(m.n_spatial(), n, sector.sz2, sector.irrep, m.orbital_irreps())?);
        let hamiltonian = build_hamiltonian(m, &basis)?;
        let pool = realize_on_sector(&cfg.pool.build(), &basis)?;
        let generators = pool.iter().map(|e| e.matrices.iter().map(Generator::new).collect()).collect();
        let observables = SymmetryObservables::new(basis.clone(), m.orbital_irreps());
        Ok(AdaptProblem { basis, hamiltonian, pool, generators, observables, pool_spec: cfg.pool.clone() })
    }

    pub fn observables(&self) -> &SymmetryObservables {
        &self.observables
    }

    /// Dimension of the symmetry-adapted problem minus one: spin-adapted
    /// state count for S²-conserving pools, determinant count otherwise.
    pub fn auto_param_budget(&self) -> Result<usize> {
        let c = self.basis.constraints();
        let dim = match (self.pool_spec.conserves_s2(), c.sz2, c.n_electrons) {
            (true, Some(sz2), Some(n)) => csf_count(
                self.basis.n_spatial(),
                n,
                sz2.unsigned_abs(),
                c.irrep,
                self.basis.orbital_irreps(),
            )?,
            _ => self.basis.len(),
        };
        Ok(dim.saturating_sub(1))
    }

    pub fn energy(&self, v: &StateVector) -> f64 {
        expectation(&self.hamiltonian, &v.amps)
    }

    fn select(&self, psi: &[f64], e: f64, scan_points: usize) -> (usize, f64, Vec<f64>) {
        let ids: Vec<&str> = self.pool.iter().map(|x| x.element.id.as_str()).collect();
        if self.pool.iter().any(|x| x.matrices.len() > 1) {
            let scored: Vec<ScanResult> = self
                .generators
                .par_iter()
                .map(|g| scan_candidate(&self.hamiltonian, psi, e, g, scan_points))
                .collect();
            let scores: Vec<f64> = scored.iter().map(|s| s.score).collect();
            let i = argmax(&scores, &ids);
            (i, scored[i].score, scored[i].theta.clone())
        } else {
            let hpsi = self.hamiltonian.matvec(psi);
            let scores: Vec<f64> =
                self.generators.par_iter().map(|g| gradient_with(&g[0], &hpsi, psi).abs()).collect();
            let i = argmax(&scores, &ids);
            (i, scores[i], vec![0.0])
        }
    }

    pub fn run(&self, cfg: &AdaptConfig, reference: &ReferenceSpec) -> Result<AdaptResult> {
        cfg.validate()?;
        let reference = build_reference(reference, self.basis.clone())?;
        let budget = match cfg.param_budget {
            ParamBudget::Auto => self.auto_param_budget()?,
            ParamBudget::Fixed(n) => n,
        };
        let report = |amps: &[f64]| {
            self.observables.report(&StateVector { basis: self.basis.clone(), amps: amps.to_vec() })
        };
        let mut energy = self.energy(&reference);
        let mut iterations = vec![IterationRecord {
            iteration: 0,
            selected_id: None,
            selection_score: None,
            n_params: 0,
            energy,
            symmetry: report(&reference.amps)?,
        }];
        let mut psi = reference.amps.clone();
        let mut factors: Vec<(usize, usize)> = Vec::new();
        let mut steps: Vec<(usize, usize)> = Vec::new(); // (element, first factor)
        let mut theta: Vec<f64> = Vec::new();
        let mut last: Option<usize> = None;
        let mut repeats = 0;
        let mut hinv: Option<DMatrix<f64>> = None;

        let finish = |iterations, reason, steps: &[(usize, usize)], theta: &[f64], psi: Vec<f64>| {
            let ansatz = steps
                .iter()
                .map(|&(e, f)| AnsatzStep {
                    element_id: self.pool[e].element.id.clone(),
                    thetas: theta[f..f + self.pool[e].matrices.len()].to_vec(),
                })
                .collect();
            Ok(AdaptResult {
                trace: AdaptTrace { iterations, termination_reason: reason },
                ansatz,
                state: StateVector { basis: self.basis.clone(), amps: psi },
                param_budget: budget,
            })
        };
        if budget == 0 || self.pool.is_empty() {
            let reason = if budget == 0 { TerminationReason::ParamBudget } else { TerminationReason::GradVanished };
            return finish(iterations, reason, &steps, &theta, psi);
        }

        for it in 1..=cfg.max_iters {
            let (idx, score, init) = self.select(&psi, energy, cfg.scan_points);
            if !(score >= cfg.score_tol) {
                return finish(iterations, TerminationReason::GradVanished, &steps, &theta, psi);
            }
            steps.push((idx, factors.len()));
            for (k, t) in init.iter().enumerate() {
                factors.push((idx, k));
                theta.push(*t);
            }
            let problem = VqeProblem {
                h: &self.hamiltonian,
                factors: factors.iter().map(|&(e, k)| &self.generators[e][k]).collect(),
                reference: &reference.amps,
            };
            let h0 = hinv.as_ref().map(|h| extend_inverse_hessian(h, theta.len()));
            let m = vqe_minimize(&problem, &theta, h0.as_ref(), cfg)?;
            let e_new = m.f;
            theta = m.x;
            hinv = Some(m.inverse_hessian);
            psi = problem.state(&theta);
            if last == Some(idx) && (energy - e_new).abs() < cfg.stagnation_tol {
                repeats += 1;
            } else {
                repeats = 1;
            }
            last = Some(idx);
            energy = e_new;
            iterations.push(IterationRecord {
                iteration: it,
                selected_id: Some(self.pool[idx].element.id.clone()),
                selection_score: Some(score),
                n_params: theta.len(),
                energy,
                symmetry: report(&psi)?,
            });
            if theta.len() >= budget {
                return finish(iterations, TerminationReason::ParamBudget, &steps, &theta, psi);
            }
            if repeats >= cfg.stagnation_repeats {
                return finish(iterations, TerminationReason::Stagnation, &steps, &theta, psi);
            }
        }
        finish(iterations, TerminationReason::MaxIters, &steps, &theta, psi)
    }
}

pub fn adapt_run(m: &MolecularIntegrals, cfg: &AdaptConfig, reference: &ReferenceSpec) -> Result<AdaptTrace> {
    Ok(AdaptProblem::new(m, cfg)?.run(cfg, reference)?.trace)
}

/// Irrep of the reference determinant.
pub fn reference_irrep(spec: &ReferenceSpec, orbital_irreps: &[IrrepLabel]) -> Result<IrrepLabel> {
    Ok(spec.determinant()?.irrep(orbital_irreps))
}
