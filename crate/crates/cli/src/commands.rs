use std::collections::BTreeMap;
use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use adaptsym::adapt::{build_reference, working_sector, AdaptConfig, AdaptProblem, ParamBudget, ReferenceSpec};
use adaptsym::fci::{lowest_eigenpairs, lowest_with_spin, EigenOptions};
use adaptsym::fcidump::{parse_fcidump, IrrepLabel, MolecularIntegrals};
use adaptsym::fock::{build_hamiltonian, enumerate_sector, Determinant, SectorBasis, SectorConstraints, StateVector};
use adaptsym::lie::{dla_closure, reachable_subspace, ClosureOptions};
use adaptsym::pools::{realize_on_sector, PoolFamily, PoolKind, PoolSpec};
use adaptsym::symmetry::{csf_basis, parity_matrix, s2_matrix, CsfBasis, SymmetryObservables};

use crate::output::{json_lines, pretty, sha256_hex, to_json, RunManifest, Sink};
use crate::{parse_budget, parse_pool, parse_reference, parse_sector, Common, Failure, PoolArgs};

/// Commutator norm below which an algebra element counts as parity conserving.
const PARITY_TOL: f64 = 1e-9;

struct Fixture {
    path: PathBuf,
    hash: String,
    m: MolecularIntegrals,
}

fn load(path: &Path) -> Result<Fixture, Failure> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        ErrorKind::NotFound => Failure::missing(format!("fixture {} not found", path.display())),
        _ => Failure::missing(format!("cannot read fixture {}: {e}", path.display())),
    })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::config(format!("fixture {} is not UTF-8", path.display())))?;
    let m = parse_fcidump(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    Ok(Fixture { path: path.to_path_buf(), hash: sha256_hex(&bytes), m })
}

impl Fixture {
    fn manifest(
        &self,
        subcommand: &'static str,
        pool: Option<(PoolFamily, bool)>,
        sector: SectorConstraints,
        config: Value,
    ) -> Value {
        to_json(&RunManifest {
            tool: "adaptsym",
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            fixture: self.path.display().to_string(),
            fixture_sha256: self.hash.clone(),
            pool: pool.map(|p| p.0.name().to_string()),
            enforce_spatial: pool.map(|p| p.1),
            sector,
            config,
        })
    }

    fn pool_spec(&self, family: PoolFamily, enforce_spatial: bool) -> PoolSpec {
        PoolSpec { family, enforce_spatial, orbital_irreps: self.m.orbital_irreps().to_vec() }
    }

    /// Lowest orbitals doubly occupied, the rest of `|2S_z|` singly occupied.
    fn default_reference(&self, sector: &SectorConstraints) -> ReferenceSpec {
        let n = sector.n_electrons.unwrap_or(self.m.n_electrons());
        let sz2 = sector.sz2.unwrap_or(self.m.ms2());
        let open = sz2.unsigned_abs() as usize;
        let closed = n.saturating_sub(open) / 2;
        let singles: Vec<usize> = (closed..closed + open).collect();
        let mut r = ReferenceSpec::closed_shell(closed);
        if sz2 >= 0 {
            r.singly_occupied_up = singles;
        } else {
            r.singly_occupied_down = singles;
        }
        r
    }

    fn basis(&self, s: &SectorConstraints) -> Result<Arc<SectorBasis>, Failure> {
        let n = s.n_electrons.unwrap_or(self.m.n_electrons());
        Ok(Arc::new(enumerate_sector(self.m.n_spatial(), n, s.sz2, s.irrep, self.m.orbital_irreps())?))
    }
}

fn full_sector(m: &MolecularIntegrals) -> SectorConstraints {
    SectorConstraints { n_electrons: Some(m.n_electrons()), sz2: Some(m.ms2()), irrep: None }
}

fn dominant_irrep(weights: &BTreeMap<IrrepLabel, f64>) -> Option<IrrepLabel> {
    weights.iter().max_by(|a, b| a.1.total_cmp(b.1)).map(|(l, _)| *l)
}

#[derive(Args, Debug)]
pub struct AdaptArgs {
    #[command(flatten)]
    common: Common,
    /// Pool family: gsd, sagsd, sagspd, sagspd-full or pdint0.
    #[arg(long, value_parser = parse_pool)]
    pool: Option<PoolFamily>,
    #[arg(long)]
    enforce_spatial: bool,
    /// Working sector `N,SZ2[,IRREP]`; derived from fixture and pool by default.
    #[arg(long, value_parser = parse_sector)]
    sector: Option<SectorConstraints>,
    /// Reference `D…[;U…][;W…]`; lowest orbitals filled by default.
    #[arg(long = "ref", value_parser = parse_reference)]
    reference: Option<ReferenceSpec>,
    /// Parameter budget, `auto` or a count.
    #[arg(long, value_parser = parse_budget)]
    param_budget: Option<ParamBudget>,
    #[arg(long)]
    scan_points: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// JSON file with run settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the final state (determinants and amplitudes) here.
    #[arg(long)]
    state_out: Option<PathBuf>,
}

/// Run settings accepted from a JSON file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    pool: Option<PoolFamily>,
    enforce_spatial: Option<bool>,
    sector: Option<SectorConstraints>,
    reference: Option<ReferenceSpec>,
    vqe_grad_tol: Option<f64>,
    vqe_max_micro: Option<usize>,
    stagnation_repeats: Option<usize>,
    param_budget: Option<ParamBudget>,
    scan_points: Option<usize>,
    restarts: Option<usize>,
    max_iters: Option<usize>,
}

/// Amplitudes keyed by determinant word.
#[derive(Debug, Serialize, Deserialize)]
pub struct StateDump {
    pub determinants: Vec<u64>,
    pub amplitudes: Vec<f64>,
}

impl StateDump {
    fn from_state(v: &StateVector) -> Self {
        let (determinants, amplitudes) =
            v.basis.words().iter().zip(&v.amps).filter(|(_, a)| a.abs() > 1e-14).map(|(w, a)| (*w, *a)).unzip();
        StateDump { determinants, amplitudes }
    }

    fn into_state(self, basis: Arc<SectorBasis>) -> Result<StateVector, Failure> {
        if self.determinants.len() != self.amplitudes.len() {
            return Err(Failure::config("state file has mismatched determinant and amplitude counts"));
        }
        let mut v = StateVector::zeros(basis);
        for (w, a) in self.determinants.into_iter().zip(self.amplitudes) {
            let i = v.basis.index_of(Determinant(w)).ok_or_else(|| {
                Failure::config(format!("state determinant {w:#b} lies outside the sector"))
            })?;
            v.amps[i] = a;
        }
        Ok(v)
    }
}

pub fn adapt(a: AdaptArgs) -> Result<(), Failure> {
    let sink = Sink::new(a.common.out.as_deref(), a.common.force)?;
    let state_sink = a.state_out.as_deref().map(|p| Sink::new(Some(p), a.common.force)).transpose()?;
    let file: ConfigFile = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", p.display())))?
        }
        None => ConfigFile::default(),
    };
    let fx = load(&a.common.fcidump)?;
    let family = a.pool.or(file.pool).ok_or_else(|| {
        let names: Vec<&str> = PoolFamily::ALL.iter().map(|f| f.name()).collect();
        Failure::config(format!("no pool given; choose one of {}", names.join(", ")))
    })?;
    let enforce = a.enforce_spatial || file.enforce_spatial.unwrap_or(false);
    let mut cfg = AdaptConfig::new(fx.pool_spec(family, enforce));
    cfg.sector = a.sector.or(file.sector);
    macro_rules! set {
        ($field:ident) => {
            if let Some(v) = a.$field.or(file.$field) {
                cfg.$field = v;
            }
        };
    }
    set!(param_budget);
    set!(scan_points);
    set!(restarts);
    set!(max_iters);
    if let Some(v) = file.vqe_grad_tol {
        cfg.vqe_grad_tol = v;
    }
    if let Some(v) = file.vqe_max_micro {
        cfg.vqe_max_micro = v;
    }
    if let Some(v) = file.stagnation_repeats {
        cfg.stagnation_repeats = v;
    }
    cfg.validate()?;
    let sector = cfg.sector.unwrap_or_else(|| working_sector(&fx.m, &cfg.pool));
    let reference = a.reference.or(file.reference).unwrap_or_else(|| fx.default_reference(&sector));

    let problem = AdaptProblem::new(&fx.m, &cfg)?;
    let result = problem.run(&cfg, &reference)?;

    // symmetry-adapted target: reference irrep, spin |S_z|
    let ref_det = reference.determinant()?;
    let target_sector = SectorConstraints { irrep: Some(ref_det.irrep(fx.m.orbital_irreps())), ..sector };
    let tb = fx.basis(&target_sector)?;
    let th = build_hamiltonian(&fx.m, &tb)?;
    let total_s = sector.sz2.unwrap_or(0).unsigned_abs() as f64 / 2.0;
    let (e_target, _) = lowest_with_spin(&th, &s2_matrix(&tb), tb, total_s, &EigenOptions::default())?;
    let ground = lowest_eigenpairs(&problem.hamiltonian, problem.basis.clone(), 1)?.energies[0];

    let trace = &result.trace;
    let mut config = to_json(&cfg);
    config["reference"] = json!(reference.to_string());
    let manifest = fx.manifest("adapt", Some((family, enforce)), sector, config);
    let mut lines: Vec<Value> = trace
        .iterations
        .iter()
        .map(|r| {
            let mut v = to_json(r);
            v["kind"] = json!("iteration");
            v
        })
        .collect();
    let last = trace.iterations.last().expect("reference record");
    lines.push(to_json(&json!({
        "kind": "summary",
        "manifest": manifest,
        "termination_reason": trace.termination_reason,
        "n_iterations": trace.iterations.len() - 1,
        "n_params": last.n_params,
        "param_budget": result.param_budget,
        "sector_dim": problem.basis.len(),
        "pool_size": problem.pool.len(),
        "reference_energy": trace.iterations[0].energy,
        "final_energy": last.energy,
        "fci_energy": e_target,
        "fci_sector_ground": ground,
        "final_error_vs_fci": last.energy - e_target,
        "max_s2_expect": trace.max_s2(),
        "final_symmetry": last.symmetry,
        "ansatz": result.ansatz,
    })));
    sink.write(&json_lines(&lines))?;
    if let Some(s) = state_sink {
        s.write(&pretty(&to_json(&StateDump::from_state(&result.state))))?;
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
    /// Sector `N,SZ2[,IRREP]`; fixture N and 2·S_z without irrep by default.
    #[arg(long, value_parser = parse_sector)]
    sector: Option<SectorConstraints>,
    /// Number of eigenpairs.
    #[arg(long, default_value_t = 1)]
    k: usize,
}

pub fn spectrum(a: SpectrumArgs) -> Result<(), Failure> {
    let sink = Sink::new(a.common.out.as_deref(), a.common.force)?;
    let fx = load(&a.common.fcidump)?;
    let sector = a.sector.unwrap_or_else(|| full_sector(&fx.m));
    let basis = fx.basis(&sector)?;
    let h = build_hamiltonian(&fx.m, &basis)?;
    let spec = lowest_eigenpairs(&h, basis.clone(), a.k)?;
    let obs = SymmetryObservables::new(basis.clone(), fx.m.orbital_irreps());
    let mut s2 = Vec::new();
    let mut irreps = Vec::new();
    for i in 0..spec.len() {
        let r = obs.report(&spec.state(i))?;
        s2.push(r.s2_expect);
        irreps.push(dominant_irrep(&r.irrep_weights));
    }
    let out = json!({
        "manifest": fx.manifest("spectrum", None, sector, json!({"k": a.k})),
        "sector": sector,
        "dim": basis.len(),
        "energies": spec.energies,
        "s2": s2,
        "irreps": irreps,
    });
    sink.write(&pretty(&to_json(&out)))
}

#[derive(Args, Debug)]
pub struct ClosureArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    pool: PoolArgs,
    #[arg(long, value_parser = parse_sector)]
    sector: Option<SectorConstraints>,
    #[arg(long = "ref", value_parser = parse_reference)]
    reference: Option<ReferenceSpec>,
    /// Largest algebra dimension before giving up.
    #[arg(long, default_value_t = ClosureOptions::default().cap)]
    cap: usize,
}

pub fn closure(a: ClosureArgs) -> Result<(), Failure> {
    let sink = Sink::new(a.common.out.as_deref(), a.common.force)?;
    let fx = load(&a.common.fcidump)?;
    let spec = fx.pool_spec(a.pool.pool, a.pool.enforce_spatial);
    let sector = a.sector.unwrap_or_else(|| working_sector(&fx.m, &spec));
    let basis = fx.basis(&sector)?;
    let reference = a.reference.unwrap_or_else(|| fx.default_reference(&sector));
    let psi = build_reference(&reference, basis.clone())?;
    let pool = realize_on_sector(&spec.build(), &basis)?;
    let gens: Vec<_> = pool.iter().flat_map(|e| e.matrices.iter().cloned()).collect();
    let carrier = if spec.conserves_s2() {
        Some(csf_basis(&basis, sector.sz2.unwrap_or(0).unsigned_abs() as f64 / 2.0)?)
    } else {
        None
    };
    let opts = ClosureOptions { cap: a.cap, ..Default::default() };
    let algebra = dla_closure(&gens, carrier.as_ref(), &opts)?;
    let space = carrier.unwrap_or_else(|| CsfBasis::determinants(&basis));
    let reach = reachable_subspace(&algebra, &psi, &space)?;
    let mut labels: Vec<IrrepLabel> = fx.m.orbital_irreps().to_vec();
    labels.sort();
    labels.dedup();
    let mut parity_norm = 0.0f64;
    for l in labels {
        parity_norm = parity_norm.max(algebra.max_commutator_norm(&parity_matrix(l, &basis, fx.m.orbital_irreps()))?);
    }
    let config = json!({"cap": a.cap, "reference": reference.to_string()});
    let out = json!({
        "manifest": fx.manifest("closure", Some((a.pool.pool, a.pool.enforce_spatial)), sector, config),
        "sector_dim": basis.len(),
        "carrier_dim": algebra.carrier_dim(),
        "n_generators": gens.len(),
        "algebra_dim": algebra.len(),
        "invariant_dim": reach.invariant_dim,
        "complement_dim": reach.complement_dim,
        "parity_conserved": parity_norm < PARITY_TOL,
        "parity_commutator_norm": parity_norm,
    });
    sink.write(&pretty(&to_json(&out)))
}

#[derive(Args, Debug)]
pub struct PoolInfoArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    pool: PoolArgs,
    /// Prune elements that vanish on this sector `N,SZ2[,IRREP]`.
    #[arg(long, value_parser = parse_sector)]
    sector: Option<SectorConstraints>,
}

pub fn pool_info(a: PoolInfoArgs) -> Result<(), Failure> {
    let sink = Sink::new(a.common.out.as_deref(), a.common.force)?;
    let fx = load(&a.common.fcidump)?;
    let spec = fx.pool_spec(a.pool.pool, a.pool.enforce_spatial);
    let mut elements = spec.build();
    if let Some(s) = &a.sector {
        let basis = fx.basis(s)?;
        elements = realize_on_sector(&elements, &basis)?.into_iter().map(|e| e.element).collect();
    }
    let mut by_kind: BTreeMap<PoolKind, usize> = BTreeMap::new();
    for e in &elements {
        *by_kind.entry(e.kind).or_default() += 1;
    }
    let list: Vec<Value> = elements
        .iter()
        .map(|e| {
            json!({
                "id": e.id,
                "kind": e.kind,
                "irrep": e.irrep,
                "n_generators": e.generators.len(),
                "conserved": e.conserved,
            })
        })
        .collect();
    let sector = a.sector.unwrap_or_else(|| full_sector(&fx.m));
    let out = json!({
        "manifest": fx.manifest("pool-info", Some((a.pool.pool, a.pool.enforce_spatial)), sector, json!({"pruned": a.sector.is_some()})),
        "n_elements": elements.len(),
        "by_kind": by_kind.into_iter().map(|(k, n)| (serde_json::to_value(k).unwrap().as_str().unwrap().to_string(), n)).collect::<BTreeMap<_, _>>(),
        "conserves_gamma": spec.conserves_gamma(),
        "conserves_s2": spec.conserves_s2(),
        "elements": list,
    });
    sink.write(&pretty(&to_json(&out)))
}

#[derive(Args, Debug)]
pub struct SymmetryArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_parser = parse_sector)]
    sector: Option<SectorConstraints>,
    /// Reference determinant `D…[;U…][;W…]`.
    #[arg(long = "ref", value_parser = parse_reference, conflicts_with = "state")]
    reference: Option<ReferenceSpec>,
    /// State file as written by `adapt --state-out`.
    #[arg(long)]
    state: Option<PathBuf>,
}

pub fn symmetry_report(a: SymmetryArgs) -> Result<(), Failure> {
    let sink = Sink::new(a.common.out.as_deref(), a.common.force)?;
    let fx = load(&a.common.fcidump)?;
    let sector = a.sector.unwrap_or_else(|| full_sector(&fx.m));
    let basis = fx.basis(&sector)?;
    let (v, source) = match &a.state {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::config(format!("cannot read {}: {e}", p.display())))?;
            let dump: StateDump =
                serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", p.display())))?;
            (dump.into_state(basis.clone())?, p.display().to_string())
        }
        None => {
            let r = a.reference.unwrap_or_else(|| fx.default_reference(&sector));
            (build_reference(&r, basis.clone())?, format!("ref:{r}"))
        }
    };
    let report = SymmetryObservables::new(basis, fx.m.orbital_irreps()).report(&v)?;
    let out = json!({
        "manifest": fx.manifest("symmetry-report", None, sector, json!({"state": source})),
        "report": report,
    });
    sink.write(&pretty(&to_json(&out)))
}
