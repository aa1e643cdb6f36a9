//! The field space: one truncated oscillator per momentum lattice point.
//!
//! Two backends span the same physics at different scales. The dense backend
//! is the full tensor product, dimension `(tau+1)^(M^n)`, and sees every
//! top-corner effect; the sparse backend keeps only occupation states with
//! total particle number at most `n_max`, which scales much further but cannot
//! witness corner corrections above the cutoff. Raising past the cutoff on the
//! sparse backend annihilates the state and marks the operator as
//! sector-truncated; silent truncation is not allowed.
//!
//! Site ordering is the lexicographic momentum enumeration, and the dense
//! basis index is row-major mixed-radix over occupations (site 0 most
//! significant), so tensor factor order is fixed once and for all.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use num_complex::Complex64 as C64;

use crate::dynamics::{dispersion_table, Dispersion};
use crate::error::{Error, Result};
use crate::lattice::{
    all_momenta, character, LatticeConfig, MomentumPoint, PositionPoint,
};
use crate::linalg::{LinOp, Space, StateVec};
use crate::oscillator::{build_oscillator, Oscillator};

/// Default refusal threshold for the dense tensor-product dimension.
pub const DEFAULT_DENSE_CAP: u128 = 65536;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Dense,
    Sparse { n_max: usize },
}

impl Backend {
    pub fn tag(&self) -> String {
        match self {
            Backend::Dense => "dense".into(),
            Backend::Sparse { n_max } => format!("sparse(n_max={n_max})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderKind {
    Lower,
    Raise,
}

#[derive(Clone, Debug)]
struct SparseBasis {
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

/// A basis element of the occupation basis: site index -> occupation, zero
/// occupations omitted, together with a complex amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupationState {
    pub occ: BTreeMap<usize, u8>,
    pub amp: C64,
}

impl OccupationState {
    pub fn total(&self) -> usize {
        self.occ.values().map(|&v| v as usize).sum()
    }

    pub fn occupation_at(&self, site: usize) -> u8 {
        self.occ.get(&site).copied().unwrap_or(0)
    }
}

/// The joint state space of all site oscillators over one lattice.
#[derive(Clone, Debug)]
pub struct FockSpace {
    cfg: LatticeConfig,
    backend: Backend,
    sites: Vec<MomentumPoint>,
    osc: Oscillator,
    disp: Dispersion,
    space: Space,
    sparse: Option<SparseBasis>,
}

fn enumerate_occupations(sites: usize, tau: usize, n_max: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current = vec![0u8; sites];
    fn rec(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, site: usize, budget: usize, tau: usize) {
        if site == current.len() {
            out.push(current.clone());
            return;
        }
        for d in 0..=tau.min(budget) {
            current[site] = d as u8;
            rec(out, current, site + 1, budget - d, tau);
        }
        current[site] = 0;
    }
    rec(&mut out, &mut current, 0, n_max, tau);
    out
}

impl FockSpace {
    pub fn new(cfg: &LatticeConfig, backend: Backend, dense_cap: u128) -> Result<Self> {
        let sites = all_momenta(cfg);
        let osc = build_oscillator(cfg.tau())?;
        let disp = dispersion_table(cfg)?;
        let (space, sparse) = match backend {
            Backend::Dense => {
                let dim = (cfg.tau() as u128 + 1)
                    .checked_pow(sites.len() as u32)
                    .ok_or(Error::DenseCap {
                        dim: u128::MAX,
                        cap: dense_cap,
                    })?;
                if dim > dense_cap {
                    return Err(Error::DenseCap {
                        dim,
                        cap: dense_cap,
                    });
                }
                (Space::orthonormal("fock-dense", dim as usize), None)
            }
            Backend::Sparse { n_max } => {
                let states = enumerate_occupations(sites.len(), cfg.tau(), n_max);
                let index = states
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), i))
                    .collect();
                (
                    Space::orthonormal("fock-occ", states.len()),
                    Some(SparseBasis { states, index }),
                )
            }
        };
        Ok(FockSpace {
            cfg: cfg.clone(),
            backend,
            sites,
            osc,
            disp,
            space,
            sparse,
        })
    }

    pub fn dense(cfg: &LatticeConfig) -> Result<Self> {
        Self::new(cfg, Backend::Dense, DEFAULT_DENSE_CAP)
    }

    pub fn sparse(cfg: &LatticeConfig, n_max: usize) -> Result<Self> {
        Self::new(cfg, Backend::Sparse { n_max }, DEFAULT_DENSE_CAP)
    }

    pub fn cfg(&self) -> &LatticeConfig {
        &self.cfg
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn sites(&self) -> &[MomentumPoint] {
        &self.sites
    }

    pub fn oscillator(&self) -> &Oscillator {
        &self.osc
    }

    pub fn dispersion(&self) -> &Dispersion {
        &self.disp
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn tau(&self) -> usize {
        self.cfg.tau()
    }

    pub fn site_index(&self, p: &MomentumPoint) -> Result<usize> {
        if p.shape() != self.cfg.shape() {
            return Err(Error::UnknownSite(format!("{:?}", p.k())));
        }
        Ok(p.index())
    }

    /// Occupation digits of a basis index, one entry per site.
    pub fn occupation_digits(&self, idx: usize) -> Vec<u8> {
        match &self.sparse {
            Some(basis) => basis.states[idx].clone(),
            None => {
                let base = self.tau() + 1;
                let mut digits = vec![0u8; self.sites.len()];
                let mut rem = idx;
                for s in (0..self.sites.len()).rev() {
                    digits[s] = (rem % base) as u8;
                    rem /= base;
                }
                digits
            }
        }
    }

    pub fn occupation_state(&self, idx: usize, amp: C64) -> OccupationState {
        let digits = self.occupation_digits(idx);
        let occ = digits
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(s, &d)| (s, d))
            .collect();
        OccupationState { occ, amp }
    }

    /// Basis index of an occupation vector, if representable on this backend.
    pub fn basis_index(&self, occ: &[u8]) -> Option<usize> {
        if occ.len() != self.sites.len() || occ.iter().any(|&d| d as usize > self.tau()) {
            return None;
        }
        match &self.sparse {
            Some(basis) => basis.index.get(occ).copied(),
            None => {
                let base = self.tau() + 1;
                Some(
                    occ.iter()
                        .fold(0usize, |acc, &d| acc * base + d as usize),
                )
            }
        }
    }

    /// All occupations zero, amplitude one.
    pub fn vacuum(&self) -> StateVec {
        StateVec::basis(self.space.clone(), 0)
    }

    /// Ladder operator at one site, identity elsewhere.
    pub fn site_ladder(&self, p: &MomentumPoint, kind: LadderKind) -> Result<LinOp> {
        let s = self.site_index(p)?;
        Ok(self.site_ladder_by_index(s, kind))
    }

    pub fn site_ladder_by_index(&self, site: usize, kind: LadderKind) -> LinOp {
        let tau = self.tau();
        match &self.sparse {
            None => {
                let dim = self.dim();
                let base = tau + 1;
                let stride = base.pow((self.sites.len() - 1 - site) as u32);
                let mut entries = Vec::new();
                for col in 0..dim {
                    let d = (col / stride) % base;
                    match kind {
                        LadderKind::Lower => {
                            if d >= 1 {
                                entries.push((
                                    (col - stride) as u32,
                                    col as u32,
                                    C64::new((d as f64).sqrt(), 0.0),
                                ));
                            }
                        }
                        LadderKind::Raise => {
                            if d < tau {
                                entries.push((
                                    (col + stride) as u32,
                                    col as u32,
                                    C64::new(((d + 1) as f64).sqrt(), 0.0),
                                ));
                            }
                        }
                    }
                }
                LinOp::from_entries(self.space.clone(), self.space.clone(), entries)
            }
            Some(basis) => {
                let n_max = match self.backend {
                    Backend::Sparse { n_max } => n_max,
                    Backend::Dense => unreachable!(),
                };
                let mut entries = Vec::new();
                let mut truncated = false;
                for (col, occ) in basis.states.iter().enumerate() {
                    let d = occ[site] as usize;
                    match kind {
                        LadderKind::Lower => {
                            if d >= 1 {
                                let mut img = occ.clone();
                                img[site] = (d - 1) as u8;
                                let row = basis.index[&img];
                                entries.push((
                                    row as u32,
                                    col as u32,
                                    C64::new((d as f64).sqrt(), 0.0),
                                ));
                            }
                        }
                        LadderKind::Raise => {
                            if d < tau {
                                let total: usize = occ.iter().map(|&v| v as usize).sum();
                                if total < n_max {
                                    let mut img = occ.clone();
                                    img[site] = (d + 1) as u8;
                                    let row = basis.index[&img];
                                    entries.push((
                                        row as u32,
                                        col as u32,
                                        C64::new(((d + 1) as f64).sqrt(), 0.0),
                                    ));
                                } else {
                                    // true image exists above the cutoff: flag it
                                    truncated = true;
                                }
                            }
                        }
                    }
                }
                LinOp::from_entries(self.space.clone(), self.space.clone(), entries)
                    .with_truncated(truncated)
            }
        }
    }

    /// `a(p) = sqrt(m_ir^n) a_p` and its dagger.
    pub fn rescaled_ladder(&self, p: &MomentumPoint, kind: LadderKind) -> Result<LinOp> {
        let scale = self.cfg.m_ir_pow().sqrt();
        Ok(self.site_ladder(p, kind)?.scale(C64::new(scale, 0.0)))
    }

    /// Relativistically normalised ladder: `sqrt(2 E_p)` times the rescaled one.
    pub fn rel_ladder(&self, p: &MomentumPoint, kind: LadderKind) -> Result<LinOp> {
        let e = self.disp.energy_f64(p)?;
        let scale = (2.0 * e).sqrt();
        Ok(self.rescaled_ladder(p, kind)?.scale(C64::new(scale, 0.0)))
    }

    /// The relativistically normalised one-particle state at `p`.
    pub fn one_particle_rel(&self, p: &MomentumPoint) -> Result<StateVec> {
        self.rel_ladder(p, LadderKind::Raise)?.apply(&self.vacuum())
    }

    /// The field operator as the lattice sum
    /// `sum_p (1/m_ir^n) (1/sqrt(2 E_p)) [a(p) e^{i2pi p.x} + adag(p) e^{-i2pi p.x}]`.
    pub fn field_phi(&self, x: &PositionPoint) -> Result<LinOp> {
        let measure = 1.0 / self.cfg.m_ir_pow();
        let mut acc = LinOp::zeros(self.space.clone(), self.space.clone());
        for p in &self.sites {
            let e = self.disp.energy_f64(p)?;
            let w = C64::new(measure / (2.0 * e).sqrt(), 0.0);
            let phase = character(p, x)?;
            let a = self.rescaled_ladder(p, LadderKind::Lower)?;
            let adag = self.rescaled_ladder(p, LadderKind::Raise)?;
            acc = acc.add(&a.scale(w * phase))?.add(&adag.scale(w * phase.conj()))?;
        }
        Ok(acc)
    }

    /// The conjugate-momentum field, with the prefactor `(-i) sqrt(E_p)/2`:
    /// `sum_p (1/m_ir^n) (-i) (sqrt(E_p)/2) [a(p) e^{i2pi p.x} - adag(p) e^{-i2pi p.x}]`.
    pub fn field_pi(&self, x: &PositionPoint) -> Result<LinOp> {
        let measure = 1.0 / self.cfg.m_ir_pow();
        let mut acc = LinOp::zeros(self.space.clone(), self.space.clone());
        for p in &self.sites {
            let e = self.disp.energy_f64(p)?;
            let w = C64::new(0.0, -1.0) * C64::new(measure * e.sqrt() / 2.0, 0.0);
            let phase = character(p, x)?;
            let a = self.rescaled_ladder(p, LadderKind::Lower)?;
            let adag = self.rescaled_ladder(p, LadderKind::Raise)?;
            acc = acc
                .add(&a.scale(w * phase))?
                .add(&adag.scale(-w * phase.conj()))?;
        }
        Ok(acc)
    }

    /// Diagonal with eigenvalue `sum_p n(p)` on every occupation state.
    pub fn number_operator(&self) -> LinOp {
        let entries = (0..self.dim())
            .filter_map(|idx| {
                let total: usize = self
                    .occupation_digits(idx)
                    .iter()
                    .map(|&d| d as usize)
                    .sum();
                (total > 0).then_some((idx as u32, idx as u32, C64::new(total as f64, 0.0)))
            })
            .collect();
        LinOp::from_entries(self.space.clone(), self.space.clone(), entries)
    }

    /// Integer numerator of the total energy of a basis state: `sum_p e_p n(p)`
    /// where `E_p = e_p / m_ir`. Keeps dynamical phases on the exact grid.
    pub fn energy_num_of(&self, idx: usize) -> i64 {
        self.occupation_digits(idx)
            .iter()
            .enumerate()
            .map(|(s, &d)| self.disp.energy_num_at(s) * d as i64)
            .sum()
    }

    /// Diagonal with eigenvalue `sum_p E_p n(p)` on every occupation state.
    pub fn hamiltonian(&self) -> LinOp {
        let m_ir = self.cfg.m_ir() as f64;
        let entries = (0..self.dim())
            .filter_map(|idx| {
                let e = self.energy_num_of(idx);
                (e != 0).then_some((idx as u32, idx as u32, C64::new(e as f64 / m_ir, 0.0)))
            })
            .collect();
        LinOp::from_entries(self.space.clone(), self.space.clone(), entries)
    }

    /// Apply a word of site ladder operators to the vacuum, rightmost letter
    /// first. Dense backend multiplies the kron-built matrices; the sparse
    /// backend walks occupation transitions directly. Returns the resulting
    /// state and whether any step was sector-truncated.
    pub fn apply_word(&self, word: &[(usize, LadderKind)]) -> Result<(StateVec, bool)> {
        match &self.sparse {
            None => {
                let mut v = self.vacuum();
                for &(site, kind) in word.iter().rev() {
                    v = self.site_ladder_by_index(site, kind).apply(&v)?;
                }
                Ok((v, false))
            }
            Some(basis) => {
                let n_max = match self.backend {
                    Backend::Sparse { n_max } => n_max,
                    Backend::Dense => unreachable!(),
                };
                let tau = self.tau();
                let mut amps: HashMap<Vec<u8>, C64> = HashMap::new();
                amps.insert(vec![0u8; self.sites.len()], C64::new(1.0, 0.0));
                let mut truncated = false;
                for &(site, kind) in word.iter().rev() {
                    let mut next: HashMap<Vec<u8>, C64> = HashMap::new();
                    for (occ, amp) in amps {
                        let d = occ[site] as usize;
                        match kind {
                            LadderKind::Lower => {
                                if d >= 1 {
                                    let mut img = occ.clone();
                                    img[site] = (d - 1) as u8;
                                    *next.entry(img).or_insert(C64::new(0.0, 0.0)) +=
                                        amp * (d as f64).sqrt();
                                }
                            }
                            LadderKind::Raise => {
                                if d < tau {
                                    let total: usize =
                                        occ.iter().map(|&v| v as usize).sum();
                                    if total < n_max {
                                        let mut img = occ.clone();
                                        img[site] = (d + 1) as u8;
                                        *next.entry(img).or_insert(C64::new(0.0, 0.0)) +=
                                            amp * ((d + 1) as f64).sqrt();
                                    } else {
                                        truncated = true;
                                    }
                                }
                            }
                        }
                    }
                    amps = next;
                }
                let mut v = StateVec::zero(self.space.clone());
                for (occ, amp) in amps {
                    let idx = basis.index[&occ];
                    v.set(idx, v.get(idx) + amp);
                }
                Ok((v, truncated))
            }
        }
    }
}

/// Sum occupations per bin; the bins must partition the momentum lattice.
pub fn coarse_grain_occupation(
    cfg: &LatticeConfig,
    occ: &OccupationState,
    bins: &[Vec<MomentumPoint>],
) -> Result<Vec<u64>> {
    let total_points = cfg.points();
    let mut seen = vec![false; total_points];
    for bin in bins {
        for p in bin {
            if p.shape() != cfg.shape() {
                return Err(Error::NonPartition("point from another lattice".into()));
            }
            let idx = p.index();
            if seen[idx] {
                return Err(Error::NonPartition(format!(
                    "momentum index {idx} appears twice"
                )));
            }
            seen[idx] = true;
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::NonPartition("some momentum points uncovered".into()));
    }
    Ok(bins
        .iter()
        .map(|bin| {
            bin.iter()
                .map(|p| occ.occupation_at(p.index()) as u64)
                .sum()
        })
        .collect())
}

/// Coordinate-list dump: one `row col re im` line per nonzero entry, sorted.
pub fn write_coo(op: &LinOp, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "# rows={} cols={}", op.rows(), op.cols())?;
    let mut entries = op.entries();
    entries.sort_by_key(|&(i, j, _)| (i, j));
    for (i, j, v) in entries {
        writeln!(out, "{} {} {:.17e} {:.17e}", i, j, v.re, v.im)?;
    }
    Ok(())
}
