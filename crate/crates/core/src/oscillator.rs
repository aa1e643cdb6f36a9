//! The truncated harmonic oscillator: dimension `tau + 1`, ladder operators
//! with the top level cut off, and equality-up-to-the-top-corner.
//!
//! Truncation turns the canonical commutator into
//! `[a, adag] = id - (tau+1) |tau><tau|`, so operator identities are checked
//! either exactly or modulo terms supported on the top level. Two corner
//! notions are provided: the strict form, where the difference factors as
//! `(|tau><tau|)^{x sites} (x) h` for a declared set of sites, and a mask form
//! for lattice sums whose corner terms sit at single sites.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{comm, LinOp, Space, StateVec};

/// A single truncated oscillator with its ladder matrices.
#[derive(Clone, Debug)]
pub struct Oscillator {
    tau: usize,
    space: Space,
    lower: LinOp,
    raise: LinOp,
    number: LinOp,
}

/// Build the `(tau+1)`-level oscillator. The lowering operator has `sqrt(n)`
/// on the superdiagonal; raising is its dagger and annihilates `|tau>`.
pub fn build_oscillator(tau: usize) -> Result<Oscillator> {
    if tau < 1 {
        return Err(Error::Config(format!("oscillator cutoff tau must be >= 1, got {tau}")));
    }
    let dim = tau + 1;
    let space = Space::orthonormal("osc", dim);
    let entries: Vec<(u32, u32, C64)> = (1..dim)
        .map(|n| ((n - 1) as u32, n as u32, C64::new((n as f64).sqrt(), 0.0)))
        .collect();
    let lower = LinOp::from_entries(space.clone(), space.clone(), entries);
    let raise = lower.dagger();
    let number = raise.compose(&lower)?;
    Ok(Oscillator {
        tau,
        space,
        lower,
        raise,
        number,
    })
}

impl Oscillator {
    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.tau + 1
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn lower(&self) -> &LinOp {
        &self.lower
    }

    pub fn raise(&self) -> &LinOp {
        &self.raise
    }

    pub fn number(&self) -> &LinOp {
        &self.number
    }

    pub fn level(&self, n: usize) -> StateVec {
        StateVec::basis(self.space.clone(), n)
    }

    /// `|tau><tau|`.
    pub fn top_projector(&self) -> LinOp {
        let t = self.tau as u32;
        LinOp::from_entries(
            self.space.clone(),
            self.space.clone(),
            vec![(t, t, C64::new(1.0, 0.0))],
        )
    }
}

/// `comm(a, adag)`; equals `id - (tau+1)|tau><tau|` exactly.
pub fn ladder_commutator(osc: &Oscillator) -> LinOp {
    comm(osc.lower(), osc.raise()).expect("square operators on one space")
}

/// `E * N`, the single-oscillator Hamiltonian.
pub fn hamiltonian_single(osc: &Oscillator, energy: f64) -> Result<LinOp> {
    if energy < 0.0 {
        return Err(Error::Config("oscillator energy must be nonnegative".into()));
    }
    Ok(osc.number().scale(C64::new(energy, 0.0)))
}

/// Outcome of an equality-up-to-the-corner check on one oscillator.
#[derive(Clone, Debug)]
pub struct TauCheck {
    pub pass: bool,
    /// Coefficient of `|tau><tau|` in the difference.
    pub scalar: C64,
    /// Largest difference entry away from the corner.
    pub residue: f64,
}

/// `f = g` up to a multiple of `|tau><tau|`. The corner scalar is read from
/// the `(tau, tau)` entry; the tolerance applies to every other entry.
pub fn equal_up_to_tau(f: &LinOp, g: &LinOp, tau: usize, tol: f64) -> Result<TauCheck> {
    let dim = tau + 1;
    if f.rows() != dim || f.cols() != dim || g.rows() != dim || g.cols() != dim {
        return Err(Error::Shape(format!(
            "equal_up_to_tau expects {dim}x{dim} operators"
        )));
    }
    let d = f.sub(g)?;
    let scalar = d.get(tau, tau);
    let mut residue = 0.0f64;
    for (i, j, v) in d.entries() {
        if i as usize == tau && j as usize == tau {
            continue;
        }
        residue = residue.max(v.norm());
    }
    Ok(TauCheck {
        pass: residue <= tol,
        scalar,
        residue,
    })
}

/// Shape of a field-space decomposition `H^{x sites} (x) aux`, oscillator
/// factors first in row-major order.
#[derive(Clone, Copy, Debug)]
pub struct FieldDecomp {
    pub tau: usize,
    pub sites: usize,
    pub dom_aux: usize,
    pub cod_aux: usize,
}

impl FieldDecomp {
    pub fn osc_dim(&self) -> usize {
        (self.tau + 1).pow(self.sites as u32)
    }

    pub fn dom_dim(&self) -> usize {
        self.osc_dim() * self.dom_aux
    }

    pub fn cod_dim(&self) -> usize {
        self.osc_dim() * self.cod_aux
    }
}

/// Outcome of the strict field-space corner check.
#[derive(Clone, Debug)]
pub struct TauFieldCheck {
    pub pass: bool,
    /// The extracted factor `h` on the auxiliary legs.
    pub h: LinOp,
    /// Largest difference entry outside the all-top corner block.
    pub residue: f64,
}

/// `f = g` up to `(|tau><tau|)^{x sites} (x) h`: the difference must be
/// supported on the all-top corner of the oscillator factors; `h` is read off
/// that corner block and returned.
pub fn equal_up_to_tau_field(
    f: &LinOp,
    g: &LinOp,
    decomp: &FieldDecomp,
    tol: f64,
) -> Result<TauFieldCheck> {
    if f.rows() != decomp.cod_dim()
        || f.cols() != decomp.dom_dim()
        || g.rows() != decomp.cod_dim()
        || g.cols() != decomp.dom_dim()
    {
        return Err(Error::Shape("equal_up_to_tau_field decomposition".into()));
    }
    let d = f.sub(g)?;
    let corner = decomp.osc_dim() - 1; // all-top multi-index is last in row-major order
    let aux_dom = Space::orthonormal("aux-dom", decomp.dom_aux);
    let aux_cod = Space::orthonormal("aux-cod", decomp.cod_aux);
    let mut h_entries = Vec::new();
    let mut residue = 0.0f64;
    for (i, j, v) in d.entries() {
        let (fi, ai) = ((i as usize) / decomp.cod_aux, (i as usize) % decomp.cod_aux);
        let (fj, aj) = ((j as usize) / decomp.dom_aux, (j as usize) % decomp.dom_aux);
        if fi == corner && fj == corner {
            h_entries.push((ai as u32, aj as u32, v));
        } else {
            residue = residue.max(v.norm());
        }
    }
    let h = LinOp::from_entries(aux_dom, aux_cod, h_entries);
    Ok(TauFieldCheck {
        pass: residue <= tol,
        h,
        residue,
    })
}

/// Split a difference into its single-site corner support and the rest.
///
/// Lattice sums produce corner terms of the form
/// `sum_p |tau><tau|_p (x) h_p`, whose entries connect basis states that share
/// at least one site at occupation `tau` on both sides. Returns
/// `(off-corner residue, largest corner entry)`.
pub fn tau_corner_residue(
    d: &LinOp,
    tau: usize,
    sites: usize,
    dom_aux: usize,
    cod_aux: usize,
) -> (f64, f64) {
    let base = tau + 1;
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut out = vec![0usize; sites];
        for s in (0..sites).rev() {
            out[s] = idx % base;
            idx /= base;
        }
        out
    };
    let mut off = 0.0f64;
    let mut corner = 0.0f64;
    for (i, j, v) in d.entries() {
        let fi = (i as usize) / cod_aux;
        let fj = (j as usize) / dom_aux;
        let di = digits(fi);
        let dj = digits(fj);
        let on_corner = (0..sites).any(|s| di[s] == tau && dj[s] == tau);
        if on_corner {
            corner = corner.max(v.norm());
        } else {
            off = off.max(v.norm());
        }
    }
    (off, corner)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn tau1_lowering_matrix() {
        let osc = build_oscillator(1).unwrap();
        assert_eq!(osc.lower().get(0, 1), c(1.0));
        assert_eq!(osc.lower().get(0, 0), c(0.0));
        assert_eq!(osc.lower().get(1, 0), c(0.0));
        assert_eq!(osc.lower().get(1, 1), c(0.0));
    }

    #[test]
    fn tau2_lowering_matrix() {
        // expand the definition: entries sqrt(1), sqrt(2) on the superdiagonal
        let osc = build_oscillator(2).unwrap();
        assert_eq!(osc.lower().get(0, 1), c(1.0));
        assert!((osc.lower().get(1, 2) - c(2.0_f64.sqrt())).norm() < 1e-15);
        assert_eq!(osc.lower().get(0, 2), c(0.0));
    }

    #[test]
    fn truncation_boundaries() {
        let osc = build_oscillator(3).unwrap();
        let ground = osc.level(0);
        assert_eq!(osc.lower().apply(&ground).unwrap().norm2(), 0.0);
        let top = osc.level(3);
        assert_eq!(osc.raise().apply(&top).unwrap().norm2(), 0.0);
    }

    #[test]
    fn number_operator_eigenvalues() {
        for tau in 1..=4 {
            let osc = build_oscillator(tau).unwrap();
            for n in 0..=tau {
                let v = osc.level(n);
                let nv = osc.number().apply(&v).unwrap();
                assert!(nv.max_abs_diff(&v.scale(c(n as f64))) < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_tau_zero() {
        assert!(build_oscillator(0).is_err());
    }

    #[test]
    fn ladder_commutator_small_cases() {
        // 2x2 expansion
        let osc = build_oscillator(1).unwrap();
        let k = ladder_commutator(&osc);
        assert_eq!(k.get(0, 0), c(1.0));
        assert_eq!(k.get(1, 1), c(-1.0));
        assert_eq!(k.get(0, 1), c(0.0));
        // 3x3 expansion
        let osc = build_oscillator(2).unwrap();
        let k = ladder_commutator(&osc);
        for (i, want) in [(0, 1.0), (1, 1.0), (2, -2.0)] {
            assert!((k.get(i, i) - c(want)).norm() < 1e-14);
        }
    }

    #[test]
    fn commutator_closed_form_and_low_block() {
        for tau in 1..=4 {
            let osc = build_oscillator(tau).unwrap();
            let k = ladder_commutator(&osc);
            let expected = LinOp::identity(osc.space().clone())
                .sub(&osc.top_projector().scale(c((tau + 1) as f64)))
                .unwrap();
            assert!(k.max_abs_diff(&expected).unwrap() < 1e-12);
            // identity when restricted to span{|0>..|tau-1>}
            for n in 0..tau {
                for m in 0..tau {
                    let want = if n == m { 1.0 } else { 0.0 };
                    assert!((k.get(n, m) - c(want)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn number_ladder_commutators_are_exact() {
        for tau in 1..=4 {
            let osc = build_oscillator(tau).unwrap();
            let up = comm(osc.number(), osc.raise()).unwrap();
            assert!(up.max_abs_diff(osc.raise()).unwrap() < 1e-12);
            let down = comm(osc.number(), osc.lower()).unwrap();
            assert!(down.max_abs_diff(&osc.lower().scale(c(-1.0))).unwrap() < 1e-12);
        }
    }

    #[test]
    fn equal_up_to_tau_basic_cases() {
        let osc = build_oscillator(2).unwrap();
        let id = LinOp::identity(osc.space().clone());

        let same = equal_up_to_tau(&id, &id, 2, 1e-12).unwrap();
        assert!(same.pass);
        assert_eq!(same.scalar, c(0.0));

        let k = ladder_commutator(&osc);
        let vs_id = equal_up_to_tau(&k, &id, 2, 1e-12).unwrap();
        assert!(vs_id.pass);
        assert!((vs_id.scalar - c(-3.0)).norm() < 1e-14);

        // wrong support: difference |0><0| must fail
        let bad = id
            .add(&LinOp::from_entries(
                osc.space().clone(),
                osc.space().clone(),
                vec![(0, 0, c(1.0))],
            ))
            .unwrap();
        assert!(!equal_up_to_tau(&bad, &id, 2, 1e-12).unwrap().pass);
    }

    #[test]
    fn equal_up_to_tau_is_an_equivalence() {
        let osc = build_oscillator(2).unwrap();
        let id = LinOp::identity(osc.space().clone());
        let f = id.add(&osc.top_projector().scale(c(2.5))).unwrap();
        let g = id.add(&osc.top_projector().scale(c(-1.0))).unwrap();
        // reflexive, symmetric, transitive
        assert!(equal_up_to_tau(&f, &f, 2, 1e-12).unwrap().pass);
        assert!(equal_up_to_tau(&f, &g, 2, 1e-12).unwrap().pass);
        assert!(equal_up_to_tau(&g, &f, 2, 1e-12).unwrap().pass);
        assert!(equal_up_to_tau(&f, &id, 2, 1e-12).unwrap().pass);
        assert!(equal_up_to_tau(&g, &id, 2, 2e-12).unwrap().pass);
    }

    #[test]
    fn field_corner_check_constructed_cases() {
        let tau = 2usize;
        let sites = 2usize;
        let aux = 3usize;
        let decomp = FieldDecomp {
            tau,
            sites,
            dom_aux: aux,
            cod_aux: aux,
        };
        let dim = decomp.dom_dim();
        let sp = Space::orthonormal("f", dim);
        let f0 = LinOp::identity(sp.clone());

        // f = g -> pass with h = 0
        let chk = equal_up_to_tau_field(&f0, &f0, &decomp, 1e-12).unwrap();
        assert!(chk.pass);
        assert_eq!(chk.h.opnorm_max(), 0.0);

        // difference (|tau><tau|)^{x2} (x) id_aux -> pass with h = id
        let corner = decomp.osc_dim() - 1;
        let mut entries = Vec::new();
        for a in 0..aux {
            entries.push((
                (corner * aux + a) as u32,
                (corner * aux + a) as u32,
                c(1.0),
            ));
        }
        let diff = LinOp::from_entries(sp.clone(), sp.clone(), entries);
        let g = f0.add(&diff).unwrap();
        let chk = equal_up_to_tau_field(&g, &f0, &decomp, 1e-12).unwrap();
        assert!(chk.pass);
        let id_aux = LinOp::identity(Space::orthonormal("aux", aux));
        assert!(chk.h.max_abs_diff(&id_aux).unwrap() < 1e-14);

        // support outside the all-top corner -> fail
        let stray = LinOp::from_entries(sp.clone(), sp, vec![(0, 0, c(1.0))]);
        let g = f0.add(&stray).unwrap();
        assert!(!equal_up_to_tau_field(&g, &f0, &decomp, 1e-12).unwrap().pass);
    }

    #[test]
    fn single_hamiltonian() {
        let osc = build_oscillator(2).unwrap();
        let h0 = hamiltonian_single(&osc, 0.0).unwrap();
        assert_eq!(h0.opnorm_max(), 0.0);
        let h = hamiltonian_single(&osc, 1.0).unwrap();
        for (i, want) in [(0, 0.0), (1, 1.0), (2, 2.0)] {
            assert!((h.get(i, i) - c(want)).norm() < 1e-15);
        }
        assert_eq!(comm(&h, osc.number()).unwrap().opnorm_max(), 0.0);
    }
}
