//! The finite cyclic lattice `Z_M^n` with dual meshes.
//!
//! `M = m_ir * m_uv` with both factors odd. Momentum points sit at `k / m_ir`,
//! position points at `j / m_uv`, with integer labels in `{-(M-1)/2, ..., (M-1)/2}`.
//! Every pairing `p.x = k.j / M` is an exact fraction over `M`, so characters
//! are exact M-th roots of unity. The inner product on lattice functions
//! carries the cell volume `1/m_uv^n`, which makes the character family have
//! squared norm `m_ir^n` and the delta family `m_uv^n`.

use num_complex::Complex64 as C64;
use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::linalg::{Space, StateVec};

/// Root configuration for every lattice-backed computation.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeConfig {
    n: usize,
    m_ir: i64,
    m_uv: i64,
    mass: Ratio<i64>,
    tau: usize,
    tol: f64,
}

/// The (n, m_ir, m_uv) triple that lattice points are labelled by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeShape {
    pub n: usize,
    pub m_ir: i64,
    pub m_uv: i64,
}

impl LatticeShape {
    pub fn modulus(&self) -> i64 {
        self.m_ir * self.m_uv
    }

    pub fn half(&self) -> i64 {
        (self.modulus() - 1) / 2
    }

    pub fn points(&self) -> usize {
        (self.modulus() as usize).pow(self.n as u32)
    }
}

impl LatticeConfig {
    pub fn new(
        n: usize,
        m_ir: i64,
        m_uv: i64,
        mass: Ratio<i64>,
        tau: usize,
        tol: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("spatial dimension n must be >= 1".into()));
        }
        if m_ir < 1 || m_ir % 2 == 0 {
            return Err(Error::Config(format!("m_ir must be odd and >= 1, got {m_ir}")));
        }
        if m_uv < 1 || m_uv % 2 == 0 {
            return Err(Error::Config(format!("m_uv must be odd and >= 1, got {m_uv}")));
        }
        if tau < 1 {
            return Err(Error::Config("tau must be >= 1".into()));
        }
        if mass < Ratio::new(0, 1) {
            return Err(Error::Config("mass must be nonnegative".into()));
        }
        if !(mass * m_ir).is_integer() {
            return Err(Error::MassGrid(format!("{mass}")));
        }
        if !(tol >= 0.0) {
            return Err(Error::Config("tol must be nonnegative".into()));
        }
        Ok(LatticeConfig {
            n,
            m_ir,
            m_uv,
            mass,
            tau,
            tol,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_ir(&self) -> i64 {
        self.m_ir
    }

    pub fn m_uv(&self) -> i64 {
        self.m_uv
    }

    pub fn mass(&self) -> Ratio<i64> {
        self.mass
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn modulus(&self) -> i64 {
        self.m_ir * self.m_uv
    }

    pub fn half(&self) -> i64 {
        (self.modulus() - 1) / 2
    }

    /// Number of lattice points, `M^n`.
    pub fn points(&self) -> usize {
        self.shape().points()
    }

    pub fn shape(&self) -> LatticeShape {
        LatticeShape {
            n: self.n,
            m_ir: self.m_ir,
            m_uv: self.m_uv,
        }
    }

    /// `mass * m_ir`, guaranteed integral by construction.
    pub fn mass_num(&self) -> i64 {
        (self.mass * self.m_ir).to_integer()
    }

    /// `m_ir^n` as a float.
    pub fn m_ir_pow(&self) -> f64 {
        (self.m_ir as f64).powi(self.n as i32)
    }

    /// `m_uv^n` as a float.
    pub fn m_uv_pow(&self) -> f64 {
        (self.m_uv as f64).powi(self.n as i32)
    }
}

/// A point of the momentum lattice: `p = k / m_ir` componentwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MomentumPoint {
    k: Vec<i64>,
    shape: LatticeShape,
}

/// A point of the position lattice: `x = j / m_uv` componentwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PositionPoint {
    j: Vec<i64>,
    shape: LatticeShape,
}

fn wrap(v: i64, modulus: i64) -> i64 {
    let half = (modulus - 1) / 2;
    (v + half).rem_euclid(modulus) - half
}

fn check_components(c: &[i64], shape: &LatticeShape) -> Result<()> {
    if c.len() != shape.n {
        return Err(Error::Config(format!(
            "point has {} components, lattice dimension is {}",
            c.len(),
            shape.n
        )));
    }
    let half = shape.half();
    for &v in c {
        if v < -half || v > half {
            return Err(Error::Config(format!(
                "component {v} outside [-{half}, {half}]"
            )));
        }
    }
    Ok(())
}

impl MomentumPoint {
    pub fn new(shape: LatticeShape, k: Vec<i64>) -> Result<Self> {
        check_components(&k, &shape)?;
        Ok(MomentumPoint { k, shape })
    }

    pub fn zero(shape: LatticeShape) -> Self {
        MomentumPoint {
            k: vec![0; shape.n],
            shape,
        }
    }

    pub fn k(&self) -> &[i64] {
        &self.k
    }

    pub fn shape(&self) -> LatticeShape {
        self.shape
    }

    /// Exact value `p = k / m_ir` per component.
    pub fn value(&self) -> Vec<Ratio<i64>> {
        self.k.iter().map(|&ki| Ratio::new(ki, self.shape.m_ir)).collect()
    }

    /// Group addition, modular in `M` componentwise.
    pub fn add(&self, other: &MomentumPoint) -> Result<MomentumPoint> {
        if self.shape != other.shape {
            return Err(Error::ConfigMismatch("momentum addition".into()));
        }
        let m = self.shape.modulus();
        let k = self
            .k
            .iter()
            .zip(&other.k)
            .map(|(&a, &b)| wrap(a + b, m))
            .collect();
        Ok(MomentumPoint {
            k,
            shape: self.shape,
        })
    }

    pub fn neg(&self) -> MomentumPoint {
        let m = self.shape.modulus();
        MomentumPoint {
            k: self.k.iter().map(|&a| wrap(-a, m)).collect(),
            shape: self.shape,
        }
    }

    /// Position in the lexicographic enumeration.
    pub fn index(&self) -> usize {
        let m = self.shape.modulus();
        let half = self.shape.half();
        self.k
            .iter()
            .fold(0usize, |acc, &ki| acc * m as usize + (ki + half) as usize)
    }
}

impl PositionPoint {
    pub fn new(shape: LatticeShape, j: Vec<i64>) -> Result<Self> {
        check_components(&j, &shape)?;
        Ok(PositionPoint { j, shape })
    }

    pub fn zero(shape: LatticeShape) -> Self {
        PositionPoint {
            j: vec![0; shape.n],
            shape,
        }
    }

    pub fn j(&self) -> &[i64] {
        &self.j
    }

    pub fn shape(&self) -> LatticeShape {
        self.shape
    }

    /// Exact value `x = j / m_uv` per component.
    pub fn value(&self) -> Vec<Ratio<i64>> {
        self.j.iter().map(|&ji| Ratio::new(ji, self.shape.m_uv)).collect()
    }

    pub fn add(&self, other: &PositionPoint) -> Result<PositionPoint> {
        if self.shape != other.shape {
            return Err(Error::ConfigMismatch("position addition".into()));
        }
        let m = self.shape.modulus();
        let j = self
            .j
            .iter()
            .zip(&other.j)
            .map(|(&a, &b)| wrap(a + b, m))
            .collect();
        Ok(PositionPoint {
            j,
            shape: self.shape,
        })
    }

    pub fn neg(&self) -> PositionPoint {
        let m = self.shape.modulus();
        PositionPoint {
            j: self.j.iter().map(|&a| wrap(-a, m)).collect(),
            shape: self.shape,
        }
    }

    pub fn sub(&self, other: &PositionPoint) -> Result<PositionPoint> {
        self.add(&other.neg())
    }

    pub fn index(&self) -> usize {
        let m = self.shape.modulus();
        let half = self.shape.half();
        self.j
            .iter()
            .fold(0usize, |acc, &ji| acc * m as usize + (ji + half) as usize)
    }
}

fn enumerate_labels(shape: LatticeShape) -> Vec<Vec<i64>> {
    let m = shape.modulus() as usize;
    let half = shape.half();
    let total = shape.points();
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut digits = vec![0i64; shape.n];
        let mut rem = idx;
        for d in (0..shape.n).rev() {
            digits[d] = (rem % m) as i64 - half;
            rem /= m;
        }
        out.push(digits);
    }
    out
}

/// All momentum points in lexicographic order on `k`.
pub fn all_momenta(cfg: &LatticeConfig) -> Vec<MomentumPoint> {
    let shape = cfg.shape();
    enumerate_labels(shape)
        .into_iter()
        .map(|k| MomentumPoint { k, shape })
        .collect()
}

/// All position points in lexicographic order on `j`.
pub fn all_positions(cfg: &LatticeConfig) -> Vec<PositionPoint> {
    let shape = cfg.shape();
    enumerate_labels(shape)
        .into_iter()
        .map(|j| PositionPoint { j, shape })
        .collect()
}

/// `e^{i 2 pi num/den}` computed from the reduced fraction, so equal phases
/// are bit-identical across call sites.
pub fn unit_phase(num: i64, den: i64) -> C64 {
    debug_assert!(den > 0);
    let r = num.rem_euclid(den);
    if r == 0 {
        return C64::new(1.0, 0.0);
    }
    let g = r.gcd(&den);
    let (rn, rd) = (r / g, den / g);
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * rn as f64 / rd as f64)
}

/// The character `chi_p(x) = e^{i 2 pi p.x}`, an exact M-th root of unity.
pub fn character(p: &MomentumPoint, x: &PositionPoint) -> Result<C64> {
    if p.shape != x.shape {
        return Err(Error::ConfigMismatch("character".into()));
    }
    let m = p.shape.modulus();
    let mut num = 0i64;
    for (ki, ji) in p.k.iter().zip(&x.j) {
        num = (num + (ki.rem_euclid(m)) * (ji.rem_euclid(m))).rem_euclid(m);
    }
    Ok(unit_phase(num, m))
}

/// Function space over the position lattice: dimension `M^n`, every index
/// weighted by the cell volume `1/m_uv^n`.
pub fn position_space(cfg: &LatticeConfig) -> Space {
    Space::uniform("lat-fn", cfg.points(), 1.0 / cfg.m_uv_pow())
}

/// Weighted inner product of two lattice functions.
pub fn inner(f: &StateVec, g: &StateVec) -> Result<C64> {
    f.inner(g)
}

/// The momentum eigenstate `chi_p` as a lattice function.
pub fn chi_state(cfg: &LatticeConfig, p: &MomentumPoint) -> Result<StateVec> {
    if p.shape != cfg.shape() {
        return Err(Error::ConfigMismatch("chi_state".into()));
    }
    let mut v = StateVec::zero(position_space(cfg));
    for x in all_positions(cfg) {
        v.set(x.index(), character(p, &x)?);
    }
    Ok(v)
}

/// The position eigenstate `delta_x` as a lattice function: value `m_uv^n`
/// at `x`, zero elsewhere.
pub fn delta_state(cfg: &LatticeConfig, x: &PositionPoint) -> Result<StateVec> {
    if x.shape != cfg.shape() {
        return Err(Error::ConfigMismatch("delta_state".into()));
    }
    let mut v = StateVec::zero(position_space(cfg));
    v.set(x.index(), C64::new(cfg.m_uv_pow(), 0.0));
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(n: usize, m_ir: i64, m_uv: i64) -> LatticeConfig {
        LatticeConfig::new(n, m_ir, m_uv, Ratio::new(1, 1), 2, 1e-9).unwrap()
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(LatticeConfig::new(1, 4, 3, Ratio::new(1, 1), 2, 1e-9).is_err());
        assert!(LatticeConfig::new(1, 3, 0, Ratio::new(1, 1), 2, 1e-9).is_err());
        assert!(LatticeConfig::new(1, 3, 3, Ratio::new(1, 1), 0, 1e-9).is_err());
        // mass 1/2 is not on the 1/3 grid
        assert!(matches!(
            LatticeConfig::new(1, 3, 3, Ratio::new(1, 2), 2, 1e-9),
            Err(Error::MassGrid(_))
        ));
        // mass 4/5 is on the 1/5 grid
        assert!(LatticeConfig::new(1, 5, 1, Ratio::new(4, 5), 2, 1e-9).is_ok());
    }

    #[test]
    fn momentum_enumeration_small_meshes() {
        let c = cfg(1, 3, 1);
        let ps = all_momenta(&c);
        let ks: Vec<i64> = ps.iter().map(|p| p.k()[0]).collect();
        assert_eq!(ks, vec![-1, 0, 1]);
        let vals: Vec<Ratio<i64>> = ps.iter().map(|p| p.value()[0]).collect();
        assert_eq!(
            vals,
            vec![Ratio::new(-1, 3), Ratio::new(0, 1), Ratio::new(1, 3)]
        );

        let c = cfg(1, 1, 3);
        let vals: Vec<Ratio<i64>> = all_momenta(&c).iter().map(|p| p.value()[0]).collect();
        assert_eq!(
            vals,
            vec![Ratio::new(-1, 1), Ratio::new(0, 1), Ratio::new(1, 1)]
        );

        let c = cfg(2, 3, 3);
        assert_eq!(all_momenta(&c).len(), 81);
    }

    #[test]
    fn position_enumeration_small_meshes() {
        let c = cfg(1, 3, 1);
        let vals: Vec<Ratio<i64>> = all_positions(&c).iter().map(|x| x.value()[0]).collect();
        assert_eq!(
            vals,
            vec![Ratio::new(-1, 1), Ratio::new(0, 1), Ratio::new(1, 1)]
        );

        let c = cfg(1, 1, 3);
        let vals: Vec<Ratio<i64>> = all_positions(&c).iter().map(|x| x.value()[0]).collect();
        assert_eq!(
            vals,
            vec![Ratio::new(-1, 3), Ratio::new(0, 1), Ratio::new(1, 3)]
        );

        // mesh 1/3, nine points, range [-4/3, 4/3]
        let c = cfg(1, 3, 3);
        let xs = all_positions(&c);
        assert_eq!(xs.len(), 9);
        assert_eq!(xs[0].value()[0], Ratio::new(-4, 3));
        assert_eq!(xs[8].value()[0], Ratio::new(4, 3));
    }

    #[test]
    fn trivial_characters() {
        let c = cfg(1, 3, 3);
        let p0 = MomentumPoint::zero(c.shape());
        for x in all_positions(&c) {
            assert_eq!(character(&p0, &x).unwrap(), C64::new(1.0, 0.0));
        }
        let x0 = PositionPoint::zero(c.shape());
        for p in all_momenta(&c) {
            assert_eq!(character(&p, &x0).unwrap(), C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn character_root_of_unity() {
        // n=1, M=3, k=1, j=1 -> e^{i 2 pi / 3}
        let c = cfg(1, 3, 1);
        let p = MomentumPoint::new(c.shape(), vec![1]).unwrap();
        let x = PositionPoint::new(c.shape(), vec![1]).unwrap();
        let got = character(&p, &x).unwrap();
        let expected = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!((got - expected).norm() < 1e-15);
    }

    #[test]
    fn character_mismatched_configs_error() {
        let c1 = cfg(1, 3, 1);
        let c2 = cfg(1, 3, 3);
        let p = MomentumPoint::zero(c1.shape());
        let x = PositionPoint::zero(c2.shape());
        assert!(matches!(character(&p, &x), Err(Error::ConfigMismatch(_))));
    }

    #[test]
    fn paper_norms_hold() {
        for (m_ir, m_uv) in [(3, 1), (1, 3), (3, 3), (5, 3)] {
            let c = cfg(1, m_ir, m_uv);
            for p in all_momenta(&c) {
                let chi = chi_state(&c, &p).unwrap();
                let n2 = inner(&chi, &chi).unwrap();
                assert!((n2 - C64::new(c.m_ir_pow(), 0.0)).norm() < 1e-12);
            }
            for x in all_positions(&c) {
                let d = delta_state(&c, &x).unwrap();
                let n2 = inner(&d, &d).unwrap();
                assert!((n2 - C64::new(c.m_uv_pow(), 0.0)).norm() < 1e-12);
                for p in all_momenta(&c) {
                    let chi = chi_state(&c, &p).unwrap();
                    let ov = inner(&d, &chi).unwrap();
                    assert!((ov - character(&p, &x).unwrap()).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn character_orthogonality() {
        let c = cfg(1, 3, 3);
        let ps = all_momenta(&c);
        for p in &ps {
            for q in &ps {
                let ov = inner(&chi_state(&c, p).unwrap(), &chi_state(&c, q).unwrap()).unwrap();
                let expected = if p == q { c.m_ir_pow() } else { 0.0 };
                assert!((ov - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_expansion_over_characters() {
        // delta_x = sum_p (1/m_ir^n) e^{-i 2 pi p.x} chi_p
        let c = cfg(1, 3, 3);
        for x in all_positions(&c) {
            let mut acc = StateVec::zero(position_space(&c));
            for p in all_momenta(&c) {
                let phase = character(&p, &x).unwrap().conj();
                let chi = chi_state(&c, &p).unwrap();
                acc = acc.add(&chi.scale(phase / c.m_ir_pow())).unwrap();
            }
            let d = delta_state(&c, &x).unwrap();
            assert!(acc.max_abs_diff(&d) < 1e-12);
        }
    }

    #[test]
    fn symmetric_fourier_matrix_is_unitary() {
        let c = cfg(1, 3, 3);
        let ps = all_momenta(&c);
        let xs = all_positions(&c);
        let dim = c.points();
        let norm = (dim as f64).sqrt();
        // plain (unweighted) unitarity of F[x,p] = chi_p(x)/sqrt(M^n)
        for a in 0..dim {
            for b in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for x in &xs {
                    let fa = character(&ps[a], x).unwrap() / norm;
                    let fb = character(&ps[b], x).unwrap() / norm;
                    acc += fa.conj() * fb;
                }
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((acc - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    fn arb_point(c: LatticeConfig) -> impl Strategy<Value = MomentumPoint> {
        let shape = c.shape();
        let half = shape.half();
        proptest::collection::vec(-half..=half, shape.n)
            .prop_map(move |k| MomentumPoint::new(shape, k).unwrap())
    }

    proptest! {
        #[test]
        fn group_laws(
            a in arb_point(cfg(2, 3, 3)),
            b in arb_point(cfg(2, 3, 3)),
            c_ in arb_point(cfg(2, 3, 3)),
        ) {
            let ab_c = a.add(&b).unwrap().add(&c_).unwrap();
            let a_bc = a.add(&b.add(&c_).unwrap()).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            let zero = MomentumPoint::zero(a.shape());
            prop_assert_eq!(a.add(&a.neg()).unwrap(), zero);
        }

        #[test]
        fn characters_are_homomorphisms(
            p in arb_point(cfg(1, 3, 3)),
            q in arb_point(cfg(1, 3, 3)),
            jx in -4i64..=4,
        ) {
            let c = cfg(1, 3, 3);
            let x = PositionPoint::new(c.shape(), vec![jx]).unwrap();
            let lhs = character(&p, &x).unwrap() * character(&q, &x).unwrap();
            let rhs = character(&p.add(&q).unwrap(), &x).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-14);
        }
    }
}
