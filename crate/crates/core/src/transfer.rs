//! Koopman and Perron-Frobenius operators of concrete dynamical systems:
//! deterministic maps, noisy maps, kernel-density chains and iterated
//! function systems, plus their Galerkin matrices on multiscale bases.

use crate::basis::{BasisIndex, Family, MultiscaleBasis, QuadratureGrid};
use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::rng::TrialRng;
use crate::spectral::{heat_kernel_operator, SpectralOperator};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub type Map1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type TransitionDensity = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type Sampler = Arc<dyn Fn(f64, &mut TrialRng) -> f64 + Send + Sync>;

/// Axis-aligned box, optionally periodic in every coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub periodic: bool,
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Self {
        Domain { lo: vec![a], hi: vec![b], periodic: false }
    }

    pub fn circle(a: f64, b: f64) -> Self {
        Domain { lo: vec![a], hi: vec![b], periodic: true }
    }

    pub fn unit_square() -> Self {
        Domain { lo: vec![0.0; 2], hi: vec![1.0; 2], periodic: false }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    fn wrap(&self, x: f64) -> f64 {
        let (a, b) = (self.lo[0], self.hi[0]);
        let w = b - a;
        let y = a + (x - a).rem_euclid(w);
        if y >= b {
            a
        } else {
            y
        }
    }
}

/// Affine contraction of the plane, x -> a x + b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine2 {
    pub a: [[f64; 2]; 2],
    pub b: [f64; 2],
}

impl Affine2 {
    pub fn apply(&self, x: &[f64]) -> [f64; 2] {
        [
            self.a[0][0] * x[0] + self.a[0][1] * x[1] + self.b[0],
            self.a[1][0] * x[0] + self.a[1][1] * x[1] + self.b[1],
        ]
    }
}

#[derive(Clone)]
pub enum SystemKind {
    /// x -> w(x).
    Deterministic { map: Map1 },
    /// x -> w(x) + xi with xi uniform on [-half_width, half_width], wrapped
    /// onto the periodic domain.
    NoisyMap { map: Map1, half_width: f64 },
    /// Chain with transition density p(y, x) against Lebesgue measure.
    /// Integrals against the density use the midpoint rule at `quad_level`.
    Kernel {
        density: TransitionDensity,
        sampler: Option<Sampler>,
        spectral: Option<SpectralOperator>,
        quad_level: Option<u32>,
    },
    /// Random composition of affine maps chosen with probabilities `probs`;
    /// `lipschitz` holds the declared contraction factors.
    Ifs { maps: Vec<Affine2>, probs: Vec<f64>, lipschitz: Vec<f64> },
}

#[derive(Clone)]
pub struct DynamicalSystem {
    pub name: String,
    pub kind: SystemKind,
    pub domain: Domain,
}

impl fmt::Debug for DynamicalSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            SystemKind::Deterministic { .. } => "deterministic",
            SystemKind::NoisyMap { .. } => "noisy-map",
            SystemKind::Kernel { .. } => "kernel",
            SystemKind::Ifs { .. } => "ifs",
        };
        write!(f, "DynamicalSystem({}, {kind}, {:?})", self.name, self.domain)
    }
}

impl DynamicalSystem {
    pub fn deterministic(name: &str, map: impl Fn(f64) -> f64 + Send + Sync + 'static, domain: Domain) -> Self {
        DynamicalSystem { name: name.into(), kind: SystemKind::Deterministic { map: Arc::new(map) }, domain }
    }

    pub fn kernel(
        name: &str,
        density: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        domain: Domain,
        quad_level: Option<u32>,
    ) -> Self {
        DynamicalSystem {
            name: name.into(),
            kind: SystemKind::Kernel { density: Arc::new(density), sampler: None, spectral: None, quad_level },
            domain,
        }
    }

    pub fn ifs(name: &str, maps: Vec<Affine2>, probs: Vec<f64>, lipschitz: Vec<f64>) -> Result<Self> {
        if maps.len() != probs.len() || maps.len() != lipschitz.len() || maps.is_empty() {
            return Err(Error::InvalidArgument("IFS maps, probabilities and constants must align".into()));
        }
        if probs.iter().any(|p| *p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("IFS probabilities must be a probability vector".into()));
        }
        Ok(DynamicalSystem { name: name.into(), kind: SystemKind::Ifs { maps, probs, lipschitz }, domain: Domain::unit_square() })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Contraction factor sum_lambda p_lambda L_lambda of an IFS.
    pub fn contraction_factor(&self) -> Option<f64> {
        match &self.kind {
            SystemKind::Ifs { probs, lipschitz, .. } => Some(probs.iter().zip(lipschitz).map(|(p, l)| p * l).sum()),
            _ => None,
        }
    }

    /// Spectral representation, when the system carries one.
    pub fn spectral(&self) -> Option<&SpectralOperator> {
        match &self.kind {
            SystemKind::Kernel { spectral, .. } => spectral.as_ref(),
            _ => None,
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        Ok(())
    }

    /// One step of the chain started at `x`.
    pub fn step(&self, x: &[f64], rng: &mut TrialRng) -> Result<Vec<f64>> {
        self.check_point(x)?;
        match &self.kind {
            SystemKind::Deterministic { map } => Ok(vec![map(x[0])]),
            SystemKind::NoisyMap { map, half_width } => {
                let xi = rng.gen_range(-*half_width..=*half_width);
                Ok(vec![self.domain.wrap(map(x[0]) + xi)])
            }
            SystemKind::Kernel { sampler: Some(s), .. } => Ok(vec![s(x[0], rng)]),
            SystemKind::Kernel { sampler: None, .. } => {
                Err(Error::UnsupportedSystem(format!("{}: kernel without a sampler cannot be stepped", self.name)))
            }
            SystemKind::Ifs { maps, probs, .. } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut pick = maps.len() - 1;
                for (i, p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                Ok(maps[pick].apply(x).to_vec())
            }
        }
    }

    /// Midpoint nodes of the level-`level` grid on a 1-D domain.
    fn nodes_1d(&self, level: u32) -> (Vec<f64>, f64) {
        let (a, b) = (self.domain.lo[0], self.domain.hi[0]);
        let n = 1usize << level;
        let h = (b - a) / n as f64;
        ((0..n).map(|i| a + (i as f64 + 0.5) * h).collect(), h)
    }
}

/// Koopman operator applied to `f` at `x`: f(w(x)) for maps, the
/// transition-density integral for kernel chains, the probability-weighted
/// mixture for an IFS.
pub fn koopman_apply<F: Fn(&[f64]) -> f64>(sys: &DynamicalSystem, f: F, x: &[f64]) -> Result<f64> {
    sys.check_point(x)?;
    match &sys.kind {
        SystemKind::Deterministic { map } => Ok(f(&[map(x[0])])),
        SystemKind::NoisyMap { map, half_width } => {
            let c = map(x[0]);
            let s = *half_width;
            let g = |t: f64| f(&[sys.domain.wrap(c + t)]) / (2.0 * s);
            Ok(crate::quadrature::composite_gauss5(g, -s, s, 64))
        }
        SystemKind::Kernel { density, quad_level, .. } => {
            let level = quad_level
                .ok_or_else(|| Error::InvalidArgument(format!("{}: kernel quadrature level unset", sys.name)))?;
            let (nodes, h) = sys.nodes_1d(level);
            Ok(nodes.iter().map(|&y| density(y, x[0]) * f(&[y])).sum::<f64>() * h)
        }
        SystemKind::Ifs { maps, probs, .. } => Ok(maps.iter().zip(probs).map(|(m, p)| p * f(&m.apply(x))).sum()),
    }
}

/// Galerkin matrix on a basis enumeration.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<f64>,
    pub indices: Vec<BasisIndex>,
    pub basis: MultiscaleBasis,
}

/// Frobenius (Hilbert-Schmidt) norm.
pub fn schatten2_norm(m: &OperatorMatrix) -> f64 {
    m.matrix.norm()
}

/// Affine identification of the basis domain with the system domain.
struct Frame {
    lo: Vec<f64>,
    len: Vec<f64>,
    amp: f64,
}

impl Frame {
    fn new(sys: &DynamicalSystem, basis: &MultiscaleBasis) -> Result<Self> {
        if sys.dim() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: sys.dim(), found: basis.dim() });
        }
        let len: Vec<f64> = sys.domain.lo.iter().zip(&sys.domain.hi).map(|(a, b)| b - a).collect();
        let amp = len.iter().product::<f64>().powf(-0.5);
        Ok(Frame { lo: sys.domain.lo.clone(), len, amp })
    }

    fn to_system(&self, u: &[f64]) -> Vec<f64> {
        u.iter().enumerate().map(|(i, v)| self.lo[i] + self.len[i] * v).collect()
    }

    fn to_basis(&self, x: &[f64]) -> Vec<f64> {
        x.iter().enumerate().map(|(i, v)| ((v - self.lo[i]) / self.len[i]).clamp(0.0, 1.0)).collect()
    }

    /// L2-normalized basis function transported to the system domain.
    fn eval(&self, basis: &MultiscaleBasis, idx: &BasisIndex, x: &[f64]) -> f64 {
        let u = self.to_basis(x);
        if !basis.family.contains(&u) {
            return 0.0;
        }
        self.amp * basis.eval_unchecked(idx, &u)
    }
}

/// Direction of a Galerkin assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Picture {
    Koopman,
    PerronFrobenius,
}

/// Galerkin matrix of the Koopman operator on the level-`level` space:
/// entry (a, b) is (U psi_b, psi_a), so coefficients transform as c -> M c.
/// The basis is transported affinely onto the system domain and integrals
/// use the one-point rule at `quad_level`.
pub fn koopman_matrix(
    sys: &DynamicalSystem,
    basis: &MultiscaleBasis,
    level: u32,
    quad_level: u32,
) -> Result<OperatorMatrix> {
    galerkin(sys, basis, level, quad_level, Picture::Koopman)
}

/// Galerkin matrix of the Perron-Frobenius operator on densities. Kernel
/// systems integrate the density pushforward directly; for the other kinds
/// the matrix is the transpose of the Koopman matrix.
pub fn perron_frobenius_matrix(
    sys: &DynamicalSystem,
    basis: &MultiscaleBasis,
    level: u32,
    quad_level: u32,
) -> Result<OperatorMatrix> {
    match sys.kind {
        SystemKind::Kernel { .. } => galerkin(sys, basis, level, quad_level, Picture::PerronFrobenius),
        _ => {
            let mut m = koopman_matrix(sys, basis, level, quad_level)?;
            m.matrix = m.matrix.transpose();
            Ok(m)
        }
    }
}

fn galerkin(
    sys: &DynamicalSystem,
    basis: &MultiscaleBasis,
    level: u32,
    quad_level: u32,
    picture: Picture,
) -> Result<OperatorMatrix> {
    if quad_level < level {
        return Err(Error::QuadratureTooCoarse { quad: quad_level, level, needed: level });
    }
    let frame = Frame::new(sys, basis)?;
    let indices = basis.multiscale_indices(level)?;
    let grid = QuadratureGrid::new(basis.family, quad_level);
    let nodes: Vec<Vec<f64>> = grid.points().map(|u| frame.to_system(u)).collect();
    let w = grid.weight / frame.amp.powi(2);
    let n = indices.len();
    let psi = DMatrix::from_fn(nodes.len(), n, |q, b| frame.eval(basis, &indices[b], &nodes[q]));
    let matrix = match &sys.kind {
        SystemKind::Kernel { density, .. } => {
            if basis.family != Family::Haar1d {
                return Err(Error::FamilyMismatch { expected: Family::Haar1d.label(), found: basis.family.label() });
            }
            // kern[(q, r)] = p(y_r, x_q): row = start point, column = end point.
            let kern = DMatrix::from_fn(nodes.len(), nodes.len(), |q, r| density(nodes[r][0], nodes[q][0]));
            match picture {
                Picture::Koopman => psi.transpose() * (&kern * &psi) * (w * w),
                Picture::PerronFrobenius => {
                    // (P psi_b)(y) = sum_x w p(y, x) psi_b(x), paired with psi_a(y).
                    let pushed = kern.transpose() * &psi * w;
                    psi.transpose() * pushed * w
                }
            }
        }
        _ => {
            let mut composed = DMatrix::zeros(nodes.len(), n);
            for (q, x) in nodes.iter().enumerate() {
                let images: Vec<(Vec<f64>, f64)> = match &sys.kind {
                    SystemKind::Deterministic { map } => vec![(vec![map(x[0])], 1.0)],
                    SystemKind::Ifs { maps, probs, .. } => {
                        maps.iter().zip(probs).map(|(m, p)| (m.apply(x).to_vec(), *p)).collect()
                    }
                    SystemKind::NoisyMap { .. } => {
                        return Err(Error::UnsupportedSystem(
                            "noisy maps have no Galerkin assembly; use the kernel form".into(),
                        ))
                    }
                    SystemKind::Kernel { .. } => unreachable!(),
                };
                for b in 0..n {
                    composed[(q, b)] = images.iter().map(|(y, p)| p * frame.eval(basis, &indices[b], y)).sum();
                }
            }
            psi.transpose() * composed * w
        }
    };
    Ok(OperatorMatrix { matrix, indices, basis: *basis })
}

/// Pushes point masses forward: each atom of `nu` is sent through every map
/// with its weight scaled by the map probability.
pub fn pf_pushforward_measure(sys: &DynamicalSystem, nu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    if nu.density.is_some() {
        return Err(Error::InvalidArgument("pushforward expects a finite point-mass measure".into()));
    }
    if nu.dim != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), found: nu.dim });
    }
    match &sys.kind {
        SystemKind::Deterministic { map } => {
            let pts = nu.points().iter().map(|x| map(*x)).collect();
            DiscreteMeasure::atoms(1, pts, nu.weights().to_vec())
        }
        SystemKind::Ifs { maps, probs, .. } => {
            let mut pts = Vec::with_capacity(nu.len() * maps.len() * 2);
            let mut ws = Vec::with_capacity(nu.len() * maps.len());
            for (m, p) in maps.iter().zip(probs) {
                for (x, w) in nu.iter() {
                    pts.extend(m.apply(x));
                    ws.push(w * p);
                }
            }
            DiscreteMeasure::atoms(2, pts, ws)
        }
        _ => Err(Error::UnsupportedSystem(format!("{}: pushforward of atoms needs a map or an IFS", sys.name))),
    }
}

/// Sierpinski gasket IFS: three half-scale copies with equal probability.
pub fn sierpinski() -> DynamicalSystem {
    let half = [[0.5, 0.0], [0.0, 0.5]];
    let maps = vec![
        Affine2 { a: half, b: [0.0, 0.0] },
        Affine2 { a: half, b: [0.5, 0.0] },
        Affine2 { a: half, b: [0.0, 0.5] },
    ];
    DynamicalSystem::ifs("sierpinski", maps, vec![1.0 / 3.0; 3], vec![0.5; 3]).expect("valid preset")
}

/// Frequency cutoff beyond which exp(-h k^2) is below 1e-17.
fn heat_cutoff(h: f64) -> usize {
    ((17.0 * 10f64.ln() / h).sqrt().ceil() as usize).max(1)
}

/// Heat step of size `h` on the circle [0, 2pi). The chain moves by a
/// centred normal increment of variance 2h, so its transition density is the
/// wrapped Gaussian including the constant mode; the attached spectral
/// operator keeps only the non-constant Fourier modes.
pub fn heat_system(h: f64) -> Result<DynamicalSystem> {
    let k_max = heat_cutoff(h);
    let spectral = heat_kernel_operator(h, k_max)?;
    let p: Vec<f64> = (1..=k_max).map(|k| (-h * (k * k) as f64).exp()).collect();
    let density = move |y: f64, x: f64| {
        let d = y - x;
        1.0 / (2.0 * PI) + p.iter().enumerate().map(|(i, pk)| pk * ((i + 1) as f64 * d).cos()).sum::<f64>() / PI
    };
    let normal = Normal::new(0.0, (2.0 * h).sqrt()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let domain = Domain::circle(0.0, 2.0 * PI);
    let wrap = domain.clone();
    let sampler = move |x: f64, rng: &mut TrialRng| wrap.wrap(x + normal.sample(rng));
    Ok(DynamicalSystem {
        name: format!("heat({h})"),
        kind: SystemKind::Kernel {
            density: Arc::new(density),
            sampler: Some(Arc::new(sampler)),
            spectral: Some(spectral),
            quad_level: Some(12),
        },
        domain,
    })
}

fn parse_args(name: &str, prefix: &str) -> Option<Vec<f64>> {
    let rest = name.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
    rest.split(',').map(|s| s.trim().parse::<f64>().ok()).collect()
}

/// Named presets:
/// - `x_alpha(a)`: x -> x^a on [0, 1]
/// - `identity`: x -> x on [0, 1]
/// - `sierpinski`: the three-map gasket IFS
/// - `heat(h)`: heat step on the circle
/// - `noisy_x_alpha(a, s)`: x -> x^a + xi on the circle [0, 1), xi uniform on [-s, s]
pub fn system_registry(name: &str) -> Result<DynamicalSystem> {
    let name = name.trim();
    let unknown = || Error::UnknownSystem(name.to_string());
    if name == "sierpinski" {
        return Ok(sierpinski());
    }
    if name == "identity" {
        return Ok(DynamicalSystem::deterministic("identity", |x| x, Domain::interval(0.0, 1.0)));
    }
    if let Some(args) = parse_args(name, "x_alpha") {
        let [a] = args[..] else { return Err(unknown()) };
        if !(a > 0.0) {
            return Err(Error::InvalidArgument(format!("x_alpha needs a positive exponent, got {a}")));
        }
        return Ok(DynamicalSystem::deterministic(name, move |x| x.powf(a), Domain::interval(0.0, 1.0)));
    }
    if let Some(args) = parse_args(name, "heat") {
        let [h] = args[..] else { return Err(unknown()) };
        return heat_system(h);
    }
    if let Some(args) = parse_args(name, "noisy_x_alpha") {
        let [a, s] = args[..] else { return Err(unknown()) };
        if !(a > 0.0) || !(s > 0.0 && s < 0.5) {
            return Err(Error::InvalidArgument(format!("noisy_x_alpha needs a > 0 and 0 < s < 1/2, got {a}, {s}")));
        }
        return Ok(DynamicalSystem {
            name: name.into(),
            kind: SystemKind::NoisyMap { map: Arc::new(move |x: f64| x.powf(a)), half_width: s },
            domain: Domain::circle(0.0, 1.0),
        });
    }
    Err(unknown())
}
