//! Everything a case needs, resolved once from the config.

use rand::SeedableRng;

use super::config::{Config, PsiConfig, Tolerances};
use super::points::{exterior_points, frames, halton_in, interior_points};
use crate::error::{Error, Result};
use crate::qq::{QQPair, QQVector};
use crate::quad::{calibrate_sigma, Box4, QuadSpec, SigmaForm};
use crate::quat::{Coords, Quaternion, StructuralSet};

/// Seed of the second structural set used by the classical checks.
pub const RANDOM_PSI_SEED: u64 = 7;

#[derive(Debug, Clone)]
pub struct Context {
    pub config: Config,
    pub psi: StructuralSet,
    pub sigma: SigmaForm,
    /// Second frame for the frame-independence checks, with its own σ.
    pub psi_random: StructuralSet,
    pub sigma_random: SigmaForm,
    pub qq: QQVector,
    /// Parameters for the right-operator family: `qq` rotated by one axis.
    pub qq_g: QQVector,
    pub domain: Box4,
    pub spec: QuadSpec,
    pub tol: Tolerances,
    pub interior: Vec<Coords>,
    pub exterior: Vec<Coords>,
    /// Base point `w` of the slice transforms.
    pub base_w: Coords,
    pub zero_threshold: f64,
}

pub fn resolve_psi(p: &PsiConfig) -> Result<StructuralSet> {
    match p {
        PsiConfig::Named(n) if n == "std" => Ok(StructuralSet::standard()),
        PsiConfig::Named(n) => Err(Error::Config(format!("unknown psi `{n}`; use \"std\" or 16 reals"))),
        PsiConfig::Rows(v) => StructuralSet::from_rows(v).map_err(|e| Error::Config(e.to_string())),
    }
}

pub fn resolve_spec(config: &Config, domain: &Box4) -> Result<QuadSpec> {
    let d = QuadSpec::default_for(domain);
    let q = &config.quad;
    QuadSpec::new(q.order.unwrap_or(d.order), q.subdiv.unwrap_or(d.subdiv), q.epsilon.unwrap_or(d.epsilon), q.grading.unwrap_or(d.grading))
        .map_err(|e| Error::Config(e.to_string()))
}

impl Context {
    pub fn new(config: &Config) -> Result<Context> {
        let psi = resolve_psi(&config.psi)?;
        let qq = QQVector::from_slice(&config.qq).map_err(|e| Error::Config(e.to_string()))?;
        let qq_g = QQVector::new(std::array::from_fn(|k| qq.pairs[(k + 1) % 4]));
        let domain = Box4::new(config.domain.lo, config.domain.hi).map_err(|e| Error::Config(e.to_string()))?;
        let spec = resolve_spec(config, &domain)?;
        let sigma = calibrate_sigma(&psi, &domain, &spec)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(RANDOM_PSI_SEED);
        let psi_random = StructuralSet::random(&mut rng);
        let sigma_random = calibrate_sigma(&psi_random, &domain, &spec)?;
        let interior = interior_points(&domain);
        let exterior = exterior_points(&domain);
        let base_w = halton_in(&domain, 0.25, 6, 1)[0];
        for x in &interior {
            let d = domain.inner_distance(x);
            if d < 4.0 * spec.epsilon {
                return Err(Error::Config(format!(
                    "epsilon {} too large: interior point at distance {d} from the boundary needs at least 4 epsilon",
                    spec.epsilon
                )));
            }
        }
        Ok(Context {
            config: config.clone(),
            psi,
            sigma,
            psi_random,
            sigma_random,
            qq,
            qq_g,
            domain,
            spec,
            tol: config.tolerances,
            interior,
            exterior,
            base_w,
            zero_threshold: 1e-8 * domain.diameter(),
        })
    }

    /// The same context with another quadrature spec.
    pub fn with_spec(&self, spec: QuadSpec) -> Context {
        Context { spec, ..self.clone() }
    }

    /// Sixteen `(w, x)` frames over the whole box.
    pub fn frames(&self) -> Vec<(Coords, Coords)> {
        frames(&self.domain, 16)
    }

    /// Points where sampled hypotheses are certified: the box, its
    /// surroundings and the evaluation points.
    pub fn certificate_points(&self) -> Vec<Coords> {
        let mut out = halton_in(&self.domain, 0.0, 40, 64);
        out.extend(self.interior.iter().copied());
        out.extend(self.exterior.iter().copied());
        out
    }

    /// Pair used by the left whole-field instances.
    pub fn pair_f(&self) -> QQPair {
        self.qq.pairs[0]
    }

    /// Pair used by the right whole-field instances.
    pub fn pair_g(&self) -> QQPair {
        self.qq.pairs[1]
    }

    /// A second frame with `psi_0 = 1`: the standard imaginary units
    /// rotated by a fixed unit quaternion.
    pub fn rotated_unit_frame(&self) -> StructuralSet {
        let r = Quaternion::new(0.8, 0.2, -0.4, 0.4);
        let r = r / r.norm();
        let rot = |e: Quaternion| r * e * r.conj();
        StructuralSet::new([Quaternion::ONE, rot(Quaternion::E1), rot(Quaternion::E2), rot(Quaternion::E3)])
            .expect("rotation keeps the frame orthonormal")
    }
}

pub fn label_point(prefix: &str, i: usize) -> String {
    format!("{prefix}{i}")
}
