//! Lazily built shared state: each expensive object is made at most once
//! per run and only when a requested check needs it.

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::genrep::{decompose_algebra, CellAlgebra, Decomposition, GenericRep};
use crate::groups::{load_or_enumerate, FiniteGroup, GroupSpec, DEFAULT_BUDGET};
use crate::mat::Mat;
use crate::zeta::{random_word, GammaConfig, GammaRow, GlModel, Twist};

use super::SuiteConfig;

/// Groups up to this order are enumerated; larger ones are only sampled.
pub const ENUM_LIMIT: u128 = 200_000;

fn init<T>(cell: &OnceCell<Result<T>>, f: impl FnOnce() -> Result<T>) -> Result<&T> {
    cell.get_or_init(f).as_ref().map_err(Clone::clone)
}

pub struct Context<'a> {
    pub cfg: &'a SuiteConfig,
    so: OnceCell<Result<CellAlgebra>>,
    dec: OnceCell<Result<Decomposition>>,
    groups: RefCell<HashMap<(u8, usize), Arc<FiniteGroup>>>,
    gl: Vec<OnceCell<Result<Arc<GlModel>>>>,
    twists: Vec<OnceCell<Result<Twist>>>,
    gammas: Vec<OnceCell<Result<Vec<GammaRow>>>>,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a SuiteConfig) -> Self {
        let l = cfg.l;
        Context {
            cfg,
            so: OnceCell::new(),
            dec: OnceCell::new(),
            groups: RefCell::new(HashMap::new()),
            gl: (0..l).map(|_| OnceCell::new()).collect(),
            twists: (0..l).map(|_| OnceCell::new()).collect(),
            gammas: (0..l).map(|_| OnceCell::new()).collect(),
        }
    }

    pub fn l(&self) -> usize {
        self.cfg.l
    }

    pub fn q(&self) -> u32 {
        self.cfg.q
    }

    /// A generator seeded from the run seed and a tag, so checks do not
    /// perturb each other's randomness.
    pub fn rng(&self, tag: &str) -> ChaCha8Rng {
        // FNV-1a: stable across platforms and releases
        let h = tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ h)
    }

    /// Hecke data of SO(2l) for psi.
    pub fn so(&self) -> Result<&CellAlgebra> {
        init(&self.so, || CellAlgebra::build(GroupSpec::so_even(self.l(), self.q()), false))
    }

    pub fn decomposition(&self) -> Result<&Decomposition> {
        init(&self.dec, || decompose_algebra(self.so()?, self.cfg.seed, &self.cfg.tol))
    }

    pub fn reps(&self) -> Result<&[GenericRep]> {
        Ok(&self.decomposition()?.reps)
    }

    /// Indices of the cuspidal generic pi (all of them when non-cuspidal
    /// pi are allowed in gamma computations).
    pub fn gamma_pis(&self) -> Result<Vec<usize>> {
        let reps = self.reps()?;
        Ok((0..reps.len()).filter(|&p| self.cfg.allow_noncuspidal || reps[p].cuspidal).collect())
    }

    pub fn cuspidal(&self) -> Result<Vec<usize>> {
        let reps = self.reps()?;
        Ok((0..reps.len()).filter(|&p| reps[p].cuspidal).collect())
    }

    /// The enumerated group, through the disk cache when one is configured.
    pub fn group(&self, spec: GroupSpec) -> Result<Arc<FiniteGroup>> {
        if spec.expected_order() > ENUM_LIMIT {
            return Err(Error::Budget(format!("{spec:?} is not enumerated")));
        }
        let key = (spec.kind.code(), spec.rank);
        if let Some(g) = self.groups.borrow().get(&key) {
            return Ok(g.clone());
        }
        let (g, warning) = load_or_enumerate(spec, self.cfg.cache_dir.as_deref(), DEFAULT_BUDGET)?;
        if let Some(w) = warning {
            eprintln!("warning: {w}");
        }
        let g = Arc::new(g);
        self.groups.borrow_mut().insert(key, g.clone());
        Ok(g)
    }

    /// All elements when the group is small enough, otherwise `samples`
    /// random words in the generators.
    pub fn elements_or_sample(&self, spec: GroupSpec, samples: usize, tag: &str) -> Result<(Vec<Mat>, bool)> {
        match self.group(spec) {
            Ok(g) => Ok((g.elements().to_vec(), true)),
            Err(Error::Budget(_)) => {
                let gens = spec.generators();
                let mut rng = self.rng(tag);
                Ok(((0..samples).map(|_| random_word(&gens, &mut rng, 30)).collect(), false))
            }
            Err(e) => Err(e),
        }
    }

    pub fn gl(&self, n: usize) -> Result<&Arc<GlModel>> {
        init(&self.gl[n - 1], || {
            Ok(Arc::new(GlModel::build(n, self.q(), self.cfg.seed ^ n as u64, &self.cfg.tol)?))
        })
    }

    pub fn twist(&self, n: usize) -> Result<&Twist> {
        init(&self.twists[n - 1], || Twist::build(self.so()?, self.gl(n)?.clone()))
    }

    pub fn gamma_config(&self) -> GammaConfig {
        GammaConfig {
            seed: self.cfg.seed,
            tol: self.cfg.tol,
            allow_noncuspidal: self.cfg.allow_noncuspidal,
            ..GammaConfig::default()
        }
    }

    /// Gamma factors of the gamma-eligible pi against GL(n).
    pub fn gammas(&self, n: usize) -> Result<&[GammaRow]> {
        init(&self.gammas[n - 1], || {
            let pis = self.gamma_pis()?;
            self.twist(n)?.gamma_table(self.so()?, self.reps()?, &pis, &self.gamma_config())
        })
        .map(Vec::as_slice)
    }
}
