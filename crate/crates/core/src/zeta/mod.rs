//! Sections of I(tau, psi^{-1}), the intertwining operator, the zeta
//! integrals of SO(2l) against GL(n) for n <= l, and gamma factors.
//!
//! A section is stored by its values xi(rep_i) on a few Siegel cosets of
//! SO(2n+1); each value is a vector of tau, realized as a function on GL(n)
//! in the psi^{-1}-Whittaker model. Evaluation goes through the coset
//! locator, so SO(2n+1) is never enumerated for n = l. The points at which
//! the integrals evaluate sections are located once per (l, n) and cached
//! in a [`Twist`], which makes the many (pi, tau, probe) integrals cheap
//! table lookups.

mod cells;
mod multone;
#[cfg(test)]
mod tests;

pub use cells::{
    cell_sums, lemma_five_two, lemma_five_two_on, membership_table, torus_split, CellMeasure, CellSumSpec, LemmaFiveTwo, Membership,
};
pub use multone::{bessel_unipotent, hom_dimension, hom_dimension_literal, HomDimension, MultOneData};

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::genrep::{decompose_algebra, BesselFn, CellAlgebra, Decomposition, GenericRep};
use crate::groups::{
    d_n, embed_even_in_odd, embed_odd_in_even, in_siegel_radical, odd_unipotent, r_elements,
    w_ll, w_ln, w_odd, FiniteGroup, GroupKind, GroupSpec, SiegelCosets, UnipotentCosets,
    DEFAULT_BUDGET,
};
use crate::mat::Mat;
use crate::numeric::{sum, Tolerances, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Generic irreducible representations of GL(n) with their Bessel
/// functions tabulated on the whole group. A vector of tau is a function on
/// GL(n) in the span of the right translates of B_tau.
#[derive(Debug)]
pub struct GlModel {
    pub n: usize,
    pub group: Arc<FiniteGroup>,
    pub alg: CellAlgebra,
    pub dec: Decomposition,
    pub tables: Vec<Vec<C64>>,
}

impl GlModel {
    pub fn build(n: usize, q: u32, seed: u64, tol: &Tolerances) -> Result<Self> {
        let spec = GroupSpec::gl(n, q);
        let group = Arc::new(FiniteGroup::enumerate(spec, DEFAULT_BUDGET)?);
        let alg = CellAlgebra::build(spec, true)?;
        let dec = decompose_algebra(&alg, seed, tol)?;
        let tables = dec.reps.iter().map(|r| r.bessel.table(&alg, &group)).collect();
        Ok(GlModel { n, group, alg, dec, tables })
    }

    pub fn len(&self) -> usize {
        self.dec.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dec.reps.is_empty()
    }

    pub fn reps(&self) -> &[GenericRep] {
        &self.dec.reps
    }

    pub fn bessel(&self, tau: usize) -> &[C64] {
        &self.tables[tau]
    }

    /// (tau(h) v)(x) = v(x h).
    pub fn translate(&self, v: &[C64], h: &Mat) -> Vec<C64> {
        self.group
            .elements()
            .iter()
            .map(|x| v[self.group.idx(&x.mul(h))])
            .collect()
    }

    pub fn value(&self, v: &[C64], a: &Mat) -> C64 {
        v[self.group.idx(a)]
    }

    /// A random combination of right translates of B_tau.
    pub fn random_vector<R: Rng>(&self, tau: usize, rng: &mut R, terms: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.group.order()];
        for _ in 0..terms {
            let h = *self.group.element(rng.random_range(0..self.group.order()));
            let c = random_coeff(rng);
            for (acc, x) in v.iter_mut().zip(self.translate(self.bessel(tau), &h)) {
                *acc += c * x;
            }
        }
        v
    }
}

/// An element f of I(tau, psi^{-1}) (or of I(tau*, psi^{-1}) when `star`).
#[derive(Debug, Clone)]
pub struct Section {
    pub l: usize,
    pub n: usize,
    pub tau: usize,
    pub star: bool,
    pub data: SectionData,
}

#[derive(Debug, Clone)]
pub enum SectionData {
    /// xi(rep_i) for the stored coset indices; zero on every other coset.
    Stored(BTreeMap<usize, Vec<C64>>),
    /// M(tau, psi^{-1}) applied to the inner section, evaluated on demand.
    Intertwined(Box<Section>),
}

/// One row of a gamma table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaRow {
    pub pi: usize,
    pub n: usize,
    pub tau: usize,
    pub gamma_re: f64,
    pub gamma_im: f64,
    /// |Psi(B_pi, f_v)|.
    pub psi_abs: f64,
    /// Largest relative deviation of a probe ratio from the gamma value.
    pub spread: f64,
    /// Probes with a nonvanishing denominator.
    pub probes: usize,
}

impl GammaRow {
    pub fn gamma(&self) -> C64 {
        C64::new(self.gamma_re, self.gamma_im)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GammaTable {
    pub rows: Vec<GammaRow>,
}

impl GammaTable {
    pub fn get(&self, pi: usize, n: usize, tau: usize) -> Option<&GammaRow> {
        self.rows.iter().find(|r| r.pi == pi && r.n == n && r.tau == tau)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["pi", "n", "tau", "re_gamma", "im_gamma", "abs_psi", "spread"])
            .map_err(|e| Error::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record([
                r.pi.to_string(),
                r.n.to_string(),
                r.tau.to_string(),
                format!("{:.12e}", r.gamma_re),
                format!("{:.12e}", r.gamma_im),
                format!("{:.12e}", r.psi_abs),
                format!("{:.3e}", r.spread),
            ])
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Located evaluation points of one zeta integral.
#[derive(Debug, Clone)]
struct Geometry {
    /// W is summed over these arguments for point k.
    w_args: Vec<Vec<Mat>>,
    /// The section is evaluated at (base[k], I).
    base: Vec<Mat>,
    /// (coset, GL index of a) with base[k] = l_n(a) v rep_coset.
    direct: Vec<(u32, u32)>,
    /// For u in V_n, the same data for w_n u base[k] with a replaced by
    /// d_n a, laid out as k * |V_n| + u.
    inter: Vec<(u32, u32)>,
}

/// Everything needed to integrate SO(2l) Whittaker functions against
/// sections induced from GL(n).
#[derive(Debug)]
pub struct Twist {
    l: usize,
    n: usize,
    q: u32,
    gl: Arc<GlModel>,
    cosets: SiegelCosets,
    v_n: Vec<Mat>,
    w_n: Mat,
    d_n: Mat,
    id_coset: usize,
    geometry: Geometry,
}

impl Twist {
    /// `so` is the Hecke data of SO(2l) for psi; `gl` the models of GL(n).
    pub fn build(so: &CellAlgebra, gl: Arc<GlModel>) -> Result<Self> {
        let spec = so.spec();
        if spec.kind != GroupKind::SoEven || so.is_dual() {
            return Err(Error::Domain("twists need the psi-data of SO(2l)".into()));
        }
        let (l, n, q) = (spec.rank, gl.n, spec.q);
        if n == 0 || n > l || gl.group.spec().q != q {
            return Err(Error::Domain(format!("no GL({n}) twist for SO({})", 2 * l)));
        }
        let points = if n == l {
            so.coset_reps()
        } else {
            let odd = FiniteGroup::enumerate(GroupSpec::so_odd(n, q), DEFAULT_BUDGET)?;
            let cosets = UnipotentCosets::build(&odd);
            cosets.reps.iter().map(|&r| *odd.element(r as usize)).collect()
        };
        let cosets = SiegelCosets::build(n, q)?;
        let v_n = odd_unipotent(n, q).into_iter().filter(in_siegel_radical).collect();
        let id_coset = cosets.locate(&Mat::identity(2 * n + 1, q)).0;
        let mut t = Twist {
            l,
            n,
            q,
            gl,
            cosets,
            v_n,
            w_n: w_odd(n, q),
            d_n: d_n(n, q),
            id_coset,
            geometry: Geometry { w_args: vec![], base: vec![], direct: vec![], inter: vec![] },
        };
        t.geometry = t.locate_points(&points);
        Ok(t)
    }

    /// The same integrals over left-translated coset representatives u x
    /// with random u in U.
    pub fn rerandomized(&self, so: &CellAlgebra, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let us: Vec<Mat> = if self.n == self.l {
            so.unipotent().to_vec()
        } else {
            odd_unipotent(self.n, self.q)
        };
        let points: Vec<Mat> = self
            .points()
            .iter()
            .map(|x| us[rng.random_range(0..us.len())].mul(x))
            .collect();
        Twist {
            l: self.l,
            n: self.n,
            q: self.q,
            gl: self.gl.clone(),
            cosets: self.cosets.clone(),
            v_n: self.v_n.clone(),
            w_n: self.w_n,
            d_n: self.d_n,
            id_coset: self.id_coset,
            geometry: self.locate_points(&points),
        }
    }

    /// Coset representatives the integral runs over: U\SO(2l) for n = l,
    /// U\SO(2n+1) otherwise.
    pub fn points(&self) -> Vec<Mat> {
        if self.n == self.l {
            self.geometry.w_args.iter().map(|a| a[0]).collect()
        } else {
            self.geometry.base.clone()
        }
    }

    fn locate_points(&self, points: &[Mat]) -> Geometry {
        let (l, n, q) = (self.l, self.n, self.q);
        let (w_args, base): (Vec<Vec<Mat>>, Vec<Mat>) = if n == l {
            let wll = w_ll(l, q);
            points.iter().map(|x| (vec![*x], wll.mul(&embed_even_in_odd(x)))).unzip()
        } else {
            let w = w_ln(l, n, q);
            let w_inv = w.inverse().expect("permutation");
            let rs = r_elements(l, n, q);
            points
                .iter()
                .map(|g| {
                    let core = w.mul(&embed_odd_in_even(g, l)).mul(&w_inv);
                    (rs.iter().map(|r| r.mul(&core)).collect(), *g)
                })
                .unzip()
        };
        let gl = &self.gl.group;
        #[allow(clippy::type_complexity)]
        let located: Vec<((u32, u32), Vec<(u32, u32)>)> = base
            .par_iter()
            .map(|h| {
                let (i, a) = self.cosets.locate(h);
                ((i as u32, gl.idx(&a) as u32), self.locate_intertwined(h))
            })
            .collect();
        let (direct, inter): (Vec<_>, Vec<_>) = located.into_iter().unzip();
        Geometry { w_args, base, direct, inter: inter.concat() }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gl(&self) -> &GlModel {
        &self.gl
    }

    pub fn cosets(&self) -> &SiegelCosets {
        &self.cosets
    }

    pub fn v_n(&self) -> &[Mat] {
        &self.v_n
    }

    pub fn w_n(&self) -> &Mat {
        &self.w_n
    }

    pub fn d_n(&self) -> &Mat {
        &self.d_n
    }

    pub fn identity_coset(&self) -> usize {
        self.id_coset
    }

    pub fn point_count(&self) -> usize {
        self.geometry.base.len()
    }

    /// The vector v used for f_v: B_tau for n < l, and tau(w_{l,l}^{-1}) B_tau
    /// for n = l (v(x) = B_tau(2x)), so that Psi(B_pi, f_v) = 1 in both cases.
    pub fn default_vector(&self, tau: usize) -> Vec<C64> {
        let b = self.gl.bessel(tau);
        if self.n < self.l {
            b.to_vec()
        } else {
            let two = Mat::identity(self.n, self.q).scale(2);
            self.gl.translate(b, &two)
        }
    }

    /// f_v: supported on Q_n with xi(l_n(a) u) = tau(a) v.
    pub fn section_fv(&self, tau: usize, v: Vec<C64>) -> Section {
        Section {
            l: self.l,
            n: self.n,
            tau,
            star: false,
            data: SectionData::Stored(BTreeMap::from([(self.id_coset, v)])),
        }
    }

    /// A section supported on `cosets` random cosets, with random vectors.
    pub fn random_section<R: Rng>(&self, tau: usize, rng: &mut R, cosets: usize) -> Section {
        let mut xi = BTreeMap::new();
        while xi.len() < cosets.min(self.cosets.len()) {
            let i = rng.random_range(0..self.cosets.len());
            xi.insert(i, self.gl.random_vector(tau, rng, 2));
        }
        Section { l: self.l, n: self.n, tau, star: false, data: SectionData::Stored(xi) }
    }

    /// M(tau, psi^{-1}) f.
    pub fn intertwine(&self, f: Section) -> Section {
        Section {
            l: f.l,
            n: f.n,
            tau: f.tau,
            star: !f.star,
            data: SectionData::Intertwined(Box::new(f)),
        }
    }

    /// f(g, a) for g in SO(2n+1) and a in GL(n).
    pub fn eval(&self, f: &Section, g: &Mat, a: &Mat) -> C64 {
        match &f.data {
            SectionData::Stored(xi) => {
                let (i, b) = self.cosets.locate(g);
                xi.get(&i).map_or(ZERO, |v| self.gl.value(v, &a.mul(&b)))
            }
            SectionData::Intertwined(inner) => {
                let a2 = self.d_n.mul(&a.star().expect("invertible"));
                sum(self.v_n.iter().map(|u| self.eval(inner, &self.w_n.mul(u).mul(g), &a2)))
            }
        }
    }

    /// (coset, GL index of d_n a) for w_n u h, one entry per u in V_n.
    pub(crate) fn locate_intertwined(&self, h: &Mat) -> Vec<(u32, u32)> {
        let gl = &self.gl.group;
        self.v_n
            .iter()
            .map(|u| {
                let (j, b) = self.cosets.locate(&self.w_n.mul(u).mul(h));
                (j as u32, gl.idx(&self.d_n.mul(&b)) as u32)
            })
            .collect()
    }

    /// f(h, I) for several sections, sharing the coset location work.
    pub fn values_at(&self, fs: &[Section], h: &Mat) -> Vec<C64> {
        let mut direct = None;
        let mut inter = None;
        fs.iter()
            .map(|f| match &f.data {
                SectionData::Stored(xi) => {
                    let (i, a) = *direct.get_or_insert_with(|| {
                        let (i, a) = self.cosets.locate(h);
                        (i, self.gl.group.idx(&a))
                    });
                    xi.get(&i).map_or(ZERO, |v| v[a])
                }
                SectionData::Intertwined(inner) => match &inner.data {
                    SectionData::Stored(xi) => {
                        let hits = inter.get_or_insert_with(|| self.locate_intertwined(h));
                        sum(hits
                            .iter()
                            .map(|&(i, b)| xi.get(&(i as usize)).map_or(ZERO, |v| v[b as usize])))
                    }
                    SectionData::Intertwined(_) => self.eval(f, h, &Mat::identity(self.n, self.q)),
                },
            })
            .collect()
    }

    /// f(base[k], I) for every integration point, from the cached locations.
    pub fn section_values(&self, f: &Section) -> Vec<C64> {
        let geo = &self.geometry;
        let lookup = |xi: &BTreeMap<usize, Vec<C64>>, (i, b): (u32, u32)| {
            xi.get(&(i as usize)).map_or(ZERO, |v| v[b as usize])
        };
        match &f.data {
            SectionData::Stored(xi) => geo.direct.iter().map(|&p| lookup(xi, p)).collect(),
            SectionData::Intertwined(inner) => match &inner.data {
                SectionData::Stored(xi) => {
                    let m = self.v_n.len();
                    (0..geo.base.len())
                        .into_par_iter()
                        .map(|k| sum(geo.inter[k * m..(k + 1) * m].iter().map(|&p| lookup(xi, p))))
                        .collect()
                }
                SectionData::Intertwined(_) => {
                    let id = Mat::identity(self.n, self.q);
                    geo.base.par_iter().map(|h| self.eval(f, h, &id)).collect()
                }
            },
        }
    }

    /// Inner W-sums of the integral for the functions g -> B(g y), one row
    /// per Bessel function. `y = None` means B itself.
    pub fn w_sums(&self, so: &CellAlgebra, bs: &[&BesselFn], y: Option<&Mat>) -> Vec<Vec<C64>> {
        let located: Vec<Vec<(usize, u32)>> = self
            .geometry
            .w_args
            .par_iter()
            .map(|args| {
                args.iter()
                    .filter_map(|x| so.locate(&y.map_or(*x, |y| x.mul(y))))
                    .collect()
            })
            .collect();
        bs.iter()
            .map(|b| {
                located
                    .iter()
                    .map(|hits| sum(hits.iter().map(|&(c, ph)| b.coeffs[c] * so.field().psi(ph))))
                    .collect()
            })
            .collect()
    }

    /// Sum over points of W-sum times section value.
    pub fn pair(w_sums: &[C64], values: &[C64]) -> C64 {
        sum(w_sums.iter().zip(values).map(|(w, f)| w * f))
    }

    /// The integral for arbitrary W (a function on SO(2l)) and f(., I).
    pub fn zeta(
        &self,
        w: &(dyn Fn(&Mat) -> C64 + Sync),
        f: &(dyn Fn(&Mat) -> C64 + Sync),
    ) -> C64 {
        let geo = &self.geometry;
        let terms: Vec<C64> = (0..geo.base.len())
            .into_par_iter()
            .map(|k| {
                let fv = f(&geo.base[k]);
                if fv == ZERO {
                    ZERO
                } else {
                    sum(geo.w_args[k].iter().map(w)) * fv
                }
            })
            .collect();
        sum(terms)
    }

    /// Psi(W, f) for n = l: sum over U\SO(2l) of W(g) f(w_{l,l} g, I).
    pub fn zeta_top(&self, w: &(dyn Fn(&Mat) -> C64 + Sync), f: &Section) -> Result<C64> {
        if self.n != self.l {
            return Err(Error::Domain("zeta_top needs n = l".into()));
        }
        let id = Mat::identity(self.n, self.q);
        Ok(self.zeta(w, &|h| self.eval(f, h, &id)))
    }

    /// Psi(W, f) for n < l: sum over U\SO(2n+1) of the R-sum of
    /// W(r w^{l,n} g (w^{l,n})^{-1}) times f(g, I).
    pub fn zeta_low(&self, w: &(dyn Fn(&Mat) -> C64 + Sync), f: &Section) -> Result<C64> {
        if self.n >= self.l {
            return Err(Error::Domain("zeta_low needs n < l".into()));
        }
        let id = Mat::identity(self.n, self.q);
        Ok(self.zeta(w, &|h| self.eval(f, h, &id)))
    }

    /// Gamma factors of every listed pi against every generic tau of GL(n).
    pub fn gamma_table(
        &self,
        so: &CellAlgebra,
        reps: &[GenericRep],
        pis: &[usize],
        cfg: &GammaConfig,
    ) -> Result<Vec<GammaRow>> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((self.l as u64) << 40) ^ ((self.n as u64) << 32));
        let gens = so.spec().generators();
        let bs: Vec<&BesselFn> = pis.iter().map(|&p| &reps[p].bessel).collect();
        for &p in pis {
            if !reps[p].cuspidal && !cfg.allow_noncuspidal {
                return Err(Error::Domain(format!("representation {p} is not cuspidal")));
            }
        }
        let base = self.w_sums(so, &bs, None);
        // Probe Whittaker functions: combinations of three right translates.
        let mut probes: Vec<Vec<Vec<C64>>> = Vec::new();
        for _ in 0..cfg.probes {
            let mut acc = vec![vec![ZERO; self.point_count()]; bs.len()];
            for _ in 0..3 {
                let y = random_word(&gens, &mut rng, 40);
                let c = random_coeff(&mut rng);
                for (a, row) in acc.iter_mut().zip(self.w_sums(so, &bs, Some(&y))) {
                    for (x, z) in a.iter_mut().zip(row) {
                        *x += c * z;
                    }
                }
            }
            probes.push(acc);
        }
        let mut rows = Vec::new();
        for tau in 0..self.gl.len() {
            let fv = self.section_fv(tau, self.default_vector(tau));
            let f0 = self.section_values(&fv);
            let m0 = self.section_values(&self.intertwine(fv));
            let sections: Vec<(Vec<C64>, Vec<C64>)> = (0..cfg.probes)
                .map(|_| {
                    let s = self.random_section(tau, &mut rng, 3);
                    (self.section_values(&s), self.section_values(&self.intertwine(s)))
                })
                .collect();
            for (j, &pi) in pis.iter().enumerate() {
                let psi = Self::pair(&base[j], &f0);
                if psi.norm() < cfg.tol.eq_abs {
                    return Err(Error::DegenerateZeta(format!(
                        "Psi(B, f_v) vanishes for pi {pi}, tau {tau} of GL({})",
                        self.n
                    )));
                }
                let gamma = Self::pair(&base[j], &m0) / psi;
                let (mut spread, mut used) = (0.0f64, 0);
                for (p, (fp, mp)) in sections.iter().enumerate() {
                    let den = Self::pair(&probes[p][j], fp);
                    if den.norm() < cfg.tol.eq_abs {
                        continue;
                    }
                    used += 1;
                    let ratio = Self::pair(&probes[p][j], mp) / den;
                    spread = spread.max((ratio - gamma).norm() / gamma.norm().max(1e-300));
                }
                if cfg.probes > 0 && used == 0 {
                    return Err(Error::DegenerateZeta(format!(
                        "every probe integral vanishes for pi {pi}, tau {tau} of GL({})",
                        self.n
                    )));
                }
                if spread >= cfg.tol.gamma_rel {
                    return Err(Error::Proportionality(format!(
                        "pi {pi}, tau {tau} of GL({}): relative spread {spread:.3e}",
                        self.n
                    )));
                }
                rows.push(GammaRow {
                    pi,
                    n: self.n,
                    tau,
                    gamma_re: gamma.re,
                    gamma_im: gamma.im,
                    psi_abs: psi.norm(),
                    spread,
                    probes: used,
                });
            }
        }
        Ok(rows)
    }
}

/// Knobs of a gamma computation.
#[derive(Debug, Clone, Copy)]
pub struct GammaConfig {
    pub probes: usize,
    pub seed: u64,
    pub tol: Tolerances,
    pub allow_noncuspidal: bool,
}

impl Default for GammaConfig {
    fn default() -> Self {
        GammaConfig { probes: 5, seed: 0, tol: Tolerances::default(), allow_noncuspidal: false }
    }
}

/// A product of `len` random generators.
pub fn random_word<R: Rng>(gens: &[Mat], rng: &mut R, len: usize) -> Mat {
    let mut g = gens[0].mul(&gens[0].inverse().expect("invertible"));
    for _ in 0..len {
        g = g.mul(&gens[rng.random_range(0..gens.len())]);
    }
    g
}

fn random_coeff<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}
