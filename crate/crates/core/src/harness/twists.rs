//! Checks of the zeta integrals, the gamma factors, multiplicity one and the
//! cell decomposition of the n = l integral.

use rand::RngExt;

use crate::error::Result;
use crate::genrep::BesselFn;
use crate::groups::{embed_even_in_odd, embed_odd_in_even, psi_arg_prime, w_ln, GroupSpec};
use crate::mat::Mat;
use crate::numeric::C64;
use crate::weyl::{cell_classes, CellClass, WeylElement};
use crate::zeta::{
    bessel_unipotent, cell_sums, hom_dimension, hom_dimension_literal, lemma_five_two_on, membership_table, random_word,
    torus_split, CellMeasure, CellSumSpec, GammaConfig, MultOneData, Section, Twist,
};

use super::{Context, Outcome, Recorder};

const ZERO: C64 = C64::new(0.0, 0.0);

const INVARIANCE_SAMPLES: usize = 10;
const EQUIVARIANCE_SAMPLES: usize = 6;
/// Random vectors per tau in the point-value check.
const POINT_SAMPLES: usize = 2;
/// Elements of SO(2n+1) for the intertwined-support check when the group
/// is not enumerated.
const SUPPORT_SAMPLES: usize = 20_000;
/// Largest H averaged over literally; each element costs a character
/// evaluation on SO(2l), about 65 ms at rank 3.
const LITERAL_LIMIT: u128 = 20_000;

fn max_norm(it: impl IntoIterator<Item = C64>) -> f64 {
    it.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn bessel_of<'a>(ctx: &'a Context, pi: usize) -> Result<impl Fn(&Mat) -> C64 + Sync + 'a> {
    let so = ctx.so()?;
    let b = &ctx.reps()?[pi].bessel;
    Ok(move |g: &Mat| b.eval(so, g))
}

/// A representation to integrate against: the first cuspidal one, else the
/// first one.
fn some_pi(ctx: &Context) -> Result<usize> {
    Ok(ctx.cuspidal()?.first().copied().unwrap_or(0))
}

pub(crate) fn zeta(ctx: &Context, rec: &mut Recorder) {
    let (l, q) = (ctx.l(), ctx.q());
    let eq = ctx.cfg.tol.eq_abs;
    for n in 1..=l {
        rec.run(format!("zeta.normalization.n{n}"), "fv-nonvanishing", || {
            let (so, reps, t) = (ctx.so()?, ctx.reps()?, ctx.twist(n)?);
            let bs: Vec<&BesselFn> = reps.iter().map(|r| &r.bessel).collect();
            let ws = t.w_sums(so, &bs, None);
            let mut err = 0.0f64;
            let mut count = 0;
            for tau in 0..t.gl().len() {
                let vals = t.section_values(&t.section_fv(tau, t.default_vector(tau)));
                for w in &ws {
                    err = err.max((Twist::pair(w, &vals) - 1.0).norm());
                    count += 1;
                }
            }
            Ok(Outcome::within(err, eq, count))
        });

        rec.run(format!("zeta.point_value.n{n}"), "fv-nonvanishing", || {
            // Psi(B_pi, f_v) = v(I) for n < l and v(I/2) for n = l
            let (so, reps, t) = (ctx.so()?, ctx.reps()?, ctx.twist(n)?);
            let bs: Vec<&BesselFn> = reps.iter().map(|r| &r.bessel).collect();
            let ws = t.w_sums(so, &bs, None);
            let at = if n < l { Mat::identity(n, q) } else { Mat::identity(n, q).scale(so.field().half()) };
            let mut rng = ctx.rng(&format!("point-value-{n}"));
            let mut err = 0.0f64;
            let mut count = 0;
            for tau in 0..t.gl().len() {
                for _ in 0..POINT_SAMPLES {
                    let v = t.gl().random_vector(tau, &mut rng, 3);
                    let want = t.gl().value(&v, &at);
                    let vals = t.section_values(&t.section_fv(tau, v));
                    for w in &ws {
                        err = err.max((Twist::pair(w, &vals) - want).norm());
                        count += 1;
                    }
                }
            }
            Ok(Outcome::within(err, eq, count))
        });

        rec.run(format!("zeta.intertwined_support.n{n}"), "intertwined-support", || {
            let (elems, full) = ctx.elements_or_sample(GroupSpec::so_odd(n, q), SUPPORT_SAMPLES, "support")?;
            let r = lemma_five_two_on(ctx.twist(n)?, &elems, eq)?;
            let ok = r.open_cell > 0 && r.support_violations == 0 && r.support_mismatch == 0;
            Ok(Outcome::within(r.max_value_error, eq, r.elements).and(ok).note(format!(
                "{}, {} open-cell elements, {} support violations",
                if full { "exhaustive" } else { "sampled" },
                r.open_cell,
                r.support_violations
            )))
        });
    }

    rec.run("zeta.invariance_top", "zeta-invariance", || {
        // Psi(rho(g) W, g f) = Psi(W, f) for g in SO(2l)
        let t = ctx.twist(l)?;
        let w = bessel_of(ctx, some_pi(ctx)?)?;
        let gens = ctx.so()?.spec().generators();
        let mut rng = ctx.rng("invariance-top");
        let id = Mat::identity(l, q);
        let mut err = 0.0f64;
        for _ in 0..INVARIANCE_SAMPLES {
            let tau = rng.random_range(0..t.gl().len());
            let s = t.random_section(tau, &mut rng, 3);
            let g = random_word(&gens, &mut rng, 20);
            let ge = embed_even_in_odd(&g);
            let base = t.zeta(&w, &|h| t.eval(&s, h, &id));
            let moved = t.zeta(&|x| w(&x.mul(&g)), &|h| t.eval(&s, &h.mul(&ge), &id));
            err = err.max((base - moved).norm());
        }
        Ok(Outcome::within(err, eq, INVARIANCE_SAMPLES))
    });

    for n in 1..l {
        rec.run(format!("zeta.equivariance_low.n{n}"), "zeta-equivariance", || {
            // Psi(rho(w phi(g) m w^-1) W, g f) = psi'(m) Psi(W, f) for g in
            // SO(2n+1) and m in N^{l-n}
            let t = ctx.twist(n)?;
            let f = ctx.so()?.field();
            let w = bessel_of(ctx, some_pi(ctx)?)?;
            let odd = GroupSpec::so_odd(n, q).generators();
            let nn = bessel_unipotent(l, n, q);
            let wl = w_ln(l, n, q);
            let wli = wl.inverse().expect("permutation");
            let id = Mat::identity(n, q);
            let mut rng = ctx.rng(&format!("equivariance-{n}"));
            let mut err = 0.0f64;
            for _ in 0..EQUIVARIANCE_SAMPLES {
                let tau = rng.random_range(0..t.gl().len());
                let s = t.random_section(tau, &mut rng, 2);
                let g = random_word(&odd, &mut rng, 20);
                let m = nn[rng.random_range(0..nn.len())];
                let y = wl.mul(&embed_odd_in_even(&g, l)).mul(&m).mul(&wli);
                let base = t.zeta(&w, &|h| t.eval(&s, h, &id));
                let moved = t.zeta(&|x| w(&x.mul(&y)), &|h| t.eval(&s, &h.mul(&g), &id));
                err = err.max((moved - f.psi(psi_arg_prime(&m, n)) * base).norm());
            }
            let out = Outcome::within(err, eq, EQUIVARIANCE_SAMPLES);
            Ok(if nn.len() == 1 { out.note("N^{l-n} is trivial; only SO(2n+1)-invariance is visible") } else { out })
        });
    }

    rec.run("zeta.zero_section", "zeta-invariance", || {
        let w = bessel_of(ctx, some_pi(ctx)?)?;
        let mut ok = true;
        for n in 1..=l {
            let t = ctx.twist(n)?;
            let s = t.section_fv(0, vec![ZERO; t.gl().group.order()]);
            let z = if n == l { t.zeta_top(&w, &s)? } else { t.zeta_low(&w, &s)? };
            ok &= z == ZERO;
        }
        Ok(Outcome::exact(ok, l))
    });
}

pub(crate) fn gamma(ctx: &Context, rec: &mut Recorder) {
    let l = ctx.l();
    let tol = ctx.cfg.tol;
    for n in 1..=l {
        rec.run(format!("gamma.proportionality.n{n}"), "gamma-proportionality", || {
            if ctx.gamma_pis()?.is_empty() {
                return Ok(Outcome::skip("no cuspidal generic representation"));
            }
            let rows = ctx.gammas(n)?;
            let spread = rows.iter().map(|r| r.spread).fold(0.0, f64::max);
            let ok = rows.iter().all(|r| r.probes > 0 && (r.psi_abs - 1.0).abs() < tol.eq_abs);
            let out = Outcome::within(spread, tol.gamma_rel, rows.len()).and(ok);
            Ok(if ctx.cfg.allow_noncuspidal { out.note("experimental: non-cuspidal pi included") } else { out })
        });

        rec.run(format!("gamma.conjugate.n{n}"), "gamma-conjugate", || {
            let reps = ctx.reps()?;
            let rows = ctx.gammas(n)?;
            let mut err = 0.0f64;
            let mut count = 0;
            for r in rows {
                let Some(p) = reps[r.pi].partner else { continue };
                let Some(other) = rows.iter().find(|s| s.pi == p && s.tau == r.tau) else { continue };
                err = err.max((r.gamma() - other.gamma()).norm());
                count += 1;
            }
            if count == 0 {
                return Ok(Outcome::skip("no conjugate pair among the gamma rows"));
            }
            Ok(Outcome::within(err, tol.eq_abs, count))
        });

        rec.run(format!("gamma.stability.n{n}"), "gamma-proportionality", || {
            // new probes and new coset representatives give the same gammas
            let rows = ctx.gammas(n)?;
            let pis = ctx.gamma_pis()?;
            if pis.is_empty() {
                return Ok(Outcome::skip("no cuspidal generic representation"));
            }
            let so = ctx.so()?;
            let moved = ctx.twist(n)?.rerandomized(so, ctx.cfg.seed ^ 0x9e37_79b9);
            let cfg = GammaConfig { seed: ctx.cfg.seed.wrapping_add(1), ..ctx.gamma_config() };
            let other = moved.gamma_table(so, ctx.reps()?, &pis, &cfg)?;
            let err = max_norm(rows.iter().zip(&other).map(|(a, b)| a.gamma() - b.gamma()));
            Ok(Outcome::within(err, tol.eq_abs, rows.len()).and(rows.len() == other.len()))
        });
    }
}

pub(crate) fn multone(ctx: &Context, rec: &mut Recorder) {
    let (l, q) = (ctx.l(), ctx.q());
    for n in 1..=l {
        rec.run(format!("multone.dimension.n{n}"), "multiplicity-one", || {
            let pis = ctx.cuspidal()?;
            if pis.is_empty() {
                return Ok(Outcome::skip("no cuspidal generic representation"));
            }
            let (so, gl) = (ctx.so()?, ctx.gl(n)?);
            let data = MultOneData::build(so, gl)?;
            let dims = hom_dimension(&data, so, ctx.reps()?, &pis, gl)?;
            let residual = dims.iter().map(|d| d.residual).fold(0.0, f64::max);
            let bounded = dims.iter().all(|d| (0..=1).contains(&d.dim));
            let models = pis.iter().filter(|&&p| dims.iter().any(|d| d.pi == p && d.dim == 1)).count();
            Ok(Outcome::within(residual, 1e-6, dims.len())
                .and(bounded)
                .note(format!("{models} of {} cuspidal pi have a model", pis.len())))
        });

        rec.run(format!("multone.literal.n{n}"), "multiplicity-one", || {
            // the defining average over H, compared with the reduced route
            let h_order = if n == l {
                GroupSpec::so_even(l, q).expected_order()
            } else {
                GroupSpec::so_odd(n, q).expected_order() * bessel_unipotent(l, n, q).len() as u128
            };
            if h_order > LITERAL_LIMIT {
                return Ok(Outcome::skip(format!("|H| = {h_order} is too large to enumerate")));
            }
            let pis = ctx.cuspidal()?;
            if pis.is_empty() {
                return Ok(Outcome::skip("no cuspidal generic representation"));
            }
            let (so, gl) = (ctx.so()?, ctx.gl(n)?);
            let data = MultOneData::build(so, gl)?;
            let reduced = hom_dimension(&data, so, ctx.reps()?, &pis, gl)?;
            let literal = hom_dimension_literal(&data, so, ctx.reps()?, &pis, gl)?;
            let same = reduced.len() == literal.len()
                && reduced.iter().zip(&literal).all(|(a, b)| (a.pi, a.tau, a.dim) == (b.pi, b.tau, b.dim));
            let residual = literal.iter().map(|d| d.residual).fold(0.0, f64::max);
            Ok(Outcome::within(residual, 1e-6, literal.len()).and(same))
        });
    }
}

fn cells_of(l: usize, classes: &[CellClass]) -> Vec<WeylElement> {
    let all = cell_classes(l);
    classes.iter().flat_map(|c| all[c].clone()).collect()
}

/// M f_v for the default v of every tau.
fn intertwined_defaults(t: &Twist) -> Vec<Section> {
    (0..t.gl().len()).map(|tau| t.intertwine(t.section_fv(tau, t.default_vector(tau)))).collect()
}

pub(crate) fn cells(ctx: &Context, rec: &mut Recorder) {
    let l = ctx.l();
    let eq = ctx.cfg.tol.eq_abs;

    rec.run("cells.membership", "cell-membership", || {
        let rows = membership_table(ctx.so()?)?;
        let ok = !rows.is_empty() && rows.iter().all(|r| r.open == r.predicted);
        let open = rows.iter().filter(|r| r.open).count();
        Ok(Outcome::exact(ok, rows.len()).note(format!("{open} embedded cells meet the open cell")))
    });

    rec.run("cells.full_integral", "cell-full", || {
        let (so, t) = (ctx.so()?, ctx.twist(l)?);
        let pis = ctx.cuspidal()?;
        if pis.is_empty() {
            return Ok(Outcome::skip("no cuspidal generic representation"));
        }
        let fs = intertwined_defaults(t);
        let reps = ctx.reps()?;
        let bs: Vec<&BesselFn> = pis.iter().map(|&p| &reps[p].bessel).collect();
        let all: Vec<CellClass> = cell_classes(l).into_keys().collect();
        let spec = CellSumSpec { cells: cells_of(l, &all), torus: so.torus().to_vec() };
        let sums = cell_sums(t, so, &bs, &fs, &spec, CellMeasure::Cosets)?;
        let ws = t.w_sums(so, &bs, None);
        let vals: Vec<Vec<C64>> = fs.iter().map(|f| t.section_values(f)).collect();
        let mut err = 0.0f64;
        for (i, w) in ws.iter().enumerate() {
            for (j, v) in vals.iter().enumerate() {
                err = err.max((sums[i][j] - Twist::pair(w, v)).norm());
            }
        }
        Ok(Outcome::within(err, eq, pis.len() * fs.len()))
    });

    rec.run("cells.top_conjugate", "cell-top-conjugate", || {
        // the B_l^c part for pi is the B_l part for c.pi
        let (so, t) = (ctx.so()?, ctx.twist(l)?);
        let reps = ctx.reps()?;
        let fs = intertwined_defaults(t);
        let torus = so.torus().to_vec();
        let top = CellSumSpec { cells: cells_of(l, &[CellClass::Top]), torus: torus.clone() };
        let conj = CellSumSpec { cells: cells_of(l, &[CellClass::TopConj]), torus };
        let mut err = 0.0f64;
        let mut count = 0;
        for p in ctx.cuspidal()? {
            let Some(c) = reps[p].partner else { continue };
            let m = CellMeasure::Unipotent;
            let lhs = cell_sums(t, so, &[&reps[p].bessel], &fs, &conj, m)?;
            let rhs = cell_sums(t, so, &[&reps[c].bessel], &fs, &top, m)?;
            err = err.max(max_norm(lhs[0].iter().zip(&rhs[0]).map(|(x, y)| x - y)));
            count += fs.len();
        }
        Ok(Outcome::within(err, eq, count))
    });

    rec.run("cells.penultimate", "cell-penultimate", || {
        // the B_{l-1} part over T_l is the (B_pi + B_{c.pi}) part over A_l
        let (so, t) = (ctx.so()?, ctx.twist(l)?);
        let reps = ctx.reps()?;
        let fs = intertwined_defaults(t);
        let (t_l, a_l) = torus_split(so);
        let vacuous = t_l.is_empty();
        let low_t = CellSumSpec { cells: cells_of(l, &[CellClass::Twist(l - 1)]), torus: t_l };
        let low_a = CellSumSpec { cells: low_t.cells.clone(), torus: a_l };
        let mut err = 0.0f64;
        let mut count = 0;
        for p in ctx.cuspidal()? {
            let Some(c) = reps[p].partner else { continue };
            let m = CellMeasure::Unipotent;
            let lhs = cell_sums(t, so, &[&reps[p].bessel], &fs, &low_t, m)?;
            let rhs = cell_sums(t, so, &[&reps[p].bessel, &reps[c].bessel], &fs, &low_a, m)?;
            for (j, x) in lhs[0].iter().enumerate() {
                err = err.max((x - rhs[0][j] - rhs[1][j]).norm());
            }
            count += fs.len();
        }
        let out = Outcome::within(err, eq, count);
        Ok(if vacuous { out.note("T_l is empty at this q, so both sides vanish") } else { out })
    });

    rec.run("cells.empty", "cell-full", || {
        let (so, t) = (ctx.so()?, ctx.twist(l)?);
        let fs = intertwined_defaults(t);
        let b = &ctx.reps()?[0].bessel;
        let spec = CellSumSpec { cells: Vec::new(), torus: so.torus().to_vec() };
        let z = cell_sums(t, so, &[b], &fs, &spec, CellMeasure::Cosets)?;
        Ok(Outcome::exact(z.iter().flatten().all(|x| *x == ZERO), fs.len()))
    });
}
