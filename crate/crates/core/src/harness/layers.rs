//! Checks of the group layer, the Gelfand-Graev decomposition and the
//! Bessel functions.

use std::collections::HashSet;

use rand::RngExt;
use rayon::prelude::*;

use crate::genrep::{
    algebra_commutator, conjugate_bessel, decompose_algebra, decompose_module, CellAlgebra, GgModule,
};
use crate::groups::{
    bruhat_decompose, c_matrix, d_n, embed_even_in_odd, embed_odd_in_even, involution_matrix, levi_even, levi_odd,
    r_elements, siegel_decompose, t_prime, t_tilde, w_hat, w_ll, w_ln, w_long_block, w_odd, w_tilde_block,
    w_tilde_prime_block, GroupSpec, Siegel, INVOLUTION_16,
};
use crate::mat::Mat;
use crate::numeric::C64;
use crate::weyl::WeylElement;

use super::context::ENUM_LIMIT;
use super::{Context, Outcome, Recorder};

const SAMPLES: usize = 2000;

fn label(spec: &GroupSpec) -> String {
    let k = match spec.kind {
        crate::groups::GroupKind::SoEven => "so_even",
        crate::groups::GroupKind::SoOdd => "so_odd",
        crate::groups::GroupKind::Gl => "gl",
    };
    format!("{k}{}", spec.rank)
}

/// Pairs to test a homomorphism on: all of them when there are few, random
/// ones otherwise.
fn pairs(ctx: &Context, elems: &[Mat], tag: &str) -> Vec<(usize, usize)> {
    let n = elems.len();
    if n * n <= 400_000 {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    } else {
        let mut rng = ctx.rng(tag);
        (0..SAMPLES).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect()
    }
}

pub(crate) fn groups(ctx: &Context, rec: &mut Recorder) {
    let (l, q) = (ctx.l(), ctx.q());
    let mut specs = vec![GroupSpec::so_even(l, q)];
    specs.extend((1..=l).map(|n| GroupSpec::so_odd(n, q)));
    specs.extend((1..=l).map(|n| GroupSpec::gl(n, q)));
    for spec in specs {
        rec.run(format!("groups.order.{}", label(&spec)), "group-orders", || {
            if spec.expected_order() > ENUM_LIMIT {
                return Ok(Outcome::skip(format!(
                    "order {} is only reached through decompositions",
                    spec.expected_order()
                )));
            }
            let g = ctx.group(spec)?;
            let members = g.elements().par_iter().filter(|x| spec.contains(x)).count();
            let mut rng = ctx.rng("closure");
            let closed = (0..SAMPLES).all(|_| {
                let a = g.element(rng.random_range(0..g.order()));
                let b = g.element(rng.random_range(0..g.order()));
                g.index_of(&a.mul(b)).is_some() && a.inverse().is_some_and(|ai| g.index_of(&ai).is_some())
            });
            let ok = g.order() as u128 == spec.expected_order() && members == g.order() && closed;
            Ok(Outcome::exact(ok, g.order()).note(format!("order {}", g.order())))
        });
    }

    for n in 1..l {
        rec.run(format!("groups.embed_odd_in_even.n{n}"), "embeddings", || {
            let (elems, full) = ctx.elements_or_sample(GroupSpec::so_odd(n, q), SAMPLES, "odd")?;
            let images: Vec<Mat> = elems.iter().map(|g| embed_odd_in_even(g, l)).collect();
            let target = GroupSpec::so_even(l, q);
            let mut ok = images.iter().all(|x| target.contains(x));
            let ps = pairs(ctx, &elems, "odd-pairs");
            ok &= ps
                .par_iter()
                .all(|&(i, j)| images[i].mul(&images[j]) == embed_odd_in_even(&elems[i].mul(&elems[j]), l));
            if full {
                ok &= images.iter().map(Mat::key).collect::<HashSet<_>>().len() == elems.len();
                // l_n(a) goes to q_n(a)
                ok &= elems.iter().all(|g| match siegel_decompose(g) {
                    Ok(Siegel::Parabolic { a, v }) if v.is_identity() => {
                        embed_odd_in_even(&levi_odd(&a), l) == crate::groups::levi_image(l, &a)
                    }
                    _ => true,
                });
            }
            Ok(Outcome::exact(ok, ps.len()).note(if full { "exhaustive" } else { "sampled" }))
        });
    }

    rec.run("groups.embed_even_in_odd", "embeddings", || {
        let (elems, full) = ctx.elements_or_sample(GroupSpec::so_even(l, q), SAMPLES, "even")?;
        let images: Vec<Mat> = elems.iter().map(embed_even_in_odd).collect();
        let target = GroupSpec::so_odd(l, q);
        let mut ok = images.iter().all(|x| target.contains(x));
        let ps = pairs(ctx, &elems, "even-pairs");
        ok &= ps
            .par_iter()
            .all(|&(i, j)| images[i].mul(&images[j]) == embed_even_in_odd(&elems[i].mul(&elems[j])));
        if full {
            ok &= images.iter().map(Mat::key).collect::<HashSet<_>>().len() == elems.len();
        }
        Ok(Outcome::exact(ok, ps.len()).note(if full { "exhaustive" } else { "sampled" }))
    });

    rec.run("groups.c_normalizes", "special-elements", || {
        let (elems, full) = ctx.elements_or_sample(GroupSpec::so_even(l, q), SAMPLES, "even")?;
        let c = c_matrix(l, q);
        let spec = GroupSpec::so_even(l, q);
        let ok = c.mul(&c).is_identity() && !spec.contains(&c) && elems.par_iter().all(|g| spec.contains(&c.mul(g).mul(&c)));
        Ok(Outcome::exact(ok, elems.len()).note(if full { "exhaustive" } else { "sampled" }))
    });

    rec.run("groups.special_elements", "special-elements", || {
        let even = GroupSpec::so_even(l, q);
        let mut members = vec![t_tilde(l, q), w_tilde_prime_block(l, q), w_long_block(l, q)];
        for n in 1..=l {
            members.push(t_prime(l, n, q));
        }
        for n in 1..l {
            members.extend([w_tilde_block(l, n, q), w_hat(l, n, q), w_ln(l, n, q)]);
            members.extend(r_elements(l, n, q));
        }
        let mut ok = members.iter().all(|m| even.contains(m));
        let mut count = members.len();
        ok &= GroupSpec::so_odd(l, q).contains(&w_ll(l, q));
        for n in 1..=l {
            ok &= GroupSpec::so_odd(n, q).contains(&w_odd(n, q));
            ok &= GroupSpec::gl(n, q).contains(&d_n(n, q));
            count += 2;
        }
        let f = crate::field::Fq::new(q)?;
        let expected = Mat::from_fn(2 * l, q, |i, j| {
            if i != j {
                0
            } else if i == l - 1 {
                f.neg(f.half()) as i64
            } else if i == l {
                -2
            } else {
                1
            }
        });
        ok &= t_tilde(l, q) == expected;
        let note = if t_tilde(l, q).is_identity() { "t~ is the identity at this q" } else { "t~ is not the identity" };
        Ok(Outcome::exact(ok, count + 1).note(note))
    });

    rec.run("groups.involution", "involution", || {
        let a = INVOLUTION_16;
        let mut ok = true;
        for i in 0..3 {
            for j in 0..3 {
                let s: i64 = (0..3).map(|k| a[i][k] * a[k][j]).sum();
                ok &= s == if i == j { 256 } else { 0 };
            }
        }
        let m = involution_matrix(q);
        ok &= m.mul(&m).is_identity();
        Ok(Outcome::exact(ok, 9))
    });

    rec.run("groups.bruhat_roundtrip", "bruhat", || {
        let (elems, full) = ctx.elements_or_sample(GroupSpec::so_even(l, q), SAMPLES, "even")?;
        let ok = elems.par_iter().all(|g| {
            bruhat_decompose(g).is_ok_and(|b| {
                b.u1.mul(&b.t).mul(&b.w).mul(&b.u2) == *g
                    && b.u1.is_upper_unitriangular()
                    && b.u2.is_upper_unitriangular()
                    && b.t.is_diagonal()
                    && WeylElement::from_matrix(&b.w).is_some()
            })
        });
        Ok(Outcome::exact(ok, elems.len()).note(if full { "exhaustive" } else { "sampled" }))
    });

    for n in 1..=l {
        rec.run(format!("groups.siegel_roundtrip.n{n}"), "siegel", || {
            let (elems, full) = ctx.elements_or_sample(GroupSpec::so_odd(n, q), SAMPLES, "siegel")?;
            let w = w_odd(n, q);
            let ok = elems.par_iter().all(|g| match siegel_decompose(g) {
                Ok(Siegel::Parabolic { a, v }) => levi_odd(&a).mul(&v) == *g,
                Ok(Siegel::OpenCell { a, n1, n2 }) => levi_odd(&a).mul(&n1).mul(&w).mul(&n2) == *g,
                Ok(Siegel::Other) => true,
                Err(_) => false,
            });
            Ok(Outcome::exact(ok, elems.len()).note(if full { "exhaustive" } else { "sampled" }))
        });
    }
}

pub(crate) fn decompose(ctx: &Context, rec: &mut Recorder) {
    rec.run("decompose.complete", "gg-decomposition", || {
        let so = ctx.so()?;
        let dec = ctx.decomposition()?;
        let total = dec.total_dim() as f64;
        let cusp = ctx.cuspidal()?.len();
        let ok = total == so.coset_count() && dec.dim_residual < 1e-6;
        Ok(Outcome::exact(ok, dec.reps.len()).note(format!(
            "{} generic pieces, {} cuspidal, total dimension {}",
            dec.reps.len(),
            cusp,
            dec.total_dim()
        )))
    });

    rec.run("decompose.hecke_commute", "hecke-commute", || {
        let so = ctx.so()?;
        let c = algebra_commutator(&so.structure_constants(), ctx.cfg.seed);
        Ok(Outcome::within(c, ctx.cfg.tol.eq_abs, so.len()))
    });

    rec.run("decompose.seed_stability", "gg-decomposition", || {
        let so = ctx.so()?;
        let a = &ctx.decomposition()?.reps;
        let b = decompose_algebra(so, ctx.cfg.seed.wrapping_add(17), &ctx.cfg.tol)?.reps;
        let mut worst: f64 = if a.len() == b.len() { 0.0 } else { f64::INFINITY };
        for r in a {
            let d = b.iter().map(|s| r.bessel.distance(&s.bessel)).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
        Ok(Outcome::within(worst, ctx.cfg.tol.eq_abs, a.len()))
    });

    for n in 1..=ctx.l() {
        rec.run(format!("decompose.gl.n{n}"), "gg-decomposition", || {
            let gl = ctx.gl(n)?;
            let ok = gl.dec.total_dim() as f64 == gl.alg.coset_count() && gl.dec.dim_residual < 1e-6;
            let cusp = gl.reps().iter().filter(|r| r.cuspidal).count();
            Ok(Outcome::exact(ok, gl.len()).note(format!("{} generic, {} cuspidal", gl.len(), cusp)))
        });
    }

    rec.run("decompose.cuspidal_exists", "gg-decomposition", || {
        let c = ctx.cuspidal()?.len();
        Ok(Outcome::exact(c > 0, c))
    });
}

fn bessel_at(so: &CellAlgebra, coeffs: &[C64], g: &Mat) -> C64 {
    so.eval(coeffs, g)
}

pub(crate) fn bessel(ctx: &Context, rec: &mut Recorder) {
    let (l, q) = (ctx.l(), ctx.q());
    let tol = ctx.cfg.tol.eq_abs;

    rec.run("bessel.normalized", "bessel-normalized", || {
        let so = ctx.so()?;
        let reps = ctx.reps()?;
        let id = Mat::identity(2 * l, q);
        let err = reps
            .iter()
            .map(|r| (bessel_at(so, &r.bessel.coeffs, &id) - 1.0).norm())
            .fold(0.0, f64::max);
        Ok(Outcome::within(err, tol, reps.len()))
    });

    rec.run("bessel.equivariance", "bessel-equivariance", || {
        // B(u1 g u2) = psi(u1) psi(u2) B(g): exhaustive over U x (U\G) x U
        // on the smallest group, sampled otherwise
        let so = ctx.so()?;
        let reps = ctx.reps()?;
        let us = so.unipotent();
        let exhaustive = so.group_order() <= 1000.0;
        let triples: Vec<(usize, Mat, usize)> = if exhaustive {
            let xs = so.coset_reps();
            (0..us.len())
                .flat_map(|a| xs.iter().flat_map(move |x| (0..us.len()).map(move |b| (a, *x, b))))
                .collect()
        } else {
            let gens = so.spec().generators();
            let mut rng = ctx.rng("equivariance");
            (0..SAMPLES)
                .map(|_| {
                    let g = crate::zeta::random_word(&gens, &mut rng, 30);
                    (rng.random_range(0..us.len()), g, rng.random_range(0..us.len()))
                })
                .collect()
        };
        let err = triples
            .par_iter()
            .map(|(a, g, b)| {
                let lhs_g = us[*a].mul(g).mul(&us[*b]);
                let phase = so.character(&us[*a]) * so.character(&us[*b]);
                reps.iter()
                    .map(|r| (bessel_at(so, &r.bessel.coeffs, &lhs_g) - phase * bessel_at(so, &r.bessel.coeffs, g)).norm())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        Ok(Outcome::within(err, tol, triples.len()).note(if exhaustive { "exhaustive" } else { "sampled" }))
    });

    rec.run("bessel.support_cells", "bessel-support", || {
        // every double coset carrying a Bessel function lies over the support
        let so = ctx.so()?;
        let ok = so
            .cells()
            .iter()
            .all(|c| WeylElement::from_matrix(&c.w).is_some_and(|w| w.supports_bessel()));
        Ok(Outcome::exact(ok, so.len()))
    });

    rec.run("bessel.support_module_route", "bessel-support", || {
        // the induced-module route: Bessel functions tabulated on the whole
        // group vanish off the support and match the algebra route
        let so = ctx.so()?;
        if so.coset_count() > 1000.0 {
            return Ok(Outcome::skip("module route only for |U\\G| <= 1000"));
        }
        let group = ctx.group(so.spec())?;
        let module = GgModule::build(group.clone(), so)?;
        let dec = decompose_module(&module, so, ctx.cfg.seed, &ctx.cfg.tol)?;
        let e = module.whittaker_projector();
        let reps = ctx.reps()?;
        let mut err: f64 = if dec.reps.len() == reps.len() { 0.0 } else { f64::INFINITY };
        let mut off = 0usize;
        for r in &dec.reps {
            let space = r.space.as_ref().expect("module route keeps eigenspaces");
            let table = module.table(&module.whittaker_vector(space, &e)?);
            let support_err = group
                .elements()
                .par_iter()
                .zip(&table)
                .filter(|(g, _)| {
                    let w = bruhat_decompose(g).expect("group element").w;
                    !WeylElement::from_matrix(&w).is_some_and(|w| w.supports_bessel())
                })
                .map(|(_, v)| v.norm())
                .reduce(|| 0.0, f64::max);
            off += 1;
            err = err.max(support_err);
            let best = reps
                .iter()
                .map(|s| {
                    group
                        .elements()
                        .iter()
                        .zip(&table)
                        .map(|(g, v)| (bessel_at(so, &s.bessel.coeffs, g) - v).norm())
                        .fold(0.0, f64::max)
                })
                .fold(f64::INFINITY, f64::min);
            err = err.max(best);
        }
        Ok(Outcome::within(err, tol, off * group.order()).note("exhaustive"))
    });

    rec.run("bessel.central_torus", "central-torus", || {
        let so = ctx.so()?;
        let reps = ctx.reps()?;
        let center: HashSet<u128> = so.center().iter().map(Mat::key).collect();
        let mut err: f64 = 0.0;
        let mut count = 0;
        for t in so.torus().iter().filter(|t| !center.contains(&t.key())) {
            count += 1;
            for r in reps {
                err = err.max(bessel_at(so, &r.bessel.coeffs, t).norm());
            }
        }
        Ok(Outcome::within(err, tol, count))
    });

    rec.run("bessel.levi_vanishing", "levi-vanishing", || {
        // B(t_l(a)) = 0 unless a is upper triangular
        let so = ctx.so()?;
        let reps = ctx.reps()?;
        let gl = ctx.gl(l)?;
        let lower: Vec<&Mat> = gl.group.elements().iter().filter(|a| !a.is_upper_triangular()).collect();
        let values: Vec<f64> = lower
            .par_iter()
            .map(|a| {
                let g = levi_even(l, a);
                reps.iter().map(|r| bessel_at(so, &r.bessel.coeffs, &g).norm()).fold(0.0, f64::max)
            })
            .collect();
        let err = values.iter().copied().fold(0.0, f64::max);
        let nonzero = values.iter().filter(|v| **v >= tol).count();
        let out = Outcome::within(err, tol, lower.len());
        Ok(if nonzero == 0 {
            out
        } else {
            out.note(format!(
                "nonzero at {nonzero} of {} non-triangular a; the vanishing needs l >= 3",
                lower.len()
            ))
        })
    });

    rec.run("bessel.conjugate", "conjugate-bessel", || {
        let so = ctx.so()?;
        let reps = ctx.reps()?;
        let id = Mat::identity(2 * l, q);
        let mut err: f64 = 0.0;
        let mut ok = true;
        for (i, r) in reps.iter().enumerate() {
            let cb = conjugate_bessel(so, &r.bessel);
            err = err.max((bessel_at(so, &cb.coeffs, &id) - 1.0).norm());
            let Some(p) = r.partner else {
                ok = false;
                continue;
            };
            ok &= reps[p].partner == Some(i) && reps[p].dim == r.dim && reps[p].cuspidal == r.cuspidal;
            err = err.max(cb.distance(&reps[p].bessel));
        }
        let fixed = reps.iter().enumerate().filter(|(i, r)| r.partner == Some(*i)).count();
        Ok(Outcome::within(err, tol, reps.len())
            .and(ok)
            .note(format!("{fixed} self-conjugate of {}", reps.len())))
    });

    rec.run("bessel.central_character", "central-character", || {
        let so = ctx.so()?;
        let reps = ctx.reps()?;
        let minus = Mat::identity(2 * l, q).scale(q - 1);
        let gens = so.spec().generators();
        let mut rng = ctx.rng("central");
        let gs: Vec<Mat> = (0..200).map(|_| crate::zeta::random_word(&gens, &mut rng, 30)).collect();
        let mut err: f64 = 0.0;
        for r in reps {
            let w = r.omega_minus_one(so);
            err = err.max((w * w - 1.0).norm());
            for g in &gs {
                let lhs = bessel_at(so, &r.bessel.coeffs, &minus.mul(g));
                err = err.max((lhs - w * bessel_at(so, &r.bessel.coeffs, g)).norm());
            }
        }
        Ok(Outcome::within(err, tol, reps.len() * gs.len()))
    });
}
