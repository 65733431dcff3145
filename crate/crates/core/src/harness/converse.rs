//! The converse-theorem experiment: cuspidal generic pi are grouped by
//! central character and the full family of gamma factors, and every group
//! must be {pi, c.pi}.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::groups::{levi_even, t_prime, w_tilde_block};
use crate::numeric::C64;

use super::{Context, Outcome, Recorder};

/// The gamma vector of one pi: GL(n) by GL(n), tau in fingerprint order.
fn gamma_vectors(ctx: &Context, pis: &[usize]) -> Result<Vec<Vec<C64>>> {
    let mut out = vec![Vec::new(); pis.len()];
    for n in 1..=ctx.l() {
        let gl = ctx.gl(n)?;
        let rows = ctx.gammas(n)?;
        // the decomposition order depends on the seed; the Bessel function of
        // tau does not
        let mut taus: Vec<usize> = (0..gl.len()).collect();
        taus.sort_by_key(|&t| fingerprint(gl.bessel(t)));
        for (k, &p) in pis.iter().enumerate() {
            for &tau in &taus {
                let r = rows.iter().find(|r| r.pi == p && r.tau == tau).expect("gamma row for every pair");
                out[k].push(r.gamma());
            }
        }
    }
    Ok(out)
}

fn fingerprint(b: &[C64]) -> Vec<(i64, i64)> {
    b.iter().map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64)).collect()
}

fn close(a: &[C64], b: &[C64], rel: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= rel * x.norm().max(1.0))
}

/// Classes of indices into `pis`, grouped against the first member.
fn partition(ctx: &Context, pis: &[usize]) -> Result<Vec<Vec<usize>>> {
    let reps = ctx.reps()?;
    let gammas = gamma_vectors(ctx, pis)?;
    let rel = ctx.cfg.tol.gamma_rel;
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for k in 0..pis.len() {
        let found = classes.iter_mut().find(|c| {
            let j = c[0];
            close(&reps[pis[j]].central, &reps[pis[k]].central, rel) && close(&gammas[j], &gammas[k], rel)
        });
        match found {
            Some(c) => c.push(k),
            None => classes.push(vec![k]),
        }
    }
    Ok(classes)
}

pub(crate) fn converse(ctx: &Context, rec: &mut Recorder) {
    let l = ctx.l();
    let eq = ctx.cfg.tol.eq_abs;

    rec.run("converse.classes", "converse-classes", || {
        let pis = ctx.cuspidal()?;
        if pis.is_empty() {
            return Ok(Outcome::skip("no cuspidal generic representation"));
        }
        let reps = ctx.reps()?;
        let classes = partition(ctx, &pis)?;
        let mut bad = Vec::new();
        let mut sizes = [0usize; 3];
        for c in &classes {
            let members: BTreeSet<usize> = c.iter().map(|&k| pis[k]).collect();
            let p = pis[c[0]];
            let expected: BTreeSet<usize> = [p, reps[p].partner.unwrap_or(p)].into();
            sizes[members.len().min(2)] += 1;
            if members != expected {
                bad.push(format!("{members:?}"));
            }
        }
        let out = Outcome::exact(bad.is_empty(), pis.len());
        Ok(if bad.is_empty() {
            out.note(format!("{} classes: {} self-conjugate, {} conjugate pairs", classes.len(), sizes[1], sizes[2]))
        } else {
            out.note(format!("theorem violation: classes {} are not of the form {{pi, c.pi}}", bad.join(", ")))
        })
    });

    rec.run("converse.bessel_sum", "bessel-sum", || {
        // B_pi + B_{c.pi} agree on every cell within a class
        let pis = ctx.cuspidal()?;
        if pis.is_empty() {
            return Ok(Outcome::skip("no cuspidal generic representation"));
        }
        let reps = ctx.reps()?;
        let sum_of = |p: usize| -> Vec<C64> {
            let c = reps[p].partner.unwrap_or(p);
            let (a, b) = (&reps[p].bessel.coeffs, &reps[c].bessel.coeffs);
            a.iter().zip(b).map(|(x, y)| x + y).collect()
        };
        let mut err = 0.0f64;
        let mut pairs = 0;
        for c in partition(ctx, &pis)? {
            let first = sum_of(pis[c[0]]);
            for &k in &c[1..] {
                let other = sum_of(pis[k]);
                err = err.max(first.iter().zip(&other).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max));
                pairs += 1;
            }
        }
        let out = Outcome::within(err, eq, pairs);
        Ok(if pairs == 0 { out.note("every class is a single pi, so the identity is trivial") } else { out })
    });

    rec.run("converse.lower_twists", "lower-twist-agreement", || {
        // equal gammas against GL(n), n < l, force B_pi = B_{c.pi} on
        // t_n(a) t'_n w~_n
        let pis = ctx.cuspidal()?;
        if pis.is_empty() || l < 2 {
            return Ok(Outcome::skip("nothing to compare"));
        }
        let (so, reps) = (ctx.so()?, ctx.reps()?);
        let q = ctx.q();
        let mut err = 0.0f64;
        let mut count = 0;
        for n in 1..l {
            let gl = ctx.gl(n)?;
            let tail = t_prime(l, n, q).mul(&w_tilde_block(l, n, q));
            for &p in &pis {
                let c = reps[p].partner.unwrap_or(p);
                for a in gl.group.elements() {
                    let g = levi_even(l, a).mul(&tail);
                    err = err.max((reps[p].bessel.eval(so, &g) - reps[c].bessel.eval(so, &g)).norm());
                    count += 1;
                }
            }
        }
        Ok(Outcome::within(err, eq, count))
    });
}
