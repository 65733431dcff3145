//! Root-system checks. They do not depend on q and always cover ranks 2..=7.

use std::collections::BTreeSet;

use crate::weyl::{
    all_elements, bessel_support, cell_classes, permutations, predicted_thetas, t_n, w_tilde, w_tilde_top,
    CellClass, WeylElement,
};

use super::{Context, Outcome, Recorder};

const RANKS: std::ops::RangeInclusive<usize> = 2..=7;

pub(crate) fn weyl(_ctx: &Context, rec: &mut Recorder) {
    rec.run("weyl.support_size", "weyl-support", || {
        let mut ok = true;
        let mut count = 0;
        for l in RANKS {
            let support = bessel_support(l);
            let thetas: BTreeSet<u32> = support.iter().map(WeylElement::theta).collect();
            ok &= support.len() == 1 << l && thetas.len() == 1 << l;
            ok &= all_elements(l).iter().all(|w| w.is_even());
            count += support.len();
        }
        Ok(Outcome::exact(ok, count))
    });

    rec.run("weyl.partition", "weyl-partition", || {
        let mut ok = true;
        let mut count = 0;
        for l in RANKS {
            let mut union = BTreeSet::new();
            for members in cell_classes(l).values() {
                for w in members {
                    ok &= union.insert(w.clone());
                    count += 1;
                }
            }
            ok &= union == bessel_support(l).into_iter().collect();
        }
        Ok(Outcome::exact(ok, count))
    });

    rec.run("weyl.theta_characterization", "weyl-theta", || {
        // both inclusions: the class members' theta sets are exactly the
        // predicted families of subsets of the simple roots
        let mut ok = true;
        let mut count = 0;
        for l in RANKS {
            for (class, members) in cell_classes(l) {
                let thetas: BTreeSet<u32> = members.iter().map(WeylElement::theta).collect();
                ok &= thetas == predicted_thetas(l, class);
                count += members.len();
            }
            let full = (1u32 << l) - 1;
            let bit = |k: usize| 1u32 << (k - 1);
            for n in 1..l - 1 {
                ok &= w_tilde(l, n).theta() == full & !bit(n);
            }
            ok &= w_tilde_top(l).theta() == full & !bit(l);
        }
        Ok(Outcome::exact(ok, count))
    });

    rec.run("weyl.levi_outside_support", "levi-outside-support", || {
        let mut bad = Vec::new();
        let mut count = 0;
        for l in 2..=6 {
            for s in permutations(l).iter().skip(1) {
                count += 1;
                if t_n(l, s).supports_bessel() {
                    bad.push(format!("l={l} sigma={s:?}"));
                }
            }
        }
        let out = Outcome::exact(bad.is_empty(), count);
        Ok(if bad.is_empty() {
            out
        } else {
            out.note(format!(
                "t_l(w) lies in the Bessel support for {}; the claim needs l >= 3",
                bad.join(", ")
            ))
        })
    });

    rec.run("weyl.levi_outside_support_rank3plus", "levi-outside-support", || {
        let mut ok = true;
        let mut count = 0;
        for l in 3..=6 {
            for s in permutations(l).iter().skip(1) {
                count += 1;
                ok &= !t_n(l, s).supports_bessel();
            }
        }
        Ok(Outcome::exact(ok, count))
    });

    rec.run("weyl.top_shape", "top-shape", || {
        // t_l(w') w_top is c-stable iff w' = [[0, w''], [1, 0]]
        let mut ok = true;
        let mut count = 0;
        for l in 3..=5 {
            let wt = w_tilde_top(l);
            for s in permutations(l) {
                let w = t_n(l, &s).compose(&wt);
                if !w.supports_bessel() {
                    continue;
                }
                count += 1;
                ok &= (w.conj_c() == w) == (s[0] == l - 1);
            }
        }
        Ok(Outcome::exact(ok, count))
    });

    rec.run("weyl.penultimate_shape", "penultimate-shape", || {
        // the c-stable top elements are the t_{l-1}(w'') w~_{l-1}
        let mut ok = true;
        let mut count = 0;
        for l in 3..=5 {
            let classes = cell_classes(l);
            let wt = w_tilde(l, l - 1);
            let support: BTreeSet<_> = bessel_support(l).into_iter().collect();
            let direct: BTreeSet<_> = permutations(l - 1)
                .iter()
                .map(|s| t_n(l, s).compose(&wt))
                .filter(|w| support.contains(w))
                .collect();
            let stable: BTreeSet<_> = classes[&CellClass::Twist(l - 1)].iter().cloned().collect();
            ok &= direct == stable;
            for s in permutations(l - 1) {
                let mut big = vec![l - 1];
                big.extend(s.iter().copied());
                ok &= t_n(l, &big).compose(&w_tilde_top(l)) == t_n(l, &s).compose(&wt);
                count += 1;
            }
        }
        Ok(Outcome::exact(ok, count))
    });
}
