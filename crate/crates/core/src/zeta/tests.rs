use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::genrep::decompose_algebra;
use crate::groups::{levi_even, t_prime, w_tilde_block};
use crate::weyl::{cell_classes, CellClass, WeylElement};

struct Fixture {
    so: CellAlgebra,
    reps: Vec<GenericRep>,
    twists: Vec<Twist>,
}

fn fixture(l: usize, q: u32) -> Fixture {
    let tol = Tolerances::default();
    let so = CellAlgebra::build(GroupSpec::so_even(l, q), false).unwrap();
    let reps = decompose_algebra(&so, 7, &tol).unwrap().reps;
    let twists = (1..=l)
        .map(|n| Twist::build(&so, Arc::new(GlModel::build(n, q, 11, &tol).unwrap())).unwrap())
        .collect();
    Fixture { so, reps, twists }
}

fn so4_3() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(2, 3))
}

fn so4_5() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| fixture(2, 5))
}

fn bessel_fn<'a>(f: &'a Fixture, pi: usize) -> impl Fn(&Mat) -> C64 + Sync + 'a {
    move |g: &Mat| f.so.locate(g).map_or(ZERO, |(c, ph)| f.reps[pi].bessel.coeffs[c] * f.so.field().psi(ph))
}

fn psi_fv(f: &Fixture, t: &Twist, pi: usize, tau: usize, v: Vec<C64>) -> C64 {
    let s = t.section_fv(tau, v);
    let w = bessel_fn(f, pi);
    if t.n() == t.l() { t.zeta_top(&w, &s) } else { t.zeta_low(&w, &s) }.unwrap()
}

#[test]
fn normalized_sections_give_one() {
    for f in [so4_3(), so4_5()] {
        for t in &f.twists {
            for pi in 0..f.reps.len() {
                for tau in 0..t.gl().len() {
                    let z = psi_fv(f, t, pi, tau, t.default_vector(tau));
                    assert!((z - 1.0).norm() < 1e-8, "l={} n={} pi={pi} tau={tau}: {z}", t.l(), t.n());
                }
            }
        }
    }
}

/// Psi(B_pi, f_v) = v(I) for n < l and v(I/2) for n = l, for random v.
fn check_random_v(f: &Fixture, q: u32, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in &f.twists {
        let at = if t.n() < t.l() {
            Mat::identity(t.n(), q)
        } else {
            Mat::identity(t.n(), q).scale(f.so.field().half())
        };
        for pi in 0..f.reps.len() {
            for tau in 0..t.gl().len() {
                let v = t.gl().random_vector(tau, &mut rng, 3);
                let z = psi_fv(f, t, pi, tau, v.clone());
                let want = t.gl().value(&v, &at);
                assert!((z - want).norm() < 1e-8, "n={} pi={pi} tau={tau}: {z} vs {want}", t.n());
            }
        }
    }
}

#[test]
fn fv_integrals_are_point_evaluations_q3() {
    check_random_v(so4_3(), 3, 3);
}

#[test]
fn fv_integrals_are_point_evaluations_q5() {
    check_random_v(so4_5(), 5, 5);
}

fn cuspidal(f: &Fixture) -> Vec<usize> {
    (0..f.reps.len()).filter(|&p| f.reps[p].cuspidal).collect()
}

fn gammas(f: &Fixture, t: &Twist, seed: u64) -> Vec<GammaRow> {
    let pis = cuspidal(f);
    let cfg = GammaConfig { seed, ..GammaConfig::default() };
    t.gamma_table(&f.so, &f.reps, &pis, &cfg).unwrap()
}

#[test]
fn gamma_is_a_proportionality_constant() {
    for f in [so4_3(), so4_5()] {
        for t in &f.twists {
            let rows = gammas(f, t, 1);
            assert_eq!(rows.len(), cuspidal(f).len() * t.gl().len());
            for r in &rows {
                assert!(r.spread < 1e-6 && r.probes > 0, "{r:?}");
                assert!((r.psi_abs - 1.0).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn gamma_ignores_seed_and_coset_representatives() {
    let f = so4_3();
    for t in &f.twists {
        let a = gammas(f, t, 1);
        let b = gammas(f, &t.rerandomized(&f.so, 99), 2);
        for (x, y) in a.iter().zip(&b) {
            assert!((x.gamma() - y.gamma()).norm() < 1e-8, "{x:?} {y:?}");
        }
    }
}

#[test]
fn gamma_is_deterministic() {
    let f = so4_3();
    let t = &f.twists[1];
    assert_eq!(gammas(f, t, 4), gammas(f, t, 4));
}

#[test]
fn conjugate_pairs_share_gammas() {
    for f in [so4_3(), so4_5()] {
        for t in &f.twists {
            let rows = gammas(f, t, 6);
            for r in &rows {
                let p = f.reps[r.pi].partner.unwrap();
                let other = rows.iter().find(|s| s.pi == p && s.tau == r.tau).unwrap();
                assert!((r.gamma() - other.gamma()).norm() < 1e-8, "{r:?} {other:?}");
            }
        }
    }
}

#[test]
fn top_integral_is_invariant() {
    // Psi(rho(g) W, g f) = Psi(W, f) for g in SO(2l), n = l.
    let f = so4_3();
    let t = &f.twists[1];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let gens = f.so.spec().generators();
    let w = bessel_fn(f, 0);
    for _ in 0..10 {
        let s = t.random_section(2, &mut rng, 3);
        let g = random_word(&gens, &mut rng, 20);
        let ge = embed_even_in_odd(&g);
        let id = Mat::identity(2, 3);
        let base = t.zeta(&w, &|h| t.eval(&s, h, &id));
        let moved = t.zeta(&|x| w(&x.mul(&g)), &|h| t.eval(&s, &h.mul(&ge), &id));
        assert!((base - moved).norm() < 1e-8, "{base} vs {moved}");
    }
}

#[test]
fn low_integral_is_invariant_under_odd_group() {
    // Psi(rho(w g w^{-1}) W, g f) = Psi(W, f) for g in SO(2n+1); here
    // N^{l-n} is trivial so only the SO(2n+1) part is visible.
    let f = so4_3();
    let t = &f.twists[0];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let odd = GroupSpec::so_odd(1, 3).generators();
    let w = bessel_fn(f, 0);
    let wl = w_ln(2, 1, 3);
    let wli = wl.inverse().unwrap();
    let id = Mat::identity(1, 3);
    for _ in 0..10 {
        let s = t.random_section(1, &mut rng, 2);
        let g = random_word(&odd, &mut rng, 20);
        let y = wl.mul(&embed_odd_in_even(&g, 2)).mul(&wli);
        let base = t.zeta(&w, &|h| t.eval(&s, h, &id));
        let moved = t.zeta(&|x| w(&x.mul(&y)), &|h| t.eval(&s, &h.mul(&g), &id));
        assert!((base - moved).norm() < 1e-8, "{base} vs {moved}");
    }
}


#[test]
fn multiplicity_one_for_cuspidal_pi() {
    let f = so4_3();
    let pis: Vec<usize> = (0..f.reps.len()).collect();
    for t in &f.twists {
        let data = MultOneData::build(&f.so, t.gl()).unwrap();
        let reduced = hom_dimension(&data, &f.so, &f.reps, &pis, t.gl()).unwrap();
        let literal = hom_dimension_literal(&data, &f.so, &f.reps, &pis, t.gl()).unwrap();
        assert_eq!(reduced.len(), pis.len() * t.gl().len());
        for (x, y) in reduced.iter().zip(&literal) {
            assert_eq!((x.pi, x.tau, x.dim), (y.pi, y.tau, y.dim));
            assert!(x.residual < 1e-6 && y.residual < 1e-6);
            if f.reps[x.pi].cuspidal {
                assert!(x.dim <= 1, "{x:?}");
            }
        }
        // every cuspidal pi has a Bessel model against some tau
        for &p in &cuspidal(f) {
            assert!(reduced.iter().any(|x| x.pi == p && x.dim == 1));
        }
    }
}

#[test]
fn non_cuspidal_pi_can_have_larger_hom_spaces() {
    let f = so4_3();
    let t = &f.twists[1];
    let pis: Vec<usize> = (0..f.reps.len()).filter(|&p| !f.reps[p].cuspidal).collect();
    let data = MultOneData::build(&f.so, t.gl()).unwrap();
    let dims = hom_dimension(&data, &f.so, &f.reps, &pis, t.gl()).unwrap();
    assert!(dims.iter().any(|x| x.dim > 1));
    let cfg = GammaConfig { allow_noncuspidal: true, ..GammaConfig::default() };
    assert!(matches!(
        t.gamma_table(&f.so, &f.reps, &pis, &cfg),
        Err(Error::Proportionality(_))
    ));
    assert!(matches!(
        t.gamma_table(&f.so, &f.reps, &pis, &GammaConfig::default()),
        Err(Error::Domain(_))
    ));
}

#[test]
fn intertwined_sections_small_case() {
    let f = so4_3();
    let t = &f.twists[0];
    let odd = FiniteGroup::enumerate(GroupSpec::so_odd(1, 3), DEFAULT_BUDGET).unwrap();
    let r = lemma_five_two(t, &odd, 1e-8).unwrap();
    assert_eq!(r.elements, 24);
    assert!(r.open_cell > 0);
    assert_eq!(r.support_violations, 0);
    assert_eq!(r.support_mismatch, 0);
    assert!(r.max_value_error < 1e-8, "{r:?}");
}

#[test]
fn fv_support_and_values() {
    let f = so4_3();
    let t = &f.twists[1];
    let id = Mat::identity(2, 3);
    let b = t.default_vector(0);
    let fv = t.section_fv(0, b.clone());
    assert!((t.eval(&fv, &Mat::identity(5, 3), &id) - t.gl().value(&b, &id)).norm() < 1e-12);
    assert_eq!(t.eval(&fv, t.w_n(), &id), ZERO);
    let mf = t.intertwine(fv);
    let want = t.gl().value(&b, t.d_n());
    assert!((t.eval(&mf, t.w_n(), &id) - want).norm() < 1e-8);
    assert_eq!(t.eval(&mf, &Mat::identity(5, 3), &id), ZERO);
}

#[test]
fn zero_section_integrates_to_zero() {
    let f = so4_3();
    let w = bessel_fn(f, 0);
    for t in &f.twists {
        let s = t.section_fv(0, vec![ZERO; t.gl().group.order()]);
        let z = if t.n() == t.l() { t.zeta_top(&w, &s) } else { t.zeta_low(&w, &s) }.unwrap();
        assert_eq!(z, ZERO);
    }
}

#[test]
fn membership_matches_prediction() {
    for f in [so4_3(), so4_5()] {
        let rows = membership_table(&f.so).unwrap();
        assert!(!rows.is_empty());
        for r in &rows {
            assert_eq!(r.open, r.predicted, "{r:?}");
        }
    }
}

fn cells_of(l: usize, classes: &[CellClass]) -> Vec<WeylElement> {
    let all = cell_classes(l);
    classes.iter().flat_map(|c| all[c].clone()).collect()
}

fn mf_default(t: &Twist) -> Vec<Section> {
    (0..t.gl().len()).map(|tau| t.intertwine(t.section_fv(tau, t.default_vector(tau)))).collect()
}

#[test]
fn all_cells_recover_the_full_integral() {
    let f = so4_3();
    let t = &f.twists[1];
    let fs = mf_default(t);
    let pis = cuspidal(f);
    let bs: Vec<&BesselFn> = pis.iter().map(|&p| &f.reps[p].bessel).collect();
    let spec = CellSumSpec { cells: cells_of(2, &all_classes(2)), torus: f.so.torus().to_vec() };
    let sums = cell_sums(t, &f.so, &bs, &fs, &spec, CellMeasure::Cosets).unwrap();
    for (i, &p) in pis.iter().enumerate() {
        let w = bessel_fn(f, p);
        for (j, s) in fs.iter().enumerate() {
            let z = t.zeta_top(&w, s).unwrap();
            assert!((sums[i][j] - z).norm() < 1e-8, "pi {p} tau {j}: {} vs {z}", sums[i][j]);
        }
    }
    let empty = CellSumSpec { cells: vec![], torus: f.so.torus().to_vec() };
    let zero = cell_sums(t, &f.so, &bs, &fs, &empty, CellMeasure::Cosets).unwrap();
    assert!(zero.iter().flatten().all(|z| *z == ZERO));
}

fn all_classes(l: usize) -> Vec<CellClass> {
    cell_classes(l).into_keys().collect()
}

/// The B_l^c part for pi equals the B_l part for c.pi, and the B_{l-1} part
/// over T_l equals the (B_pi + B_{c.pi}) part over A_l.
fn check_cell_lemmas(f: &Fixture) {
    let l = 2;
    let t = &f.twists[l - 1];
    let fs = mf_default(t);
    let torus = f.so.torus().to_vec();
    let top = CellSumSpec { cells: cells_of(l, &[CellClass::Top]), torus: torus.clone() };
    let conj = CellSumSpec { cells: cells_of(l, &[CellClass::TopConj]), torus };
    let (t_l, a_l) = torus_split(&f.so);
    let low_t = CellSumSpec { cells: cells_of(l, &[CellClass::Twist(l - 1)]), torus: t_l };
    let low_a = CellSumSpec { cells: low_t.cells.clone(), torus: a_l };
    for p in cuspidal(f) {
        let c = f.reps[p].partner.unwrap();
        let (bp, bc) = (&f.reps[p].bessel, &f.reps[c].bessel);
        let m = CellMeasure::Unipotent;
        let lhs = cell_sums(t, &f.so, &[bp], &fs, &conj, m).unwrap();
        let rhs = cell_sums(t, &f.so, &[bc], &fs, &top, m).unwrap();
        for (x, y) in lhs[0].iter().zip(&rhs[0]) {
            assert!((x - y).norm() < 1e-8, "pi {p}: {x} vs {y}");
        }
        let lhs = cell_sums(t, &f.so, &[bp], &fs, &low_t, m).unwrap();
        let rhs = cell_sums(t, &f.so, &[bp, bc], &fs, &low_a, m).unwrap();
        for (j, x) in lhs[0].iter().enumerate() {
            let y = rhs[0][j] + rhs[1][j];
            assert!((x - y).norm() < 1e-8, "pi {p}: {x} vs {y}");
        }
    }
}

#[test]
fn cell_lemmas_q3() {
    check_cell_lemmas(so4_3());
}

#[test]
fn cell_lemmas_q5() {
    check_cell_lemmas(so4_5());
    // at q = 5 the B_{l-1} identity is not vacuous
    let (t_l, a_l) = torus_split(&so4_5().so);
    assert!(!a_l.is_empty() && a_l.len() * 2 == t_l.len());
}

#[test]
fn lower_twist_formula_and_conjugate_agreement() {
    // For n < l: Psi(B, M f_v) is a GL(n) sum of B(t_n(a) t'_n w~_n) against
    // W*_v; equal gammas force B_pi = B_{c.pi} on those elements.
    let f = so4_3();
    let t = &f.twists[0];
    let q = 3;
    let tail = t_prime(2, 1, q).mul(&w_tilde_block(2, 1, q));
    for p in cuspidal(f) {
        let c = f.reps[p].partner.unwrap();
        let (bp, bc) = (bessel_fn(f, p), bessel_fn(f, c));
        for a in t.gl().group.elements() {
            let g = levi_even(2, a).mul(&tail);
            assert!((bp(&g) - bc(&g)).norm() < 1e-8);
        }
    }
}

