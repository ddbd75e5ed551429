mod common;

use common::*;
use lrs_pfsrc::model::{ModelKind, ProblemSpec, Regularization};
use lrs_pfsrc::solver::{
    resolve_eta, solve, update_a, update_e, update_t, update_z, Eta, SolverConfig, SolverState,
};
use rand::Rng;

fn random_problem(d: usize, s_c: usize, m: usize, seed: u64) -> (M, M, ProblemSpec, OracleParams) {
    let mut r = rng(seed);
    let x = uniform(d, s_c, &mut r);
    let y = uniform(d, m, &mut r);
    let reg = Regularization {
        lambda1: r.random_range(0.01..2.0),
        lambda2: r.random_range(0.01..2.0),
        delta: 0.09,
    };
    let mu1 = r.random_range(0.1..2.0);
    let mu2 = r.random_range(0.01..1.0);
    let p = ProblemSpec::new(x.clone(), y.clone(), ModelKind::LowRankSparse, reg).unwrap();
    let v = hcat(&x, &y);
    let eta = eta_oracle(&v, mu1, mu2);
    (
        v,
        x,
        p,
        OracleParams {
            lambda1: reg.lambda1,
            lambda2: reg.lambda2,
            mu1,
            mu2,
            eta,
        },
    )
}

fn config(o: &OracleParams) -> SolverConfig {
    SolverConfig {
        mu1: o.mu1,
        mu2: o.mu2,
        eta: Eta::Fixed(o.eta),
        ..SolverConfig::default()
    }
}

#[test]
fn auto_eta_matches_eigenvalue_oracle() {
    for seed in 0..20 {
        let (v, _, p, o) = random_problem(8, 3, 2, seed);
        let cfg = SolverConfig {
            mu1: o.mu1,
            mu2: o.mu2,
            ..SolverConfig::default()
        };
        let got = resolve_eta(&p, &cfg).unwrap();
        let want = eta_oracle(&v, o.mu1, o.mu2);
        assert!((got - want).abs() <= 1e-8 * want, "seed {seed}: {got} vs {want}");
    }
}

#[test]
fn single_updates_match_transcription_from_random_states() {
    for seed in 100..120 {
        let (v, x, p, o) = random_problem(6, 3, 1, seed);
        let mut r = rng(seed + 1000);
        let st = SolverState {
            z: uniform(4, 3, &mut r),
            a: uniform(4, 3, &mut r),
            e: uniform(6, 3, &mut r),
            t1: uniform(6, 3, &mut r),
            t2: uniform(4, 3, &mut r),
            k: 0,
        };
        let os = OracleState {
            z: st.z.clone(),
            a: st.a.clone(),
            e: st.e.clone(),
            t1: st.t1.clone(),
            t2: st.t2.clone(),
        };
        let want = oracle_step(&os, &v, &x, o);
        let cfg = config(&o);

        let mut lib = st.clone();
        lib.z = update_z(&lib, &p, &cfg).unwrap();
        assert!(frob(&lib.z, &want.z) <= 1e-10, "Z seed {seed}");
        let a = update_a(&lib, &p, &cfg).unwrap();
        let e = update_e(&lib, &p, &cfg).unwrap();
        assert!(frob(&a, &want.a) <= 1e-10, "A seed {seed}");
        assert!(frob(&e, &want.e) <= 1e-10, "E seed {seed}");
        lib.a = a;
        lib.e = e;
        let (t1, t2) = update_t(&lib, &p, &cfg).unwrap();
        assert!(frob(&t1, &want.t1) <= 1e-10, "T1 seed {seed}");
        assert!(frob(&t2, &want.t2) <= 1e-10, "T2 seed {seed}");
    }
}

#[test]
fn solver_iterates_match_transcription_from_zero() {
    for seed in 200..205 {
        let (v, x, p, o) = random_problem(8, 3, 2, seed);
        let mut os = OracleState {
            z: M::zeros(5, 3),
            a: M::zeros(5, 3),
            e: M::zeros(8, 3),
            t1: M::zeros(8, 3),
            t2: M::zeros(5, 3),
        };
        for k in 1..=6 {
            os = oracle_step(&os, &v, &x, o);
            let cfg = SolverConfig {
                max_iter: k,
                ..config(&o)
            };
            let sol = solve(&p, &cfg).unwrap();
            assert_eq!(sol.iterations, k);
            assert!(frob(&sol.z, &os.z) <= 1e-9, "seed {seed} iteration {k}");
            assert!(frob(&sol.a, &os.a) <= 1e-9);
            assert!(frob(&sol.e, &os.e) <= 1e-9);
        }
    }
}
