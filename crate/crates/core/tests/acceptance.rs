//! End-to-end acceptance checks. Runs as a plain binary so that every
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any FAIL.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clocknet::constructions::{
    check_circuit_matrix, family_13, full_clock_matrix, gim, zero_sum_circuit, universal_validate,
    validate_circuit_matrix,
};
use clocknet::factorization::{factorization_to_circuit, identity_factorization, verify_factorization, Verification};
use clocknet::network::{
    build_clock_digraph, check_solves, multiplier_map, verify_digraph_isomorphism, Circuit, TableCircuit,
};
use clocknet::search::{
    decide, linear_solvable, nonlinear_solvable_z2, solvability_table, SearchBudget,
};
use clocknet::{ClockSpec, IntMatrix, Method, MethodChoice, Modulus, Network, Support, Verdict};

type Check = fn() -> Result<(), String>;

fn sup(text: &str) -> Support {
    text.parse().expect("valid support")
}

fn s(x: u64) -> Modulus {
    Modulus::new(x).expect("valid modulus")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> Result<T, String> {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    ensure(took <= limit, || format!("{what} took {took:?}, limit {limit:?}"))?;
    Ok(out)
}

/// Grid for R = {1,3}, s ∈ {2,3}, n ∈ 4..=12; zero tolerance, under 5 s.
fn criterion_1() -> Result<(), String> {
    let table = timed(Duration::from_secs(5), "grid", || {
        solvability_table(&sup("1,3"), &[s(2), s(3)], 4..=12, &SearchBudget::default())
    })?
    .map_err(|e| e.to_string())?;
    let expected = "n,4,5,6,7,8,9,10,11,12\ns=2,✗,✗,✓,✓,✗,✓,✓,✗,✓\ns=3,✗,✗,✓,✗,✓,✓,✓,✓,✓\n";
    ensure(table.to_csv() == expected, || format!("grid was\n{}", table.to_csv()))
}

/// N_11({1,3}) not 2-solvable (≤ 10 min); N_7({1,3}) not linearly
/// 3-solvable and N_8({1,3}) not linearly 2-solvable (each < 1 s).
fn criterion_2() -> Result<(), String> {
    let b = SearchBudget::default();
    let nl = timed(Duration::from_secs(600), "exhaustive n=11", || nonlinear_solvable_z2(11, &sup("1,3")))?
        .map_err(|e| e.to_string())?;
    ensure(!nl, || "N_11({1,3}) reported 2-solvable".into())?;
    let l7 = timed(Duration::from_secs(1), "linear n=7 s=3", || linear_solvable(7, &sup("1,3"), s(3), &b))?
        .map_err(|e| e.to_string())?;
    ensure(!l7, || "N_7({1,3}) reported linearly 3-solvable".into())?;
    let l8 = timed(Duration::from_secs(1), "linear n=8 s=2", || linear_solvable(8, &sup("1,3"), s(2), &b))?
        .map_err(|e| e.to_string())?;
    ensure(!l8, || "N_8({1,3}) reported linearly 2-solvable".into())
}

/// Full clock matrices validate with final rows I_r: r ≤ 8, n ≤ 40, s ∈ 2..=6, under 30 s.
fn criterion_3() -> Result<(), String> {
    timed(Duration::from_secs(30), "full clock suite", || -> Result<(), String> {
        for r in 1..=8 {
            let support = Support::full(r).map_err(|e| e.to_string())?;
            for n in r..=40 {
                let m = full_clock_matrix(n, r).map_err(|e| e.to_string())?;
                for sv in 2..=6 {
                    let ok = validate_circuit_matrix(&m, &support, s(sv)).map_err(|e| e.to_string())?.is_some();
                    ensure(ok && m.tail_is_identity_mod(s(sv)), || format!("n={n} r={r} s={sv}"))?;
                }
            }
        }
        Ok(())
    })?
}

fn unit_det(m: &IntMatrix) -> Result<bool, String> {
    let d = m.det().map_err(|e| e.to_string())?;
    Ok(d == 1.into() || d == (-1).into())
}

/// |det| = 1 for top-left a×a blocks of gim(n,r) and r-row windows of the full clock matrix; n, r ≤ 40.
fn criterion_4() -> Result<(), String> {
    for n in 1..=40 {
        for r in 1..=40 {
            let g = gim(n, r).map_err(|e| e.to_string())?;
            for a in 1..=n.min(r) {
                ensure(unit_det(&g.submatrix(0, 0, a, a).map_err(|e| e.to_string())?)?, || {
                    format!("top-left {a}x{a} of gim({n},{r})")
                })?;
            }
            if n >= r {
                let m = full_clock_matrix(n, r).map_err(|e| e.to_string())?;
                for top in 0..=n {
                    let w = m.matrix().submatrix(top, 0, r, r).map_err(|e| e.to_string())?;
                    ensure(unit_det(&w)?, || format!("rows {}..{} of M({n},{r})", top + 1, top + r))?;
                }
            }
        }
    }
    Ok(())
}

/// Identity factorizations of length exactly n over Z, n ∈ 3r³..=3r³+2r, and
/// the circuit at n = 3r³ solves the network for s ∈ {2,3,5}; under 1 min.
fn criterion_5() -> Result<(), String> {
    timed(Duration::from_secs(60), "factorization suite", || -> Result<(), String> {
        for text in ["1,2", "1,3", "2,3", "3,4", "2,5"] {
            let support = sup(text);
            let r = support.max();
            let base = 3 * r * r * r;
            for n in base..=base + 2 * r {
                let f = identity_factorization(n, &support).map_err(|e| e.to_string())?;
                ensure(f.n() == n, || format!("R={text} n={n}: length {}", f.n()))?;
                let ok = verify_factorization(&f, Verification::Integer).map_err(|e| e.to_string())?;
                ensure(ok, || format!("R={text} n={n}: product is not I_r"))?;
                if n == base {
                    let net = Network::clock(&ClockSpec::new(n, support.clone()).map_err(|e| e.to_string())?);
                    for sv in [2, 3, 5] {
                        let c = factorization_to_circuit(&f, s(sv)).map_err(|e| e.to_string())?;
                        ensure(check_solves(&net, &c).map_err(|e| e.to_string())?, || {
                            format!("R={text} n={n} s={sv}: circuit does not solve")
                        })?;
                    }
                }
            }
        }
        Ok(())
    })?
}

/// The negated-sum circuit on N_7([2]) fails for s ∈ {2,3,5}.
fn criterion_6() -> Result<(), String> {
    let net = Network::clock(&ClockSpec::new(7, Support::full(2).unwrap()).unwrap());
    for sv in [2, 3, 5] {
        let c = zero_sum_circuit(7, 2, s(sv)).map_err(|e| e.to_string())?;
        ensure(!check_solves(&net, &c).map_err(|e| e.to_string())?, || format!("s={sv}: circuit solves"))?;
    }
    Ok(())
}

/// family_13(n) validates over Z and over Z_s, s ∈ 2..=7, for 12 ≤ n ≤ 30.
fn criterion_7() -> Result<(), String> {
    let support = sup("1,3");
    for n in 12..=30 {
        let m = family_13(n).map_err(|e| e.to_string())?;
        ensure(m.n() == n, || format!("n={n}: matrix has n={}", m.n()))?;
        let universal = universal_validate(&m, &support).map_err(|e| e.to_string())?;
        ensure(universal.is_some() && m.tail_is_identity(), || format!("n={n}: not universal"))?;
        for sv in 2..=7 {
            let ok = check_circuit_matrix(&m, &support, s(sv)).map_err(|e| e.to_string())?.is_valid();
            ensure(ok && m.tail_is_identity_mod(s(sv)), || format!("n={n} s={sv}: invalid"))?;
        }
    }
    Ok(())
}

/// For r ∈ {3,4,5}, n = r²-r-1: i ↦ (r-1)i is an isomorphism
/// G_clock(n,{1,r}) → G_clock(n,{1,r-1}); N_n({1,r}) is not linearly
/// s-solvable for s ∈ {2,3}; and not 2-solvable at all for r = 3.
fn criterion_8() -> Result<(), String> {
    let big = SearchBudget::unbounded_space();
    for r in 3..=5usize {
        let n = r * r - r - 1;
        let from = Support::new([1, r]).unwrap();
        let to = Support::new([1, r - 1]).unwrap();
        let map = multiplier_map(n, (r - 1) as i64).map_err(|e| e.to_string())?;
        let g1 = build_clock_digraph(n, &from).map_err(|e| e.to_string())?;
        let g2 = build_clock_digraph(n, &to).map_err(|e| e.to_string())?;
        let iso = verify_digraph_isomorphism(&g1, &g2, map.images()).map_err(|e| e.to_string())?;
        ensure(iso, || format!("r={r}: map is not an isomorphism"))?;
        for sv in [2, 3] {
            let solvable = linear_solvable(n, &from, s(sv), &big).map_err(|e| e.to_string())?;
            ensure(!solvable, || format!("r={r} n={n} s={sv}: linearly solvable"))?;
        }
    }
    let exhaustive = nonlinear_solvable_z2(5, &sup("1,3")).map_err(|e| e.to_string())?;
    ensure(!exhaustive, || "N_5({1,3}) reported 2-solvable".into())
}

/// All table circuits on N_n(R) over Z_2 for `n ≤ 5`, `r ≤ 2`.
fn enumerated_solvable(n: usize, support: &Support) -> bool {
    let spec = ClockSpec::new(n, support.clone()).unwrap();
    let net = Network::clock(&spec);
    let r = spec.r();
    let sizes: Vec<u32> = (r + 1..=n + r).map(|k| 1u32 << (1 << net.gamma(k).len())).collect();
    let mut choice = vec![0u32; n];
    loop {
        let tables: Vec<Vec<u64>> = (r + 1..=n + r)
            .zip(&choice)
            .map(|(k, &f)| (0..1usize << net.gamma(k).len()).map(|a| u64::from((f >> a) & 1)).collect())
            .collect();
        let c = TableCircuit::new(s(2), tables);
        debug_assert_eq!(c.modulus(), s(2));
        if check_solves(&net, &c).unwrap() {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            choice[i] += 1;
            if choice[i] < sizes[i] {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// The Z_2 oracle agrees with enumeration of every circuit for n ≤ 5, r ≤ 2.
fn criterion_9() -> Result<(), String> {
    let mut cases = 0;
    for text in ["1", "2", "1,2"] {
        let support = sup(text);
        for n in support.max()..=5 {
            let oracle = nonlinear_solvable_z2(n, &support).map_err(|e| e.to_string())?;
            let direct = enumerated_solvable(n, &support);
            ensure(oracle == direct, || format!("R={text} n={n}: oracle {oracle}, enumeration {direct}"))?;
            cases += 1;
        }
    }
    ensure(cases == 13, || format!("{cases} cases checked"))
}

/// R = {2,4}: odd n ≤ 13 rejected by the gcd lemma; even n agrees with (n/2, {1,2}).
fn criterion_10() -> Result<(), String> {
    let b = SearchBudget::default();
    let support = sup("2,4");
    for sv in [2, 3] {
        for n in 4..=13 {
            let spec = ClockSpec::new(n, support.clone()).unwrap();
            let d = decide(&spec, s(sv), MethodChoice::Linear, &b, false).map_err(|e| e.to_string())?;
            if n % 2 == 1 {
                ensure(d.method == Method::Gcd && d.verdict == Verdict::Unsolvable, || {
                    format!("n={n} s={sv}: {:?} by {:?}", d.verdict, d.method)
                })?;
            } else {
                let half = ClockSpec::new(n / 2, sup("1,2")).unwrap();
                let h = decide(&half, s(sv), MethodChoice::Linear, &b, false).map_err(|e| e.to_string())?;
                ensure(d.verdict == h.verdict, || format!("n={n} s={sv}: {:?} vs {:?}", d.verdict, h.verdict))?;
            }
            // The unreduced search must agree with the lemma path.
            let direct = linear_solvable(n, &support, s(sv), &SearchBudget::unbounded_space()).map_err(|e| e.to_string())?;
            ensure(direct == (d.verdict == Verdict::Solvable), || format!("n={n} s={sv}: direct search {direct}"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("solvability grid for R={1,3}, s in {2,3}, n in 4..12", criterion_1),
        ("non-solvability of N_11({1,3}), N_7({1,3}) mod 3, N_8({1,3}) mod 2", criterion_2),
        ("full clock matrices validate, r<=8, n<=40, s in 2..6", criterion_3),
        ("unimodular blocks and windows, n,r<=40", criterion_4),
        ("identity factorizations of exact length and their circuits", criterion_5),
        ("negated-sum circuit fails on N_7([2])", criterion_6),
        ("family_13 universal for 12<=n<=30", criterion_7),
        ("lower-bound example for r in {3,4,5}", criterion_8),
        ("Z_2 oracle agrees with circuit enumeration", criterion_9),
        ("gcd suite for R={2,4}", criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let took = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS criterion {:>2}: {name} ({took:.2}s)", idx + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name} ({took:.2}s): {why}", idx + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
