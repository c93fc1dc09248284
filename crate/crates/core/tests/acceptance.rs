//! Acceptance criteria for the core library. Prints one line per criterion
//! and exits nonzero if any criterion fails or runs over its time limit.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use scissors_core::bloch::BlochField;
use scissors_core::quad_ring::RingDesc;
use scissors_core::suites::{local_global_trial, run_suite};
use scissors_core::zmodkit::{FPModule, Hnf, Structure};
use scissors_core::Result;

const SEED: u64 = 20_240_601;

fn scaled(v: &[BigInt], k: i64) -> Vec<BigInt> {
    v.iter().map(|x| x * k).collect()
}

/// The subgroup generated by `elems`, as a lattice containing the relations.
fn span_mod(m: &FPModule, elems: impl IntoIterator<Item = Vec<BigInt>>) -> Result<Hnf> {
    let rels: Vec<Vec<BigInt>> = m.relations().rows().map(|r| r.to_vec()).collect();
    Hnf::from_rows(m.ngens(), elems.into_iter().chain(rels))
}

fn small_fields() -> Result<bool> {
    let f2 = BlochField::new(2)?;
    let order3 = f2.prebloch().structure() == Structure::from_factors(&[3]);

    let f3 = BlochField::new(3)?;
    let p = f3.prebloch();
    let m1 = f3.p_symbol(&f3.field().one().neg())?;
    let cyclic4 = p.structure() == Structure::from_factors(&[4]);
    let generates = !p.element_equal(&scaled(&m1, 2), &p.zero_vector())?;

    let b = f3.bloch_group()?;
    let b_order2 = b.module.structure() == Structure::from_factors(&[2]);
    let image = span_mod(&p, b.embedding.rows().map(|r| r.to_vec()))?;
    let expect = span_mod(&p, [scaled(&m1, 2)])?;
    Ok(order3 && cyclic4 && generates && b_order2 && image.same_lattice(&expect))
}

fn refined_f3() -> Result<bool> {
    let f = BlochField::new(3)?;
    let rp = f.refined();
    let psi = f.psi1(&f.field().one().neg())?;
    let two_torsion = rp.element_equal(&scaled(&psi, 2), &rp.zero_vector())?;
    let nonzero = !rp.element_equal(&psi, &rp.zero_vector())?;

    let rb = f.rb()?;
    let (lambda, target) = f.lambda()?;
    let in_kernel = target.element_equal(&lambda.apply_row(&psi)?, &target.zero_vector())?;
    let image = span_mod(&rp, rb.embedding.rows().map(|r| r.to_vec()))?;
    let expect = span_mod(&rp, [psi])?;
    Ok(two_torsion && nonzero && in_kernel && image.same_lattice(&expect))
}

fn c_constant() -> Result<bool> {
    for q in [5u64, 7, 9, 11, 13] {
        let f = BlochField::new(q)?;
        let prep = f.refined().prepare();
        let c = f.rp_c()?;
        for x in f.p_elements() {
            if !prep.equal(&f.c_elem(&x)?, &c)? {
                println!("  q = {q}: C({x}) differs");
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn odd_rp1() -> Result<bool> {
    let mut ok = true;
    for q in [5u64, 7, 9, 11, 13] {
        let f = BlochField::new(q)?;
        let a = f.rp1()?.module.odd_part();
        let b = f.eplus_rp_tilde()?.module.odd_part();
        if a != b {
            println!("  q = {q}: {a} vs {b}");
            ok = false;
        }
    }
    Ok(ok)
}

fn suites(names: &[&str], samples: usize) -> Result<bool> {
    let mut ok = true;
    for name in names {
        for ring in RingDesc::all() {
            let out = run_suite(name, ring, samples, SEED).expect("registered suite")?;
            if !out.passed() {
                println!("  {name} m = {}: {} of {} failed: {:?}", ring.m(), out.failures, out.checks, out.notes);
                ok = false;
            }
        }
    }
    Ok(ok)
}

fn local_global() -> Result<bool> {
    let mut ok = true;
    for i in 0..200 {
        let k = 1 + (i % 2) as usize;
        if !local_global_trial(k, SEED, i)?.agree() {
            println!("  trial {i} (k = {k}) disagrees");
            ok = false;
        }
    }
    Ok(ok)
}

type Check = fn() -> Result<bool>;

fn main() -> ExitCode {
    let criteria: [(&str, u64, Check); 11] = [
        ("P(F_2), P(F_3) and B(F_3)", 1, small_fields),
        ("RP(F_3) and RB(F_3)", 1, refined_f3),
        ("C(x) is constant", 30, c_constant),
        ("odd(RP_1) = odd(e+ RP~)", 60, odd_rp1),
        ("euclidean division", 5, || suites(&["euclid"], 1000)),
        ("shift lattices", 10, || suites(&["shift_lattice"], 100)),
        ("covering", 30, || suites(&["covering_four", "covering_three"], 50)),
        ("reduction certificates", 300, || suites(&["reduce_to_zero"], 100)),
        ("five-term specialization", 300, || suites(&["specialize"], 500)),
        ("local-global agreement", 60, local_global),
        ("local factors", 60, || suites(&["local_factors"], 20)),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let pass = matches!(result, Ok(true)) && in_time;
        let detail = match &result {
            Err(e) => format!(", error: {e}"),
            Ok(_) if !in_time => format!(", over the {limit} s limit"),
            Ok(_) => String::new(),
        };
        println!(
            "criterion {:>2}: {} {name} ({:.2} s{detail})",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        failed += usize::from(!pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
