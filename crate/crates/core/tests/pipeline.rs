use scissors_core::bloch::{find_group, golden_structure, BlochField};
use scissors_core::characters::Character;
use scissors_core::quad_field::{parse_field_elem, ProjPoint, Valuation};
use scissors_core::quad_ring::{parse_quad, RingDesc};
use scissors_core::rewrite::{check_certificate, reduce_to_zero, Certificate, Claim, Specializer};
use scissors_core::suites::{registry, run_suite};

#[test]
fn certificates_survive_json() {
    for ring in RingDesc::all() {
        let primes = ring.primes_up_to(30);
        let chi = Character::new(ring, [primes[0].clone(), primes[1].clone()], 1).unwrap();
        for x in ["7", "1/3", "2+1*w", "inf", "0", "1"] {
            let cert = reduce_to_zero(&ProjPoint::parse(ring, x).unwrap(), &chi).unwrap();
            assert_eq!(cert.claim, Claim::Zero);
            let back = Certificate::from_json(&cert.to_json()).unwrap();
            assert!(check_certificate(&back).valid, "m={} x={x}", ring.m());
        }
    }
}

#[test]
fn truncated_certificate_fails() {
    let ring = RingDesc::new(7).unwrap();
    let chi = Character::parse(ring, "1*w,3", 1).unwrap();
    let mut cert = reduce_to_zero(&ProjPoint::parse(ring, "40+17*w").unwrap(), &chi).unwrap();
    let n = cert.moves.len();
    cert.moves.pop();
    let rep = check_certificate(&cert);
    assert!(!rep.valid);
    assert_eq!(rep.failed_at, Some(n - 1));
}

#[test]
fn specialization_of_units_lands_in_residue_field() {
    let ring = RingDesc::new(2).unwrap();
    let v = Valuation::new(&parse_quad(ring, "3+1*w").unwrap()).unwrap();
    let s = Specializer::new(&v).unwrap();
    assert_eq!(s.bloch().q(), 11);
    let x = parse_field_elem(ring, "5").unwrap();
    let direct = s.bloch().p_symbol(&v.reduce_mod(&x).unwrap()).unwrap();
    assert_eq!(s.specialize(&ProjPoint::Finite(x)).unwrap(), direct);
}

#[test]
fn every_group_matches_its_frozen_structure() {
    for q in [2u64, 3, 4, 5, 7, 9, 11, 13] {
        let f = BlochField::new(q).unwrap();
        for name in ["P", "B", "RP", "RB"] {
            let expect = golden_structure(q, name).unwrap();
            assert_eq!(find_group(name).unwrap().build(&f).unwrap().module.structure(), expect, "q={q} {name}");
        }
    }
}

#[test]
fn all_suites_pass_on_small_samples() {
    for ring in RingDesc::all() {
        for suite in registry() {
            let out = run_suite(suite.name(), ring, 4, 11).unwrap().unwrap();
            assert!(out.passed(), "{} m={}: {:?}", suite.name(), ring.m(), out.notes);
        }
    }
}
