use super::*;
use crate::otproto::{
    bell_pair_instance, leaky_rotation_instance, no_encoding_instance, rotation_instance,
};
use crate::qhe::{
    scheme_by_name, scheme_correlated_pad, scheme_independent_qotp, scheme_trivial, SCHEME_NAMES,
};
use std::f64::consts::PI;

fn grid() -> Vec<f64> {
    (1..=8).map(|k| k as f64 * PI / 9.0).collect()
}

fn all_instances() -> Vec<ProtocolOneInstance> {
    let mut out = vec![bell_pair_instance(), no_encoding_instance()];
    for t in grid() {
        out.push(rotation_instance(t).unwrap());
        out.push(leaky_rotation_instance(t).unwrap());
    }
    out
}

#[test]
fn bell_pair_is_tight() {
    let r = certify_theorem2(&bell_pair_instance()).unwrap();
    assert!((r.p_a - 1.0).abs() < 1e-9);
    assert!((r.p_b - 0.5).abs() < 1e-9);
    assert!(r.delta.abs() < 1e-12);
    assert!((r.lhs - 2.0).abs() < 1e-6);
    assert!(r.holds);
    // δ = 0: the trace-distance bound holds without correction terms
    assert!(r.bob.trace_distance >= r.f - 1e-9);
}

// PGM on four pure states |ψ_x⟩ with Gram entries cos θ^{|x⊕x'|}: success ((1+|sin θ|)/2)².
#[test]
fn rotation_pgm_matches_closed_form() {
    for t in grid() {
        let r = alice_pgm_attack(&rotation_instance(t).unwrap()).unwrap();
        let want = ((1.0 + t.sin().abs()) / 2.0).powi(2);
        assert!(
            (r.report.success - want).abs() < 1e-9,
            "theta {t}: {} vs {want}",
            r.report.success
        );
        assert!(r.report.holds());
        assert!(r.report.success >= r.fidelity_sum_floor - 1e-9);
    }
}

#[test]
fn no_encoding_attacks() {
    let inst = no_encoding_instance();
    let a = alice_pgm_attack(&inst).unwrap();
    assert!((a.report.success - 0.25).abs() < 1e-9);
    assert!(a.report.bound <= 0.25);
    let fp = max_fidelity(&inst).unwrap();
    let b = bob_superposition_attack(&inst, fp.pair).unwrap();
    assert!(b.report.success >= 0.5 - 1e-12);
    assert!(certify_theorem2(&inst).unwrap().holds);
}

#[test]
fn theorem2_holds_on_every_instance() {
    for inst in all_instances() {
        let r = certify_theorem2(&inst).unwrap();
        assert!(r.holds, "{}", r.instance);
        assert!(r.p_a >= r.p_a_floor - 1e-6);
        assert!(r.p_b >= r.p_b_floor - 1e-6);
        assert!(r.lhs >= 2.0 - 1e-6);
        assert!(r.lhs_sharp <= r.lhs + 1e-12);
        assert_eq!(r.fidelity_complement.checked, r.delta <= 0.5);
    }
}

#[test]
fn fidelity_complement_bound_needs_small_delta() {
    let r = certify_theorem2(&rotation_instance(PI / 9.0).unwrap()).unwrap();
    assert!(!r.fidelity_complement.checked);
    assert!(r.fidelity_complement.value > r.fidelity_complement.bound);
    let r = certify_theorem2(&rotation_instance(4.0 * PI / 9.0).unwrap()).unwrap();
    assert!(r.fidelity_complement.checked && r.fidelity_complement.holds);
}

#[test]
fn superposition_attack_internals() {
    for inst in all_instances() {
        let fp = max_fidelity(&inst).unwrap();
        let b = bob_superposition_attack(&inst, fp.pair).unwrap();
        assert!((b.aligned_overlap - fp.f).abs() < 1e-9, "{}", inst.name());
        assert!((b.alice_accept - 1.0).abs() < 1e-9);
        assert!(b.trace_distance >= b.trace_distance_floor - 1e-6);
        assert!(b.cauchy_schwarz_gap <= 1e-12);
        assert!(b.cauchy_schwarz_delta_gap <= 1e-12);
        assert!((b.report.success - 0.5 * (1.0 + b.trace_distance)).abs() < 1e-9);
        assert!((0.0..=1.0).contains(&b.report.success));
    }
}

#[test]
fn superposition_attack_relabels_index_bits() {
    let inst = rotation_instance(PI / 3.0).unwrap();
    let first = bob_superposition_attack(&inst, ((0, 0), (1, 0))).unwrap();
    assert_eq!(first.differing_index, 0);
    let second = bob_superposition_attack(&inst, ((0, 0), (0, 1))).unwrap();
    assert_eq!(second.differing_index, 1);
    assert!((first.report.success - second.report.success).abs() < 1e-9);
    assert!(first.cauchy_schwarz_gap <= 1e-12);
    assert!(bob_superposition_attack(&inst, ((1, 1), (1, 1))).is_err());
}

#[test]
fn protocol4_bob_attack_values() {
    let cases = [
        (scheme_trivial(), 1.0, 1.0),
        (scheme_correlated_pad(), 1.0, 1.0),
        (scheme_independent_qotp(), 0.0, 0.5),
    ];
    for (s, eps_d, want) in cases {
        let r = bob_helstrom_attack_on_protocol4(&s, eps_d).unwrap();
        assert!((r.success - want).abs() < 1e-9, "{}", s.name());
        assert!((r.bound - 0.5 * (1.0 + eps_d)).abs() < 1e-12);
        assert!(r.holds());
    }
}

#[test]
fn corollary1_chain_on_every_scheme() {
    for name in SCHEME_NAMES {
        let c = certify_corollary1(&scheme_by_name(name).unwrap()).unwrap();
        assert!(c.holds, "{name}");
        assert_eq!(c.chain.len(), 3);
        assert!(c.chain.iter().all(|k| k.holds));
        assert!(c.lhs >= 0.5);
        assert!(c.p_a.success <= 0.5 + c.metrics.eps_c_ub + 1e-6);
    }
}

#[test]
fn report_json_fields() {
    let r = bob_helstrom_attack_on_protocol4(&scheme_trivial(), 1.0).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 5);
    for k in ["attack", "success", "bound", "slack", "witness"] {
        assert!(keys.contains(&k));
    }
}

#[test]
fn pgm_fidelity_floor_identical_states() {
    let s = crate::qstate::DensityState::maximally_mixed(RegisterShape::qubits(1));
    let f = pgm_fidelity_floor(&[s.clone(), s.clone(), s.clone(), s]).unwrap();
    assert!((f - (1.0 - 12.0 / 8.0)).abs() < 1e-9);
}
