use super::*;
use crate::channelzoo::choi;
use crate::matcore::trace_norm;
use proptest::prelude::*;

fn diag_state(diag: &[f64]) -> ComplexMatrix {
    ComplexMatrix::diag_real(diag)
}

#[test]
fn key_index_weights_first_component_least() {
    let k = Key::from_bits(&[1, 0, 0, 0]).unwrap();
    assert_eq!(k.index(), 1);
    assert_eq!(k.to_string(), "(1,0,0,0)");
    assert_eq!(Key::from_bits(&[0, 0, 1]).unwrap().index(), 4);
    assert!(Key::from_index(8, 3).is_err());
    assert!(Key::from_bits(&[2]).is_err());
    assert!(Key::from_index(0, 9).is_err());
    assert_eq!(Key::all(0).len(), 1);
}

proptest! {
    #[test]
    fn key_bits_roundtrip(len in 0usize..=8, raw in 0usize..256) {
        let index = raw % (1 << len);
        let k = Key::from_index(index, len).unwrap();
        prop_assert_eq!(Key::from_bits(&k.bits()).unwrap(), k);
    }
}

#[test]
fn key_gen_covers_key_space() {
    let s = scheme_correlated_pad();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = [false; 8];
    for _ in 0..400 {
        seen[s.key_gen(&mut rng).index()] = true;
    }
    assert!(seen.iter().all(|&b| b));
}

#[test]
fn scheme_shapes_and_names() {
    for name in SCHEME_NAMES {
        let s = scheme_by_name(name).unwrap();
        assert_eq!(s.name(), name);
        assert_eq!(s.family().len(), 4);
        assert_eq!(s.keys().len(), 1 << s.key_length());
        check_channels(&s).unwrap();
    }
    assert!(matches!(scheme_by_name("nope"), Err(Error::UnknownName(_))));
    assert_eq!(scheme_trivial().key_length(), 0);
    assert_eq!(scheme_correlated_pad().key_length(), 3);
    assert_eq!(scheme_independent_qotp().key_length(), 4);
}

#[test]
fn construction_rejects_bad_inputs() {
    let fam = scheme_trivial().family().to_vec();
    let id = KrausChannel::identity(RegisterShape::qubits(2));
    assert!(QheScheme::new("x", 1, vec![id.clone()], vec![id.clone()], fam.clone()).is_err());
    assert!(QheScheme::new("x", 0, vec![id.clone()], vec![id.clone()], vec![]).is_err());
    let mut dup = fam.clone();
    dup[1].label = dup[0].label.clone();
    assert!(QheScheme::new("x", 0, vec![id.clone()], vec![id.clone()], dup).is_err());
    let one = KrausChannel::identity(RegisterShape::qubits(1));
    assert!(matches!(
        QheScheme::new("x", 0, vec![one], vec![id], fam),
        Err(Error::Dimension(_))
    ));
}

#[test]
fn trivial_scheme_metrics() {
    let m = metrics(&scheme_trivial()).unwrap();
    assert!(m.eps.abs() < 1e-9);
    assert!((m.eps_d - 1.0).abs() < 1e-9);
    assert_eq!(m.provenance.eps_d.input.as_deref(), Some("|0,0> vs |1,0>"));
    assert!(m.eps_c_ub.abs() < 1e-9);
    assert!(m.corollary1.holds);
    assert!((m.corollary1.lhs - 1.0).abs() < 1e-9);
}

// Maps are equal iff their Choi states are; checks every key and channel.
#[test]
fn correlated_pad_is_exactly_correct() {
    let s = scheme_correlated_pad();
    for member in s.family() {
        let ideal = choi(&member.ideal);
        for k in s.keys() {
            let actual = choi(&s.pipeline(member, k));
            assert!(
                actual.mat().max_abs_diff(ideal.mat()) < 1e-12,
                "{} {k}",
                member.label
            );
        }
    }
    assert!(correctness_eps(&s).unwrap().value <= 1e-9);
}

#[test]
fn correlated_pad_leaks_parity() {
    let s = scheme_correlated_pad();
    let a = s
        .averaged_ciphertext(&DensityState::basis(RegisterShape::qubits(2), 0).unwrap())
        .unwrap();
    let b = s
        .averaged_ciphertext(&DensityState::basis(RegisterShape::qubits(2), 2).unwrap())
        .unwrap();
    // even parity on {|00>,|11>}, odd parity on {|01>,|10>}
    assert!(a.mat().max_abs_diff(&diag_state(&[0.5, 0.0, 0.0, 0.5])) < 1e-12);
    assert!(b.mat().max_abs_diff(&diag_state(&[0.0, 0.5, 0.5, 0.0])) < 1e-12);
    assert!((a.mat() * b.mat()).max_abs() < 1e-12);
    let d = data_privacy_eps(&s).unwrap();
    assert!((d.value - 1.0).abs() < 1e-9);
    assert_eq!(d.witness.input.as_deref(), Some("|0,0> vs |1,0>"));
}

#[test]
fn qotp_averages_are_maximally_mixed() {
    let s = scheme_independent_qotp();
    let target = ComplexMatrix::identity(4).scale_real(0.25);
    for (_, psi) in two_qubit_labelled_states()
        .into_iter()
        .map(|(l, v)| (l, PureState::new(v, RegisterShape::qubits(2)).unwrap()))
    {
        let avg = s.averaged_ciphertext(&psi.density()).unwrap();
        assert!(avg.mat().max_abs_diff(&target) < 1e-12);
    }
    assert!(data_privacy_eps(&s).unwrap().value <= 1e-9);
}

#[test]
fn qotp_correctness_witness() {
    let s = scheme_independent_qotp();
    let k = Key::from_bits(&[1, 0, 0, 0]).unwrap();
    let member = s.sot_member(0, 1).unwrap();
    let input = DensityState::basis(RegisterShape::qubits(2), 0).unwrap();
    let got = s.pipeline(member, k).apply_matrix(input.mat());
    // Enc gives |1,0>, F(0,1) then yields I/2 ⊗ |1>; ideal is I/2 ⊗ |0>
    assert!(got.max_abs_diff(&diag_state(&[0.0, 0.5, 0.0, 0.5])) < 1e-12);
    let ideal = member.ideal.apply_matrix(input.mat());
    assert!(ideal.max_abs_diff(&diag_state(&[0.5, 0.0, 0.5, 0.0])) < 1e-12);
    assert!((0.5 * trace_norm(&(&got - &ideal)) - 1.0).abs() < 1e-12);

    let eps = correctness_eps(&s).unwrap();
    assert!((eps.value - 1.0).abs() < 1e-9);
    assert_eq!(eps.witness.key.as_deref(), Some("(1,0,0,0)"));
    assert_eq!(eps.witness.channel.as_deref(), Some("F(0,1)"));
    assert_eq!(eps.witness.input.as_deref(), Some("|0,0>"));
}

#[test]
fn qotp_metrics_tuple() {
    let m = metrics(&scheme_independent_qotp()).unwrap();
    assert!((m.eps - 1.0).abs() < 1e-9);
    assert!(m.eps_d.abs() < 1e-9);
    assert!(m.corollary1.holds);
    assert!(m.corollary1.lhs >= 4.0 - 1e-9);
}

#[test]
fn corollary2_witness_gives_one_half_for_every_scheme() {
    let (psi, povm) = corollary2_witness();
    for name in SCHEME_NAMES {
        let v = circuit_privacy_ub(&scheme_by_name(name).unwrap(), &psi, &povm).unwrap();
        assert!((v - 0.5).abs() < 1e-9, "{name}: {v}");
    }
}

#[test]
fn uniform_povm_gives_three_quarters() {
    for name in SCHEME_NAMES {
        let s = scheme_by_name(name).unwrap();
        let (psi, povm) = uniform_witness(&s);
        assert!((circuit_privacy_ub(&s, &psi, &povm).unwrap() - 0.75).abs() < 1e-9);
    }
}

#[test]
fn identity_family_singleton_povm_gives_zero() {
    let id = KrausChannel::identity(RegisterShape::qubits(2));
    let fam = vec![FamilyMember {
        label: "id".into(),
        sot: None,
        ideal: id.clone(),
        evaluated: id.clone(),
    }];
    let s = QheScheme::new("id", 0, vec![id.clone()], vec![id], fam).unwrap();
    let povm = Povm::new(
        vec![("id".to_string(), ComplexMatrix::identity(4))],
        RegisterShape::qubits(2),
    )
    .unwrap();
    let psi = PureState::basis(RegisterShape::qubits(2), 1).unwrap();
    assert!(circuit_privacy_ub(&s, &psi, &povm).unwrap().abs() < 1e-12);
    assert!(circuit_privacy_ub_search(&s).unwrap().value.abs() < 1e-12);
}

#[test]
fn povm_keys_must_match_family() {
    let s = scheme_trivial();
    let povm = Povm::new(
        vec![("other".to_string(), ComplexMatrix::identity(16))],
        RegisterShape::qubits(4),
    )
    .unwrap();
    let (psi, _) = corollary2_witness();
    assert!(matches!(
        circuit_privacy_ub(&s, &psi, &povm),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn trivial_attack_on_basis_probe_gains_nothing() {
    let s = scheme_trivial();
    let psi = PureState::basis(RegisterShape::qubits(4), 0).unwrap();
    assert!((sot_pgm_success(&s, &psi).unwrap() - 0.5).abs() < 1e-9);
    assert!(circuit_privacy_lb(&s, &psi).unwrap().abs() < 1e-9);
}

#[test]
fn lower_bounds_are_probabilities_and_below_upper() {
    for name in SCHEME_NAMES {
        let s = scheme_by_name(name).unwrap();
        let ub = circuit_privacy_ub_search(&s).unwrap().value;
        for (label, psi) in attack_probes(&s).unwrap() {
            let lb = circuit_privacy_lb(&s, &psi).unwrap();
            assert!((0.0..=0.75 + 1e-12).contains(&lb), "{name} {label}");
            assert!(lb <= ub + 1e-9, "{name} {label}: {lb} > {ub}");
        }
    }
}

#[test]
fn correlated_pad_bell_probe_consistent() {
    let s = scheme_correlated_pad();
    let (_, psi) = attack_probes(&s)
        .unwrap()
        .into_iter()
        .find(|(l, _)| l == "Bell probe on cipher qubit 1")
        .unwrap();
    let lb = circuit_privacy_lb(&s, &psi).unwrap();
    assert!(lb >= 0.0 && lb <= circuit_privacy_ub_search(&s).unwrap().value + 1e-9);
}

#[test]
fn data_privacy_symmetric_and_key_relabel_invariant() {
    let s = scheme_correlated_pad();
    for ((_, a), (_, b)) in privacy_pairs().into_iter().take(12) {
        let ea = s.averaged_ciphertext(&a.density()).unwrap();
        let eb = s.averaged_ciphertext(&b.density()).unwrap();
        assert_eq!(
            trace_distance(&ea, &eb).unwrap(),
            trace_distance(&eb, &ea).unwrap()
        );
    }
    let mut relabelled = s.clone();
    let perm = [5usize, 2, 7, 0, 3, 6, 1, 4];
    relabelled.enc = perm.iter().map(|&i| s.enc[i].clone()).collect();
    relabelled.dec = perm.iter().map(|&i| s.dec[i].clone()).collect();
    let q = scheme_independent_qotp();
    let mut rq = q.clone();
    rq.enc.reverse();
    rq.dec.reverse();
    assert!(
        (data_privacy_eps(&s).unwrap().value - data_privacy_eps(&relabelled).unwrap().value).abs()
            < 1e-12
    );
    assert!(
        (data_privacy_eps(&q).unwrap().value - data_privacy_eps(&rq).unwrap().value).abs() < 1e-12
    );
}

#[test]
fn metrics_are_reproducible() {
    let s = scheme_correlated_pad();
    let a = serde_json::to_string(&metrics(&s).unwrap()).unwrap();
    let b = serde_json::to_string(&metrics(&s).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn corollary1_holds_for_every_scheme() {
    for name in SCHEME_NAMES {
        let m = metrics(&scheme_by_name(name).unwrap()).unwrap();
        assert!(m.eps_c_lb <= m.eps_c_ub + 1e-9);
        assert!(
            m.eps_d + m.eps_c_ub + 4.0 * m.eps.sqrt() >= 0.5 - 1e-9,
            "{name}"
        );
        for v in [m.eps, m.eps_d, m.eps_c_lb, m.eps_c_ub] {
            assert!((0.0..=1.0).contains(&v));
        }
    }
}

#[test]
fn candidate_sets_have_documented_sizes() {
    assert_eq!(
        correctness_inputs().len(),
        8 + 1 + RANDOM_CORRECTNESS_INPUTS
    );
    assert_eq!(privacy_pairs().len(), 28 + RANDOM_PRIVACY_PAIRS);
    assert_eq!(privacy_pairs()[0].0 .0, "|0,0>");
    assert_eq!(privacy_pairs()[0].1 .0, "|1,0>");
}
