use super::random;
use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_1_SQRT_2;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn qubit(v: [C64; 2]) -> PureState {
    PureState::new(v.to_vec(), RegisterShape::qubits(1)).unwrap()
}

fn ket0() -> PureState {
    qubit([c(1.0, 0.0), c(0.0, 0.0)])
}

fn ket1() -> PureState {
    qubit([c(0.0, 0.0), c(1.0, 0.0)])
}

fn plus() -> PureState {
    qubit([c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)])
}

fn pauli(name: char) -> ComplexMatrix {
    match name {
        'I' => ComplexMatrix::identity(2),
        'X' => ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap(),
        'Z' => ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap(),
        _ => ComplexMatrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap(),
    }
}

fn uniform_channel(names: &[char]) -> KrausChannel {
    let w = 1.0 / (names.len() as f64).sqrt();
    KrausChannel::new(
        names.iter().map(|&n| pauli(n).scale_real(w)).collect(),
        RegisterShape::qubits(1),
        RegisterShape::qubits(1),
    )
    .unwrap()
}

fn mixed_half() -> DensityState {
    DensityState::maximally_mixed(RegisterShape::qubits(1))
}

#[test]
fn density_state_validation() {
    let shape = RegisterShape::qubits(1);
    assert!(DensityState::new(ComplexMatrix::diag_real(&[0.5, 0.5]), shape.clone()).is_ok());
    assert!(matches!(
        DensityState::new(ComplexMatrix::diag_real(&[1.5, -0.5]), shape.clone()),
        Err(Error::NotPsd(_))
    ));
    assert!(DensityState::new(ComplexMatrix::diag_real(&[0.5, 0.4]), shape.clone()).is_err());
    let skew = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
    assert!(matches!(
        DensityState::new(skew, shape.clone()),
        Err(Error::NotHermitian(_))
    ));
    assert!(DensityState::new(ComplexMatrix::identity(4).scale_real(0.25), shape).is_err());
}

#[test]
fn pure_state_validation() {
    assert!(PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)], RegisterShape::qubits(1)).is_err());
    let s =
        PureState::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)], RegisterShape::qubits(1)).unwrap();
    assert!((s.overlap(&plus()).norm() - 1.0).abs() < 1e-15);
}

#[test]
fn channel_examples() {
    let rho = random::density_state(
        RegisterShape::qubits(2),
        3,
        &mut ChaCha8Rng::seed_from_u64(1),
    );
    let id = KrausChannel::identity(RegisterShape::qubits(1));
    let out = apply_channel(&id, &rho, &[1]).unwrap();
    assert!(out.mat().max_abs_diff(rho.mat()) < 1e-15);

    let depol = uniform_channel(&['I', 'Z', 'X', 'Y']);
    let out = apply_channel(&depol, &ket0().density(), &[0]).unwrap();
    assert!(out.mat().max_abs_diff(mixed_half().mat()) < 1e-15);

    let dephase = uniform_channel(&['I', 'Z']);
    let out = apply_channel(&dephase, &plus().density(), &[0]).unwrap();
    assert!(out.mat().max_abs_diff(mixed_half().mat()) < 1e-15);
}

#[test]
fn channel_validation() {
    let bad = KrausChannel::new(
        vec![pauli('X'), pauli('Z')],
        RegisterShape::qubits(1),
        RegisterShape::qubits(1),
    );
    assert!(matches!(bad, Err(Error::InvalidChannel(_))));
    let ch = uniform_channel(&['I', 'Z']);
    let rho = DensityState::maximally_mixed(RegisterShape::new(vec![3]).unwrap());
    assert!(matches!(
        apply_channel(&ch, &rho, &[0]),
        Err(Error::Dimension(_))
    ));
}

#[test]
fn channel_on_non_contiguous_registers() {
    // X on register 2 of |000> must give |001>.
    let x = KrausChannel::unitary(pauli('X'), RegisterShape::qubits(1)).unwrap();
    let rho = DensityState::basis(RegisterShape::qubits(3), 0).unwrap();
    let out = apply_channel(&x, &rho, &[2]).unwrap();
    assert!(
        out.mat().max_abs_diff(
            DensityState::basis(RegisterShape::qubits(3), 1)
                .unwrap()
                .mat()
        ) < 1e-15
    );
}

#[test]
fn trace_distance_examples() {
    let r = random::density_state(
        RegisterShape::qubits(1),
        2,
        &mut ChaCha8Rng::seed_from_u64(2),
    );
    assert!(trace_distance(&r, &r).unwrap() < 1e-15);
    assert!((trace_distance(&ket0().density(), &ket1().density()).unwrap() - 1.0).abs() < 1e-15);
    let closed = (1.0 - ket0().overlap(&plus()).norm_sqr()).sqrt();
    let d = trace_distance(&ket0().density(), &plus().density()).unwrap();
    assert!((d - closed).abs() < 1e-14);
    assert!((d - FRAC_1_SQRT_2).abs() < 1e-14);
    assert!(trace_distance(
        &ket0().density(),
        &DensityState::maximally_mixed(RegisterShape::qubits(2))
    )
    .is_err());
}

#[test]
fn fidelity_examples() {
    let r = random::density_state(
        RegisterShape::qubits(2),
        4,
        &mut ChaCha8Rng::seed_from_u64(3),
    );
    assert!((fidelity(&r, &r).unwrap() - 1.0).abs() < 1e-12);
    assert!(fidelity(&ket0().density(), &ket1().density()).unwrap() < 1e-15);
    let closed = (ket0().density().mat()[(0, 0)].re * 0.5).sqrt();
    let f = fidelity(&mixed_half(), &ket0().density()).unwrap();
    assert!((f - closed).abs() < 1e-14);
    assert!((f - FRAC_1_SQRT_2).abs() < 1e-14);
}

#[test]
fn fidelity_of_pure_states_is_overlap_modulus() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let a = random::pure_state(RegisterShape::qubits(2), &mut rng);
        let b = random::pure_state(RegisterShape::qubits(2), &mut rng);
        let f = fidelity(&a.density(), &b.density()).unwrap();
        assert!((f - a.overlap(&b).norm()).abs() < 1e-12);
    }
}

#[test]
fn purify_examples() {
    let p = purify(&ket0().density());
    assert_eq!(p.shape().dims(), &[2, 1]);
    assert!((p.vec()[0].norm() - 1.0).abs() < 1e-15);

    let p = purify(&mixed_half());
    assert_eq!(p.shape().dims(), &[2, 2]);
    let m = p.marginal(&[0]).unwrap();
    assert!(m.mat().max_abs_diff(mixed_half().mat()) < 1e-15);
    // maximally entangled: the reference marginal is also maximally mixed
    assert!(
        p.marginal(&[1])
            .unwrap()
            .mat()
            .max_abs_diff(mixed_half().mat())
            < 1e-15
    );

    let rho = DensityState::new(
        ComplexMatrix::diag_real(&[0.75, 0.25]),
        RegisterShape::qubits(1),
    )
    .unwrap();
    let p = purify(&rho);
    let expected = [
        c(0.75f64.sqrt(), 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.5, 0.0),
    ];
    for (x, y) in p.vec().iter().zip(expected) {
        assert!((x.norm() - y.norm()).abs() < 1e-12);
    }
    assert!(p.marginal(&[0]).unwrap().mat().max_abs_diff(rho.mat()) <= 1e-9);
}

#[test]
fn uhlmann_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let phi = random::pure_state(RegisterShape::qubits(2), &mut rng);
    let u = uhlmann_unitary(&phi, &phi, &[1]).unwrap();
    assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);

    let v = random::unitary(2, &mut rng);
    let phi2 = phi.apply(&v, &[1], &[2]).unwrap();
    let u = uhlmann_unitary(&phi, &phi2, &[1]).unwrap();
    let aligned = phi.apply(&u, &[1], &[2]).unwrap();
    assert!((phi2.overlap(&aligned) - c(1.0, 0.0)).norm() < 1e-12);

    // two purifications of the same marginal with independent references
    let rho = random::density_state(RegisterShape::qubits(1), 2, &mut rng);
    let p1 = purify(&rho);
    let w = random::unitary(2, &mut rng);
    let p2 = p1.apply(&w, &[1], &[2]).unwrap();
    let u = uhlmann_unitary(&p1, &p2, &[1]).unwrap();
    let overlap = p2.overlap(&p1.apply(&u, &[1], &[2]).unwrap()).norm();
    assert!((overlap - fidelity(&rho, &rho).unwrap()).abs() <= 1e-8);
}

#[test]
fn uhlmann_rejects_bad_subsets() {
    let phi = random::pure_state(RegisterShape::qubits(2), &mut ChaCha8Rng::seed_from_u64(7));
    assert!(uhlmann_unitary(&phi, &phi, &[]).is_err());
    assert!(uhlmann_unitary(&phi, &phi, &[0, 1]).is_err());
    let other = random::pure_state(
        RegisterShape::new(vec![4]).unwrap(),
        &mut ChaCha8Rng::seed_from_u64(7),
    );
    assert!(uhlmann_unitary(&phi, &other, &[1]).is_err());
}

#[test]
fn helstrom_examples() {
    let r = random::density_state(
        RegisterShape::qubits(1),
        2,
        &mut ChaCha8Rng::seed_from_u64(8),
    );
    assert!((helstrom(&r, &r).unwrap().success - 0.5).abs() < 1e-15);
    assert!(
        (helstrom(&ket0().density(), &ket1().density())
            .unwrap()
            .success
            - 1.0)
            .abs()
            < 1e-15
    );
    let d = trace_distance(&ket0().density(), &plus().density()).unwrap();
    let h = helstrom(&ket0().density(), &plus().density()).unwrap();
    assert!((h.success - 0.5 * (1.0 + d)).abs() < 1e-14);
    assert!((h.success - 0.853_553_390_593_273_8).abs() < 1e-12);
    let p = measure(&h.povm, &ket0().density()).unwrap();
    let q = measure(&h.povm, &plus().density()).unwrap();
    assert!((0.5 * (p[&0] + q[&1]) - h.success).abs() < 1e-12);
}

#[test]
fn pgm_examples() {
    let shape = RegisterShape::qubits(2);
    let basis: Vec<(f64, DensityState)> = (0..4)
        .map(|i| (0.25, DensityState::basis(shape.clone(), i).unwrap()))
        .collect();
    assert!((pgm(&basis).unwrap().success - 1.0).abs() < 1e-14);
    let same: Vec<(f64, DensityState)> = (0..4).map(|_| (0.25, basis[1].1.clone())).collect();
    let p = pgm(&same).unwrap();
    assert!((p.success - 0.25).abs() < 1e-14);
    let null = p.povm.get(&PgmOutcome::Null).unwrap();
    assert!((null.trace().re - 3.0).abs() < 1e-12);
    assert!(pgm(&[]).is_err());
}

#[test]
fn pgm_bound_on_random_ensembles() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..20 {
        let shape = RegisterShape::qubits(if k % 2 == 0 { 2 } else { 3 });
        let states: Vec<DensityState> = (0..4)
            .map(|_| {
                let rank = rng.random_range(1..=shape.total());
                random::density_state(shape.clone(), rank, &mut rng)
            })
            .collect();
        let ens: Vec<(f64, DensityState)> = states.iter().map(|s| (0.25, s.clone())).collect();
        let p = pgm(&ens).unwrap();
        let mut fsum = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    fsum += fidelity(&states[i], &states[j]).unwrap();
                }
            }
        }
        assert!(p.success >= 1.0 - fsum / 8.0 - 1e-9);
    }
}

#[test]
fn measure_examples() {
    let comp = Povm::new(
        vec![
            (0u8, ComplexMatrix::diag_real(&[1.0, 0.0])),
            (1u8, ComplexMatrix::diag_real(&[0.0, 1.0])),
        ],
        RegisterShape::qubits(1),
    )
    .unwrap();
    let p = measure(&comp, &ket0().density()).unwrap();
    assert_eq!((p[&0], p[&1]), (1.0, 0.0));
    let p = measure(&comp, &mixed_half()).unwrap();
    assert!((p[&0] - 0.5).abs() < 1e-15 && (p[&1] - 0.5).abs() < 1e-15);

    // {I ⊗ ½|x0⟩⟨x0|} on (I/2) ⊗ |0⟩⟨0|
    let shape = RegisterShape::qubits(2);
    let elements: Vec<((u8, u8), ComplexMatrix)> = [(0u8, 0u8), (0, 1), (1, 0), (1, 1)]
        .iter()
        .map(|&(x0, x1)| {
            let proj = if x0 == 0 { [0.5, 0.0] } else { [0.0, 0.5] };
            (
                (x0, x1),
                kron(
                    &ComplexMatrix::identity(2),
                    &ComplexMatrix::diag_real(&proj),
                ),
            )
        })
        .collect();
    let m = Povm::new(elements, shape).unwrap();
    let p = measure(&m, &mixed_half().tensor(&ket0().density())).unwrap();
    assert!((p[&(0, 0)] - 0.5).abs() < 1e-15 && (p[&(0, 1)] - 0.5).abs() < 1e-15);
    assert_eq!(p[&(1, 0)], 0.0);
}

#[test]
fn povm_validation() {
    let shape = RegisterShape::qubits(1);
    let incomplete = Povm::new(
        vec![(0u8, ComplexMatrix::diag_real(&[1.0, 0.0]))],
        shape.clone(),
    );
    assert!(matches!(incomplete, Err(Error::InvalidPovm(_))));
    let negative = Povm::new(
        vec![
            (0u8, ComplexMatrix::diag_real(&[1.5, 0.5])),
            (1u8, ComplexMatrix::diag_real(&[-0.5, 0.5])),
        ],
        shape.clone(),
    );
    assert!(matches!(negative, Err(Error::InvalidPovm(_))));
    let dup = Povm::new(
        vec![
            (0u8, ComplexMatrix::diag_real(&[1.0, 0.0])),
            (0u8, ComplexMatrix::diag_real(&[0.0, 1.0])),
        ],
        shape,
    );
    assert!(dup.is_err());
}

#[test]
fn clip_probability_tolerance() {
    assert_eq!(clip_probability(-5e-10).unwrap(), 0.0);
    assert_eq!(clip_probability(1.0 + 5e-10).unwrap(), 1.0);
    assert!(clip_probability(-1e-6).is_err());
    assert!(clip_probability(f64::NAN).is_err());
}

#[test]
fn adjoint_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let u = random::unitary(2, &mut rng);
    let ch = KrausChannel::unitary(u.clone(), RegisterShape::qubits(1)).unwrap();
    let adj = adjoint_channel(&ch).unwrap();
    let rho = random::density_state(RegisterShape::qubits(1), 2, &mut rng);
    let expected = &(&u.adjoint() * rho.mat()) * &u;
    assert!(adj.apply_matrix(rho.mat()).max_abs_diff(&expected) < 1e-14);

    let depol = uniform_channel(&['I', 'Z', 'X', 'Y']);
    let adj = adjoint_channel(&depol).unwrap();
    assert!(
        adj.apply_matrix(&ComplexMatrix::identity(2))
            .max_abs_diff(&ComplexMatrix::identity(2))
            < 1e-15
    );
}

#[test]
fn adjoint_duality_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let ch = random::channel(
            RegisterShape::qubits(1),
            RegisterShape::qubits(2),
            3,
            &mut rng,
        )
        .unwrap();
        let rho = random::density_state(RegisterShape::qubits(2), 2, &mut rng);
        let sigma = random::density_state(RegisterShape::qubits(1), 2, &mut rng);
        let lhs = (rho.mat() * &ch.apply_matrix(sigma.mat())).trace();
        let rhs = (&ch.adjoint().apply_matrix(rho.mat()) * sigma.mat()).trace();
        assert!((lhs - rhs).norm() <= 1e-9);
    }
}

#[test]
fn helstrom_beats_random_two_outcome_measurements() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..200 {
        let shape = RegisterShape::qubits(1 + k % 2);
        let n = shape.total();
        let a = random::density_state(shape.clone(), rng.random_range(1..=n), &mut rng);
        let b = random::density_state(shape.clone(), rng.random_range(1..=n), &mut rng);
        let best = helstrom(&a, &b).unwrap().success;
        for _ in 0..500 {
            let u = random::unitary(n, &mut rng);
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
            let e = &(&u * &ComplexMatrix::diag_real(&d)) * &u.adjoint();
            let p = 0.5 * ((&e * a.mat()).trace().re + 1.0 - (&e * b.mat()).trace().re);
            assert!(p <= best + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fuchs_van_de_graaf(seed in any::<u64>(), qubits in 1usize..=3, ra in 1usize..=8, rb in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = RegisterShape::qubits(qubits);
        let n = shape.total();
        let a = random::density_state(shape.clone(), ra.min(n), &mut rng);
        let b = random::density_state(shape, rb.min(n), &mut rng);
        let d = trace_distance(&a, &b).unwrap();
        let f = fidelity(&a, &b).unwrap();
        prop_assert!(1.0 - f <= d + 1e-9);
        prop_assert!(d <= (1.0 - f * f).max(0.0).sqrt() + 1e-9);
    }

    #[test]
    fn pgm_is_a_valid_povm(seed in any::<u64>(), qubits in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = RegisterShape::qubits(qubits);
        let ens: Vec<(f64, DensityState)> =
            (0..4).map(|_| (0.25, random::density_state(shape.clone(), 1, &mut rng))).collect();
        let p = pgm(&ens).unwrap();
        let mut sum = ComplexMatrix::zeros(shape.total(), shape.total());
        for (_, e) in p.povm.elements() {
            sum += e;
        }
        prop_assert!(sum.max_abs_diff(&ComplexMatrix::identity(shape.total())) <= 1e-9);
    }

    #[test]
    fn channels_preserve_trace_and_positivity(seed in any::<u64>(), rank in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random::channel(RegisterShape::qubits(1), RegisterShape::qubits(1), rank, &mut rng).unwrap();
        let rho = random::density_state(RegisterShape::qubits(3), 3, &mut rng);
        let out = apply_channel(&ch, &rho, &[1]).unwrap();
        prop_assert!((out.mat().trace().re - 1.0).abs() <= 1e-9);
        prop_assert!(out.min_eigenvalue() >= -1e-9);
    }

    #[test]
    fn uhlmann_never_worse_than_raw_overlap(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = RegisterShape::new(vec![2, 3]).unwrap();
        let a = random::pure_state(shape.clone(), &mut rng);
        let b = random::pure_state(shape, &mut rng);
        let u = uhlmann_unitary(&a, &b, &[1]).unwrap();
        let achieved = b.overlap(&a.apply(&u, &[1], &[3]).unwrap());
        prop_assert!(achieved.norm() + 1e-12 >= a.overlap(&b).norm());
        prop_assert!(achieved.im.abs() <= 1e-12 && achieved.re >= 0.0);
        let f = fidelity(&a.marginal(&[0]).unwrap(), &b.marginal(&[0]).unwrap()).unwrap();
        prop_assert!((achieved.norm() - f).abs() <= 1e-8);
    }
}
