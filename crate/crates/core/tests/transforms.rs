mod support;

use std::f64::consts::PI;

use proptest::prelude::*;
use qdbg_core::sim::{ops::*, Gate, GateOp};
use qdbg_core::transforms::{
    apply_chain, apply_named_chain, cancel_inverses, merge_rotations, normalize_angle, GateSequence, TransformKind,
    DEFAULT_TOLERANCE,
};

fn seq(n: usize, ops: Vec<GateOp>) -> GateSequence {
    GateSequence::new(n, ops)
}

fn as_oracle_ops(s: &GateSequence) -> Vec<support::Op> {
    s.ops()
        .iter()
        .map(|o| (o.name.name().to_string(), o.wires.clone(), o.params.clone()))
        .collect()
}

fn to_seq(n: usize, ops: &[support::Op]) -> GateSequence {
    let ops = ops
        .iter()
        .map(|(name, w, p)| GateOp::new(Gate::from_name(name).unwrap(), w.clone(), p.clone()).unwrap())
        .collect();
    GateSequence::new(n, ops)
}

/// Quadratic restart-from-scratch rewriting, straight from the definitions.
fn naive(ops: &[support::Op], merge: bool) -> Vec<support::Op> {
    let self_inverse = ["h", "x", "y", "z", "cnot", "cz", "swap", "toffoli"];
    let rotation = ["rx", "ry", "rz"];
    let mut ops = ops.to_vec();
    'outer: loop {
        for j in 0..ops.len() {
            for i in (0..j).rev() {
                let (a, b) = (&ops[i], &ops[j]);
                let matches = a.0 == b.0
                    && a.1 == b.1
                    && if merge {
                        rotation.contains(&a.0.as_str())
                    } else {
                        self_inverse.contains(&a.0.as_str())
                    };
                if matches {
                    if merge {
                        let angle = normalize_angle(a.2[0] + b.2[0]);
                        ops.remove(j);
                        if angle.abs() <= DEFAULT_TOLERANCE {
                            ops.remove(i);
                        } else {
                            ops[i].2[0] = angle;
                        }
                    } else {
                        ops.remove(j);
                        ops.remove(i);
                    }
                    continue 'outer;
                }
                // anything else touching j's wires blocks further look-back
                if ops[i].1.iter().any(|w| ops[j].1.contains(w)) {
                    break;
                }
            }
        }
        return ops;
    }
}

fn same_ops(a: &[support::Op], b: &[support::Op]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.0 == y.0 && x.1 == y.1 && x.2.iter().zip(&y.2).all(|(p, q)| (p - q).abs() < 1e-9)
        })
}

#[test]
fn spec_examples() {
    assert!(cancel_inverses(&seq(1, vec![x(0), x(0)])).is_empty());
    assert_eq!(cancel_inverses(&seq(2, vec![h(0), x(1), h(0)])).ops(), &[x(1)]);
    let s = seq(2, vec![cnot(0, 1), cnot(1, 0)]);
    assert_eq!(cancel_inverses(&s), s);

    let m = merge_rotations(&seq(1, vec![rz(0.3, 0), rz(0.4, 0)]), DEFAULT_TOLERANCE);
    assert_eq!(m.len(), 1);
    assert!((m.ops()[0].params[0] - 0.7).abs() < 1e-15);
    assert!(merge_rotations(&seq(1, vec![rx(PI, 0), rx(-PI, 0)]), DEFAULT_TOLERANCE).is_empty());
    let s = seq(1, vec![rx(0.3, 0), rz(0.1, 0), rx(0.4, 0)]);
    assert_eq!(merge_rotations(&s, DEFAULT_TOLERANCE), s);

    let chain = apply_chain(
        &seq(1, vec![x(0), x(0), rz(0.3, 0), rz(0.4, 0)]),
        &[TransformKind::CancelInverses, TransformKind::MergeRotations],
    );
    assert_eq!(chain[0].1.ops(), &[rz(0.3, 0), rz(0.4, 0)]);
    assert_eq!(chain[1].1.len(), 1);
    assert!((chain[1].1.ops()[0].params[0] - 0.7).abs() < 1e-15);
    assert!(apply_chain(&seq(1, vec![x(0)]), &[]).is_empty());
    assert!(apply_named_chain(&seq(1, vec![]), &["cancel_inverse"]).is_err());
}

#[test]
fn fixpoint_collapses_nested_pairs() {
    assert!(cancel_inverses(&seq(1, vec![x(0), x(0), x(0), x(0)])).is_empty());
    assert!(cancel_inverses(&seq(2, vec![x(0), cnot(0, 1), h(1), h(1), cnot(0, 1), x(0)])).is_empty());
}

#[test]
fn angles_normalize_into_half_open_interval() {
    for a in [-13.0, -4.0 * PI, -2.0 * PI, -1.0, 0.0, 2.0 * PI, 3.0 * PI, 4.0 * PI, 100.0] {
        let n = normalize_angle(a);
        assert!(n > -2.0 * PI && n <= 2.0 * PI, "{a} -> {n}");
        let k = (a - n) / (4.0 * PI);
        assert!((k - k.round()).abs() < 1e-9, "{a} -> {n}");
    }
}

#[test]
fn random_sequences_preserve_unitary() {
    // 200 sequences, each checked for both passes and the chained pair
    let mut g = support::Gen::new(2024);
    for _ in 0..200 {
        let n = 1 + g.below(4);
        let len = g.below(31);
        let ops = support::random_ops(&mut g, n, len);
        let s = to_seq(n, &ops);
        let reference = support::unitary(n, &ops);
        let outputs = [
            cancel_inverses(&s),
            merge_rotations(&s, DEFAULT_TOLERANCE),
            apply_chain(&s, &[TransformKind::CancelInverses, TransformKind::MergeRotations])
                .pop()
                .unwrap()
                .1,
        ];
        for out in outputs {
            assert!(out.len() <= s.len());
            let d = support::phase_distance(&reference, &support::unitary(n, &as_oracle_ops(&out)));
            assert!(d < 1e-9, "deviation {d} for {ops:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_naive_rewriting(seed in any::<u64>()) {
        let mut g = support::Gen::new(seed);
        let n = 1 + g.below(4);
        let len = g.below(31);
        let ops = support::random_ops(&mut g, n, len);
        let s = to_seq(n, &ops);
        prop_assert!(same_ops(&as_oracle_ops(&cancel_inverses(&s)), &naive(&ops, false)));
        prop_assert!(same_ops(&as_oracle_ops(&merge_rotations(&s, DEFAULT_TOLERANCE)), &naive(&ops, true)));
    }

    #[test]
    fn idempotent(seed in any::<u64>()) {
        let mut g = support::Gen::new(seed);
        let n = 1 + g.below(4);
        let len = g.below(31);
        let s = to_seq(n, &support::random_ops(&mut g, n, len));
        for kind in TransformKind::ALL {
            let once = kind.apply(&s);
            prop_assert_eq!(kind.apply(&once), once);
        }
    }

    #[test]
    fn untouched_ops_keep_order(seed in any::<u64>()) {
        let mut g = support::Gen::new(seed);
        let n = 1 + g.below(4);
        let len = g.below(31);
        let s = to_seq(n, &support::random_ops(&mut g, n, len));
        // every surviving cancel_inverses op is an input op, in input order
        let out = cancel_inverses(&s);
        let mut it = s.ops().iter();
        for op in out.ops() {
            prop_assert!(it.any(|o| o == op));
        }
    }
}

#[test]
fn merged_rotation_keeps_first_line() {
    let s = GateSequence::with_lines(1, [(rz(0.1, 0), 3), (rz(0.2, 0), 5)]);
    let out = merge_rotations(&s, DEFAULT_TOLERANCE);
    assert_eq!(out.lines(), &[3]);
}
