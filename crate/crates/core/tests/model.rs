use proptest::prelude::*;
use rug::Rational;
use slowbond::model::*;

fn interval(l: usize, a: i64, b: i64) -> Geometry {
    Geometry::interval(l, Rational::from(a), Rational::from(b))
}

fn geometries() -> Vec<Geometry> {
    vec![
        Geometry::ring(1),
        Geometry::ring(2),
        Geometry::ring(3),
        Geometry::ring(4),
        interval(1, 1, 1),
        interval(2, 1, 1),
        interval(3, 2, 1),
        Geometry::interval(3, Rational::from((3, 2)), Rational::from((5, 4))),
    ]
}

#[test]
fn state_counts() {
    assert_eq!(enumerate_states(&Geometry::ring(3)).unwrap().len(), 20);
    assert_eq!(enumerate_states(&interval(3, 1, 1)).unwrap().len(), 64);
    assert_eq!(Geometry::ring(10).state_count(), 184_756);
    assert_eq!(binomial(32, 16), 601_080_390);
}

#[test]
fn oversized_spaces_are_refused() {
    let err = enumerate_states(&Geometry::ring(15)).unwrap_err();
    assert!(matches!(err, slowbond::Error::StateSpaceTooLarge { .. }));
    assert!(enumerate_states(&interval(13, 1, 1)).is_err());
}

#[test]
fn invalid_geometries_are_refused() {
    assert!(Geometry::ring(0).validate().is_err());
    assert!(interval(2, -1, 1).validate().is_err());
    assert!(stationary_at_r0(&interval(2, 0, 1)).is_err());
}

#[test]
fn step_state() {
    let g = Geometry::ring(2);
    let s = stationary_at_r0(&g).unwrap();
    assert_eq!(s.occupancy(&g), vec![1, 1, 0, 0]);
    let g = interval(1, 1, 1);
    assert_eq!(stationary_at_r0(&g).unwrap().occupancy(&g), vec![1, 0]);
}

#[test]
fn ring_one_chain() {
    let g = Geometry::ring(1);
    let gen = build_generator(&g).unwrap();
    let from_10 = Configuration::from_occupancy(&[1, 0]);
    let from_01 = Configuration::from_occupancy(&[0, 1]);
    assert_eq!(transitions(&g, from_10), vec![(from_01, Rate::Blockage)]);
    assert_eq!(transitions(&g, from_01), vec![(from_10, Rate::Unit)]);
    assert_eq!(gen.m1.off_diagonal_count(), 1);
    assert_eq!(gen.m0.off_diagonal_count(), 1);
}

#[test]
fn blockage_entries_of_ring_two() {
    let g = Geometry::ring(2);
    let gen = build_generator(&g).unwrap();
    let brute = gen
        .space
        .states
        .iter()
        .filter(|c| c.occupied(&g, 0) && !c.occupied(&g, 1))
        .count();
    assert_eq!(brute, 2);
    assert_eq!(gen.m1.off_diagonal_count(), brute);
}

#[test]
fn generator_invariants() {
    for g in geometries() {
        let gen = build_generator(&g).unwrap();
        let step = gen.space.index_of(stationary_at_r0(&g).unwrap()).unwrap();
        let top = *gen.space.potential.iter().max().unwrap();
        assert_eq!(gen.space.potential[step], top, "{g}");
        assert_eq!(gen.space.potential.iter().filter(|&&p| p == top).count(), 1);
        for j in 0..gen.len() {
            assert_eq!(gen.m0.column_sum(j), 0, "{g} column {j}");
            assert_eq!(gen.m1.column_sum(j), 0, "{g} column {j}");
            if j == step {
                assert_eq!(gen.m0.diag[j], 0);
                assert_eq!(gen.m0.column(j).count(), 0);
            } else {
                assert!(gen.m0.diag[j] < 0, "{g} state {j}");
            }
            for (i, _) in gen.m0.column(j) {
                assert_eq!(gen.space.potential[i], gen.space.potential[j] + 1, "{g}");
            }
            assert!(gen.m0.column(j).count() + gen.m1.column(j).count() <= 2 * g.l + 2);
        }
        if g.kind == GeometryKind::Ring {
            for &c in &gen.space.states {
                for (t, _) in transitions(&g, c) {
                    assert_eq!(t.particles(), c.particles());
                }
            }
        }
    }
}

/// Relabel `i -> 1 - i` and exchange particles with holes.
fn mirror(g: &Geometry, c: Configuration) -> Configuration {
    let occ = c.occupancy(g);
    let n = occ.len();
    Configuration::from_occupancy(&(0..n).map(|k| 1 - occ[n - 1 - k]).collect::<Vec<_>>())
}

#[test]
fn interval_mirror_symmetry() {
    for g in [interval(2, 1, 1), interval(3, 2, 2)] {
        let gen = build_generator(&g).unwrap();
        let r = Rational::from((2, 7));
        let m = gen.dense_at(&r);
        let idx = |c| gen.space.index_of(c).unwrap();
        for (i, &ci) in gen.space.states.iter().enumerate() {
            for (j, &cj) in gen.space.states.iter().enumerate() {
                assert_eq!(m[i][j], m[idx(mirror(&g, ci))][idx(mirror(&g, cj))]);
            }
        }
    }
}

#[test]
fn coo_export_lists_every_entry() {
    let gen = build_generator(&Geometry::ring(2)).unwrap();
    let text = gen.export_coo();
    let nonzero_diag = |m: &SparseColumns| m.diag.iter().filter(|d| d.cmp0().is_ne()).count();
    let expected = gen.m0.off_diagonal_count() + gen.m1.off_diagonal_count() + nonzero_diag(&gen.m0) + nonzero_diag(&gen.m1);
    assert_eq!(text.lines().count(), expected);
}

#[test]
fn geometry_config_round_trip() {
    for g in geometries() {
        let json = serde_json::to_string(&g).unwrap();
        let back: Geometry = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }
    let bad: Result<Geometry, _> = serde_json::from_str(r#"{"kind":"interval","L":2,"alpha":"-1"}"#);
    assert!(bad.is_err());
}

proptest! {
    #[test]
    fn occupancy_round_trip(bits in proptest::collection::vec(0u8..2, 2..=16)) {
        let c = Configuration::from_occupancy(&bits);
        let l = bits.len() / 2;
        let g = interval(l.max(1), 1, 1);
        if bits.len() == 2 * g.l {
            prop_assert_eq!(c.occupancy(&g), bits);
        }
    }

    #[test]
    fn transitions_raise_potential(l in 1usize..=5, seed in any::<u64>()) {
        let g = Geometry::ring(l);
        let space = enumerate_states(&g).unwrap();
        let c = space.states[(seed % space.len() as u64) as usize];
        for (t, rate) in transitions(&g, c) {
            if rate != Rate::Blockage {
                prop_assert_eq!(g.potential(t), g.potential(c) + 1);
            }
        }
    }
}
