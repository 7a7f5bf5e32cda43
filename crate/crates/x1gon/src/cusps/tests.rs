use super::*;
use crate::exactalg::next_prime_u64;

fn opts_no_cache() -> TableOptions {
    TableOptions {
        use_cache: false,
        ..TableOptions::default()
    }
}

#[test]
fn orbit_degree_rule() {
    assert_eq!(orbit_degrees(4), vec![1, 1, 1]);
    assert_eq!(orbit_degrees(5), vec![2, 1, 1]);
    assert_eq!(orbit_degrees(6), vec![1, 1, 1, 1]);
    assert_eq!(orbit_degrees(9), vec![3, 1, 1, 2, 1]);
    let d29 = orbit_degrees(29);
    assert_eq!(d29[0], 14);
    assert!(d29[1..].iter().all(|&d| d == 1));
    let d37 = orbit_degrees(37);
    assert_eq!(d37[0], 18);
    assert!(d37[1..].iter().all(|&d| d == 1));
    // Level 25 has ramified orbits at multiples of 5.
    let d25 = orbit_degrees(25);
    assert_eq!(d25[0], 10);
    assert_eq!(d25[5], 4);
    assert_eq!(d25[10], 4);
    assert_eq!(d25.iter().filter(|&&d| d == 1).count(), 10);
}

#[test]
fn cusp_count_matches_closed_form() {
    for level in 5..=60 {
        assert_eq!(
            cusp_count(level),
            cusp_count_formula(level),
            "level {level}"
        );
    }
}

#[test]
fn diamond_folding() {
    let v = DivisorVec {
        level: 29,
        coeffs: vec![0, -1, -2, -3, -1, 0, 0, 0, 3, 2, -1, -3, 2, 3, 1],
    };
    // ⟨1⟩ and ⟨N−1⟩ both act trivially on the folded labels.
    assert_eq!(diamond_permute(29, 1, &v).unwrap().coeffs, v.coeffs);
    assert_eq!(diamond_permute(29, 28, &v).unwrap().coeffs, v.coeffs);
    // ⟨i⟩ followed by ⟨i⁻¹⟩ is the identity: 12 · 17 = 204 ≡ 1 (mod 29).
    let w = diamond_permute(29, 12, &v).unwrap();
    assert_eq!(diamond_permute(29, 17, &w).unwrap().coeffs, v.coeffs);
    assert!(matches!(
        diamond_permute(12, 4, &v2(12)),
        Err(CuspsError::NotADiamond(4))
    ));
}

fn v2(level: u32) -> DivisorVec {
    DivisorVec::zero(level)
}

#[test]
fn arc_ram_indices() {
    for n in 0..=14 {
        assert_eq!(labeling::arc_ram_index(29, n), 1, "n = {n}");
    }
    assert_eq!(labeling::arc_ram_index(25, 5), 1);
    assert_eq!(labeling::arc_ram_index(12, 6), 1);
    // The only irregular cusp in range folds its arc.
    assert_eq!(labeling::arc_ram_index(4, 2), 2);
}

#[test]
fn bivariate_reconstruction_matches_exact_forms() {
    // The interpolation route used for large indices must agree (up to a
    // scalar) with direct reduction of the exact bivariate forms.
    let p = next_prime_u64(1 << 31);
    for k in 10..=13 {
        let direct = pipeline::reduce_unit_for_test(k, p);
        let sliced = pipeline::fbar_slices_for_test(k, p);
        assert!(
            pipeline::equal_up_to_scalar(&direct, &sliced),
            "f_{k} mismatch mod {p}"
        );
    }
}

#[test]
fn small_level_tables() {
    for level in 4..=9 {
        let t = divisor_table_with(level, &opts_no_cache()).unwrap();
        let m = (level / 2) as usize;
        assert_eq!(t.unit_count(), m, "level {level}");
        assert!(!t.labels_provisional, "level {level} labels are provisional");
        for k in 2..=(m as u32 + 1) {
            assert_eq!(t.row(k).unwrap().degree(), 0);
        }
        assert_eq!(t.rank(), m);
    }
}

#[test]
fn level5_table_values() {
    // div(f₃) = div(b) on the level-5 curve: a simple zero at the orbit of
    // the marked point's own cusp and a simple pole at infinity, with the
    // degree-2 orbit untouched.
    let t = divisor_table_with(5, &opts_no_cache()).unwrap();
    let r2 = &t.row(2).unwrap().coeffs;
    let r3 = &t.row(3).unwrap().coeffs;
    // Weighted degrees vanish.
    let degs = &t.orbit_degrees;
    assert_eq!(degs, &vec![2, 1, 1]);
    assert_eq!((0..3).map(|i| degs[i] as i64 * r2[i]).sum::<i64>(), 0);
    assert_eq!((0..3).map(|i| degs[i] as i64 * r3[i]).sum::<i64>(), 0);
    // f₂ has the full degree-4 polar part of the discriminant orbit split
    // as 3·(deg 1) + 1·(deg 2)… concretely: valuations (−1, 3, −1) on
    // (C₀, C₁, C₂) or the appropriate labeling; pin the multiset.
    let mut m2: Vec<i64> = r2.clone();
    m2.sort_unstable();
    assert_eq!(m2, vec![-1, -1, 3]);
    let mut m3: Vec<i64> = r3.clone();
    m3.sort_unstable();
    assert_eq!(m3, vec![-1, 0, 1]);
}

#[test]
fn level29_regression() {
    let t = divisor_table_with(29, &opts_no_cache()).unwrap();
    assert_eq!(t.unit_count(), 14);
    assert!(!t.labels_provisional);
    // x = f₇/f₈ on the curve, so div(x) = row(7) − row(8).
    let r7 = &t.row(7).unwrap().coeffs;
    let r8 = &t.row(8).unwrap().coeffs;
    let div_x: Vec<i64> = r7.iter().zip(r8.iter()).map(|(a, b)| a - b).collect();
    assert_eq!(
        div_x,
        vec![0, -1, -2, -3, -1, 0, 0, 0, 3, 2, -1, -3, 2, 3, 1]
    );
    // The degree of x as a map is half the total variation.
    let deg: i64 = div_x
        .iter()
        .zip(t.orbit_degrees.iter())
        .map(|(&v, &d)| v.max(0) * d as i64)
        .sum();
    assert_eq!(deg, 11);
    // Image under the diamond operator ⟨12⟩.
    let dv = DivisorVec {
        level: 29,
        coeffs: div_x.clone(),
    };
    let twisted = diamond_permute(29, 12, &dv).unwrap();
    assert_eq!(
        twisted.coeffs,
        vec![0, 2, 0, 0, -1, -2, 1, -3, 2, 3, -1, 3, -1, -3, 0]
    );
    // div(x) lies in the unit lattice with exponents e₇ = 1, e₈ = −1.
    let e = express_in_lattice(&t, &dv).unwrap();
    let mut expected = vec![0i64; 14];
    expected[5] = 1;
    expected[6] = -1;
    assert_eq!(e, expected);
}

#[test]
fn lattice_membership_distinctions() {
    let t = divisor_table_with(11, &opts_no_cache()).unwrap();
    // A divisor of nonzero degree is not even rationally expressible.
    let mut v = DivisorVec::zero(11);
    v.coeffs[0] = 1;
    match express_in_lattice(&t, &v) {
        Err(CuspsError::NotInLattice { rational }) => assert!(!rational),
        other => panic!("expected a degree obstruction, got {other:?}"),
    }
    // C₁ − C₂ has degree zero but nontrivial cuspidal class (order 5 at
    // level 11), so it is rationally but not integrally expressible.
    let mut w = DivisorVec::zero(11);
    w.coeffs[1] = 1;
    w.coeffs[2] = -1;
    match express_in_lattice(&t, &w) {
        Err(CuspsError::NotInLattice { rational }) => assert!(rational),
        other => panic!("expected an integrality obstruction, got {other:?}"),
    }
    // Five times the class is principal.
    let mut w5 = DivisorVec::zero(11);
    w5.coeffs[1] = 5;
    w5.coeffs[2] = -5;
    express_in_lattice(&t, &w5).expect("5·(C₁ − C₂) must be a unit divisor");
}

#[test]
fn cache_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let mut opts = opts_no_cache();
    opts.use_cache = true;
    opts.cache_dir = Some(dir.path().to_path_buf());
    let t1 = divisor_table_with(10, &opts).unwrap();
    assert!(cache::table_path(dir.path(), 10).exists());
    let t2 = divisor_table_with(10, &opts).unwrap();
    for k in 2..=6 {
        assert_eq!(t1.row(k).unwrap().coeffs, t2.row(k).unwrap().coeffs);
    }
    // A stored table for one level must not parse as another.
    let text = std::fs::read_to_string(cache::table_path(dir.path(), 10)).unwrap();
    assert!(cache::parse_table(&text, 11).is_none());
    assert!(cache::parse_table(&text, 10).is_some());
}

#[test]
fn deterministic_across_runs() {
    let a = divisor_table_with(13, &opts_no_cache()).unwrap();
    let b = divisor_table_with(13, &opts_no_cache()).unwrap();
    for k in 2..=7 {
        assert_eq!(a.row(k).unwrap().coeffs, b.row(k).unwrap().coeffs);
    }
}

#[test]
fn debug_n8_arcs() {
    let arcs = labeling::debug_arc_vectors(8, 256);
    for (n, w) in arcs.iter().enumerate() {
        println!("arc {n}: {w:?}  (e = {})", labeling::arc_ram_index(8, n as u32));
    }
    let (groups, _, _) = smalln::labeled_groups(8, &opts_no_cache()).unwrap_or_else(|e| panic!("{e}"));
    for (d, v) in &groups {
        println!("group deg {d}: {v:?}");
    }
}

#[test]
#[ignore]
fn profile_n29_phases() {
    use std::time::Instant;
    let t0 = Instant::now();
    let leg = pipeline::leg(29, crate::exactalg::next_prime_u64((1 << 30) + 12345));
    eprintln!("one leg total: {:?} ({} groups)", t0.elapsed(), leg.unwrap().groups.len());
    let t1 = Instant::now();
    let table = divisor_table_with(29, &opts_no_cache()).unwrap();
    eprintln!(
        "full table: {:?} (provisional = {})",
        t1.elapsed(),
        table.labels_provisional
    );
}

#[test]
#[ignore]
fn profile_labeling_only() {
    let t = std::time::Instant::now();
    let groups = vec![(0u64, vec![0i64; 14]); 0];
    let _ = groups;
    // Reuse the real groups from one leg so matching has real data.
    let leg = pipeline::leg(29, crate::exactalg::next_prime_u64((1 << 30) + 999)).unwrap();
    eprintln!("leg: {:?}", t.elapsed());
    let t = std::time::Instant::now();
    let r = labeling::assign_labels(29, &leg.groups, &opts_no_cache());
    eprintln!("assign_labels: {:?} -> {:?}", t.elapsed(), r.map(|x| x.1));
}

#[test]
#[ignore]
fn sweep_all_levels() {
    for level in 10..=40u32 {
        let t = std::time::Instant::now();
        match divisor_table_with(level, &opts_no_cache()) {
            Ok(tab) => {
                let status = if tab.labels_provisional { "PROVISIONAL" } else { "certified" };
                eprintln!("level {level}: {status} in {:?} (rank {})", t.elapsed(), tab.rank());
                assert!(!tab.labels_provisional, "level {level} provisional");
            }
            Err(e) => panic!("level {level}: {e}"),
        }
    }
}
