//! Acceptance suite: one test per shipped guarantee.
//!
//! Every derived quantity is checked against an independent route: closed
//! form case tables against the polygon engines and the round-2 oracle,
//! lattice point formulas against direct enumeration, discriminants against
//! the resultant and the trace form. The corpus is enumerated
//! deterministically; nothing here draws random numbers.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use duodecic::arith::{
    factor, fp_factor, is_12th_power_free, is_irreducible_x12_minus_m, vp, FactoredInt, FpPoly,
    IntPoly,
};
use duodecic::combine::{global_basis, IntegralBasis};
use duodecic::montes2::{
    montes_index, phi_expansion, second_order_count, second_order_residual, v_newton_polygon,
    FqPoly,
};
use duodecic::newton::{
    newton_polygon, ore_index, polygon_lattice_count, residual_polynomial, triangle_lattice_count,
    NewtonPolygon, PolygonPoint,
};
use duodecic::pure12::{
    case_records, classify, disc_f, field_discriminant, is_power_basis_monogenic,
    key_data_for_case, p_integral_basis, vp_index, CaseRecord, CaseTag, PIntegralBasis,
    Pure12Error, ThetaElement,
};
use duodecic::verify::{
    is_algebraic_integer, resultant_disc, round2_p_basis, round2_vp_index, trace_form_disc,
    verify_p_basis,
};

// ---- Shared helpers ----

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn valid(m: &BigInt) -> bool {
    is_12th_power_free(m).unwrap_or(false) && is_irreducible_x12_minus_m(m).unwrap_or(false)
}

/// Primes dividing 12 m, the only primes where the index can be positive.
fn ramified_primes(m: &BigInt) -> Vec<u64> {
    let mut ps: BTreeSet<u64> = factor(m).unwrap().factors.keys().copied().collect();
    ps.insert(2);
    ps.insert(3);
    ps.into_iter().collect()
}

fn theta_el(coeffs: &[i64], den: i64) -> ThetaElement {
    ThetaElement::new(IntPoly::from_i64(coeffs), big(den))
}

fn factored(sign: i8, powers: &[(u64, u32)]) -> FactoredInt {
    let mut f = FactoredInt::one();
    f.sign = sign;
    for &(p, e) in powers {
        f.mul_prime_power(p, e);
    }
    f
}

/// Table basis where the case applies, round-2 basis where it does not.
fn p_basis(m: &BigInt, p: u64) -> PIntegralBasis {
    match p_integral_basis(m, p) {
        Ok(b) => b,
        Err(Pure12Error::NotCovered(_)) => round2_p_basis(m, p).unwrap(),
        Err(e) => panic!("p_integral_basis({}, {}): {}", m, p, e),
    }
}

fn assemble_global(m: &BigInt) -> IntegralBasis {
    let bases: Vec<PIntegralBasis> = ramified_primes(m).into_iter().map(|p| p_basis(m, p)).collect();
    global_basis(&bases).unwrap()
}

/// The smallest radicands p^v u with u in the admissible residue classes,
/// enumerated by |u| with the positive sign first.
fn case_representatives(rec: &CaseRecord, want: usize) -> Vec<BigInt> {
    let pv = big(rec.p as i64).pow(rec.v as u32);
    let mut out = Vec::new();
    let mut a: i64 = 0;
    while out.len() < want && a < 10_000 {
        a += 1;
        for u in [a, -a] {
            if out.len() >= want {
                break;
            }
            if u.unsigned_abs() % rec.p == 0 {
                continue;
            }
            let r = u.rem_euclid(rec.cond_modulus as i64) as u64;
            if !rec.cond_residues.contains(&r) {
                continue;
            }
            let m = &pv * big(u);
            if valid(&m) {
                out.push(m);
            }
        }
    }
    out
}

/// Deterministic corpus: every valid radicand in [-130, 130], fixed wild and
/// tame samples for each tabulated shape, and two fresh congruence
/// representatives per case table row.
fn corpus() -> Vec<BigInt> {
    let mut set: BTreeSet<BigInt> = BTreeSet::new();
    for n in -130i64..=130 {
        if n.abs() < 2 {
            continue;
        }
        let m = big(n);
        if valid(&m) {
            set.insert(m);
        }
    }
    for n in [
        20, 12, -20, 28, 60, 48, 2352, 80, 272, 320, 192, 448, 4352, 1280, 768, 17408, 3072, 7168,
        270, 459, 756, 54, 108, 7290, 9477, 12393, 1458, 196830, 334611, 39366, 78732, 6250,
        823543, 68, 132, -105, 6,
    ] {
        let m = big(n);
        assert!(valid(&m), "fixed sample {} must be a valid radicand", n);
        set.insert(m);
    }
    for rec in case_records() {
        for m in case_representatives(rec, 2) {
            set.insert(m);
        }
    }
    set.into_iter().collect()
}

// ---- Golden radicands ----

#[test]
fn golden_radicands_match_published_invariants() {
    // m = 60: index valuation, field discriminant and the printed lattice.
    let m = big(60);
    assert_eq!(vp_index(&m, 2).unwrap(), 15);
    assert_eq!(
        field_discriminant(&m).unwrap(),
        factored(-1, &[(2, 16), (3, 23), (5, 11)])
    );
    let global = assemble_global(&m);
    let mut rows: Vec<ThetaElement> = (0..6).map(ThetaElement::theta_pow).collect();
    rows.push(theta_el(&[2, 0, 0, -2, 0, 0, 1], 4));
    rows.push(theta_el(&[0, 2, 0, 0, -2, 0, 0, 1], 4));
    rows.push(theta_el(&[0, 0, 2, 0, 0, -2, 0, 0, 1], 4));
    rows.push(theta_el(&[0, 0, 0, 2, 0, 0, -2, 0, 0, 1], 8));
    rows.push(theta_el(&[0, 0, 0, 0, 2, 0, 0, -2, 0, 0, 1], 8));
    rows.push(theta_el(&[0, 0, 0, 0, 0, 2, 0, 0, -2, 0, 0, 1], 8));
    let printed = IntegralBasis::from_rows(rows).unwrap();
    assert!(printed.spans_same(&global), "m = 60 lattice mismatch");
    assert_eq!(global.index(), factored(1, &[(2, 15)]));

    // m = 2352: discriminant of the defining polynomial and the lattice with
    // the corrected denominator 28 in degree six.
    let m = big(2352);
    assert_eq!(disc_f(&m).unwrap(), factored(-1, &[(2, 68), (3, 23), (7, 22)]));
    assert_eq!(
        field_discriminant(&m).unwrap(),
        factored(-1, &[(2, 26), (3, 23), (7, 10)])
    );
    let global = assemble_global(&m);
    let rows = vec![
        theta_el(&[1], 1),
        theta_el(&[0, 1], 1),
        theta_el(&[0, 0, 1], 1),
        theta_el(&[0, 0, 0, 1], 2),
        theta_el(&[0, 0, 0, 0, 1], 2),
        theta_el(&[0, 0, 0, 0, 0, 1], 2),
        theta_el(&[0, 0, 0, 0, 0, 0, 1], 28),
        theta_el(&[0, 0, 0, 0, 0, 0, 0, 1], 28),
        theta_el(&[0, 0, 28, 0, 0, 28, 0, 0, 1], 56),
        theta_el(&[0, 0, 0, 28, 0, 0, 42, 0, 0, 1], 56),
        theta_el(&[0, 56, 0, 0, -28, 0, 0, -14, 0, 0, 1], 112),
        theta_el(&[0, 0, 56, 0, 0, -28, 0, 0, -14, 0, 0, 1], 112),
    ];
    let printed = IntegralBasis::from_rows(rows).unwrap();
    assert!(printed.spans_same(&global), "m = 2352 lattice mismatch");
    assert_eq!(global.index(), factored(1, &[(2, 21), (7, 6)]));

    // m = 6a with a squarefree and coprime to 6: theta generates the maximal
    // order, so every local index vanishes and d_K equals disc(f).
    for a in [1i64, 5, 7, 11, 35, -1, -5, -7] {
        let m = big(6 * a);
        assert!(is_power_basis_monogenic(&m).unwrap(), "m = {} must be monogenic", 6 * a);
        for p in ramified_primes(&m) {
            assert_eq!(vp_index(&m, p).unwrap(), 0, "m = {}, p = {}", 6 * a, p);
            assert_eq!(round2_vp_index(&m, p).unwrap(), 0, "m = {}, p = {}", 6 * a, p);
        }
        assert_eq!(field_discriminant(&m).unwrap(), disc_f(&m).unwrap());
    }
    println!("PASS golden radicands match published invariants");
}

// ---- Case table reproduction ----

#[test]
fn case_tables_are_reproduced_on_fresh_representatives() {
    for rec in case_records() {
        let reps = case_representatives(rec, 2);
        assert_eq!(reps.len(), 2, "no representatives found for case {}", rec.tag);
        for m in reps {
            let label = classify(&m, rec.p).unwrap();
            assert_eq!(label.tag, rec.tag, "classify({}, {})", m, rec.p);
            assert_eq!(
                vp_index(&m, rec.p).unwrap(),
                rec.index,
                "index of case {} at m = {}",
                rec.tag,
                m
            );
        }
    }
    println!("PASS case tables reproduced on fresh congruence representatives");
}

// ---- Engine agreement ----

#[test]
fn engines_agree_on_every_corpus_radicand() {
    let ms = corpus();
    assert!(ms.len() >= 200, "corpus too small: {}", ms.len());
    let mut seen: BTreeSet<&'static str> = BTreeSet::new();
    let mut oracle_only = 0u32;
    for m in &ms {
        for p in ramified_primes(m) {
            let r2 = round2_vp_index(m, p).unwrap();
            match classify(m, p) {
                Ok(label) => {
                    seen.insert(label.tag.name());
                    assert_eq!(
                        vp_index(m, p).unwrap(),
                        r2,
                        "table vs round-2 at m = {}, p = {}",
                        m,
                        p
                    );
                    if label.tag.is_wild() {
                        let keys = key_data_for_case(&label).unwrap();
                        let f = IntPoly::x12_minus_m(m);
                        assert_eq!(
                            montes_index(&f, p, &keys).unwrap(),
                            r2,
                            "second-order polygon at m = {}, p = {}",
                            m,
                            p
                        );
                    } else if vp(m, p).unwrap() > 0 {
                        let f = IntPoly::x12_minus_m(m);
                        assert_eq!(ore_index(&f, p).unwrap(), r2, "polygon at m = {}, p = {}", m, p);
                    }
                }
                Err(Pure12Error::NotCovered(_)) => {
                    oracle_only += 1;
                    let f = IntPoly::x12_minus_m(m);
                    assert_eq!(
                        ore_index(&f, p).unwrap(),
                        r2,
                        "polygon at uncovered m = {}, p = {}",
                        m,
                        p
                    );
                }
                Err(e) => panic!("classify({}, {}): {}", m, p, e),
            }
        }
    }
    // Unramified odd primes are not visited above; check them directly.
    for (m, p) in [(20i64, 7u64), (17, 5), (60, 11), (7, 13)] {
        let m = big(m);
        let label = classify(&m, p).unwrap();
        assert_eq!(label.tag, CaseTag::T4);
        seen.insert(label.tag.name());
        assert_eq!(vp_index(&m, p).unwrap(), 0);
        assert_eq!(round2_vp_index(&m, p).unwrap(), 0);
    }
    assert!(oracle_only >= 2, "corpus must exercise the uncovered shapes");
    for tag in CaseTag::ALL {
        assert!(seen.contains(tag.name()), "corpus never hits case {}", tag);
    }
    println!(
        "PASS three engines agree on {} radicands covering all {} cases",
        ms.len(),
        CaseTag::ALL.len()
    );
}

// ---- Discriminant identities ----

#[test]
fn discriminant_identities_hold_across_the_corpus() {
    let ms = corpus();
    for m in &ms {
        let value = disc_f(m).unwrap().value();
        let direct = -(big(2).pow(24) * big(3).pow(12) * m.pow(11));
        assert_eq!(value, direct, "closed form of disc(f) at m = {}", m);
        assert_eq!(resultant_disc(m), value, "resultant route at m = {}", m);

        let global = assemble_global(m);
        let ind = global.index().value();
        let scaled = trace_form_disc(global.elements(), m) * BigRational::from_integer(&ind * &ind);
        assert!(scaled.is_integer(), "trace form discriminant at m = {}", m);
        assert_eq!(scaled.to_integer(), value, "trace form route at m = {}", m);
        if let Ok(dk) = field_discriminant(m) {
            assert_eq!(
                dk.value() * &ind * &ind,
                value,
                "table discriminant at m = {}",
                m
            );
        }
    }
    println!("PASS discriminant identities hold on {} radicands", ms.len());
}

// ---- Basis verification ----

#[test]
fn produced_bases_are_integral_closed_and_maximal() {
    let ms = corpus();
    let mut local = 0u32;
    for m in &ms {
        let mut bases = Vec::new();
        for p in ramified_primes(m) {
            let basis = p_basis(m, p);
            let report = verify_p_basis(m, p, &basis).unwrap();
            assert!(
                report.all_pass(),
                "basis report fails at m = {}, p = {}: {:?}",
                m,
                p,
                report
            );
            local += 1;
            bases.push(basis);
        }
        let global = global_basis(&bases).unwrap();
        for e in global.elements() {
            assert!(is_algebraic_integer(e, m), "non-integral element at m = {}: {}", m, e);
        }
    }
    println!(
        "PASS {} local bases verified integral, closed and maximal on {} radicands",
        local,
        ms.len()
    );
}

// ---- Lattice point counts ----

/// Floor of the hull ordinate of the piecewise linear chain through the given
/// vertices, evaluated at integer x.
fn chain_floor(vertices: &[(i64, i64)], x: i64) -> i64 {
    for w in vertices.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        if x0 <= x && x <= x1 {
            return (y0 * (x1 - x0) + (y1 - y0) * (x - x0)).div_euclid(x1 - x0);
        }
    }
    panic!("abscissa {} outside the chain", x);
}

#[test]
fn lattice_point_counts_match_direct_enumeration() {
    // Triangles with legs t and b against a full scan of the grid.
    for t in 1..=50u64 {
        for b in 1..=50u64 {
            let mut brute = 0u64;
            for x in 1..=t {
                for y in 1..=b {
                    if b * x + t * y <= t * b {
                        brute += 1;
                    }
                }
            }
            assert_eq!(triangle_lattice_count(t, b), brute, "triangle t = {}, b = {}", t, b);
            assert_eq!(brute, ((t - 1) * (b - 1) + t.gcd(&b) - 1) / 2);
        }
    }

    // Single-edge polygons from (0, v) to (12, 0).
    for (v, want) in [(2i64, 6u64), (3, 12), (4, 18), (5, 22), (6, 30), (8, 40), (9, 45), (10, 50)]
    {
        let polygon = NewtonPolygon::from_points(vec![
            PolygonPoint::from_ints(0, v),
            PolygonPoint::from_ints(12, 0),
        ]);
        let mut brute = 0u64;
        for x in 1..12i64 {
            brute += (v * (12 - x)).div_euclid(12).max(0) as u64;
        }
        assert_eq!(polygon_lattice_count(&polygon), want, "edge (0, {}) to (12, 0)", v);
        assert_eq!(brute, want, "enumeration for edge (0, {}) to (12, 0)", v);
    }

    // Second-order polygons of concrete wild radicands: exact vertices, the
    // point count above the last ordinate, and the assembled index.
    struct Fig {
        m: i64,
        p: u64,
        vertices: &'static [(i64, i64)],
        n2: u64,
        n1: u64,
    }
    let figures = [
        Fig { m: 68, p: 2, vertices: &[(0, 36), (1, 18), (2, 12)], n2: 6, n1: 6 },
        Fig { m: 132, p: 2, vertices: &[(0, 42), (1, 18), (2, 12)], n2: 6, n1: 6 },
        Fig { m: 20, p: 2, vertices: &[(0, 24), (2, 12)], n2: 6, n1: 6 },
        Fig { m: 12, p: 2, vertices: &[(0, 27), (2, 12)], n2: 7, n1: 6 },
        Fig { m: 270, p: 3, vertices: &[(0, 20), (1, 16), (3, 12)], n2: 6, n1: 12 },
        Fig { m: 756, p: 3, vertices: &[(0, 24), (1, 16), (3, 12)], n2: 6, n1: 12 },
    ];
    for fig in &figures {
        let m = big(fig.m);
        let label = classify(&m, fig.p).unwrap();
        let keys = key_data_for_case(&label).unwrap();
        assert_eq!(keys.len(), 1, "m = {} carries a single key", fig.m);
        let t = &keys[0];
        let f = IntPoly::x12_minus_m(&m);
        let sop = v_newton_polygon(t, &f).unwrap();

        let want: Vec<PolygonPoint> = fig
            .vertices
            .iter()
            .map(|&(x, y)| PolygonPoint::from_ints(x, y))
            .collect();
        assert_eq!(sop.polygon.vertices(), &want[..], "vertices at m = {}", fig.m);
        let &(last_x, last_y) = fig.vertices.last().unwrap();
        assert_eq!(sop.last_vertex_ordinate, last_y);

        let mut brute = 0i64;
        for x in 1..=last_x {
            brute += (chain_floor(fig.vertices, x) - last_y).max(0);
        }
        assert_eq!(second_order_count(&sop), brute as u64, "enumeration at m = {}", fig.m);
        assert_eq!(second_order_count(&sop), fig.n2, "point count at m = {}", fig.m);

        let deg_psi = t.psi.degree().unwrap() as u64;
        let total = vp_index(&m, fig.p).unwrap();
        assert_eq!(fig.n1 + deg_psi * fig.n2, total, "index split at m = {}", fig.m);
        assert_eq!(montes_index(&f, fig.p, &keys).unwrap(), total);
    }
    println!("PASS lattice point counts match direct enumeration");
}

// ---- Monogenity ----

#[test]
fn monogenity_matches_the_round2_oracle() {
    let mut checked = 0u32;
    for n in -500i64..=500 {
        if n.abs() < 2 {
            continue;
        }
        let m = big(n);
        if !valid(&m) {
            continue;
        }
        if factor(&m).unwrap().factors.values().any(|&e| e > 1) {
            continue;
        }
        let mono = is_power_basis_monogenic(&m).unwrap();
        let oracle = ramified_primes(&m)
            .into_iter()
            .all(|p| round2_vp_index(&m, p).unwrap() == 0);
        assert_eq!(mono, oracle, "monogenity disagreement at m = {}", n);
        checked += 1;
    }
    assert!(checked >= 500, "too few squarefree radicands: {}", checked);
    println!(
        "PASS monogenity criterion matches the round-2 oracle on {} squarefree radicands",
        checked
    );
}

// ---- Residual polynomial anchors ----

#[test]
fn residual_polynomials_match_their_anchors() {
    let anchors: [(i64, u64, &[i64], &[(&[i64], u32)]); 4] = [
        (20, 2, &[1, 0, 1], &[(&[1, 1], 2)]),
        (320, 2, &[1, 0, 0, 0, 0, 0, 1], &[(&[1, 1], 2), (&[1, 1, 1], 2)]),
        (7290, 3, &[-1, 0, 0, 0, 0, 0, 1], &[(&[1, 1], 3), (&[2, 1], 3)]),
        (1458, 3, &[1, 0, 0, 0, 0, 0, 1], &[(&[1, 0, 1], 3)]),
    ];
    for (m, p, res, facs) in anchors {
        let f = IntPoly::x12_minus_m(&big(m));
        let polygon = newton_polygon(&f, p).unwrap();
        let edges = polygon.negative_edges();
        assert_eq!(edges.len(), 1, "m = {} has a single negative edge", m);
        let r = residual_polynomial(&f, p, &edges[0]);
        assert_eq!(r, FpPoly::from_i64(p, res), "residual at m = {}, p = {}", m, p);
        let want: Vec<(FpPoly, u32)> = facs
            .iter()
            .map(|&(c, e)| (FpPoly::from_i64(p, c), e))
            .collect();
        assert_eq!(fp_factor(&r).unwrap(), want, "factorization at m = {}, p = {}", m, p);
    }

    // Second-order residual for m = 20: Y^2 + Y + 1 over F_2[Y]/(psi).
    let m = big(20);
    let label = classify(&m, 2).unwrap();
    let keys = key_data_for_case(&label).unwrap();
    let t = &keys[0];
    let f = IntPoly::x12_minus_m(&m);
    let expansion = phi_expansion(&f, &t.phi);
    let sop = v_newton_polygon(t, &f).unwrap();
    let edges = sop.polygon.negative_edges();
    assert_eq!(edges.len(), 1);
    let r = second_order_residual(t, &expansion, &edges[0]).unwrap();
    assert_eq!(r, FqPoly::from_prime_field(t.psi.clone(), &[1, 1, 1]));
    println!("PASS residual polynomials match their anchors");
}
