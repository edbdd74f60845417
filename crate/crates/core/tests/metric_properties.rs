mod common;

use std::collections::{HashMap, VecDeque};

use asdim_core::group::{GroupElement, GroupSpec, Homomorphism};
use asdim_core::metric::{check_coarse_sandwich, rho_profile, CappedNorm, MetricContext, WeightFunction};
use asdim_core::rational::{frac, int};
use asdim_core::BigRational;
use common::{random_word, rng, sample_groups, standard_context, symmetric_generators};
use proptest::prelude::*;

fn exact(c: CappedNorm) -> BigRational {
    c.value().cloned().expect("norm within cap")
}

fn bfs_depths(group: &GroupSpec, depth: u32) -> HashMap<GroupElement, u32> {
    let gens = symmetric_generators(group);
    let mut seen = HashMap::from([(group.identity(), 0u32)]);
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(x) = queue.pop_front() {
        let dx = seen[&x];
        if dx == depth {
            continue;
        }
        for g in &gens {
            let y = group.multiply(&x, g).unwrap();
            seen.entry(y.clone()).or_insert_with(|| {
                queue.push_back(y);
                dx + 1
            });
        }
    }
    seen
}

#[test]
fn unit_weight_norms_match_breadth_first_search() {
    for (name, g) in sample_groups() {
        if matches!(g, GroupSpec::RationalsTruncated { .. }) {
            continue;
        }
        let ctx = standard_context(&g);
        let oracle = bfs_depths(&g, 8);
        let ball = ctx.ball_with_norms(&int(8)).unwrap();
        assert_eq!(ball.len(), oracle.len(), "{name}: ball size");
        for (x, n) in ball.entries() {
            assert_eq!(*n, int(oracle[x] as i64), "{name}: norm of {x}");
        }
    }
}

#[test]
fn norm_axioms_and_left_invariance() {
    let cap = int(1000);
    for (seed, (name, g)) in sample_groups().into_iter().enumerate() {
        let ctx = standard_context(&g);
        let mut r = rng(300 + seed as u64);
        let e = g.identity();
        assert_eq!(exact(ctx.norm(&e, &cap).unwrap()), int(0));
        for _ in 0..1000 {
            let x = random_word(&g, &mut r, 5);
            let y = random_word(&g, &mut r, 5);
            let h = random_word(&g, &mut r, 5);
            let nx = exact(ctx.norm(&x, &cap).unwrap());
            assert_eq!(nx == int(0), x == e, "{name}: zero norm exactly at the identity");
            assert_eq!(
                exact(ctx.norm(&g.invert(&x).unwrap(), &cap).unwrap()),
                nx,
                "{name}: symmetry"
            );
            let ny = exact(ctx.norm(&y, &cap).unwrap());
            let nxy = exact(ctx.norm(&g.multiply(&x, &y).unwrap(), &cap).unwrap());
            assert!(nxy <= &nx + &ny, "{name}: triangle inequality at {x}, {y}");
            let d = exact(ctx.distance(&x, &y, &cap).unwrap());
            let hx = g.multiply(&h, &x).unwrap();
            let hy = g.multiply(&h, &y).unwrap();
            assert_eq!(
                exact(ctx.distance(&hx, &hy, &cap).unwrap()),
                d,
                "{name}: left invariance"
            );
        }
    }
}

#[test]
fn truncation_is_stable_under_deeper_truncation() {
    for depth in [3u32, 4] {
        let shallow = MetricContext::new(WeightFunction::standard(GroupSpec::RationalsTruncated { depth }).unwrap());
        let deep =
            MetricContext::new(WeightFunction::standard(GroupSpec::RationalsTruncated { depth: depth + 1 }).unwrap());
        let ball = shallow.ball_with_norms(&int(4)).unwrap();
        for (x, n) in ball.entries() {
            assert_eq!(exact(deep.norm(x, &int(4)).unwrap()), *n, "depth {depth}: norm of {x}");
        }
        let below = frac(7, 2);
        assert_eq!(
            shallow.ball(&below).unwrap(),
            deep.ball(&below).unwrap(),
            "depth {depth}"
        );
    }
}

fn z_contexts() -> (MetricContext, MetricContext) {
    let z = GroupSpec::FreeAbelian { rank: 1 };
    let unit = MetricContext::standard(z.clone()).unwrap();
    let w = WeightFunction::new(
        z,
        vec![
            (GroupElement::Vector(vec![1]), int(1)),
            (GroupElement::Vector(vec![3]), int(1)),
        ],
    )
    .unwrap();
    (unit, MetricContext::new(w))
}

fn assert_profile_shape(ctx_d: &MetricContext, ctx_dp: &MetricContext, hom: Option<&Homomorphism>, search: i64) {
    let ts: Vec<BigRational> = (1..=20).map(int).collect();
    let rows = rho_profile(ctx_d, ctx_dp, hom, &ts, &int(search)).unwrap();
    let ball = ctx_d.ball_with_norms(&int(search)).unwrap();
    for w in rows.windows(2) {
        assert!(w[0].rho2 <= w[1].rho2, "rho2 decreases at t = {}", w[1].t);
        if let (Some(a), Some(b)) = (&w[0].rho1, &w[1].rho1) {
            assert!(a <= b, "rho1 decreases at t = {}", w[1].t);
        }
    }
    for row in &rows {
        let boundary = ball.entries().iter().any(|(_, n)| *n == row.t);
        if let (Some(r1), true) = (&row.rho1, boundary) {
            assert!(*r1 <= row.rho2, "rho1 > rho2 at t = {}", row.t);
        }
    }
}

#[test]
fn rho_profiles_are_monotone() {
    let (unit, three) = z_contexts();
    assert_profile_shape(&unit, &three, None, 60);
    assert_profile_shape(&three, &unit, None, 60);

    let z2 = GroupSpec::FreeAbelian { rank: 2 };
    let l1 = MetricContext::standard(z2.clone()).unwrap();
    let skew = MetricContext::new(
        WeightFunction::new(
            z2.clone(),
            vec![
                (GroupElement::Vector(vec![1, 0]), int(2)),
                (GroupElement::Vector(vec![0, 1]), int(1)),
                (GroupElement::Vector(vec![1, 1]), frac(3, 2)),
            ],
        )
        .unwrap(),
    );
    assert_profile_shape(&l1, &skew, None, 24);

    let diag = Homomorphism::new(
        GroupSpec::FreeAbelian { rank: 1 },
        z2,
        vec![GroupElement::Vector(vec![1, 1])],
    )
    .unwrap();
    assert_profile_shape(&unit, &l1, Some(&diag), 40);
}

#[test]
fn equivalent_metrics_satisfy_the_sandwich() {
    let (unit, three) = z_contexts();
    for (a, b) in [(&unit, &three), (&three, &unit)] {
        let report = check_coarse_sandwich(a, b, None, &int(12)).unwrap();
        assert!(report.rho1_certified);
        assert!(report.violations.is_empty(), "{:?}", report.violations.first());
        let n = a.ball(&int(12)).unwrap().len();
        assert_eq!(report.pairs_checked, n * (n + 1) / 2);
    }
}

proptest! {
    #[test]
    fn integer_ball_cardinality(num in 0i64..400, den in 1i64..20) {
        let ctx = MetricContext::standard(GroupSpec::FreeAbelian { rank: 1 }).unwrap();
        let r = frac(num, den);
        let ball = ctx.ball(&r).unwrap();
        prop_assert_eq!(ball.len() as i64, 2 * (num / den) + 1);
        let smaller = ctx.ball(&frac(num, den + 1)).unwrap();
        prop_assert!(smaller.iter().all(|x| ball.contains(x)));
    }

    #[test]
    fn l1_norm_on_the_lattice(a in -6i64..=6, b in -6i64..=6, c in -6i64..=6) {
        let ctx = MetricContext::standard(GroupSpec::FreeAbelian { rank: 3 }).unwrap();
        let n = ctx.norm(&GroupElement::Vector(vec![a, b, c]), &int(18)).unwrap();
        prop_assert_eq!(exact(n), int(a.abs() + b.abs() + c.abs()));
    }

    #[test]
    fn heisenberg_distance_is_left_invariant(
        g in prop::array::uniform3(-2i64..=2),
        x in prop::array::uniform3(-2i64..=2),
        y in prop::array::uniform3(-2i64..=2),
    ) {
        let h = GroupSpec::Heisenberg;
        let ctx = MetricContext::standard(h.clone()).unwrap();
        let [g, x, y] = [g, x, y].map(|[a, b, c]| GroupElement::Triple(a, b, c));
        let cap = int(60);
        let d = ctx.distance(&x, &y, &cap).unwrap();
        let gx = h.multiply(&g, &x).unwrap();
        let gy = h.multiply(&g, &y).unwrap();
        prop_assert_eq!(ctx.distance(&gx, &gy, &cap).unwrap(), d);
    }
}
