mod common;

use asdim_core::workbench::{parse, SectionKind};
use common::rng;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random well-formed workbench file exercising every section kind.
fn random_file(r: &mut ChaCha8Rng) -> String {
    let mut out = String::from("# generated\n");
    let rank = r.gen_range(1..=3);
    let vector = |r: &mut ChaCha8Rng| {
        let v: Vec<String> = (0..rank).map(|_| r.gen_range(-3..=3).to_string()).collect();
        if rank == 1 {
            v[0].clone()
        } else {
            format!("({})", v.join(","))
        }
    };
    out += &format!("[group:A]\nkind = free_abelian\nrank = {rank}\n\n");
    out += &format!("[group:C]\nkind = finite_cyclic\norder = {}\n\n", r.gen_range(1..=9));
    let gens = r.gen_range(1..=3);
    let rel: Vec<String> = (0..gens).map(|_| r.gen_range(-4..=4).to_string()).collect();
    out += &format!(
        "[group:P]\nkind = presented_abelian\ngenerators = {gens}\nrelations = {}\n\n",
        rel.join(",")
    );
    out += "[group:H]\nkind = heisenberg\n\n";
    out += "[group:AxH]\nkind = direct_product\nfactors = A, H\n\n";
    out += &format!(
        "[group:Q]\nkind = rationals_truncated\ndepth = {}\n\n",
        r.gen_range(1..=4)
    );
    out += &format!("[group:F]\nkind = free\nrank = {}\n\n", r.gen_range(1..=3));

    let mut entries = Vec::new();
    for i in 0..rank {
        let mut v = vec!["0".to_string(); rank];
        v[i] = "1".into();
        let g = if rank == 1 {
            v[0].clone()
        } else {
            format!("({})", v.join(","))
        };
        entries.push(format!("{g}:{}/{}", r.gen_range(1..=5), r.gen_range(1..=3)));
    }
    out += &format!("[weights:wa]\ngroup = A\nentries = {}\n\n", entries.join(", "));
    out += &format!(
        "[weights:wq]\ngroup = Q\nweight = {}/{}\ntruncation = intrinsic\n\n",
        r.gen_range(1..=4),
        r.gen_range(1..=4)
    );
    out += "[weights:wh]\ngroup = H\n\n";

    let images: Vec<String> = (0..rank)
        .map(|_| format!("({},{},{})", r.gen_range(-2..=2), 0, r.gen_range(-2..=2)))
        .collect();
    out += &format!("[hom:f]\nsource = A\ntarget = H\nimages = {}\n\n", images.join(", "));

    out += &format!("[cover:i]\nkind = interval\nd = {}\n\n", r.gen_range(1..=6));
    out += "[cover:ii]\nkind = product\nfactors = i, i\n\n";
    let (l, gap) = (r.gen_range(1..=4), r.gen_range(1..=3));
    out += &format!(
        "[cover:s]\nkind = symbolic\nd = {}\nr = {}\nfamily = interval({l},{},{})\nfamily = product(interval({l},{},0), interval(1,2,1))\n\n",
        gap, l - 1, l + gap, r.gen_range(-3..=3), l + gap
    );
    let mut points: Vec<String> = Vec::new();
    while points.len() < 4 {
        let p = vector(r);
        if !points.contains(&p) {
            points.push(p);
        }
    }
    out += &format!(
        "[cover:e]\nkind = explicit\nweights = wa\nd = 1\nr = 9/2\nfamily = {{{}, {}}}, {{{}}}\nfamily = {{{}}}\n\n",
        points[0], points[1], points[2], points[3]
    );

    let mut quotients = Vec::new();
    for _ in 0..r.gen_range(0..=4) {
        quotients.push(match r.gen_range(0..4) {
            0 => format!("free {}", r.gen_range(1..=3)),
            1 => format!("presented 2 [{},{}]", r.gen_range(-3..=3), r.gen_range(-3..=3)),
            2 => format!("rank {} : declared rank", r.gen_range(0..=2)),
            _ => "torsion : periodic".to_string(),
        });
    }
    out += "[series:s1]\n";
    for q in &quotients {
        out += &format!("quotient = {q}\n");
    }
    if r.gen_bool(0.5) {
        out += "witness = 0 : trivial subgroup\n";
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_print_parse_is_identity(seed in any::<u64>()) {
        let text = random_file(&mut rng(seed));
        let first = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        let printed = first.to_text();
        let second = parse(&printed).map_err(|e| TestCaseError::fail(format!("{e}\n{printed}")))?;
        prop_assert_eq!(&second, &first);
        prop_assert_eq!(second.to_text(), printed);
        prop_assert_eq!(first.names(SectionKind::Cover), vec!["i", "ii", "s", "e"]);
    }

    #[test]
    fn garbage_never_panics(text in "[\\[\\]a-z:=,;(){}0-9 \n#/-]{0,200}") {
        let _ = parse(&text);
    }
}
