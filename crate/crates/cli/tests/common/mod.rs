#![allow(dead_code)]

use asdim_cli::{run, Outcome, EXIT_DOMAIN, EXIT_OK, EXIT_PARSE, EXIT_VIOLATIONS};
use std::path::PathBuf;

pub fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

pub fn invoke<S: AsRef<str>>(args: &[S]) -> Outcome {
    run(std::iter::once("asdim").chain(args.iter().map(AsRef::as_ref)))
}

/// Every end-to-end invocation with its expected exit code.
pub fn corpus() -> Vec<(Vec<String>, i32)> {
    let desk = data("desk.gw");
    let f = desk.as_str();
    let (table, series, broken) = (data("path4.json"), data("series_z4_ext.json"), data("broken.gw"));
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (
            vec![
                "norm",
                "--file",
                f,
                "--weights",
                "w1",
                "--element",
                "(3,4)",
                "--cap",
                "100",
            ],
            EXIT_OK,
        ),
        (
            vec![
                "norm",
                "--file",
                f,
                "--weights",
                "unit",
                "--element",
                "-9",
                "--cap",
                "5",
            ],
            EXIT_OK,
        ),
        (
            vec![
                "norm",
                "--file",
                f,
                "--weights",
                "wq",
                "--element",
                "1/3",
                "--cap",
                "10",
            ],
            EXIT_OK,
        ),
        (
            vec![
                "norm",
                "--file",
                f,
                "--weights",
                "wh",
                "--element",
                "(1,1,1)",
                "--cap",
                "20",
            ],
            EXIT_OK,
        ),
        (
            vec![
                "dist",
                "--file",
                f,
                "--weights",
                "w13",
                "--x",
                "0",
                "--y",
                "7",
                "--cap",
                "100",
            ],
            EXIT_OK,
        ),
        (vec!["ball", "--file", f, "--weights", "w1", "--radius", "3"], EXIT_OK),
        (
            vec!["ball", "--file", f, "--weights", "wq", "--radius", "4", "--count-only"],
            EXIT_OK,
        ),
        (
            vec![
                "profile", "--file", f, "--d", "unit", "--dprime", "w13", "--t", "1..20", "--search", "60",
            ],
            EXIT_OK,
        ),
        (
            vec![
                "profile", "--file", f, "--d", "w5", "--dprime", "unit", "--hom", "times5", "--t", "1,2,5/2",
                "--search", "20",
            ],
            EXIT_OK,
        ),
        (
            vec![
                "sandwich", "--file", f, "--d", "w13", "--dprime", "unit", "--radius", "20",
            ],
            EXIT_OK,
        ),
        (
            vec![
                "sandwich", "--file", f, "--d", "unit", "--dprime", "w1", "--hom", "diag", "--radius", "6",
            ],
            EXIT_OK,
        ),
        (
            vec![
                "stabilizer",
                "--file",
                f,
                "--action",
                "diag",
                "--space",
                "w1",
                "--acting",
                "unit",
                "--x0",
                "(0,0)",
                "--radius",
                "4",
                "--search",
                "10",
            ],
            EXIT_OK,
        ),
        (vec!["cover-make", "--d", "5"], EXIT_OK),
        (vec!["cover-make", "--d", "2", "--rank", "3"], EXIT_OK),
        (
            vec!["cover-verify", "--file", f, "--cover", "i5", "--radius", "100"],
            EXIT_OK,
        ),
        (
            vec!["cover-verify", "--file", f, "--cover", "sq", "--radius", "12"],
            EXIT_OK,
        ),
        (
            vec!["cover-verify", "--file", f, "--cover", "pairs", "--radius", "3"],
            EXIT_OK,
        ),
        (
            vec!["cover-verify", "--file", f, "--cover", "tampered", "--radius", "20"],
            EXIT_VIOLATIONS,
        ),
        (
            vec![
                "cover-extend",
                "--file",
                f,
                "--weights",
                "w5",
                "--cover",
                "i5",
                "--via",
                "times5",
                "--d",
                "5",
                "--radius",
                "60",
                "--bound",
                "25",
            ],
            EXIT_OK,
        ),
        (
            vec![
                "cover-extend",
                "--file",
                f,
                "--weights",
                "w5",
                "--cover",
                "i5",
                "--via",
                "times5",
                "--d",
                "5",
                "--radius",
                "30",
                "--bound",
                "2",
            ],
            EXIT_VIOLATIONS,
        ),
        (
            vec![
                "cover-extend",
                "--file",
                f,
                "--weights",
                "wh",
                "--cover",
                "i5",
                "--via",
                "shift",
                "--d",
                "1",
                "--radius",
                "4",
            ],
            EXIT_DOMAIN,
        ),
        (
            vec![
                "solve",
                "--file",
                f,
                "--weights",
                "unit",
                "--radius",
                "7",
                "--k",
                "2",
                "--d",
                "2",
                "--oracle",
            ],
            EXIT_OK,
        ),
        (
            vec![
                "solve",
                "--file",
                f,
                "--weights",
                "w1",
                "--radius",
                "2",
                "--k",
                "2",
                "--d",
                "2",
            ],
            EXIT_OK,
        ),
        (
            vec!["solve", "--table", &table, "--k", "2", "--d", "1", "--oracle"],
            EXIT_OK,
        ),
        (vec!["snf", "--matrix", "[[2,4,4],[-6,6,12],[10,-4,-16]]"], EXIT_OK),
        (vec!["snf", "--matrix", "", "--cols", "3"], EXIT_OK),
        (vec!["rank", "--matrix", "[[2,0,0]]", "--gens", "3"], EXIT_OK),
        (vec!["rank", "--file", f, "--group", "T"], EXIT_OK),
        (vec!["hirsch", "--file", f, "--series", "lamplighter"], EXIT_OK),
        (vec!["bounds", "--file", f, "--series", "heisenberg"], EXIT_OK),
        (vec!["bounds", "--file", f, "--series", "lamplighter_witness"], EXIT_OK),
        (vec!["bounds", "--file", f, "--series", "bs12"], EXIT_OK),
        (vec!["bounds", "--file", f, "--series", "z4"], EXIT_OK),
        (vec!["bounds", "--series-json", &series], EXIT_OK),
        (vec!["fmt", "--file", &broken], EXIT_PARSE),
        (
            vec!["norm", "--file", f, "--weights", "wq", "--element", "1/7", "--cap", "3"],
            EXIT_PARSE,
        ),
        (vec!["snf", "--matrix", "[[1,2],[3]]"], EXIT_PARSE),
        (vec!["bogus"], EXIT_PARSE),
    ];
    cases
        .into_iter()
        .map(|(args, code)| (args.into_iter().map(String::from).collect(), code))
        .collect()
}
