use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const TC: &str = "\
.decl edge(s:symbol, t:symbol, @prov)
.input edge
.decl path(s:symbol, t:symbol, @prov)
.output path
path(x, y) :- edge(x, y).
path(x, y) :- path(x, z), edge(z, y).
";

fn dlprov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlprov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// A temp dir with `tc.dl` and `facts/edge.facts` holding the Paris edges.
fn paris_dir() -> TempDir {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("tc.dl"), TC).unwrap();
    fs::create_dir(dir.path().join("facts")).unwrap();
    fs::write(
        dir.path().join("facts/edge.facts"),
        "Paris\tLondon\t3\nParis\tLille\t1\nLille\tLondon\t0\n",
    )
    .unwrap();
    dir
}

fn p(dir: &TempDir, rel: &str) -> String {
    dir.path().join(rel).to_str().unwrap().to_string()
}

fn run_tc(dir: &TempDir, strategy: &str, out: &str) -> Output {
    dlprov(&[
        "run",
        &p(dir, "tc.dl"),
        "--facts",
        &p(dir, "facts"),
        "--semiring",
        "tropical",
        "--strategy",
        strategy,
        "--out",
        &p(dir, out),
    ])
}

#[test]
fn run_writes_paris_london() {
    let dir = paris_dir();
    for strategy in ["naive", "best-first", "seminaive", "stratified"] {
        let o = run_tc(&dir, strategy, strategy);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let csv = fs::read_to_string(dir.path().join(strategy).join("path.csv")).unwrap();
        assert!(csv.lines().any(|l| l == "Paris\tLondon\t1"), "{csv}");
        let stats = fs::read_to_string(dir.path().join(strategy).join("stats.txt")).unwrap();
        assert!(stats.starts_with(&format!("strategy\t{strategy}\n")));
    }
}

#[test]
fn run_is_deterministic() {
    let dir = paris_dir();
    run_tc(&dir, "seminaive", "a");
    run_tc(&dir, "seminaive", "b");
    for file in ["path.csv", "stats.txt"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
}

#[test]
fn lattice_strategy_rejects_tropical() {
    let dir = paris_dir();
    let o = run_tc(&dir, "lattice", "out");
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("lattice"));
}

#[test]
fn empty_facts_dir_gives_empty_outputs() {
    let dir = paris_dir();
    fs::create_dir(dir.path().join("none")).unwrap();
    let o = dlprov(&[
        "run",
        &p(&dir, "tc.dl"),
        "--facts",
        &p(&dir, "none"),
        "--semiring",
        "tropical",
        "--out",
        &p(&dir, "out"),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read_to_string(dir.path().join("out/path.csv")).unwrap(),
        ""
    );
}

#[test]
fn set_lattice_run() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("tc.dl"), TC).unwrap();
    fs::create_dir(dir.path().join("facts")).unwrap();
    fs::write(
        dir.path().join("facts/edge.facts"),
        "1\t2\t{a}\n2\t3\t{b}\n1\t3\t{a,b,c}\n",
    )
    .unwrap();
    for strategy in ["naive", "lattice"] {
        let o = dlprov(&[
            "run",
            &p(&dir, "tc.dl"),
            "--facts",
            &p(&dir, "facts"),
            "--semiring",
            "set-lattice",
            "--universe",
            "a,b,c",
            "--strategy",
            strategy,
            "--out",
            &p(&dir, strategy),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let csv = fs::read_to_string(dir.path().join("lattice/path.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "1\t3\t{a,b}"), "{csv}");
    assert_eq!(
        csv,
        fs::read_to_string(dir.path().join("naive/path.csv")).unwrap()
    );
}

#[test]
fn usage_and_input_errors() {
    let dir = paris_dir();
    assert_eq!(code(&dlprov(&[])), 1);
    assert_eq!(code(&dlprov(&["run"])), 1);
    assert_eq!(code(&run_tc(&dir, "fastest", "out")), 1);
    assert_eq!(code(&dlprov(&["--help"])), 0);

    fs::write(dir.path().join("bad.dl"), "path(x) :- .").unwrap();
    let o = dlprov(&[
        "run",
        &p(&dir, "bad.dl"),
        "--semiring",
        "tropical",
        "--out",
        &p(&dir, "out"),
    ]);
    assert_eq!(code(&o), 2);
    let o = dlprov(&[
        "run",
        &p(&dir, "missing.dl"),
        "--semiring",
        "tropical",
        "--out",
        &p(&dir, "out"),
    ]);
    assert_eq!(code(&o), 2);
    fs::write(dir.path().join("facts/edge.facts"), "Paris\tLondon\n").unwrap();
    assert_eq!(code(&run_tc(&dir, "seminaive", "out")), 2);
    // No flag and no header in the program.
    let o = dlprov(&["run", &p(&dir, "tc.dl"), "--out", &p(&dir, "out")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn double_round_trip_through_hypergraph_text() {
    let dir = paris_dir();
    let o = dlprov(&[
        "translate",
        "dl2hg",
        &p(&dir, "tc.dl"),
        &p(&dir, "hg.txt"),
        "--facts",
        &p(&dir, "facts"),
        "--semiring",
        "tropical",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for mode in ["hg2dl-simple", "hg2dl-fixed"] {
        let out = p(&dir, mode);
        assert_eq!(
            code(&dlprov(&["translate", mode, &p(&dir, "hg.txt"), &out])),
            0
        );
        let program = Path::new(&out).join("program.dl");
        let res = p(&dir, &format!("{mode}-out"));
        let o = dlprov(&[
            "run",
            program.to_str().unwrap(),
            "--facts",
            &out,
            "--out",
            &res,
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let csv = fs::read_to_string(Path::new(&res).join("R.csv")).unwrap();
        assert!(
            csv.lines().any(|l| l == "path(Paris,London)\t1"),
            "{mode}: {csv}"
        );
    }
}

#[test]
fn fixed_translation_of_empty_hypergraph() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("empty.hg"), "semiring tropical\n").unwrap();
    let out = p(&dir, "out");
    assert_eq!(
        code(&dlprov(&[
            "translate",
            "hg2dl-fixed",
            &p(&dir, "empty.hg"),
            &out
        ])),
        0
    );
    let program = fs::read_to_string(dir.path().join("out/program.dl")).unwrap();
    assert_eq!(program.lines().filter(|l| l.contains(":-")).count(), 5);
    for entry in fs::read_dir(&out).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "facts") {
            assert_eq!(fs::read_to_string(&path).unwrap(), "", "{}", path.display());
        }
    }
}

#[test]
fn andor_import() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("g.andor"),
        "semiring boolean\nor goal\nor x\nor y\nand a1 -> goal : x y\nand a2 -> goal : y\n",
    )
    .unwrap();
    let o = dlprov(&[
        "translate",
        "andor2hg",
        &p(&dir, "g.andor"),
        &p(&dir, "g.hg"),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("g.hg")).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("edge ")).count(), 2);
    fs::write(
        dir.path().join("bad.andor"),
        "semiring boolean\nor goal\nand a -> goal : nowhere\n",
    )
    .unwrap();
    assert_eq!(
        code(&dlprov(&[
            "translate",
            "andor2hg",
            &p(&dir, "bad.andor"),
            &p(&dir, "x.hg")
        ])),
        2
    );
}

#[test]
fn bench_rows_and_counters() {
    let o = dlprov(&[
        "bench",
        "--random-graph",
        "200",
        "--strategies",
        "naive,seminaive",
        "--repetitions",
        "3",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.iter().filter(|r| r[0] == "naive").count(), 3);
    let inst = |r: &Vec<&str>| r[4].parse::<u64>().unwrap();
    let naive = rows.iter().find(|r| r[0] == "naive").map(inst).unwrap();
    let semi = rows.iter().find(|r| r[0] == "seminaive").map(inst).unwrap();
    assert!(semi < naive, "{semi} vs {naive}");
}

#[test]
fn bench_on_files_and_fault_injection() {
    let dir = paris_dir();
    let o = dlprov(&[
        "bench",
        &p(&dir, "tc.dl"),
        "--facts",
        &p(&dir, "facts"),
        "--semiring",
        "tropical",
        "--strategies",
        "naive,best-first,seminaive,stratified",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 5);
    let o = dlprov(&[
        "bench",
        "--random-graph",
        "10",
        "--strategies",
        "naive,seminaive",
        "--inject-fault",
    ]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("disagree on path("));
}

#[test]
fn check_builtins_and_misdeclared() {
    for args in [
        vec!["check", "tropical"],
        vec!["check", "boolean"],
        vec!["check", "counting"],
        vec!["check", "set-lattice", "--universe", "a,b,c"],
        vec!["check", "chain-product", "--chains", "3,2"],
    ] {
        let o = dlprov(&args);
        assert_eq!(code(&o), 0, "{args:?}\n{}", stdout(&o));
        assert!(stdout(&o).ends_with("result\tpass\n"));
    }
    let o = dlprov(&[
        "check",
        "counting",
        "--properties",
        "commutative,idempotent,zero_closed",
    ]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("FAIL\tsuperiority"));
    let a = stdout(&dlprov(&["check", "tropical", "--seed", "7"]));
    let b = stdout(&dlprov(&["check", "tropical", "--seed", "7"]));
    assert_eq!(a, b);
}
