use std::path::PathBuf;
use std::process::{Command as Proc, Output};

use mincut::cli::{parse_epsilon, produce, verify, Artifact, Command, Profile, RunConfig};
use mincut::fixtures;
use mincut::graph::write_graph;
use mincut::oracle::oracle_all_pairs_mincut;

fn bin(args: &[&str], env: Option<(&str, &str)>) -> Output {
    let mut c = Proc::new(env!("CARGO_BIN_EXE_mincut"));
    c.args(args).env_remove("MINCUT_PROFILE");
    if let Some((k, v)) = env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mincut-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn fast(cmd: Command) -> RunConfig {
    RunConfig { profile: Profile::Fast, ..RunConfig::new(cmd) }
}

fn s(x: &str) -> String {
    x.to_string()
}

#[test]
fn ghtree_on_p3_file_is_a_path_and_verifies() {
    let g = scratch("p3.txt");
    std::fs::write(&g, write_graph(&fixtures::p3())).unwrap();
    let tree = scratch("p3.gh");
    let out = bin(&["ghtree", g.to_str().unwrap(), "-o", tree.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let art = Artifact::parse(&std::fs::read_to_string(&tree).unwrap()).unwrap();
    let Artifact::Ghtree { edges, f } = &art else { panic!("wrong kind") };
    assert_eq!(f, &vec![1, 2, 3]);
    let mut e: Vec<_> = edges.iter().map(|&(a, b, w)| (a.min(b), a.max(b), w)).collect();
    e.sort();
    assert_eq!(e, vec![(1, 2, 1), (2, 3, 2)]);
    let v = bin(&["verify", tree.to_str().unwrap(), "--graph", g.to_str().unwrap()], None);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&v.stdout).starts_with("ok ghtree"));
}

#[test]
fn kcc_on_dumbbell_gives_two_parts() {
    let o = oracle_all_pairs_mincut(&fixtures::dumbbell()).unwrap();
    let want: Vec<Vec<usize>> =
        o.tau_components(&(0..6).collect::<Vec<_>>(), 2).iter().map(|p| p.iter().map(|v| v + 1).collect()).collect();
    assert_eq!(want.len(), 2);
    let out = bin(&["kcc", "@dumbbell", "-k", "2", "--json"], None);
    assert!(out.status.success());
    let art = Artifact::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(art, Artifact::Kcc { k: 2, parts: want });
}

#[test]
fn corrupted_tree_fails_with_named_pair() {
    let tree = scratch("bad.gh");
    std::fs::write(&tree, "# mincut ghtree\ng 1 2 5\ng 2 3 2\nf 1 1\nf 2 2\nf 3 3\n").unwrap();
    let out = bin(&["verify", tree.to_str().unwrap(), "--graph", "@P3"], None);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("pair (1, 2)"), "{err}");
    let json = bin(&["verify", tree.to_str().unwrap(), "--graph", "@P3", "--json"], None);
    assert_eq!(json.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&json.stderr).contains("\"pair\""));
}

#[test]
fn exit_codes() {
    let bad = scratch("bad.txt");
    std::fs::write(&bad, "p 3 1\ne 1 2 0\n").unwrap();
    assert_eq!(bin(&["ghtree", bad.to_str().unwrap()], None).status.code(), Some(2));
    assert_eq!(bin(&["ghtree"], None).status.code(), Some(2));
    assert_eq!(bin(&["sparsify", "@K4", "--epsilon", "1.5"], None).status.code(), Some(2));
    assert_eq!(bin(&["kcc", "@P3", "-k", "1"], Some(("MINCUT_PROFILE", "turbo"))).status.code(), Some(2));
    let art = scratch("big.kcc");
    let made = bin(&["kcc", "@random:16:24:4", "-k", "2", "--seed", "7", "-o", art.to_str().unwrap()], None);
    assert!(made.status.success());
    let v = bin(&["verify", art.to_str().unwrap(), "--graph", "@random:16:24:4", "--seed", "7"], None);
    assert_eq!(v.status.code(), Some(3));
    let ok = bin(
        &["verify", art.to_str().unwrap(), "--graph", "@random:16:24:4", "--seed", "7", "--oracle-limit", "16"],
        None,
    );
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let garbage = scratch("garbage.gh");
    std::fs::write(&garbage, "# mincut ghtree\nx 1 2\n").unwrap();
    assert_eq!(bin(&["verify", garbage.to_str().unwrap(), "--graph", "@P3"], None).status.code(), Some(2));
}

#[test]
fn env_profile_and_jobs_do_not_change_results() {
    let a = bin(&["ghtree", "@random:11:25:9", "--seed", "3"], None);
    let b = bin(&["ghtree", "@random:11:25:9", "--seed", "3", "--jobs", "2"], Some(("MINCUT_PROFILE", "fast")));
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn epsilon_forms() {
    assert_eq!(parse_epsilon("0.05").unwrap(), parse_epsilon("1/20").unwrap());
    assert!(parse_epsilon("0").is_err());
    assert!(parse_epsilon("1").is_err());
    assert!(parse_epsilon("abc").is_err());
}

fn commands(input: &str, n: usize) -> Vec<Command> {
    let src = if n > 2 { 2 } else { 1 };
    vec![
        Command::Ghtree { input: s(input), terminals: None },
        Command::Ghtree {
            input: s(input),
            terminals: Some((1..=n).step_by(2).map(|v| v.to_string()).collect::<Vec<_>>().join(",")),
        },
        Command::Ssmc { input: s(input), source: src },
        Command::Kcc { input: s(input), k: 2 },
        Command::Guidetrees { input: s(input), source: src, terminals: None },
        Command::Sparsify { input: s(input), terminals: None },
    ]
}

#[test]
fn every_artifact_round_trips_and_verifies() {
    let mut inputs: Vec<(String, u64)> =
        ["@P3", "@K4", "@dumbbell", "@star", "@C4", "@single"].iter().map(|x| (s(x), 0)).collect();
    for seed in 0..12 {
        inputs.push((format!("@random:{}:{}:7", 4 + seed as usize % 9, 12 + seed as usize), seed));
    }
    let mut kinds = std::collections::BTreeSet::new();
    for (input, seed) in inputs {
        let g = mincut::cli::load_graph(&input, seed).unwrap();
        for cmd in commands(&input, g.n()) {
            if matches!(cmd, Command::Ghtree { terminals: Some(_), .. }) && g.n() < 4 {
                continue;
            }
            let cfg = RunConfig { seed, ..fast(cmd.clone()) };
            let art = produce(&cmd, &cfg).unwrap_or_else(|e| panic!("{input} {cmd:?}: {e}"));
            assert_eq!(Artifact::parse(&art.to_text()).unwrap(), art, "text round trip {input} {cmd:?}");
            assert_eq!(Artifact::parse(&art.to_json()).unwrap(), art, "json round trip {input} {cmd:?}");
            let r = verify(&g, &art, 14).unwrap();
            assert!(r.ok, "{input} {cmd:?}: {}", r.message);
            kinds.insert(art.kind());
        }
    }
    assert_eq!(kinds.len(), 5);
}
