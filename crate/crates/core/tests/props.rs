use mincut::cli::{produce, Artifact, Command, Profile, RunConfig};
use mincut::fixtures;
use mincut::flow::{isolating_cuts, st_mincut};
use mincut::ghtree::{ghtree_with, GhConfig};
use mincut::graph::{parse_graph, write_graph};
use mincut::hitmiss::hit_and_miss_family;
use mincut::oracle::oracle_all_pairs_mincut;
use mincut::ssmc::{ssmc_all, SsmcConfig};
use mincut::WeightedGraph;
use proptest::prelude::*;

fn graph() -> impl Strategy<Value = WeightedGraph> {
    (any::<u64>(), 2usize..=10, 0usize..=14, 1i64..=12).prop_map(|(seed, n, extra, w)| {
        let m = (n - 1 + extra).min(n * (n - 1) / 2 + n);
        fixtures::random_connected(seed, n, m, w)
    })
}

fn mask_set(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::btree_set(0..n, 0..=n.min(6)).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn graph_text_round_trips(g in graph()) {
        prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn tree_path_minima_are_mincuts(g in graph()) {
        let o = oracle_all_pairs_mincut(&g).unwrap();
        let all: Vec<usize> = (0..g.n()).collect();
        let (t, st) = ghtree_with(&g, &all, &GhConfig::fast()).unwrap();
        prop_assert!(t.check_against(&g, &o).is_ok());
        prop_assert_eq!(st.fallbacks, 0);
    }

    #[test]
    fn steiner_tree_maps_into_terminals(g in graph(), pick in any::<u64>()) {
        let n = g.n();
        let mut u: Vec<usize> = (0..n).filter(|v| pick >> v & 1 == 1).collect();
        if u.len() < 2 {
            u = vec![0, n - 1];
        }
        let (t, _) = ghtree_with(&g, &u, &GhConfig::fast()).unwrap();
        prop_assert_eq!(&t.terminals, &u);
        prop_assert!(t.f.iter().all(|x| u.contains(x)));
        prop_assert!(t.check_by_flow(&g).is_ok());
    }

    #[test]
    fn single_source_matches_maxflow(g in graph(), s in 0usize..10) {
        let s = s % g.n();
        let (e, _) = ssmc_all(&g, s, &SsmcConfig::fast()).unwrap();
        for t in (0..g.n()).filter(|&t| t != s) {
            prop_assert_eq!(e.get(t), Some(st_mincut(&g, s, t).value));
        }
    }

    #[test]
    fn isolating_cuts_are_disjoint_minimal(g in graph(), pick in any::<u64>()) {
        let n = g.n();
        let mut r: Vec<usize> = (0..n).filter(|v| pick >> v & 1 == 1).collect();
        if r.len() < 2 {
            r = vec![0, n - 1];
        }
        let groups: Vec<Vec<usize>> = r.iter().map(|&v| vec![v]).collect();
        let cuts = isolating_cuts(&g, &groups).unwrap();
        let mut seen = vec![false; n];
        for (&v, c) in r.iter().zip(&cuts) {
            prop_assert!(c.s_side.contains(v));
            for &x in c.s_side.members() {
                prop_assert!(!seen[x]);
                seen[x] = true;
            }
            let side: Vec<bool> = (0..n).map(|x| c.s_side.contains(x)).collect();
            prop_assert_eq!(g.cut_of(&side), c.value);
            let others: Vec<usize> = r.iter().copied().filter(|&x| x != v).collect();
            let mut h = g.clone();
            let sink = others[0];
            for &x in &others[1..] {
                h.add_edge(sink, x, 1 << 40);
            }
            prop_assert_eq!(st_mincut(&h, v, sink).value, c.value);
        }
    }

    #[test]
    fn hit_and_miss_separates(n in 1usize..=40, a in 0usize..=4, b in 0usize..=2, seed in any::<u64>()) {
        let fam = hit_and_miss_family(n, a, b).unwrap();
        let mut pool: Vec<usize> = (0..n).collect();
        let mut x = seed;
        for i in (1..pool.len()).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            pool.swap(i, (x >> 33) as usize % (i + 1));
        }
        let (aa, bb) = (a.min(n), b.min(n - a.min(n)));
        let (miss, hit) = (&pool[..aa], &pool[aa..aa + bb]);
        prop_assert!(fam.functions.iter().any(|f| miss.iter().all(|&v| !f.eval(v)) && hit.iter().all(|&v| f.eval(v))));
    }

    #[test]
    fn artifacts_round_trip(g in graph(), s in 0usize..10, k in 1i64..6, u in mask_set(10)) {
        let path = std::env::temp_dir().join(format!("mincut-props-{}-{}.txt", std::process::id(), s * 100 + k as usize));
        std::fs::write(&path, write_graph(&g)).unwrap();
        let input = path.to_str().unwrap().to_string();
        let n = g.n();
        let terms: Vec<String> = u.iter().filter(|&&v| v < n).map(|v| (v + 1).to_string()).collect();
        let mut cmds = vec![
            Command::Ghtree { input: input.clone(), terminals: None },
            Command::Ssmc { input: input.clone(), source: s % n + 1 },
            Command::Kcc { input: input.clone(), k },
        ];
        if terms.len() >= 2 {
            cmds.push(Command::Ghtree { input: input.clone(), terminals: Some(terms.join(",")) });
        }
        for cmd in cmds {
            let cfg = RunConfig { profile: Profile::Fast, ..RunConfig::new(cmd.clone()) };
            let art = produce(&cmd, &cfg).unwrap();
            prop_assert_eq!(&Artifact::parse(&art.to_text()).unwrap(), &art);
            prop_assert_eq!(&Artifact::parse(&art.to_json()).unwrap(), &art);
        }
        std::fs::remove_file(&path).ok();
    }
}
