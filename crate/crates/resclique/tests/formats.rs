use proptest::prelude::*;
use resclique::formats::{read_cnf, read_graph, read_proof, read_robp, write_cnf, write_graph, write_proof, write_robp, Encoding};
use resclique_core::cnf::{encode_clique, encode_clique_block};
use resclique_core::construct::build_search_program;
use resclique_core::graph::{balanced_partition, has_clique_of_size, sample_gnp};
use resclique_core::robp::robp_to_refutation;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn everything_round_trips(n in 3usize..10, p in 0.0f64..1.0, seed in any::<u64>(), k in 2usize..4) {
        let g = sample_gnp(n, p, seed).unwrap();
        let back = read_graph(&write_graph(&g)).unwrap();
        prop_assert!(back == g);

        let f = encode_clique(&g, k, true).unwrap();
        let text = write_cnf(&f, Some(Encoding::Map), None);
        let r = read_cnf(&text).unwrap();
        prop_assert_eq!(write_cnf(&r.formula, r.encoding, None), text);

        let part = balanced_partition(n, k).unwrap();
        let f = encode_clique_block(&g, &part).unwrap();
        let text = write_cnf(&f, Some(Encoding::Block), Some(&part));
        let r = read_cnf(&text).unwrap();
        prop_assert_eq!(write_cnf(&r.formula, r.encoding, r.partition.as_ref()), text);
        for i in 0..f.len() {
            prop_assert_eq!(f.kind(i), r.formula.kind(i));
        }

        if !has_clique_of_size(&g, k) {
            let sp = build_search_program(&g, k).unwrap();
            prop_assert_eq!(read_robp(&write_robp(&sp.program)).unwrap(), sp.program.clone());
            let pi = robp_to_refutation(&sp.program, &sp.formula).unwrap();
            prop_assert_eq!(read_proof(&write_proof(&pi)).unwrap(), pi);
        }
    }
}
