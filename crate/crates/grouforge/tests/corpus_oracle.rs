mod common;

#[test]
fn small_corpus_groups_agree_with_brute_force() {
    let corpus = common::corpus();
    let groups = common::small_groups(&corpus).unwrap();
    assert!(groups.len() >= 30);
    let s = common::oracle_equivalence(&groups).unwrap();
    assert_eq!(s.aut_checked, s.groups, "every small group gets an automorphism count");
    assert!(s.iso_pairs > 0);
}
