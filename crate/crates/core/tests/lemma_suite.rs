use discplane_core::suites::lemma_suite;

#[test]
fn lemma_batteries_pass() {
    let r = lemma_suite(7).unwrap();
    assert!(r.cover_table_ok());
    assert!(r.forbidden_ok(), "{}", r.to_json()["forbidden"]);
    let failing: Vec<_> = r.base_words.iter().filter(|w| !w.passes()).map(|w| (w.word.clone(), w.conditions)).collect();
    assert!(failing.is_empty(), "{failing:?}");
    println!("sparse breakdown {:?} of {}", r.sparse_breakdown(), r.sparse_words.len());
}
