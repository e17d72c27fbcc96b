use pro2eq_bench::{corpus, generators, CORPUS};
use pro2eq_core::free_group::fold;
use pro2eq_core::{ClassLabel, Classifier};

#[test]
fn corpus_parses_and_has_ends() {
    let c = Classifier::default();
    let exprs = corpus();
    assert_eq!(exprs.len(), CORPUS.len());
    for e in &exprs {
        assert_ne!(c.classify(e).label, ClassLabel::Unknown, "{e}");
    }
}

#[test]
fn generators_have_requested_shape() {
    let gens = generators(3, 6, 16);
    assert_eq!(gens.len(), 6);
    assert!(gens.iter().all(|w| w.len() == 19));
    assert!(fold(3, &gens).unwrap().num_states() > 16);
}
