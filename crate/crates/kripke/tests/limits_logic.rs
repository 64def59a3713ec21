use kripke::census::{all_frames_up_to, transitive_frames_up_to};
use kripke::formula::{frame_validates, parse, table};
use kripke::frame_core::{chain, cluster, fork, strict_chain};
use kripke::limits::{coequalizer, cokernel_pair, equalizer, is_epimorphism, pushout, ParallelPair, Span};
use kripke::logic::{frame_in_logic, LogicSpec};
use kripke::pmorph::{enumerate_pmorphisms, subreduces};
use kripke::{Budget, PMorphism};

#[test]
fn table_rows_agree_on_small_frames() {
    for f in all_frames_up_to(3).unwrap() {
        for row in table() {
            let by_formula = row.axioms.iter().all(|a| frame_validates(&f, a).unwrap());
            assert_eq!(by_formula, (row.condition)(&f), "{} on {:?}", row.name, f);
        }
    }
}

#[test]
fn equalizer_of_a_swap_is_empty_on_a_cluster() {
    let f = PMorphism::new(cluster(2), cluster(2), vec![0, 1]).unwrap();
    let g = PMorphism::new(cluster(2), cluster(2), vec![1, 0]).unwrap();
    let p = ParallelPair::new(f, g).unwrap();
    let (set, _) = equalizer(&p);
    assert!(set.is_empty());
    let (q, _) = coequalizer(&p).unwrap();
    assert_eq!(q.size(), 1);
}

#[test]
fn inclusion_of_top_is_not_epi() {
    let f = PMorphism::new(chain(1), chain(2), vec![1]).unwrap();
    assert!(!is_epimorphism(&f).unwrap());
    let (q, _, _) = cokernel_pair(&f);
    assert_eq!(q.size(), 3);
}

#[test]
fn surjections_are_epi() {
    for w in transitive_frames_up_to(3).unwrap() {
        for v in transitive_frames_up_to(2).unwrap() {
            for f in enumerate_pmorphisms(&w, &v, true, Budget::unlimited()).unwrap() {
                assert!(is_epimorphism(&f).unwrap());
            }
        }
    }
}

#[test]
fn pushout_glues_chains_at_the_top() {
    let i = PMorphism::new(chain(1), chain(2), vec![1]).unwrap();
    let p = pushout(&Span::new(i.clone(), i).unwrap()).unwrap();
    assert_eq!(p.frame.size(), 3);
    assert!(!p.frame.is_isomorphic(&fork(2)));
}

#[test]
fn fork_membership() {
    let grz2: LogicSpec = "Grz+bd2".parse().unwrap();
    let s42: LogicSpec = "S4.2".parse().unwrap();
    assert!(frame_in_logic(&grz2, &fork(3)));
    assert!(!frame_in_logic(&s42, &fork(2)));
}

#[test]
fn parse_round_trips_through_display() {
    for text in ["box p1 -> p1", "dia (p1 & ~p2) | box box p3", "box (box (p1 -> box p1) -> p1) -> p1"] {
        let phi = parse(text).unwrap();
        assert_eq!(parse(&phi.to_string()).unwrap(), phi);
    }
}

// On reflexive frames, failing to subreduce to the (n+1)-chain is the same as depth <= n.
// Irreflexive points break this; strict_chain(2) is the smallest example.
#[test]
fn subreduction_to_chains_measures_depth_on_reflexive_frames() {
    for f in transitive_frames_up_to(4).unwrap().into_iter().filter(|f| f.is_reflexive()) {
        let depth = f.frame_depth().unwrap();
        for n in 1..=3 {
            let sub = subreduces(&f, &chain(n + 1), Budget::unlimited()).unwrap().is_some();
            assert_eq!(!sub, depth <= n);
        }
    }
    let w = strict_chain(2);
    assert_eq!(w.frame_depth().unwrap(), 2);
    assert!(subreduces(&w, &chain(2), Budget::unlimited()).unwrap().is_none());
}
