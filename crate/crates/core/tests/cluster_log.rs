mod common;

use common::{random_message, random_pair, rng, tight_code, Oracle};
use trace_repair::{Cluster, Event, PayloadKind, Phase, Scheme};

fn collab_and_recovery(events: &[Event]) -> Vec<String> {
    events
        .iter()
        .filter_map(|e| match e {
            Event::Message(r) if r.phase == Phase::Collab => Some(format!("{}->{}", r.from, r.to)),
            Event::Recovered(i) => Some(format!("R{i}")),
            _ => None,
        })
        .collect()
}

#[test]
fn log_invariants_hold_for_every_scheme() {
    let mut r = rng(91);
    for or in [
        Oracle::tower(2, 1, 2),
        Oracle::tower(3, 1, 2),
        Oracle::tower(2, 1, 4),
        Oracle::tower(2, 2, 2),
    ] {
        let code = tight_code(&or);
        let n = code.n();
        for _ in 0..50 {
            let message = random_message(&or, code.k(), &mut r);
            let (a, b) = random_pair(n, &mut r);
            let mut runs: Vec<(Scheme, Vec<usize>)> = vec![
                (Scheme::Naive, vec![a, b]),
                (Scheme::Naive, vec![a]),
                (Scheme::Gw, vec![a]),
                (Scheme::DepthTwo, vec![a, b]),
            ];
            if or.t % or.tw.p() as usize == 0 {
                runs.push((Scheme::DepthOne, vec![a, b]));
            }
            for (scheme, erased) in runs {
                let mut c = Cluster::spawn(&code, &message).unwrap();
                c.fail(&erased).unwrap();
                let report = c.repair(scheme).unwrap();
                assert!(report.passed(), "{scheme} {erased:?}");
                assert_eq!(
                    c.nodes().iter().map(|s| s.unwrap()).collect::<Vec<_>>(),
                    c.snapshot()
                );

                let log: Vec<_> = c.message_log().copied().collect();
                assert_eq!(log.iter().map(|r| r.size).sum::<usize>(), report.total);
                let first_collab = log
                    .iter()
                    .position(|r| r.phase == Phase::Collab)
                    .unwrap_or(log.len());
                assert!(log[first_collab..].iter().all(|r| r.phase == Phase::Collab));
                for rec in &log[..first_collab] {
                    if rec.kind != PayloadKind::Demand {
                        assert!(
                            !erased.contains(&rec.from),
                            "payload from failed node {}",
                            rec.from
                        );
                    }
                }
                if scheme != Scheme::Naive {
                    assert!(report.rns.iter().all(|x| x.total == n - 1));
                }
            }
        }
    }
}

#[test]
fn collaboration_order() {
    let or = Oracle::tower(2, 1, 4);
    let code = tight_code(&or);
    let message = random_message(&or, code.k(), &mut rng(5));

    let mut c = Cluster::spawn(&code, &message).unwrap();
    c.fail(&[4, 9]).unwrap();
    c.repair(Scheme::DepthOne).unwrap();
    assert_eq!(
        collab_and_recovery(c.events()),
        ["9->4", "4->9", "R4", "R9"]
    );

    c.fail(&[4, 9]).unwrap();
    c.repair(Scheme::DepthTwo).unwrap();
    assert_eq!(
        collab_and_recovery(c.events()),
        ["9->4", "R4", "4->9", "R9"]
    );
}

#[test]
fn json_lines_schema() {
    let or = Oracle::tower(2, 1, 2);
    let code = tight_code(&or);
    let mut c = Cluster::spawn(
        &code,
        &[trace_repair::Felem::ONE, trace_repair::Felem::ZERO],
    )
    .unwrap();
    c.fail(&[0, 1]).unwrap();
    c.repair(Scheme::Naive).unwrap();
    assert_eq!(
        c.log_json_lines(),
        concat!(
            r#"{"from":3,"to":1,"kind":"symbol","size":2,"phase":"download"}"#,
            "\n",
            r#"{"from":4,"to":1,"kind":"symbol","size":2,"phase":"download"}"#,
            "\n",
            r#"{"from":1,"to":2,"kind":"symbol","size":2,"phase":"collab"}"#,
            "\n",
        )
    );
    for line in c.log_json_lines().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v.as_object().unwrap().len(), 5);
    }
}

#[test]
fn report_serialization_is_stable() {
    let or = Oracle::tower(2, 1, 2);
    let code = tight_code(&or);
    let mut c =
        Cluster::spawn(&code, &[trace_repair::Felem::ONE, trace_repair::Felem::ONE]).unwrap();
    c.fail(&[1, 2]).unwrap();
    let report = c.repair(Scheme::DepthOne).unwrap();
    let json = serde_json::to_string(&report).unwrap();
    assert_eq!(
        json,
        r#"{"scheme":"depth1","erased":[2,3],"rns":[{"node":2,"downloaded":2,"exchanged_in":1,"total":3},{"node":3,"downloaded":2,"exchanged_in":1,"total":3}],"total":6,"naive_baseline":6,"verdict":[true,true]}"#
    );
    let back: trace_repair::BandwidthReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}
