//! End-to-end acceptance suite. Runs without the libtest harness so that the
//! one-line verdict per criterion shows up in `cargo test` output.

mod common;

use dstm::checkers::{check_opaque, revalidate_opacity};
use dstm::history::parse_history;
use dstm::harness::{
    explore, simcheck, sweep, trace_inclusion, AbstractKind, CheckKind, Exec, ImplKind, Mutant, RunConfig,
    SimOutcome,
};
use dstm::ioa::Bounds;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::process::ExitCode;
use std::time::Instant;

fn cfg(kind: ImplKind, txs: u16, eras: u16, locs: u8, vals: u8) -> RunConfig {
    RunConfig {
        txs_per_era: txs,
        eras,
        locs,
        vals,
        steps: 200,
        ..RunConfig::new(kind)
    }
}

type Outcome = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn durable_opacity_of_cnorec_cm() -> Outcome {
    let r = sweep(&cfg(ImplKind::CnorecCm, 3, 2, 2, 2), 0..1000, CheckKind::DurableOpacity, Exec::Parallel);
    verdict(r.clean() && r.runs == 1000, format!("{} of {} runs accepted", r.accepted, r.runs))
}

fn cm_durably_linearizable() -> Outcome {
    let sc = simcheck(&cfg(ImplKind::CmLib, 2, 1, 1, 2), AbstractKind::Canonical).map_err(|e| e.to_string())?;
    let holds = sc.outcome == SimOutcome::Holds;
    let r = sweep(&cfg(ImplKind::CmLib, 3, 2, 2, 2), 0..1000, CheckKind::DurableLin, Exec::Parallel);
    verdict(
        holds && r.clean() && r.runs == 1000,
        format!("simulation {:?} over {} pairs; {} of {} histories accepted", sc.outcome, sc.pairs, r.accepted, r.runs),
    )
}

fn cnorec_simulates_dtms2() -> Outcome {
    let sc = simcheck(&cfg(ImplKind::Cnorec, 2, 1, 1, 2), AbstractKind::Dtms2).map_err(|e| e.to_string())?;
    verdict(sc.outcome == SimOutcome::Holds, format!("{:?} over {} pairs", sc.outcome, sc.pairs))
}

fn invariants_hold() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for kind in [ImplKind::Cnorec, ImplKind::CnorecAm, ImplKind::CmLib] {
        let r = explore(&cfg(kind, 2, 1, 1, 2)).map_err(|e| e.to_string())?;
        ok &= r.passed();
        notes.push(format!("{kind}: {} states{}", r.states, if r.passed() { "" } else { " FAILED" }));
    }
    verdict(ok, notes.join(", "))
}

fn modular_trace_inclusion() -> Outcome {
    let c = cfg(ImplKind::CnorecAm, 2, 2, 1, 2);
    let r = trace_inclusion(&c, 0..500, Bounds::new(c.depth, c.max_states), Exec::Parallel);
    verdict(r.clean() && r.runs == 500, format!("{} of {} traces included", r.accepted, r.runs))
}

fn dtms2_durably_opaque() -> Outcome {
    let r = sweep(&cfg(ImplKind::Dtms2, 3, 2, 2, 2), 0..500, CheckKind::DurableOpacity, Exec::Parallel);
    verdict(r.clean() && r.runs == 500, format!("{} of {} traces accepted", r.accepted, r.runs))
}

fn mutants_are_caught() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for m in [Mutant::NoUndoLog, Mutant::NoRecoveryRestore] {
        let ex = explore(&RunConfig {
            mutant: Some(m),
            ..cfg(ImplKind::CmLib, 2, 1, 1, 2)
        })
        .map_err(|e| e.to_string())?;
        // crash-dense runs: many eras, three values so torn writes show
        let sim = RunConfig {
            mutant: Some(m),
            steps: 400,
            ..cfg(ImplKind::CmLib, 2, 8, 2, 3)
        };
        let sw = sweep(&sim, 0..200, CheckKind::DurableLin, Exec::Parallel);
        let caught = ex.violation.is_some() && !sw.rejects.is_empty();
        ok &= caught;
        let first = sw.rejects.first().map_or("none".to_string(), |f| f.seed.to_string());
        notes.push(format!(
            "{m}: explore {}, {} of 200 seeds rejected (first seed {first})",
            ex.violation.as_ref().map_or("passed", |v| v.0.as_str()),
            sw.rejects.len()
        ));
    }
    verdict(ok, notes.join("; "))
}

fn checker_matches_oracle() -> Outcome {
    // t2 reads a value written only by t1, which later aborts
    let dirty = parse_history(
        "inv 1 TMBegin\nres 1 TMBegin ok\ninv 2 TMBegin\nres 2 TMBegin ok\n\
         inv 1 TMWrite x0 1\nres 1 TMWrite ok\ninv 1 TMCommit\n\
         inv 2 TMRead x0\nres 2 TMRead 1\nres 1 TMCommit abort\n",
    )
    .map_err(|e| e.to_string())?;
    if common::oracle_opaque(&dirty) || !common::oracle_opaque(&dirty.prefix(9)) {
        return Err("oracle misjudges the dirty-read example".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dac17);
    let (mut accepted, mut rejected) = (0, 0);
    for i in 0..1000 {
        let h = common::random_history(&mut rng);
        let v = check_opaque(&h).map_err(|e| format!("history {i}: {e}"))?;
        if v.accepted != common::oracle_opaque(&h) {
            return Err(format!("history {i} disagrees (checker says {v})"));
        }
        if v.accepted {
            let w = v.witness.as_ref().ok_or(format!("history {i}: accepted without witness"))?;
            if !revalidate_opacity(&h, w) || !common::oracle_witness_ok(&h, w) {
                return Err(format!("history {i}: witness does not re-validate"));
            }
            accepted += 1;
        } else {
            rejected += 1;
        }
    }
    verdict(true, format!("1000 histories agree ({accepted} accepted, {rejected} rejected)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("durable opacity of cnorec-cm", durable_opacity_of_cnorec_cm),
        ("durable linearizability of cm-lib", cm_durably_linearizable),
        ("cnorec forward-simulates dtms2", cnorec_simulates_dtms2),
        ("mutual exclusion and cm invariants", invariants_hold),
        ("cnorec-am traces are cnorec traces", modular_trace_inclusion),
        ("dtms2 traces are durably opaque", dtms2_durably_opaque),
        ("mutants are rejected", mutants_are_caught),
        ("opacity checker matches brute force", checker_matches_oracle),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {}: PASS {name}: {d} [{secs:.1}s]", n + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {d} [{secs:.1}s]", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
