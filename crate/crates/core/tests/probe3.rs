// Scratch probe, not part of the deliverable: time the order-3 sweep.
use std::time::Instant;

use hkernel::search::{classify_order, RowOutcome, SearchBounds};

#[test]
fn time_order_three_sweep() {
    let start = Instant::now();
    let rows = classify_order(3, &SearchBounds::new(5)).unwrap();
    println!("sweep took {:?}", start.elapsed());
    let mut pan = 0;
    for (i, row) in rows.iter().enumerate() {
        let note = match &row.outcome {
            RowOutcome::ConfirmedExhausted { max_vertices } => format!("exhausted@{max_vertices}"),
            RowOutcome::Witnessed { counterexample } => format!(
                "witnessed size={} position={:?} arcs={:?}",
                counterexample.instance.d().n(),
                counterexample.position,
                counterexample
                    .instance
                    .d()
                    .arcs()
                    .map(|(a, b)| (a, b, counterexample.instance.colour(a, b)))
                    .collect::<Vec<_>>()
            ),
            RowOutcome::Unwitnessed { max_vertices } => format!("UNWITNESSED@{max_vertices}"),
            RowOutcome::BudgetExceeded { max_vertices } => format!("BUDGET@{max_vertices}"),
            RowOutcome::Fatal { .. } => "FATAL".to_string(),
        };
        if row.verdict.is_panchromatic() {
            pan += 1;
        }
        println!(
            "{i:2} {} {} {}",
            row.canonical,
            if row.verdict.is_panchromatic() { "PAN" } else { "NEG" },
            note
        );
    }
    println!("panchromatic: {pan}/16");
}
