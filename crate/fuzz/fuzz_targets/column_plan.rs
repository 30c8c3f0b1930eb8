#![no_main]

use g2q::cluster::ColumnPlan;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|input: (u8, &str)| {
    let (rows, src) = input;
    if let Ok(plan) = ColumnPlan::parse(src, u32::from(rows)) {
        for t in 0..plan.columns.len() {
            let n = plan.sweep_rows(t);
            for k in 1..=n.min(8) {
                let _ = plan.grid_label(t, k);
            }
        }
    }
});
