//! K4 with two opposite edges tripled: one edge from each bundle is
//! positively correlated in the MST, exactly.

use spanlab::graph::lps_gadget;
use spanlab::mst::{pnc_verdict, PncMethod};

fn main() -> spanlab::Result<()> {
    let gadget = lps_gadget();
    let (e, f) = (gadget.bundles[0][0], gadget.bundles[1][0]);
    let exact = pnc_verdict(&gadget.graph, "lps", e, f, PncMethod::Exact, 0, 0)?;
    println!("{}", serde_json::to_string_pretty(&exact).expect("json"));

    let mc = pnc_verdict(&gadget.graph, "lps", e, f, PncMethod::Mc, 2_000_000, 3)?;
    let ci = mc.ci.expect("mc interval");
    println!("mc margin {:.3e}, 95% CI [{:.3e}, {:.3e}] -> {:?}", mc.margin, ci[0], ci[1], mc.status);
    Ok(())
}
