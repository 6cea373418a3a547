//! Forest polytope checks on regular graphs: alpha membership, the alpha
//! total, and the degree inequality on random forests.

use spanlab::graph::{petersen, random_regular};
use spanlab::polytope::{alpha_membership_check, forest_audit, foster_alpha_total, membership};

fn main() -> spanlab::Result<()> {
    for (name, g) in [("petersen", petersen()), ("rr(16,3)", random_regular(16, 3, 4)?), ("rr(20,4)", random_regular(20, 4, 4)?)] {
        let a = alpha_membership_check(&g, 0)?;
        let f = foster_alpha_total(&g)?;
        println!(
            "{name}: min alpha {:.4}, min slack {:.4}, member {}, sum alpha {:.6} (expected {:.6})",
            a.min_alpha, a.alpha_membership.min_slack, a.passed, f.total, f.expected
        );
    }
    // a point outside: twice the alpha vector of the Petersen graph
    let g = petersen();
    let a = alpha_membership_check(&g, 0)?;
    let big: Vec<f64> = a.alpha.iter().map(|x| 8.0 * x).collect();
    let v = membership(&g, &big)?;
    println!("8 alpha: member {} violated {:?}", v.member, v.violated);

    let audit = forest_audit(10_000, 1)?;
    println!("forests {} failures {} max ratio {:.4}", audit.forests, audit.failures, audit.max_ratio);
    Ok(())
}
