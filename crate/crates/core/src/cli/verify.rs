//! Analytic identity suite behind `haldane verify`.

use super::table::{Table, Value};
use crate::analytic::{contiguous_lambdas, noncontiguous_lambdas};
use crate::error::Result;
use crate::mps::{aklt_tensors, block_overlap_gram, block_states, transfer_matrix, BlockLength};
use crate::sop::{dressed_operators, intertwining_residuals, sop_asymptotic, sop_transfer_aklt};
use crate::GAMMA;

struct Check {
    name: String,
    value: f64,
    tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
        }
    }

    fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

fn checks() -> Result<Vec<Check>> {
    let t = aklt_tensors();
    let mut out = Vec::new();

    let (right, left) = t.canonical_residuals();
    out.push(Check::new("canonical_right", right, 0.0));
    out.push(Check::new("canonical_left", left, 0.0));

    let tm = transfer_matrix(&t)?;
    let want = [1.0, GAMMA, GAMMA, GAMMA];
    let dev = tm.gammas.iter().zip(want).fold(0.0f64, |m, (g, w)| m.max((g - w).abs()));
    out.push(Check::new("transfer_eigenvalues", dev, 0.0));
    out.push(Check::new("transfer_reconstruction", (tm.reconstruct() - tm.e).norm(), 1e-15));

    // Gram oracle: closed form against explicit block states
    let mut gram = 0.0f64;
    for l in 1..=6 {
        let explicit = block_states(&t, l)?.gram();
        gram = gram.max((block_overlap_gram(BlockLength::Finite(l)).g - explicit).norm());
    }
    out.push(Check::new("gram_oracle_l1_6", gram, 1e-13));

    let mut sum_rule = 0.0f64;
    let mut normalized = 0.0f64;
    for la in 1..=6 {
        for lb in 1..=6 {
            let n = 2 * (la + lb);
            let s = noncontiguous_lambdas(la, lb, false)?;
            sum_rule = sum_rule.max((s.sum() - (1.0 + 3.0 * GAMMA.powi(n as i32))).abs());
            normalized = normalized.max((noncontiguous_lambdas(la, lb, true)?.sum() - 1.0).abs());
        }
    }
    out.push(Check::new("noncontiguous_sum_rule", sum_rule, 1e-14));
    out.push(Check::new("noncontiguous_normalized_sum", normalized, 1e-14));

    let mut contiguous = 0.0f64;
    for n in 2..=16 {
        for l in 1..n {
            let s = contiguous_lambdas(l, BlockLength::Finite(n), false)?;
            contiguous = contiguous.max((s.sum() - (1.0 + 3.0 * GAMMA.powi(n as i32))).abs());
        }
    }
    out.push(Check::new("contiguous_sum_rule", contiguous, 1e-14));

    let (a, b) = intertwining_residuals(&t);
    out.push(Check::new("intertwining_string_left", a, 1e-14));
    out.push(Check::new("intertwining_string_right", b, 1e-14));

    let d = dressed_operators(&t)?;
    let r = &tm.right;
    let action = [
        (d.s_z_hat * r[0] - d.right_tilde[0] * (2.0 / 3.0)).norm(),
        (d.s_z_hat * r[1] + d.right_tilde[1] * (2.0 / 3.0)).norm(),
        (d.s_z_hat * r[2]).norm(),
        (d.s_z_hat * r[3]).norm(),
    ];
    out.push(Check::new("dressed_action", action.iter().fold(0.0f64, |m, x| m.max(*x)), 1e-15));

    let mut sop = 0.0f64;
    for n in 4..=14 {
        let closed = sop_asymptotic(BlockLength::Finite(n))?;
        for l in 0..=n - 2 {
            sop = sop.max((sop_transfer_aklt(l, n, false)?.value - closed).abs());
        }
    }
    out.push(Check::new("string_order_closed_form", sop, 1e-12));
    Ok(out)
}

/// Run every check; the flag is true when all pass.
pub fn run() -> Result<(Table, bool)> {
    let mut table = Table::new(["check", "value", "tolerance", "pass"]);
    let mut ok = true;
    for c in checks()? {
        ok &= c.passed();
        let pass = if c.passed() { "true" } else { "false" };
        table.push(vec![Value::Text(c.name), c.value.into(), c.tolerance.into(), pass.into()]);
    }
    Ok((table, ok))
}

#[cfg(test)]
mod tests {
    #[test]
    fn pristine_tensors_pass() {
        let (t, ok) = super::run().unwrap();
        assert!(ok, "{:?}", t.rows);
        assert!(t.rows.len() >= 10);
    }
}
