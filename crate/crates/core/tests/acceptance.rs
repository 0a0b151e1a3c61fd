//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (no libtest harness). Every criterion is evaluated
//! even if an earlier one fails. The process exits non-zero on any FAIL only
//! when `HALDANE_ACCEPTANCE_STRICT=1`, so the rest of `cargo test` still runs
//! and the report stays visible next to it.

use std::time::{Duration, Instant};

use haldane::analytic::{
    chi_ratio, coefficients_from_chi, contiguous_lambdas, eh_couplings_contiguous, eh_couplings_noncontiguous,
    heisenberg_reference, noncontiguous_lambdas, transformed_qubit_state,
};
use haldane::ed::{
    degeneracy_profile, ent_gap, ent_levels, ent_spectrum_numeric, fidelity, physical_gap, physical_levels,
    reduced_density_matrix, LanczosConfig, Partition,
};
use haldane::fit::{fit_gap, fit_sop, SopFitOptions};
use haldane::mps::{aklt_tensors, periodic_state_vector, transfer_matrix, BlockLength};
use haldane::sop::{intertwining_residuals, sop_asymptotic, sop_bbh, sop_ed, sop_transfer_aklt};
use haldane::spin_ops::{Boundary, THETA_AKLT};
use haldane::{Error, Result, GAMMA};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict {
        pass,
        detail: detail.into(),
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn sorted_desc_padded(mut v: Vec<f64>, len: usize) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v.resize(len, 0.0);
    v
}

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// Contiguous formula against the explicit ring, `N ∈ {6,8,10,12}`.
fn contiguous_oracle() -> Result<Verdict> {
    let t = aklt_tensors();
    let mut worst = 0.0f64;
    for n in [6, 8, 10, 12] {
        let psi = periodic_state_vector(&t, n)?;
        for l in 1..=n / 2 {
            let rho = reduced_density_matrix(&psi, &Partition::block(l, n)?)?;
            let got = ent_spectrum_numeric(&rho).lambdas;
            let want = contiguous_lambdas(l, BlockLength::Finite(n), true)?.lambdas.to_vec();
            worst = worst.max(max_abs_diff(&got, &sorted_desc_padded(want, got.len())));
        }
    }
    verdict(worst < 1e-10, format!("max |Δλ| = {worst:.2e} (tol 1e-10)"))
}

fn noncontiguous_oracle() -> Result<Verdict> {
    let t = aklt_tensors();
    let (mut worst, mut sum_err) = (0.0f64, 0.0f64);
    let mut pattern_ok = true;
    for (la, lb) in [(1, 1), (2, 2), (1, 3), (2, 4)] {
        let n = 2 * (la + lb);
        let psi = periodic_state_vector(&t, n)?;
        let rho = reduced_density_matrix(&psi, &Partition::two_blocks(la, lb)?)?;
        let got = ent_spectrum_numeric(&rho).lambdas;
        let s = noncontiguous_lambdas(la, lb, true)?;
        worst = worst.max(max_abs_diff(&got, &sorted_desc_padded(s.lambdas.to_vec(), got.len())));
        pattern_ok &= s.multiplicities() == [5, 3, 1, 3, 3, 1];
        let raw = noncontiguous_lambdas(la, lb, false)?;
        sum_err = sum_err.max((raw.sum() - (1.0 + 3.0 * GAMMA.powi(n as i32))).abs());
    }
    verdict(
        worst < 1e-10 && pattern_ok && sum_err < 1e-14,
        format!("max |Δλ| = {worst:.2e} (tol 1e-10), pattern (5,3,1,3,3,1) {pattern_ok}, sum rule err {sum_err:.2e} (tol 1e-14)"),
    )
}

fn transfer_identities() -> Result<Verdict> {
    let t = aklt_tensors();
    let (r, l) = t.canonical_residuals();
    let tm = transfer_matrix(&t)?;
    let exact = tm.gammas == [1.0, GAMMA, GAMMA, GAMMA];
    let (a, b) = intertwining_residuals(&t);
    verdict(
        r == 0.0 && l == 0.0 && exact && a < 1e-14 && b < 1e-14,
        format!("canonical ({r:e}, {l:e}), eigenvalues {:?}, intertwining ({a:.1e}, {b:.1e})", tm.gammas),
    )
}

fn couplings() -> Result<Verdict> {
    let ln4 = 4f64.ln();
    let mut exact = true;
    for l in 1..=20 {
        exact &= eh_couplings_contiguous(l, BlockLength::Infinite)?.residual == 0.0;
    }
    let eps_far = eh_couplings_contiguous(30, BlockLength::Infinite)?.eps0;
    let f8 = eh_couplings_contiguous(8, BlockLength::Infinite)?;
    let g8 = GAMMA.powi(8);
    let j_rel = rel(f8.j1, g8);
    let target = 1.5f64.ln() / 4.0;
    let mut nc_ok = true;
    let mut nc = String::new();
    for lb in [12, 14] {
        let f = eh_couplings_noncontiguous(2, lb)?;
        let j2 = f.j2.unwrap_or(f64::NAN);
        nc_ok &= j2.abs() < 1e-4 && (f.j1 - target).abs() < 1e-6;
        nc += &format!(" lb={lb}: J1−ln(3/2)/4 = {:.1e}, J2 = {j2:.1e};", f.j1 - target);
    }
    let eps_ok = (eps_far - ln4).abs() < 1e-12;
    verdict(
        exact && eps_ok && j_rel < 0.05 && nc_ok,
        format!(
            "inversion exact {exact}, ε0(l=30) − 2ln2 = {:.1e}, |J−γ^8|/|γ^8| = {j_rel:.1e};{nc}",
            eps_far - ln4
        ),
    )
}

fn fidelities() -> Result<Verdict> {
    let at = fidelity(THETA_AKLT, 4)?.value;
    let thetas = [-0.6, -0.3, 0.0, 0.16, 0.24, 0.30];
    let mut f = Vec::new();
    for th in thetas {
        f.push(fidelity(th, 4)?.value);
    }
    let above = f.iter().all(|&x| x > 0.9);
    // decreasing away from θ_AKLT means increasing along the grid (all θ < θ_AKLT)
    let monotone = f.windows(2).all(|w| w[0] < w[1]) && f[f.len() - 1] < at;
    let list: Vec<String> = thetas.iter().zip(&f).map(|(t, x)| format!("{t}:{x:.5}")).collect();
    verdict(
        (at - 1.0).abs() < 1e-8 && above && monotone,
        format!(
            "f(θ_AKLT) − 1 = {:.1e}, all > 0.9 {above}, monotone {monotone} [{}]",
            at - 1.0,
            list.join(" ")
        ),
    )
}

fn degeneracies() -> Result<Verdict> {
    let cfg = LanczosConfig::default();
    let want = [1, 3, 5, 3, 3];
    let phy = degeneracy_profile(&physical_levels(0.20, 6, 15, &cfg)?, 1e-4);
    let ent = degeneracy_profile(&ent_levels(0.20, 6, 15, &cfg)?, 1e-4);
    verdict(phy == want && ent == want, format!("physical {phy:?}, entanglement {ent:?}"))
}

fn gap_scaling() -> Result<Verdict> {
    let mut phy = Vec::new();
    for n in [6, 8, 10, 12] {
        phy.push((n as f64, physical_gap(0.20, n)?.gap));
    }
    let mut ent = Vec::new();
    for l in [2, 4, 6] {
        ent.push((l as f64, ent_gap(0.20, l)?.gap));
    }
    let xi_phy = fit_gap(&phy)?.xi.unwrap_or(f64::NAN);
    let xi_ent = fit_gap(&ent)?.xi.unwrap_or(f64::NAN);
    // analytic entanglement gap of the AKLT ring, N = 2l
    let mut analytic = Vec::new();
    for l in [6usize, 8, 10, 12] {
        analytic.push((l as f64, contiguous_lambdas(l, BlockLength::Finite(2 * l), true)?.entanglement_gap()));
    }
    let xi_aklt = fit_gap(&analytic)?.xi.unwrap_or(f64::NAN);
    let want_aklt = 1.0 / 3f64.ln();
    let ok = rel(xi_phy, 2.812) < 0.15 && rel(xi_ent, 2.445) < 0.15 && rel(xi_aklt, want_aklt) < 0.02;
    verdict(
        ok,
        format!(
            "ξ_phy = {xi_phy:.4} ({:.1}% off 2.812), ξ_ent (l = 2,4,6) = {xi_ent:.4} ({:.1}% off 2.445), \
             analytic ξ_ent = {xi_aklt:.5} ({:.2}% off 1/ln3)",
            100.0 * rel(xi_phy, 2.812),
            100.0 * rel(xi_ent, 2.445),
            100.0 * rel(xi_aklt, want_aklt)
        ),
    )
}

fn string_order() -> Result<Verdict> {
    let mut closed = 0.0f64;
    for n in 4..=14 {
        let c = sop_asymptotic(BlockLength::Finite(n))?;
        for l in 0..=n - 2 {
            closed = closed.max((sop_transfer_aklt(l, n, false)?.value - c).abs());
        }
    }
    let psi = periodic_state_vector(&aklt_tensors(), 8)?;
    let mut ed = 0.0f64;
    for i in 1..=7 {
        for l in 0..=(8 - i - 1) {
            let want = sop_transfer_aklt(l, 8, true)?.value;
            ed = ed.max((sop_ed(&psi, 8, i, l)?.value - want).abs());
        }
    }
    let exact: Vec<(f64, f64)> = (3..=7)
        .map(|k| 2 * k)
        .map(|n| Ok((n as f64, sop_asymptotic(BlockLength::Finite(n))?)))
        .collect::<Result<_>>()?;
    let f = fit_sop(&exact, THETA_AKLT, SopFitOptions::default())?;
    let (o, a, xi) = (f.asymptote.unwrap_or(f64::NAN), f.amplitude, f.xi.unwrap_or(f64::NAN));
    let eq_fit = (o + 4.0 / 9.0).abs() < 1e-6 && (a + 4.0).abs() < 1e-6 && (xi - 1.0 / 3f64.ln()).abs() < 1e-6;

    let cfg = LanczosConfig::default();
    let mut pts = Vec::new();
    for n in [6, 8, 10, 12] {
        pts.push((n as f64, sop_bbh(0.30, n, Boundary::Open, &cfg)?.value));
    }
    let g = fit_sop(&pts, 0.30, SopFitOptions::default())?;
    let (go, ga, gx) = (g.asymptote.unwrap_or(f64::NAN), g.amplitude, g.xi.unwrap_or(f64::NAN));
    let ed_fit = rel(go, -0.443) < 0.10 && rel(ga, -1.39) < 0.25 && rel(gx, 1.062) < 0.15;
    verdict(
        closed < 1e-12 && ed < 1e-10 && eq_fit && ed_fit,
        format!(
            "closed form err {closed:.1e}, ED vs transfer {ed:.1e}, exact fit ({o:.8}, {a:.7}, {xi:.8}), \
             θ=0.30 fit ({go:.4}, {ga:.3}, {gx:.4}) off by ({:.1}%, {:.1}%, {:.1}%)",
            100.0 * rel(go, -0.443),
            100.0 * rel(ga, -1.39),
            100.0 * rel(gx, 1.062)
        ),
    )
}

fn heisenberg() -> Result<Verdict> {
    let chi2 = 1.0 / (2.0 * 3f64.sqrt());
    let psi = transformed_qubit_state(&coefficients_from_chi(3.0 * chi2, chi2));
    let dev = max_abs_diff(&psi, &heisenberg_reference());
    let exact = dev < 1e-15;
    let mut ratios = Vec::new();
    let mut notes = Vec::new();
    for l in 1..=3 {
        match chi_ratio(l) {
            Ok(r) => {
                ratios.push(r.ratio);
                notes.push(format!("l={l}: {:.6}", r.ratio));
            }
            Err(Error::Degenerate { multiplicity, .. }) => {
                notes.push(format!("l={l}: undefined ({multiplicity}-fold top eigenvalue)"))
            }
            Err(e) => return Err(e),
        }
    }
    let trend = ratios.len() == 3 && ratios.windows(2).all(|w| w[0] < w[1] && w[1] <= 3.0);
    verdict(
        exact && trend,
        format!(
            "imposed χ1/χ2 = 3 deviation {dev:.1e}; measured increasing toward 3: {trend} [{}]",
            notes.join(", ")
        ),
    )
}

fn verify_suite() -> Result<Verdict> {
    let (table, ok) = haldane::cli::verify::run()?;
    verdict(ok, format!("{} identities checked", table.rows.len()))
}

fn main() {
    let start = Instant::now();
    let criteria: [(&str, Duration, fn() -> Result<Verdict>); 9] = [
        ("1 contiguous spectra vs explicit RDM", Duration::from_secs(60), contiguous_oracle),
        ("2 non-contiguous spectra vs explicit RDM", Duration::from_secs(120), noncontiguous_oracle),
        ("3 transfer-matrix identities", Duration::from_secs(1), transfer_identities),
        ("4 entanglement-Hamiltonian couplings", Duration::from_secs(60), couplings),
        ("5 ground-state fidelity", Duration::from_secs(60), fidelities),
        ("6 degeneracy profiles", Duration::from_secs(300), degeneracies),
        ("7 gap scaling", Duration::from_secs(900), gap_scaling),
        ("8 string order parameter", Duration::from_secs(600), string_order),
        ("9 Heisenberg identification", Duration::from_secs(60), heisenberg),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let t0 = Instant::now();
        let outcome = run();
        let dt = t0.elapsed();
        let (pass, detail) = match outcome {
            Ok(v) => (v.pass && dt <= budget, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {name}: {} — {detail} [{:.2}s / {}s]",
            if pass { "PASS" } else { "FAIL" },
            dt.as_secs_f64(),
            budget.as_secs()
        );
    }
    let t0 = Instant::now();
    let v = verify_suite();
    let total = start.elapsed();
    let (pass, detail) = match v {
        Ok(v) => (v.pass && total <= Duration::from_secs(1800), v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    failed += usize::from(!pass);
    println!(
        "criterion 10 verify and total runtime: {} — {detail} in {:.2}s; suite total {:.1}s / 1800s",
        if pass { "PASS" } else { "FAIL" },
        t0.elapsed().as_secs_f64(),
        total.as_secs_f64()
    );
    println!("acceptance: {} of 10 criteria FAIL", failed);
    if failed > 0 && std::env::var("HALDANE_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
