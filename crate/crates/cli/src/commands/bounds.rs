use alphaeta::bounds::{bounds_report, BoundsReport, LengthBound};
use anyhow::Result;

use crate::config::BoundsConfig;
use crate::output::OutputDir;

pub(super) fn run(config: &BoundsConfig, out: &mut OutputDir) -> Result<()> {
    let report = bounds_report(
        config.key_bits,
        config.m_bases,
        config.s,
        config.eta,
        config.gamma,
        config.lambda,
    )?;
    let text = render(&report);
    print!("{text}");
    out.write_text("bounds.txt", &text)?;
    out.write_json("bounds.json", &report)
}

fn length(b: &LengthBound) -> String {
    match b.rounded {
        Some(r) => format!("{r} ({:.3})", b.value),
        None => "unbounded".into(),
    }
}

/// Aligned text form of a report.
pub(crate) fn render(r: &BoundsReport) -> String {
    let w = &r.wedges;
    let e = &r.errors;
    let complexity = if r.complexity.trivial {
        "trivial (Γ < 1)".to_string()
    } else {
        format!("2^{:.3}", r.complexity.log2)
    };
    let lines = [
        ("key bits |K|", format!("{}", r.key_bits)),
        ("bases M", format!("{}", r.m_bases)),
        ("energy S", format!("{}", r.s)),
        ("transmittance η", format!("{}", r.eta)),
        ("N_het", format!("{:.4}", w.n_het)),
        ("Γ_het", format!("{:.4} (N_het − 1 = {:.4})", w.gamma_het, w.gamma_het_strict)),
        ("Γ_phase", format!("{:.4}", w.gamma_phase)),
        ("Γ used", format!("{}", r.gamma)),
        ("Λ used", format!("{}", r.lambda)),
        ("n0 (ciphertext only)", length(&r.unicity.n0)),
        ("n1 (known plaintext)", length(&r.unicity.n1)),
        ("capacity bound", length(&r.capacity_bound)),
        ("search complexity", complexity),
        ("Bob P_e Helstrom", format!("{:.6e}", e.p_e_bob_helstrom)),
        ("Bob P_e ¼e^{−4ηS}", format!("10^{:.3}", e.log10_p_e_bob_approx)),
        ("Bob below 1e-9", format!("{}", e.bob_below_floor)),
        ("Eve λ′ heterodyne", format!("10^{:.3}", e.log10_lambda_het)),
        ("Eve λ′ phase", format!("10^{:.3}", e.log10_lambda_phase)),
        ("Eve P_b half circle", format!("{:.6}", e.p_b_eve)),
    ];
    let width = lines.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    lines
        .iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}
