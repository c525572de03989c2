//! Subcommand bodies. Each produces reports plus a JSON payload and a human-readable table.

use qsteenrod::flat_sections::{annihilation_check, arithmetic_flat_section, stable_qde_defect, stable_qde_series_defect, QPoly};
use qsteenrod::localization_engine::{
    classical_steenrod_term,    integral_quotient_ring, local_p1_table, localization_bracket, s1_weight, structure_constant_s1,
};
use qsteenrod::quantum_connection::{
    char0_recursion, char0_seed, qsigma_series, rank2_decompose, to_stable_basis,
};
use qsteenrod::{Basis, BigRational, Endo2, Error, ModPEndo, Truncation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::checks::{self, pairing_values_json};
use crate::config::{Command, RunConfig};
use crate::criteria::{self, CRITERIA};
use crate::golden::GoldenStore;
use crate::report::{CheckReport, Harness, Outcome, Status};

pub struct CommandOutput {
    pub reports: Vec<CheckReport>,
    pub payload: Value,
    pub table: String,
}

impl CommandOutput {
    pub fn failed(&self) -> bool {
        self.reports.iter().any(|r| r.status == Status::Fail)
    }

    pub fn to_json(&self, cfg: &RunConfig) -> Value {
        let count = |s: Status| self.reports.iter().filter(|r| r.status == s).count();
        json!({
            "command": cfg.command.name(),
            "config": {
                "primes": cfg.primes.iter().map(|p| p.get()).collect::<Vec<_>>(),
                "q_max": cfg.q_max,
                "h_max": cfg.h_max,
                "basis": cfg.basis.as_str(),
                "mu": cfg.mu.map(|m| m.value()),
                "seed": cfg.seed,
            },
            "result": self.payload,
            "reports": self.reports.iter().map(|r| r.to_json(cfg.timing)).collect::<Vec<_>>(),
            "summary": {"pass": count(Status::Pass), "fail": count(Status::Fail), "inconclusive": count(Status::Inconclusive)},
        })
    }

    pub fn render_table(&self) -> String {
        let mut s = self.table.clone();
        if !s.is_empty() && !s.ends_with('\n') {
            s.push('\n');
        }
        for r in &self.reports {
            s += &r.table_row();
            s.push('\n');
        }
        s
    }
}

fn reg(h: &mut Harness, id: &str, anchor: &str, body: impl FnOnce() -> qsteenrod::Result<Outcome>) {
    h.run(id, anchor, body).expect("every registered check carries an anchor");
}

fn render_endo(label: &str, e: &ModPEndo) -> String {
    let mut s = format!("{label} ({} basis)\n", e.basis().as_str());
    for i in 0..2 {
        for j in 0..2 {
            s += &format!("  [{i}][{j}] {}\n", e.entry(i, j).render());
        }
    }
    s
}

pub fn execute(cfg: &RunConfig) -> qsteenrod::Result<CommandOutput> {
    match cfg.command {
        Command::LocalP1 => local_p1(cfg),
        Command::TstarP1 => tstar_p1(cfg),
        Command::VerifyAll => verify_all(cfg),
        Command::Char0 => char0(cfg),
        Command::FlatSection => flat_section(cfg),
        Command::Annihilation => annihilation(cfg),
        Command::Flatness => flatness(cfg),
        Command::Decompose => decompose(cfg),
    }
}

fn local_p1(cfg: &RunConfig) -> qsteenrod::Result<CommandOutput> {
    let p = cfg.prime();
    let table = local_p1_table(p, cfg.q_max)?;
    let labels = [["(QΣ(1), b)", "(QΣ(b), b)"], ["(QΣ(1), 1)", "(QΣ(b), 1)"]];
    let mut text = format!("local P¹, p = {p}, q ≤ {}\n", cfg.q_max);
    for i in 0..2 {
        for j in 0..2 {
            text += &format!("  {:<11} {}\n", labels[i][j], table[i][j].render());
        }
    }
    let payload = json!({"p": p.get(), "entries": [[table[0][0].to_json(), table[0][1].to_json()], [table[1][0].to_json(), table[1][1].to_json()]]});
    let mut h = Harness::new();
    reg(&mut h, "local-p1-closed-form", CRITERIA[0].anchor, || checks::local_p1(p, cfg.q_max));
    Ok(CommandOutput { reports: h.into_reports(), payload, table: text })
}

fn tstar_p1(cfg: &RunConfig) -> qsteenrod::Result<CommandOutput> {
    let p = cfg.prime();
    let pairs = cfg.pairs();
    let values = pairing_values_json(p, cfg.q_max, cfg.h_max, &pairs)?;
    let w = Truncation::UNBOUNDED.with_q_max(cfg.q_max).with_h_max(cfg.h_max).with_x_max(0);
    let m = qsigma_series(p, w)?;
    let m = if cfg.basis == Basis::Stable { to_stable_basis(&m)? } else { m };
    let mut text = format!("T*P¹, p = {p}, q ≤ {}, h ≤ {}\n", cfg.q_max, cfg.h_max);
    for &(b0, binf) in &pairs {
        let mut acc = Vec::new();
        for d in 1..=cfg.q_max {
            let s = structure_constant_s1(p, d, b0, binf, cfg.h_max)?;
            if !s.is_zero() {
                acc.push(format!("({}) q^{d}", s.render()));
            }
        }
        let body = if acc.is_empty() { "0".to_string() } else { acc.join(" + ") };
        text += &format!("  (QΣ({}), {}) = {body}\n", b0.as_str(), binf.as_str());
    }
    text += &render_endo("QΣ_b matrix", &m);
    let payload = json!({"p": p.get(), "pairing_values": values, "matrix": m.to_json()});

    let mut h = Harness::new();
    let dual_h = (cfg.h_max - 1).max(0);
    reg(&mut h, "dual-path", CRITERIA[3].anchor, || {
        let mut bad = Vec::new();
        for d in 1..=cfg.q_max {
            for &(b0, binf) in &pairs {
                let a = localization_bracket(p, d, b0, binf, dual_h)?;
                let b = integral_quotient_ring(p, d, b0, binf, dual_h)?;
                if !a.eq_within(&b)? {
                    bad.push(json!({"d": d, "pair": [b0.as_str(), binf.as_str()]}));
                }
            }
        }
        Ok(Outcome::from_mismatches("residue/quotient-ring values", cfg.q_max as usize * pairs.len(), bad))
    });
    reg(&mut h, "homogeneity", "pairing values are homogeneous of the expected weight", || {
        let mut bad = Vec::new();
        for d in 1..=cfg.q_max {
            for &(b0, binf) in &pairs {
                if !structure_constant_s1(p, d, b0, binf, cfg.h_max)?.is_homogeneous(s1_weight(p, b0, binf)) {
                    bad.push(json!({"d": d, "pair": [b0.as_str(), binf.as_str()]}));
                }
            }
        }
        Ok(Outcome::from_mismatches("pairing values", cfg.q_max as usize * pairs.len(), bad))
    });
    if cfg.h_max >= 2 {
        reg(&mut h, "low-order-closed-forms", CRITERIA[5].anchor, || checks::closed_forms(p, cfg.q_max));
    }
    if let Some(mu) = cfg.mu {
        let pi = p.get() as u32;
        reg(&mut h, "periodicity", CRITERIA[4].anchor, || checks::periodicity(p, cfg.q_max.saturating_sub(pi).max(1), &[mu.value() as i64]));
    }
    let store = GoldenStore::new(&cfg.fixtures);
    reg(&mut h, "golden", "emitted pairing values match the stored fixture", || {
        store
            .check(p.get(), cfg.q_max, cfg.h_max, &pairing_values_json(p, cfg.q_max, cfg.h_max, &qsteenrod::localization_engine::InsertionClass::ALL.iter().flat_map(|&a| qsteenrod::localization_engine::InsertionClass::ALL.iter().map(move |&b| (a, b))).collect::<Vec<_>>())?, cfg.regen_golden)
            .map_err(|e| Error::Domain(format!("fixture I/O: {e}")))
    });
    Ok(CommandOutput { reports: h.into_reports(), payload, table: text })
}

fn verify_all(cfg: &RunConfig) -> qsteenrod::Result<CommandOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut h = Harness::new();
    for c in &CRITERIA {
        reg(&mut h, c.check_id, c.anchor, || criteria::run(c.number, &cfg.primes, &mut rng));
    }
    let store = GoldenStore::new(&cfg.fixtures);
    for &p in &cfg.primes {
        let q = 3 * p.get() as u32;
        let all = qsteenrod::localization_engine::InsertionClass::ALL;
        let pairs: Vec<_> = all.iter().flat_map(|&a| all.iter().map(move |&b| (a, b))).collect();
        reg(&mut h, &format!("golden-p{p}"), "emitted pairing values match the stored fixture", || {
            let values = pairing_values_json(p, q, 2, &pairs)?;
            store.check(p.get(), q, 2, &values, cfg.regen_golden).map_err(|e| Error::Domain(format!("fixture I/O: {e}")))
        });
    }
    let reports = h.into_reports();
    let payload = json!({"criteria": reports.iter().map(|r| json!({"check_id": r.check_id, "status": r.status.as_str()})).collect::<Vec<_>>()});
    Ok(CommandOutput { reports, payload, table: String::new() })
}

fn char0(cfg: &RunConfig) -> qsteenrod::Result<CommandOutput> {
    let s = char0_recursion(&char0_seed::<BigRational>(()), cfg.q_max)?;
    let mut text = format!("characteristic-0 flat endomorphism, orders 1..={}\n", cfg.q_max);
    let mut orders = Vec::new();
    for k in 1..=cfg.q_max {
        let sk = s.coeff_q(k)?;
        text += &format!("Σ^({k})\n");
        for i in 0..2 {
            for j in 0..2 {
                text += &format!("  [{i}][{j}] {}\n", sk.entry(i, j).render());
            }
        }
        orders.push(sk.to_json());
    }
    let mut h = Harness::new();
    if cfg.q_max >= 3 {
        reg(&mut h, "char0-recursion", CRITERIA[1].anchor, checks::char0_reference_check);
    }
    let p = cfg.prime();
    reg(&mut h, "char0-halts-mod-p", "the recursion over F_p stops at the first order divisible by p", || {
        let seed = classical_steenrod_term(p, Basis::Geometric)?;
        let pi = p.get() as u32;
        Ok(match char0_recursion(&seed, pi) {
            Err(Error::NonInvertibleOrder(k)) if k == pi => Outcome::pass(format!("halts at order {k}")),
            Err(e) => Outcome::fail(format!("unexpected error {e}"), None),
            Ok(_) => Outcome::fail("recursion did not halt", None),
        })
    });
    Ok(CommandOutput { reports: h.into_reports(), payload: json!({"orders": orders}), table: text })
}

fn qvec_json(v: &[QPoly; 2]) -> Value {
    json!(v.iter().map(|e| e.coeffs().iter().map(|c| c.value()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn flat_section(cfg: &RunConfig) -> qsteenrod::Result<CommandOutput> {
    let p = cfg.prime();
    let m = cfg.mu.expect("validated").value() as u32;
    let s = arithmetic_flat_section(p, m)?;
    let text = format!(
        "I_μ, p = {p}, m = {m} (stable basis)\n  first:  {:?}\n  second: {:?}\n",
        s.entries[0].coeffs().iter().map(|c| c.value()).collect::<Vec<_>>(),
        s.entries[1].coeffs().iter().map(|c| c.value()).collect::<Vec<_>>()
    );
    let mut h = Harness::new();
    reg(&mut h, "flat-section", CRITERIA[7].anchor, || {
        let poly = stable_qde_defect(s.mu, &s.entries);
        let series = stable_qde_series_defect(&s, cfg.q_max.max(2))?;
        Ok(if poly.iter().all(QPoly::is_zero) && series.is_zero() {
            Outcome::pass("polynomial and series forms vanish")
        } else {
            Outcome::fail("nonzero defect", Some(json!({"polynomial": qvec_json(&poly), "series": series.to_json()})))
        })
    });
    Ok(CommandOutput { reports: h.into_reports(), payload: s.to_json(), table: text })
}

fn annihilation(cfg: &RunConfig) -> qsteenrod::Result<CommandOutput> {
    let p = cfg.prime();
    let m = cfg.mu.expect("validated").value() as u32;
    let r = annihilation_check(p, m)?;
    let payload = json!({"p": p.get(), "m": m, "holds": r.holds, "defect": qvec_json(&r.defect)});
    let mut h = Harness::new();
    reg(&mut h, "annihilation", CRITERIA[6].anchor, || {
        Ok(if r.holds {
            Outcome::pass(format!("m = {m}: both sides agree"))
        } else {
            Outcome::fail(format!("m = {m}: sides differ"), Some(qvec_json(&r.defect)))
        })
    });
    Ok(CommandOutput { reports: h.into_reports(), payload, table: format!("annihilation, p = {p}, m = {m}: {}\n", r.holds) })
}

fn flatness(cfg: &RunConfig) -> qsteenrod::Result<CommandOutput> {
    let p = cfg.prime();
    let mut h = Harness::new();
    reg(&mut h, "covariant-constancy", CRITERIA[2].anchor, || checks::flatness(p, cfg.q_max, cfg.h_max, cfg.basis));
    let r = &h.reports()[0];
    let payload = json!({"p": p.get(), "status": r.status.as_str(), "defect": r.defect.clone().unwrap_or(Value::Null)});
    Ok(CommandOutput { reports: h.into_reports(), payload, table: String::new() })
}

fn decompose(cfg: &RunConfig) -> qsteenrod::Result<CommandOutput> {
    let p = cfg.prime();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let w = Truncation::UNBOUNDED.with_q_max(cfg.q_max).with_h_max(cfg.h_max.min(3)).with_x_max(0);
    let q = qsigma_series(p, w)?;
    let f1 = checks::random_q_p_series(p, cfg.q_max, &mut rng)?;
    let f2 = checks::random_q_p_series(p, cfg.q_max, &mut rng)?;
    let id = Endo2::identity(p, q.window(), Basis::Geometric);
    let sigma = id.scale_series(&f1)?.add(&q.scale_series(&f2)?)?;
    let (g1, g2) = rank2_decompose(&sigma, &q)?;
    let payload = json!({"p": p.get(), "f1": g1.to_json(), "f2": g2.to_json()});
    let text = format!("σ = f1·id + f2·QΣ_b with\n  f1 = {}\n  f2 = {}\n", g1.render(), g2.render());
    let mut h = Harness::new();
    reg(&mut h, "rank-2-decomposition", CRITERIA[8].anchor, || {
        Ok(if g1.sub(&f1)?.is_zero() && g2.sub(&f2)?.is_zero() {
            Outcome::pass("recovered coefficients equal the inputs")
        } else {
            Outcome::fail("recovered coefficients differ", Some(json!({"f1": f1.to_json(), "f2": f2.to_json()})))
        })
    });
    Ok(CommandOutput { reports: h.into_reports(), payload, table: text })
}
