use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Config, Pipeline};
use super::generate::{gen_planted, planted_biclique, random_hypergraph};
use super::report::{Relation, Report};
use crate::error::{Error, Result};
use crate::fourier::{check_small_set_witness, decode_assignment};
use crate::gadget::{build_gadget, c1_formula, completeness_bound, Atom, CompletenessRule, GadgetMode};
use crate::graph::{SseInstance, VertexSubset, WeightedGraph};
use crate::oracles::{
    max_small_side_uncut, random_assignment_value, solve_dalks, solve_mbb, solve_min_kcut, solve_muchb, sse_decide,
    ug_value, SseVerdict,
};
use crate::rational::{self, from_usize, int, Rational};
use crate::reductions::{
    amplify_biclique, bisection_biclique, dalks_completeness_density, dalks_soundness_bound,
    kcut_completeness_partition, kcut_soundness_audit, reduce_muchb_to_biclique, reduce_sse_to_dalks,
    reduce_sse_to_kcut, AmplifyParams,
};
use crate::ug::{build_ug, intended_assignment, UgBuildMode};

use Relation::{Eq, Ge, Gt, Le};

/// Runs one pipeline end to end. The report depends only on the config.
pub fn run_pipeline(config: &Config) -> Result<Report> {
    let mut report = Report::new(
        config.pipeline.name(),
        config.hash(),
        config.seed,
        config.budget as u128,
    );
    match config.pipeline {
        Pipeline::Kcut => kcut(config, &mut report)?,
        Pipeline::Dalks => dalks(config, &mut report)?,
        Pipeline::Muchb => muchb(config, &mut report)?,
        Pipeline::Biclique => biclique(config, &mut report)?,
        Pipeline::Amplify => amplify(config, &mut report)?,
        Pipeline::Decode => decode(config, &mut report)?,
    }
    Ok(report)
}

fn planted(config: &Config, report: &mut Report) -> Result<(WeightedGraph, VertexSubset)> {
    let (g, s) = gen_planted(&config.instance.spec(config.seed))?;
    report.param("n", g.n());
    report.param("S", format!("{:?}", s.to_vec()));
    report.value("delta", &config.instance.delta);
    report.value("degree", &config.instance.degree);
    Ok((g, s))
}

fn sse_instance(config: &Config, g: &WeightedGraph) -> Result<SseInstance> {
    let i = &config.instance;
    SseInstance::new(g.clone(), i.delta.clone(), i.eta.clone(), i.m.clone())
}

fn verdict_name(v: &SseVerdict) -> &'static str {
    match v {
        SseVerdict::Completeness { .. } => "completeness",
        SseVerdict::Soundness { .. } => "soundness",
        SseVerdict::Neither { .. } => "neither",
    }
}

/// Runs an oracle, turning a budget overrun into `None` and a note.
fn within_budget<T>(report: &mut Report, what: &str, r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::BudgetExceeded { needed, budget }) => {
            report.param(
                format!("{what}.skipped"),
                format!("needs {needed} states, budget {budget}"),
            );
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn kcut(config: &Config, report: &mut Report) -> Result<()> {
    let (g, s) = planted(config, report)?;
    let inst = sse_instance(config, &g)?;
    let budget = config.budget();
    let reduced = reduce_sse_to_kcut(&inst);
    let comp = kcut_completeness_partition(&g, &s)?;
    report.value("phi", &comp.expansion);
    report.check("kcut.blocks", from_usize(comp.partition.k()), Eq, from_usize(reduced.k));
    report.check("kcut.completeness", comp.cost.clone(), Le, comp.bound.clone());

    let (optimum, verdict) = std::thread::scope(|sc| {
        let opt = sc.spawn(|| solve_min_kcut(&g, reduced.k, budget));
        let verdict = sse_decide(&inst, budget);
        (opt.join().expect("k-cut solver panicked"), verdict)
    });
    if let Some(v) = within_budget(report, "sse", verdict)? {
        report.param("sse.verdict", verdict_name(&v));
    }
    if let Some((partition, cost)) = within_budget(report, "kcut.optimum", optimum)? {
        report.check("kcut.optimum_le_planted", cost, Le, comp.cost);
        let audit = kcut_soundness_audit(&g, &partition, &inst.delta, &inst.eta)?;
        // |A| ≥ δn − √n, squared to stay rational.
        let deficit = (audit.delta_n as i64 - audit.a.len() as i64).max(0);
        report.check("kcut.soundness.size", int(deficit * deficit), Le, from_usize(g.n()));
        report.check("kcut.soundness.chain", audit.cost, Ge, audit.chain_rhs);
    }
    Ok(())
}

fn dalks(config: &Config, report: &mut Report) -> Result<()> {
    let (g, s) = planted(config, report)?;
    let inst = sse_instance(config, &g)?;
    let budget = config.budget();
    let reduced = reduce_sse_to_dalks(&inst, Default::default())?;
    let comp = dalks_completeness_density(&g, &s, &reduced, &inst.eta)?;
    report.value("phi", &comp.expansion);
    report.check("dalks.identity", comp.density.clone(), Eq, comp.closed_form.clone());
    if comp.expansion <= inst.eta {
        report.check("dalks.completeness", comp.density.clone(), Ge, comp.lower_bound.clone());
    } else {
        report.note("dalks.completeness", comp.density.clone(), Ge, comp.lower_bound.clone());
    }

    let (optimum, verdict) = std::thread::scope(|sc| {
        let opt = sc.spawn(|| solve_dalks(&reduced.graph, reduced.k, budget));
        let verdict = sse_decide(&inst, budget);
        (opt.join().expect("DALkS solver panicked"), verdict)
    });
    let verdict = within_budget(report, "sse", verdict)?;
    if let Some(v) = &verdict {
        report.param("sse.verdict", verdict_name(v));
    }
    if let Some(opt) = within_budget(report, "dalks.optimum", optimum)? {
        report.check("dalks.optimum_ge_planted", opt.density.clone(), Ge, comp.density);
        let bound = dalks_soundness_bound(&reduced.degree, reduced.delta_n, &inst.eta, &inst.m, reduced.k);
        if matches!(verdict, Some(SseVerdict::Soundness { .. })) {
            report.check("dalks.soundness", opt.density, Le, bound);
        } else {
            report.note("dalks.soundness", opt.density, Le, bound);
        }
    }
    Ok(())
}

fn muchb(config: &Config, report: &mut Report) -> Result<()> {
    let (g, s) = planted(config, report)?;
    let params = config.gadget.params()?;
    let budget = config.budget();
    report.param("R", params.r);
    report.param("k", params.k);
    report.param("ell", params.ell);
    report.value("beta", params.beta());
    report.value("eps_T", &params.eps_t);
    report.value("eps_V", &params.eps_v);

    let audit = completeness_bound(&g, &s, &params, budget)?;
    report.value("eta", &audit.eta);
    let c1 = c1_formula(params.r, params.k, params.beta(), &audit.delta);
    for (j, c) in audit.c1_blocks.iter().enumerate() {
        match c {
            Some(c) => report.check(format!("muchb.c1.block{j}"), c.clone(), Eq, c1.clone()),
            None => report.check(
                format!("muchb.c1.block{j}.defined"),
                Rational::zero(),
                Eq,
                Rational::one(),
            ),
        };
    }
    let worst = |v: &[Option<Rational>]| v.iter().flatten().max().cloned().unwrap_or_else(Rational::zero);
    report.check(
        "muchb.c2.empty",
        worst(&audit.c2_empty_blocks),
        Le,
        audit.empty_case_bound.clone(),
    );
    report.check(
        "muchb.c2.multi",
        worst(&audit.c2_multi_blocks),
        Le,
        audit.multi_case_bound.clone(),
    );
    report.value("c2", &audit.c2);
    report.check("muchb.c3", audit.c3.clone(), Le, audit.c3_bound.clone());
    report.check("muchb.chain", audit.measured.clone(), Ge, audit.bound.clone());

    let mode = if config.gadget.exact {
        GadgetMode::Exact
    } else {
        GadgetMode::Sample {
            seed: config.seed,
            count: config.gadget.samples,
        }
    };
    if let Some(h) = within_budget(report, "gadget", build_gadget(&g, &params, mode, budget))? {
        report.param("gadget.hyperedges", h.hyperedges().len());
        let closure = h.closure_report();
        let edges = from_usize(closure.edges);
        report.check("gadget.perm_closed", from_usize(closure.perm_closed), Eq, edges.clone());
        report.check("gadget.merge_closed", from_usize(closure.merge_closed), Eq, edges);
        if h.is_exact() {
            report.check("gadget.total_probability", h.total_probability(), Eq, Rational::one());
            let rule = CompletenessRule::new(s, params.k);
            let t0 = rule.prime(Atom::Zero);
            report.check("gadget.uncut_matches_audit", h.uncut_mass(&t0), Eq, audit.measured);
        }
    }
    Ok(())
}

fn biclique(config: &Config, report: &mut Report) -> Result<()> {
    let hc = &config.hypergraph;
    let budget = config.budget();
    let h = random_hypergraph(hc.vertices, hc.edges, config.seed)?;
    report.param(
        "hyperedges",
        format!("{:?}", h.hyperedges().iter().map(|(e, _)| e).collect::<Vec<_>>()),
    );
    let g = reduce_muchb_to_biclique(&h)?;
    report.param("reduced.edges", g.edge_count());
    let (mbb, _) = solve_mbb(&g, budget)?;
    let small = max_small_side_uncut(&h, budget)?;
    report.check("biclique.mbb_le_small_side", from_usize(mbb), Le, small.uncut);
    match solve_muchb(&h, budget) {
        Ok(sol) => {
            let bc = bisection_biclique(&h, &sol.bisection);
            let is_bc = if g.is_biclique(&bc.left, &bc.right) { 1 } else { 0 };
            report.check("biclique.bisection_is_biclique", int(is_bc), Eq, int(1));
            report.check("biclique.left_size", from_usize(bc.left.len()), Eq, sol.uncut.0);
            report.check("biclique.right_size", from_usize(bc.right.len()), Eq, sol.uncut.1);
        }
        Err(Error::OddUniverse(why)) => report.param("muchb.skipped", why),
        Err(e) => return Err(e),
    }
    Ok(())
}

fn amplify(config: &Config, report: &mut Report) -> Result<()> {
    let ac = &config.amplify;
    let base = planted_biclique(ac.n, ac.planted, &ac.noise, config.seed)?;
    let params = AmplifyParams::new(ac.eps.clone()).with_k(ac.k).with_tuples(ac.tuples);
    let amp = amplify_biclique(&base, &params, config.seed, config.budget())?;
    report.param("k", amp.k);
    report.param("tuples", amp.left.len());
    report.param("product.edges", amp.graph.edge_count());

    // A uniform tuple lands inside the planted side with probability (p/n)^k.
    let p = rational::pow(&Rational::new(ac.planted.into(), ac.n.into()), amp.k);
    let count = from_usize(amp.left.len());
    let mean = &count * &p;
    let var = &count * &p * (Rational::one() - &p);
    report.value("inside.mean", &mean);
    report.value("inside.variance", &var);
    let inside = |tuples: &[Vec<usize>]| -> Vec<usize> {
        (0..tuples.len())
            .filter(|&i| tuples[i].iter().all(|&a| a < ac.planted))
            .collect()
    };
    let (il, ir) = (inside(&amp.left), inside(&amp.right));
    for (side, hits) in [("left", &il), ("right", &ir)] {
        let dev = from_usize(hits.len()) - &mean;
        report.check(format!("amplify.inside_{side}_5sigma"), &dev * &dev, Le, int(25) * &var);
    }
    let is_bc = if amp.graph.is_biclique(&il, &ir) { 1 } else { 0 };
    report.check("amplify.planted_tuples_biclique", int(is_bc), Eq, int(1));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_ed9e);
    let n = amp.left.len();
    let mismatches = (0..ac.pair_checks)
        .filter(|_| {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let brute = amp.left[i]
                .iter()
                .all(|&a| amp.right[j].iter().all(|&b| base.has_edge(a, b)));
            brute != amp.graph.has_edge(i, j)
        })
        .count();
    report.check(
        "amplify.edge_rule_mismatches",
        from_usize(mismatches),
        Eq,
        Rational::zero(),
    );
    Ok(())
}

fn decode(config: &Config, report: &mut Report) -> Result<()> {
    let (g, s) = planted(config, report)?;
    let params = config.gadget.params()?;
    let budget = config.budget();
    let ug = build_ug(&g, params.r, params.k, &params.eps_v, UgBuildMode::Exact, budget)?;
    let intended = intended_assignment(g.n(), &s, params.r, params.k, budget)?;
    let intended_value = ug_value(&ug, &intended.labels)?;
    let random = random_assignment_value(&ug);
    let rule = CompletenessRule::new(s.clone(), params.k);
    let t0 = rule.part(Atom::Zero);
    let d = decode_assignment(&t0, &g, &params, &config.decode, &ug, config.seed, budget)?;
    report.param("empty_candidates", d.empty_candidates);
    report.value("target", &d.target);
    report.value("expected_value", &d.expected_value);
    report.check("decode.value_ge_random", d.value.clone(), Ge, random.clone());
    report.check("decode.intended_gt_decoded", intended_value.clone(), Gt, d.value);
    report.check("decode.intended_gt_random", intended_value, Gt, random.clone());
    report.note("decode.expected_ge_random", d.expected_value, Ge, random);
    let w = check_small_set_witness(&g, &s, &d.target, params.r, params.k, &params.eps_v)?;
    report.note("decode.witness_expansion", w.expansion, Le, w.bound);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(p: Pipeline) -> Config {
        let mut c = Config::new(p);
        c.instance.n = 6;
        c.instance.delta = rational::ratio(1, 3);
        c.seed = 5;
        c
    }

    #[test]
    fn every_pipeline_passes_on_small_defaults() {
        for p in Pipeline::ALL {
            let mut c = config(p);
            if p == Pipeline::Amplify {
                c.amplify.pair_checks = 500;
            }
            let r = run_pipeline(&c).unwrap();
            let failed: Vec<_> = r.failures().map(|r| r.name.clone()).collect();
            assert!(failed.is_empty(), "{p}: {failed:?}");
            assert!(!r.rows.is_empty());
            r.recheck().unwrap();
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let c = config(Pipeline::Kcut);
        assert_eq!(
            run_pipeline(&c).unwrap().to_json().unwrap(),
            run_pipeline(&c).unwrap().to_json().unwrap()
        );
    }
}
