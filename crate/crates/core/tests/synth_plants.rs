use corevalues::config::RunConfig;
use corevalues::corpus::{author_index, Message, Orientation, OrientationLexicon, ParsedCorpus};
use corevalues::dynamics::{average_response_time, ResponseOptions};
use corevalues::exec::Exec;
use corevalues::graph::{build_graph, density, group_degree_centralization};
use corevalues::hierarchy::Metric;
use corevalues::language::PolarityLexicon;
use corevalues::pipeline::{analyze, Inputs};
use corevalues::synth::{
    generate_corpus, planted_extrema, LagDistribution, OrientationPlan, Shape, SynthSpec,
};

fn gen(spec: &SynthSpec, seed: u64) -> Vec<Message> {
    generate_corpus(
        spec,
        seed,
        &OrientationLexicon::default(),
        &PolarityLexicon::default(),
    )
    .unwrap()
}

fn one(plan: OrientationPlan, days: u32) -> SynthSpec {
    SynthSpec {
        days,
        orientations: vec![plan],
        ..SynthSpec::default()
    }
}

fn run(messages: Vec<Message>) -> corevalues::report::HierarchyReport {
    let parsed = ParsedCorpus {
        messages,
        skipped: 0,
    };
    analyze(
        &parsed,
        &Inputs::default(),
        &RunConfig::default(),
        Exec::default(),
    )
    .unwrap()
    .report
}

#[test]
fn star_plant_is_centralized() {
    let spec = one(
        OrientationPlan {
            actors: 50,
            messages: 600,
            shape: Shape::Star,
            ..OrientationPlan::default()
        },
        30,
    );
    let msgs = gen(&spec, 11);
    let refs: Vec<&Message> = msgs.iter().collect();
    let g = build_graph(refs.iter().copied(), &author_index(&msgs));
    assert!(g.node_count() >= 40);
    assert!(group_degree_centralization(g.simple()) >= 0.9);
}

#[test]
fn dyad_plant_is_sparse() {
    let spec = one(
        OrientationPlan {
            actors: 200,
            messages: 2_000,
            shape: Shape::FragmentedDyads,
            ..OrientationPlan::default()
        },
        30,
    );
    let msgs = gen(&spec, 3);
    let refs: Vec<&Message> = msgs.iter().collect();
    let g = build_graph(refs.iter().copied(), &author_index(&msgs));
    let n = g.node_count() as f64;
    assert!(density(g.simple()) <= 1.0 / (n - 1.0) + 1e-12);
}

#[test]
fn constant_lag_gives_exact_art() {
    // one thread per dyad, always answered, so every contact has one answer
    let spec = one(
        OrientationPlan {
            actors: 400,
            messages: 200,
            shape: Shape::FragmentedDyads,
            lag: LagDistribution::Constant { hours: 2.0 },
            response_rate: 1.0,
            extra_ping_rate: 0.0,
            isolated_rate: 0.0,
            ..OrientationPlan::default()
        },
        1,
    );
    let msgs = gen(&spec, 5);
    let refs: Vec<&Message> = msgs.iter().collect();
    let art = average_response_time(&refs, &author_index(&msgs), ResponseOptions::default());
    assert_eq!(art, Some(2.0));
}

#[test]
fn planted_oscillation_is_recovered() {
    for (period, days) in [(7, 60), (4, 30), (10, 45), (2, 12)] {
        let spec = one(
            OrientationPlan {
                orientation: Orientation::Excellence,
                actors: 12,
                messages: 40 * days,
                oscillation_period: Some(period),
                ..OrientationPlan::default()
            },
            days,
        );
        let report = run(gen(&spec, u64::from(period)));
        let rl = report
            .get(Orientation::Excellence)
            .unwrap()
            .raw
            .get(Metric::RotatingLeadership)
            .unwrap();
        assert_eq!(report.metadata.window_count, Some(days as usize));
        assert_eq!(rl, planted_extrema(period, days) as f64, "period {period}");
    }
}
