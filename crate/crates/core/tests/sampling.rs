use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relpol::domains::builtin_domain;
use relpol::pstrips::{legal_actions, parse_state, sample_transition, DomainDef, State};

const DRAWS: usize = 10_000;

fn frequency(dom: &DomainDef, q: &State, action: &str, seed: u64) -> f64 {
    let act = legal_actions(q, dom)
        .into_iter()
        .find(|a| a.display(dom, q.objects()).to_string() == action)
        .unwrap_or_else(|| panic!("{action} not legal"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moved = (0..DRAWS)
        .filter(|_| sample_transition(q, dom, &act, &mut rng).unwrap() != *q)
        .count();
    moved as f64 / DRAWS as f64
}

fn within_three_se(observed: f64, p: f64) {
    let se = (p * (1.0 - p) / DRAWS as f64).sqrt();
    assert!((observed - p).abs() <= 3.0 * se, "observed {observed}, expected {p} +/- {}", 3.0 * se);
}

#[test]
fn faststack_succeeds_four_times_in_five() {
    let dom = builtin_domain("bw1").unwrap();
    let q = parse_state(
        &dom,
        "(state (objects a b) (facts (on-table a) (on-table b) (clear a) (clear b) (arm-empty) (gon a b) (gon-table b)))",
    )
    .unwrap();
    within_three_se(frequency(&dom, &q, "faststack(a)", 11), 0.8);
}

#[test]
fn trucks_and_cars_drive_at_their_own_rates() {
    let dom = builtin_domain("lw1").unwrap();
    let facts = |v: &str| {
        format!(
            "(state (objects x y v) (facts (city x) (city y) ({v} v) (in v x) (selected v) (gin v x)))"
        )
    };
    let truck = parse_state(&dom, &facts("truck")).unwrap();
    within_three_se(frequency(&dom, &truck, "drive(y)", 12), 0.2);
    let car = parse_state(&dom, &facts("car")).unwrap();
    within_three_se(frequency(&dom, &car, "drive(y)", 13), 0.9);
}

#[test]
fn shipped_domain_files_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("domains");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let dom = relpol::pstrips::parse_domain(&text).unwrap();
        let stem = path.file_stem().unwrap().to_str().unwrap();
        assert_eq!(dom.name, stem);
        n += 1;
    }
    assert_eq!(n, 7);
}
