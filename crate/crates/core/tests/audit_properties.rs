use pco_core::audit::{
    audit, find_dominated, AuditOptions, DifficultyVector, DominanceIndex, PartialOrderKind, Population,
    ScoredExaminee,
};
use pco_core::calibration::{calibrate_jml, JmlConfig};
use pco_core::scoring::{score_population, EstimatorKind};
use pco_core::simulation::{generate_responses, sample_bank, sample_thetas, BankSpec, PopulationSpec};
use pco_core::{ItemBank, ModelKind, QuadratureGrid};
use proptest::prelude::*;

/// Direct reading of the definition: sort both difficulty sets descending,
/// pad the shorter one with -100, compare position by position.
fn oracle_weaker(k: &[f64], j: &[f64], n: usize, order: PartialOrderKind) -> bool {
    let pad = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(|x, y| y.partial_cmp(x).unwrap());
        v.resize(n, -100.0);
        v
    };
    let (pk, pj) = (pad(k), pad(j));
    let le = pk.iter().zip(&pj).all(|(x, y)| x <= y);
    let strict = (0..j.len()).any(|l| pk[l] < pj[l]);
    le && (strict || order == PartialOrderKind::Weak)
}

#[derive(Debug)]
struct Case {
    n: usize,
    sets: Vec<Vec<f64>>,
    thetas: Vec<f64>,
}

impl Case {
    fn population(&self) -> Population {
        let ex = self
            .sets
            .iter()
            .zip(&self.thetas)
            .enumerate()
            .map(|(i, (s, &t))| ScoredExaminee {
                id: format!("{i}"),
                theta: t,
                difficulties: DifficultyVector::from_correct(s.clone(), self.n),
            })
            .collect();
        Population::from_examinees(ex, self.n)
    }

    fn brute(&self, k: usize, opts: AuditOptions) -> Vec<usize> {
        (0..self.sets.len())
            .filter(|&j| {
                self.thetas[k] - self.thetas[j] > opts.theta_epsilon
                    && oracle_weaker(&self.sets[k], &self.sets[j], self.n, opts.order)
            })
            .collect()
    }
}

fn case() -> impl Strategy<Value = Case> {
    // few distinct difficulties and coarse abilities make ties common
    (2usize..8, 2usize..40).prop_flat_map(|(n, m)| {
        let diffs = prop::collection::vec((-4i32..4).prop_map(|x| x as f64 * 0.5), n);
        let patterns = prop::collection::vec(prop::collection::vec(0u8..=1, n), m);
        let thetas = prop::collection::vec((-6i32..6).prop_map(|x| x as f64 * 0.25), m);
        (Just(n), diffs, patterns, thetas).prop_map(|(n, d, pats, thetas)| Case {
            n,
            sets: pats
                .iter()
                .map(|u| u.iter().zip(&d).filter(|(x, _)| **x == 1).map(|(_, b)| *b).collect())
                .collect(),
            thetas,
        })
    })
}

fn opts() -> impl Strategy<Value = AuditOptions> {
    (prop_oneof![Just(PartialOrderKind::Strict), Just(PartialOrderKind::Weak)], prop_oneof![Just(0.0), Just(0.3)])
        .prop_map(|(order, theta_epsilon)| AuditOptions { order, theta_epsilon })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pruned_search_matches_definition(c in case(), o in opts()) {
        let pop = c.population();
        let index = DominanceIndex::new(&pop, o).unwrap();
        for k in 0..c.sets.len() {
            prop_assert_eq!(index.dominated_by(k), c.brute(k, o));
        }
    }

    #[test]
    fn emitted_pairs_are_violations(c in case(), o in opts()) {
        let pop = c.population();
        let out = audit(&pop, &[], o).unwrap();
        for p in &out.pairs {
            prop_assert!(oracle_weaker(&c.sets[p.dominator], &c.sets[p.dominated], c.n, o.order));
            prop_assert!(c.thetas[p.dominated] < c.thetas[p.dominator]);
            prop_assert_eq!(p.item_difference, c.sets[p.dominated].len() - c.sets[p.dominator].len());
        }
        let total: usize = out.dominated_counts.iter().sum();
        prop_assert_eq!(total, out.pairs.len());
    }

    #[test]
    fn dominance_is_antisymmetric(c in case(), o in opts()) {
        let pop = c.population();
        let index = DominanceIndex::new(&pop, o).unwrap();
        let sets: Vec<Vec<usize>> = (0..c.sets.len()).map(|k| index.dominated_by(k)).collect();
        for (k, s) in sets.iter().enumerate() {
            for &j in s {
                prop_assert!(!sets[j].contains(&k));
            }
        }
    }

    #[test]
    fn category_rows_are_consistent(c in case()) {
        let pop = c.population();
        let cats: Vec<usize> = (0..c.n).collect();
        let out = audit(&pop, &cats, AuditOptions::default()).unwrap();
        for row in &out.report.rows {
            prop_assert!(row.number_dominating <= row.number_students);
            if row.number_students > 0 {
                let pct = row.number_dominating as f64 / row.number_students as f64;
                prop_assert!((row.percentage - pct).abs() < 1e-12);
            }
            prop_assert!(row.max_item_difference as f64 >= row.mean_item_difference);
            prop_assert!(row.max_ability_difference >= row.mean_ability_difference);
        }
    }

    #[test]
    fn one_pl_scores_never_violate(seed in 0u64..1000, items in 3usize..15) {
        let bank = sample_bank(&BankSpec { items, model: ModelKind::OnePL, seed, ..BankSpec::default() }).unwrap();
        let thetas = sample_thetas(&PopulationSpec { examinees: 150, seed });
        let data = generate_responses(&thetas, &bank, seed + 1);
        for est in [EstimatorKind::Eap, EstimatorKind::Map, EstimatorKind::Mle] {
            let table = score_population(&data, &bank, &QuadratureGrid::default(), est).unwrap();
            let pop = Population::build(&data, &bank, &table).unwrap();
            prop_assert!(audit(&pop, &[], AuditOptions::default()).unwrap().pairs.is_empty());
        }
    }
}

#[test]
fn find_dominated_single_query() {
    let c = Case { n: 2, sets: vec![vec![0.5], vec![1.0], vec![0.5, 0.2]], thetas: vec![1.0, 0.0, 0.5] };
    let pop = c.population();
    assert_eq!(find_dominated(0, &pop, AuditOptions::default()).unwrap(), vec![1, 2]);
    assert!(find_dominated(1, &pop, AuditOptions::default()).unwrap().is_empty());
}

#[test]
fn one_pl_jml_ability_increases_with_raw_score() {
    let bank: ItemBank = sample_bank(&BankSpec { items: 20, model: ModelKind::OnePL, seed: 7, ..BankSpec::default() }).unwrap();
    let thetas = sample_thetas(&PopulationSpec { examinees: 600, seed: 7 });
    let data = generate_responses(&thetas, &bank, 8);
    let out = calibrate_jml(&data, &JmlConfig { model: ModelKind::OnePL, ..JmlConfig::default() }).unwrap();
    assert!(out.calibration.converged);
    let rows = &out.abilities.rows;
    for x in rows {
        for y in rows {
            let (tx, ty) = (x.theta.unwrap(), y.theta.unwrap());
            if x.n_correct < y.n_correct {
                assert!(tx < ty);
            } else if x.n_correct == y.n_correct {
                assert_eq!(tx, ty);
            }
        }
    }
}
