use pco_core::dimensionality::{eigen_scree, phi_correlation, symmetric_eigenvalues, Matrix};
use pco_core::simulation::{generate_responses, sample_bank, sample_thetas, BankSpec, PopulationSpec};
use proptest::prelude::*;

fn symmetric(max: usize) -> impl Strategy<Value = Matrix> {
    (1..max).prop_flat_map(|n| {
        prop::collection::vec(-3.0f64..3.0, n * n).prop_map(move |v| {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| if i <= j { v[i * n + j] } else { v[j * n + i] }).collect())
                .collect();
            Matrix::from_rows(&rows).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn eigenvalues_sum_to_trace(m in symmetric(9)) {
        let e = symmetric_eigenvalues(&m).unwrap();
        prop_assert!((e.iter().sum::<f64>() - m.trace()).abs() < 1e-10);
        prop_assert!(e.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn phi_is_a_correlation_matrix(rows in prop::collection::vec(prop::collection::vec(0u8..=1, 6), 3..40)) {
        let data = pco_core::ResponseMatrix::from_rows(&rows).unwrap();
        let phi = phi_correlation(&data);
        let m = &phi.matrix;
        prop_assert_eq!(phi.retained.len() + phi.excluded.len(), 6);
        for i in 0..m.dim() {
            prop_assert_eq!(m.get(i, i), 1.0);
            for j in 0..m.dim() {
                prop_assert_eq!(m.get(i, j), m.get(j, i));
                prop_assert!((-1.0..=1.0).contains(&m.get(i, j)));
            }
        }
        let s = eigen_scree(m).unwrap();
        prop_assert!((s.eigenvalues.iter().sum::<f64>() - m.dim() as f64).abs() < 1e-10);
    }
}

#[test]
fn unidimensional_data_has_dominant_first_factor() {
    let bank = sample_bank(&BankSpec { items: 40, seed: 5, ..BankSpec::default() }).unwrap();
    let pop = PopulationSpec { examinees: 2000, seed: 5 };
    let data = generate_responses(&sample_thetas(&pop), &bank, pop.response_seed());
    let phi = phi_correlation(&data);
    let s = eigen_scree(&phi.matrix).unwrap();
    assert!(s.first_factor_share >= 3.0 * s.proportions[1], "{:?}", &s.proportions[..3]);
    assert!((s.eigenvalues.iter().sum::<f64>() - phi.matrix.dim() as f64).abs() < 1e-10);
}
