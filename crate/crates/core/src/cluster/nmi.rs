use std::collections::HashMap;

/// Mutual information normalised by the arithmetic mean of the two
/// entropies. Two single-cluster labelings count as identical (1.0).
pub fn normalized_mutual_information(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings must have equal length");
    let n = a.len() as f64;
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    let mut pa: HashMap<usize, f64> = HashMap::new();
    let mut pb: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1.0;
        *pa.entry(x).or_default() += 1.0;
        *pb.entry(y).or_default() += 1.0;
    }
    let entropy = |m: &HashMap<usize, f64>| -> f64 {
        let mut counts: Vec<f64> = m.values().copied().collect();
        counts.sort_by(f64::total_cmp);
        -counts.iter().map(|&c| (c / n) * (c / n).ln()).sum::<f64>()
    };
    let (ha, hb) = (entropy(&pa), entropy(&pb));
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    let mut terms: Vec<f64> = joint
        .iter()
        .map(|(&(x, y), &c)| (c / n) * (c * n / (pa[&x] * pb[&y])).ln())
        .collect();
    terms.sort_by(f64::total_cmp);
    let mi: f64 = terms.iter().sum();
    (2.0 * mi / (ha + hb)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_up_to_renaming_is_one() {
        let a = [0, 0, 1, 1, 2, 2];
        let b = [5, 5, 3, 3, 9, 9];
        assert!((normalized_mutual_information(&a, &b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn independent_labelings_score_zero() {
        let a = [0, 0, 1, 1];
        let b = [0, 1, 0, 1];
        assert!(normalized_mutual_information(&a, &b).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_partial_agreement() {
        // Joint counts: (0,0)=2, (0,1)=1, (1,1)=1 over n=4.
        let a = [0, 0, 0, 1];
        let b = [0, 0, 1, 1];
        let ha = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        let hb = 2f64.ln();
        let mi = 0.5 * (0.5f64 / (0.75 * 0.5)).ln()
            + 0.25 * (0.25f64 / (0.75 * 0.5)).ln()
            + 0.25 * (0.25f64 / (0.25 * 0.5)).ln();
        let expected = 2.0 * mi / (ha + hb);
        assert!((normalized_mutual_information(&a, &b) - expected).abs() < 1e-12);
    }
}
