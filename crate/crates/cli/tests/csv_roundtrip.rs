use murmur_lab::{parse_csv, to_csv_string, ExperimentResult, Row};
use num_complex::Complex64;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        -10.0..10.0f64,
        Just(0.0),
        Just(-0.0),
    ]
}

fn result() -> impl Strategy<Value = ExperimentResult> {
    let meta = prop::collection::vec(("[a-z_]{1,12}", "[ -~&&[^=]]{0,20}"), 0..6);
    (meta, any::<bool>(), 0..40usize).prop_flat_map(|(metadata, overlay, n)| {
        let row = (finite(), finite(), finite(), finite(), finite()).prop_map(
            move |(x, a, b, c, d)| Row {
                x,
                value: Complex64::new(a, b),
                overlay: overlay.then(|| Complex64::new(c, d)),
            },
        );
        prop::collection::vec(row, n).prop_map(move |rows| ExperimentResult {
            metadata: metadata
                .iter()
                .map(|(k, v)| (k.clone(), v.trim().to_string()))
                .collect(),
            has_overlay: overlay,
            rows,
        })
    })
}

proptest! {
    #[test]
    fn parse_inverts_emit(r in result()) {
        let text = to_csv_string(&r);
        let back = parse_csv(&text).unwrap();
        prop_assert_eq!(back.metadata, r.metadata);
        prop_assert_eq!(back.has_overlay, r.has_overlay);
        prop_assert_eq!(back.rows.len(), r.rows.len());
        for (a, b) in back.rows.iter().zip(&r.rows) {
            prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
            prop_assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
            prop_assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
            prop_assert_eq!(a.overlay.map(|o| (o.re.to_bits(), o.im.to_bits())),
                            b.overlay.map(|o| (o.re.to_bits(), o.im.to_bits())));
        }
    }
}
