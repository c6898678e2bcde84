use std::f64::consts::PI;
use std::sync::OnceLock;

use gausslab::dioph::{count_constrained_primes, ConstraintQuery, Metric};
use gausslab::gint::{hurwitz_expansion, DEFAULT_PREC};
use gausslab::gsieve::{count_primes_sector, load_or_build, load_table, save_table, PrimeTable, SectorAnnulus};
use gausslab::report::{read_csv, report_body, Report};
use gausslab::{ComplexHP, Error};
use proptest::prelude::*;

fn table() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::build(40_000).unwrap())
}

#[test]
fn cache_round_trip_and_coverage() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.bin");
    let t = PrimeTable::build(5000).unwrap();
    save_table(&t, &path).unwrap();
    assert!(save_table(&t, &path).is_err(), "an existing file is not replaced");
    let back = load_table(&path).unwrap();
    assert_eq!(back.max_norm(), 5000);
    assert!(back.primes().eq(t.primes()));
    let smaller = load_or_build(&path, 1000).unwrap();
    assert_eq!(smaller.max_norm(), 1000);
    let larger = load_or_build(&path, 9000).unwrap();
    assert_eq!(larger.max_norm(), 9000);
    assert_eq!(load_table(&path).unwrap().max_norm(), 5000);
    assert!(matches!(count_primes_sector(&back, &SectorAnnulus::disc(80.0)), Err(Error::Coverage { .. })));
}

#[test]
fn report_round_trip_through_csv() {
    let t = table();
    let mut r = Report::new();
    r.meta("command", "count");
    for piece in SectorAnnulus::partition(10.0, 150.0, 4) {
        r.push(&count_primes_sector(t, &piece).unwrap()).unwrap();
    }
    let text = r.to_csv().unwrap();
    let (meta, cols, rows) = read_csv(&text).unwrap();
    assert_eq!(meta, vec!["command: count".to_string()]);
    assert_eq!(rows.len(), 4);
    assert!(cols.contains(&"observed".to_string()));
    assert!(!report_body(&text).contains('#'));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sector_counts_add_up(pieces in 1usize..12, r_min in 0.0f64..100.0, width in 1.0f64..100.0) {
        let t = table();
        let r_max = (r_min + width).min(200.0);
        prop_assume!(r_min < r_max);
        let whole = count_primes_sector(t, &SectorAnnulus::new(r_min, r_max, -PI, PI).unwrap()).unwrap();
        let parts: u64 = SectorAnnulus::partition(r_min, r_max, pieces)
            .iter()
            .map(|s| count_primes_sector(t, s).unwrap().observed)
            .sum();
        prop_assert_eq!(parts, whole.observed);
    }

    #[test]
    fn constrained_counts_are_monotone(re in -2.0f64..2.0, im in -2.0f64..2.0, d in 0.01f64..0.49) {
        let c = ComplexHP::from_f64(re, im, DEFAULT_PREC);
        let q = ConstraintQuery::new(SectorAnnulus::disc(120.0), d, Metric::Sup);
        let sup = count_constrained_primes(table(), &c, &q).unwrap();
        let wider = count_constrained_primes(table(), &c, &q.with_delta(d + 0.01)).unwrap();
        let euclid = count_constrained_primes(table(), &c, &q.with_metric(Metric::Euclid)).unwrap();
        let inner = count_constrained_primes(table(), &c, &q.with_delta(d / 2f64.sqrt()).with_metric(Metric::Sup)).unwrap();
        prop_assert!(sup <= wider);
        prop_assert!(inner <= euclid && euclid <= sup);
    }

    #[test]
    fn hurwitz_convergents_verify(re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let c = ComplexHP::from_f64(re, im, DEFAULT_PREC);
        let e = hurwitz_expansion(&c, 40, Some(1 << 40)).unwrap();
        prop_assert!(e.verify().is_ok());
    }
}
