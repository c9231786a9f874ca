use std::ffi::CStr;
use std::ptr;

use trendband::{gen_breakout, gen_hetero_sine, BreakoutSpec, HeteroSineSpec};
use trendband_ffi::*;

fn breakout() -> Vec<f64> {
    gen_breakout(&BreakoutSpec::default()).unwrap().series.into_values()
}

#[test]
fn offline_detection_round_trip() {
    let y = breakout();
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(tb_detect_offline(ptr::null(), y.as_ptr(), y.len(), false, &mut report), TbStatus::TB_OK);
        assert!(!report.is_null());
        let n = tb_report_anomalies(report, ptr::null_mut(), 0);
        let mut idx = vec![0usize; n];
        assert_eq!(tb_report_anomalies(report, idx.as_mut_ptr(), idx.len()), n);
        assert!(idx.contains(&250));
        let expected = trendband::detect_offline(
            &trendband::TimeSeries::new(y.clone()).unwrap(),
            &trendband::DetectorConfig::default(),
            false,
        )
        .unwrap();
        assert_eq!(idx, expected.anomalies);
        assert!(tb_report_candidates(report, ptr::null_mut(), 0) >= n);

        let buckets = tb_report_buckets(report, ptr::null_mut(), 0);
        assert_eq!(buckets, expected.plan_used.len());
        let mut bounds = vec![0usize; 2 * buckets];
        tb_report_buckets(report, bounds.as_mut_ptr(), bounds.len());
        assert_eq!(bounds[0], 0);
        assert_eq!(*bounds.last().unwrap(), 500);
        let mut fas = vec![0.0; buckets];
        assert_eq!(tb_report_fas(report, fas.as_mut_ptr(), fas.len()), buckets);
        assert_eq!(fas, expected.fas_per_bucket);
        assert_eq!(tb_report_period(report), 0);
        tb_report_free(report);
    }
}

#[test]
fn short_capacity_copies_a_prefix() {
    let y = breakout();
    let mut report = ptr::null_mut();
    unsafe {
        tb_detect_offline(ptr::null(), y.as_ptr(), y.len(), false, &mut report);
        let total = tb_report_candidates(report, ptr::null_mut(), 0);
        let mut two = [usize::MAX; 2];
        assert_eq!(tb_report_candidates(report, two.as_mut_ptr(), 1), total);
        assert_ne!(two[0], usize::MAX);
        assert_eq!(two[1], usize::MAX);
        tb_report_free(report);
    }
}

#[test]
fn periodicity() {
    let y = gen_hetero_sine(&HeteroSineSpec::default()).unwrap().series.into_values();
    let mut p = 0usize;
    unsafe {
        assert_eq!(tb_detect_periodicity(ptr::null(), y.as_ptr(), y.len(), &mut p), TbStatus::TB_OK);
        assert_eq!(p, 28);
        let noise = breakout();
        assert_eq!(tb_detect_periodicity(ptr::null(), noise.as_ptr(), noise.len(), &mut p), TbStatus::TB_OK);
        assert_eq!(p, 0);
    }
}

#[test]
fn error_codes() {
    let mut report = ptr::null_mut();
    let bad = [1.0, f64::NAN, 2.0];
    unsafe {
        assert_eq!(tb_detect_offline(ptr::null(), bad.as_ptr(), 3, false, &mut report), TbStatus::TB_NON_FINITE_SAMPLE);
        assert!(report.is_null());
        assert_eq!(
            tb_detect_offline(ptr::null(), [1.0, 2.0].as_ptr(), 2, false, &mut report),
            TbStatus::TB_SERIES_TOO_SHORT
        );
        assert_eq!(tb_detect_offline(ptr::null(), ptr::null(), 5, false, &mut report), TbStatus::TB_NULL_POINTER);
        assert_eq!(tb_detect_offline(ptr::null(), bad.as_ptr(), 3, false, ptr::null_mut()), TbStatus::TB_NULL_POINTER);
        let mut p = 0;
        assert_eq!(tb_detect_periodicity(ptr::null(), ptr::null(), 0, &mut p), TbStatus::TB_OK);
        assert_eq!(p, 0);
    }
}

#[test]
fn config_validation() {
    unsafe {
        let cfg = tb_config_new();
        assert_eq!(tb_config_set_alpha(cfg, 0.3), TbStatus::TB_OK);
        assert_eq!(tb_config_set_fas_threshold(cfg, 0.5), TbStatus::TB_OK);
        // rejected values leave the previous settings in place
        assert_eq!(tb_config_set_alpha(cfg, 1.5), TbStatus::TB_INVALID_ARGUMENT);
        assert_eq!(tb_config_set_bound_multiplier(cfg, 0.0), TbStatus::TB_INVALID_ARGUMENT);
        assert_eq!(tb_config_set_alpha(ptr::null_mut(), 0.3), TbStatus::TB_NULL_POINTER);

        let y = breakout();
        let mut report = ptr::null_mut();
        assert_eq!(tb_detect_offline(cfg, y.as_ptr(), y.len(), false, &mut report), TbStatus::TB_OK);
        let cfg_rs = trendband::DetectorConfig { alpha: 0.3, fas_threshold: 0.5, ..Default::default() };
        let expected =
            trendband::detect_offline(&trendband::TimeSeries::new(y.clone()).unwrap(), &cfg_rs, false).unwrap();
        let mut got = vec![0usize; expected.candidates.len()];
        tb_report_candidates(report, got.as_mut_ptr(), got.len());
        assert_eq!(got, expected.candidates);
        assert_eq!(tb_report_anomalies(report, ptr::null_mut(), 0), expected.anomalies.len());
        tb_report_free(report);
        tb_config_free(cfg);
        tb_config_free(ptr::null_mut());
    }
}

#[test]
fn streaming_matches_the_library() {
    let y = breakout();
    let expected =
        trendband::replay(&trendband::TimeSeries::new(y.clone()).unwrap(), &trendband::DetectorConfig::default(), true)
            .unwrap();
    unsafe {
        let s = tb_stream_new(ptr::null());
        let mut flagged = Vec::new();
        for (i, &v) in y.iter().enumerate() {
            let mut ran = false;
            let mut hit = false;
            assert_eq!(tb_stream_push(s, v, &mut ran, &mut hit), TbStatus::TB_OK);
            assert_eq!(ran, expected.decisions[i].ran());
            if hit {
                flagged.push(i);
            }
        }
        assert_eq!(flagged, expected.anomalies());
        assert_eq!(tb_stream_runs(s), expected.runs_executed());
        assert_eq!(tb_stream_len(s), 500);
        assert_eq!(tb_stream_push(s, f64::INFINITY, ptr::null_mut(), ptr::null_mut()), TbStatus::TB_NON_FINITE_SAMPLE);
        assert_eq!(tb_stream_len(s), 500);
        tb_stream_free(s);
        assert_eq!(tb_stream_push(ptr::null_mut(), 1.0, ptr::null_mut(), ptr::null_mut()), TbStatus::TB_NULL_POINTER);
        assert_eq!(tb_stream_runs(ptr::null()), 0);
    }
}

#[test]
fn messages_are_static_strings() {
    for status in [
        TbStatus::TB_OK,
        TbStatus::TB_NULL_POINTER,
        TbStatus::TB_INVALID_ARGUMENT,
        TbStatus::TB_NON_FINITE_SAMPLE,
        TbStatus::TB_SERIES_TOO_SHORT,
        TbStatus::TB_DEGENERATE_SERIES,
        TbStatus::TB_NUMERICAL,
        TbStatus::TB_INTERNAL,
    ] {
        let msg = unsafe { CStr::from_ptr(tb_status_message(status)) };
        assert!(!msg.to_bytes().is_empty());
    }
    let v = unsafe { CStr::from_ptr(tb_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
