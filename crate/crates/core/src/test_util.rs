macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!((a - b).abs() <= $tol, "{a} vs {b} (tol {})", $tol);
    }};
}

macro_rules! assert_rel {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        let scale = a.abs().max(b.abs()).max(1e-300);
        assert!(
            (a - b).abs() <= $tol * scale,
            "{a} vs {b} (rel tol {})",
            $tol
        );
    }};
}
