use wrtlab::geometry::{invariants, Ray};
use wrtlab::phantom::PhantomConfig;
use wrtlab::profiles::{smooth_step, BumpProfile, DyadicPartition};

#[test]
fn f32_profiles_track_f64() {
    let b32 = BumpProfile::<f32>::standard();
    let b64 = BumpProfile::<f64>::standard();
    for j in 0..=400 {
        let x = 0.7 + 0.6 * j as f64 / 400.0;
        assert!(
            (b32.eval(x as f32) as f64 - b64.eval(x)).abs() <= 1e-5,
            "x = {x}"
        );
        assert!((smooth_step(x as f32 - 0.5) as f64 - smooth_step(x - 0.5)).abs() <= 1e-5);
    }
    let p = DyadicPartition::new(6).unwrap();
    for j in 0..=200 {
        let r = 0.5 + 0.48 * j as f64 / 200.0;
        let a: f32 = p.sum(r as f32);
        let b: f64 = p.sum(r);
        assert!((a as f64 - b).abs() <= 1e-5, "r = {r}");
    }
}

#[test]
fn f32_phantom_tracks_f64_for_low_k() {
    let c32 = PhantomConfig::<f32>::new(4).unwrap();
    let c64 = PhantomConfig::<f64>::new(4).unwrap();
    for j in 0..=400 {
        let t = j as f64 / 400.0;
        // cos(8^k t^2) loses about 8^k * 2^-24 in f32.
        let tol = 8f64.powi(4) * f32::EPSILON as f64 * 4.0;
        assert!(
            (c32.f_radial(t as f32) as f64 - c64.f_radial(t)).abs() <= tol,
            "t = {t}"
        );
    }
    assert_eq!(c32.annulus_of(0.9375f32), c64.annulus_of(0.9375));
}

#[test]
fn f32_rays() {
    let ray = Ray::<f32>::new(&[1.0, 2.0, 2.0], &[0.0, 0.6, 0.8]).unwrap();
    let (n, a) = invariants(&ray.point(0.5), &ray.dir);
    assert!((a - 0.5).abs() <= 1e-6);
    assert!((n * n - ray.distance() * ray.distance() - 0.25).abs() <= 1e-5);
    assert!(Ray::<f32>::new(&[1.0, 0.0], &[0.5, 0.5]).is_err());
}
