use std::ffi::{CStr, CString};
use std::ptr;

use framecoh_ffi::*;

fn last_error() -> String {
    let p = fc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Handle(*mut FcFrame);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { fc_frame_free(self.0) }
    }
}

fn gaussian(m: usize, n: usize, seed: u64) -> Handle {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { fc_build_gaussian(m, n, seed, &mut f) }, FcStatus::Ok);
    Handle(f)
}

#[test]
fn frame_lifecycle_and_data_copy() {
    let data = [3.0, 4.0, 1.0, 0.0, 0.0, 2.0];
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { fc_frame_new_real(2, 3, data.as_ptr(), &mut f) }, FcStatus::Ok);
    let f = Handle(f);
    unsafe {
        assert_eq!(fc_frame_rows(f.0), 2);
        assert_eq!(fc_frame_cols(f.0), 3);
        assert!(!fc_frame_is_complex(f.0));
        let mut out = [0.0; 12];
        assert_eq!(fc_frame_copy_data(f.0, out.as_mut_ptr(), 12), FcStatus::Ok);
        let want = [0.6, 0.0, 0.8, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        assert!(out.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-15), "{out:?}");
        assert_eq!(fc_frame_copy_data(f.0, out.as_mut_ptr(), 11), FcStatus::BufferTooSmall);
        assert_eq!(fc_frame_rows(ptr::null()), 0);
        fc_frame_free(ptr::null_mut());
    }
}

#[test]
fn coherence_of_the_identity() {
    let data = [1.0, 0.0, 0.0, 1.0];
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { fc_frame_new_real(2, 2, data.as_ptr(), &mut f) }, FcStatus::Ok);
    let f = Handle(f);
    let mut c = FcCoherence::default();
    assert_eq!(unsafe { fc_frame_coherence(f.0, &mut c) }, FcStatus::Ok);
    assert_eq!(c.mu, 0.0);
    assert_eq!(c.nu, 0.0);
    assert!((c.spectral_norm - 1.0).abs() < 1e-12);
    assert!(c.scp1 && c.scp2);
}

#[test]
fn constructions_and_bounds() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(fc_build_code(5, 1, 0, &mut f), FcStatus::Ok);
        let code = Handle(f);
        assert_eq!((fc_frame_rows(code.0), fc_frame_cols(code.0)), (32, 1024));
        let mut c = FcCoherence::default();
        assert_eq!(fc_frame_coherence(code.0, &mut c), FcStatus::Ok);
        assert!((c.mu - 0.25).abs() < 1e-12);
        assert!((c.spectral_norm.powi(2) - 32.0).abs() < 1e-9);

        let mut k = 0;
        assert_eq!(fc_build_harmonic(128, 16, 3, &mut f, &mut k), FcStatus::Ok);
        let h = Handle(f);
        assert_eq!(fc_frame_rows(h.0), k);
        assert!(fc_frame_is_complex(h.0));

        let mut b = 0.0;
        assert_eq!(fc_real_bound(2, 5, &mut b), FcStatus::Ok);
        assert!((b - (std::f64::consts::PI / 5.0).cos()).abs() < 1e-12);
        assert_eq!(fc_welch_bound(2, 3, &mut b), FcStatus::Ok);
        assert!((b - 0.5).abs() < 1e-15);
        assert_eq!(fc_complex_bound(1, 3, &mut b), FcStatus::Undefined);
        assert!(last_error().contains("M ≥ 2"));
        assert_eq!(fc_bound_3d(10, &mut b), FcStatus::Ok);

        assert_eq!(fc_build_code(12, 2, 0, &mut f), FcStatus::GuardExceeded);
        assert_eq!(fc_build_code(4, 1, 0b10101, &mut f), FcStatus::InvalidArgument);
    }
}

#[test]
fn flipping_through_the_interface() {
    let f = gaussian(4, 12, 9);
    let mut signs = [0i8; 12];
    let mut g = ptr::null_mut();
    let mut h = ptr::null_mut();
    let mut min_nu = 0.0;
    unsafe {
        assert_eq!(fc_linear_time_flip(f.0, &mut g, signs.as_mut_ptr(), 12), FcStatus::Ok);
        let g = Handle(g);
        assert!(signs.iter().all(|&s| s == 1 || s == -1));
        let mut greedy = FcCoherence::default();
        fc_frame_coherence(g.0, &mut greedy);

        assert_eq!(fc_exhaustive_flip(f.0, &mut h, signs.as_mut_ptr(), 12, &mut min_nu), FcStatus::Ok);
        let h = Handle(h);
        let mut best = FcCoherence::default();
        fc_frame_coherence(h.0, &mut best);
        assert_eq!(signs[0], 1);
        assert!((best.nu - min_nu).abs() < 1e-12);
        assert!(min_nu <= greedy.nu + 1e-12);

        let mut small = [0i8; 4];
        let mut none = ptr::null_mut();
        assert_eq!(fc_linear_time_flip(f.0, &mut none, small.as_mut_ptr(), 4), FcStatus::BufferTooSmall);
        assert!(none.is_null());
    }
}

#[test]
fn thresholding_recovers_an_identity_signal() {
    let mut eye = vec![0.0; 16 * 16];
    for i in 0..16 {
        eye[i * 16 + i] = 1.0;
    }
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { fc_frame_new_real(16, 16, eye.as_ptr(), &mut f) }, FcStatus::Ok);
    let f = Handle(f);
    let mut y = vec![0.0; 32];
    y[2 * 3] = 2.0;
    y[2 * 11 + 1] = -5.0;
    let mut est = vec![9.0; 32];
    let mut support = [usize::MAX; 16];
    let mut len = 0;
    unsafe {
        assert_eq!(
            fc_ost_recover(f.0, y.as_ptr(), 1.0, est.as_mut_ptr(), support.as_mut_ptr(), &mut len),
            FcStatus::Ok
        );
    }
    assert_eq!(&support[..len], &[3, 11]);
    assert_eq!(est, y);

    let p = FcThresholdParams { mu: 0.1, rows: 128, snr: 4.0, sigma2: 1.0, cols: 512, t: 0.5 };
    let mut lambda = 0.0;
    assert_eq!(unsafe { fc_ost_threshold(&p, &mut lambda) }, FcStatus::Ok);
    let noise = (2.0 * 512f64.ln()).sqrt() * 2f64.sqrt() / 0.5;
    let interference = (2.0 * 512f64.ln()).sqrt() * 20.0 * 0.1 * (128.0 * 4.0f64).sqrt();
    assert!((lambda - noise.max(interference)).abs() < 1e-9);
    let bad = FcThresholdParams { t: 1.5, ..p };
    assert_eq!(unsafe { fc_ost_threshold(&bad, &mut lambda) }, FcStatus::InvalidArgument);
}

#[test]
fn file_round_trip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let f = gaussian(3, 7, 1);
    for binary in [false, true] {
        let path = CString::new(dir.path().join(format!("f{binary}")).to_str().unwrap()).unwrap();
        let mut g = ptr::null_mut();
        unsafe {
            assert_eq!(fc_frame_write(f.0, path.as_ptr(), binary), FcStatus::Ok);
            assert_eq!(fc_frame_read(path.as_ptr(), &mut g), FcStatus::Ok);
        }
        let g = Handle(g);
        let (mut a, mut b) = ([0.0; 42], [0.0; 42]);
        unsafe {
            fc_frame_copy_data(f.0, a.as_mut_ptr(), 42);
            fc_frame_copy_data(g.0, b.as_mut_ptr(), 42);
        }
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12));
    }

    let missing = CString::new("/no/such/file.frame").unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(fc_frame_read(missing.as_ptr(), &mut g), FcStatus::Io);
        assert!(g.is_null());
        assert_eq!(fc_frame_read(ptr::null(), &mut g), FcStatus::NullPointer);
        assert_eq!(fc_frame_coherence(ptr::null(), ptr::null_mut()), FcStatus::NullPointer);
    }
    let bad = dir.path().join("bad.frame");
    std::fs::write(&bad, "FRAME v1 2 2 real\n1 0\n").unwrap();
    let bad = CString::new(bad.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { fc_frame_read(bad.as_ptr(), &mut g) }, FcStatus::Parse);
    assert!(last_error().contains("line"));

    let zero = [0.0, 0.0, 1.0, 0.0];
    assert_eq!(unsafe { fc_frame_new_real(2, 2, zero.as_ptr(), &mut g) }, FcStatus::InvalidArgument);
}
