use rand::Rng;
use rand_distr::StandardNormal;

use super::{c64, CMatrix};

/// Haar-distributed `n×n` unitary: QR of a complex Gaussian matrix with the
/// phases of `diag R` folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let z = CMatrix::from_fn(n, n, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        let d = r[(k, k)];
        let ph = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c64(1.0, 0.0)
        };
        q.column_mut(k).iter_mut().for_each(|v| *v *= ph);
    }
    q
}

/// Haar unitary rescaled to determinant one.
pub fn haar_special_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let u = haar_unitary(rng, n);
    let phase = u.determinant().arg() / n as f64;
    u * num_complex::Complex64::from_polar(1.0, -phase)
}
