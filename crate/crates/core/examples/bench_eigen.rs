//! Wall-clock check of the dense Hermitian eigensolver at the sizes the
//! sweep exercises (D up to 71, sector operators up to 126).

use std::time::Instant;

use qkrylov::linalg::{eigh, eigh_values, jacobi_eigh};
use qkrylov::testing::random_hermitian;

fn main() {
    for &n in &[21usize, 41, 71, 126] {
        let a = random_hermitian::<f64>(n, n as u64);
        let reps = if n <= 41 { 200 } else { 50 };
        let t0 = Instant::now();
        for r in 0..reps {
            let e = eigh(&a).unwrap();
            std::hint::black_box(e.values[r % n]);
        }
        let full = t0.elapsed().as_secs_f64() / reps as f64;
        let t1 = Instant::now();
        for r in 0..reps {
            let v = eigh_values(&a).unwrap();
            std::hint::black_box(v[r % n]);
        }
        let vals = t1.elapsed().as_secs_f64() / reps as f64;
        let t2 = Instant::now();
        let jreps = (reps / 10).max(1);
        for r in 0..jreps {
            let e = jacobi_eigh(&a).unwrap();
            std::hint::black_box(e.values[r % n]);
        }
        let jacobi = t2.elapsed().as_secs_f64() / jreps as f64;
        println!(
            "n={n:4}  full={:8.3} ms  values_only={:8.3} ms  jacobi_oracle={:8.3} ms",
            full * 1e3,
            vals * 1e3,
            jacobi * 1e3
        );
    }
}
