//! Batch output must be a pure function of (master_seed, sample_index),
//! whatever the thread count.

use haartrunc::{EnsembleConfig, sample_ginibre, sample_spectra, sample_stream};

fn run_with_threads(threads: usize, config: &EnsembleConfig) -> Vec<Vec<(u64, u64)>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap();
    pool.install(|| {
        sample_spectra(config)
            .unwrap()
            .into_iter()
            .map(|s| {
                s.eigenvalues
                    .iter()
                    .map(|z| (z.re.to_bits(), z.im.to_bits()))
                    .collect()
            })
            .collect()
    })
}

#[test]
fn worker_count_does_not_change_a_single_bit() {
    let config = EnsembleConfig::new(12, 5, 16, 0xfeed).unwrap();
    let serial = run_with_threads(1, &config);
    for threads in [2, 4, 8] {
        assert_eq!(
            run_with_threads(threads, &config),
            serial,
            "threads = {threads}"
        );
    }
}

#[test]
fn matrices_are_bit_identical_for_identical_keys() {
    let a = sample_ginibre(6, 6, &mut sample_stream(5, 9));
    let b = sample_ginibre(6, 6, &mut sample_stream(5, 9));
    for i in 0..6 {
        for j in 0..6 {
            assert_eq!(a.get(i, j).re.to_bits(), b.get(i, j).re.to_bits());
            assert_eq!(a.get(i, j).im.to_bits(), b.get(i, j).im.to_bits());
        }
    }
}

#[test]
fn distinct_sample_indices_decorrelate() {
    let a = sample_ginibre(4, 4, &mut sample_stream(5, 0));
    let b = sample_ginibre(4, 4, &mut sample_stream(5, 1));
    assert_ne!(a, b);
}
