//! Acceptance suite. Runs every criterion, prints one `criterion N: PASS|FAIL`
//! line each, and exits non-zero if any failed.

use std::collections::HashSet;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use z2z4_stego::rate::{self, Frontier};
use z2z4_stego::simulate::{self, CoverModel};
use z2z4_stego::{CodeSpec, Depth, MixedVector, StegoCodec};

struct Outcome {
    n: u32,
    ok: bool,
    detail: String,
}

fn report(n: u32, ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        n,
        ok,
        detail: detail.into(),
    }
}

fn mv(s: &str) -> MixedVector {
    s.parse().unwrap()
}

fn criterion_01_golden_matrix() -> Outcome {
    let spec = z2z4_stego::build_code(4, 2).unwrap();
    let got: Vec<String> = spec.columns().iter().map(|c| c.to_string()).collect();
    let want = [
        "|22", "|02", "|20", "|01", "|10", "|11", "|12", "|13", "|21",
    ];
    report(1, got == want, format!("columns {}", got.join(" ")))
}

fn criterion_02_golden_example_unsaturated() -> Outcome {
    let codec = StegoCodec::new(CodeSpec::build(4, 2).unwrap(), Depth::EIGHT);
    let x = [239, 251, 90, 224, 226, 187, 229, 180];
    let y = codec.embed_block(&x, &mv("|02")).unwrap();
    let s = codec.extract_block(&y).unwrap();
    let ok = y == [239, 251, 90, 224, 226, 187, 229, 179] && s == mv("|02");
    report(2, ok, format!("stego {y:?}, syndrome {s}"))
}

fn criterion_03_golden_example_saturated() -> Outcome {
    let codec = StegoCodec::new(CodeSpec::build(4, 2).unwrap(), Depth::EIGHT);
    let x = [239, 251, 90, 224, 226, 187, 229, 0];
    let y = codec.embed_block(&x, &mv("|02")).unwrap();
    let w = codec.symbols_to_vector(&y).unwrap();
    let ok = y == [238, 251, 91, 224, 226, 187, 229, 0]
        && w.to_string() == "110|302310"
        && codec.extract_block(&y).unwrap() == mv("|02");
    report(3, ok, format!("stego {y:?}, w = {w}"))
}

fn criterion_04_perfectness_brute_force() -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for m in 2..=8u32 {
        for delta in 0..=m / 2 {
            let spec = CodeSpec::build(m, delta).unwrap();
            let gamma = (m - 2 * delta) as usize;
            let mut seen = HashSet::new();
            seen.insert(MixedVector::zero(gamma, delta as usize).to_string());
            let mut duplicate = false;
            for h in spec.columns() {
                let mut multiples = vec![h.clone()];
                if h.negate() != *h {
                    multiples.push(h.negate());
                }
                for v in multiples {
                    duplicate |= !seen.insert(v.to_string());
                }
            }
            checked += 1;
            if duplicate || seen.len() != 1 << m {
                bad.push((m, delta));
            }
        }
    }
    report(
        4,
        bad.is_empty(),
        format!("{checked} codes with 2 <= m <= 8 checked, imperfect: {bad:?}"),
    )
}

fn criterion_05_roundtrip_with_saturated_covers() -> Outcome {
    const PAIRS: usize = 100_000;
    let depth = Depth::EIGHT;
    let extremes = [0u32, 1, 254, 255];
    let mut failures = Vec::new();
    for (i, &(m, delta)) in [(3u32, 1u32), (4, 2), (5, 2)].iter().enumerate() {
        let spec = CodeSpec::build(m, delta).unwrap();
        let layout = *spec.layout();
        let codec = StegoCodec::new(spec, depth);
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0005 + i as u64);
        let mut block = vec![0u32; codec.block_len()];
        for _ in 0..PAIRS {
            for x in block.iter_mut() {
                *x = if rng.random_bool(0.5) {
                    extremes[rng.random_range(0..4)]
                } else {
                    rng.random_range(0..=255)
                };
            }
            let secret = layout.unpack(rng.random_range(0..layout.size() as u32));
            let stego = match codec.embed_block(&block, &secret) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("({m},{delta}) {block:?}: {e}"));
                    continue;
                }
            };
            let changed = block.iter().zip(&stego).filter(|(a, b)| a != b).count();
            let unit = block.iter().zip(&stego).all(|(&a, &b)| a.abs_diff(b) <= 1);
            let in_range = stego.iter().all(|&y| y <= 255);
            let back = codec.extract_block(&stego).unwrap();
            if back != secret || changed > 2 || !unit || !in_range {
                failures.push(format!("({m},{delta}) {block:?} -> {stego:?}"));
            }
        }
    }
    report(
        5,
        failures.is_empty(),
        format!(
            "3 x {PAIRS} roundtrips, {} failures{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!(", first {f}"))
                .unwrap_or_default()
        ),
    )
}

fn criterion_06_closed_form_vs_monte_carlo() -> Outcome {
    let spec = CodeSpec::build(4, 2).unwrap();
    let trials = 1_000_000;
    let uniform =
        simulate::monte_carlo_distortion(&spec, Depth::EIGHT, CoverModel::Uniform, trials, 6)
            .unwrap();
    let interior =
        simulate::monte_carlo_distortion(&spec, Depth::EIGHT, CoverModel::Interior, trials, 6)
            .unwrap();
    let want_uniform = 967.0 / 8192.0;
    let want_interior = 15.0 / 128.0;
    let z_uniform = (uniform.mean - want_uniform) / uniform.std_error;
    let z_interior = (interior.mean - want_interior) / interior.std_error;
    let ok = z_uniform.abs() <= 3.0 && z_interior.abs() <= 3.0;
    report(
        6,
        ok,
        format!(
            "uniform D^ = {:.7} (SE {:.2e}, z = {z_uniform:.2} vs 967/8192), interior D^ = {:.7} (SE {:.2e}, z = {z_interior:.2} vs 15/128)",
            uniform.mean, uniform.std_error, interior.mean, interior.std_error
        ),
    )
}

fn criterion_07_direct_sum_comparison() -> Outcome {
    let oracle = [
        (3, 0.75, 0.7824799845807872),
        (4, 0.5, 0.4899429605219018),
        (5, 0.3125, 0.30898553438600573),
        (6, 0.1875, 0.1839741769894134),
        (7, 0.109375, 0.10658284871529305),
        (8, 0.0625, 0.06227657977578825),
        (9, 0.03515625, 0.03441376726441355),
        (10, 0.01953125, 0.019205821649924952),
        (11, 0.0107421875, 0.01068867718518697),
        (12, 0.005859375, 0.005755698100929985),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (m, e, hull) in oracle {
        let c = rate::theorem1_check::<f64>(m, 1..=12).unwrap();
        let expected_hold = m >= 4;
        let good =
            c.holds == expected_hold && (c.hull_e - hull).abs() <= 1e-4 && (c.e - e).abs() <= 1e-12;
        ok &= good;
        notes.push(format!(
            "m={m} E={:.6} hull={:.6} holds={}",
            c.e, c.hull_e, c.holds
        ));
    }
    report(7, ok, notes.join("; "))
}

fn criterion_08_saturated_ordering() -> Outcome {
    let b = 8;
    let ternary: Vec<_> = (1..=10)
        .map(|mu| rate::ternary_rate::<f64>(mu, Some(b)))
        .collect();
    let frontier = Frontier::new(&ternary).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for m in 4..=8 {
        let p = rate::z2z4_rate_saturating::<f64>(m, b);
        let hull = frontier.rate_at(p.d).unwrap();
        ok &= p.e > hull;
        notes.push(format!("m={m} E={:.6} > {hull:.6}", p.e));
    }
    let d2 = rate::ternary_rate::<f64>(2, Some(b)).d;
    ok &= (d2 - 0.227431).abs() <= 1e-6;
    notes.push(format!("ternary mu=2 D={d2:.7}"));
    report(8, ok, notes.join("; "))
}

fn criterion_09_ternary_baseline() -> Outcome {
    let trials = 1_000_000;
    let uniform =
        simulate::ternary_baseline_distortion(2, Depth::EIGHT, CoverModel::Uniform, trials, 9);
    let interior =
        simulate::ternary_baseline_distortion(2, Depth::EIGHT, CoverModel::Interior, trials, 9);
    let z_uniform = (uniform.mean - 0.227431) / uniform.std_error;
    let z_interior = (interior.mean - 2.0 / 9.0) / interior.std_error;
    let ok = z_uniform.abs() <= 3.0 && z_interior.abs() <= 3.0;
    report(
        9,
        ok,
        format!(
            "uniform D^ = {:.7} (SE {:.2e}, z = {z_uniform:.2} vs 0.227431), interior D^ = {:.7} (SE {:.2e}, z = {z_interior:.2} vs 2/9)",
            uniform.mean, uniform.std_error, interior.mean, interior.std_error
        ),
    )
}

fn criterion_10_cli_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (w, h) = (512usize, 512usize);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let pixels: Vec<u8> = (0..w * h).map(|_| rng.random()).collect();
    let message: Vec<u8> = (0..1024).map(|_| rng.random()).collect();
    let mut pgm = format!("P5\n{w} {h}\n255\n").into_bytes();
    pgm.extend_from_slice(&pixels);

    let cover = dir.path().join("cover.pgm");
    let secret = dir.path().join("secret.bin");
    let stego = dir.path().join("stego.pgm");
    let recovered = dir.path().join("recovered.bin");
    std::fs::write(&cover, &pgm).unwrap();
    std::fs::write(&secret, &message).unwrap();

    let bin = env!("CARGO_BIN_EXE_z2z4steg");
    let embed = Command::new(bin)
        .args(["embed", "-m", "4", "-d", "2", "--cover"])
        .arg(&cover)
        .arg("--message")
        .arg(&secret)
        .arg("--out")
        .arg(&stego)
        .output()
        .unwrap();
    let extract = Command::new(bin)
        .args(["extract", "-m", "4", "-d", "2", "--cover"])
        .arg(&stego)
        .arg("--out")
        .arg(&recovered)
        .output()
        .unwrap();

    let stego_bytes = std::fs::read(&stego).unwrap_or_default();
    let header = pgm.len() - pixels.len();
    let exact = extract.status.success() && std::fs::read(&recovered).ok() == Some(message.clone());

    let blocks = (32 + 8 * message.len()).div_ceil(4);
    let embedded = blocks * 8;
    let sq: u64 = pixels[..embedded]
        .iter()
        .zip(stego_bytes.get(header..header + embedded).unwrap_or(&[]))
        .map(|(&a, &b)| (a as i64 - b as i64).pow(2) as u64)
        .sum();
    let untouched = stego_bytes.get(header + embedded..) == Some(&pixels[embedded..]);
    let d = sq as f64 / embedded as f64;
    let target = 967.0 / 8192.0;
    let ok = embed.status.success()
        && exact
        && untouched
        && stego_bytes.len() == pgm.len()
        && (d - target).abs() <= 0.1 * target;
    report(
        10,
        ok,
        format!(
            "byte-exact = {exact}, {blocks} blocks embedded, D = {d:.6} vs {target:.6} ({:+.2}%)",
            100.0 * (d - target) / target
        ),
    )
}

fn main() {
    let criteria: [fn() -> Outcome; 10] = [
        criterion_01_golden_matrix,
        criterion_02_golden_example_unsaturated,
        criterion_03_golden_example_saturated,
        criterion_04_perfectness_brute_force,
        criterion_05_roundtrip_with_saturated_covers,
        criterion_06_closed_form_vs_monte_carlo,
        criterion_07_direct_sum_comparison,
        criterion_08_saturated_ordering,
        criterion_09_ternary_baseline,
        criterion_10_cli_end_to_end,
    ];
    let mut failed = 0;
    for (i, run) in criteria.into_iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            report(i as u32 + 1, false, format!("panicked: {msg}"))
        });
        println!(
            "criterion {}: {} - {}",
            outcome.n,
            if outcome.ok { "PASS" } else { "FAIL" },
            outcome.detail
        );
        failed += usize::from(!outcome.ok);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
