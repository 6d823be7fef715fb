#![allow(dead_code)]

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SIDE: usize = 28;

/// Stroke segments (in a 0..1 box) roughly tracing each digit.
fn strokes(digit: u8) -> Vec<((f64, f64), (f64, f64))> {
    let ring = |cx: f64, cy: f64, rx: f64, ry: f64| {
        (0..16)
            .map(|k| {
                let a0 = k as f64 / 16.0 * std::f64::consts::TAU;
                let a1 = (k + 1) as f64 / 16.0 * std::f64::consts::TAU;
                (
                    (cx + rx * a0.cos(), cy + ry * a0.sin()),
                    (cx + rx * a1.cos(), cy + ry * a1.sin()),
                )
            })
            .collect::<Vec<_>>()
    };
    match digit {
        0 => ring(0.5, 0.5, 0.25, 0.35),
        1 => vec![((0.5, 0.15), (0.5, 0.85)), ((0.4, 0.25), (0.5, 0.15))],
        2 => vec![
            ((0.3, 0.25), (0.7, 0.25)),
            ((0.7, 0.25), (0.7, 0.5)),
            ((0.7, 0.5), (0.3, 0.85)),
            ((0.3, 0.85), (0.75, 0.85)),
        ],
        3 => vec![
            ((0.3, 0.2), (0.7, 0.2)),
            ((0.7, 0.2), (0.5, 0.5)),
            ((0.5, 0.5), (0.7, 0.8)),
            ((0.7, 0.8), (0.3, 0.85)),
        ],
        4 => vec![
            ((0.6, 0.15), (0.25, 0.6)),
            ((0.25, 0.6), (0.75, 0.6)),
            ((0.6, 0.15), (0.6, 0.85)),
        ],
        5 => vec![
            ((0.7, 0.15), (0.3, 0.15)),
            ((0.3, 0.15), (0.3, 0.45)),
            ((0.3, 0.45), (0.7, 0.6)),
            ((0.7, 0.6), (0.3, 0.85)),
        ],
        6 => {
            let mut s = ring(0.5, 0.65, 0.2, 0.2);
            s.push(((0.6, 0.15), (0.3, 0.6)));
            s
        }
        7 => vec![((0.25, 0.15), (0.75, 0.15)), ((0.75, 0.15), (0.4, 0.85))],
        8 => {
            let mut s = ring(0.5, 0.3, 0.17, 0.15);
            s.extend(ring(0.5, 0.68, 0.2, 0.18));
            s
        }
        _ => {
            let mut s = ring(0.5, 0.35, 0.2, 0.18);
            s.push(((0.7, 0.35), (0.6, 0.85)));
            s
        }
    }
}

/// Digit-like 28x28 images: each class is a fixed stroke template drawn with
/// a random offset of up to 2 pixels and random ink intensity.
pub fn synthetic_digits(count: usize, seed: u64) -> (Vec<Vec<u8>>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut images = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for i in 0..count {
        let digit = (i % 10) as u8;
        let dx = rng.gen_range(-2i32..=2) as f64;
        let dy = rng.gen_range(-2i32..=2) as f64;
        let ink: u8 = rng.gen_range(180..=255);
        let mut img = vec![0u8; SIDE * SIDE];
        for ((x0, y0), (x1, y1)) in strokes(digit) {
            for k in 0..=40 {
                let f = k as f64 / 40.0;
                let px = (x0 + f * (x1 - x0)) * (SIDE - 1) as f64 + dx;
                let py = (y0 + f * (y1 - y0)) * (SIDE - 1) as f64 + dy;
                let (c, r) = (px.round() as i64, py.round() as i64);
                if (0..SIDE as i64).contains(&c) && (0..SIDE as i64).contains(&r) {
                    img[r as usize * SIDE + c as usize] = ink;
                }
            }
        }
        images.push(img);
        labels.push(digit);
    }
    (images, labels)
}

pub fn write_idx(
    dir: &Path,
    images: &[Vec<u8>],
    labels: &[u8],
) -> (std::path::PathBuf, std::path::PathBuf) {
    let mut img = Vec::new();
    img.extend_from_slice(&0x0000_0803u32.to_be_bytes());
    for d in [images.len() as u32, SIDE as u32, SIDE as u32] {
        img.extend_from_slice(&d.to_be_bytes());
    }
    for i in images {
        img.extend_from_slice(i);
    }
    let mut lab = Vec::new();
    lab.extend_from_slice(&0x0000_0801u32.to_be_bytes());
    lab.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    lab.extend_from_slice(labels);
    let ip = dir.join("images-idx3-ubyte");
    let lp = dir.join("labels-idx1-ubyte");
    std::fs::write(&ip, img).unwrap();
    std::fs::write(&lp, lab).unwrap();
    (ip, lp)
}

pub fn parse_pgm(text: &str) -> (usize, usize, Vec<u8>) {
    let mut tokens = text.split_whitespace();
    assert_eq!(tokens.next(), Some("P2"));
    let w: usize = tokens.next().unwrap().parse().unwrap();
    let h: usize = tokens.next().unwrap().parse().unwrap();
    assert_eq!(tokens.next(), Some("255"));
    let px = tokens.map(|t| t.parse().unwrap()).collect();
    (w, h, px)
}

pub fn parse_mask(text: &str) -> Vec<u8> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}
