//! Independent scan for personal data the censoring rules should catch.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;

pub const NAMES: [&str; 3] = ["Nguyễn Văn An", "Trần Thị Bình", "Lê Minh Châu"];

/// Independent scan for anything the censoring rules should have caught.
pub fn violations(text: &str, names: &[&str]) -> Vec<String> {
    let mut out = Vec::new();
    for run in Regex::new(r"[0-9]+").unwrap().find_iter(text) {
        if matches!(run.len(), 7 | 10) {
            out.push(run.as_str().to_string());
        }
    }
    for m in Regex::new(r"[^\s@]+@[^\s@]+\.[A-Za-z]{2,}").unwrap().find_iter(text) {
        out.push(m.as_str().to_string());
    }
    let lower = text.to_lowercase();
    for n in names {
        if lower.contains(&n.to_lowercase()) {
            out.push(n.to_string());
        }
    }
    out
}

pub fn fuzz_string(rng: &mut ChaCha8Rng) -> String {
    const PIECES: [&str; 14] = [
        "0912345678", "2012345", "12345678901", "sv.an@truong.edu.vn", "a@b.co", "@", ".", " ", "MSSV ",
        "Nguyễn Văn An", "trần thị bình", "đăng_ký", "x", "9",
    ];
    let n = rng.random_range(0..8);
    (0..n).map(|_| PIECES[rng.random_range(0..PIECES.len())]).collect()
}
