#![allow(dead_code)]

use unimodal_entropy::angles::BinaryAngle;
use unimodal_entropy::realset;

pub fn a(s: &str) -> BinaryAngle {
    s.parse().unwrap()
}

/// Purely periodic members of ℛ with exact period `p`, in increasing order.
pub fn members_of_period(p: usize) -> Vec<BinaryAngle> {
    let mut out = Vec::new();
    // θ <= 1/2 forces the first digit to be 0, except for .(1) = 1 which is excluded
    for bits in 0u64..(1 << (p - 1)) {
        let block: Vec<u8> = (0..p).rev().map(|i| ((bits >> i) & 1) as u8).collect();
        let theta = BinaryAngle::periodic(&block).unwrap();
        if theta.period().len() != p || !theta.is_purely_periodic() {
            continue;
        }
        if realset::is_real_angle(&theta).unwrap().member {
            out.push(theta);
        }
    }
    out.sort();
    out
}

/// All purely periodic members of ℛ with period `<= p_max`, sorted and deduplicated.
pub fn corpus(p_max: usize) -> Vec<BinaryAngle> {
    let mut out: Vec<BinaryAngle> = (1..=p_max).flat_map(members_of_period).collect();
    out.sort();
    out.dedup();
    out
}

/// `count` nonzero angles spread evenly over `corpus(p_max)`.
pub fn spread(p_max: usize, count: usize) -> Vec<BinaryAngle> {
    let all: Vec<BinaryAngle> = corpus(p_max).into_iter().skip(1).collect();
    let n = all.len();
    (0..count).map(|i| all[i * (n - 1) / (count - 1)].clone()).collect()
}
