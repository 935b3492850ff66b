//! Per-stage seed derivation.
//!
//! Every stage draws its seed from one master seed as
//! `splitmix64(master ^ splitmix64(stage) ^ splitmix64(splitmix64(stage) ^ index))`,
//! so any stage can be re-run in isolation and reproduce its randomness.

/// Pipeline stages that consume randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stage {
    Generate = 1,
    Embed = 2,
    Cluster = 3,
    Validate = 4,
    Surrogate = 5,
    Importance = 6,
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for the `index`-th consumer within `stage`.
pub fn derive(master: u64, stage: Stage, index: u64) -> u64 {
    let s = splitmix64(stage as u64);
    splitmix64(master ^ s ^ splitmix64(s ^ index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_streams() {
        let a = derive(7, Stage::Cluster, 0);
        assert_eq!(a, derive(7, Stage::Cluster, 0));
        assert_ne!(a, derive(7, Stage::Cluster, 1));
        assert_ne!(a, derive(7, Stage::Surrogate, 0));
        assert_ne!(a, derive(8, Stage::Cluster, 0));
    }
}
