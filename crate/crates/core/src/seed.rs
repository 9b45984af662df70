//! Seed fan-out.
//!
//! Every random stream in the crate is derived from one root seed through
//! [`derive`], keyed by a stage tag and an index (round, retry, bag, fold,
//! repeat). Each component can therefore be reproduced on its own.

/// Stage tags mixed into derived seeds.
pub mod stage {
    pub const HIDDEN: u64 = 0x4849_4444;
    pub const BOOST_ROUND: u64 = 0x524f_554e;
    pub const BOOST_RETRY: u64 = 0x5245_5452;
    pub const BAG_SAMPLE: u64 = 0x4241_4753;
    pub const BAG_HIDDEN: u64 = 0x4241_4748;
    pub const FOLDS: u64 = 0x464f_4c44;
    pub const REPEAT: u64 = 0x5245_5045;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed as `mix(root ⊕ mix(tag ⊕ mix(index)))`.
pub fn derive(root: u64, tag: u64, index: u64) -> u64 {
    splitmix64(root ^ splitmix64(tag ^ splitmix64(index)))
}

/// Seed for the hidden layer of boosting round `round`, attempt `retry`.
pub fn boost_member(root: u64, round: usize, retry: usize) -> u64 {
    derive(
        derive(root, stage::BOOST_ROUND, round as u64),
        stage::BOOST_RETRY,
        retry as u64,
    )
}
