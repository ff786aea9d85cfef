//! How large the credential space is for a few pattern shapes, on the
//! 14-channel Wi-Fi plan and the 80-channel L-band plan, and how many random
//! guesses an impostor needs on average.
//!
//!     cargo run --example pattern_space

use beaconveil::band::BandPlan;
use beaconveil::space::pattern_space_size;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for band in [BandPlan::ieee80211_2g4(), BandPlan::link16_l_band()] {
        println!("{} ({} channels)", band.name(), band.channel_count());
        for (n, l, max_tu) in [(2, 2, 1), (3, 4, 16), (4, 6, 16), (8, 8, 16)] {
            let size = pattern_space_size(n, l, u32::from(band.channel_count()), max_tu)?;
            let digits = size.to_string().len();
            println!("  n={n} L={l} max_tu={max_tu}: {size} (~10^{}), expected guesses {}", digits - 1, (&size + 1u32) / 2u32);
        }
    }
    Ok(())
}
