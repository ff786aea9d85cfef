//! Offline use of the sensor: turn a recorded beacon list and RSSI trace into
//! triplets, then show that shifting every reading by the same amount (a
//! farther emitter) changes nothing.
//!
//!     cargo run --example decode_trace

use beaconveil::band::ChannelId;
use beaconveil::emitter::Nonce;
use beaconveil::sensor::{extract_triplets, BeaconObservation, ObservedSample, SensorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // three beacons: 0 s on channel 1, 4 s on 6, 12 s on 11; bursts 010, 101, 010
    let beacons: Vec<BeaconObservation> = [(0.0, 1, "010"), (4.0, 6, "101"), (12.0, 11, "010")]
        .iter()
        .enumerate()
        .map(|(i, &(t, ch, _))| BeaconObservation { t, channel: ChannelId::new(ch).unwrap(), seq_no: i as u64, nonce: Nonce(i as u64) })
        .collect();
    let bursts = [(0.0, "010"), (4.0, "101"), (12.0, "010")];
    let trace: Vec<ObservedSample> = (0..80)
        .map(|j| {
            let t = j as f64 / 5.0;
            let high = bursts.iter().any(|&(start, bits)| {
                let k = ((t - start) / 0.6 + 1e-9).floor();
                (0.0..3.0).contains(&k) && bits.as_bytes()[k as usize] == b'1'
            });
            ObservedSample { t, rssi: Some(if high { -61.0 } else { -67.0 }) }
        })
        .collect();

    let cfg = SensorConfig::default();
    let near = extract_triplets(&beacons, &trace, &cfg, 0.6)?;
    let shifted: Vec<_> = trace.iter().map(|s| ObservedSample { t: s.t, rssi: s.rssi.map(|r| r - 25.0) }).collect();
    let far = extract_triplets(&beacons, &shifted, &cfg, 0.6)?;
    let show = |ts: &[beaconveil::Triplet]| ts.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    println!("as recorded : {}", show(&near));
    println!("25 dB weaker: {}", show(&far));
    assert_eq!(near, far);
    Ok(())
}
