use proptest::prelude::*;
use wsncrypt::wire::{decode_frame, decode_readings, encode_frame, encode_readings, Frame, SensorKind, SensorReading};

fn frame_strategy(max_payload: usize) -> impl Strategy<Value = Frame> {
    (any::<u16>(), any::<u32>(), proptest::collection::vec(any::<u8>(), 0..=max_payload))
        .prop_map(|(sink_id, sequence, payload)| Frame { sink_id, sequence, payload })
}

fn reading_strategy() -> impl Strategy<Value = SensorReading> {
    (
        any::<u16>(),
        any::<u32>(),
        prop_oneof![Just(SensorKind::Scalar), Just(SensorKind::Audio), Just(SensorKind::Video)],
        proptest::collection::vec(any::<u8>(), 0..=255),
    )
        .prop_map(|(node_id, timestamp, kind, value)| SensorReading { node_id, timestamp, kind, value })
}

proptest! {
    #[test]
    fn frame_round_trip(frame in frame_strategy(2048)) {
        let bytes = encode_frame(&frame).unwrap();
        prop_assert_eq!(bytes.len(), 12 + frame.payload.len());
        prop_assert_eq!(decode_frame(&bytes).unwrap(), frame);
    }

    #[test]
    fn frame_encoding_is_injective(a in frame_strategy(16), b in frame_strategy(16)) {
        prop_assert_eq!(a == b, encode_frame(&a).unwrap() == encode_frame(&b).unwrap());
    }

    #[test]
    fn single_bit_flips_rejected(frame in frame_strategy(52)) {
        let good = encode_frame(&frame).unwrap();
        prop_assert!(good.len() <= 64);
        for bit in 0..good.len() * 8 {
            let mut bad = good.clone();
            bad[bit / 8] ^= 1 << (bit % 8);
            prop_assert!(decode_frame(&bad).is_err());
        }
    }

    #[test]
    fn readings_round_trip(rs in proptest::collection::vec(reading_strategy(), 0..20)) {
        let bytes = encode_readings(&rs).unwrap();
        prop_assert_eq!(decode_readings(&bytes).unwrap(), rs);
    }

    #[test]
    fn decoders_never_panic(data in proptest::collection::vec(any::<u8>(), 0..128)) {
        let _ = decode_frame(&data);
        let _ = decode_readings(&data);
    }
}
