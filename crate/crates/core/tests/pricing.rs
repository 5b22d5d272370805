use proptest::prelude::*;
use ranslice::pricing::{profit, update_prices, PricingState};

fn loads(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..5000.0f64, len)
}

proptest! {
    #[test]
    fn update_respects_floor_sign_and_rest(
        (prices, before, after) in (1usize..10).prop_flat_map(|r| (prop::collection::vec(0.0..50.0f64, r), loads(r), loads(r))),
        sigma in 1e-4..3.0f64,
        c0 in 0.0..5.0f64,
    ) {
        let prices: Vec<f64> = prices.iter().map(|p| p + c0).collect();
        let s = update_prices(&PricingState::new(prices.clone(), sigma, c0).unwrap(), &before).unwrap();
        prop_assert_eq!(&s.prices, &prices);
        let moved = update_prices(&s, &after).unwrap();
        let still = update_prices(&s, &before).unwrap();
        prop_assert_eq!(&still.prices, &prices);
        for r in 0..prices.len() {
            let p = moved.prices[r];
            prop_assert!(p >= c0);
            let want = (prices[r] + sigma * (after[r] - before[r])).max(c0);
            prop_assert_eq!(p, want);
            if after[r] > before[r] { prop_assert!(p > prices[r]); }
            if after[r] < before[r] { prop_assert!(p < prices[r] || p == c0); }
        }
        prop_assert_eq!(moved.previous_load.as_deref(), Some(&before[..]));
        prop_assert_eq!(moved.slot, 2);
    }

    #[test]
    fn profit_is_margin_times_load(
        (prices, load) in (1usize..10).prop_flat_map(|r| (prop::collection::vec(0.0..50.0f64, r), loads(r))),
        c0 in 0.0..5.0f64,
    ) {
        let s = PricingState::new(prices.clone(), 0.1, c0).unwrap();
        let want: f64 = prices.iter().zip(&load).map(|(p, n)| (p - c0) * n).sum();
        let got = profit(&s, &load);
        prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0));
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(PricingState::new(vec![1.0], 0.0, 1.0).is_err());
    assert!(PricingState::new(vec![1.0], 0.1, -1.0).is_err());
    assert!(PricingState::new(vec![-1.0], 0.1, 1.0).is_err());
    let s = PricingState::new(vec![1.0, 2.0], 0.1, 0.0).unwrap();
    assert!(update_prices(&s, &[1.0]).is_err());
}
