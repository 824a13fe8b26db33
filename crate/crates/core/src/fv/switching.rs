//! DG/FV switching with hysteresis.

use super::IndicatorConfig;
use crate::field::ElementKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwitchDecision {
    Keep,
    ToFv,
    ToDg,
}

/// Decides the next representation of every element. `blocked` elements
/// (mortar neighbors) never become FV.
pub fn update_representation(
    kinds: &[ElementKind],
    indicators: &[f64],
    cfg: &IndicatorConfig,
    blocked: &[bool],
) -> Vec<SwitchDecision> {
    kinds
        .iter()
        .zip(indicators)
        .zip(blocked)
        .map(|((&k, &ind), &blocked)| match k {
            ElementKind::Dg if ind > cfg.upper && !blocked => SwitchDecision::ToFv,
            ElementKind::Fv if ind < cfg.lower => SwitchDecision::ToDg,
            _ => SwitchDecision::Keep,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fv::IndicatorKind;

    #[test]
    fn hysteresis_band() {
        let cfg = IndicatorConfig::new(IndicatorKind::JamesonPressure, 0.5, 0.1).unwrap();
        let kinds = [ElementKind::Dg, ElementKind::Fv, ElementKind::Dg, ElementKind::Fv, ElementKind::Dg];
        let ind = [0.3, 0.3, 0.7, 0.05, 0.9];
        let d = update_representation(&kinds, &ind, &cfg, &[false, false, false, false, true]);
        use SwitchDecision::*;
        assert_eq!(d, vec![Keep, Keep, ToFv, ToDg, Keep]);
    }

    #[test]
    fn band_oscillation_never_switches() {
        let cfg = IndicatorConfig::new(IndicatorKind::PerssonModal, -3.0, -4.5).unwrap();
        for start in [ElementKind::Dg, ElementKind::Fv] {
            let mut kind = start;
            let mut switches = 0;
            for step in 0..100 {
                let ind = -3.75 + 0.7 * (step as f64 * 0.9).sin();
                match update_representation(&[kind], &[ind], &cfg, &[false])[0] {
                    SwitchDecision::Keep => {}
                    SwitchDecision::ToFv => {
                        kind = ElementKind::Fv;
                        switches += 1
                    }
                    SwitchDecision::ToDg => {
                        kind = ElementKind::Dg;
                        switches += 1
                    }
                }
            }
            assert_eq!((switches, kind), (0, start));
        }
        assert!(IndicatorConfig::new(IndicatorKind::PerssonModal, -5.0, -4.0).is_err());
    }
}
