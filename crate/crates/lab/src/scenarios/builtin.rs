use doa_core::array::SourceSpec;
use doa_core::frontend::ReceiverModel;

use super::{Scenario, SmoothingChoice};
use crate::{LabError, Result};

/// A named scenario plus a note on which parameters come from the reference
/// experiment and which were chosen here.
#[derive(Debug, Clone)]
pub struct BuiltinScenario {
    pub name: &'static str,
    pub provenance: &'static str,
    pub scenario: Scenario,
}

fn sources(angles: &[f64]) -> Vec<SourceSpec> {
    angles.iter().map(|&a| SourceSpec::new(a)).collect()
}

/// Every builtin scenario in listing order.
pub fn builtin_scenarios() -> Vec<BuiltinScenario> {
    let table1 = Scenario::with_defaults("table1", sources(&[51.1, 19.5, 0.0, -19.5, -51.1]));

    let seven = Scenario {
        trials: 20,
        ..Scenario::with_defaults(
            "seven_sources",
            sources(&[-60.0, -40.0, -20.0, 0.0, 20.0, 40.0, 60.0]),
        )
    };

    let lo = Scenario {
        receiver: ReceiverModel::five_port(Vec::new(), Vec::new(), 0.5, 1.0).expect("valid jitter"),
        trials: 200,
        ..Scenario::with_defaults("lo_instability", sources(&[-23.0, 34.0]))
    };

    let two_source = Scenario {
        noise_power_db: Some(-20.0),
        trials: 100,
        ..Scenario::with_defaults("two_source_exp", sources(&[0.0, 34.0]))
    };

    let snr_drop = Scenario {
        noise_power_db: Some(0.0),
        trials: 100,
        ..Scenario::with_defaults("snr_drop", sources(&[0.0, 34.0]))
    };

    let resolution = Scenario {
        trials: 50,
        ..Scenario::with_defaults("resolution_sweep", sources(&[-0.5, 0.5]))
    };

    // 27 degree path is the group reference at +6 dB; the 0 degree copy is
    // 6 dB weaker with an arbitrary fixed phase offset.
    let multipath = Scenario {
        smoothing: SmoothingChoice::Forward(6),
        trials: 10,
        ..Scenario::with_defaults(
            "multipath",
            vec![
                SourceSpec::new(27.0)
                    .with_power_db(6.0)
                    .coherent(0, 0.0, 0.0),
                SourceSpec::new(0.0)
                    .with_power_db(6.0)
                    .coherent(0, -6.0, 45.0),
            ],
        )
    };

    vec![
        BuiltinScenario {
            name: "table1",
            provenance: "angles from the reference table; noiseless, n=8, half-wavelength, m=200 are defaults",
            scenario: table1,
        },
        BuiltinScenario {
            name: "seven_sources",
            provenance: "seven sources from the reference text; angles -60..60 step 20 are implementer-chosen",
            scenario: seven,
        },
        BuiltinScenario {
            name: "lo_instability",
            provenance: "angles -23/34 from the reference figure; jitter 0.5 rad phase, 1 dB gain is implementer-chosen",
            scenario: lo,
        },
        BuiltinScenario {
            name: "two_source_exp",
            provenance: "angles 0/34 from the reference experiment; 20 dB SNR is implementer-chosen",
            scenario: two_source,
        },
        BuiltinScenario {
            name: "snr_drop",
            provenance: "20 dB drop from the reference experiment; resulting 0 dB SNR is implementer-chosen",
            scenario: snr_drop,
        },
        BuiltinScenario {
            name: "resolution_sweep",
            provenance: "1 degree separation from the reference simulation; noiseless is implementer-chosen",
            scenario: resolution,
        },
        BuiltinScenario {
            name: "multipath",
            provenance: "coherent 0/27 with 27 stronger from the reference experiment; 6 dB, 45 deg phase, p=6 are implementer-chosen",
            scenario: multipath,
        },
    ]
}

/// Look up a builtin by name.
pub fn builtin(name: &str) -> Result<Scenario> {
    builtin_scenarios()
        .into_iter()
        .find(|b| b.name == name)
        .map(|b| b.scenario)
        .ok_or_else(|| LabError::NotFound(name.to_string()))
}
