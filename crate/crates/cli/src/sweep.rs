//! Sweep axes, series families and the parameters they may vary.

use serde::Serialize;

/// A scalar input that a sweep axis or a series can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    FrequencyHz,
    DistanceM,
    AltitudeM,
    TxPowerDbm,
    BandwidthHz,
    Cn2,
    HvA,
    WindSpeed,
    SpacingWavelengths,
    ArraySize,
    RytovVariance,
    Psi,
    #[serde(rename = "d_t_spacing")]
    DtSpacing,
    #[serde(rename = "d_r_spacing")]
    DrSpacing,
}

impl Parameter {
    pub const ALL: [Parameter; 14] = [
        Parameter::FrequencyHz,
        Parameter::DistanceM,
        Parameter::AltitudeM,
        Parameter::TxPowerDbm,
        Parameter::BandwidthHz,
        Parameter::Cn2,
        Parameter::HvA,
        Parameter::WindSpeed,
        Parameter::SpacingWavelengths,
        Parameter::ArraySize,
        Parameter::RytovVariance,
        Parameter::Psi,
        Parameter::DtSpacing,
        Parameter::DrSpacing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::FrequencyHz => "frequency_hz",
            Parameter::DistanceM => "distance_m",
            Parameter::AltitudeM => "altitude_m",
            Parameter::TxPowerDbm => "tx_power_dbm",
            Parameter::BandwidthHz => "bandwidth_hz",
            Parameter::Cn2 => "cn2",
            Parameter::HvA => "hv_a",
            Parameter::WindSpeed => "wind_speed",
            Parameter::SpacingWavelengths => "spacing_wavelengths",
            Parameter::ArraySize => "array_size",
            Parameter::RytovVariance => "rytov_variance",
            Parameter::Psi => "psi",
            Parameter::DtSpacing => "d_t_spacing",
            Parameter::DrSpacing => "d_r_spacing",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Parameter::FrequencyHz | Parameter::BandwidthHz => "Hz",
            Parameter::DistanceM | Parameter::AltitudeM => "m",
            Parameter::TxPowerDbm => "dBm",
            Parameter::Cn2 | Parameter::HvA => "m^-2/3",
            Parameter::WindSpeed => "m/s",
            Parameter::SpacingWavelengths => "wavelength",
            Parameter::ArraySize => "elements/side",
            Parameter::RytovVariance | Parameter::Psi => "1",
            Parameter::DtSpacing | Parameter::DrSpacing => "spacing",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    /// Domain check applied to every value the parameter takes.
    pub fn check(self, v: f64) -> Result<(), &'static str> {
        if !v.is_finite() {
            return Err("must be finite");
        }
        let ok = match self {
            Parameter::FrequencyHz
            | Parameter::DistanceM
            | Parameter::BandwidthHz
            | Parameter::SpacingWavelengths
            | Parameter::RytovVariance
            | Parameter::Psi => v > 0.0,
            Parameter::AltitudeM
            | Parameter::Cn2
            | Parameter::HvA
            | Parameter::WindSpeed
            | Parameter::DtSpacing
            | Parameter::DrSpacing => v >= 0.0,
            Parameter::TxPowerDbm => true,
            Parameter::ArraySize => {
                if v.fract() != 0.0 || v < 1.0 {
                    return Err("must be a positive integer");
                }
                true
            }
        };
        if ok {
            Ok(())
        } else if matches!(
            self,
            Parameter::FrequencyHz
                | Parameter::DistanceM
                | Parameter::BandwidthHz
                | Parameter::SpacingWavelengths
                | Parameter::RytovVariance
                | Parameter::Psi
        ) {
            Err("must be > 0")
        } else {
            Err("must be >= 0")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

/// Values taken along an axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AxisValues {
    Range {
        start: f64,
        stop: f64,
        points: usize,
        scale: Scale,
    },
    List { values: Vec<f64> },
}

impl AxisValues {
    /// Expanded grid. End points are reproduced exactly.
    pub fn points(&self) -> Vec<f64> {
        match self {
            AxisValues::List { values } => values.clone(),
            AxisValues::Range {
                start,
                stop,
                points,
                scale,
            } => {
                let n = *points;
                (0..n)
                    .map(|i| {
                        if i == 0 {
                            return *start;
                        }
                        if i + 1 == n {
                            return *stop;
                        }
                        let t = i as f64 / (n - 1) as f64;
                        match scale {
                            Scale::Linear => start + (stop - start) * t,
                            Scale::Log => {
                                let (a, b) = (start.log10(), stop.log10());
                                10f64.powf(a + (b - a) * t)
                            }
                        }
                    })
                    .collect()
            }
        }
    }
}

/// The single sweep axis of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub parameter: Parameter,
    #[serde(flatten)]
    pub values: AxisValues,
}

/// A family of curves: the sweep is repeated for each listed value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSpec {
    pub parameter: Parameter,
    pub values: Vec<f64>,
}

/// One evaluation point: the series values (outer) and the sweep value (inner).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub assignments: Vec<(Parameter, f64)>,
}

impl SweepPoint {
    pub fn describe(&self) -> String {
        self.assignments
            .iter()
            .map(|(p, v)| format!("{}={v:e}", p.name()))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Cartesian product of the series (first series outermost) with the sweep
/// axis innermost, so each curve occupies a contiguous block of rows.
pub fn expand(sweep: &SweepSpec, series: &[SeriesSpec]) -> Vec<SweepPoint> {
    let axis = sweep.values.points();
    let mut combos: Vec<Vec<(Parameter, f64)>> = vec![Vec::new()];
    for s in series {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                s.values.iter().map(move |&v| {
                    let mut next = c.clone();
                    next.push((s.parameter, v));
                    next
                })
            })
            .collect();
    }
    let mut out = Vec::with_capacity(combos.len() * axis.len());
    for c in combos {
        for &v in &axis {
            let mut a = c.clone();
            a.push((sweep.parameter, v));
            out.push(SweepPoint {
                index: out.len(),
                assignments: a,
            });
        }
    }
    out
}
