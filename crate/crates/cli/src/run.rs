//! Evaluation of a validated scenario over its sweep grid.
//!
//! Points are evaluated in parallel; rows are emitted in sweep order. Each
//! point draws its random seed from stream `index` of a ChaCha8 generator
//! keyed by the master seed, so results do not depend on scheduling.
//!
//! Losses are positive dB throughout. An amplitude gain g corresponds to a
//! power loss of −20 log10 g.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thz_turb_core::atmosphere::{
    risc_infrared, risc_thz_with, rytov_variance, AirState, RegimeThresholds, ThzTransform, TurbulenceProfile,
    TurbulenceRegime,
};
use thz_turb_core::coherence::{
    array_gain_turbulent, channel_matrix_sample, ergodic_capacity_bound, nc_closed_form, nc_numeric, nc_sum_form,
    CapacityInputs, ChannelSampleSpec, CorrelationModel, LinkAngles, NCQuery, NcQuadrature, PlanarArray,
    SeparationGeometry,
};
use thz_turb_core::constants::{dbm_to_watts, wavelength, wavenumber};
use thz_turb_core::fading::{
    andrews_params, aperture_param, gamma_gamma_pdf_with, turbulence_attenuation, GgArgument,
};
use thz_turb_core::propagation::{
    absorption_coefficient, amplitude_to_loss_db, free_space_loss_db, los_path_gain, scattering_extinction,
    AbsorptionTable, LinkGeometry, MieMedium, ParticleSizeDistribution, ScatteringQuadrature,
};
use thz_turb_core::Error as CoreError;

use crate::config::{
    AbsorptionSource, ArraySection, Computation, GgArgumentName, ScenarioConfig, TransformName, TurbulenceModel,
};
use crate::error::{CliError, ConfigIssue};
use crate::sweep::{expand, Parameter, SweepPoint};
use crate::table::{Cell, Column, SweepTable, TableMeta};

/// Seed of sweep point `index` under master seed `master`.
pub fn point_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64);
    rng.next_u64()
}

/// Shared, point-independent inputs built once per run.
struct Context {
    air: AirState,
    transform: ThzTransform,
    absorption: Option<AbsorptionTable>,
    scattering: Option<(ParticleSizeDistribution, MieMedium)>,
    gg_argument: GgArgument,
}

/// Scenario values at one sweep point.
#[derive(Debug, Clone)]
struct State {
    frequency_hz: f64,
    distance_m: f64,
    altitude_m: f64,
    tx_power_dbm: f64,
    bandwidth_hz: f64,
    cn2: f64,
    hv_a: f64,
    wind_speed: f64,
    tx: ArraySection,
    rx: ArraySection,
    rytov_override: Option<f64>,
    psi: f64,
    d_t_spacing: f64,
    d_r_spacing: f64,
}

impl State {
    fn from_config(c: &ScenarioConfig) -> Self {
        Self {
            frequency_hz: c.link.frequency_hz,
            distance_m: c.link.distance_m,
            altitude_m: c.link.altitude_m,
            tx_power_dbm: c.link.tx_power_dbm,
            bandwidth_hz: c.link.bandwidth_hz,
            cn2: c.turbulence.cn2,
            hv_a: c.turbulence.hv_a,
            wind_speed: c.turbulence.wind_speed,
            tx: c.tx_array.clone(),
            rx: c.rx_array.clone(),
            rytov_override: c.fading.rytov_variance,
            psi: c.fading.psi,
            d_t_spacing: c.nc.d_t_spacing,
            d_r_spacing: c.nc.d_r_spacing,
        }
    }

    fn apply(&mut self, p: Parameter, v: f64) {
        match p {
            Parameter::FrequencyHz => self.frequency_hz = v,
            Parameter::DistanceM => self.distance_m = v,
            Parameter::AltitudeM => self.altitude_m = v,
            Parameter::TxPowerDbm => self.tx_power_dbm = v,
            Parameter::BandwidthHz => self.bandwidth_hz = v,
            Parameter::Cn2 => self.cn2 = v,
            Parameter::HvA => self.hv_a = v,
            Parameter::WindSpeed => self.wind_speed = v,
            Parameter::SpacingWavelengths => {
                self.tx.spacing_wavelengths = v;
                self.rx.spacing_wavelengths = v;
            }
            Parameter::ArraySize => {
                let n = v as usize;
                for a in [&mut self.tx, &mut self.rx] {
                    a.nx = n;
                    a.ny = n;
                }
            }
            Parameter::RytovVariance => self.rytov_override = Some(v),
            Parameter::Psi => self.psi = v,
            Parameter::DtSpacing => self.d_t_spacing = v,
            Parameter::DrSpacing => self.d_r_spacing = v,
        }
    }

    fn k(&self) -> f64 {
        wavenumber(self.frequency_hz)
    }

    fn array(&self, a: &ArraySection) -> Result<PlanarArray, CoreError> {
        PlanarArray::new(a.nx, a.ny, a.spacing_wavelengths * wavelength(self.frequency_hz))
    }

    fn geometry(&self, noise_psd_dbm_hz: f64) -> LinkGeometry {
        LinkGeometry {
            frequency_hz: self.frequency_hz,
            distance_m: self.distance_m,
            altitude_m: self.altitude_m,
            tx_power_w: dbm_to_watts(self.tx_power_dbm),
            bandwidth_hz: self.bandwidth_hz,
            noise_psd: dbm_to_watts(noise_psd_dbm_hz),
        }
    }
}

/// Runs a validated scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SweepTable, CliError> {
    let ctx = context(cfg)?;
    let base = State::from_config(cfg);
    let points = expand(&cfg.sweep, &cfg.series);
    let axes: Vec<Parameter> = cfg
        .series
        .iter()
        .map(|s| s.parameter)
        .chain(std::iter::once(cfg.sweep.parameter))
        .collect();

    let mut columns: Vec<Column> = axes.iter().map(|p| Column::new(p.name(), p.unit())).collect();
    columns.extend(output_columns(cfg));

    let blocks: Vec<Vec<Vec<Cell>>> = points
        .par_iter()
        .map(|pt| {
            let mut st = base.clone();
            for &(p, v) in &pt.assignments {
                st.apply(p, v);
            }
            let rows = evaluate(cfg, &ctx, &st, point_seed(cfg.seed, pt.index)).map_err(|e| annotate(pt, e))?;
            Ok(rows
                .into_iter()
                .map(|r| {
                    pt.assignments
                        .iter()
                        .map(|&(_, v)| Cell::Value(v))
                        .chain(r)
                        .collect()
                })
                .collect())
        })
        .collect::<Result<_, CliError>>()?;

    let mut table = SweepTable::new(meta(cfg), columns);
    for row in blocks.into_iter().flatten() {
        table.push_row(row);
    }
    Ok(table)
}

fn annotate(pt: &SweepPoint, source: CoreError) -> CliError {
    CliError::Point {
        index: pt.index,
        point: pt.describe(),
        source,
    }
}

pub fn meta(cfg: &ScenarioConfig) -> TableMeta {
    let digest = Sha256::digest(cfg.canonical_inputs().as_bytes());
    TableMeta {
        computation: cfg.computation.name().to_string(),
        config_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn context(cfg: &ScenarioConfig) -> Result<Context, CliError> {
    let atm = &cfg.atmosphere;
    let invalid = |key: &str, e: CoreError| {
        CliError::Validation(vec![ConfigIssue {
            key: key.to_string(),
            line: None,
            message: e.to_string(),
        }])
    };
    let absorption = match atm.absorption {
        AbsorptionSource::None => None,
        AbsorptionSource::Illustrative => Some(
            AbsorptionTable::illustrative_default()
                .with_scale_height(atm.scale_height_m)
                .map_err(|e| invalid("atmosphere.scale_height_m", e))?,
        ),
        AbsorptionSource::Table => {
            let path = atm.absorption_table.as_deref().expect("validated: table path present");
            Some(
                AbsorptionTable::from_csv_path(path, atm.scale_height_m)
                    .map_err(|e| invalid("atmosphere.absorption_table", e))?,
            )
        }
    };
    let sc = &cfg.scattering;
    let scattering = if sc.enabled {
        let dist = ParticleSizeDistribution::uniform(sc.n0_per_m4, sc.rho0_per_m)
            .map_err(|e| invalid("scattering.n0_per_m4", e))?;
        let medium = MieMedium::constant(Complex64::new(sc.index_re, sc.index_im))
            .map_err(|e| invalid("scattering.index_re", e))?;
        Some((dist, medium))
    } else {
        None
    };
    Ok(Context {
        air: AirState {
            temperature_k: atm.temperature_k,
            pressure_mbar: atm.pressure_mbar,
            vapor_pressure_mbar: atm.vapor_pressure_mbar,
        },
        transform: match cfg.turbulence.thz_transform {
            TransformName::DerivativeRatio => ThzTransform::DerivativeRatio,
            TransformName::Identity => ThzTransform::Identity,
        },
        absorption,
        scattering,
        gg_argument: match cfg.fading.gg_argument {
            GgArgumentName::Product => GgArgument::ProductOfGammas,
            GgArgumentName::Sqrt2 => GgArgument::SquareRootOfTwo,
        },
    })
}

fn output_columns(cfg: &ScenarioConfig) -> Vec<Column> {
    let c = |n: &str, u: &str| Column::new(n, u);
    match cfg.computation {
        Computation::RiscProfile => vec![c("cn2_infrared", "m^-2/3"), c("cn2_thz", "m^-2/3")],
        Computation::Rytov => vec![c("cn2_thz", "m^-2/3"), c("sigma_r2", "1"), c("regime", "0=weak 1=strong 2=saturated")],
        Computation::Nc => {
            let mut v = vec![
                c("cn2_thz", "m^-2/3"),
                c("d_t", "m"),
                c("d_r", "m"),
                c("rho_closed", "1"),
                c("rho_sum", "1"),
            ];
            if cfg.nc.numeric {
                v.push(c("rho_numeric", "1"));
            }
            v
        }
        Computation::Losc => vec![
            c("cn2_thz", "m^-2/3"),
            c("losc_db", "dB"),
            c("array_gain_db", "dB"),
            c("ideal_gain_db", "dB"),
        ],
        Computation::GgPdf => vec![
            c("sigma_r2", "1"),
            c("alpha_c", "1"),
            c("beta_c", "1"),
            c("pdf", "1"),
        ],
        Computation::Attenuation => vec![
            c("sigma_r2", "1"),
            c("d_ra2", "1"),
            c("scintillation_index", "1"),
            c("attenuation_db", "dB"),
        ],
        Computation::LinkBudget => vec![
            c("free_space_db", "dB"),
            c("absorption_db", "dB"),
            c("scattering_db", "dB"),
            c("turbulence_db", "dB"),
            c("losc_db", "dB"),
            c("total_loss_db", "dB"),
            c("rx_power_dbm", "dBm"),
            c("snr_db", "dB"),
        ],
        Computation::Capacity => vec![
            c("turbulence_db", "dB"),
            c("losc_db", "dB"),
            c("capacity_bps", "bit/s"),
            c("capacity_ideal_bps", "bit/s"),
        ],
        Computation::ChannelSample => vec![
            c("rx_index", "1"),
            c("tx_index", "1"),
            c("re", "1"),
            c("im", "1"),
            c("magnitude", "1"),
        ],
    }
}

/// Effective terahertz-band C_n² at the link altitude.
fn effective_cn2(cfg: &ScenarioConfig, ctx: &Context, st: &State) -> Result<f64, CoreError> {
    match cfg.turbulence.model {
        TurbulenceModel::Constant => Ok(st.cn2),
        TurbulenceModel::HufnagelValley => {
            let profile = TurbulenceProfile::hufnagel_valley(st.hv_a, st.wind_speed)?;
            risc_thz_with(st.altitude_m, &profile, &ctx.air, ctx.transform)
        }
    }
}

fn sigma_r2(cfg: &ScenarioConfig, ctx: &Context, st: &State) -> Result<f64, CoreError> {
    match st.rytov_override {
        Some(s) => Ok(s),
        None => rytov_variance(effective_cn2(cfg, ctx, st)?, st.frequency_hz, st.distance_m),
    }
}

/// Turbulence attenuation in dB, `None` at the singular point.
fn turbulence_db(cfg: &ScenarioConfig, ctx: &Context, st: &State) -> Result<Option<f64>, CoreError> {
    if !cfg.fading.enabled {
        return Ok(Some(0.0));
    }
    let s = sigma_r2(cfg, ctx, st)?;
    match turbulence_attenuation(s, aperture_param(st.frequency_hz, st.distance_m)?) {
        Ok(a) => Ok(Some(a.loss_db())),
        Err(CoreError::SingularAttenuation { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Molecular and particle extinction coefficients in 1/m.
fn extinction(ctx: &Context, st: &State) -> Result<(f64, f64), CoreError> {
    let k_abs = match &ctx.absorption {
        Some(t) => absorption_coefficient(st.frequency_hz, st.altitude_m, t)?,
        None => 0.0,
    };
    let k_sca = match &ctx.scattering {
        Some((dist, medium)) => scattering_extinction(
            st.frequency_hz,
            st.altitude_m,
            dist,
            medium,
            &ScatteringQuadrature::default(),
        )?,
        None => 0.0,
    };
    Ok((k_abs, k_sca))
}

fn cell(v: Option<f64>) -> Cell {
    v.map_or(Cell::Singular, Cell::Value)
}

fn evaluate(cfg: &ScenarioConfig, ctx: &Context, st: &State, seed: u64) -> Result<Vec<Vec<Cell>>, CoreError> {
    let one = |v: Vec<f64>| Ok(vec![v.into_iter().map(Cell::Value).collect()]);
    match cfg.computation {
        Computation::RiscProfile => match cfg.turbulence.model {
            TurbulenceModel::Constant => one(vec![st.cn2, st.cn2]),
            TurbulenceModel::HufnagelValley => {
                let profile = TurbulenceProfile::hufnagel_valley(st.hv_a, st.wind_speed)?;
                one(vec![
                    risc_infrared(st.altitude_m, &profile)?,
                    risc_thz_with(st.altitude_m, &profile, &ctx.air, ctx.transform)?,
                ])
            }
        },
        Computation::Rytov => {
            let cn2 = effective_cn2(cfg, ctx, st)?;
            let s = rytov_variance(cn2, st.frequency_hz, st.distance_m)?;
            let regime = match RegimeThresholds::default().classify(s) {
                TurbulenceRegime::Weak => 0.0,
                TurbulenceRegime::Strong => 1.0,
                TurbulenceRegime::Saturated => 2.0,
            };
            one(vec![cn2, s, regime])
        }
        Computation::Nc => {
            let cn2 = effective_cn2(cfg, ctx, st)?;
            let spacing = st.tx.spacing_wavelengths * wavelength(st.frequency_hz);
            let (d_t, d_r) = (st.d_t_spacing * spacing, st.d_r_spacing * spacing);
            let q = NCQuery::new(d_t, d_r, cn2, st.k(), st.distance_m)?;
            let mut v = vec![cn2, d_t, d_r, nc_closed_form(&q), nc_sum_form(&q)];
            if cfg.nc.numeric {
                v.push(nc_numeric(&q, None, SeparationGeometry::Scalar, &NcQuadrature::default())?);
            }
            one(v)
        }
        Computation::Losc => {
            let cn2 = effective_cn2(cfg, ctx, st)?;
            let (tx, rx) = (st.array(&st.tx)?, st.array(&st.rx)?);
            let gain = array_gain_turbulent(&tx, &rx, cn2, st.k(), st.distance_m)?;
            let ideal = (tx.len() * rx.len()) as f64;
            one(vec![
                cn2,
                (10.0 * (ideal / gain).log10()).max(0.0),
                10.0 * gain.log10(),
                10.0 * ideal.log10(),
            ])
        }
        Computation::GgPdf => {
            let s = sigma_r2(cfg, ctx, st)?;
            let p = andrews_params(s, aperture_param(st.frequency_hz, st.distance_m)?)?;
            one(vec![
                s,
                p.alpha_c,
                p.beta_c,
                gamma_gamma_pdf_with(st.psi, &p, ctx.gg_argument)?,
            ])
        }
        Computation::Attenuation => {
            let s = sigma_r2(cfg, ctx, st)?;
            let d = aperture_param(st.frequency_hz, st.distance_m)?;
            let si = if s == 0.0 {
                0.0
            } else {
                andrews_params(s, d)?.scintillation_index()
            };
            let att = match turbulence_attenuation(s, d) {
                Ok(a) => Some(a.loss_db()),
                Err(CoreError::SingularAttenuation { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(vec![vec![s.into(), d.into(), si.into(), cell(att)]])
        }
        Computation::LinkBudget => {
            let geom = st.geometry(cfg.link.noise_psd_dbm_hz);
            let (k_abs, k_sca) = extinction(ctx, st)?;
            let fs = free_space_loss_db(st.frequency_hz, st.distance_m);
            let abs_db = amplitude_to_loss_db((-0.5 * k_abs * st.distance_m).exp());
            let sca_db = amplitude_to_loss_db((-0.5 * k_sca * st.distance_m).exp());
            let turb = turbulence_db(cfg, ctx, st)?;
            let cn2 = effective_cn2(cfg, ctx, st)?;
            let (tx, rx) = (st.array(&st.tx)?, st.array(&st.rx)?);
            let gain = array_gain_turbulent(&tx, &rx, cn2, st.k(), st.distance_m)?;
            let ideal = (tx.len() * rx.len()) as f64;
            let losc = (10.0 * (ideal / gain).log10()).max(0.0);
            let los_db = amplitude_to_loss_db(los_path_gain(&geom, k_abs, k_sca)?);
            let noise_dbm = cfg.link.noise_psd_dbm_hz + 10.0 * st.bandwidth_hz.log10();
            let (total, rx_dbm, snr) = match turb {
                Some(t) => {
                    let rx_dbm = st.tx_power_dbm - los_db - t + 10.0 * gain.log10();
                    (Some(fs + abs_db + sca_db + t + losc), Some(rx_dbm), Some(rx_dbm - noise_dbm))
                }
                None => (None, None, None),
            };
            Ok(vec![vec![
                fs.into(),
                abs_db.into(),
                sca_db.into(),
                cell(turb),
                losc.into(),
                cell(total),
                cell(rx_dbm),
                cell(snr),
            ]])
        }
        Computation::Capacity => {
            let geom = st.geometry(cfg.link.noise_psd_dbm_hz);
            let (k_abs, k_sca) = extinction(ctx, st)?;
            let alpha_los = los_path_gain(&geom, k_abs, k_sca)?;
            let turb = turbulence_db(cfg, ctx, st)?;
            let cn2 = effective_cn2(cfg, ctx, st)?;
            let (tx, rx) = (st.array(&st.tx)?, st.array(&st.rx)?);
            let gain = array_gain_turbulent(&tx, &rx, cn2, st.k(), st.distance_m)?;
            let ideal = (tx.len() * rx.len()) as f64;
            let losc = (10.0 * (ideal / gain).log10()).max(0.0);
            let inputs = |alpha_turb: f64| CapacityInputs {
                bandwidth_hz: st.bandwidth_hz,
                tx_power_w: geom.tx_power_w,
                noise_psd: geom.noise_psd,
                alpha_los,
                alpha_turb,
                tx,
                rx,
            };
            let ideal_capacity = ergodic_capacity_bound(&inputs(1.0), 0.0, st.k(), st.distance_m)?;
            let capacity = match turb {
                Some(t) => Some(ergodic_capacity_bound(
                    &inputs(10f64.powf(-t / 20.0)),
                    cn2,
                    st.k(),
                    st.distance_m,
                )?),
                None => None,
            };
            Ok(vec![vec![cell(turb), losc.into(), cell(capacity), ideal_capacity.into()]])
        }
        Computation::ChannelSample => {
            let (tx, rx) = (st.array(&st.tx)?, st.array(&st.rx)?);
            let geom = st.geometry(cfg.link.noise_psd_dbm_hz);
            let (k_abs, k_sca) = extinction(ctx, st)?;
            let fading = if cfg.fading.enabled {
                let s = sigma_r2(cfg, ctx, st)?;
                Some(andrews_params(s, aperture_param(st.frequency_hz, st.distance_m)?)?)
            } else {
                None
            };
            let correlation = if cfg.fading.correlated {
                Some(CorrelationModel {
                    cn2: effective_cn2(cfg, ctx, st)?,
                    k: st.k(),
                    distance: st.distance_m,
                })
            } else {
                None
            };
            let ch = &cfg.channel;
            let spec = ChannelSampleSpec {
                alpha_los: los_path_gain(&geom, k_abs, k_sca)?,
                k: st.k(),
                angles: LinkAngles {
                    theta_t: ch.theta_t,
                    phi_t: ch.phi_t,
                    theta_r: ch.theta_r,
                    phi_r: ch.phi_r,
                },
                fading,
                correlation,
            };
            let h = channel_matrix_sample(&tx, &rx, &spec, seed)?;
            let mut rows = Vec::with_capacity(h.len());
            for j in 0..h.nrows() {
                for i in 0..h.ncols() {
                    let z = h[(j, i)];
                    rows.push(vec![
                        Cell::Value(j as f64),
                        Cell::Value(i as f64),
                        Cell::Value(z.re),
                        Cell::Value(z.im),
                        Cell::Value(z.norm()),
                    ]);
                }
            }
            Ok(rows)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_seeds_differ_by_index_and_master() {
        assert_ne!(point_seed(1, 0), point_seed(1, 1));
        assert_ne!(point_seed(1, 0), point_seed(2, 0));
        assert_eq!(point_seed(7, 3), point_seed(7, 3));
    }
}
