//! Serverless-edge versus fog-mediated transfer volumes.
//!
//! Serverless: each device `i` sends its `m_i` bytes to each of `n_i`
//! receivers, `D_s = Σ n_i·m_i`. Fog: a device uploads `m_i` once (`M2`), the
//! fog node compresses it by `α` and sends it on to the `n_i` receivers (`M1`);
//! devices left on the direct route still pay `n_i·m_i` (`M3`).
//! `D_f = M1 + M2 + M3`.
//!
//! All byte totals are exact integers. `α` is held in units of 1e-9 so the
//! threshold test needs no floating point, and a compressed message is
//! `⌈α·m_i⌉` bytes.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CommError {
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(String),
    #[error("bandwidth must be finite and positive, got {0}")]
    InvalidBandwidth(f64),
    #[error("plan routes {routes} devices but {devices} were given")]
    RouteCountMismatch { routes: usize, devices: usize },
    #[error("byte total overflows")]
    Overflow,
}

const NANO: u64 = 1_000_000_000;

/// Bytes per second assumed for the wireless link, 2 MB/s.
pub const DEFAULT_BANDWIDTH_BYTES_PER_S: f64 = 2_000_000.0;

/// Compressed size over original size, in `(0, 1]`, stored as billionths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alpha {
    nano: u64,
}

impl Alpha {
    /// Rounds `value` to the nearest 1e-9.
    pub fn new(value: f64) -> Result<Self, CommError> {
        if !(value.is_finite() && value > 0.0 && value <= 1.0) {
            return Err(CommError::InvalidAlpha(value.to_string()));
        }
        Self::from_nano((value * NANO as f64).round() as u64)
            .map_err(|_| CommError::InvalidAlpha(format!("{value} (below 1e-9)")))
    }

    pub fn from_nano(nano: u64) -> Result<Self, CommError> {
        if nano == 0 || nano > NANO {
            return Err(CommError::InvalidAlpha(format!("{nano}e-9")));
        }
        Ok(Self { nano })
    }

    /// `numerator / denominator`, which must be a multiple of 1e-9.
    pub fn from_ratio(numerator: u64, denominator: u64) -> Result<Self, CommError> {
        let bad = || CommError::InvalidAlpha(format!("{numerator}/{denominator}"));
        let scaled = (numerator as u128 * NANO as u128)
            .checked_div(denominator as u128)
            .ok_or_else(bad)?;
        if scaled * denominator as u128 != numerator as u128 * NANO as u128 {
            return Err(bad());
        }
        Self::from_nano(u64::try_from(scaled).map_err(|_| bad())?)
    }

    pub fn nano(&self) -> u64 {
        self.nano
    }

    pub fn value(&self) -> f64 {
        self.nano as f64 / NANO as f64
    }

    /// `⌈α·bytes⌉`.
    pub fn compress(&self, bytes: u64) -> u64 {
        let scaled = bytes as u128 * self.nano as u128;
        scaled.div_ceil(NANO as u128) as u64
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl FromStr for Alpha {
    type Err = CommError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| CommError::InvalidAlpha(s.to_owned()))?;
        Self::new(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceProfile {
    pub id: String,
    /// `m_i`.
    pub payload_bytes: u64,
    /// `n_i`.
    pub receiver_count: u64,
}

impl DeviceProfile {
    pub fn new(id: impl Into<String>, payload_bytes: u64, receiver_count: u64) -> Self {
        Self {
            id: id.into(),
            payload_bytes,
            receiver_count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Fog,
    Direct,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Fog => "fog",
            Route::Direct => "direct",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkPlan {
    pub alpha: Alpha,
    /// One route per device, in device order.
    pub routes: Vec<Route>,
    pub bandwidth_bytes_per_s: f64,
}

impl NetworkPlan {
    pub fn new(
        alpha: Alpha,
        routes: Vec<Route>,
        bandwidth_bytes_per_s: f64,
    ) -> Result<Self, CommError> {
        if !(bandwidth_bytes_per_s.is_finite() && bandwidth_bytes_per_s > 0.0) {
            return Err(CommError::InvalidBandwidth(bandwidth_bytes_per_s));
        }
        Ok(Self {
            alpha,
            routes,
            bandwidth_bytes_per_s,
        })
    }

    /// `k₁`, the number of fog-routed devices.
    pub fn fog_count(&self) -> usize {
        self.routes.iter().filter(|&&r| r == Route::Fog).count()
    }

    fn check(&self, devices: &[DeviceProfile]) -> Result<(), CommError> {
        if self.routes.len() != devices.len() {
            return Err(CommError::RouteCountMismatch {
                routes: self.routes.len(),
                devices: devices.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceReport {
    pub id: String,
    pub route: Route,
    /// Bytes saved by this device's fog route; zero when routed direct.
    pub saving: i128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommReport {
    pub serverless: u128,
    pub m1: u128,
    pub m2: u128,
    pub m3: u128,
    pub fog_total: u128,
    pub savings: i128,
    /// `D_s / D_f`; 1 when both are zero.
    pub ratio: f64,
    pub devices: Vec<DeviceReport>,
}

fn fan_out(bytes: u64, receivers: u64) -> u128 {
    bytes as u128 * receivers as u128
}

fn add(acc: u128, v: u128) -> Result<u128, CommError> {
    acc.checked_add(v).ok_or(CommError::Overflow)
}

/// `D_s = Σ n_i·m_i`.
pub fn serverless_total(devices: &[DeviceProfile]) -> Result<u128, CommError> {
    devices.iter().try_fold(0u128, |acc, d| {
        add(acc, fan_out(d.payload_bytes, d.receiver_count))
    })
}

/// Bytes saved by routing `device` through the fog: `n·(m − ⌈α·m⌉) − m`.
///
/// With exact `α·m` this is the per-device term `m·[(1 − α)·n − 1]`.
pub fn marginal_saving(device: &DeviceProfile, alpha: Alpha) -> i128 {
    let m = device.payload_bytes as i128;
    let kept = m - alpha.compress(device.payload_bytes) as i128;
    device.receiver_count as i128 * kept - m
}

/// `M1`, `M2`, `M3`, `D_f` and the per-device breakdown for `plan`.
pub fn fog_total(devices: &[DeviceProfile], plan: &NetworkPlan) -> Result<CommReport, CommError> {
    plan.check(devices)?;
    let (mut m1, mut m2, mut m3) = (0u128, 0u128, 0u128);
    let mut reports = Vec::with_capacity(devices.len());
    for (d, &route) in devices.iter().zip(&plan.routes) {
        let saving = match route {
            Route::Fog => {
                m1 = add(
                    m1,
                    fan_out(plan.alpha.compress(d.payload_bytes), d.receiver_count),
                )?;
                m2 = add(m2, d.payload_bytes as u128)?;
                marginal_saving(d, plan.alpha)
            }
            Route::Direct => {
                m3 = add(m3, fan_out(d.payload_bytes, d.receiver_count))?;
                0
            }
        };
        reports.push(DeviceReport {
            id: d.id.clone(),
            route,
            saving,
        });
    }
    let serverless = serverless_total(devices)?;
    let fog = add(add(m1, m2)?, m3)?;
    let ratio = if fog == 0 {
        if serverless == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        serverless as f64 / fog as f64
    };
    Ok(CommReport {
        serverless,
        m1,
        m2,
        m3,
        fog_total: fog,
        savings: serverless as i128 - fog as i128,
        ratio,
        devices: reports,
    })
}

/// Fog iff `(1 − α)·n − 1 > 0`, evaluated exactly; ties go direct.
pub fn route_decision(receiver_count: u64, alpha: Alpha) -> Route {
    let kept = (NANO - alpha.nano) as u128;
    if kept * receiver_count as u128 > NANO as u128 {
        Route::Fog
    } else {
        Route::Direct
    }
}

/// Routes each device independently by the sign of its byte-exact saving.
///
/// The objective is separable, so this minimizes `D_f` over all routings.
/// It agrees with [`route_decision`] whenever `α·m_i` is a whole number of
/// bytes; otherwise the rounded-up compressed size can tip a marginal device
/// to direct.
pub fn optimize_routes(
    devices: &[DeviceProfile],
    alpha: Alpha,
    bandwidth_bytes_per_s: f64,
) -> Result<NetworkPlan, CommError> {
    let routes = devices
        .iter()
        .map(|d| {
            if marginal_saving(d, alpha) > 0 {
                Route::Fog
            } else {
                Route::Direct
            }
        })
        .collect();
    NetworkPlan::new(alpha, routes, bandwidth_bytes_per_s)
}

/// `D_s − D_f` as the sum of per-device fog savings.
pub fn savings(devices: &[DeviceProfile], plan: &NetworkPlan) -> Result<i128, CommError> {
    plan.check(devices)?;
    Ok(devices
        .iter()
        .zip(&plan.routes)
        .filter(|(_, &r)| r == Route::Fog)
        .map(|(d, _)| marginal_saving(d, plan.alpha))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainingLocation {
    Edge,
    FogNode,
}

impl fmt::Display for TrainingLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrainingLocation::Edge => "edge",
            TrainingLocation::FogNode => "fog",
        })
    }
}

/// Train where it moves fewer bytes: fog-side training ships the model out
/// and back (`2·model_bytes`). Ties stay on the edge.
pub fn training_location(transfer_bytes: u64, model_bytes: u64) -> TrainingLocation {
    if transfer_bytes as u128 <= 2 * model_bytes as u128 {
        TrainingLocation::Edge
    } else {
        TrainingLocation::FogNode
    }
}

/// Seconds to move `bytes` at the plan's bandwidth.
pub fn transfer_time(bytes: u128, plan: &NetworkPlan) -> f64 {
    bytes as f64 / plan.bandwidth_bytes_per_s
}
