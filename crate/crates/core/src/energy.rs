//! Cost models.
//!
//! The PRP objective charges fuel through a load- and speed-dependent
//! consumption profile `d * (w1/v + w2 + w3*f + w4*v^2)` plus a driver wage on
//! the route completion time. FCVRP and EMVRP are load-weighted distance
//! objectives with no speed decision.

use crate::error::{Error, Result};
use crate::instance::{Instance, ProblemKind};

/// Vehicle, fuel and road constants of the comprehensive emissions model.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Curb weight (kg).
    pub curb_weight: f64,
    /// Fuel-to-air mass ratio.
    pub fuel_air_ratio: f64,
    /// Engine friction factor (kJ/rev/l).
    pub engine_friction: f64,
    /// Engine speed (rev/s).
    pub engine_speed: f64,
    /// Engine displacement (l).
    pub engine_displacement: f64,
    /// Gravitational constant (m/s^2).
    pub gravity: f64,
    pub drag_coeff: f64,
    /// Air density (kg/m^3).
    pub air_density: f64,
    /// Frontal surface area (m^2).
    pub frontal_area: f64,
    pub rolling_resistance: f64,
    pub drivetrain_efficiency: f64,
    pub engine_efficiency: f64,
    /// Heating value of diesel (kJ/g).
    pub heating_value: f64,
    /// g/s to l/s conversion factor.
    pub conversion: f64,
    /// Acceleration on the arc (m/s^2).
    pub acceleration: f64,
    /// Road inclination (rad).
    pub road_angle: f64,
}

impl PhysicalParams {
    /// Light-duty diesel truck used by the UK PRP benchmark.
    pub fn uk_truck() -> Self {
        PhysicalParams {
            curb_weight: 6350.0,
            fuel_air_ratio: 1.0,
            engine_friction: 0.2,
            engine_speed: 33.0,
            engine_displacement: 5.0,
            gravity: 9.81,
            drag_coeff: 0.7,
            air_density: 1.2041,
            frontal_area: 3.912,
            rolling_resistance: 0.01,
            drivetrain_efficiency: 0.4,
            engine_efficiency: 0.9,
            heating_value: 44.0,
            conversion: 737.0,
            acceleration: 0.0,
            road_angle: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("curb_weight", self.curb_weight),
            ("fuel_air_ratio", self.fuel_air_ratio),
            ("engine_friction", self.engine_friction),
            ("engine_speed", self.engine_speed),
            ("engine_displacement", self.engine_displacement),
            ("gravity", self.gravity),
            ("drag_coeff", self.drag_coeff),
            ("air_density", self.air_density),
            ("frontal_area", self.frontal_area),
            ("rolling_resistance", self.rolling_resistance),
            ("drivetrain_efficiency", self.drivetrain_efficiency),
            ("engine_efficiency", self.engine_efficiency),
            ("heating_value", self.heating_value),
            ("conversion", self.conversion),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Collapses the physical model into the four coefficients of the arc
    /// consumption profile. With zero acceleration and inclination the road
    /// term reduces to `g * C_r`.
    pub fn derive_w_coefficients(&self) -> Result<[f64; 4]> {
        self.validate()?;
        let lambda = self.fuel_air_ratio / (self.heating_value * self.conversion);
        let gamma = 1.0 / (1000.0 * self.drivetrain_efficiency * self.engine_efficiency);
        let beta = 0.5 * self.drag_coeff * self.air_density * self.frontal_area;
        let alpha = self.acceleration
            + self.gravity * self.road_angle.sin()
            + self.gravity * self.rolling_resistance * self.road_angle.cos();
        Ok([
            lambda * self.engine_friction * self.engine_speed * self.engine_displacement,
            lambda * self.curb_weight * gamma * alpha,
            lambda * gamma * alpha,
            lambda * beta * gamma,
        ])
    }
}

/// Objective coefficients shared by the three problem variants.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveParams {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
    /// Cost per liter of fuel.
    pub fuel_cost: f64,
    /// Driver wage per second.
    pub driver_wage: f64,
    /// EMVRP weight of an empty vehicle, in load units.
    pub empty_weight: f64,
    /// FCVRP consumption rate of an empty vehicle.
    pub rho_empty: f64,
    /// FCVRP consumption rate of a fully loaded vehicle.
    pub rho_full: f64,
    /// FCVRP fixed cost per used vehicle.
    pub fixed_cost: f64,
    /// Penalty per unit of time warp (and of route-duration excess).
    pub tw_penalty: f64,
}

pub const PRESET_PRP_UK_2012: &str = "prp-uk-2012";
pub const PRESET_FCVRP: &str = "fcvrp-default";
pub const PRESET_EMVRP: &str = "emvrp-default";

impl ObjectiveParams {
    pub fn prp_uk_2012() -> Self {
        ObjectiveParams {
            w1: 1.01763908e-3,
            w2: 5.33605218e-5,
            w3: 8.40323178e-9,
            w4: 1.41223439e-7,
            fuel_cost: 1.4,
            driver_wage: 2.22222222e-3,
            empty_weight: 0.0,
            rho_empty: 1.0,
            rho_full: 2.0,
            fixed_cost: 0.0,
            tw_penalty: 1e8,
        }
    }

    /// `h = 0`, `omega_fc = 1`, `rho* = 2`, `rho_0 = 1`: cost is `d * (1 + f/Q)`.
    pub fn fcvrp_default() -> Self {
        ObjectiveParams {
            fuel_cost: 1.0,
            ..Self::prp_uk_2012()
        }
    }

    /// Empty-vehicle weight is 15% of the capacity.
    pub fn emvrp_default(capacity: f64) -> Self {
        ObjectiveParams {
            empty_weight: 0.15 * capacity,
            ..Self::prp_uk_2012()
        }
    }

    pub fn default_for(kind: ProblemKind, capacity: f64) -> Self {
        match kind {
            ProblemKind::Prp => Self::prp_uk_2012(),
            ProblemKind::Fcvrp => Self::fcvrp_default(),
            ProblemKind::Emvrp => Self::emvrp_default(capacity),
        }
    }

    pub fn preset(name: &str, capacity: f64) -> Option<Self> {
        match name {
            PRESET_PRP_UK_2012 => Some(Self::prp_uk_2012()),
            PRESET_FCVRP => Some(Self::fcvrp_default()),
            PRESET_EMVRP => Some(Self::emvrp_default(capacity)),
            _ => None,
        }
    }

    pub fn with_w(mut self, w: [f64; 4]) -> Self {
        [self.w1, self.w2, self.w3, self.w4] = w;
        self
    }

    pub const KEYS: [&'static str; 11] = [
        "w1",
        "w2",
        "w3",
        "w4",
        "fuel_cost",
        "driver_wage",
        "empty_weight",
        "rho_empty",
        "rho_full",
        "fixed_cost",
        "tw_penalty",
    ];

    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "w1" => self.w1,
            "w2" => self.w2,
            "w3" => self.w3,
            "w4" => self.w4,
            "fuel_cost" => self.fuel_cost,
            "driver_wage" => self.driver_wage,
            "empty_weight" => self.empty_weight,
            "rho_empty" => self.rho_empty,
            "rho_full" => self.rho_full,
            "fixed_cost" => self.fixed_cost,
            "tw_penalty" => self.tw_penalty,
            _ => return None,
        })
    }

    /// Sets a coefficient by name. Returns `false` for unknown keys.
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        let slot = match key {
            "w1" => &mut self.w1,
            "w2" => &mut self.w2,
            "w3" => &mut self.w3,
            "w4" => &mut self.w4,
            "fuel_cost" => &mut self.fuel_cost,
            "driver_wage" => &mut self.driver_wage,
            "empty_weight" => &mut self.empty_weight,
            "rho_empty" => &mut self.rho_empty,
            "rho_full" => &mut self.rho_full,
            "fixed_cost" => &mut self.fixed_cost,
            "tw_penalty" => &mut self.tw_penalty,
            _ => return false,
        };
        *slot = value;
        true
    }

    /// Applies `key = value` lines (or `key value`); `#` starts a comment.
    pub fn apply_overrides(&mut self, text: &str, source: &str) -> Result<()> {
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse {
                path: source.into(),
                line: k + 1,
                msg,
            };
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(char::is_whitespace))
                .ok_or_else(|| err(format!("expected `key = value`, found {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let v: f64 = value.parse().map_err(|_| err(format!("bad number {value:?}")))?;
            if !self.set(key, v) {
                return Err(err(format!("unknown key {key:?}; known keys: {}", Self::KEYS.join(", "))));
            }
        }
        Ok(())
    }

    /// Renders every coefficient in the format read by [`Self::apply_overrides`].
    pub fn render(&self) -> String {
        Self::KEYS
            .iter()
            .map(|k| format!("{k} = {:e}\n", self.get(k).unwrap_or(f64::NAN)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w1 > 0.0 && self.w4 > 0.0) {
            return Err(Error::Domain("w1 and w4 must be positive".into()));
        }
        if self.fuel_cost < 0.0 || self.driver_wage < 0.0 {
            return Err(Error::Domain("fuel cost and driver wage must be nonnegative".into()));
        }
        if !(self.tw_penalty > 0.0) {
            return Err(Error::Domain("time-warp penalty must be positive".into()));
        }
        Ok(())
    }
}

/// Liters burnt on an arc of length `d` carrying load `f` at speed `v`.
pub fn arc_fuel(d: f64, f: f64, v: f64, p: &ObjectiveParams) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("speed must be positive, got {v}")));
    }
    Ok(arc_fuel_unchecked(d, f, v, p))
}

#[inline]
pub(crate) fn arc_fuel_unchecked(d: f64, f: f64, v: f64, p: &ObjectiveParams) -> f64 {
    d * (p.w1 / v + p.w2 + p.w3 * f + p.w4 * v * v)
}

/// Speed minimising fuel alone, `(w1 / 2w4)^(1/3)`.
pub fn optimal_speed_fuel(p: &ObjectiveParams) -> Result<f64> {
    if !(p.w4 > 0.0) || !(p.w1 > 0.0) {
        return Err(Error::Domain("w1 and w4 must be positive".into()));
    }
    Ok((p.w1 / (2.0 * p.w4)).cbrt())
}

/// Speed minimising fuel plus driver wage on a waiting-free arc.
pub fn optimal_speed_fuel_driver(p: &ObjectiveParams) -> Result<f64> {
    if !(p.w4 > 0.0) || !(p.w1 > 0.0) {
        return Err(Error::Domain("w1 and w4 must be positive".into()));
    }
    if !(p.fuel_cost > 0.0) {
        return Err(Error::Domain("fuel cost must be positive".into()));
    }
    Ok(((p.driver_wage / p.fuel_cost + p.w1) / (2.0 * p.w4)).cbrt())
}

pub fn clamp_speed(v: f64, bounds: (f64, f64)) -> f64 {
    v.clamp(bounds.0, bounds.1)
}

/// Itemised PRP cost of one route with fixed speeds.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CostBreakdown {
    pub fuel_liters: f64,
    /// Completion time at the closing depot.
    pub driver_seconds: f64,
    pub total: f64,
    pub distance: f64,
    pub load: f64,
    pub capacity_exceeded: bool,
    /// Sum of late arrivals beyond window ends.
    pub lateness: f64,
    pub duration_exceeded: bool,
}

impl CostBreakdown {
    pub fn is_feasible(&self) -> bool {
        !self.capacity_exceeded && self.lateness <= 1e-6 && !self.duration_exceeded
    }
}

/// Direct simulation of one route: loads from the remaining demand, arrival
/// times with early-arrival waiting, fuel per arc and the wage on the
/// completion time. Violations are flagged, never raised.
pub fn route_cost(visits: &[usize], speeds: &[f64], inst: &Instance) -> CostBreakdown {
    let p = &inst.params;
    let mut out = CostBreakdown::default();
    if visits.len() < 2 {
        return out;
    }
    let total_load: f64 = visits.iter().map(|&i| inst.node(i).demand).sum();
    out.load = total_load;
    out.capacity_exceeded = total_load > inst.capacity + 1e-9;

    let mut remaining = total_load;
    let mut t = 0.0f64;
    for k in 1..visits.len() {
        let (i, j) = (visits[k - 1], visits[k]);
        remaining -= inst.node(i).demand;
        let d = inst.dist(i, j);
        let v = speeds[k - 1];
        out.distance += d;
        out.fuel_liters += arc_fuel_unchecked(d, remaining.max(0.0), v, p);
        let prev = inst.node(i);
        let travel = if d > 0.0 { d / v } else { 0.0 };
        t = t.max(prev.tw_start) + prev.service_time + travel;
        out.lateness += (t - inst.node(j).tw_end).max(0.0);
    }
    out.driver_seconds = t;
    if let Some(limit) = inst.max_route_duration {
        out.duration_exceeded = t > limit + 1e-9;
    }
    out.total = p.fuel_cost * out.fuel_liters + p.driver_wage * t;
    out
}

/// Load carried on each arc of a depot-bounded route.
fn arc_loads<'a>(visits: &'a [usize], inst: &'a Instance) -> impl Iterator<Item = (f64, f64)> + 'a {
    let mut remaining: f64 = visits.iter().map(|&i| inst.node(i).demand).sum();
    visits.windows(2).map(move |w| {
        remaining -= inst.node(w[0]).demand;
        (inst.dist(w[0], w[1]), remaining.max(0.0))
    })
}

pub fn fcvrp_route_cost(visits: &[usize], inst: &Instance) -> f64 {
    let p = &inst.params;
    if visits.len() <= 2 {
        return 0.0;
    }
    let slope = (p.rho_full - p.rho_empty) / inst.capacity;
    let travel: f64 = arc_loads(visits, inst)
        .map(|(d, f)| d * (p.rho_empty + slope * f))
        .sum();
    p.fixed_cost + p.fuel_cost * travel
}

pub fn emvrp_route_cost(visits: &[usize], inst: &Instance) -> f64 {
    let w = inst.params.empty_weight;
    arc_loads(visits, inst).map(|(d, f)| d * (w + f)).sum()
}

pub fn fcvrp_cost<'a>(routes: impl IntoIterator<Item = &'a [usize]>, inst: &Instance) -> f64 {
    routes.into_iter().map(|r| fcvrp_route_cost(r, inst)).sum()
}

pub fn emvrp_cost<'a>(routes: impl IntoIterator<Item = &'a [usize]>, inst: &Instance) -> f64 {
    routes.into_iter().map(|r| emvrp_route_cost(r, inst)).sum()
}

/// True objective of one route under the instance's problem kind. Speeds are
/// ignored for FCVRP and EMVRP.
pub fn objective_route_cost(visits: &[usize], speeds: &[f64], inst: &Instance) -> f64 {
    match inst.kind {
        ProblemKind::Prp => route_cost(visits, speeds, inst).total,
        ProblemKind::Fcvrp => fcvrp_route_cost(visits, inst),
        ProblemKind::Emvrp => emvrp_route_cost(visits, inst),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_round_trip_and_reject_unknown_keys() {
        let p = ObjectiveParams::prp_uk_2012();
        let mut q = ObjectiveParams::fcvrp_default();
        q.apply_overrides(&p.render(), "rendered").unwrap();
        assert_eq!(p, q);
        q.apply_overrides("# wage\ndriver_wage = 0.5\nfuel_cost 2\n", "t").unwrap();
        assert_eq!((q.driver_wage, q.fuel_cost), (0.5, 2.0));
        assert!(matches!(q.apply_overrides("\nspeed = 3", "t"), Err(Error::Parse { line: 2, .. })));
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn uk_truck_reproduces_listed_coefficients() {
        let w = PhysicalParams::uk_truck().derive_w_coefficients().unwrap();
        let listed = ObjectiveParams::prp_uk_2012();
        for (got, want) in w.iter().zip([listed.w1, listed.w2, listed.w3, listed.w4]) {
            assert!(rel(*got, want) <= 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn fuel_air_ratio_scales_all_coefficients() {
        let base = PhysicalParams::uk_truck().derive_w_coefficients().unwrap();
        let mut p = PhysicalParams::uk_truck();
        p.fuel_air_ratio *= 2.0;
        let doubled = p.derive_w_coefficients().unwrap();
        for (a, b) in base.iter().zip(doubled) {
            assert!(rel(b, 2.0 * a) < 1e-14);
        }
    }

    #[test]
    fn nonpositive_physical_param_is_rejected() {
        let mut p = PhysicalParams::uk_truck();
        p.frontal_area = 0.0;
        assert!(p.derive_w_coefficients().is_err());
    }

    #[test]
    fn arc_fuel_values() {
        let p = ObjectiveParams::prp_uk_2012();
        assert_eq!(arc_fuel(0.0, 100.0, 20.0, &p).unwrap(), 0.0);
        // 1000 * (w1/20 + w2 + 400 w4), hand-evaluated.
        let v = arc_fuel(1000.0, 0.0, 20.0, &p).unwrap();
        assert!((v - 0.1607318514).abs() < 1e-9, "{v}");
        assert!(arc_fuel(10.0, 0.0, 0.0, &p).is_err());
        assert!(arc_fuel(10.0, 0.0, -1.0, &p).is_err());
    }

    #[test]
    fn arc_fuel_is_affine_in_load() {
        let p = ObjectiveParams::prp_uk_2012();
        let (d, v) = (2500.0, 17.0);
        let f0 = arc_fuel(d, 0.0, v, &p).unwrap();
        for f in [1.0, 250.0, 3650.0] {
            let slope = (arc_fuel(d, f, v, &p).unwrap() - f0) / f;
            assert!(rel(slope, d * p.w3) < 1e-6);
        }
    }

    #[test]
    fn optimal_speeds() {
        let p = ObjectiveParams::prp_uk_2012();
        let vf = optimal_speed_fuel(&p).unwrap();
        let vfd = optimal_speed_fuel_driver(&p).unwrap();
        assert!((vf - 15.33).abs() < 0.005);
        assert!((vfd - 20.97).abs() < 0.005);
        assert!(vf < vfd);

        let mut no_wage = p.clone();
        no_wage.driver_wage = 0.0;
        assert!(rel(optimal_speed_fuel_driver(&no_wage).unwrap(), vf) < 1e-15);

        let mut bad = p.clone();
        bad.w4 = 0.0;
        assert!(optimal_speed_fuel(&bad).is_err());
        let mut bad = p;
        bad.fuel_cost = 0.0;
        assert!(optimal_speed_fuel_driver(&bad).is_err());
    }

    #[test]
    fn presets_by_name() {
        assert_eq!(
            ObjectiveParams::preset(PRESET_PRP_UK_2012, 1.0),
            Some(ObjectiveParams::prp_uk_2012())
        );
        assert_eq!(ObjectiveParams::preset(PRESET_EMVRP, 160.0).unwrap().empty_weight, 24.0);
        assert!(ObjectiveParams::preset("nope", 1.0).is_none());
    }
}
