//! Derives the fuel coefficients of the UK truck and the two optimal cruise
//! speeds, then prints the fuel and cost per kilometre across the speed range.
//!
//! cargo run --example coefficients

use green_router::energy::{arc_fuel, optimal_speed_fuel, optimal_speed_fuel_driver, ObjectiveParams, PhysicalParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truck = PhysicalParams::uk_truck();
    let [w1, w2, w3, w4] = truck.derive_w_coefficients()?;
    println!("w1 = {w1:.8e}  w2 = {w2:.8e}  w3 = {w3:.8e}  w4 = {w4:.8e}");

    let p = ObjectiveParams::prp_uk_2012().with_w([w1, w2, w3, w4]);
    let v_f = optimal_speed_fuel(&p)?;
    let v_fd = optimal_speed_fuel_driver(&p)?;
    println!("fuel-optimal speed {v_f:.4} m/s ({:.1} km/h)", v_f * 3.6);
    println!("fuel+driver optimal speed {v_fd:.4} m/s ({:.1} km/h)", v_fd * 3.6);

    println!("\n  km/h   l/km empty   l/km 2t load   cost/km empty");
    for kmh in (20..=90).step_by(10) {
        let v = kmh as f64 / 3.6;
        let empty = arc_fuel(1000.0, 0.0, v, &p)?;
        let loaded = arc_fuel(1000.0, 2000.0, v, &p)?;
        let cost = p.fuel_cost * empty + p.driver_wage * 1000.0 / v;
        println!("  {kmh:>4}   {empty:>10.4}   {loaded:>12.4}   {cost:>13.4}");
    }
    Ok(())
}
